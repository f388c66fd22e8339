//! Unit conventions and physical constants.
//!
//! Every frequency-like quantity (qubit and cavity frequencies, linewidths,
//! couplings, dispersive shifts) is stored as a *linear* frequency in Hz,
//! i.e. the `ω/2π` value. Angular factors only appear inside formulas.
//! Flux is measured in units of the flux quantum Φ0.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// Elementary charge (C), exact SI value.
pub const ELEMENTARY_CHARGE: f64 = 1.602176634e-19;
/// Planck constant (J·s), exact SI value.
pub const PLANCK: f64 = 6.62607015e-34;
/// Magnetic flux quantum h/2e (Wb).
pub const FLUX_QUANTUM: f64 = 2.067833848e-15;

/// A linear frequency in Hz. May be signed when it denotes a shift or detuning.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Frequency(f64);

impl Frequency {
    pub const ZERO: Frequency = Frequency(0.0);

    pub const fn hz(value: f64) -> Self {
        Frequency(value)
    }

    pub fn khz(value: f64) -> Self {
        Frequency(value * 1e3)
    }

    pub fn mhz(value: f64) -> Self {
        Frequency(value * 1e6)
    }

    pub fn ghz(value: f64) -> Self {
        Frequency(value * 1e9)
    }

    pub const fn as_hz(self) -> f64 {
        self.0
    }

    pub fn as_mhz(self) -> f64 {
        self.0 * 1e-6
    }

    pub fn as_ghz(self) -> f64 {
        self.0 * 1e-9
    }

    pub fn abs(self) -> Self {
        Frequency(self.0.abs())
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.0;
        let a = v.abs();
        if a >= 1e9 {
            write!(f, "{:.6} GHz", v * 1e-9)
        } else if a >= 1e6 {
            write!(f, "{:.4} MHz", v * 1e-6)
        } else if a >= 1e3 {
            write!(f, "{:.4} kHz", v * 1e-3)
        } else {
            write!(f, "{v:.4} Hz")
        }
    }
}

impl Add for Frequency {
    type Output = Frequency;
    fn add(self, rhs: Frequency) -> Frequency {
        Frequency(self.0 + rhs.0)
    }
}

impl Sub for Frequency {
    type Output = Frequency;
    fn sub(self, rhs: Frequency) -> Frequency {
        Frequency(self.0 - rhs.0)
    }
}

impl Neg for Frequency {
    type Output = Frequency;
    fn neg(self) -> Frequency {
        Frequency(-self.0)
    }
}

impl Mul<f64> for Frequency {
    type Output = Frequency;
    fn mul(self, rhs: f64) -> Frequency {
        Frequency(self.0 * rhs)
    }
}

/// External flux through the SQUID loop, in units of Φ0.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FluxBias(f64);

impl FluxBias {
    pub const SWEET_SPOT: FluxBias = FluxBias(0.0);

    pub const fn new(phi: f64) -> Self {
        FluxBias(phi)
    }

    pub const fn phi(self) -> f64 {
        self.0
    }
}

/// Converts a power in dBm to milliwatts.
pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

/// Converts a linear magnitude to dB (20·log10).
pub fn magnitude_to_db(m: f64) -> f64 {
    20.0 * m.log10()
}

pub fn db_to_magnitude(db: f64) -> f64 {
    10f64.powf(db / 20.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_constructors_agree() {
        assert_eq!(Frequency::ghz(6.0558).as_hz(), 6.0558e9);
        assert_eq!(Frequency::mhz(100.5).as_hz(), 100.5e6);
        assert!((Frequency::hz(2.6e6).as_mhz() - 2.6).abs() < 1e-12);
    }

    #[test]
    fn flux_quantum_is_h_over_2e() {
        let rel = (PLANCK / (2.0 * ELEMENTARY_CHARGE) - FLUX_QUANTUM).abs() / FLUX_QUANTUM;
        assert!(rel < 1e-9);
    }

    #[test]
    fn db_round_trip() {
        for m in [0.1, 0.5, 1.0, 2.0] {
            assert!((db_to_magnitude(magnitude_to_db(m)) - m).abs() < 1e-14);
        }
        assert_eq!(dbm_to_mw(0.0), 1.0);
        assert!((dbm_to_mw(-30.0) - 1e-3).abs() < 1e-18);
    }

    #[test]
    fn display_picks_unit() {
        assert_eq!(Frequency::ghz(6.438).to_string(), "6.438000 GHz");
        assert_eq!(Frequency::mhz(26.4).to_string(), "26.4000 MHz");
    }
}
