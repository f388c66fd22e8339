//! Transmon energy relations and the symmetric-SQUID flux law.
//!
//! The flux coordinate is `phi` in units of Φ0 and the SQUID frequency is
//! `fq_max * sqrt(|cos(π·phi)|)`, which has period 1 and zeros at odd
//! multiples of 1/2.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::units::{FluxBias, Frequency, ELEMENTARY_CHARGE, FLUX_QUANTUM, PLANCK};

/// |cos(π·phi)| below this is treated as the fq = 0 singularity.
const SINGULAR_COS: f64 = 1e-12;

/// Frequency of a symmetric SQUID transmon at the given flux bias.
pub fn squid_frequency(fq_max: Frequency, phi: FluxBias) -> Frequency {
    let c = (PI * phi.phi()).cos().abs();
    if c < SINGULAR_COS {
        return Frequency::ZERO;
    }
    fq_max * c.sqrt()
}

/// Analytic flux derivative of [`squid_frequency`], in Hz per Φ0.
///
/// Singular where the frequency vanishes (phi = ±1/2, ±3/2, ...).
pub fn squid_slope(fq_max: Frequency, phi: FluxBias) -> Result<f64> {
    let arg = PI * phi.phi();
    let c = arg.cos();
    if c.abs() < SINGULAR_COS {
        return Err(Error::domain(
            "dfq_dphi",
            format!(
                "derivative is singular at phi = {} (qubit frequency vanishes)",
                phi.phi()
            ),
        ));
    }
    // d/dphi sqrt(|c|) = sign(c) * (-π sin) / (2 sqrt|c|)
    Ok(-fq_max.as_hz() * PI * arg.sin() * c.signum() / (2.0 * c.abs().sqrt()))
}

/// Transmon transition frequency `sqrt(8·EJ·EC)` with both energies given in Hz (E/h).
pub fn transmon_fq(ej_over_h: Frequency, ec_over_h: Frequency) -> Result<Frequency> {
    let (ej, ec) = (ej_over_h.as_hz(), ec_over_h.as_hz());
    if !(ej > 0.0 && ec > 0.0) {
        return Err(Error::domain(
            "transmon_fq",
            format!("EJ/h and EC/h must be positive, got {ej} and {ec}"),
        ));
    }
    Ok(Frequency::hz((8.0 * ej * ec).sqrt()))
}

/// Charging energy `e²/2C` expressed as a frequency.
pub fn charging_energy(capacitance_farads: f64) -> Result<Frequency> {
    if !(capacitance_farads > 0.0) || !capacitance_farads.is_finite() {
        return Err(Error::domain(
            "charging_energy",
            format!("capacitance must be positive, got {capacitance_farads} F"),
        ));
    }
    Ok(Frequency::hz(
        ELEMENTARY_CHARGE * ELEMENTARY_CHARGE / (2.0 * capacitance_farads * PLANCK),
    ))
}

/// Josephson energy `Φ0·Ic/2π` expressed as a frequency.
pub fn ej_from_ic(critical_current_amps: f64) -> Result<Frequency> {
    if !(critical_current_amps > 0.0) || !critical_current_amps.is_finite() {
        return Err(Error::domain(
            "ej_from_ic",
            format!("critical current must be positive, got {critical_current_amps} A"),
        ));
    }
    Ok(Frequency::hz(
        FLUX_QUANTUM * critical_current_amps / (2.0 * PI * PLANCK),
    ))
}

/// Rescales a reference transmon frequency when EJ and EC change by the
/// given ratios: `fq_ref * sqrt(ej_ratio * ec_ratio)`.
pub fn scale_fq_by_design(fq_ref: Frequency, ej_ratio: f64, ec_ratio: f64) -> Result<Frequency> {
    if !(ej_ratio > 0.0 && ec_ratio > 0.0) {
        return Err(Error::domain(
            "scale_fq_by_design",
            format!("ratios must be positive, got EJ×{ej_ratio}, EC×{ec_ratio}"),
        ));
    }
    Ok(fq_ref * (ej_ratio * ec_ratio).sqrt())
}
