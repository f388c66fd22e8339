//! Forward models that render synthetic spectroscopy data from a [`DeviceModel`].
//!
//! Maps are stored x-major: `values[ix][iy]` is |S21| in dB at
//! `(x_axis[ix], y_axis[iy])`. Every column draws its noise from its own
//! ChaCha stream (`seed`, stream = column index), so a map is bit-identical
//! regardless of how columns are scheduled across threads.
//!
//! [`DeviceModel`]: crate::model::DeviceModel

mod decay;
mod flux;
mod lineshape;
mod power;
mod two_tone;

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use decay::{t1_trace, DecayTrace};
pub use flux::{cavity_dips, dressed_cavity_frequency, flux_map, Dip, HYBRID_WINDOW};
pub use lineshape::{lorentzian_magnitude, lorentzian_peak_db, lorentzian_s21};
pub use power::{power_map, power_onsets, power_response};
pub use two_tone::{two_tone_fwhm, two_tone_map, TwoToneConfig};

/// A 1D |S21| (dB) line cut.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectroTrace {
    pub axis: Vec<f64>,
    pub values: Vec<f64>,
    pub meta: BTreeMap<String, f64>,
}

impl SpectroTrace {
    pub fn new(axis: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        check_axis("freq_hz", &axis)?;
        if axis.len() != values.len() {
            return Err(Error::Grid {
                axis: "s21_db".into(),
                msg: format!("{} values for {} frequencies", values.len(), axis.len()),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Grid {
                axis: "s21_db".into(),
                msg: format!("non-finite value at index {i}"),
            });
        }
        Ok(SpectroTrace {
            axis,
            values,
            meta: BTreeMap::new(),
        })
    }

    pub fn with_meta(mut self, key: &str, value: f64) -> Self {
        self.meta.insert(key.to_string(), value);
        self
    }

    pub fn len(&self) -> usize {
        self.axis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axis.is_empty()
    }
}

/// What the x axis of a [`SpectroMap`] sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapAxis {
    /// Flux bias in Φ0.
    Flux,
    /// Readout power in dBm.
    Power,
}

impl MapAxis {
    pub fn label(self) -> &'static str {
        match self {
            MapAxis::Flux => "flux (Φ0)",
            MapAxis::Power => "readout power (dBm)",
        }
    }
}

/// A 2D |S21| (dB) map over (flux or power) × frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectroMap {
    pub x_kind: MapAxis,
    pub x_axis: Vec<f64>,
    pub y_axis: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl SpectroMap {
    pub fn new(x_kind: MapAxis, x_axis: Vec<f64>, y_axis: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        check_axis("x", &x_axis)?;
        check_axis("freq_hz", &y_axis)?;
        if values.len() != x_axis.len() || values.iter().any(|c| c.len() != y_axis.len()) {
            return Err(Error::Grid {
                axis: "s21_db".into(),
                msg: format!(
                    "matrix shape does not match axes {}×{}",
                    x_axis.len(),
                    y_axis.len()
                ),
            });
        }
        Ok(SpectroMap {
            x_kind,
            x_axis,
            y_axis,
            values,
        })
    }

    pub fn column(&self, ix: usize) -> SpectroTrace {
        let key = match self.x_kind {
            MapAxis::Flux => "phi",
            MapAxis::Power => "power_dbm",
        };
        SpectroTrace {
            axis: self.y_axis.clone(),
            values: self.values[ix].clone(),
            meta: BTreeMap::from([(key.to_string(), self.x_axis[ix])]),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.x_axis.len(), self.y_axis.len())
    }
}

/// Readout/drive settings and the noise model shared by all generators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveConfig {
    pub readout_power_dbm: f64,
    #[serde(default)]
    pub drive_power_dbm: Option<f64>,
    /// Standard deviation of additive Gaussian noise on |S21| in dB.
    #[serde(default)]
    pub noise_sigma_db: f64,
    #[serde(default)]
    pub seed: u64,
}

impl Default for DriveConfig {
    fn default() -> Self {
        DriveConfig {
            readout_power_dbm: -50.0,
            drive_power_dbm: None,
            noise_sigma_db: 0.0,
            seed: 0,
        }
    }
}

impl DriveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.noise_sigma_db >= 0.0) || !self.noise_sigma_db.is_finite() {
            return Err(Error::Config {
                path: "drive.noise_sigma_db".into(),
                msg: format!("must be a finite value ≥ 0, got {}", self.noise_sigma_db),
            });
        }
        Ok(())
    }
}

/// Smooth qubit-saturation crossover used by [`power_map`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SaturationModel {
    /// 10%-90% width of each logistic saturation step, in dB.
    #[serde(default = "default_transition_width")]
    pub transition_width_db: f64,
    /// Cavity linewidth multiplier while the last qubit is still unsaturated.
    /// Placeholder value; the measured broadening is not quantified.
    #[serde(default = "default_broadening")]
    pub broadening_factor: f64,
}

fn default_transition_width() -> f64 {
    2.0
}

fn default_broadening() -> f64 {
    1.5
}

impl Default for SaturationModel {
    fn default() -> Self {
        SaturationModel {
            transition_width_db: default_transition_width(),
            broadening_factor: default_broadening(),
        }
    }
}

impl SaturationModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.transition_width_db > 0.0) {
            return Err(Error::Config {
                path: "saturation.transition_width_db".into(),
                msg: format!("must be > 0, got {}", self.transition_width_db),
            });
        }
        if !(self.broadening_factor > 0.0) {
            return Err(Error::Config {
                path: "saturation.broadening_factor".into(),
                msg: format!("must be > 0, got {}", self.broadening_factor),
            });
        }
        Ok(())
    }
}

/// Rejects empty, non-finite or non-increasing axes.
pub(crate) fn check_axis(name: &str, axis: &[f64]) -> Result<()> {
    let fail = |msg: String| {
        Err(Error::Grid {
            axis: name.to_string(),
            msg,
        })
    };
    if axis.is_empty() {
        return fail("empty grid".into());
    }
    if let Some(i) = axis.iter().position(|v| !v.is_finite()) {
        return fail(format!("non-finite sample at index {i}"));
    }
    if let Some(i) = axis.windows(2).position(|w| w[1] <= w[0]) {
        return fail(format!("not strictly increasing at index {}", i + 1));
    }
    Ok(())
}

/// Adds N(0, sigma²) noise to `values` from stream `stream` of the seeded generator.
pub(crate) fn add_noise(values: &mut [f64], sigma: f64, seed: u64, stream: u64) {
    if sigma <= 0.0 {
        return;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let normal = Normal::new(0.0, sigma).expect("sigma is finite and positive");
    for v in values {
        *v += normal.sample(&mut rng);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_checks() {
        assert!(check_axis("f", &[]).is_err());
        assert!(check_axis("f", &[1.0, 1.0]).is_err());
        assert!(check_axis("f", &[1.0, f64::NAN]).is_err());
        assert!(check_axis("f", &[1.0, 2.0, 3.0]).is_ok());
    }

    #[test]
    fn noise_streams_are_independent_and_reproducible() {
        let mut a = vec![0.0; 8];
        let mut b = vec![0.0; 8];
        let mut c = vec![0.0; 8];
        add_noise(&mut a, 1.0, 7, 3);
        add_noise(&mut b, 1.0, 7, 3);
        add_noise(&mut c, 1.0, 7, 4);
        assert_eq!(a, b);
        assert_ne!(a, c);
        let mut z = vec![0.5; 4];
        add_noise(&mut z, 0.0, 7, 0);
        assert_eq!(z, vec![0.5; 4]);
    }

    #[test]
    fn trace_rejects_mismatched_lengths() {
        assert!(SpectroTrace::new(vec![1.0, 2.0], vec![0.0]).is_err());
        assert!(SpectroTrace::new(vec![1.0, 2.0], vec![0.0, f64::INFINITY]).is_err());
    }
}
