//! Least-squares and regression fits that turn traces and maps back into
//! device parameters.
//!
//! Nonlinear fits share one damped Gauss–Newton solver with analytic
//! Jacobians and a fixed schedule, so identical inputs give bit-identical
//! [`FitResult`]s. Parameters are normalised to O(1) before solving.

mod crossing;
mod decay;
mod linewidth;
pub(crate) mod lm;
mod lorentzian;
mod ridge;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::Frequency;

pub use crossing::fit_avoided_crossing;
pub use decay::fit_exponential_decay;
pub use linewidth::{fit_flux_noise_amplitude, fit_power_broadening, t2_lower_bound_from_fwhm, DEFAULT_PHI_WINDOW};
pub use lm::MAX_ITERATIONS;
pub use lorentzian::{fit_lorentzian, Polarity};
pub use ridge::{extract_branch_splittings, extract_dip_ridge, find_ridge_transitions, Ridge, RidgeTransition};

pub const FIT_SCHEMA: &str = "cqedlab-fit-v1";

/// Outcome of a fit. `sigmas` omits parameters whose uncertainty is undefined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub params: BTreeMap<String, f64>,
    pub sigmas: BTreeMap<String, f64>,
    /// RMS residual in the units of the fitted data.
    pub residual_rms: f64,
    pub converged: bool,
    pub iterations: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct FitDocument {
    schema: String,
    #[serde(flatten)]
    result: FitResult,
}

impl FitResult {
    pub fn new(residual_rms: f64, converged: bool, iterations: usize) -> Self {
        FitResult {
            params: BTreeMap::new(),
            sigmas: BTreeMap::new(),
            residual_rms,
            converged,
            iterations,
            flags: Vec::new(),
        }
    }

    pub fn set(&mut self, name: &str, value: f64, sigma: Option<f64>) {
        self.params.insert(name.to_string(), value);
        if let Some(s) = sigma.filter(|s| s.is_finite()) {
            self.sigmas.insert(name.to_string(), s.abs());
        }
    }

    pub fn flag(&mut self, flag: &str) {
        self.flags.push(flag.to_string());
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.params.get(name).copied()
    }

    pub fn sigma(&self, name: &str) -> Option<f64> {
        self.sigmas.get(name).copied()
    }

    pub fn has_flag(&self, flag: &str) -> bool {
        self.flags.iter().any(|f| f == flag)
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = FitDocument {
            schema: FIT_SCHEMA.to_string(),
            result: self.clone(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: FitDocument = serde_json::from_str(text)?;
        if doc.schema != FIT_SCHEMA {
            return Err(Error::Schema {
                expected: FIT_SCHEMA.into(),
                found: doc.schema,
            });
        }
        Ok(doc.result)
    }
}

/// Vacuum-Rabi splitting observations `(fq, δ = f+ - f-)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchData {
    pub points: Vec<(Frequency, Frequency)>,
}

impl BranchData {
    pub fn new(points: Vec<(Frequency, Frequency)>) -> Result<Self> {
        if let Some(i) = points
            .iter()
            .position(|(fq, d)| !(d.as_hz() > 0.0) || !d.is_finite() || !fq.is_finite())
        {
            return Err(Error::domain(
                "branch_data",
                format!("point {i}: splitting must be positive and finite"),
            ));
        }
        Ok(BranchData { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Linewidths against flux (Φ0) or drive power (dBm), depending on the fit.
#[derive(Debug, Clone, PartialEq)]
pub struct LinewidthSeries {
    pub points: Vec<(f64, Frequency)>,
}

impl LinewidthSeries {
    pub fn new(points: Vec<(f64, Frequency)>) -> Result<Self> {
        if let Some(i) = points
            .iter()
            .position(|(x, w)| !(w.as_hz() > 0.0) || !w.is_finite() || !x.is_finite())
        {
            return Err(Error::domain(
                "linewidth_series",
                format!("point {i}: FWHM must be positive and finite"),
            ));
        }
        Ok(LinewidthSeries { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}
