use nalgebra::DMatrix;

use super::lm::{self, Problem};
use super::{BranchData, FitResult};
use crate::error::{Error, Result};
use crate::units::Frequency;

const OP: &str = "fit_avoided_crossing";

/// δ(fq) = sqrt(Δ² + 4g²) with `g = p·scale`; residuals in units of `scale`.
struct Splitting {
    detuning: Vec<f64>,
    delta: Vec<f64>,
    scale: f64,
}

impl Problem for Splitting {
    fn n_residuals(&self) -> usize {
        self.delta.len()
    }

    fn n_params(&self) -> usize {
        1
    }

    fn residuals(&self, p: &[f64], out: &mut [f64]) {
        let two_g = 2.0 * p[0] * self.scale;
        for (i, (dt, d)) in self.detuning.iter().zip(&self.delta).enumerate() {
            out[i] = (dt.hypot(two_g) - d) / self.scale;
        }
    }

    fn jacobian(&self, p: &[f64], jac: &mut DMatrix<f64>) {
        let two_g = 2.0 * p[0] * self.scale;
        for (i, dt) in self.detuning.iter().enumerate() {
            jac[(i, 0)] = 2.0 * two_g / dt.hypot(two_g);
        }
    }
}

/// Fits the coupling `g` to vacuum-Rabi splittings measured against qubit frequency.
pub fn fit_avoided_crossing(data: &BranchData, f_bare: Frequency) -> Result<FitResult> {
    let n = data.len();
    if n < 3 {
        return Err(Error::TooFewPoints { op: OP, need: 3, got: n });
    }
    let first = data.points[0];
    if data.points.iter().all(|p| *p == first) {
        return Err(Error::degenerate(OP, "all points are identical"));
    }
    let min_delta = data
        .points
        .iter()
        .map(|(_, d)| d.as_hz())
        .fold(f64::INFINITY, f64::min);
    let scale = 0.5 * min_delta;
    let problem = Splitting {
        detuning: data.points.iter().map(|(fq, _)| (*fq - f_bare).as_hz()).collect(),
        delta: data.points.iter().map(|(_, d)| d.as_hz()).collect(),
        scale,
    };
    let sol = lm::solve(&problem, &[1.0]).ok_or_else(|| Error::degenerate(OP, "initial guess is not finite"))?;
    let mut out = FitResult::new(sol.rms(n) * scale, sol.converged, sol.iterations);
    out.set("g", sol.params[0].abs() * scale, sol.sigmas[0].map(|s| s * scale));
    Ok(out)
}
