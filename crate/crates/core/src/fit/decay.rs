use nalgebra::DMatrix;

use super::lm::{self, Problem};
use super::FitResult;
use crate::error::{Error, Result};
use crate::synth::DecayTrace;

const OP: &str = "fit_exponential_decay";
const RECOMMENDED_SAMPLES: usize = 5;

/// `a·A0·exp(-t/(τ·T0))`, residuals in units of `A0`.
struct Exponential<'a> {
    t: &'a [f64],
    y: &'a [f64],
    a0: f64,
    t0: f64,
}

impl Problem for Exponential<'_> {
    fn n_residuals(&self) -> usize {
        self.t.len()
    }

    fn n_params(&self) -> usize {
        2
    }

    fn residuals(&self, p: &[f64], out: &mut [f64]) {
        for (i, (&t, &y)) in self.t.iter().zip(self.y).enumerate() {
            out[i] = p[0] * (-t / (p[1] * self.t0)).exp() - y / self.a0;
        }
    }

    fn jacobian(&self, p: &[f64], jac: &mut DMatrix<f64>) {
        for (i, &t) in self.t.iter().enumerate() {
            let s = t / self.t0;
            let e = (-s / p[1]).exp();
            jac[(i, 0)] = e;
            jac[(i, 1)] = p[0] * e * s / (p[1] * p[1]);
        }
    }
}

/// Fits `A·exp(-t/T1)`: log-linear regression for the start, then
/// least squares on the raw amplitudes.
///
/// Flags `few_samples` below five points and `t1_exceeds_span` when the
/// fitted T1 is longer than the sampled delay range.
pub fn fit_exponential_decay(trace: &DecayTrace) -> Result<FitResult> {
    let n = trace.len();
    if n < 2 {
        return Err(Error::TooFewPoints { op: OP, need: 2, got: n });
    }
    let t = &trace.delays;
    let y = &trace.amplitudes;
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain(OP, "non-finite amplitude"));
    }
    let positive: Vec<(f64, f64)> = t
        .iter()
        .zip(y)
        .filter(|(_, &v)| v > 0.0)
        .map(|(&t, &v)| (t, v.ln()))
        .collect();
    if 2 * positive.len() <= n || positive.len() < 2 {
        return Err(Error::degenerate(OP, "most amplitudes are non-positive"));
    }
    if y.iter().all(|&v| v == y[0]) {
        return Err(Error::degenerate(OP, "all samples are equal; no decay"));
    }

    let k = positive.len() as f64;
    let mt = positive.iter().map(|p| p.0).sum::<f64>() / k;
    let ml = positive.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = positive.iter().map(|p| (p.0 - mt).powi(2)).sum();
    let sxy: f64 = positive.iter().map(|p| (p.0 - mt) * (p.1 - ml)).sum();
    let slope = sxy / sxx;
    if !(slope < 0.0) {
        return Err(Error::degenerate(OP, "amplitudes do not decay"));
    }
    let t1_init = -1.0 / slope;
    let a_init = (ml - slope * mt).exp();

    let problem = Exponential {
        t,
        y,
        a0: a_init,
        t0: t1_init,
    };
    let sol = lm::solve(&problem, &[1.0, 1.0]).ok_or_else(|| Error::degenerate(OP, "initial guess is not finite"))?;
    let mut out = FitResult::new(sol.rms(n) * a_init, sol.converged, sol.iterations);
    let t1 = sol.params[1] * t1_init;
    out.set("A", sol.params[0] * a_init, sol.sigmas[0].map(|s| s * a_init));
    out.set("T1", t1, sol.sigmas[1].map(|s| s * t1_init));
    if n < RECOMMENDED_SAMPLES {
        out.flag("few_samples");
    }
    if t1 > t[n - 1] - t[0] {
        out.flag("t1_exceeds_span");
    }
    Ok(out)
}
