use std::f64::consts::LN_10;

use nalgebra::DMatrix;

use super::lm::{self, Problem};
use super::FitResult;
use crate::error::{Error, Result};
use crate::synth::SpectroTrace;
use crate::units::db_to_magnitude;

const OP: &str = "fit_lorentzian";
const MIN_SAMPLES: usize = 8;
/// dB per natural-log unit of linear magnitude.
const DB_PER_NEPER: f64 = 20.0 / LN_10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    Dip,
    Peak,
}

/// dB-domain Lorentzian on a 0 dB baseline.
/// Params: `u = (fc - f0)/s`, `k = fwhm/s`, `d` = linear depth (negative for a peak).
struct LineProblem<'a> {
    x: Vec<f64>,
    y: &'a [f64],
}

impl LineProblem<'_> {
    fn parts(x: f64, p: &[f64]) -> (f64, f64, f64) {
        let dx = x - p[0];
        let h = 0.25 * p[1] * p[1];
        let den = dx * dx + h;
        (dx, h, den)
    }
}

impl Problem for LineProblem<'_> {
    fn n_residuals(&self) -> usize {
        self.x.len()
    }

    fn n_params(&self) -> usize {
        3
    }

    fn residuals(&self, p: &[f64], out: &mut [f64]) {
        for (i, (&x, &y)) in self.x.iter().zip(self.y).enumerate() {
            let (_, h, den) = Self::parts(x, p);
            let m = 1.0 - p[2] * h / den;
            out[i] = if m > 0.0 { DB_PER_NEPER * m.ln() - y } else { f64::NAN };
        }
    }

    fn jacobian(&self, p: &[f64], jac: &mut DMatrix<f64>) {
        for (i, &x) in self.x.iter().enumerate() {
            let (dx, h, den) = Self::parts(x, p);
            let l = h / den;
            let m = 1.0 - p[2] * l;
            let c = DB_PER_NEPER / m;
            let den2 = den * den;
            jac[(i, 0)] = -c * p[2] * h * 2.0 * dx / den2;
            jac[(i, 1)] = -c * p[2] * 0.5 * p[1] * dx * dx / den2;
            jac[(i, 2)] = -c * l;
        }
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Frequency where `excess` falls to 1/2 walking away from `i0` in direction `step`.
fn half_crossing(axis: &[f64], excess: &[f64], i0: usize, forward: bool) -> Option<f64> {
    let mut i = i0;
    loop {
        let j = if forward {
            (i + 1 < axis.len()).then_some(i + 1)?
        } else {
            i.checked_sub(1)?
        };
        if excess[j] <= 0.5 {
            let t = (excess[i] - 0.5) / (excess[i] - excess[j]);
            return Some(axis[i] + t * (axis[j] - axis[i]));
        }
        i = j;
    }
}

/// Fits a single Lorentzian dip (cavity) or peak (qubit) in a dB trace.
///
/// Dips report `fr`, `kappa` and the linear `floor`; peaks report `f0`,
/// `fwhm` and the linear `height`. The baseline is fixed at 0 dB.
pub fn fit_lorentzian(trace: &SpectroTrace, polarity: Polarity) -> Result<FitResult> {
    let n = trace.len();
    if n < MIN_SAMPLES {
        return Err(Error::TooFewPoints {
            op: OP,
            need: MIN_SAMPLES,
            got: n,
        });
    }
    let axis = &trace.axis;
    let y = &trace.values;

    let i0 = match polarity {
        Polarity::Dip => (0..n).min_by(|&a, &b| y[a].total_cmp(&y[b])),
        Polarity::Peak => (0..n).max_by(|&a, &b| y[a].total_cmp(&y[b])),
    }
    .expect("trace is non-empty");

    let diffs: Vec<f64> = y.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let noise = median(diffs) / (std::f64::consts::SQRT_2 * 0.674_489_75);
    let prominence = (y[i0] - median(y.clone())).abs();
    if prominence <= (5.0 * noise).max(1e-9) {
        return Err(Error::degenerate(OP, "trace is flat; no resolvable line"));
    }

    let d0 = 1.0 - db_to_magnitude(y[i0]);
    let wrong_side = match polarity {
        Polarity::Dip => d0 <= 0.0,
        Polarity::Peak => d0 >= 0.0,
    };
    if wrong_side {
        return Err(Error::degenerate(OP, "extremum lies on the wrong side of the 0 dB baseline"));
    }
    let excess: Vec<f64> = y.iter().map(|&v| (1.0 - db_to_magnitude(v)) / d0).collect();
    let left = half_crossing(axis, &excess, i0, false);
    let right = half_crossing(axis, &excess, i0, true);
    let spacing = if i0 + 1 < n {
        axis[i0 + 1] - axis[i0]
    } else {
        axis[i0] - axis[i0 - 1]
    };
    let width0 = match (left, right) {
        (Some(l), Some(r)) => r - l,
        (Some(l), None) => 2.0 * (axis[i0] - l),
        (None, Some(r)) => 2.0 * (r - axis[i0]),
        (None, None) => {
            return Err(Error::degenerate(OP, "trace does not reach the half-depth level on either side"));
        }
    }
    .max(spacing);

    let span = axis[n - 1] - axis[0];
    if span < 2.0 * width0 {
        return Err(Error::degenerate(
            OP,
            format!("span {span:.6e} Hz is narrower than two linewidths ({width0:.6e} Hz each)"),
        ));
    }

    let f0 = axis[i0];
    let problem = LineProblem {
        x: axis.iter().map(|f| (f - f0) / width0).collect(),
        y,
    };
    let sol = lm::solve(&problem, &[0.0, 1.0, d0]).ok_or_else(|| Error::degenerate(OP, "initial guess is not finite"))?;

    let p = &sol.params;
    let mut out = FitResult::new(sol.rms(n), sol.converged, sol.iterations);
    let center = f0 + p[0] * width0;
    let (c_name, w_name, a_name) = match polarity {
        Polarity::Dip => ("fr", "kappa", "floor"),
        Polarity::Peak => ("f0", "fwhm", "height"),
    };
    out.set(c_name, center, sol.sigmas[0].map(|s| s * width0));
    out.set(w_name, p[1].abs() * width0, sol.sigmas[1].map(|s| s * width0));
    out.set(a_name, 1.0 - p[2], sol.sigmas[2]);
    if center < axis[0] || center > axis[n - 1] {
        out.flag("center_outside_span");
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{lorentzian_peak_db, lorentzian_s21};

    fn dip_trace(fr: f64, kappa: f64, floor: f64, n: usize, half_span: f64) -> SpectroTrace {
        let axis: Vec<f64> = (0..n)
            .map(|i| fr - half_span + 2.0 * half_span * i as f64 / (n - 1) as f64 + 0.37e6)
            .collect();
        let values = axis.iter().map(|&f| lorentzian_s21(f, fr, kappa, floor)).collect();
        SpectroTrace::new(axis, values).unwrap()
    }

    #[test]
    fn noiseless_dip_is_recovered() {
        let (fr, kappa) = (6.02937e9, 2.6e6);
        let tr = dip_trace(fr, kappa, 0.1, 201, 10e6);
        let r = fit_lorentzian(&tr, Polarity::Dip).unwrap();
        assert!(r.converged);
        assert!((r.get("fr").unwrap() / fr - 1.0).abs() < 1e-6);
        assert!((r.get("kappa").unwrap() / kappa - 1.0).abs() < 1e-6);
        assert!((r.get("floor").unwrap() - 0.1).abs() < 1e-6);
    }

    #[test]
    fn noiseless_peak_is_recovered() {
        let (f0, w) = (8.068e9, 18.05e6);
        let axis: Vec<f64> = (0..300).map(|i| 7.95e9 + i as f64 * 0.8e6).collect();
        let values = axis.iter().map(|&f| lorentzian_peak_db(f, f0, w, 1.4)).collect();
        let tr = SpectroTrace::new(axis, values).unwrap();
        let r = fit_lorentzian(&tr, Polarity::Peak).unwrap();
        assert!(r.converged);
        assert!((r.get("f0").unwrap() / f0 - 1.0).abs() < 1e-9);
        assert!((r.get("fwhm").unwrap() / w - 1.0).abs() < 1e-6);
        assert!((r.get("height").unwrap() - 1.4).abs() < 1e-6);
        assert!(fit_lorentzian(&tr, Polarity::Dip).is_err());
    }

    #[test]
    fn flat_trace_is_degenerate() {
        let axis: Vec<f64> = (0..50).map(|i| 6e9 + i as f64 * 1e5).collect();
        let tr = SpectroTrace::new(axis, vec![-0.5; 50]).unwrap();
        assert!(matches!(fit_lorentzian(&tr, Polarity::Dip), Err(Error::Degenerate { .. })));
    }

    #[test]
    fn too_few_or_too_narrow() {
        let tr = dip_trace(6e9, 2.6e6, 0.1, 7, 10e6);
        assert!(matches!(fit_lorentzian(&tr, Polarity::Dip), Err(Error::TooFewPoints { .. })));
        let narrow = dip_trace(6e9, 2.6e6, 0.1, 40, 1.0e6);
        assert!(fit_lorentzian(&narrow, Polarity::Dip).is_err());
    }
}
