use std::f64::consts::{LN_2, PI};

use super::{FitResult, LinewidthSeries};
use crate::error::{Error, Result};
use crate::model::QubitModel;
use crate::units::{dbm_to_mw, FluxBias, Frequency};

/// Flux window (Φ0) around the sweet spot used for the flux-noise regression.
pub const DEFAULT_PHI_WINDOW: f64 = 0.05;

/// Lower bound on T2* (s) from a qubit linewidth: `1/(2π·HWHM) = 1/(π·FWHM)`.
pub fn t2_lower_bound_from_fwhm(fwhm: Frequency) -> Result<f64> {
    let w = fwhm.as_hz();
    if !(w > 0.0) || !w.is_finite() {
        return Err(Error::domain("t2_lower_bound_from_fwhm", format!("FWHM must be positive, got {w} Hz")));
    }
    Ok(1.0 / (PI * w))
}

/// Weighted linear regression of `(π·FWHM)²` against drive power in mW.
///
/// The intercept is `1/T2*²`; with `t1` the slope also yields the drive
/// coupling `n_s·ω_vac²` per mW as `slope·T2*/T1`. A negative intercept
/// leaves `t2_star` out and sets `t2_star_unbounded`; a falling series is
/// flagged `non_physical`. `residual_rms` is in s⁻².
pub fn fit_power_broadening(series: &LinewidthSeries, t1: Option<f64>) -> Result<FitResult> {
    const OP: &str = "fit_power_broadening";
    let n = series.len();
    if n < 3 {
        return Err(Error::TooFewPoints { op: OP, need: 3, got: n });
    }
    if let Some(t1) = t1 {
        if !(t1 > 0.0) {
            return Err(Error::domain(OP, format!("T1 must be positive, got {t1} s")));
        }
    }
    let x: Vec<f64> = series.points.iter().map(|(p, _)| dbm_to_mw(*p)).collect();
    let y: Vec<f64> = series.points.iter().map(|(_, w)| (PI * w.as_hz()).powi(2)).collect();
    let w: Vec<f64> = y.iter().map(|v| 1.0 / (v * v)).collect();

    let sw: f64 = w.iter().sum();
    let sx: f64 = w.iter().zip(&x).map(|(w, x)| w * x).sum();
    let sy: f64 = w.iter().zip(&y).map(|(w, y)| w * y).sum();
    let mx = sx / sw;
    let my = sy / sw;
    let sxx: f64 = w.iter().zip(&x).map(|(w, x)| w * (x - mx).powi(2)).sum();
    let sxy: f64 = w.iter().zip(x.iter().zip(&y)).map(|(w, (x, y))| w * (x - mx) * (y - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::degenerate(OP, "all drive powers are equal"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;

    let resid: Vec<f64> = x.iter().zip(&y).map(|(x, y)| y - (intercept + slope * x)).collect();
    let chi2: f64 = w.iter().zip(&resid).map(|(w, r)| w * r * r).sum();
    let s2 = chi2 / (n - 2) as f64;
    let var_slope = s2 / sxx;
    let var_intercept = s2 * (1.0 / sw + mx * mx / sxx);
    let rms = (resid.iter().map(|r| r * r).sum::<f64>() / n as f64).sqrt();

    let mut out = FitResult::new(rms, true, 0);
    out.set("slope", slope, Some(var_slope.sqrt()));
    out.set("intercept", intercept, Some(var_intercept.sqrt()));
    let x_range = x.iter().copied().fold(f64::NEG_INFINITY, f64::max) - x.iter().copied().fold(f64::INFINITY, f64::min);
    if slope * x_range < -1e-9 * intercept.abs() {
        out.flag("non_physical");
    }
    if intercept > 0.0 {
        let t2 = 1.0 / intercept.sqrt();
        out.set("t2_star", t2, Some(0.5 * t2 * var_intercept.sqrt() / intercept));
        if let Some(t1) = t1 {
            out.set("drive_coupling", slope * t2 / t1, None);
        }
    } else {
        out.flag("t2_star_unbounded");
    }
    Ok(out)
}

/// Regression through the origin of FWHM against `|dfq/dphi|·sqrt(ln 2)`
/// for points with `0 < |phi| ≤ phi_window`; the slope is A in Φ0.
pub fn fit_flux_noise_amplitude(series: &LinewidthSeries, q: &QubitModel, phi_window: f64) -> Result<FitResult> {
    const OP: &str = "fit_flux_noise_amplitude";
    if !(phi_window > 0.0) {
        return Err(Error::domain(OP, format!("window must be positive, got {phi_window}")));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &(phi, fwhm) in &series.points {
        if phi.abs() > phi_window {
            continue;
        }
        let x = q.slope_at(FluxBias::new(phi))?.abs() * LN_2.sqrt();
        if x > 0.0 {
            xs.push(x);
            ys.push(fwhm.as_hz());
        }
    }
    let n = xs.len();
    if n < 3 {
        return Err(Error::TooFewPoints { op: OP, need: 3, got: n });
    }
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let a = sxy / sxx;
    let ssr: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - a * x).powi(2)).sum();
    let sigma = (ssr / (n - 1) as f64 / sxx).sqrt();
    let mut out = FitResult::new((ssr / n as f64).sqrt(), true, 0);
    out.set("A", a, Some(sigma));
    Ok(out)
}
