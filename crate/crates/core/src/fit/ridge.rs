use rayon::prelude::*;

use super::{fit_lorentzian, BranchData, Polarity};
use crate::error::{Error, Result};
use crate::model::QubitModel;
use crate::synth::{SpectroMap, SpectroTrace};
use crate::units::{FluxBias, Frequency};

/// Fitted dip position per map column. Columns whose fit failed are left out.
#[derive(Debug, Clone, PartialEq)]
pub struct Ridge {
    pub points: Vec<(f64, f64)>,
    pub omitted: usize,
}

/// Fits a Lorentzian dip to every column of `map`.
///
/// Errors if more than half of the columns fail to fit or converge.
pub fn extract_dip_ridge(map: &SpectroMap) -> Result<Ridge> {
    let fits: Vec<Option<(f64, f64)>> = (0..map.x_axis.len())
        .into_par_iter()
        .map(|ix| {
            let r = fit_lorentzian(&map.column(ix), Polarity::Dip).ok()?;
            (r.converged && !r.has_flag("center_outside_span")).then(|| (map.x_axis[ix], r.get("fr").unwrap()))
        })
        .collect();
    let total = fits.len();
    let points: Vec<(f64, f64)> = fits.into_iter().flatten().collect();
    let omitted = total - points.len();
    if 2 * omitted > total {
        return Err(Error::RidgeFailure { failed: omitted, total });
    }
    Ok(Ridge { points, omitted })
}

/// A step in a ridge, located at the extremum of d(fr)/dx.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RidgeTransition {
    pub x: f64,
    /// Ridge change across the step (Hz).
    pub step: f64,
}

/// Finds steps in a ridge as runs of same-signed slope above 10% of the
/// steepest slope, keeping those whose plateau-to-plateau change is at
/// least `min_step` Hz.
pub fn find_ridge_transitions(ridge: &Ridge, min_step: f64) -> Vec<RidgeTransition> {
    let pts = &ridge.points;
    let n = pts.len();
    if n < 3 {
        return Vec::new();
    }
    let deriv: Vec<f64> = (1..n - 1)
        .map(|i| (pts[i + 1].1 - pts[i - 1].1) / (pts[i + 1].0 - pts[i - 1].0))
        .collect();
    let peak = deriv.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    if peak == 0.0 {
        return Vec::new();
    }
    let threshold = 0.1 * peak;

    // (first point, one past last point, steepest point) of each steep run
    let mut runs = Vec::new();
    let mut i = 0;
    while i < deriv.len() {
        if deriv[i].abs() <= threshold {
            i += 1;
            continue;
        }
        let sign = deriv[i].signum();
        let start = i;
        while i < deriv.len() && deriv[i].abs() > threshold && deriv[i].signum() == sign {
            i += 1;
        }
        // deriv[k] sits at point k + 1
        let steepest = (start..i)
            .max_by(|&a, &b| deriv[a].abs().total_cmp(&deriv[b].abs()))
            .unwrap();
        runs.push((start + 1, i + 1, steepest + 1));
    }

    // steps are measured between the plateau midpoints on either side
    let mut out = Vec::new();
    for (k, &(start, end, steepest)) in runs.iter().enumerate() {
        let before = if k == 0 { 0 } else { (runs[k - 1].1 + start) / 2 };
        let after = runs.get(k + 1).map_or(n - 1, |next| (end + next.0) / 2);
        let step = pts[after].1 - pts[before].1;
        if step.abs() >= min_step {
            out.push(RidgeTransition {
                x: pts[steepest].0,
                step,
            });
        }
    }
    out
}

fn local_minima(values: &[f64], min_depth_db: f64) -> Vec<usize> {
    (1..values.len() - 1)
        .filter(|&i| values[i] < values[i - 1] && values[i] <= values[i + 1] && values[i] <= -min_depth_db)
        .collect()
}

/// Splittings `(fq, f+ - f-)` from flux-map columns showing two dips.
///
/// In each column the two deepest local minima at least `min_separation`
/// apart are refined by Lorentzian fits on the half-way windows between
/// them. Dips shallower than 10% of the column's deepest are ignored.
pub fn extract_branch_splittings(map: &SpectroMap, q: &QubitModel, min_separation: Frequency) -> Result<BranchData> {
    let points: Vec<(Frequency, Frequency)> = (0..map.x_axis.len())
        .into_par_iter()
        .filter_map(|ix| {
            let col = &map.values[ix];
            let deepest = col.iter().copied().fold(f64::INFINITY, f64::min);
            if !(deepest < 0.0) {
                return None;
            }
            let mut minima = local_minima(col, 0.1 * -deepest);
            minima.sort_by(|&a, &b| col[a].total_cmp(&col[b]));
            let axis = &map.y_axis;
            let a = *minima.first()?;
            let b = *minima.iter().find(|&&j| (axis[j] - axis[a]).abs() >= min_separation.as_hz())?;
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let mid = 0.5 * (axis[lo] + axis[hi]);
            let window = |from: f64, to: f64| {
                let idx: Vec<usize> = (0..axis.len()).filter(|&k| axis[k] >= from && axis[k] <= to).collect();
                SpectroTrace::new(idx.iter().map(|&k| axis[k]).collect(), idx.iter().map(|&k| col[k]).collect()).ok()
            };
            let half = axis[hi] - mid;
            let f_lo = fit_lorentzian(&window(axis[lo] - half, mid)?, Polarity::Dip).ok()?;
            let f_hi = fit_lorentzian(&window(mid, axis[hi] + half)?, Polarity::Dip).ok()?;
            if !f_lo.converged || !f_hi.converged {
                return None;
            }
            let delta = f_hi.get("fr")? - f_lo.get("fr")?;
            let fq = q.frequency_at(FluxBias::new(map.x_axis[ix]));
            (delta > 0.0).then(|| (fq, Frequency::hz(delta)))
        })
        .collect();
    BranchData::new(points)
}
