use rayon::prelude::*;

use super::{add_noise, check_axis, lorentzian_magnitude, DriveConfig, MapAxis, SpectroMap};
use crate::error::{Error, Result};
use crate::jc::{dispersive_shift, hybridized_frequencies};
use crate::model::DeviceModel;
use crate::units::{magnitude_to_db, FluxBias, Frequency};

/// Within `HYBRID_WINDOW · g` of the bare cavity a qubit is rendered as two
/// hybridized branches instead of a dispersive pull.
pub const HYBRID_WINDOW: f64 = 5.0;

/// Low-power cavity resonance `f_bare - Σ chi_i` over the unsaturated qubits.
pub fn dressed_cavity_frequency(dev: &DeviceModel, phi: FluxBias, saturated: &[bool]) -> Result<Frequency> {
    if saturated.len() != dev.qubits.len() {
        return Err(Error::domain(
            "dressed_cavity_frequency",
            format!("{} saturation flags for {} qubits", saturated.len(), dev.qubits.len()),
        ));
    }
    let fb = dev.cavity.f_bare;
    let mut fr = fb;
    for (q, &sat) in dev.qubits.iter().zip(saturated) {
        if sat {
            continue;
        }
        let chi = dispersive_shift(q.g, q.frequency_at(phi), fb).map_err(|_| Error::Resonance {
            label: q.label.clone(),
        })?;
        fr = fr - chi;
    }
    Ok(fr)
}

/// One rendered cavity dip.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dip {
    pub freq: Frequency,
    /// Cavity participation in [0, 1]; scales the dip depth.
    pub weight: f64,
}

/// Dips visible at low readout power and flux `phi`.
///
/// Far from resonance this is one full-depth dip at the dressed frequency.
/// When the qubit nearest to resonance is within [`HYBRID_WINDOW`]·g of
/// `f_bare`, both hybridized branches are returned, each weighted by its
/// cavity fraction. Other qubits still pull the cavity dispersively.
pub fn cavity_dips(dev: &DeviceModel, phi: FluxBias) -> Result<Vec<Dip>> {
    let fb = dev.cavity.f_bare;
    let near = dev
        .qubits
        .iter()
        .enumerate()
        .map(|(i, q)| (i, (q.frequency_at(phi) - fb).as_hz().abs() / q.g.as_hz()))
        .filter(|&(_, r)| r <= HYBRID_WINDOW)
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i);

    let Some(i) = near else {
        let all_unsaturated = vec![false; dev.qubits.len()];
        return Ok(vec![Dip {
            freq: dressed_cavity_frequency(dev, phi, &all_unsaturated)?,
            weight: 1.0,
        }]);
    };

    let mut cavity = fb;
    for (j, q) in dev.qubits.iter().enumerate() {
        if j != i {
            let chi = dispersive_shift(q.g, q.frequency_at(phi), fb).map_err(|_| Error::Resonance {
                label: q.label.clone(),
            })?;
            cavity = cavity - chi;
        }
    }
    let q = &dev.qubits[i];
    let fq = q.frequency_at(phi);
    let pair = hybridized_frequencies(fq, cavity, q.g);
    let detuning = (fq - cavity).as_hz();
    let cos_mix = detuning / pair.splitting().as_hz();
    // f_minus is cavity-like when the qubit sits above the cavity
    let w_minus = 0.5 * (1.0 + cos_mix);
    Ok(vec![
        Dip {
            freq: pair.f_minus,
            weight: w_minus,
        },
        Dip {
            freq: pair.f_plus,
            weight: 1.0 - w_minus,
        },
    ])
}

pub(crate) fn render_dips(dips: &[Dip], kappa: f64, floor: f64, f_grid: &[f64]) -> Vec<f64> {
    let depth = 1.0 - floor;
    f_grid
        .iter()
        .map(|&f| {
            let m: f64 = dips
                .iter()
                .map(|d| lorentzian_magnitude(f, d.freq.as_hz(), kappa, depth * d.weight))
                .product();
            magnitude_to_db(m)
        })
        .collect()
}

/// Low-power |S21| versus flux and frequency.
pub fn flux_map(dev: &DeviceModel, phi_grid: &[f64], f_grid: &[f64], drive: &DriveConfig) -> Result<SpectroMap> {
    check_axis("phi", phi_grid)?;
    check_axis("freq_hz", f_grid)?;
    drive.validate()?;
    let kappa = dev.cavity.kappa.as_hz();
    let floor = dev.cavity.s21_floor;
    let values = phi_grid
        .par_iter()
        .enumerate()
        .map(|(ix, &phi)| {
            let dips = cavity_dips(dev, FluxBias::new(phi))?;
            let mut col = render_dips(&dips, kappa, floor, f_grid);
            add_noise(&mut col, drive.noise_sigma_db, drive.seed, ix as u64);
            Ok(col)
        })
        .collect::<Result<Vec<_>>>()?;
    SpectroMap::new(MapAxis::Flux, phi_grid.to_vec(), f_grid.to_vec(), values)
}
