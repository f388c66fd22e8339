use rayon::prelude::*;

use super::flux::{render_dips, Dip};
use super::{add_noise, check_axis, DriveConfig, MapAxis, SaturationModel, SpectroMap};
use crate::error::{Error, Result};
use crate::jc::{critical_photon_number, dispersive_shift};
use crate::model::DeviceModel;
use crate::units::{FluxBias, Frequency};

/// Readout power (dBm) at which each qubit saturates:
/// `power_ref_dbm + 10·log10(n_crit)`, in device qubit order.
pub fn power_onsets(dev: &DeviceModel, phi: FluxBias) -> Result<Vec<f64>> {
    let fb = dev.cavity.f_bare;
    dev.qubits
        .iter()
        .map(|q| {
            let n = critical_photon_number(q.g, q.frequency_at(phi), fb)?;
            if n == 0.0 {
                return Err(Error::Resonance {
                    label: q.label.clone(),
                });
            }
            Ok(dev.power_ref_dbm + 10.0 * n.log10())
        })
        .collect()
}

/// ln(81): a logistic rises from 10% to 90% over this many units.
const LOGISTIC_10_90: f64 = 4.394_449_154_672_439;

/// Saturation fraction at `power_dbm` for a crossover centred on `onset`
/// whose 10%-90% rise spans `width` dB.
fn saturation(power_dbm: f64, onset: f64, width: f64) -> f64 {
    1.0 / (1.0 + (-(power_dbm - onset) * LOGISTIC_10_90 / width).exp())
}

/// Cavity resonance and linewidth at readout power `power_dbm`.
///
/// Each qubit's pull is weighted by `1 - s_i`, where `s_i` is a logistic
/// crossover centred on the qubit's onset power. The linewidth is broadened by
/// `broadening_factor` while the last-saturating qubit is unsaturated.
pub fn power_response(
    dev: &DeviceModel,
    phi: FluxBias,
    power_dbm: f64,
    sat: &SaturationModel,
) -> Result<(Frequency, Frequency)> {
    let onsets = power_onsets(dev, phi)?;
    let fb = dev.cavity.f_bare;
    let mut fr = fb;
    for (q, onset) in dev.qubits.iter().zip(&onsets) {
        let chi = dispersive_shift(q.g, q.frequency_at(phi), fb)?;
        let s = saturation(power_dbm, *onset, sat.transition_width_db);
        fr = fr - chi * (1.0 - s);
    }
    let last = onsets.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let s_last = saturation(power_dbm, last, sat.transition_width_db);
    let kappa = dev.cavity.kappa * (1.0 + (sat.broadening_factor - 1.0) * (1.0 - s_last));
    Ok((fr, kappa))
}

/// |S21| versus readout power and frequency at a fixed flux.
pub fn power_map(
    dev: &DeviceModel,
    phi: FluxBias,
    power_grid_dbm: &[f64],
    f_grid: &[f64],
    sat: &SaturationModel,
    drive: &DriveConfig,
) -> Result<SpectroMap> {
    check_axis("power_dbm", power_grid_dbm)?;
    check_axis("freq_hz", f_grid)?;
    sat.validate()?;
    drive.validate()?;
    let floor = dev.cavity.s21_floor;
    let values = power_grid_dbm
        .par_iter()
        .enumerate()
        .map(|(ix, &p)| {
            let (fr, kappa) = power_response(dev, phi, p, sat)?;
            let dip = Dip { freq: fr, weight: 1.0 };
            let mut col = render_dips(&[dip], kappa.as_hz(), floor, f_grid);
            add_noise(&mut col, drive.noise_sigma_db, drive.seed, ix as u64);
            Ok(col)
        })
        .collect::<Result<Vec<_>>>()?;
    SpectroMap::new(MapAxis::Power, power_grid_dbm.to_vec(), f_grid.to_vec(), values)
}
