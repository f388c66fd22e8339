use std::f64::consts::{LN_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{add_noise, check_axis, lorentzian_peak_db, DriveConfig, MapAxis, SpectroMap};
use crate::error::{Error, Result};
use crate::model::{DeviceModel, QubitModel};
use crate::units::{db_to_magnitude, dbm_to_mw, FluxBias, Frequency};

/// Settings specific to two-tone qubit spectroscopy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoToneConfig {
    /// Index of the probed qubit in the device.
    #[serde(default)]
    pub qubit: usize,
    /// Power-broadening coefficient: `n_s·ω_vac² = beta · P_drive[mW]`, in s⁻²/mW.
    #[serde(default)]
    pub beta: f64,
    /// Flux-noise amplitude A in Φ0; zero disables flux broadening.
    #[serde(default)]
    pub flux_noise_amplitude: f64,
    /// Peak height above the 0 dB baseline.
    #[serde(default = "default_peak_height")]
    pub peak_height_db: f64,
}

fn default_peak_height() -> f64 {
    3.0
}

impl Default for TwoToneConfig {
    fn default() -> Self {
        TwoToneConfig {
            qubit: 0,
            beta: 0.0,
            flux_noise_amplitude: 0.0,
            peak_height_db: default_peak_height(),
        }
    }
}

/// Full width of the qubit line at flux `phi`.
///
/// Intrinsic part: `HWHM = (1/2π)·sqrt(1/T2*² + beta·P·T1/T2*)`.
/// With `A > 0` a flux-noise width `|dfq/dphi|·A·sqrt(ln 2)` is added in quadrature.
pub fn two_tone_fwhm(q: &QubitModel, phi: FluxBias, drive_power_dbm: Option<f64>, cfg: &TwoToneConfig) -> Result<Frequency> {
    let t1 = q.t1.ok_or_else(|| Error::MissingCoherence {
        label: q.label.clone(),
        field: "t1",
    })?;
    let t2 = q.t2_star.ok_or_else(|| Error::MissingCoherence {
        label: q.label.clone(),
        field: "t2_star",
    })?;
    let p_mw = drive_power_dbm.map_or(0.0, dbm_to_mw);
    let rate_sq = 1.0 / (t2 * t2) + cfg.beta * p_mw * t1 / t2;
    let intrinsic = 2.0 * rate_sq.sqrt() / (2.0 * PI);
    if cfg.flux_noise_amplitude > 0.0 {
        let flux = q.slope_at(phi)?.abs() * cfg.flux_noise_amplitude * LN_2.sqrt();
        Ok(Frequency::hz(intrinsic.hypot(flux)))
    } else {
        Ok(Frequency::hz(intrinsic))
    }
}

/// Qubit spectroscopy map: readout response versus flux and drive frequency.
pub fn two_tone_map(
    dev: &DeviceModel,
    phi_grid: &[f64],
    drive_f_grid: &[f64],
    drive: &DriveConfig,
    cfg: &TwoToneConfig,
) -> Result<SpectroMap> {
    check_axis("phi", phi_grid)?;
    check_axis("drive_freq_hz", drive_f_grid)?;
    drive.validate()?;
    let q = dev.qubits.get(cfg.qubit).ok_or_else(|| Error::Config {
        path: "two_tone.qubit".into(),
        msg: format!("device has {} qubits", dev.qubits.len()),
    })?;
    if let Some(bad) = phi_grid
        .iter()
        .find(|&&p| q.frequency_at(FluxBias::new(p)).as_hz() <= 0.0)
    {
        return Err(Error::Grid {
            axis: "phi".into(),
            msg: format!("qubit frequency vanishes at phi = {bad}"),
        });
    }
    let height = db_to_magnitude(cfg.peak_height_db);
    let values = phi_grid
        .par_iter()
        .enumerate()
        .map(|(ix, &phi)| {
            let phi = FluxBias::new(phi);
            let center = q.frequency_at(phi).as_hz();
            let fwhm = two_tone_fwhm(q, phi, drive.drive_power_dbm, cfg)?.as_hz();
            let mut col: Vec<f64> = drive_f_grid
                .iter()
                .map(|&f| lorentzian_peak_db(f, center, fwhm, height))
                .collect();
            add_noise(&mut col, drive.noise_sigma_db, drive.seed, ix as u64);
            Ok(col)
        })
        .collect::<Result<Vec<_>>>()?;
    SpectroMap::new(MapAxis::Flux, phi_grid.to_vec(), drive_f_grid.to_vec(), values)
}
