//! `cqedlab-sim-v1` simulation configs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{embedded, DeviceModel};
use crate::synth::{DriveConfig, SaturationModel, TwoToneConfig};

pub const SIM_SCHEMA: &str = "cqedlab-sim-v1";

/// A sampling grid: either `{start, stop, count}` (inclusive, evenly spaced)
/// or an explicit list of values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Range { start: f64, stop: f64, count: usize },
    Values(Vec<f64>),
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        match self {
            GridSpec::Values(v) => v.clone(),
            GridSpec::Range { count: 0, .. } => Vec::new(),
            GridSpec::Range { start, count: 1, .. } => vec![*start],
            GridSpec::Range { start, stop, count } => {
                let step = (stop - start) / (*count - 1) as f64;
                (0..*count).map(|i| start + step * i as f64).collect()
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grids {
    /// Flux bias (Φ0) for flux maps and two-tone maps.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<GridSpec>,
    /// Readout frequency (Hz) for flux and power maps.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub freq_hz: Option<GridSpec>,
    /// Readout power (dBm) for power maps.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power_dbm: Option<GridSpec>,
    /// Drive frequency (Hz) for two-tone maps.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drive_freq_hz: Option<GridSpec>,
    /// Delays (s) for relaxation traces.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delay_s: Option<GridSpec>,
}

impl Grids {
    /// Values of a required grid, or a config error naming it.
    pub fn require(&self, name: &str) -> Result<Vec<f64>> {
        let spec = match name {
            "phi" => &self.phi,
            "freq_hz" => &self.freq_hz,
            "power_dbm" => &self.power_dbm,
            "drive_freq_hz" => &self.drive_freq_hz,
            "delay_s" => &self.delay_s,
            _ => &None,
        };
        let path = format!("grids.{name}");
        let values = spec
            .as_ref()
            .ok_or_else(|| Error::Config {
                path: path.clone(),
                msg: "required for this simulation".into(),
            })?
            .values();
        if values.is_empty() {
            return Err(Error::Config {
                path,
                msg: "grid is empty".into(),
            });
        }
        Ok(values)
    }
}

/// Relaxation-trace generator settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct T1TraceConfig {
    pub t1_s: f64,
    #[serde(default = "unit")]
    pub amplitude: f64,
    /// Absolute noise standard deviation on the amplitude.
    #[serde(default)]
    pub noise_sigma: f64,
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub schema: String,
    #[serde(with = "embedded")]
    pub device: DeviceModel,
    #[serde(default)]
    pub grids: Grids,
    #[serde(default)]
    pub drive: DriveConfig,
    #[serde(default)]
    pub saturation: SaturationModel,
    #[serde(default)]
    pub two_tone: TwoToneConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t1_trace: Option<T1TraceConfig>,
    /// Flux bias (Φ0) at which power maps are taken.
    #[serde(default)]
    pub phi: f64,
}

impl SimConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: SimConfig = serde_path_to_error::deserialize(de).map_err(|e| Error::Config {
            path: e.path().to_string(),
            msg: e.inner().to_string(),
        })?;
        if cfg.schema != SIM_SCHEMA {
            return Err(Error::Schema {
                expected: SIM_SCHEMA.into(),
                found: cfg.schema,
            });
        }
        cfg.device.validate().map_err(|e| Error::Config {
            path: "device".into(),
            msg: e.to_string(),
        })?;
        cfg.drive.validate()?;
        cfg.saturation.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Replaces the noise seed, e.g. from the `CQEDLAB_SEED` environment variable.
    pub fn override_seed(&mut self, seed: u64) {
        self.drive.seed = seed;
    }
}
