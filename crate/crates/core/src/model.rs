//! Device description: a cavity mode plus one or two transmons.
//!
//! The JSON form mirrors the struct fields (frequencies in Hz, flux in Φ0)
//! and carries the schema tag `cqedlab-device-v1`.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::transmon;
use crate::units::{FluxBias, Frequency};

pub const DEVICE_SCHEMA: &str = "cqedlab-device-v1";

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QubitKind {
    /// Symmetric-SQUID transmon, tunable with flux.
    Squid { fq_max: Frequency },
    /// Single-junction transmon.
    Fixed { fq: Frequency },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "QubitRecord", into = "QubitRecord")]
pub struct QubitModel {
    pub label: String,
    pub kind: QubitKind,
    /// Qubit-cavity coupling g/2π.
    pub g: Frequency,
    /// Relaxation time T1 in seconds.
    pub t1: Option<f64>,
    /// Dephasing time T2* in seconds.
    pub t2_star: Option<f64>,
    pub ej_over_h: Option<Frequency>,
    pub ec_over_h: Option<Frequency>,
    /// Junction width in µm.
    pub junction_width: Option<f64>,
}

#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum KindTag {
    Squid,
    Fixed,
}

/// Flat JSON form of [`QubitModel`].
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QubitRecord {
    label: String,
    kind: KindTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    fq_max: Option<Frequency>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    fq: Option<Frequency>,
    g: Frequency,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    t1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    t2_star: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ej_over_h: Option<Frequency>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ec_over_h: Option<Frequency>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    junction_width: Option<f64>,
}

impl TryFrom<QubitRecord> for QubitModel {
    type Error = String;

    fn try_from(r: QubitRecord) -> std::result::Result<Self, String> {
        let kind = match (r.kind, r.fq_max, r.fq) {
            (KindTag::Squid, Some(fq_max), None) => QubitKind::Squid { fq_max },
            (KindTag::Fixed, None, Some(fq)) => QubitKind::Fixed { fq },
            (KindTag::Squid, _, _) => return Err("a squid qubit needs `fq_max` and no `fq`".into()),
            (KindTag::Fixed, _, _) => return Err("a fixed qubit needs `fq` and no `fq_max`".into()),
        };
        Ok(QubitModel {
            label: r.label,
            kind,
            g: r.g,
            t1: r.t1,
            t2_star: r.t2_star,
            ej_over_h: r.ej_over_h,
            ec_over_h: r.ec_over_h,
            junction_width: r.junction_width,
        })
    }
}

impl From<QubitModel> for QubitRecord {
    fn from(q: QubitModel) -> Self {
        let (kind, fq_max, fq) = match q.kind {
            QubitKind::Squid { fq_max } => (KindTag::Squid, Some(fq_max), None),
            QubitKind::Fixed { fq } => (KindTag::Fixed, None, Some(fq)),
        };
        QubitRecord {
            label: q.label,
            kind,
            fq_max,
            fq,
            g: q.g,
            t1: q.t1,
            t2_star: q.t2_star,
            ej_over_h: q.ej_over_h,
            ec_over_h: q.ec_over_h,
            junction_width: q.junction_width,
        }
    }
}

impl QubitModel {
    pub fn squid(label: impl Into<String>, fq_max: Frequency, g: Frequency) -> Self {
        Self::with_kind(label, QubitKind::Squid { fq_max }, g)
    }

    pub fn fixed(label: impl Into<String>, fq: Frequency, g: Frequency) -> Self {
        Self::with_kind(label, QubitKind::Fixed { fq }, g)
    }

    fn with_kind(label: impl Into<String>, kind: QubitKind, g: Frequency) -> Self {
        QubitModel {
            label: label.into(),
            kind,
            g,
            t1: None,
            t2_star: None,
            ej_over_h: None,
            ec_over_h: None,
            junction_width: None,
        }
    }

    pub fn with_coherence(mut self, t1: f64, t2_star: f64) -> Self {
        self.t1 = Some(t1);
        self.t2_star = Some(t2_star);
        self
    }

    /// Sweet-spot frequency for a SQUID, the fixed frequency otherwise.
    pub fn max_frequency(&self) -> Frequency {
        match self.kind {
            QubitKind::Squid { fq_max } => fq_max,
            QubitKind::Fixed { fq } => fq,
        }
    }

    pub fn frequency_at(&self, phi: FluxBias) -> Frequency {
        match self.kind {
            QubitKind::Squid { fq_max } => transmon::squid_frequency(fq_max, phi),
            QubitKind::Fixed { fq } => fq,
        }
    }

    /// dfq/dphi in Hz per Φ0; identically zero for a fixed qubit.
    pub fn slope_at(&self, phi: FluxBias) -> Result<f64> {
        match self.kind {
            QubitKind::Squid { fq_max } => transmon::squid_slope(fq_max, phi),
            QubitKind::Fixed { .. } => Ok(0.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidModel(format!("qubit '{}': {msg}", self.label)));
        if !(self.g.as_hz() > 0.0) || !self.g.is_finite() {
            return bad(format!("coupling g must be positive, got {} Hz", self.g.as_hz()));
        }
        let f = self.max_frequency();
        if !(f.as_hz() > 0.0) || !f.is_finite() {
            return bad(format!("qubit frequency must be positive, got {} Hz", f.as_hz()));
        }
        for (name, v) in [("t1", self.t1), ("t2_star", self.t2_star)] {
            if let Some(t) = v {
                if !(t > 0.0) || !t.is_finite() {
                    return bad(format!("{name} must be positive, got {t} s"));
                }
            }
        }
        if let (Some(t1), Some(t2)) = (self.t1, self.t2_star) {
            if t2 > 2.0 * t1 {
                return bad(format!("t2_star ({t2} s) exceeds 2·t1 ({t1} s)"));
            }
        }
        Ok(())
    }
}

/// Single cavity mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavityModel {
    pub f_bare: Frequency,
    /// Total linewidth κ/2π.
    pub kappa: Frequency,
    /// Linear |S21| at the bottom of the dip, in (0, 1].
    pub s21_floor: f64,
}

impl CavityModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.f_bare.as_hz() > 0.0) || !self.f_bare.is_finite() {
            return Err(Error::InvalidModel(format!(
                "cavity f_bare must be positive, got {} Hz",
                self.f_bare.as_hz()
            )));
        }
        if !(self.kappa.as_hz() > 0.0) || !self.kappa.is_finite() {
            return Err(Error::InvalidModel(format!(
                "cavity kappa must be positive, got {} Hz",
                self.kappa.as_hz()
            )));
        }
        if !(self.s21_floor > 0.0 && self.s21_floor <= 1.0) {
            return Err(Error::InvalidModel(format!(
                "cavity s21_floor must lie in (0, 1], got {}",
                self.s21_floor
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeviceModel {
    pub cavity: CavityModel,
    pub qubits: Vec<QubitModel>,
    /// Readout power (dBm) at which the mean intracavity photon number is 1.
    pub power_ref_dbm: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DeviceDocument {
    schema: String,
    cavity: CavityModel,
    qubits: Vec<QubitModel>,
    power_ref_dbm: f64,
}

impl DeviceDocument {
    fn wrap(dev: &DeviceModel) -> Self {
        DeviceDocument {
            schema: DEVICE_SCHEMA.to_string(),
            cavity: dev.cavity,
            qubits: dev.qubits.clone(),
            power_ref_dbm: dev.power_ref_dbm,
        }
    }

    fn into_device(self) -> DeviceModel {
        DeviceModel {
            cavity: self.cavity,
            qubits: self.qubits,
            power_ref_dbm: self.power_ref_dbm,
        }
    }
}

impl DeviceModel {
    pub fn new(cavity: CavityModel, qubits: Vec<QubitModel>, power_ref_dbm: f64) -> Result<Self> {
        let dev = DeviceModel {
            cavity,
            qubits,
            power_ref_dbm,
        };
        dev.validate()?;
        Ok(dev)
    }

    pub fn validate(&self) -> Result<()> {
        self.cavity.validate()?;
        if self.qubits.is_empty() || self.qubits.len() > 2 {
            return Err(Error::InvalidModel(format!(
                "a device holds 1 or 2 qubits, got {}",
                self.qubits.len()
            )));
        }
        let mut seen = HashSet::new();
        for q in &self.qubits {
            q.validate()?;
            if !seen.insert(q.label.as_str()) {
                return Err(Error::InvalidModel(format!("duplicate qubit label '{}'", q.label)));
            }
        }
        if !self.power_ref_dbm.is_finite() {
            return Err(Error::InvalidModel("power_ref_dbm must be finite".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&DeviceDocument::wrap(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let doc: DeviceDocument = serde_path_to_error::deserialize(de).map_err(|e| Error::Config {
            path: e.path().to_string(),
            msg: e.inner().to_string(),
        })?;
        if doc.schema != DEVICE_SCHEMA {
            return Err(Error::Schema {
                expected: DEVICE_SCHEMA.into(),
                found: doc.schema,
            });
        }
        let dev = doc.into_device();
        dev.validate()?;
        Ok(dev)
    }
}

/// Serde adapter used when a device is embedded in a larger document.
pub(crate) mod embedded {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(dev: &DeviceModel, s: S) -> std::result::Result<S::Ok, S::Error> {
        DeviceDocument::wrap(dev).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<DeviceModel, D::Error> {
        let doc = DeviceDocument::deserialize(d)?;
        if doc.schema != DEVICE_SCHEMA {
            return Err(serde::de::Error::custom(format!(
                "expected schema '{DEVICE_SCHEMA}', found '{}'",
                doc.schema
            )));
        }
        Ok(doc.into_device())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn device() -> DeviceModel {
        DeviceModel::new(
            CavityModel {
                f_bare: Frequency::ghz(6.0558),
                kappa: Frequency::mhz(2.6),
                s21_floor: 0.1,
            },
            vec![QubitModel::squid("q1", Frequency::ghz(6.438), Frequency::mhz(100.5))
                .with_coherence(48e-9, 17.63e-9)],
            -40.0,
        )
        .unwrap()
    }

    #[test]
    fn json_round_trip_keeps_fields() {
        let dev = device();
        let text = dev.to_json().unwrap();
        assert!(text.contains("\"schema\": \"cqedlab-device-v1\""));
        assert!(text.contains("\"kind\": \"squid\""));
        assert!(text.contains("\"fq_max\": 6438000000.0"));
        let back = DeviceModel::from_json(&text).unwrap();
        assert_eq!(back, dev);
    }

    #[test]
    fn wrong_schema_rejected() {
        let text = device().to_json().unwrap().replace("cqedlab-device-v1", "cqedlab-device-v0");
        assert!(matches!(DeviceModel::from_json(&text), Err(Error::Schema { .. })));
    }

    #[test]
    fn bad_field_reports_path() {
        let text = device().to_json().unwrap().replace("\"kappa\": 2600000.0", "\"kappa\": \"wide\"");
        match DeviceModel::from_json(&text) {
            Err(Error::Config { path, .. }) => assert_eq!(path, "cavity.kappa"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn invariants_enforced() {
        let mut dev = device();
        dev.qubits[0].t2_star = Some(200e-9);
        assert!(dev.validate().is_err());

        let mut dev = device();
        dev.qubits.push(dev.qubits[0].clone());
        assert!(dev.validate().is_err(), "duplicate label");

        let mut dev = device();
        dev.qubits.clear();
        assert!(dev.validate().is_err());

        let mut dev = device();
        dev.cavity.s21_floor = 0.0;
        assert!(dev.validate().is_err());

        let mut dev = device();
        dev.qubits[0].g = Frequency::ZERO;
        assert!(dev.validate().is_err());
    }

    #[test]
    fn fixed_qubit_ignores_flux() {
        let q = QubitModel::fixed("q2", Frequency::ghz(8.82), Frequency::mhz(78.9));
        assert_eq!(q.frequency_at(FluxBias::new(0.3)), Frequency::ghz(8.82));
        assert_eq!(q.slope_at(FluxBias::new(0.3)).unwrap(), 0.0);
    }
}
