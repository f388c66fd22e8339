//! Circuit-QED modelling and parameter extraction for flux-tunable transmons
//! coupled to a single cavity mode.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod fit;
pub mod io;
pub mod jc;
pub mod model;
pub mod synth;
pub mod transmon;
pub mod units;

pub use error::{Error, Result};
pub use model::{CavityModel, DeviceModel, QubitKind, QubitModel};
pub use units::{FluxBias, Frequency};
