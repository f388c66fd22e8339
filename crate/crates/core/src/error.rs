use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("{op}: {msg}")]
    Domain { op: &'static str, msg: String },

    /// Qubit and cavity are degenerate, so the dispersive formula does not apply.
    #[error("{op}: qubit frequency equals the bare cavity frequency; dispersive approximation invalid")]
    DegenerateDetuning { op: &'static str },

    #[error("zero dispersive shift: qubit frequency is unidentifiable")]
    ZeroShift,

    #[error("dispersive shift ({chi} Hz) and detuning ({detuning} Hz) have opposite signs")]
    SignMismatch { chi: f64, detuning: f64 },

    #[error("photon-number truncation must be at least 2, got {0}")]
    Truncation(usize),

    #[error("qubit '{label}' is resonant with the bare cavity; use the hybridized branches")]
    Resonance { label: String },

    #[error("grid '{axis}': {msg}")]
    Grid { axis: String, msg: String },

    #[error("qubit '{label}' has no {field}; two-tone rendering needs T1 and T2*")]
    MissingCoherence { label: String, field: &'static str },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    /// The data cannot constrain the requested fit.
    #[error("{op}: degenerate data: {msg}")]
    Degenerate { op: &'static str, msg: String },

    #[error("{op}: needs at least {need} points, got {got}")]
    TooFewPoints {
        op: &'static str,
        need: usize,
        got: usize,
    },

    #[error("ridge extraction failed on {failed} of {total} columns")]
    RidgeFailure { failed: usize, total: usize },

    #[error("schema mismatch: expected '{expected}', found '{found}'")]
    Schema { expected: String, found: String },

    #[error("{path}: {msg}")]
    Config { path: String, msg: String },

    #[error("line {line}: {msg}")]
    Parse { line: u64, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain {
            op,
            msg: msg.into(),
        }
    }

    pub(crate) fn degenerate(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Degenerate {
            op,
            msg: msg.into(),
        }
    }

    /// True for errors caused by bad input data or configuration, as opposed to I/O.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Io(_))
    }
}
