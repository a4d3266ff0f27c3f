use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("state space of {n_atoms} atoms with photon cutoff {photon_cutoff} exceeds addressable size")]
    Capacity {
        n_atoms: usize,
        photon_cutoff: usize,
    },

    #[error("atom index {index} out of range 1..={n_atoms}")]
    AtomIndex { index: usize, n_atoms: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("overdamped regime: kappa = {kappa} must be below 4 * omega1 = {limit}")]
    Overdamped { kappa: f64, limit: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error(
        "operator couples excitation blocks {from} and {to}; blocked evolution does not apply"
    )]
    BlockStructure { from: usize, to: usize },

    #[error("label `{label}` has {actual} bits but the register has {expected} qubits")]
    LabelLength {
        label: String,
        expected: usize,
        actual: usize,
    },

    #[error("function on {n} qubits is neither constant nor balanced (weight {weight})")]
    NotPromised { n: usize, weight: usize },

    #[error("exhaustive enumeration is limited to 1..={max} qubits, got {n}")]
    EnumerationBound { n: usize, max: usize },

    #[error("zero vector has no defined {0}")]
    ZeroVector(&'static str),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
