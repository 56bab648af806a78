use thiserror::Error;

/// Errors raised by the witnesskit library.
///
/// Every variant maps to a stable machine-readable [`Error::code`] so that
/// command-line front ends can report failures as structured data.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("total dimension {0} exceeds the supported maximum of {max}", max = crate::linalg::MAX_DIM)]
    TooLarge(usize),

    #[error("party index {party} out of range for {parties} parties")]
    InvalidParty { party: usize, parties: usize },

    #[error("operation requires a bipartite operator, found {0} parties")]
    NotBipartite(usize),

    #[error("state vector is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("operator is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("operator is not positive semidefinite (minimum eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("parameter {name} = {value} outside [{lo}, {hi}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("no NPT witness exists: partial transpose is positive (minimum eigenvalue {0:e})")]
    NoNptWitness(f64),

    #[error("trivial kernel: {0}")]
    TrivialKernel(String),

    #[error("optimized epsilon {0:e} is not positive; the input is not a valid pre-witness")]
    NonPositiveEpsilon(f64),

    #[error("alternating optimization did not converge within {0} sweeps")]
    NonConvergence(usize),

    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),

    #[error("thresholds tau/theta only apply to the two-qubit W0 witness")]
    ThresholdRequiresW0,

    #[error("invalid measurement setting: {0}")]
    InvalidSetting(String),

    #[error("number of shots must be positive")]
    ZeroShots,

    #[error("state yields negative outcome probability {0:e}")]
    NegativeProbability(f64),

    #[error("serialization error: {0}")]
    Serialization(String),
}

impl Error {
    /// Stable snake_case identifier for the error kind.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NotSquare { .. } => "not_square",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::TooLarge(_) => "dimension_too_large",
            Error::InvalidParty { .. } => "invalid_party",
            Error::NotBipartite(_) => "not_bipartite",
            Error::NotNormalized(_) => "not_normalized",
            Error::NotHermitian(_) => "not_hermitian",
            Error::NotPositive(_) => "not_positive",
            Error::InvalidTrace(_) => "invalid_trace",
            Error::OutOfRange { .. } => "out_of_range",
            Error::NoNptWitness(_) => "no_npt_witness",
            Error::TrivialKernel(_) => "trivial_kernel",
            Error::NonPositiveEpsilon(_) => "non_positive_epsilon",
            Error::NonConvergence(_) => "non_convergence",
            Error::DegenerateParameters(_) => "degenerate_parameters",
            Error::ThresholdRequiresW0 => "threshold_requires_w0",
            Error::InvalidSetting(_) => "invalid_setting",
            Error::ZeroShots => "zero_shots",
            Error::NegativeProbability(_) => "negative_probability",
            Error::Serialization(_) => "serialization",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_range(name: &'static str, value: f64, lo: f64, hi: f64) -> Result<()> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name,
            value,
            lo,
            hi,
        })
    }
}
