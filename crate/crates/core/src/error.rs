use thiserror::Error;

/// Errors raised by divergence evaluation, parameter conversion and the solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{family}: natural parameter out of domain: {detail}")]
    OutOfDomain { family: &'static str, detail: String },

    #[error("{family}: combination {combination} leaves the natural parameter space ({detail})")]
    CombinationOutOfDomain {
        family: &'static str,
        combination: String,
        detail: String,
    },

    #[error("{family}: invalid source parameter: {detail}")]
    InvalidSource { family: &'static str, detail: String },

    #[error("{family}: expectation parameter outside the valid range: {detail}")]
    InvalidExpectation { family: &'static str, detail: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("family mismatch: {left} vs {right}")]
    FamilyMismatch { left: String, right: String },

    #[error("invalid exponent: {0}")]
    InvalidExponent(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("quadrature did not converge after {subdivisions} subdivisions: estimate {estimate}, error bound {error_bound:e}")]
    Quadrature {
        estimate: f64,
        error_bound: f64,
        subdivisions: usize,
    },

    #[error("degenerate integral: {0}")]
    DegenerateIntegral(String),

    #[error("divergence evaluated to {0:e}, below the floating-point noise floor")]
    NegativeDivergence(f64),

    #[error("unbounded density: {0}")]
    UnboundedDensity(String),

    #[error("elementary partition: {0}")]
    Partition(String),
}

impl Error {
    /// Stable machine-readable tag, used by the CLI error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::OutOfDomain { .. } => "out_of_domain",
            Error::CombinationOutOfDomain { .. } => "combination_out_of_domain",
            Error::InvalidSource { .. } => "invalid_source",
            Error::InvalidExpectation { .. } => "invalid_expectation",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::FamilyMismatch { .. } => "family_mismatch",
            Error::InvalidExponent(_) => "invalid_exponent",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::NonConvergence { .. } => "non_convergence",
            Error::Quadrature { .. } => "quadrature",
            Error::DegenerateIntegral(_) => "degenerate_integral",
            Error::NegativeDivergence(_) => "negative_divergence",
            Error::UnboundedDensity(_) => "unbounded_density",
            Error::Partition(_) => "partition",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
