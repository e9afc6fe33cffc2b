use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("register of {n_qubits} qubits exceeds the configured maximum of {max}")]
    DimensionOverflow { n_qubits: usize, max: usize },

    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("invalid bath parameters: {0}")]
    InvalidBath(String),

    #[error("invalid squeezing parameters: {0}")]
    InvalidSqueeze(String),

    #[error("invalid integrator configuration: {0}")]
    InvalidIntegrator(String),

    #[error("stability guard rejected the step size: {}", .0.join("; "))]
    Stability(Vec<String>),

    #[error("non-finite value at step {step} (t = {t}) for {params}")]
    NonFinite { step: usize, t: f64, params: String },

    #[error("correlation set of kind {found} cannot drive {expected} dynamics")]
    WrongCorrelationKind {
        expected: &'static str,
        found: &'static str,
    },

    #[error("trajectory spans {span} time units, at least {required} are required")]
    TrajectoryTooShort { span: f64, required: f64 },

    #[error("sweep has {found} points, at least {required} are required")]
    TooFewPoints { found: usize, required: usize },

    #[error("malformed sweep: {0}")]
    InvalidSweep(String),

    #[error("unsupported request: {0}")]
    Unsupported(String),
}
