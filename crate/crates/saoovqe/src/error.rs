use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitOutOfRange { index: usize, n_qubits: usize },
    #[error("control and target are the same qubit ({0})")]
    ControlEqualsTarget(usize),
    #[error("qubit count mismatch: expected {expected}, found {found}")]
    QubitCountMismatch { expected: usize, found: usize },
    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("empty sector: {0}")]
    EmptySector(String),
    #[error("requested {requested} states but sector has dimension {available}")]
    TooManyStates { requested: usize, available: usize },
    #[error("invalid active space: {0}")]
    InvalidActiveSpace(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown model system `{0}`")]
    UnknownModel(String),
    #[error("parameter outside model domain: {0}")]
    OutsideDomain(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("format error: {0}")]
    Format(String),
    #[error("unequal weights: state resolution needs an equi-ensemble")]
    UnequalWeights,
    #[error("states are not resolved")]
    Unresolved,
    #[error("degenerate gap |E_J - E_I| = {gap:.3e} Ha below threshold")]
    DegenerateGap {
        gap: f64,
        /// derivative-coupling numerator per coordinate (Ha/unit)
        numerator: Vec<f64>,
    },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("convergence failure: {0}")]
    Convergence(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
