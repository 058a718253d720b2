use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count {n} outside supported range {min}..={max}")]
    QubitCount { n: usize, min: usize, max: usize },

    #[error("qubit index {index} out of range for a {num_qubits}-qubit register")]
    QubitIndex { index: usize, num_qubits: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("decoherence parameter {0} outside [0, 1]")]
    Parameter(f64),

    #[error("rate must be nonnegative, got {0}")]
    NegativeRate(f64),

    #[error("eigensolver did not converge on a {0}x{0} matrix")]
    EigenConvergence(usize),

    #[error("N-concurrence is defined for an even number of qubits, got {0}")]
    OddQubitCount(usize),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("numeric invariant violated: {0}")]
    Invariant(String),

    #[error("fit needs at least 3 points above the floor, got {0}")]
    TooFewPoints(usize),

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error on {}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    /// Process exit code for the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } | Error::Csv { .. } => 4,
            Error::Invariant(_)
            | Error::EigenConvergence(_)
            | Error::NotHermitian(_)
            | Error::InvalidState(_) => 3,
            _ => 2,
        }
    }
}
