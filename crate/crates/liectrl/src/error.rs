use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite entries in {0}")]
    NonFinite(&'static str),

    #[error("matrix is not unipotent: nilpotency residual {residual:.3e}")]
    NotUnipotent { residual: f64 },

    #[error("eigenvalue iteration did not converge within {max_sweeps} QR sweeps")]
    EigenNonConvergence { max_sweeps: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsupported flow: {0}")]
    UnsupportedFlow(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// CLI exit code: 1 for bad input, 2 for a numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::EigenNonConvergence { .. } | Error::Numerical(_) => 2,
            _ => 1,
        }
    }
}
