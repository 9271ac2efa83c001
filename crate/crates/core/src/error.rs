use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate wedge: no positive half-width fits at the requested point")]
    DegenerateWedge,

    #[error("pole: {0}")]
    Pole(String),

    #[error("measure has an atom at {0} outside [-1, 1]")]
    Support(f64),

    #[error("not real-analytic at the requested point")]
    NotAnalytic,

    #[error("accuracy target missed: {0}")]
    Accuracy(String),

    #[error("sampling error: {0}")]
    Sampling(String),

    #[error("Vandermonde system of degree {degree} is too ill-conditioned for f64 (largest reliable degree {largest_reliable})")]
    Conditioning { degree: usize, largest_reliable: usize },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("continuation stuck after {} steps at {last:?}", steps.len())]
    Stuck {
        last: Vec<f64>,
        steps: Vec<crate::continuation::PathStep>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
        if expected == got {
            Ok(())
        } else {
            Err(Error::Dimension { expected, got })
        }
    }
}
