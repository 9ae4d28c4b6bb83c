use thiserror::Error;

/// Errors raised while building or solving RBF least-squares problems.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("singular symbol: normal-equation diagonal vanishes at frequency {index}")]
    SingularSymbol { index: usize },

    #[error(
        "insufficient oversampling: {rows} collocation points for {cols} unknowns \
         (increase the oversampling factor)"
    )]
    InsufficientOversampling { rows: usize, cols: usize },

    #[error("dense assembly refused: {cols} columns exceeds the guard of {limit}")]
    DenseTooLarge { cols: usize, limit: usize },

    #[error("sketch of {sketch} columns does not fit an operator with {cols} columns")]
    SketchTooLarge { sketch: usize, cols: usize },

    #[error("singular value decomposition failed to converge")]
    SvdFailed,

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("boundary point {index} has no boundary condition assigned")]
    UnassignedBoundary { index: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(context: &'static str, expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            context,
            expected,
            actual,
        })
    }
}
