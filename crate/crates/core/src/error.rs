use thiserror::Error;

/// Errors raised by the solvers and the operators they drive.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PintError {
    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A physical state left the admissible set (negative depth, density or pressure).
    #[error("inadmissible state (cell {cell:?}, time index {time:?}): {reason}")]
    Inadmissible {
        cell: Option<usize>,
        time: Option<usize>,
        reason: String,
    },

    #[error("reference residual norm is zero; nothing to solve")]
    AlreadyConverged,
}

impl PintError {
    pub(crate) fn inadmissible(reason: impl Into<String>) -> Self {
        PintError::Inadmissible {
            cell: None,
            time: None,
            reason: reason.into(),
        }
    }

    /// Attaches a cell index to an inadmissible-state error, keeping any location already set.
    pub fn at_cell(self, i: usize) -> Self {
        match self {
            PintError::Inadmissible { cell, time, reason } => PintError::Inadmissible {
                cell: cell.or(Some(i)),
                time,
                reason,
            },
            other => other,
        }
    }

    pub fn at_time(self, n: usize) -> Self {
        match self {
            PintError::Inadmissible { cell, time, reason } => PintError::Inadmissible {
                cell,
                time: time.or(Some(n)),
                reason,
            },
            other => other,
        }
    }

    pub fn is_inadmissible(&self) -> bool {
        matches!(self, PintError::Inadmissible { .. })
    }
}

pub type Result<T> = std::result::Result<T, PintError>;

pub(crate) fn check_len(what: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(PintError::DimensionMismatch {
            what,
            expected,
            got,
        })
    }
}
