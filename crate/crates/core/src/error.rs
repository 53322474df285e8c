use thiserror::Error;

/// Errors raised by the rodeo library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RodeoError {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The caller passed structurally invalid input (empty schedule, bad file, ...).
    #[error("usage error: {0}")]
    Usage(String),
    /// A numerical procedure failed to converge or lost its bracket.
    #[error("numeric error: {0}")]
    Numeric(String),
    /// The post-selected branch has zero norm, so ratios are undefined.
    #[error("degenerate branch: {0}")]
    DegenerateBranch(String),
    /// No table row reached the requested suppression.
    #[error("no schedule reaches S_E <= {threshold:e}; best is {best:e} (row {best_row})")]
    ThresholdNotMet {
        threshold: f64,
        best: f64,
        best_row: usize,
    },
}

pub type Result<T, E = RodeoError> = std::result::Result<T, E>;

impl RodeoError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Self::Domain(msg.into())
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Self::Usage(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Self::Numeric(msg.into())
    }
}

impl From<std::io::Error> for RodeoError {
    fn from(e: std::io::Error) -> Self {
        Self::Usage(e.to_string())
    }
}

impl From<serde_json::Error> for RodeoError {
    fn from(e: serde_json::Error) -> Self {
        Self::Usage(format!("json: {e}"))
    }
}

impl From<csv::Error> for RodeoError {
    fn from(e: csv::Error) -> Self {
        Self::Usage(format!("csv: {e}"))
    }
}
