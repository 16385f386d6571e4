//! Error type shared by every module in the crate.
//!
//! Variants are grouped by the kind of failure they describe: malformed or
//! inconsistent *input* (bad files, bad parameters) versus *numerical*
//! breakdown of an algorithm (divergence, blow-up, non-convergence). The CLI
//! maps the two groups onto distinct process exit codes.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A required column is absent from an input file's header.
    #[error("missing column `{0}` in header")]
    MissingColumn(String),

    /// A data row could not be parsed; `line` is 1-based and counts the
    /// header line.
    #[error("line {line}: {message}")]
    Row { line: usize, message: String },

    /// The input contained no usable data rows.
    #[error("empty input: {0}")]
    EmptyInput(String),

    /// A configuration value violates a documented precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Input data violates a documented invariant.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A trajectory left the basin where the model is meaningful.
    #[error("divergence at t = {time:.6} (step {step}): {message}")]
    Divergence {
        time: f64,
        step: usize,
        message: String,
    },

    /// A field value became non-finite during evolution.
    #[error("numerical blow-up at t = {time:.6}: field is no longer finite")]
    BlowUp { time: f64 },

    /// Impulse decomposition did not yield well-separated pulses in time.
    #[error("unresolved pulse train at t = {t_end}: {message}")]
    UnresolvedTrain { t_end: f64, message: String },

    /// Least-squares iteration stalled; carries the last iterate for
    /// diagnosis.
    #[error(
        "fit did not converge after {iterations} iterations (rms residual {residual:.3e}); last iterate {last:?}"
    )]
    NonConvergence {
        iterations: usize,
        residual: f64,
        last: Vec<f64>,
    },

    /// The data in a fit window cannot support the model (e.g. no rise).
    #[error("degenerate fit window: {0}")]
    DegenerateFit(String),

    /// A requested operation is outside the supported envelope.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A correlation was requested on data with no variance or fewer than
    /// two points.
    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by malformed input or parameters (as opposed
    /// to numerical breakdown during an otherwise valid computation).
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::MissingColumn(_)
                | Error::Row { .. }
                | Error::EmptyInput(_)
                | Error::InvalidParameter(_)
                | Error::InvalidInput(_)
                | Error::Unsupported(_)
                | Error::Io(_)
        )
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
