use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A frequency or exponent was outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(&'static str),

    /// A transfer function denominator vanished at the evaluation point.
    #[error("denominator vanishes at omega = {omega}")]
    Singular { omega: f64 },

    /// Invalid construction parameters for a grid, model or bound set.
    #[error("invalid construction: {0}")]
    Construction(&'static str),

    /// The Nyquist contour could not be tracked with phase steps below pi/2.
    #[error("nyquist grid too coarse near omega = {omega} rad/s")]
    GridTooCoarse { omega: f64 },

    /// The accumulated phase did not close onto an integer winding number.
    #[error("nyquist contour did not close (residual {residual} turns)")]
    OpenContour { residual: f64 },

    /// An operation that requires a stable loop was given an unstable one.
    #[error("loop is not stable (winding number {winding})")]
    Unstable { winding: i32 },

    /// Map normalization found no usable positive maximum.
    #[error("degenerate normalization: {0}")]
    Normalization(&'static str),

    /// No stable cell or point was available to build or pick from.
    #[error("empty front")]
    EmptyFront,

    /// Two inputs that must be derived from the same sweep disagree.
    #[error("inconsistent inputs: {0}")]
    Inconsistent(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
