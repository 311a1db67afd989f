use thiserror::Error;

/// Errors shared across the solver and diagnostics.
#[derive(Debug, Error)]
pub enum MhdError {
    /// A constructor precondition was violated; names the offending parameter.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The grid has too few normal nodes for the requested stencil.
    #[error("grid too coarse: Ny = {ny} cannot support a derivative of order {order}")]
    GridTooCoarse { ny: usize, order: usize },

    /// `f <y>^delta` dropped below the admissible floor; the good-unknown
    /// hypothesis `f >= c <y>^-delta` no longer holds.
    #[error("positivity lost at t = {t}: min f<y>^delta = {min_ratio} < floor {floor}")]
    PositivityLost { t: f64, min_ratio: f64, floor: f64 },

    /// The CFL-limited step shrank below 1e-12.
    #[error("CFL collapse at t = {t}: required dt = {dt}")]
    CflCollapse { t: f64, dt: f64 },

    /// NaN or infinity detected in a prognostic field.
    #[error("non-finite value in `{field}` at t = {t}")]
    NonFinite { field: &'static str, t: f64 },

    /// Banded solve hit a zero pivot (malformed grid or operator).
    #[error("singular banded solve: zero pivot at row {row}")]
    SingularSolve { row: usize },

    #[error("envelope violation: {0}")]
    EnvelopeViolation(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, MhdError>;
