use thiserror::Error;

/// Errors surfaced by the algebra and hierarchy layers.
#[derive(Debug, Clone, Error)]
pub enum CoreError {
    #[error("window underflow: {0}")]
    Window(String),

    #[error("parity violation: {0}")]
    Parity(String),

    #[error("unassigned jet symbol {0} in evolutionary derivation")]
    UnassignedJet(String),

    #[error("unknown time index {0}")]
    UnknownTime(u32),

    #[error("constraint solve failed at order {order}: {msg}")]
    Constraint { order: i64, msg: String },

    #[error("root extraction failed at order {order}, degree {degree}: {msg}")]
    Root { order: i64, degree: u32, msg: String },

    #[error("degree cap required: {0}")]
    DegreeCapRequired(String),

    #[error("inconsistent input: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
