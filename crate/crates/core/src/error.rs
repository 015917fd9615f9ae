use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("expected {expected} entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("link index {index} out of range for a chain of {len} links")]
    LinkIndex { index: usize, len: usize },

    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    InvalidConfig(Vec<String>),

    #[error("plant state became non-finite at t = {time:.3} s")]
    Diverged { time: f64 },

    #[error("module {module}: centre of mass at or below the joint (com_y = {com_y:.4} m)")]
    DegenerateGeometry { module: usize, com_y: f64 },

    #[error("unknown sensor channel `{0}` (expected vestibular, proprioceptive or torque)")]
    UnknownChannel(String),

    #[error("failed to parse scenario: {0}")]
    Parse(#[from] toml::de::Error),

    #[error("failed to serialise metrics: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidConfig(vec![msg.into()])
    }
}
