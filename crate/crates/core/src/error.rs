//! Error types shared by the reconstruction pipeline.

use std::fmt;

use thiserror::Error;

/// Pipeline stage identifiers, used when a reconstruction run stops early.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    /// Ordering the sample trains along the curve.
    Ordering,
    /// Orienting the ordered chain from the last-axis end to the first-axis end.
    Orientation,
    /// Building the origin-capped polygonal chain.
    Chain,
    /// Estimating the quantile function on the chain.
    Quantile,
    /// Locating first/last nonzero entries per coordinate.
    Alphas,
    /// Inverting the coordinate fractions into a support length.
    SupportLen,
    /// Assembling the pulse estimate on its output grid.
    Assembly,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Ordering => "ordering",
            Stage::Orientation => "orientation",
            Stage::Chain => "chain",
            Stage::Quantile => "quantile",
            Stage::Alphas => "alphas",
            Stage::SupportLen => "support_len",
            Stage::Assembly => "assembly",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// The points at hand cannot be ordered into a single oriented chain;
    /// the reconstruction must stop until more data is available.
    #[error("insufficient data at stage {stage}: {detail}")]
    InsufficientData { stage: Stage, detail: String },

    /// No point lies on the required coordinate axis, so the chain cannot
    /// be oriented.
    #[error("no point lies on coordinate axis {axis} (1-based) within epsilon {epsilon}")]
    NoAxisPoint { axis: usize, epsilon: f64 },

    /// Some coordinate is zero across every ordered point, so its
    /// first/last nonzero ordinals are undefined.
    #[error("coordinate {coordinate} (1-based) is zero across all points")]
    MissingCoordinateData { coordinate: usize },

    /// The minimum gap between consecutive pulses is smaller than the
    /// time span of one sample train, so windows would mix two pulses.
    #[error("inter-pulse gap {gap} is smaller than the train span {span}")]
    PulsesTooClose { gap: f64, span: f64 },

    /// Catch-all for invalid arguments and malformed inputs.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// The pipeline stage a reconstruction failure belongs to, if any.
    pub fn stage(&self) -> Option<Stage> {
        match self {
            Error::InsufficientData { stage, .. } => Some(*stage),
            Error::NoAxisPoint { .. } => Some(Stage::Orientation),
            Error::MissingCoordinateData { .. } => Some(Stage::Alphas),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
