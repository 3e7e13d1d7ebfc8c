use thiserror::Error;

pub type Result<T> = std::result::Result<T, WalkError>;

#[derive(Debug, Error)]
pub enum WalkError {
    #[error("position {position} outside [{lo}, {hi}]")]
    PositionOutOfRange { position: i64, lo: i64, hi: i64 },

    #[error("invalid position space: {0}")]
    InvalidSpace(String),

    #[error("operation not supported on {0} topology")]
    UnsupportedTopology(&'static str),

    #[error("probability mass reached the edge of the position window ({side} side)")]
    WindowOverflow { side: &'static str },

    #[error("parameter {name} = {value} outside [0, 1]")]
    ParameterOutOfRange { name: &'static str, value: f64 },

    #[error("invalid noise configuration: {0}")]
    InvalidNoise(String),

    #[error("coin state not normalized (norm² = {0})")]
    UnnormalizedCoin(f64),

    #[error("invalid barrier configuration: {0}")]
    InvalidBarrier(String),

    #[error("space mismatch between operands")]
    SpaceMismatch,

    #[error(transparent)]
    Config(#[from] crate::experiments::ConfigError),

    #[error("unknown preset {0:?}")]
    UnknownPreset(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// Range check shared by every probability-like parameter.
pub(crate) fn check_unit(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(WalkError::ParameterOutOfRange { name, value })
    }
}
