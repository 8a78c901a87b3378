use std::path::PathBuf;

/// Errors produced by the simulator, the solvers and the experiment driver.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("area {width:.1} m x {height:.1} m is too small to host a single building block")]
    EmptyBuildingMap { width: f64, height: f64 },

    #[error("base-station site {site} at ({x:.1}, {y:.1}) lies outside the area")]
    SiteOutsideArea { site: usize, x: f64, y: f64 },

    #[error("path-loss model is valid for 22.5 m < h_ut <= 300 m, got {0} m")]
    AltitudeOutOfRange(f64),

    #[error("signal-quality metric needs at least one received power")]
    NoPowers,

    #[error("action index {index} out of range for {num_actions} actions")]
    ActionOutOfRange { index: usize, num_actions: usize },

    #[error("position ({x}, {y}) lies outside the area")]
    OutsideArea { x: f64, y: f64 },

    #[error("value iteration did not converge after {sweeps} sweeps (last residual {residual:e})")]
    NotConverged { sweeps: usize, residual: f64 },

    #[error("least-squares initialisation needs a non-empty sample set")]
    DegenerateSampleSet,

    #[error("config key `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("environment fingerprints differ: {0}")]
    FingerprintMismatch(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {reason}")]
    Parse { path: PathBuf, reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
