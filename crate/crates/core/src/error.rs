use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid material: {0}")]
    InvalidMaterial(String),

    #[error("calibration error: {0}")]
    Calibration(String),

    #[error("invalid cantilever sample #{index}: {reason}")]
    InvalidSample { index: usize, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid gripper: {0}")]
    InvalidGripper(String),

    #[error("invalid forces: {0}")]
    InvalidForces(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("grasp position {x_mm:.1} mm is inside the natural opening W0 = {w0_mm:.1} mm")]
    UngraspablePosition { x_mm: f64, w0_mm: f64 },

    #[error("tilt {tilt_deg:.2}° exceeds the limit {limit_deg:.2}°")]
    Tilt { tilt_deg: f64, limit_deg: f64 },

    #[error("missing constraint: {0}")]
    MissingConstraint(&'static str),

    #[error("invalid request: {0}")]
    InvalidRequest(String),

    #[error("no strategy satisfies the task requirements ({})", .0.join("; "))]
    NoStrategy(Vec<String>),

    #[error("plan is infeasible ({0}); refusing to execute")]
    InfeasiblePlan(String),

    #[error("unknown material '{0}'")]
    UnknownMaterial(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(format!("line {} column {}: {}", e.line(), e.column(), e))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
