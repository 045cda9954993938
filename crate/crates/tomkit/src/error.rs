//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("zero-length vector where a direction is required")]
    DegenerateVector,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate contour: {0}")]
    DegenerateContour(String),

    #[error("closest point on circle is ambiguous: query coincides with the center")]
    AmbiguousProjection,

    #[error("interior hint lies on the wall line of segment {0}")]
    AmbiguousInterior(usize),

    #[error("wall affordances cancel out; no exit direction exists")]
    NoExit,

    #[error("tool produces no affordance cells inside the grid")]
    OutOfGrid,

    #[error("no candidate point survives redundancy filtering")]
    NoCandidate,

    #[error("tool too short: lever radius {r:.4} m is below the object radius {r_obj:.4} m")]
    ToolTooShort { r: f64, r_obj: f64 },

    #[error("pose at ({x:.3}, {y:.3}) is outside the robot reach {reach:.3} m")]
    Unreachable { x: f64, y: f64, reach: f64 },

    #[error("tip affordance is already parallel to the exit vector")]
    AlreadyAligned,

    #[error("no collision-free initial pose inside the wall opening")]
    CannotEnter,

    #[error("contact resolution did not converge (tool overlaps the object)")]
    ContactJam,

    #[error("step budget of {budget} frames exhausted during `{function}`")]
    Timeout { function: String, budget: usize },

    #[error("infeasible task: {0}")]
    Infeasible(String),

    #[error("underspecified task: {0}")]
    UnderspecifiedTask(String),

    #[error("backend unavailable: {0}")]
    BackendUnavailable(String),

    #[error("no motion function found in backend output: {raw:?}")]
    MalformedPlanText { raw: String },

    #[error("invalid plan: {0}")]
    InvalidPlan(String),

    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },

    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("plan step {index} ({function}) failed: {source}")]
    Step {
        index: usize,
        function: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
}

impl Error {
    pub fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}
