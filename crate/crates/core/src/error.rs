use crate::rational::Rational;
use crate::space::{MetricViolation, Triple};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("distance table is not a metric: {0}")]
    NotMetric(MetricViolation),

    #[error("space is not ultrametric: {0}")]
    NotUltrametric(Triple),

    #[error("point {point} is not covered{}", .reason.as_deref().map(|r| format!(" ({r})")).unwrap_or_default())]
    CoverIncomplete { point: usize, reason: Option<String> },

    #[error("ball centered at {center} has radius {radius} outside [{min}, {max}]")]
    RadiusOutOfRange {
        center: usize,
        radius: Rational,
        min: Rational,
        max: Rational,
    },

    #[error("{what}: achieved {achieved} exceeds bound {bound}")]
    BoundViolated {
        what: String,
        achieved: u128,
        bound: u128,
    },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("unknown gallery case {0:?}")]
    UnknownCase(String),

    #[error("ball kinds differ within one family")]
    MixedKinds,

    #[error("radius {0} is not positive")]
    NonPositiveRadius(Rational),

    #[error("point index {index} out of range for a space of {n} points")]
    PointOutOfRange { index: usize, n: usize },

    #[error("parse error at line {line}, column {column}: {msg}")]
    Parse {
        line: usize,
        column: usize,
        msg: String,
    },

    #[error("invalid generator spec {spec:?}: {msg}")]
    GenSpec { spec: String, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        let full = e.to_string();
        let msg = match full.rfind(" at line ") {
            Some(cut) if e.line() > 0 => full[..cut].to_string(),
            _ => full,
        };
        Error::Parse {
            line: e.line(),
            column: e.column(),
            msg,
        }
    }
}
