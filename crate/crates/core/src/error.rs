use crate::autodiff::JetError;
use crate::expr::{EvalError, ParseError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("metric is singular or not positive definite at {0:?}")]
    SingularMetric(Vec<f64>),
    #[error("point {point:?} is outside the chart domain ({detail})")]
    OutsideChart { point: Vec<f64>, detail: String },
    #[error("point has {found} coordinates, chart has {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("frame is not orthonormal at {point:?} (deviation {deviation:e})")]
    FrameNotOrthonormal { point: Vec<f64>, deviation: f64 },
    #[error("mean curvature of the fibers is not basic (variation {0:e})")]
    NonBasic(f64),
    #[error("base is not Einstein with constant {a} (deviation {deviation:e})")]
    NotEinstein { a: f64, deviation: f64 },
    #[error("{0}")]
    Unsupported(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("{0}")]
    Pole(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
