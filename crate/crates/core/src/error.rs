use thiserror::Error;

use crate::expr::{EvalError, ParamPoint, ParseError};

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("operator order {0} exceeds the cap of {max}", max = crate::operator::MAX_ORDER)]
    OrderOverflow(usize),
    #[error("degenerate surface at {point}: {what}")]
    DegenerateSurface { point: ParamPoint, what: String },
    #[error("metric is not positive definite at {0}")]
    NotPositiveDefinite(ParamPoint),
    #[error("invalid surface spec: {0}")]
    Spec(String),
    #[error("unknown catalog surface `{0}`")]
    UnknownSurface(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("quadrature rectangle {0} lies outside the surface domain")]
    QuadratureDomain(String),
    #[error("empty point sample")]
    EmptySample,
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
