//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GeomError {
    #[error("non-finite input")]
    NonFinite,
    #[error("degenerate ellipse axes: a={a}, b={b} (require a >= b > 0)")]
    DegenerateAxes { a: f64, b: f64 },
    #[error("bad rectangle extents: l1={l1}, l2={l2} (require l1 >= l2 >= 0, l1 > 0)")]
    BadRectangle { l1: f64, l2: f64 },
}

#[derive(Debug, Error, PartialEq)]
pub enum RegressionError {
    #[error("empty convoy snapshot")]
    EmptySnapshot,
    #[error("non-finite target position at index {index}")]
    NonFinitePosition { index: usize },
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Regression(#[from] RegressionError),
    #[error("non-finite {field} at tick {tick} (t={t}); simulation aborted")]
    NonFinite { field: &'static str, tick: usize, t: f64 },
}
