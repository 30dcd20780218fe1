use thiserror::Error;

use crate::grid::{Bidegree, Line, ValidationReport};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(ValidationReport),

    #[error("point P_{{{0},{1}}} lies outside the {2}x{3} grid")]
    OutOfRange(usize, usize, usize, usize),

    #[error("point P_{{{0},{1}}} listed twice")]
    DuplicatePoint(usize, usize),

    #[error("expected {expected} line parameters, got {got}")]
    ParamCount { expected: usize, got: usize },

    #[error("configuration is not ACM (no staircase after permuting lines)")]
    NotAcm,

    #[error("point P_{{{0},{1}}} is not in the scheme")]
    PointNotInScheme(usize, usize),

    #[error("CollinearRemoval: points share {line} (P_{{{},{}}} and P_{{{},{}}})", first.0, first.1, second.0, second.1)]
    CollinearRemoval {
        first: (usize, usize),
        second: (usize, usize),
        line: Line,
    },

    #[error("NotInterior: point P_{{{0},{1}}} is a boundary point")]
    NotInterior(usize, usize),

    #[error("puncturing at {at} makes entry ({i},{j}) negative")]
    NonPositiveEntry { at: Bidegree, i: usize, j: usize },

    #[error("degree {at} lies outside the {rows}x{cols} window")]
    OutsideWindow { at: Bidegree, rows: usize, cols: usize },

    #[error("mapping-cone hypotheses fail when removing P_{{{},{}}} at degree {degree}", point.0, point.1)]
    MappingCone { point: (usize, usize), degree: Bidegree },

    #[error("separator for P_{{{},{}}} violates: {reason}", point.0, point.1)]
    SeparatorInvariant { point: (usize, usize), reason: String },

    #[error("bad field: {0}")]
    BadField(String),

    #[error("integer overflow while evaluating forms; use a prime field")]
    Overflow,

    #[error("Betti numbers reach the window frontier even with margin {margin}")]
    WindowTooSmall { margin: usize },

    #[error("parse error: {0}")]
    Parse(String),
}
