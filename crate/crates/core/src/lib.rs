//! Reduced zero-dimensional schemes on a grid of lines in P¹×P¹: Hilbert
//! functions, ACM classification, split separators and bigraded minimal
//! free resolutions, with an exact linear-algebra oracle to check them.

pub mod error;
pub mod formats;
pub mod grid;
pub mod hilbert;
pub mod linalg;
pub mod oracle;
pub mod resolution;
pub mod sample;

pub use error::{Error, Result};
pub use grid::{Bidegree, Line, Normalized, PointClass, PointGrid, PointKind, ValidationReport, Violation};
pub use hilbert::{hilbert_acm, BoundaryFunctions, DeltaMatrix, HilbertMatrix, T0Report, T0Violation};
pub use oracle::{ExactField, SeparatingDegree};
pub use resolution::{
    acm_resolution, betti_from_delta, check_mapping_cone_conditions, remove_points, separator_for,
    BettiDifference, BettiTable, ConditionReport, Removal, RemovalPlan, RemovalStep, Separator, Shifts,
};
