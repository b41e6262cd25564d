//! Exact computation of the measure (length, area, volume, ...) of a union
//! of axis-parallel boxes inside a bounding domain.
//!
//! The baseline solver in [`solver`] handles any instance. The interesting
//! part of this crate is a set of adaptive techniques that exploit structure
//! in the input to go faster while returning the same value:
//!
//! * [`maxima`] discards boxes contained in other boxes before solving, so
//!   the cost depends on the number of maximal boxes rather than on `n`.
//! * [`profile`] splits the domain into slabs orthogonal to the axis where
//!   boxes overlap the least, solves each slab independently, and sums.
//! * [`treewidth`] uses a tree decomposition of the box intersection graph
//!   to divide and conquer with inclusion-exclusion over a single shared bag.
//!
//! [`treewidth::measure_combined`] chains the maxima filter with the tree
//! decomposition route. Every path through the crate computes the exact same
//! quantity; [`oracle`] holds small brute-force implementations used to
//! cross-check all of them in tests.

pub mod error;
pub mod geometry;
pub mod instances;
pub mod maxima;
pub mod oracle;
pub mod profile;
pub mod report;
pub mod solver;
pub mod treewidth;

mod dyadic;

pub use error::{FamilyError, GeometryError, OracleError};
pub use geometry::{AxisBox, Instance};
pub use report::{Algorithm, MeasureReport, Stats};
pub use solver::SolverConfig;
