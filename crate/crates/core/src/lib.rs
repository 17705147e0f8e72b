//! Numerical verification of integral curvature estimates for Ricci flow on
//! closed four-manifolds.
//!
//! The crate is layered: [`tensor`] holds pointwise curvature algebra,
//! [`catalog`] the geometry families with exact curvature, [`flow`] the
//! reduced Ricci flow with time-integral accumulators, and [`estimates`]
//! the inequality checkers.

// Negated float comparisons are deliberate: they reject NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod estimates;
pub mod flow;
pub mod integrator;
pub mod tensor;

pub use catalog::{
    catalog, integrate, point_data, volume, CatalogEntry, FamilyId, FourierField, GeometryError, GeometryState, Kind,
    PointData, StateData, DEFAULT_WARP_N,
};
pub use estimates::{run_suite, EstimateConstants, InequalityResult, Status, Suite, SuiteOptions};
pub use flow::{evolve, evolve_normalized, FlowConfig, FlowError, Termination, Trajectory};
pub use tensor::{CurvatureDerivatives, CurvatureTensor, PointwiseDensities, Sym2Tensor, TensorError};
