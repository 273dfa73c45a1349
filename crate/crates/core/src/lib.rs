//! Numerical laboratory for monotone operator calculus on R^d.
//!
//! The crate evaluates Fitzpatrick functions and their conjugates on grids
//! to classify operators as monotone / representable / maximal, probes
//! graph limits of operator sequences through the resolvent equation, and
//! computes membership in variational sums and variational compositions.
//!
//! The ambient space is always Euclidean R^d, so the duality mapping is the
//! identity; all verdicts produced by the probes are numerical evidence at
//! the configured tolerances, never proofs.

pub mod fitzpatrick;
pub mod limits;
pub mod linalg;
pub mod operators;
pub mod par;
pub mod resolvent;
pub mod varcalc;

pub use operators::{
    duality_map, graph_monotone_check, hausdorff_distance, minkowski_sum_eval, op_eval,
    polar_member, ConvexFnSpec, ConvexSetSpec, DualPair, OpError, OperatorSpec, SampledGraph,
    SetDescription, ToleranceConfig, Vector,
};
pub use resolvent::{
    resolvent, solve_graph_probe, strongly_monotone_solve, yosida_eval, SolveError, SolveReport,
};
