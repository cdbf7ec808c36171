//! A small mixed-integer linear programming engine.
//!
//! The engine is deliberately self-contained: a sparse model builder, a
//! bounded-variable revised simplex for the LP relaxations, and a
//! best-first branch and bound with SOS2 branching. Convex quadratic
//! constraints (`‖A·x + b‖² ≤ c`) are not handled natively; they are
//! enforced lazily by outer-approximation tangent cuts generated at
//! integer-feasible points, so every node stays a pure LP.
//!
//! Tolerances used throughout (stated once, used everywhere): linear
//! feasibility `1e-7`, integrality and SOS2 `1e-6`, quadratic caps
//! `1e-6`, default relative gap `1e-4`.

mod branch;
mod check;
mod dump;
mod model;
mod simplex;

pub use branch::{
    branch_and_bound, branch_and_bound_with, Incumbent, IncumbentHeuristic, MilpSolution,
    NodeLogEntry, SearchContext, SolveOptions, SolveStatus,
};
pub use check::{check_solution, Violation, ViolationKind, ViolationReport};
pub use dump::{dump_model, load_model};
pub use model::{
    LinearConstraint, LinearExpr, MilpModel, QuadCap, Relation, Sos2Interpolation, Sos2Set,
    VarId, VarKind, Variable,
};
pub use simplex::{solve_lp_relaxation, LpSolution};

use core::fmt;

/// Linear feasibility tolerance.
pub const FEASIBILITY_TOL: f64 = 1e-7;
/// Distance from an integer at which a binary counts as integral.
pub const INTEGRALITY_TOL: f64 = 1e-6;
/// Threshold below which an SOS2 weight counts as zero, and the
/// violation tolerance for quadratic caps.
pub const SOS2_TOL: f64 = 1e-6;
/// Default relative optimality gap.
pub const DEFAULT_GAP_TOL: f64 = 1e-4;

/// Errors raised by model construction or the solver.
#[derive(Debug, Clone, PartialEq)]
pub enum MilpError {
    /// Lower bound exceeds upper bound, or binary bounds leave [0, 1].
    BadBounds,
    /// A constraint referenced a variable id that does not exist.
    UnknownVariable(VarId),
    /// An SOS2 set needs at least 3 members.
    SosTooSmall,
    /// Mismatched dimensions in a quadratic cap.
    MalformedQuadCap,
    /// The simplex failed to make progress within its anti-cycling
    /// budget, or the basis became numerically unusable.
    NumericalFailure,
    /// A supplied solution vector has the wrong length.
    WrongValueCount { expected: usize, got: usize },
}

impl fmt::Display for MilpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MilpError::BadBounds => write!(f, "invalid variable bounds"),
            MilpError::UnknownVariable(id) => write!(f, "unknown variable id {id}"),
            MilpError::SosTooSmall => write!(f, "sos2 sets need at least 3 members"),
            MilpError::MalformedQuadCap => write!(f, "malformed quadratic cap"),
            MilpError::NumericalFailure => write!(f, "numerical failure in simplex"),
            MilpError::WrongValueCount { expected, got } => {
                write!(f, "expected {expected} values, got {got}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for MilpError {}
