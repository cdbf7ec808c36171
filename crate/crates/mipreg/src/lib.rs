//! Uncertainty-aware, globally optimal point-cloud registration.
//!
//! The crate solves rigid registration as a mixed-integer linear program:
//! correspondences and outlier flags are binary variables, the SO(3)
//! constraint is replaced by a piecewise-convex relaxation, and per-point
//! measurement covariances enter the objective as Mahalanobis-weighted
//! L1 residuals. A three-stage pipeline wraps the solver for practical
//! problem sizes:
//!
//! 1. **APE** — approximate pose estimation on a small sensor subset with
//!    the Euclidean-metric MIP and an ICP incumbent heuristic,
//! 2. **RN** — refinement for noise with the Mahalanobis-metric MIP over a
//!    correspondence band around the APE pose,
//! 3. **LDR** — local dense refinement of the candidate poses with
//!    covariance-weighted ICP on the full sensor cloud.
//!
//! Module map:
//!
//! * [`geom`] — clouds, meshes, rigid transforms, covariances, synthetic
//!   data and evaluation metrics,
//! * [`milp`] — the self-contained MILP engine (bounded simplex, branch
//!   and bound, lazy convex cuts),
//! * [`so3relax`] — the piecewise-convex rotation block added to a model,
//! * [`regmip`] — assembly of registration MIPs and pose extraction,
//! * [`localref`] — Kabsch, ICP variants and the solver heuristic,
//! * [`pipeline`] — the APE/RN/LDR orchestration.
//!
//! The crate is `no_std`-compatible with `alloc`; the default `std`
//! feature enables wall-clock time limits and stage timings.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod geom;
pub mod localref;
pub mod milp;
pub mod pipeline;
pub mod regmip;
pub mod so3relax;

mod clock;

pub use geom::{PointCloud, RigidTransform, TriangleMesh};
