//! Core geometry: point clouds, triangle meshes, rigid transforms,
//! covariance handling, synthetic-data generation and evaluation metrics.
//!
//! Everything here is a pure function of its inputs plus an explicit seed;
//! values are immutable after construction and safe to share across
//! threads.

mod cloud;
mod covariance;
mod mesh;
mod metrics;
mod synth;
mod transform;

pub use cloud::PointCloud;
pub use covariance::{
    cholesky_lower, estimate_local_covariances, mahalanobis_weight, CovarianceEstimate,
};
pub use mesh::{sample_mesh_points, TriangleMesh};
pub use metrics::{metrics, RegistrationMetrics};
pub use synth::{add_gaussian_noise, inject_outliers, random_rigid_transform};
pub use transform::{project_to_so3, rotation_about_axis, RigidTransform};

use core::fmt;

/// Errors raised by geometry operations.
#[derive(Debug, Clone, PartialEq)]
pub enum GeomError {
    /// A matrix expected to be symmetric positive definite was not.
    NotPositiveDefinite,
    /// A matrix violated the rotation invariants beyond tolerance.
    NotARotation,
    /// A matrix was numerically singular.
    Singular,
    /// A mesh had no usable faces.
    EmptyMesh,
    /// A face referenced a vertex index outside the vertex list, or
    /// repeated an index.
    InvalidFace { face: usize },
    /// Covariance list length does not match the point list.
    CovarianceCountMismatch,
    /// An argument was outside its documented range.
    InvalidArgument(&'static str),
}

impl fmt::Display for GeomError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeomError::NotPositiveDefinite => write!(f, "matrix is not positive definite"),
            GeomError::NotARotation => write!(f, "matrix is not a rotation"),
            GeomError::Singular => write!(f, "matrix is numerically singular"),
            GeomError::EmptyMesh => write!(f, "mesh has no usable faces"),
            GeomError::InvalidFace { face } => write!(f, "face {face} is invalid"),
            GeomError::CovarianceCountMismatch => {
                write!(f, "covariance count does not match point count")
            }
            GeomError::InvalidArgument(what) => write!(f, "invalid argument: {what}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for GeomError {}
