//! Point clouds with optional per-point covariances.

use super::{GeomError, RigidTransform};
use alloc::vec::Vec;
use nalgebra::{Matrix3, Vector3};
#[allow(unused_imports)]
use num_traits::Float;

const SYMMETRY_TOL: f64 = 1e-12;

/// An ordered set of 3D points, optionally carrying one symmetric
/// positive-definite 3×3 covariance per point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Vec<Vector3<f64>>,
    covariances: Option<Vec<Matrix3<f64>>>,
}

impl PointCloud {
    pub fn new(points: Vec<Vector3<f64>>) -> Self {
        Self {
            points,
            covariances: None,
        }
    }

    /// Builds a cloud with per-point covariances, checking that counts
    /// match and that each covariance is symmetric with strictly positive
    /// eigenvalues.
    pub fn with_covariances(
        points: Vec<Vector3<f64>>,
        covariances: Vec<Matrix3<f64>>,
    ) -> Result<Self, GeomError> {
        if points.len() != covariances.len() {
            return Err(GeomError::CovarianceCountMismatch);
        }
        for sigma in &covariances {
            validate_covariance(sigma)?;
        }
        Ok(Self {
            points,
            covariances: Some(covariances),
        })
    }

    /// Attaches the same isotropic covariance `sigma²·I` to every point.
    /// `sigma` is clamped to at least `1e-12` to keep the matrix SPD.
    pub fn with_isotropic_covariance(mut self, sigma: f64) -> Self {
        let s = sigma.max(1e-12);
        let cov = Matrix3::identity() * (s * s);
        self.covariances = Some(alloc::vec![cov; self.points.len()]);
        self
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vector3<f64>] {
        &self.points
    }

    pub fn covariances(&self) -> Option<&[Matrix3<f64>]> {
        self.covariances.as_deref()
    }

    pub fn has_covariances(&self) -> bool {
        self.covariances.is_some()
    }

    /// Applies `pose` to every point; covariances transform as `R·Σ·Rᵀ`.
    pub fn transformed(&self, pose: &RigidTransform) -> PointCloud {
        let points = self.points.iter().map(|p| pose.apply(p)).collect();
        let covariances = self.covariances.as_ref().map(|covs| {
            covs.iter()
                .map(|c| pose.rotation * c * pose.rotation.transpose())
                .collect()
        });
        PointCloud {
            points,
            covariances,
        }
    }

    /// Keeps the points (and covariances) at `indices`, in order.
    pub fn select(&self, indices: &[usize]) -> PointCloud {
        let points = indices.iter().map(|&i| self.points[i]).collect();
        let covariances = self
            .covariances
            .as_ref()
            .map(|covs| indices.iter().map(|&i| covs[i]).collect());
        PointCloud {
            points,
            covariances,
        }
    }

    /// Axis-aligned bounding box as `(min, max)`, or `None` when empty.
    pub fn bounding_box(&self) -> Option<(Vector3<f64>, Vector3<f64>)> {
        let first = *self.points.first()?;
        let mut lo = first;
        let mut hi = first;
        for p in &self.points {
            for k in 0..3 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        Some((lo, hi))
    }

    /// Diagonal length of the bounding box (0 for empty clouds).
    pub fn bounding_diagonal(&self) -> f64 {
        self.bounding_box()
            .map(|(lo, hi)| (hi - lo).norm())
            .unwrap_or(0.0)
    }

    /// Replaces the point at `index`, keeping its covariance.
    pub(crate) fn set_point(&mut self, index: usize, p: Vector3<f64>) {
        self.points[index] = p;
    }

    pub(crate) fn set_covariances(&mut self, covariances: Vec<Matrix3<f64>>) {
        debug_assert_eq!(covariances.len(), self.points.len());
        self.covariances = Some(covariances);
    }
}

/// Checks symmetry within `1e-12` and strict positive definiteness.
pub(crate) fn validate_covariance(sigma: &Matrix3<f64>) -> Result<(), GeomError> {
    for i in 0..3 {
        for j in (i + 1)..3 {
            if (sigma[(i, j)] - sigma[(j, i)]).abs() > SYMMETRY_TOL {
                return Err(GeomError::InvalidArgument("covariance not symmetric"));
            }
        }
    }
    let eig = sigma.symmetric_eigen();
    if eig.eigenvalues.iter().any(|&l| l <= 0.0) {
        return Err(GeomError::NotPositiveDefinite);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::rotation_about_axis;
    use approx::assert_abs_diff_eq;

    #[test]
    fn transform_rotates_covariances() {
        // Σ = diag(1,2,3) under a 90° z-rotation permutes the x/y axes.
        let cloud = PointCloud::with_covariances(
            alloc::vec![Vector3::new(1.0, 0.0, 0.0)],
            alloc::vec![Matrix3::from_diagonal(&Vector3::new(1.0, 2.0, 3.0))],
        )
        .unwrap();
        let pose = RigidTransform::new(
            rotation_about_axis(Vector3::z(), core::f64::consts::FRAC_PI_2),
            Vector3::zeros(),
        );
        let out = cloud.transformed(&pose);
        assert_abs_diff_eq!(
            out.points()[0],
            Vector3::new(0.0, 1.0, 0.0),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            out.covariances().unwrap()[0],
            Matrix3::from_diagonal(&Vector3::new(2.0, 1.0, 3.0)),
            epsilon = 1e-12
        );
    }

    #[test]
    fn covariance_count_mismatch_rejected() {
        let res = PointCloud::with_covariances(
            alloc::vec![Vector3::zeros(), Vector3::zeros()],
            alloc::vec![Matrix3::identity()],
        );
        assert_eq!(res, Err(GeomError::CovarianceCountMismatch));
    }

    #[test]
    fn non_spd_covariance_rejected() {
        let res = PointCloud::with_covariances(
            alloc::vec![Vector3::zeros()],
            alloc::vec![Matrix3::from_diagonal(&Vector3::new(1.0, -1.0, 1.0))],
        );
        assert_eq!(res, Err(GeomError::NotPositiveDefinite));
    }

    #[test]
    fn transform_composition_matches() {
        let t1 = RigidTransform::new(
            rotation_about_axis(Vector3::new(0.1, 0.4, 1.0), 0.9),
            Vector3::new(0.5, 0.0, -1.0),
        );
        let t2 = RigidTransform::new(
            rotation_about_axis(Vector3::x(), -0.4),
            Vector3::new(0.0, 2.0, 0.25),
        );
        let cloud = PointCloud::new(alloc::vec![
            Vector3::new(1.0, 2.0, 3.0),
            Vector3::new(-0.5, 0.0, 0.75),
        ]);
        let a = cloud.transformed(&t1).transformed(&t2);
        let b = cloud.transformed(&t2.compose(&t1));
        for (pa, pb) in a.points().iter().zip(b.points()) {
            assert_abs_diff_eq!(pa, pb, epsilon = 1e-9);
        }
    }
}
