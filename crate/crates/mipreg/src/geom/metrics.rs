//! Registration error metrics.

use super::{PointCloud, RigidTransform};
#[allow(unused_imports)]
use num_traits::Float;

/// Errors of an estimated pose against ground truth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegistrationMetrics {
    /// Geodesic rotation error in degrees (0..=180).
    pub rotation_error_deg: f64,
    /// `‖t_est − t_gt‖₂` in model units.
    pub translation_error: f64,
    /// Target registration error: mean distance between estimated and
    /// ground-truth placements of the sensor points.
    pub tre: f64,
    /// Objective value carried through from the producing solve.
    pub objective: f64,
}

/// Computes rotation, translation and target registration errors.
///
/// The rotation error is the geodesic angle
/// `arccos(clamp((trace(R_estᵀ·R_gt) − 1)/2, −1, 1))` in degrees.
pub fn metrics(
    estimated: &RigidTransform,
    ground_truth: &RigidTransform,
    sensor: &PointCloud,
    objective: f64,
) -> RegistrationMetrics {
    let rel = estimated.rotation.transpose() * ground_truth.rotation;
    let c = ((rel.trace() - 1.0) / 2.0).clamp(-1.0, 1.0);
    let rotation_error_deg = c.acos().to_degrees();
    let translation_error = (estimated.translation - ground_truth.translation).norm();
    let tre = if sensor.is_empty() {
        0.0
    } else {
        sensor
            .points()
            .iter()
            .map(|s| (estimated.apply(s) - ground_truth.apply(s)).norm())
            .sum::<f64>()
            / sensor.len() as f64
    };
    RegistrationMetrics {
        rotation_error_deg,
        translation_error,
        tre,
        objective,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::rotation_about_axis;
    use alloc::vec::Vec;
    use approx::assert_abs_diff_eq;
    use nalgebra::Vector3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn demo_cloud(n: usize) -> PointCloud {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        PointCloud::new(
            (0..n)
                .map(|_| Vector3::new(rng.gen(), rng.gen(), rng.gen()))
                .collect(),
        )
    }

    #[test]
    fn identical_poses_have_zero_error() {
        let pose = RigidTransform::new(
            rotation_about_axis(Vector3::new(1.0, 0.3, 0.2), 0.5),
            Vector3::new(0.1, 0.2, 0.3),
        );
        let m = metrics(&pose, &pose, &demo_cloud(10), 0.0);
        assert_abs_diff_eq!(m.rotation_error_deg, 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(m.translation_error, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.tre, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn one_degree_offset_measures_one_degree() {
        let gt = RigidTransform::new(
            rotation_about_axis(Vector3::new(0.4, -0.2, 1.0), 0.8),
            Vector3::new(1.0, -1.0, 0.5),
        );
        let est = RigidTransform::new(
            rotation_about_axis(Vector3::z(), 1.0_f64.to_radians()) * gt.rotation,
            gt.translation,
        );
        let m = metrics(&est, &gt, &demo_cloud(5), 0.0);
        assert_abs_diff_eq!(m.rotation_error_deg, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn pure_translation_offset_equals_tre() {
        let gt = RigidTransform::identity();
        let est = RigidTransform::new(nalgebra::Matrix3::identity(), Vector3::new(0.1, 0.0, 0.0));
        let m = metrics(&est, &gt, &demo_cloud(25), 0.0);
        assert_abs_diff_eq!(m.translation_error, 0.1, epsilon = 1e-12);
        assert_abs_diff_eq!(m.tre, 0.1, epsilon = 1e-12);
    }

    #[test]
    fn left_composition_invariance() {
        // Applying a common rigid transform to both poses leaves the
        // rotation error and TRE unchanged.
        let gt = RigidTransform::new(
            rotation_about_axis(Vector3::new(0.3, 0.8, -0.1), 0.7),
            Vector3::new(0.4, 0.0, -0.2),
        );
        let est = RigidTransform::new(
            rotation_about_axis(Vector3::new(-0.2, 0.5, 0.9), 0.65),
            Vector3::new(0.35, 0.05, -0.25),
        );
        let common = RigidTransform::new(
            rotation_about_axis(Vector3::new(1.0, 1.0, 0.0), 1.2),
            Vector3::new(-2.0, 0.3, 0.8),
        );
        let cloud = demo_cloud(40);
        let base = metrics(&est, &gt, &cloud, 0.0);
        let moved = metrics(&common.compose(&est), &common.compose(&gt), &cloud, 0.0);
        assert_abs_diff_eq!(
            base.rotation_error_deg,
            moved.rotation_error_deg,
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(base.tre, moved.tre, epsilon = 1e-9);
    }

    proptest::proptest! {
        #[test]
        fn rotation_error_is_bounded(angle in 0.0..core::f64::consts::PI,
                                     ax in -1.0..1.0f64, ay in -1.0..1.0f64) {
            let axis = Vector3::new(ax, ay, 0.7);
            let gt = RigidTransform::identity();
            let est = RigidTransform::new(rotation_about_axis(axis, angle), Vector3::zeros());
            let m = metrics(&est, &gt, &PointCloud::new(Vec::new()), 0.0);
            proptest::prop_assert!(m.rotation_error_deg >= 0.0);
            proptest::prop_assert!(m.rotation_error_deg <= 180.0 + 1e-9);
        }
    }
}
