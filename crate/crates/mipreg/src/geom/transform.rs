//! Rigid transforms and rotation utilities.

use super::GeomError;
use alloc::vec::Vec;
use nalgebra::{Matrix3, Unit, Vector3};
#[allow(unused_imports)]
use num_traits::Float;

const ROTATION_TOL: f64 = 1e-9;

/// A rigid transform `x ↦ R·x + t` mapping sensor coordinates into the
/// model frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidTransform {
    pub rotation: Matrix3<f64>,
    pub translation: Vector3<f64>,
}

impl RigidTransform {
    pub fn identity() -> Self {
        Self {
            rotation: Matrix3::identity(),
            translation: Vector3::zeros(),
        }
    }

    pub fn new(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Self {
        Self {
            rotation,
            translation,
        }
    }

    /// Checks the rotation invariants: `RᵀR = I` and `det R = 1`, each
    /// within `tol` per entry.
    pub fn validate_rotation(rotation: &Matrix3<f64>, tol: f64) -> Result<(), GeomError> {
        let gram = rotation.transpose() * rotation;
        let mut max_dev: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let target = if i == j { 1.0 } else { 0.0 };
                max_dev = max_dev.max((gram[(i, j)] - target).abs());
            }
        }
        max_dev = max_dev.max((rotation.determinant() - 1.0).abs());
        if max_dev > tol {
            return Err(GeomError::NotARotation);
        }
        Ok(())
    }

    /// Checks this transform's invariants at the construction tolerance.
    pub fn validate(&self) -> Result<(), GeomError> {
        Self::validate_rotation(&self.rotation, ROTATION_TOL)
    }

    pub fn apply(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * p + self.translation
    }

    /// `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &RigidTransform) -> RigidTransform {
        RigidTransform {
            rotation: self.rotation * other.rotation,
            translation: self.rotation * other.translation + self.translation,
        }
    }

    pub fn inverse(&self) -> RigidTransform {
        let rt = self.rotation.transpose();
        RigidTransform {
            rotation: rt,
            translation: -(rt * self.translation),
        }
    }

    /// Builds the sensor→model pose from the model→sensor parts
    /// `(R′, t′)`: `R = R′ᵀ`, `t = −R′ᵀ·t′`.
    ///
    /// The solver estimates the pose that moves model points onto the
    /// sensor cloud; this converts its output back to the registration
    /// convention. Fails with [`GeomError::NotARotation`] if `R′` violates
    /// the rotation invariants beyond `1e-6`.
    pub fn from_inverse_parts(
        r_prime: Matrix3<f64>,
        t_prime: Vector3<f64>,
    ) -> Result<Self, GeomError> {
        Self::validate_rotation(&r_prime, 1e-6)?;
        let r = r_prime.transpose();
        Ok(Self {
            rotation: r,
            translation: -(r * t_prime),
        })
    }

    /// Inverse of [`RigidTransform::from_inverse_parts`]: the
    /// model→sensor parts `(R′, t′) = (Rᵀ, −Rᵀ·t)` of this pose.
    pub fn to_inverse_parts(&self) -> (Matrix3<f64>, Vector3<f64>) {
        let r_prime = self.rotation.transpose();
        (r_prime, -(r_prime * self.translation))
    }

    /// Rotation angle of this transform in degrees.
    pub fn rotation_angle_deg(&self) -> f64 {
        let c = ((self.rotation.trace() - 1.0) / 2.0).clamp(-1.0, 1.0);
        c.acos().to_degrees()
    }
}

/// Rotation by `angle_rad` about `axis` (normalized internally).
pub fn rotation_about_axis(axis: Vector3<f64>, angle_rad: f64) -> Matrix3<f64> {
    let unit = Unit::new_normalize(axis);
    *nalgebra::Rotation3::from_axis_angle(&unit, angle_rad).matrix()
}

/// Nearest rotation to `m` in Frobenius norm: the orthogonal polar factor
/// with determinant +1. If the polar factor reflects, the axis of least
/// singular value is flipped.
pub fn project_to_so3(m: &Matrix3<f64>) -> Result<Matrix3<f64>, GeomError> {
    let svd = m.svd(true, true);
    let u = svd.u.ok_or(GeomError::Singular)?;
    let v_t = svd.v_t.ok_or(GeomError::Singular)?;
    let sigma = svd.singular_values;
    if sigma[2].abs() < 1e-12 {
        return Err(GeomError::Singular);
    }
    let mut d = Vector3::new(1.0, 1.0, 1.0);
    if (u * v_t).determinant() < 0.0 {
        // nalgebra orders singular values descending; index 2 is least.
        d[2] = -1.0;
    }
    Ok(u * Matrix3::from_diagonal(&d) * v_t)
}

/// Deterministic list of rotations used by sampling-based tests.
pub fn rotation_grid(samples_per_axis: usize) -> Vec<Matrix3<f64>> {
    let mut out = Vec::new();
    let n = samples_per_axis.max(1);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let a = core::f64::consts::PI * (2.0 * i as f64 / n as f64 - 1.0);
                let b = core::f64::consts::PI * (j as f64 / n as f64 - 0.5);
                let c = core::f64::consts::PI * (2.0 * k as f64 / n as f64 - 1.0);
                let r = rotation_about_axis(Vector3::z(), a)
                    * rotation_about_axis(Vector3::y(), b)
                    * rotation_about_axis(Vector3::x(), c);
                out.push(r);
            }
        }
    }
    out
}
