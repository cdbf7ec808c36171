//! Covariance factorization and local covariance estimation.

use super::{cloud::validate_covariance, GeomError, PointCloud};
use alloc::vec::Vec;
use nalgebra::{Matrix3, Vector3};
#[allow(unused_imports)]
use num_traits::Float;

/// Lower Cholesky factor `B` of an SPD matrix: `B·Bᵀ = sigma` with a
/// strictly positive diagonal.
///
/// Fails with [`GeomError::NotPositiveDefinite`] if a pivot is not
/// strictly positive.
pub fn cholesky_lower(sigma: &Matrix3<f64>) -> Result<Matrix3<f64>, GeomError> {
    let mut b = Matrix3::zeros();
    for j in 0..3 {
        let mut diag = sigma[(j, j)];
        for k in 0..j {
            diag -= b[(j, k)] * b[(j, k)];
        }
        if diag <= 0.0 {
            return Err(GeomError::NotPositiveDefinite);
        }
        b[(j, j)] = diag.sqrt();
        for i in (j + 1)..3 {
            let mut v = sigma[(i, j)];
            for k in 0..j {
                v -= b[(i, k)] * b[(j, k)];
            }
            b[(i, j)] = v / b[(j, j)];
        }
    }
    Ok(b)
}

/// Mahalanobis weight factor for a covariance: the lower Cholesky factor
/// `B` of `sigma⁻¹`, so that `‖Bᵀ·d‖₂² = dᵀ·sigma⁻¹·d`.
pub fn mahalanobis_weight(sigma: &Matrix3<f64>) -> Result<Matrix3<f64>, GeomError> {
    // Factor first so a non-SPD input fails loudly instead of silently
    // producing a garbage inverse.
    cholesky_lower(sigma)?;
    let inv = sigma.try_inverse().ok_or(GeomError::Singular)?;
    // Symmetrize: try_inverse can leave ~1e-16 asymmetry.
    let inv = (inv + inv.transpose()) * 0.5;
    cholesky_lower(&inv)
}

/// Result of [`estimate_local_covariances`]: the annotated cloud plus the
/// number of neighborhoods that fell back to an isotropic covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceEstimate {
    pub cloud: PointCloud,
    pub degenerate_count: usize,
}

/// Assigns each point a covariance from PCA over its `k_neighbors`
/// nearest neighbors: `normal_variance` along the least-variance
/// eigenvector (the local surface normal) and `tangent_variance` in the
/// orthogonal plane.
///
/// Rank-deficient neighborhoods (collinear or coincident) fall back to
/// `tangent_variance·I` and are counted in the result.
pub fn estimate_local_covariances(
    cloud: &PointCloud,
    k_neighbors: usize,
    normal_variance: f64,
    tangent_variance: f64,
) -> Result<CovarianceEstimate, GeomError> {
    if k_neighbors < 3 {
        return Err(GeomError::InvalidArgument("k_neighbors must be >= 3"));
    }
    if cloud.len() <= k_neighbors {
        return Err(GeomError::InvalidArgument(
            "cloud must have more points than k_neighbors",
        ));
    }
    if !(normal_variance <= tangent_variance) {
        return Err(GeomError::InvalidArgument(
            "normal_variance must not exceed tangent_variance",
        ));
    }
    let n_var = normal_variance.max(1e-12);
    let t_var = tangent_variance.max(1e-12);

    let points = cloud.points();
    let mut covariances = Vec::with_capacity(points.len());
    let mut degenerate = 0usize;
    let mut order: Vec<usize> = Vec::new();
    for (i, p) in points.iter().enumerate() {
        order.clear();
        order.extend((0..points.len()).filter(|&j| j != i));
        order.sort_by(|&a, &b| {
            let da = (points[a] - p).norm_squared();
            let db = (points[b] - p).norm_squared();
            da.total_cmp(&db).then(a.cmp(&b))
        });
        let neighbors = &order[..k_neighbors];

        let mut mean = Vector3::zeros();
        for &j in neighbors {
            mean += points[j];
        }
        mean /= k_neighbors as f64;
        let mut scatter = Matrix3::zeros();
        for &j in neighbors {
            let d = points[j] - mean;
            scatter += d * d.transpose();
        }
        scatter /= k_neighbors as f64;

        let eig = scatter.symmetric_eigen();
        // Deterministic ascending eigenvalue order, index as tiebreak.
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
        let largest = eig.eigenvalues[idx[2]];
        let middle = eig.eigenvalues[idx[1]];
        if largest <= 0.0 || middle <= 1e-9 * largest {
            // rank < 2: no well-defined tangent plane
            degenerate += 1;
            covariances.push(Matrix3::identity() * t_var);
            continue;
        }
        let normal = eig.eigenvectors.column(idx[0]).into_owned();
        let nnt = normal * normal.transpose();
        let cov = nnt * n_var + (Matrix3::identity() - nnt) * t_var;
        // Guard against asymmetry from the eigenvector products.
        let cov = (cov + cov.transpose()) * 0.5;
        debug_assert!(validate_covariance(&cov).is_ok());
        covariances.push(cov);
    }

    let mut out = cloud.clone();
    out.set_covariances(covariances);
    Ok(CovarianceEstimate {
        cloud: out,
        degenerate_count: degenerate,
    })
}
