//! Synthetic-data generation: random poses, Gaussian noise, outliers.

use super::{GeomError, PointCloud, RigidTransform};
use alloc::vec::Vec;
use nalgebra::Vector3;
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};

fn unit_vector(rng: &mut ChaCha8Rng) -> Vector3<f64> {
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    loop {
        let v = Vector3::new(normal.sample(rng), normal.sample(rng), normal.sample(rng));
        let n = v.norm();
        if n > 1e-9 {
            return v / n;
        }
    }
}

/// A random rigid transform with rotation angle at most `max_angle_deg`
/// (axis uniform on the sphere) and translation inside the ball of radius
/// `max_translation`. Deterministic for a fixed seed.
pub fn random_rigid_transform(
    seed: u64,
    max_angle_deg: f64,
    max_translation: f64,
) -> Result<RigidTransform, GeomError> {
    if !(0.0..=180.0).contains(&max_angle_deg) {
        return Err(GeomError::InvalidArgument("max_angle_deg must be in [0, 180]"));
    }
    if max_translation < 0.0 {
        return Err(GeomError::InvalidArgument("max_translation must be >= 0"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let axis = unit_vector(&mut rng);
    let angle = rng.gen::<f64>() * max_angle_deg.to_radians();
    let rotation = super::rotation_about_axis(axis, angle);
    let dir = unit_vector(&mut rng);
    // Cube-root radius sampling gives a uniform draw over the ball.
    let radius = max_translation * rng.gen::<f64>().cbrt();
    Ok(RigidTransform::new(rotation, dir * radius))
}

/// Adds isotropic Gaussian noise `N(0, sigma²)` to every coordinate and
/// records `max(sigma, 1e-12)²·I` as the per-point covariance so
/// downstream Mahalanobis weighting never has to guess.
pub fn add_gaussian_noise(
    cloud: &PointCloud,
    sigma: f64,
    seed: u64,
) -> Result<PointCloud, GeomError> {
    if sigma < 0.0 {
        return Err(GeomError::InvalidArgument("sigma must be >= 0"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = cloud.clone();
    if sigma > 0.0 {
        let normal = Normal::new(0.0, sigma).expect("valid sigma");
        for i in 0..out.len() {
            let p = out.points()[i];
            let d = Vector3::new(normal.sample(&mut rng), normal.sample(&mut rng), normal.sample(&mut rng));
            out.set_point(i, p + d);
        }
    }
    Ok(out.with_isotropic_covariance(sigma))
}

/// Replaces `⌈fraction·n⌉` points with uniform samples from the cloud's
/// bounding box scaled by `bbox_scale` about its center. Returns the new
/// cloud and the sorted ground-truth outlier indices.
pub fn inject_outliers(
    cloud: &PointCloud,
    fraction: f64,
    bbox_scale: f64,
    seed: u64,
) -> Result<(PointCloud, Vec<usize>), GeomError> {
    if !(0.0..=0.9).contains(&fraction) {
        return Err(GeomError::InvalidArgument("fraction must be in [0, 0.9]"));
    }
    if bbox_scale <= 0.0 {
        return Err(GeomError::InvalidArgument("bbox_scale must be > 0"));
    }
    let n = cloud.len();
    let count = (fraction * n as f64).ceil() as usize;
    if count == 0 {
        return Ok((cloud.clone(), Vec::new()));
    }
    let (lo, hi) = cloud
        .bounding_box()
        .ok_or(GeomError::InvalidArgument("cloud is empty"))?;
    let center = (lo + hi) * 0.5;
    let half = (hi - lo) * 0.5 * bbox_scale;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Partial Fisher-Yates: the first `count` entries are a uniform draw
    // without replacement.
    let mut indices: Vec<usize> = (0..n).collect();
    for i in 0..count {
        let j = Uniform::new(i, n).sample(&mut rng);
        indices.swap(i, j);
    }
    let mut chosen: Vec<usize> = indices[..count].to_vec();
    chosen.sort_unstable();

    let mut out = cloud.clone();
    for &idx in &chosen {
        let p = Vector3::new(
            center[0] + half[0] * (2.0 * rng.gen::<f64>() - 1.0),
            center[1] + half[1] * (2.0 * rng.gen::<f64>() - 1.0),
            center[2] + half[2] * (2.0 * rng.gen::<f64>() - 1.0),
        );
        out.set_point(idx, p);
    }
    Ok((out, chosen))
}
