//! Triangle meshes and uniform surface sampling.

use super::{GeomError, PointCloud};
use alloc::vec::Vec;
use nalgebra::Vector3;
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A triangle mesh. Degenerate (zero-area) faces are dropped at
/// construction; the drop count is reported alongside the mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    vertices: Vec<Vector3<f64>>,
    faces: Vec<[usize; 3]>,
}

impl TriangleMesh {
    /// Validates face indices, drops zero-area faces, and returns the
    /// mesh together with the number of dropped faces.
    pub fn new(
        vertices: Vec<Vector3<f64>>,
        faces: Vec<[usize; 3]>,
    ) -> Result<(Self, usize), GeomError> {
        let mut kept = Vec::with_capacity(faces.len());
        let mut dropped = 0usize;
        for (idx, face) in faces.iter().enumerate() {
            let [a, b, c] = *face;
            if a >= vertices.len() || b >= vertices.len() || c >= vertices.len() {
                return Err(GeomError::InvalidFace { face: idx });
            }
            if a == b || b == c || a == c {
                return Err(GeomError::InvalidFace { face: idx });
            }
            let area2 = (vertices[b] - vertices[a])
                .cross(&(vertices[c] - vertices[a]))
                .norm();
            if area2 <= f64::EPSILON {
                dropped += 1;
            } else {
                kept.push(*face);
            }
        }
        if kept.is_empty() {
            return Err(GeomError::EmptyMesh);
        }
        Ok((
            Self {
                vertices,
                faces: kept,
            },
            dropped,
        ))
    }

    pub fn vertices(&self) -> &[Vector3<f64>] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn face_corners(&self, face: usize) -> [Vector3<f64>; 3] {
        let [a, b, c] = self.faces[face];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }
}

/// Draws `per_face` points uniformly from each triangle of `mesh`.
///
/// Sampling uses the folded-barycentric trick, so every emitted point has
/// nonnegative barycentric coordinates; output is deterministic for a
/// fixed seed and ordered face-major.
pub fn sample_mesh_points(
    mesh: &TriangleMesh,
    per_face: usize,
    seed: u64,
) -> Result<PointCloud, GeomError> {
    if mesh.faces.is_empty() {
        return Err(GeomError::EmptyMesh);
    }
    if per_face == 0 || per_face > 100 {
        return Err(GeomError::InvalidArgument("per_face must be in 1..=100"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(mesh.faces.len() * per_face);
    for face in 0..mesh.faces.len() {
        let [a, b, c] = mesh.face_corners(face);
        for _ in 0..per_face {
            let mut u: f64 = rng.gen();
            let mut v: f64 = rng.gen();
            if u + v > 1.0 {
                u = 1.0 - u;
                v = 1.0 - v;
            }
            points.push(a + u * (b - a) + v * (c - a));
        }
    }
    Ok(PointCloud::new(points))
}
