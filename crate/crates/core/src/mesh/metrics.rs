use nalgebra::{Matrix3, SymmetricEigen};
use serde::Serialize;

use super::curvature::{discrete_a2, fit_quadric};
use super::trimesh::{Point, TriMesh};
use crate::Exec;

/// `|2·area − boundary length| / boundary length`.
pub fn discrete_isoperimetric_residual(mesh: &TriMesh) -> f64 {
    let l = mesh.boundary_length();
    (2.0 * mesh.area() - l).abs() / l
}

/// Largest `|⟨ν, x/|x|⟩|` over boundary vertices: zero when the mesh meets
/// the sphere orthogonally.
///
/// `ν` comes from the quadric fit, which stays second-order accurate on the
/// one-sided boundary neighbourhood where averaged face normals are only
/// first-order; the averaged normal is the fallback if the fit fails.
pub fn boundary_orthogonality(mesh: &TriMesh) -> f64 {
    let normals = mesh.vertex_normals();
    mesh.boundary_vertices()
        .iter()
        .map(|&b| {
            let n = fit_quadric(mesh, b, &normals[b]).map_or(normals[b], |f| f.normal);
            n.dot(&mesh.vertices[b].normalize()).abs()
        })
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlatnessMetrics {
    /// Largest distance of a vertex from the least-squares plane through
    /// the origin.
    pub plane_deviation: f64,
    /// Unit normal of that plane.
    pub plane_normal: [f64; 3],
    /// Largest discrete `|A|²` over vertices that admit a fit.
    pub max_a2: f64,
    /// Vertices excluded from `max_a2`.
    pub a2_excluded: Vec<usize>,
    /// Smallest `⟨ν, e₃⟩` over vertex normals.
    pub min_s_e3: f64,
}

pub fn flatness_metrics(mesh: &TriMesh, exec: Exec) -> FlatnessMetrics {
    let scatter = mesh
        .vertices
        .iter()
        .fold(Matrix3::zeros(), |acc, x| acc + x * x.transpose());
    let eig = SymmetricEigen::new(scatter);
    let k = eig.eigenvalues.imin();
    let normal: Point = eig.eigenvectors.column(k).into_owned();
    let plane_deviation = mesh
        .vertices
        .iter()
        .map(|x| x.dot(&normal).abs())
        .fold(0.0, f64::max);
    let a2 = discrete_a2(mesh, exec);
    let min_s_e3 = mesh
        .vertex_normals()
        .iter()
        .map(|n| n.z)
        .fold(f64::INFINITY, f64::min);
    FlatnessMetrics {
        plane_deviation,
        plane_normal: normal.into(),
        max_a2: a2.max(),
        a2_excluded: a2.excluded,
        min_s_e3,
    }
}
