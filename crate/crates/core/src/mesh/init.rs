//! Structured initial meshes.

use std::f64::consts::PI;

use super::trimesh::{Point, TriMesh};
use super::MeshError;

/// Rings of the structured disk: ring `k` has `6k` vertices (one at `k = 0`).
fn ring_start(k: usize) -> usize {
    if k == 0 {
        0
    } else {
        1 + 3 * k * (k - 1)
    }
}

fn ring_len(k: usize) -> usize {
    if k == 0 {
        1
    } else {
        6 * k
    }
}

/// Vertices `(ρ, φ)` and triangles of the structured unit disk with
/// `resolution` rings: `1 + 3r(r + 1)` vertices, triangles counter-clockwise
/// seen from `+z`. Consecutive rings are zipped by angle.
fn disk_structure(resolution: usize) -> (Vec<(f64, f64)>, Vec<[usize; 3]>) {
    let mut polar = Vec::with_capacity(ring_start(resolution + 1));
    for k in 0..=resolution {
        let n = ring_len(k);
        for j in 0..n {
            polar.push((k as f64 / resolution as f64, 2.0 * PI * j as f64 / n as f64));
        }
    }
    let mut tris = Vec::with_capacity(6 * resolution * resolution);
    for k in 1..=resolution {
        let (s0, n0) = (ring_start(k - 1), ring_len(k - 1));
        let (s1, n1) = (ring_start(k), ring_len(k));
        let (mut i0, mut i1) = (0, 0);
        while i1 < n1 || (n0 > 1 && i0 < n0) {
            // Advance the ring whose next vertex comes first in angle; exact
            // integer comparison of (i1 + 1)/n1 against (i0 + 1)/n0.
            let outer = n0 == 1 || i0 == n0 || (i1 < n1 && (i1 + 1) * n0 <= (i0 + 1) * n1);
            if outer {
                tris.push([s0 + i0 % n0, s1 + i1, s1 + (i1 + 1) % n1]);
                i1 += 1;
            } else {
                tris.push([s0 + i0, s1 + i1 % n1, s0 + (i0 + 1) % n0]);
                i0 += 1;
            }
        }
    }
    (polar, tris)
}

/// Disk lifted as the graph of `height(x, y)`, boundary vertices projected
/// radially onto the unit sphere.
///
/// Fails with [`MeshError::GraphicalityViolation`] when some vertex normal
/// has `⟨ν, e₃⟩ ≤ 0`, naming the worst vertex.
pub fn init_graph_disk<H>(resolution: usize, height: H) -> Result<TriMesh, MeshError>
where
    H: Fn(f64, f64) -> f64,
{
    if resolution == 0 {
        return Err(MeshError::InvalidParameter("resolution must be positive".into()));
    }
    let (polar, tris) = disk_structure(resolution);
    let boundary_from = ring_start(resolution);
    let vertices = polar
        .iter()
        .enumerate()
        .map(|(i, &(r, phi))| {
            let (x, y) = (r * phi.cos(), r * phi.sin());
            let p = Point::new(x, y, height(x, y));
            if i >= boundary_from {
                p.normalize()
            } else {
                p
            }
        })
        .collect::<Vec<_>>();
    if let Some(i) = vertices.iter().position(|p| !p.iter().all(|c| c.is_finite())) {
        return Err(MeshError::InvalidParameter(format!(
            "height is not finite at vertex {i}"
        )));
    }
    let mesh = TriMesh::new(vertices, tris)?;
    let normals = mesh.vertex_normals();
    let (worst, s) = normals
        .iter()
        .enumerate()
        .map(|(i, n)| (i, n.z))
        .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    if !(s > 0.0) {
        return Err(MeshError::GraphicalityViolation {
            vertex: worst,
            position: mesh.vertices[worst].into(),
            s,
        });
    }
    Ok(mesh)
}

/// Flat equatorial disk.
pub fn flat_disk(resolution: usize) -> Result<TriMesh, MeshError> {
    init_graph_disk(resolution, |_, _| 0.0)
}

/// Cap of the unit sphere around the north pole with polar radius
/// `polar_angle`, on the structured disk connectivity. Outward normal.
pub fn sphere_patch(resolution: usize, polar_angle: f64) -> Result<TriMesh, MeshError> {
    if resolution == 0 || !(polar_angle > 0.0 && polar_angle < PI) {
        return Err(MeshError::InvalidParameter(
            "sphere patch needs resolution > 0 and polar angle in (0, π)".into(),
        ));
    }
    let (polar, tris) = disk_structure(resolution);
    let vertices = polar
        .iter()
        .map(|&(r, phi)| {
            let th = r * polar_angle;
            Point::new(th.sin() * phi.cos(), th.sin() * phi.sin(), th.cos())
        })
        .collect();
    TriMesh::new(vertices, tris)
}

/// Half-height at which the catenoid with neck radius `a` leaves the unit
/// ball: the root of `a² cosh²(z/a) + z² = 1`.
pub fn catenoid_half_height(a: f64) -> Result<f64, MeshError> {
    let f = |z: f64| (a * (z / a).cosh()).powi(2) + z * z - 1.0;
    if !(a > 0.0 && a < 1.0) {
        return Err(MeshError::InvalidParameter(format!(
            "neck radius {a} outside (0, 1)"
        )));
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > 1e-16 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Catenoid `ρ = a cosh(z/a)` with neck radius `a`, cut by the unit sphere,
/// on a structured annulus: `4r` vertices around, `r + 1` circles along the
/// axis (uniform in `z`), diagonals alternating. Normal points away from
/// the axis at the waist.
///
/// With `a` equal to the critical scale this samples the critical catenoid;
/// other values give an annulus with the same topology whose boundary lies
/// on the sphere but meets it at an angle.
pub fn catenoid_annulus(resolution: usize, neck: f64) -> Result<TriMesh, MeshError> {
    if resolution < 2 {
        return Err(MeshError::InvalidParameter(
            "annulus resolution must be at least 2".into(),
        ));
    }
    let zmax = catenoid_half_height(neck)?;
    let around = 4 * resolution;
    let along = resolution;
    let mut vertices = Vec::with_capacity(around * (along + 1));
    for i in 0..=along {
        let z = zmax * (2.0 * i as f64 / along as f64 - 1.0);
        let rho = neck * (z / neck).cosh();
        for j in 0..around {
            let phi = 2.0 * PI * j as f64 / around as f64;
            let p = Point::new(rho * phi.cos(), rho * phi.sin(), z);
            vertices.push(if i == 0 || i == along { p.normalize() } else { p });
        }
    }
    let id = |i: usize, j: usize| i * around + j % around;
    let mut tris = Vec::with_capacity(2 * around * along);
    for i in 0..along {
        for j in 0..around {
            let (a, b, c, d) = (id(i, j), id(i, j + 1), id(i + 1, j + 1), id(i + 1, j));
            if (i + j) % 2 == 0 {
                tris.push([a, b, c]);
                tris.push([a, c, d]);
            } else {
                tris.push([a, b, d]);
                tris.push([b, c, d]);
            }
        }
    }
    TriMesh::new(vertices, tris)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_counts_and_topology() {
        for r in [1, 2, 5, 32] {
            let m = flat_disk(r).unwrap();
            assert_eq!(m.vertex_count(), 1 + 3 * r * (r + 1));
            assert_eq!(m.triangles().len(), 6 * r * r);
            assert_eq!(m.boundary_vertices().len(), 6 * r);
            assert_eq!(m.euler_characteristic(), 1);
            m.check_quality().unwrap();
        }
        assert_eq!(flat_disk(64).unwrap().vertex_count(), 12481);
    }

    #[test]
    fn annulus_topology() {
        let m = catenoid_annulus(8, 0.46).unwrap();
        assert_eq!(m.euler_characteristic(), 0);
        assert_eq!(m.boundary_loops().len(), 2);
        assert!(m.boundary_sphere_residual() < 1e-15);
    }

    #[test]
    fn steep_graph_passes_and_folded_projection_fails() {
        init_graph_disk(16, |x, y| 5.0 * (1.0 - x * x - y * y)).unwrap();
        // Projecting a boundary at height 50 pulls it inside the next ring.
        match init_graph_disk(16, |_, _| 50.0) {
            Err(MeshError::GraphicalityViolation { s, .. }) => assert!(s <= 0.0),
            other => panic!("expected a graphicality violation, got {other:?}"),
        }
    }
}
