//! Discrete curvature: cotangent mean curvature and quadric-fit `|A|²`.

use nalgebra::{DMatrix, DVector, Matrix2};

use super::trimesh::{Point, TriMesh};
use super::MeshError;
use crate::Exec;

/// Symmetric cotangent weights `w_ij = ½(cot α_ij + cot β_ij)` per vertex,
/// so that `∂A/∂x_i = Σ_j w_ij (x_i − x_j)`.
#[derive(Clone, Debug)]
pub struct CotanWeights {
    pub rows: Vec<Vec<(usize, f64)>>,
}

impl CotanWeights {
    pub fn new(mesh: &TriMesh) -> Result<Self, MeshError> {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); mesh.vertex_count()];
        for (t, tri) in mesh.triangles().iter().enumerate() {
            let p = mesh.corners(t);
            for k in 0..3 {
                // Angle at corner k is opposite edge (k+1, k+2).
                let e1 = p[(k + 1) % 3] - p[k];
                let e2 = p[(k + 2) % 3] - p[k];
                let cross = e1.cross(&e2).norm();
                if !(cross > 0.0) {
                    return Err(MeshError::Degenerate {
                        triangle: t,
                        area: 0.5 * cross,
                        min_angle_deg: 0.0,
                    });
                }
                let w = 0.5 * e1.dot(&e2) / cross;
                let (i, j) = (tri[(k + 1) % 3], tri[(k + 2) % 3]);
                add(&mut rows[i], j, w);
                add(&mut rows[j], i, w);
            }
        }
        Ok(Self { rows })
    }

    /// `(L x)_i = Σ_j w_ij (x_i − x_j)`.
    pub fn apply(&self, x: &[Point], exec: Exec) -> Vec<Point> {
        exec.map_range(x.len(), |i| {
            self.rows[i]
                .iter()
                .fold(Point::zeros(), |acc, &(j, w)| acc + (x[i] - x[j]) * w)
        })
    }

    pub fn diagonal(&self, i: usize) -> f64 {
        self.rows[i].iter().map(|(_, w)| w).sum()
    }
}

fn add(row: &mut Vec<(usize, f64)>, j: usize, w: f64) {
    match row.iter_mut().find(|(k, _)| *k == j) {
        Some(e) => e.1 += w,
        None => row.push((j, w)),
    }
}

/// Exact gradient of the total area with respect to every vertex.
pub fn area_gradient(mesh: &TriMesh, exec: Exec) -> Vec<Point> {
    exec.map_range(mesh.vertex_count(), |v| {
        let mut g = Point::zeros();
        for &t in mesh.vertex_faces(v) {
            let tri = mesh.triangles()[t];
            let k = tri.iter().position(|&x| x == v).expect("incident");
            let n = mesh.face_cross(t);
            let len = n.norm();
            if len > 0.0 {
                let (a, b) = (mesh.vertices[tri[(k + 1) % 3]], mesh.vertices[tri[(k + 2) % 3]]);
                g += (a - b).cross(&n) * (0.5 / len);
            }
        }
        g
    })
}

/// Mixed Voronoi areas; obtuse triangles use the barycentric fallback
/// (half the area to the obtuse corner, a quarter to the others).
pub fn mixed_areas(mesh: &TriMesh) -> Vec<f64> {
    let mut out = vec![0.0; mesh.vertex_count()];
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let p = mesh.corners(t);
        let area = mesh.triangle_area(t);
        let dots: [f64; 3] = std::array::from_fn(|k| (p[(k + 1) % 3] - p[k]).dot(&(p[(k + 2) % 3] - p[k])));
        if let Some(obtuse) = dots.iter().position(|&d| d < 0.0) {
            for k in 0..3 {
                out[tri[k]] += if k == obtuse { 0.5 * area } else { 0.25 * area };
            }
            continue;
        }
        let cross = 2.0 * area;
        for k in 0..3 {
            // Corner k gets |e_k,k+1|² cot(k+2) + |e_k,k+2|² cot(k+1), over 8.
            let (a, b) = ((k + 1) % 3, (k + 2) % 3);
            let cot_a = dots[a] / cross;
            let cot_b = dots[b] / cross;
            out[tri[k]] +=
                ((p[a] - p[k]).norm_squared() * cot_b + (p[b] - p[k]).norm_squared() * cot_a) / 8.0;
        }
    }
    out
}

/// Discrete mean curvature at each vertex.
#[derive(Clone, Debug)]
pub struct MeanCurvature {
    /// `∂A/∂x_i` divided by the mixed area: the vector `Hν`. Boundary
    /// vertices keep only the component tangent to the sphere.
    pub vector: Vec<Point>,
    /// `⟨vector, ν⟩` with `ν` the vertex normal.
    pub scalar: Vec<f64>,
}

pub fn discrete_mean_curvature(mesh: &TriMesh, exec: Exec) -> Result<MeanCurvature, MeshError> {
    mesh.check_quality()?;
    let grad = area_gradient(mesh, exec);
    let areas = mixed_areas(mesh);
    let normals = mesh.vertex_normals();
    let vector: Vec<Point> = (0..mesh.vertex_count())
        .map(|v| {
            let g = if mesh.is_boundary(v) {
                tangent_to_sphere(grad[v], mesh.vertices[v])
            } else {
                grad[v]
            };
            g / areas[v]
        })
        .collect();
    let scalar = vector.iter().zip(&normals).map(|(h, n)| h.dot(n)).collect();
    Ok(MeanCurvature { vector, scalar })
}

/// Component of `g` tangent to the sphere through `x`.
pub(crate) fn tangent_to_sphere(g: Point, x: Point) -> Point {
    let r = x.normalize();
    g - r * g.dot(&r)
}

/// Per-vertex `|A|²`; vertices whose neighbourhood cannot support a fit
/// are `None` and listed in `excluded`.
#[derive(Clone, Debug, Default)]
pub struct DiscreteA2 {
    pub values: Vec<Option<f64>>,
    pub excluded: Vec<usize>,
}

impl DiscreteA2 {
    pub fn max(&self) -> f64 {
        self.values.iter().flatten().copied().fold(0.0, f64::max)
    }
}

/// Points needed for the five-parameter quadric fit.
pub const MIN_FIT_POINTS: usize = 6;

fn two_ring(mesh: &TriMesh, v: usize) -> Vec<usize> {
    let mut ring: Vec<usize> = mesh.neighbors(v).to_vec();
    for &w in mesh.neighbors(v) {
        for &u in mesh.neighbors(w) {
            if u != v && !ring.contains(&u) {
                ring.push(u);
            }
        }
    }
    ring
}

/// Local second-order fit at a vertex.
#[derive(Clone, Copy, Debug)]
pub struct QuadricFit {
    /// `|A|²` of the fitted graph at the vertex.
    pub a2: f64,
    /// Unit normal of the fitted graph, on the side of the input normal.
    pub normal: Point,
}

/// Least-squares quadric `w = a u² + b uv + c v² + d u + e v` over the
/// 2-ring in the frame of `normal`, then `|A|² = tr (I⁻¹ II)²` of that graph
/// at the origin. The linear terms absorb the error of the input normal.
pub fn fit_quadric(mesh: &TriMesh, v: usize, normal: &Point) -> Result<QuadricFit, MeshError> {
    let ring = two_ring(mesh, v);
    let insufficient = || MeshError::InsufficientNeighborhood {
        vertex: v,
        points: ring.len(),
    };
    if ring.len() < MIN_FIT_POINTS {
        return Err(insufficient());
    }
    let seed = if normal.x.abs() < 0.9 {
        Point::x()
    } else {
        Point::y()
    };
    let t1 = (seed - normal * normal.dot(&seed)).normalize();
    let t2 = normal.cross(&t1);
    let x0 = mesh.vertices[v];
    // Columns scaled by the neighbourhood size keep the system well conditioned.
    let scale = ring
        .iter()
        .map(|&j| (mesh.vertices[j] - x0).norm())
        .fold(0.0, f64::max);
    let mut a = DMatrix::zeros(ring.len(), 5);
    let mut rhs = DVector::zeros(ring.len());
    for (row, &j) in ring.iter().enumerate() {
        let d = (mesh.vertices[j] - x0) / scale;
        let (u, w, h) = (d.dot(&t1), d.dot(&t2), d.dot(normal));
        a[(row, 0)] = u * u;
        a[(row, 1)] = u * w;
        a[(row, 2)] = w * w;
        a[(row, 3)] = u;
        a[(row, 4)] = w;
        rhs[row] = h;
    }
    let svd = a.svd(true, true);
    if !(svd.singular_values.min() > 1e-10 * svd.singular_values.max()) {
        return Err(insufficient());
    }
    let c = svd.solve(&rhs, 0.0).map_err(|_| insufficient())?;
    // Back to unscaled coordinates: second derivatives pick up 1/scale.
    let hess = Matrix2::new(2.0 * c[0], c[1], c[1], 2.0 * c[2]) / scale;
    let grad = nalgebra::Vector2::new(c[3], c[4]);
    let first = Matrix2::identity() + grad * grad.transpose();
    let second = hess / (1.0 + grad.norm_squared()).sqrt();
    let shape = first.try_inverse().ok_or_else(insufficient)? * second;
    Ok(QuadricFit {
        a2: (shape * shape).trace(),
        normal: (normal - t1 * grad.x - t2 * grad.y).normalize(),
    })
}

pub fn discrete_a2(mesh: &TriMesh, exec: Exec) -> DiscreteA2 {
    let normals = mesh.vertex_normals();
    let fits = exec.map_range(mesh.vertex_count(), |v| {
        fit_quadric(mesh, v, &normals[v]).map(|f| f.a2)
    });
    let mut out = DiscreteA2::default();
    for (v, r) in fits.into_iter().enumerate() {
        match r {
            Ok(x) => out.values.push(Some(x)),
            Err(_) => {
                out.values.push(None);
                out.excluded.push(v);
            }
        }
    }
    out
}
