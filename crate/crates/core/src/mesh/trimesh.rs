use std::collections::HashMap;
use std::fmt::Write as _;

use nalgebra::Vector3;

use super::MeshError;

pub type Point = Vector3<f64>;

/// Smallest interior angle accepted by [`TriMesh::check_quality`], in degrees.
pub const MIN_ANGLE_DEG: f64 = 1.0;
/// Smallest triangle area accepted by [`TriMesh::check_quality`].
pub const MIN_AREA: f64 = 1e-12;

/// Oriented triangle mesh of a compact surface with boundary.
///
/// Construction validates the topology: every edge borders one or two
/// triangles with opposite orientations, and the boundary edges form closed
/// loops. The connectivity is fixed afterwards; only positions move.
#[derive(Clone, Debug, PartialEq)]
pub struct TriMesh {
    pub vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    boundary: Vec<usize>,
    is_boundary: Vec<bool>,
    loops: Vec<Vec<usize>>,
    vertex_faces: Vec<Vec<usize>>,
    neighbors: Vec<Vec<usize>>,
}

impl TriMesh {
    pub fn new(vertices: Vec<Point>, triangles: Vec<[usize; 3]>) -> Result<Self, MeshError> {
        let nv = vertices.len();
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for (t, tri) in triangles.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                if a >= nv || a == b {
                    return Err(MeshError::Topology(format!(
                        "triangle {t} has invalid indices {tri:?}"
                    )));
                }
                if directed.insert((a, b), t).is_some() {
                    return Err(MeshError::Topology(format!(
                        "directed edge ({a}, {b}) appears twice: non-manifold or inconsistently oriented"
                    )));
                }
            }
        }
        // Boundary edges: directed edges without a twin.
        let mut next: HashMap<usize, usize> = HashMap::new();
        for &(a, b) in directed.keys() {
            if !directed.contains_key(&(b, a)) && next.insert(a, b).is_some() {
                return Err(MeshError::Topology(format!(
                    "vertex {a} starts two boundary edges"
                )));
            }
        }
        let mut is_boundary = vec![false; nv];
        for &a in next.keys() {
            is_boundary[a] = true;
        }
        let mut loops = Vec::new();
        let mut seen = vec![false; nv];
        let mut starts: Vec<usize> = next.keys().copied().collect();
        starts.sort_unstable();
        for s in starts {
            if seen[s] {
                continue;
            }
            let mut lp = vec![s];
            seen[s] = true;
            let mut v = next[&s];
            while v != s {
                if seen[v] {
                    return Err(MeshError::Topology(format!(
                        "boundary through vertex {v} is not a simple loop"
                    )));
                }
                let Some(&w) = next.get(&v) else {
                    return Err(MeshError::Topology(format!("boundary is open at vertex {v}")));
                };
                seen[v] = true;
                lp.push(v);
                v = w;
            }
            loops.push(lp);
        }

        let mut vertex_faces = vec![Vec::new(); nv];
        let mut neighbors = vec![Vec::new(); nv];
        for (t, tri) in triangles.iter().enumerate() {
            for k in 0..3 {
                vertex_faces[tri[k]].push(t);
                for d in [1, 2] {
                    let j = tri[(k + d) % 3];
                    if !neighbors[tri[k]].contains(&j) {
                        neighbors[tri[k]].push(j);
                    }
                }
            }
        }
        if let Some(v) = vertex_faces.iter().position(Vec::is_empty) {
            return Err(MeshError::Topology(format!("vertex {v} belongs to no triangle")));
        }
        let boundary = (0..nv).filter(|&v| is_boundary[v]).collect();
        Ok(Self {
            vertices,
            triangles,
            boundary,
            is_boundary,
            loops,
            vertex_faces,
            neighbors,
        })
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// Boundary vertex indices in increasing order.
    pub fn boundary_vertices(&self) -> &[usize] {
        &self.boundary
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.is_boundary[v]
    }

    /// Boundary loops, each traversed with the surface on its left.
    pub fn boundary_loops(&self) -> &[Vec<usize>] {
        &self.loops
    }

    pub fn vertex_faces(&self, v: usize) -> &[usize] {
        &self.vertex_faces[v]
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// `V − E + F`.
    pub fn euler_characteristic(&self) -> i64 {
        let interior_edges = (3 * self.triangles.len() - self.boundary.len()) / 2;
        let edges = interior_edges + self.boundary.len();
        self.vertices.len() as i64 - edges as i64 + self.triangles.len() as i64
    }

    pub fn corners(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    /// `(x_b − x_a) × (x_c − x_a)`: twice the area times the unit normal.
    pub fn face_cross(&self, t: usize) -> Point {
        let [a, b, c] = self.corners(t);
        (b - a).cross(&(c - a))
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        0.5 * self.face_cross(t).norm()
    }

    pub fn area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    pub fn boundary_length(&self) -> f64 {
        self.loops
            .iter()
            .map(|lp| {
                (0..lp.len())
                    .map(|k| (self.vertices[lp[(k + 1) % lp.len()]] - self.vertices[lp[k]]).norm())
                    .sum::<f64>()
            })
            .sum()
    }

    /// Unit vertex normals: incident face normals weighted by the corner angle.
    pub fn vertex_normals(&self) -> Vec<Point> {
        (0..self.vertices.len())
            .map(|v| {
                let mut acc = Point::zeros();
                for &t in &self.vertex_faces[v] {
                    let tri = self.triangles[t];
                    let k = tri.iter().position(|&x| x == v).expect("incident");
                    let p = self.vertices[v];
                    let e1 = self.vertices[tri[(k + 1) % 3]] - p;
                    let e2 = self.vertices[tri[(k + 2) % 3]] - p;
                    let n = e1.cross(&e2);
                    let angle = n.norm().atan2(e1.dot(&e2));
                    acc += n.normalize() * angle;
                }
                acc.normalize()
            })
            .collect()
    }

    /// Fails on the first triangle with an angle below [`MIN_ANGLE_DEG`] or
    /// an area below [`MIN_AREA`].
    pub fn check_quality(&self) -> Result<(), MeshError> {
        for t in 0..self.triangles.len() {
            let area = self.triangle_area(t);
            let angle = min_angle_deg(&self.corners(t));
            if !(area > MIN_AREA && angle > MIN_ANGLE_DEG) {
                return Err(MeshError::Degenerate {
                    triangle: t,
                    area,
                    min_angle_deg: angle,
                });
            }
        }
        Ok(())
    }

    /// Largest `| |x| − 1 |` over boundary vertices.
    pub fn boundary_sphere_residual(&self) -> f64 {
        self.boundary
            .iter()
            .map(|&b| (self.vertices[b].norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Wavefront OBJ with 1-based faces and 17 significant digits.
    pub fn to_obj(&self) -> String {
        let mut s = String::with_capacity(64 * (self.vertices.len() + self.triangles.len()));
        for v in &self.vertices {
            let _ = writeln!(s, "v {:.16e} {:.16e} {:.16e}", v.x, v.y, v.z);
        }
        for t in &self.triangles {
            let _ = writeln!(s, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
        }
        s
    }

    /// Reads `v` and triangular `f` records (`f a/b/c` forms and negative
    /// indices accepted); other records are ignored.
    pub fn from_obj(text: &str) -> Result<Self, MeshError> {
        let mut vertices = Vec::new();
        let mut triangles = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let bad = |what: &str| MeshError::Obj {
                line: ln + 1,
                reason: what.to_string(),
            };
            let mut it = line.split_whitespace();
            match it.next() {
                Some("v") => {
                    let xs: Vec<f64> = it
                        .take(3)
                        .map(|t| t.parse::<f64>().map_err(|_| bad("bad coordinate")))
                        .collect::<Result<_, _>>()?;
                    if xs.len() != 3 {
                        return Err(bad("vertex needs three coordinates"));
                    }
                    vertices.push(Point::new(xs[0], xs[1], xs[2]));
                }
                Some("f") => {
                    let idx: Vec<usize> = it
                        .map(|t| {
                            let i: i64 = t
                                .split('/')
                                .next()
                                .unwrap_or("")
                                .parse()
                                .map_err(|_| bad("bad face index"))?;
                            let resolved = if i < 0 { vertices.len() as i64 + i } else { i - 1 };
                            usize::try_from(resolved).map_err(|_| bad("face index out of range"))
                        })
                        .collect::<Result<_, _>>()?;
                    if idx.len() != 3 {
                        return Err(bad("only triangles are supported"));
                    }
                    triangles.push([idx[0], idx[1], idx[2]]);
                }
                _ => {}
            }
        }
        Self::new(vertices, triangles)
    }
}

pub(crate) fn min_angle_deg(p: &[Point; 3]) -> f64 {
    (0..3)
        .map(|k| {
            let e1 = p[(k + 1) % 3] - p[k];
            let e2 = p[(k + 2) % 3] - p[k];
            e1.cross(&e2).norm().atan2(e1.dot(&e2)).to_degrees()
        })
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> TriMesh {
        let v = vec![
            Point::new(0.0, 0.0, 0.0),
            Point::new(1.0, 0.0, 0.0),
            Point::new(1.0, 1.0, 0.0),
            Point::new(0.0, 1.0, 0.0),
        ];
        TriMesh::new(v, vec![[0, 1, 2], [0, 2, 3]]).unwrap()
    }

    #[test]
    fn square_topology() {
        let m = square();
        assert_eq!(m.boundary_vertices(), &[0, 1, 2, 3]);
        assert_eq!(m.boundary_loops().len(), 1);
        assert_eq!(m.euler_characteristic(), 1);
        assert!((m.area() - 1.0).abs() < 1e-15);
        assert!((m.boundary_length() - 4.0).abs() < 1e-15);
        assert!(m.vertex_normals().iter().all(|n| (n.z - 1.0).abs() < 1e-15));
    }

    #[test]
    fn rejects_flipped_triangle() {
        let v = square().vertices;
        assert!(matches!(
            TriMesh::new(v, vec![[0, 1, 2], [0, 3, 2], [0, 2, 1]]),
            Err(MeshError::Topology(_))
        ));
    }

    #[test]
    fn obj_round_trip() {
        let m = square();
        let back = TriMesh::from_obj(&m.to_obj()).unwrap();
        assert_eq!(back, m);
        let quoted = TriMesh::from_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1/1 2/2 -1\n").unwrap();
        assert_eq!(quoted.triangles(), &[[0, 1, 2]]);
    }

    #[test]
    fn sliver_fails_quality() {
        let v = vec![
            Point::new(0.0, 0.0, 0.0),
            Point::new(1.0, 0.0, 0.0),
            Point::new(0.5, 1e-3, 0.0),
        ];
        let m = TriMesh::new(v, vec![[0, 1, 2]]).unwrap();
        assert!(matches!(
            m.check_quality(),
            Err(MeshError::Degenerate { triangle: 0, .. })
        ));
    }
}
