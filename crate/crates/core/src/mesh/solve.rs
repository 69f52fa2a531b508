//! Projected descent on total area with boundary vertices on the unit sphere.

use std::fmt::Write as _;

use nalgebra::Matrix3;
use serde::Serialize;

use super::curvature::{area_gradient, mixed_areas, tangent_to_sphere, CotanWeights};
use super::metrics::boundary_orthogonality;
use super::trimesh::{Point, TriMesh};
use super::MeshError;
use crate::Exec;

/// Inner product defining the descent direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DescentMetric {
    /// Steepest descent: the constrained area gradient itself.
    Euclidean,
    /// The gradient with respect to the `H¹` product `L + M` of the current
    /// mesh (cotangent stiffness plus lumped mass), solved by conjugate
    /// gradients. Same critical points, mesh-independent step size.
    Sobolev,
}

/// How boundary vertices are kept on the sphere.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryProjection {
    /// Step tangent to the sphere, then `x ← x/|x|`.
    Radial,
    /// As `Radial`, and the boundary centroid is held at the origin. This
    /// removes the translation modes along which the equatorial disk and
    /// the critical catenoid are unstable for area.
    Balanced,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SolverConfig {
    /// First trial step of each line search.
    pub step: f64,
    /// Armijo constant.
    pub armijo: f64,
    /// Backtracking factor.
    pub backtrack: f64,
    /// Line search gives up below this step.
    pub min_step: f64,
    pub displacement_tol: f64,
    pub gradient_tol: f64,
    pub max_iterations: usize,
    pub metric: DescentMetric,
    pub projection: BoundaryProjection,
    /// Relative residual for the conjugate-gradient solve. The direction
    /// only has to be a good descent direction, so this can be loose.
    pub cg_tol: f64,
    pub cg_max_iterations: usize,
    #[serde(skip)]
    pub exec: Exec,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            step: 1.0,
            armijo: 1e-4,
            backtrack: 0.5,
            min_step: 1e-12,
            displacement_tol: 1e-8,
            gradient_tol: 1e-8,
            max_iterations: 500,
            metric: DescentMetric::Sobolev,
            projection: BoundaryProjection::Balanced,
            cg_tol: 1e-6,
            cg_max_iterations: 2000,
            exec: Exec::default(),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), MeshError> {
        let positive = [
            ("step", self.step),
            ("armijo", self.armijo),
            ("min_step", self.min_step),
            ("displacement_tol", self.displacement_tol),
            ("gradient_tol", self.gradient_tol),
            ("cg_tol", self.cg_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(MeshError::InvalidParameter(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) || !(self.armijo < 1.0) {
            return Err(MeshError::InvalidParameter(
                "backtrack and armijo must lie in (0, 1)".into(),
            ));
        }
        if self.max_iterations == 0 || self.cg_max_iterations == 0 {
            return Err(MeshError::InvalidParameter(
                "iteration limits must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub area: f64,
    /// Largest Euclidean norm of the constrained area gradient at a vertex.
    pub max_gradient: f64,
    /// Largest `|⟨ν, x/|x|⟩|` over boundary vertices.
    pub boundary_orthogonality: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Trace {
    pub rows: Vec<TraceRow>,
}

impl Trace {
    pub const HEADER: &'static str = "iteration,area,max_gradient,boundary_orthogonality";

    pub fn to_csv(&self) -> String {
        let mut s = String::from(Self::HEADER);
        s.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{:.16e},{:.16e},{:.16e}",
                r.iteration, r.area, r.max_gradient, r.boundary_orthogonality
            );
        }
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    Gradient,
    Displacement,
}

#[derive(Clone, Debug)]
pub struct Minimized {
    pub mesh: TriMesh,
    pub trace: Trace,
    pub stop: StopReason,
    /// Accepted descent steps.
    pub iterations: usize,
    /// Whether the one relaxation retry was used.
    pub relaxed: bool,
}

/// Linearized boundary constraints at the current positions.
///
/// A boundary vertex may move only along `ŵ = x̂ × T̂`, the direction tangent
/// to the sphere and normal to the boundary curve (`T̂` from its two loop
/// neighbours). Sliding along the curve only reparametrizes the boundary,
/// and the discrete area is unstable under it: an inscribed polygon loses
/// area when its vertices bunch up.
struct Constraint<'a> {
    mesh: &'a TriMesh,
    /// `ŵ` per boundary vertex, in the order of `mesh.boundary_vertices()`.
    dirs: Vec<Point>,
    /// Pseudo-inverse of `Σ_b ŵŵᵀ`, when balanced.
    k_pinv: Option<Matrix3<f64>>,
}

impl<'a> Constraint<'a> {
    fn new(mesh: &'a TriMesh, projection: BoundaryProjection) -> Result<Self, MeshError> {
        let b = mesh.boundary_vertices();
        let mut dirs = vec![Point::zeros(); b.len()];
        for lp in mesh.boundary_loops() {
            for k in 0..lp.len() {
                let prev = mesh.vertices[lp[(k + lp.len() - 1) % lp.len()]];
                let next = mesh.vertices[lp[(k + 1) % lp.len()]];
                let x = mesh.vertices[lp[k]].normalize();
                let w = x.cross(&(next - prev));
                let slot = b.binary_search(&lp[k]).expect("loop vertex is a boundary vertex");
                dirs[slot] = w.try_normalize(0.0).ok_or_else(|| MeshError::Degenerate {
                    triangle: mesh.vertex_faces(lp[k])[0],
                    area: 0.0,
                    min_angle_deg: 0.0,
                })?;
            }
        }
        let k_pinv = if projection == BoundaryProjection::Balanced && !b.is_empty() {
            let k = dirs
                .iter()
                .fold(Matrix3::zeros(), |acc, w| acc + w * w.transpose());
            let eps = 1e-12 * k.trace();
            Some(
                k.pseudo_inverse(eps)
                    .map_err(|e| MeshError::InvalidParameter(e.to_string()))?,
            )
        } else {
            None
        };
        Ok(Self { mesh, dirs, k_pinv })
    }

    /// Orthogonal projection onto admissible displacements: boundary
    /// vertices along `ŵ`, and in balanced mode a fixed boundary centroid.
    fn project(&self, v: &mut [Point]) {
        let b = self.mesh.boundary_vertices();
        let mu = match self.k_pinv {
            Some(k) => {
                k * b
                    .iter()
                    .zip(&self.dirs)
                    .fold(Point::zeros(), |acc, (&i, w)| acc + w * w.dot(&v[i]))
            }
            None => Point::zeros(),
        };
        for (&i, w) in b.iter().zip(&self.dirs) {
            v[i] = w * w.dot(&(v[i] - mu));
        }
    }
}

fn tangent_sum(mesh: &TriMesh, b: &[usize]) -> Matrix3<f64> {
    b.iter().fold(Matrix3::zeros(), |acc, &i| {
        let r = mesh.vertices[i].normalize();
        acc + Matrix3::identity() - r * r.transpose()
    })
}

fn dot(a: &[Point], b: &[Point]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

/// Puts boundary vertices back on the sphere; in balanced mode also moves
/// them tangentially until their centroid is at the origin.
pub fn project_boundary(mesh: &mut TriMesh, projection: BoundaryProjection) -> Result<(), MeshError> {
    let b = mesh.boundary_vertices().to_vec();
    for &i in &b {
        mesh.vertices[i] = mesh.vertices[i].normalize();
    }
    if projection == BoundaryProjection::Radial || b.is_empty() {
        return Ok(());
    }
    let count = b.len() as f64;
    for _ in 0..100 {
        let c = b.iter().fold(Point::zeros(), |acc, &i| acc + mesh.vertices[i]) / count;
        if c.norm() < 1e-15 {
            return Ok(());
        }
        let w = tangent_sum(mesh, &b)
            .try_inverse()
            .ok_or_else(|| MeshError::InvalidParameter("boundary cannot be balanced".into()))?
            * (c * count);
        for &i in &b {
            let x = mesh.vertices[i];
            mesh.vertices[i] = (x - tangent_to_sphere(w, x)).normalize();
        }
    }
    Err(MeshError::InvalidParameter(
        "boundary centroid did not converge to the origin".into(),
    ))
}

/// Solves `P (L + M) P d = rhs` on the constrained subspace by Jacobi
/// preconditioned conjugate gradients.
fn sobolev_direction(
    mesh: &TriMesh,
    constraint: &Constraint,
    rhs: &[Point],
    cfg: &SolverConfig,
) -> Result<Vec<Point>, MeshError> {
    let weights = CotanWeights::new(mesh)?;
    let mass = mixed_areas(mesh);
    let diag: Vec<f64> = (0..mesh.vertex_count())
        .map(|i| weights.diagonal(i) + mass[i])
        .collect();
    let apply = |p: &[Point]| {
        let mut out = weights.apply(p, cfg.exec);
        for (i, o) in out.iter_mut().enumerate() {
            *o += p[i] * mass[i];
        }
        constraint.project(&mut out);
        out
    };
    let precondition = |r: &[Point]| {
        let mut z: Vec<Point> = r
            .iter()
            .zip(&diag)
            .map(|(r, d)| r / d.abs().max(1e-300))
            .collect();
        constraint.project(&mut z);
        z
    };
    let mut x = vec![Point::zeros(); rhs.len()];
    let mut r = rhs.to_vec();
    let norm_b = dot(rhs, rhs).sqrt();
    if norm_b == 0.0 {
        return Ok(x);
    }
    let mut z = precondition(&r);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    for _ in 0..cfg.cg_max_iterations {
        let ap = apply(&p);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            break;
        }
        let alpha = rz / pap;
        for i in 0..x.len() {
            x[i] += p[i] * alpha;
            r[i] -= ap[i] * alpha;
        }
        if dot(&r, &r).sqrt() <= cfg.cg_tol * norm_b {
            break;
        }
        z = precondition(&r);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..p.len() {
            p[i] = z[i] + p[i] * beta;
        }
    }
    Ok(x)
}

/// Moves interior vertices halfway to their neighbour centroid within the
/// tangent plane, a few passes. Used once when the line search stalls on
/// mesh quality.
fn relax(mesh: &mut TriMesh) {
    for _ in 0..5 {
        let normals = mesh.vertex_normals();
        let moved: Vec<Point> = (0..mesh.vertex_count())
            .map(|v| {
                let x = mesh.vertices[v];
                if mesh.is_boundary(v) {
                    return x;
                }
                let nb = mesh.neighbors(v);
                let c = nb.iter().fold(Point::zeros(), |acc, &j| acc + mesh.vertices[j]) / nb.len() as f64;
                let d = c - x;
                x + (d - normals[v] * normals[v].dot(&d)) * 0.5
            })
            .collect();
        mesh.vertices = moved;
    }
}

fn max_norm(v: &[Point]) -> f64 {
    v.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Projected descent on total area. Interior vertices follow the area
/// gradient (or its Sobolev counterpart); boundary vertices move within the
/// sphere's tangent plane, normal to the boundary curve, and are then
/// renormalized. Each step is accepted only if the
/// Armijo condition holds on the projected mesh, so the area never rises.
///
/// Stops when the largest constrained gradient, or the largest vertex
/// displacement of an unshortened step, falls below its tolerance. A line
/// search that stalls triggers one tangential relaxation of the mesh; a
/// second stall or the iteration limit returns [`MeshError::NotConverged`]
/// with the trace.
pub fn minimize(initial: &TriMesh, cfg: &SolverConfig) -> Result<Minimized, MeshError> {
    cfg.validate()?;
    let mut mesh = initial.clone();
    project_boundary(&mut mesh, cfg.projection)?;
    let mut relaxed = false;
    if mesh.check_quality().is_err() {
        relax(&mut mesh);
        relaxed = true;
        mesh.check_quality()?;
    }
    let mut trace = Trace::default();
    let mut area = mesh.area();
    let mut accepted = 0;
    let mut last_step = cfg.step;
    loop {
        let constraint = Constraint::new(&mesh, cfg.projection)?;
        let grad = area_gradient(&mesh, cfg.exec);
        let mut pg = grad.clone();
        constraint.project(&mut pg);
        let gnorm = max_norm(&pg);
        trace.rows.push(TraceRow {
            iteration: accepted,
            area,
            max_gradient: gnorm,
            boundary_orthogonality: boundary_orthogonality(&mesh),
        });
        if gnorm < cfg.gradient_tol {
            return Ok(Minimized {
                mesh,
                trace,
                stop: StopReason::Gradient,
                iterations: accepted,
                relaxed,
            });
        }
        if accepted >= cfg.max_iterations {
            return Err(not_converged(accepted, "iteration limit reached", trace, mesh));
        }
        let neg: Vec<Point> = pg.iter().map(|g| -g).collect();
        let dir = match cfg.metric {
            DescentMetric::Euclidean => neg,
            DescentMetric::Sobolev => sobolev_direction(&mesh, &constraint, &neg, cfg)?,
        };
        let slope = dot(&grad, &dir);
        if !(slope < 0.0) {
            return Err(not_converged(
                accepted,
                "search direction is not a descent direction",
                trace,
                mesh,
            ));
        }
        let first = match cfg.metric {
            DescentMetric::Sobolev => cfg.step,
            DescentMetric::Euclidean => (2.0 * last_step).min(cfg.step),
        };
        let mut t = first;
        let step = loop {
            if t < cfg.min_step {
                break None;
            }
            let mut cand = mesh.clone();
            for (x, d) in cand.vertices.iter_mut().zip(&dir) {
                *x += d * t;
            }
            if project_boundary(&mut cand, cfg.projection).is_ok() && cand.check_quality().is_ok() {
                let a = cand.area();
                if a <= area + cfg.armijo * t * slope {
                    break Some((cand, a));
                }
            }
            t *= cfg.backtrack;
        };
        let Some((cand, new_area)) = step else {
            if relaxed {
                return Err(not_converged(
                    accepted,
                    "line search stalled after relaxation",
                    trace,
                    mesh,
                ));
            }
            relax(&mut mesh);
            project_boundary(&mut mesh, cfg.projection)?;
            if let Err(e) = mesh.check_quality() {
                return Err(not_converged(
                    accepted,
                    &format!("relaxation left a bad mesh: {e}"),
                    trace,
                    mesh,
                ));
            }
            area = mesh.area();
            relaxed = true;
            continue;
        };
        assert!(new_area <= area, "accepted step increased the area");
        let displacement = cand
            .vertices
            .iter()
            .zip(&mesh.vertices)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        mesh = cand;
        area = new_area;
        accepted += 1;
        last_step = t;
        // A short step forced by backtracking says nothing about convergence.
        if displacement < cfg.displacement_tol && t == first {
            let mut pg = area_gradient(&mesh, cfg.exec);
            Constraint::new(&mesh, cfg.projection)?.project(&mut pg);
            trace.rows.push(TraceRow {
                iteration: accepted,
                area,
                max_gradient: max_norm(&pg),
                boundary_orthogonality: boundary_orthogonality(&mesh),
            });
            return Ok(Minimized {
                mesh,
                trace,
                stop: StopReason::Displacement,
                iterations: accepted,
                relaxed,
            });
        }
    }
}

fn not_converged(iterations: usize, reason: &str, trace: Trace, mesh: TriMesh) -> MeshError {
    MeshError::NotConverged {
        iterations,
        reason: reason.to_string(),
        trace: Box::new(trace),
        mesh: Box::new(mesh),
    }
}
