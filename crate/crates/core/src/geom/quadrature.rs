//! Tensor Gauss–Legendre quadrature over parameter boxes and their faces.

use super::local::LocalGeometry;
use super::surface::{Axis, ChartDiff, ParametricHypersurface};
use super::{GeomError, DEGENERATE_DET};
use crate::par::Exec;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// `m`-point rule by Newton iteration on `P_m`, exact for degree `2m − 1`.
    pub fn new(m: usize) -> Self {
        assert!(m >= 1);
        let mut nodes = vec![0.0; m];
        let mut weights = vec![0.0; m];
        for i in 0..m.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(m, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(m, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[m - 1 - i] = x;
            weights[i] = w;
            weights[m - 1 - i] = w;
        }
        if m % 2 == 1 {
            nodes[m / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Nodes and weights mapped to `[lo, hi]`.
    pub fn on(&self, lo: f64, hi: f64) -> (Vec<f64>, Vec<f64>) {
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        (
            self.nodes.iter().map(|x| mid + half * x).collect(),
            self.weights.iter().map(|w| half * w).collect(),
        )
    }
}

/// `(P_m(x), P_m'(x))` by the three-term recurrence.
fn legendre(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Largest one-dimensional rule [`QuadratureRule::integrate`] will build.
pub const MAX_POINTS_PER_AXIS: usize = 4096;

/// Tensor Gauss–Legendre rule with a starting size; integrals built on it
/// double the size until the relative change drops below `rel_tol` or the
/// absolute change below `abs_tol`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureRule {
    pub points_per_axis: usize,
    pub rel_tol: f64,
    /// Absolute change accepted as converged; needed for integrals near 0.
    pub abs_tol: f64,
    /// Upper bound on the total node count of one tensor rule.
    pub max_nodes: usize,
    pub exec: Exec,
}

impl Default for QuadratureRule {
    fn default() -> Self {
        Self {
            points_per_axis: 16,
            rel_tol: 1e-10,
            abs_tol: 0.0,
            max_nodes: 1 << 22,
            exec: Exec::default(),
        }
    }
}

/// A converged integral and how it was obtained.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub points_per_axis: usize,
    pub relative_change: f64,
}

impl QuadratureRule {
    pub fn with_points(points_per_axis: usize) -> Self {
        assert!(points_per_axis >= 2);
        Self {
            points_per_axis,
            ..Self::default()
        }
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    /// One tensor rule of size `m` over `axes`.
    pub fn integrate_fixed<F>(&self, axes: &[Axis], m: usize, f: &F) -> Result<f64, GeomError>
    where
        F: Fn(&[f64]) -> Result<f64, GeomError> + Sync + Send,
    {
        let gl = GaussLegendre::new(m);
        let per_axis: Vec<(Vec<f64>, Vec<f64>)> = axes.iter().map(|ax| gl.on(ax.lo, ax.hi)).collect();
        let d = axes.len();
        let total = m.pow(d as u32);
        let terms = self.exec.map_range(total, |mut idx| {
            let mut p = vec![0.0; d];
            let mut w = 1.0;
            for (k, (nodes, weights)) in per_axis.iter().enumerate() {
                let i = idx % m;
                idx /= m;
                p[k] = nodes[i];
                w *= weights[i];
            }
            f(&p).map(|v| w * v)
        });
        let mut sum = 0.0;
        for t in terms {
            sum += t?;
        }
        Ok(sum)
    }

    /// Integrates `f` over `axes`, doubling the rule until it settles.
    pub fn integrate<F>(&self, axes: &[Axis], f: &F) -> Result<Integral, GeomError>
    where
        F: Fn(&[f64]) -> Result<f64, GeomError> + Sync + Send,
    {
        let mut m = self.points_per_axis;
        let mut prev = self.integrate_fixed(axes, m, f)?;
        let mut change = f64::INFINITY;
        loop {
            let next = 2 * m;
            if next > MAX_POINTS_PER_AXIS || next.pow(axes.len() as u32) > self.max_nodes {
                return Err(GeomError::QuadratureNonConvergence { points: m, change });
            }
            let value = self.integrate_fixed(axes, next, f)?;
            change = (value - prev).abs() / value.abs().max(f64::MIN_POSITIVE);
            if change < self.rel_tol || (value - prev).abs() <= self.abs_tol {
                return Ok(Integral {
                    value,
                    points_per_axis: next,
                    relative_change: change,
                });
            }
            prev = value;
            m = next;
        }
    }

    /// Integrates over the hypersurface, `∫ f dμ`, with `f` given the local
    /// geometry at each node.
    pub fn integrate_surface<F>(&self, surf: &ParametricHypersurface, f: &F) -> Result<Integral, GeomError>
    where
        F: Fn(&[f64], &LocalGeometry) -> Result<f64, GeomError> + Sync + Send,
    {
        self.integrate(&surf.domain().axes, &|p: &[f64]| {
            let geo = surf.local(p, 2, ChartDiff::Exact)?;
            Ok(geo.sqrt_det * f(p, &geo)?)
        })
    }

    /// Integrates over the boundary, `∫_{∂M} f dS`, summing over boundary
    /// faces. `f` also receives the face index.
    pub fn integrate_boundary<F>(&self, surf: &ParametricHypersurface, f: &F) -> Result<Integral, GeomError>
    where
        F: Fn(&[f64], usize, &LocalGeometry) -> Result<f64, GeomError> + Sync + Send,
    {
        let faces = surf.boundary_faces();
        if faces.is_empty() {
            return Err(GeomError::NoBoundary);
        }
        let mut total = Integral {
            value: 0.0,
            points_per_axis: 0,
            relative_change: 0.0,
        };
        for (fi, face) in faces.iter().enumerate() {
            let axes: Vec<Axis> = surf
                .domain()
                .axes
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != face.axis)
                .map(|(_, a)| *a)
                .collect();
            let c = face.coordinate(surf.domain());
            let part = self.integrate(&axes, &|q: &[f64]| {
                let mut p = Vec::with_capacity(q.len() + 1);
                p.extend_from_slice(&q[..face.axis]);
                p.push(c);
                p.extend_from_slice(&q[face.axis..]);
                let geo = surf.local(&p, 2, ChartDiff::Exact)?;
                Ok(face_sqrt_det(&geo, face.axis) * f(&p, fi, &geo)?)
            })?;
            total.value += part.value;
            total.points_per_axis = total.points_per_axis.max(part.points_per_axis);
            total.relative_change = total.relative_change.max(part.relative_change);
        }
        Ok(total)
    }
}

/// Volume element of the face `{p_axis = const}`: `√det` of the metric with
/// row and column `axis` removed.
pub fn face_sqrt_det(geo: &LocalGeometry, axis: usize) -> f64 {
    let mut m = geo.g;
    for k in 0..m.nrows() {
        m[(axis, k)] = 0.0;
        m[(k, axis)] = 0.0;
    }
    m[(axis, axis)] = 1.0;
    let det = m.determinant();
    if det > DEGENERATE_DET {
        det.sqrt()
    } else {
        0.0
    }
}

/// `|M| = ∫_U √det g`.
pub fn surface_area(surf: &ParametricHypersurface, quad: &QuadratureRule) -> Result<Integral, GeomError> {
    quad.integrate_surface(surf, &|_, _| Ok(1.0))
}

/// `|∂M|`, summed over boundary faces.
pub fn boundary_volume(surf: &ParametricHypersurface, quad: &QuadratureRule) -> Result<Integral, GeomError> {
    quad.integrate_boundary(surf, &|_, _, _| Ok(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_and_weights() {
        for m in [1, 2, 3, 7, 16, 64] {
            let gl = GaussLegendre::new(m);
            let s: f64 = gl.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "m={m} sum={s}");
            for (k, x) in gl.nodes.iter().enumerate() {
                assert!((gl.nodes[m - 1 - k] + x).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn exact_on_monomials() {
        for m in [2, 5, 12] {
            let gl = GaussLegendre::new(m);
            let (x, w) = gl.on(0.0, 2.0);
            for deg in 0..2 * m {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = 2f64.powi(deg as i32 + 1) / (deg as f64 + 1.0);
                assert!((q - exact).abs() / exact < 1e-13, "m={m} deg={deg}");
            }
        }
    }

    #[test]
    fn tensor_rule_volume() {
        let axes = [Axis::closed(0.0, 2.0), Axis::periodic(-1.0, 3.0)];
        let q = QuadratureRule::with_points(4);
        let v = q.integrate_fixed(&axes, 4, &|_| Ok(1.0)).unwrap();
        assert!((v - 8.0).abs() < 1e-13);
        let xy = q
            .integrate_fixed(&axes, 4, &|p| Ok(p[0].powi(3) * p[1].powi(2)))
            .unwrap();
        assert!((xy - 4.0 * 28.0 / 3.0).abs() < 1e-12);
    }
}
