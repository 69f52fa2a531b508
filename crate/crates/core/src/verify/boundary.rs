//! Relations between the second fundamental form and its normal derivative
//! along a free boundary.
//!
//! At a boundary point the adapted frame is `{τ_1, …, τ_{n−1}, τ_n}` with
//! `τ_n` the outward conormal (equal to the sphere normal on a free
//! boundary) and `τ_i` the principal directions of the tangential block of
//! `h`. Normal derivatives use fourth-order stencils that turn one-sided at
//! the face; the differentiated fields are exact.

use nalgebra::{DMatrix, SymmetricEigen};

use super::grid::BoundaryGrid;
use super::interior::{max_and_rms, minimality_gate};
use super::report::VerificationReport;
use super::{VerifyConfig, VerifyError};
use crate::geom::local::PMat;
use crate::geom::operators::conormal;
use crate::geom::{stencil, ChartDiff, Dd, Face, GeomError, LocalGeometry, ParametricHypersurface};

fn form(m: &PMat, a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            acc += ai * m[(i, j)] * bj;
        }
    }
    acc
}

/// Orthonormal frame at a boundary point, in chart components.
#[derive(Clone, Debug, PartialEq)]
pub struct AdaptedFrame {
    /// Principal directions tangent to the boundary.
    pub tangential: Vec<Vec<f64>>,
    /// Outward unit conormal.
    pub normal: Vec<f64>,
}

impl AdaptedFrame {
    pub fn new(geo: &LocalGeometry, face: Face) -> Result<Self, VerifyError> {
        let n = geo.n;
        let normal = conormal(geo, face);
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
        for k in (0..n).filter(|&k| k != face.axis) {
            let mut w = vec![0.0; n];
            w[k] = 1.0;
            let len0 = geo.g[(k, k)];
            for prev in std::iter::once(&normal).chain(basis.iter()) {
                let c = form(&geo.g, &w, prev);
                for (wi, pi) in w.iter_mut().zip(prev) {
                    *wi -= c * pi;
                }
            }
            let len = form(&geo.g, &w, &w);
            if !(len > 1e-20 * len0) {
                return Err(VerifyError::FrameConstruction {
                    point: geo.param.clone(),
                });
            }
            let scale = 1.0 / len.sqrt();
            basis.push(w.into_iter().map(|x| x * scale).collect());
        }
        let m = basis.len();
        let block = DMatrix::from_fn(m, m, |i, j| form(&geo.h, &basis[i], &basis[j]));
        let eig = SymmetricEigen::new(block);
        let tangential = (0..m)
            .map(|c| {
                (0..n)
                    .map(|k| (0..m).map(|j| eig.eigenvectors[(j, c)] * basis[j][k]).sum())
                    .collect()
            })
            .collect();
        Ok(Self { tangential, normal })
    }
}

fn gate(surf: &ParametricHypersurface, cfg: &VerifyConfig, check: &str) -> Result<f64, VerifyError> {
    if !surf.is_free_boundary() {
        return Err(VerifyError::PreconditionViolation {
            check: check.to_string(),
            reason: format!("surface {} is not flagged free-boundary", surf.id()),
        });
    }
    minimality_gate(surf, &cfg.interior_grid(surf), cfg, check)
}

/// `τ^k ∂_k f` with fourth-order stencils along every axis `τ` touches.
fn directional<T, F>(
    surf: &ParametricHypersurface,
    f: &F,
    p: &[f64],
    dir: &[f64],
    h: f64,
) -> Result<T, GeomError>
where
    T: Clone + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
    F: Fn(&[f64]) -> Result<T, GeomError>,
{
    let mut acc: Option<T> = None;
    for (k, &c) in dir.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let d: T = stencil::first(f, p, k, h, surf.domain())?;
        let term = d * c;
        acc = Some(match acc {
            None => term,
            Some(a) => a + term,
        });
    }
    Ok(acc.expect("direction is nonzero"))
}

fn second_form(surf: &ParametricHypersurface, q: &[f64]) -> Result<PMat, GeomError> {
    Ok(surf.local(q, 2, ChartDiff::Exact)?.h)
}

#[derive(Clone, Copy, Debug, Default)]
struct BoundaryResiduals {
    h_in: f64,
    nabla_h_mean: f64,
    normal_relation: f64,
    exact_normal_relation: f64,
    support: f64,
}

fn relations_at(
    surf: &ParametricHypersurface,
    face: Face,
    p: &[f64],
    h: f64,
) -> Result<BoundaryResiduals, VerifyError> {
    let n = surf.dim();
    let d = surf.derivatives(p, 3, ChartDiff::Exact)?;
    let geo = LocalGeometry::from_derivatives(&d, surf.orientation(), p)?;
    let frame = AdaptedFrame::new(&geo, face)?;
    let gamma = geo.christoffel(&d);
    let tn = &frame.normal;

    // ∂_n h_ab, then the covariant correction along τ_n.
    let dh: PMat = directional(surf, &|q: &[f64]| second_form(surf, q), p, tn, h)?;
    let mut nabla = PMat::zeros();
    for a in 0..n {
        for b in 0..n {
            let corr: f64 = (0..n)
                .map(|k| {
                    tn[k]
                        * (0..n)
                            .map(|l| {
                                gamma[(l * n + k) * n + a] * geo.h[(l, b)]
                                    + gamma[(l * n + k) * n + b] * geo.h[(a, l)]
                            })
                            .sum::<f64>()
                })
                .sum();
            nabla[(a, b)] = dh[(a, b)] - corr;
        }
    }
    let exact = |a: &[f64], b: &[f64]| -> f64 {
        let mut acc = 0.0;
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    acc += tn[k] * a[i] * b[j] * geo.nabla_h[(k * n + i) * n + j];
                }
            }
        }
        acc
    };

    let h_nn = form(&geo.h, tn, tn);
    let mut out = BoundaryResiduals::default();
    for t in &frame.tangential {
        let h_ii = form(&geo.h, t, t);
        out.h_in = out.h_in.max(form(&geo.h, t, tn).abs());
        out.normal_relation = out
            .normal_relation
            .max((form(&nabla, t, t) - (h_nn - h_ii)).abs());
        out.exact_normal_relation = out.exact_normal_relation.max((exact(t, t) - (h_nn - h_ii)).abs());
    }
    let mean = |q: &[f64]| Ok(surf.local(q, 2, ChartDiff::Exact)?.mean_curvature());
    out.nabla_h_mean = directional::<f64, _>(surf, &mean, p, tn, h)?.abs();
    out.support = geo.support().abs();
    Ok(out)
}

/// `h_in = 0`, `∇_n H = 0` and `∇_n h_ii = h_nn − h_ii` along the boundary.
pub fn check_boundary_relations(
    surf: &ParametricHypersurface,
    grid: &BoundaryGrid,
    cfg: &VerifyConfig,
) -> Result<VerificationReport, VerifyError> {
    let name = "boundary-relations";
    gate(surf, cfg, name)?;
    let res = cfg
        .exec
        .try_map(&grid.points, |(face, p)| relations_at(surf, *face, p, cfg.h))?;
    let worst = |f: fn(&BoundaryResiduals) -> f64| res.iter().map(f).fold(0.0, f64::max);
    let (max, rms) = max_and_rms(
        res.iter()
            .map(|r| r.h_in.max(r.nabla_h_mean).max(r.normal_relation)),
    );
    Ok(VerificationReport::new(
        name,
        surf.id(),
        grid.spec.clone(),
        max,
        rms,
        cfg.boundary_tol,
        Some(cfg.h),
    )
    .with_metric("h_in_max", worst(|r| r.h_in))
    .with_metric("nabla_n_mean_curvature_max", worst(|r| r.nabla_h_mean))
    .with_metric("normal_relation_max", worst(|r| r.normal_relation))
    .with_metric("normal_relation_exact_max", worst(|r| r.exact_normal_relation))
    .with_metric("support_max", worst(|r| r.support)))
}

/// `∇_n|A|² = −2|A|² − 2n h_nn²` along the boundary.
pub fn check_normal_derivative_a2(
    surf: &ParametricHypersurface,
    grid: &BoundaryGrid,
    cfg: &VerifyConfig,
) -> Result<VerificationReport, VerifyError> {
    let name = "normal-derivative-a2";
    gate(surf, cfg, name)?;
    let res = cfg.exec.try_map(&grid.points, |(face, p)| {
        normal_derivative_a2_residual(surf, *face, p, cfg.h)
    })?;
    let (max, rms) = max_and_rms(res.iter().map(|r| r.abs()));
    Ok(VerificationReport::new(
        name,
        surf.id(),
        grid.spec.clone(),
        max,
        rms,
        cfg.boundary_tol,
        Some(cfg.h),
    ))
}

/// Signed `∇_n|A|² + 2|A|² + 2n h_nn²` at a boundary point.
pub fn normal_derivative_a2_residual(
    surf: &ParametricHypersurface,
    face: Face,
    p: &[f64],
    h: f64,
) -> Result<f64, VerifyError> {
    let n = surf.dim() as f64;
    let geo = surf.local(p, 2, ChartDiff::Exact)?;
    let dn = normal_derivative_a2(surf, face, p, h)?;
    let h_nn = conormal_second_form(&geo, face);
    Ok(dn + 2.0 * geo.a_norm_sq() + 2.0 * n * h_nn * h_nn)
}

/// `∇_n|A|²` at a boundary point by one-sided fourth-order differences.
pub fn normal_derivative_a2(
    surf: &ParametricHypersurface,
    face: Face,
    p: &[f64],
    h: f64,
) -> Result<f64, GeomError> {
    let geo = surf.local(p, 2, ChartDiff::Exact)?;
    let tn = conormal(&geo, face);
    let a2 = |q: &[f64]| Ok(surf.precise(q, 2)?.a_norm_sq());
    Ok(directional::<Dd, _>(surf, &a2, p, &tn, h)?.to_f64())
}

/// `h(τ_n, τ_n)` with `τ_n` the outward conormal.
pub fn conormal_second_form(geo: &LocalGeometry, face: Face) -> f64 {
    let tn = conormal(geo, face);
    form(&geo.h, &tn, &tn)
}
