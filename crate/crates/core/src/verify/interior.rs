//! Pointwise elliptic identities on interior sample grids.
//!
//! Each scalar field is evaluated exactly from chart jets (carried in
//! double-double past the jets); the Laplacian and gradients add one layer
//! of second-order differencing with step `h`.
//! Residuals are reported mixed-scaled, `|lhs − rhs| / max(1, Σ|terms|)`,
//! with the absolute maximum kept as the `absolute_max` metric.

use super::grid::SampleGrid;
use super::report::VerificationReport;
use super::{VerifyConfig, VerifyError};
use crate::geom::operators::chart_partials;
use crate::geom::{
    laplace_beltrami, ChartDiff, Dd, FieldValue, GeomError, KillingField, LocalGeometry,
    ParametricHypersurface, SurfaceGradient,
};

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct PointResidual {
    pub scaled: f64,
    pub absolute: f64,
}

pub(crate) fn scaled(residual: f64, terms: &[f64]) -> PointResidual {
    let scale: f64 = terms.iter().map(|t| t.abs()).sum();
    PointResidual {
        scaled: residual.abs() / scale.max(1.0),
        absolute: residual.abs(),
    }
}

/// `(max, rms)` of a sequence.
pub(crate) fn max_and_rms(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut max, mut sum, mut count) = (0.0_f64, 0.0, 0usize);
    for v in values {
        max = max.max(v);
        sum += v * v;
        count += 1;
    }
    (
        max,
        if count > 0 {
            (sum / count as f64).sqrt()
        } else {
            0.0
        },
    )
}

fn evaluate<F>(grid: &SampleGrid, cfg: &VerifyConfig, f: F) -> Result<Vec<PointResidual>, VerifyError>
where
    F: Fn(&[f64]) -> Result<PointResidual, GeomError> + Sync + Send,
{
    Ok(cfg.exec.try_map(&grid.points, |p| f(p))?)
}

fn report(
    name: &str,
    surf: &ParametricHypersurface,
    grid: &SampleGrid,
    cfg: &VerifyConfig,
    tolerance: f64,
    residuals: &[PointResidual],
) -> VerificationReport {
    let (max, rms) = max_and_rms(residuals.iter().map(|r| r.scaled));
    let (abs_max, _) = max_and_rms(residuals.iter().map(|r| r.absolute));
    VerificationReport::new(
        name,
        surf.id(),
        grid.spec.clone(),
        max,
        rms,
        tolerance,
        Some(cfg.h),
    )
    .with_metric("absolute_max", abs_max)
}

/// Fails unless the surface is flagged minimal and `max |H|` over `grid` is
/// below the configured gate. Returns the observed `max |H|`.
pub fn minimality_gate(
    surf: &ParametricHypersurface,
    grid: &SampleGrid,
    cfg: &VerifyConfig,
    check: &str,
) -> Result<f64, VerifyError> {
    if !surf.is_minimal() {
        return Err(VerifyError::PreconditionViolation {
            check: check.to_string(),
            reason: format!("surface {} is not flagged minimal", surf.id()),
        });
    }
    let values = cfg.exec.try_map(&grid.points, |p| -> Result<f64, GeomError> {
        Ok(surf.local(p, 2, ChartDiff::Exact)?.mean_curvature().abs())
    })?;
    let max_h = values.into_iter().fold(0.0, f64::max);
    if !(max_h < cfg.minimality_gate) {
        return Err(VerifyError::PreconditionViolation {
            check: check.to_string(),
            reason: format!(
                "max |H| = {max_h:e} exceeds the minimality gate {:e}",
                cfg.minimality_gate
            ),
        });
    }
    Ok(max_h)
}

/// Fails with the offending points unless `|s_V| > cutoff` on the grid.
pub fn graphical_gate(
    surf: &ParametricHypersurface,
    v: &KillingField,
    grid: &SampleGrid,
    cfg: &VerifyConfig,
) -> Result<f64, VerifyError> {
    // Nothing left to test is a failure, not a pass.
    if grid.points.is_empty() {
        return Err(VerifyError::EmptyGraphicalRegion {
            cutoff: cfg.graph_cutoff,
        });
    }
    let values = cfg.exec.try_map(&grid.points, |p| s_v(surf, v, p))?;
    let offending: Vec<Vec<f64>> = grid
        .points
        .iter()
        .zip(&values)
        .filter(|(_, s)| !(s.abs() > cfg.graph_cutoff))
        .map(|(p, _)| p.clone())
        .collect();
    if !offending.is_empty() {
        return Err(VerifyError::ZeroGraphQuantity {
            cutoff: cfg.graph_cutoff,
            points: offending,
        });
    }
    Ok(values.into_iter().map(f64::abs).fold(f64::INFINITY, f64::min))
}

fn first(surf: &ParametricHypersurface, p: &[f64]) -> Result<LocalGeometry, GeomError> {
    surf.local(p, 1, ChartDiff::Exact)
}

pub(crate) fn s_v(surf: &ParametricHypersurface, v: &KillingField, p: &[f64]) -> Result<f64, GeomError> {
    Ok(first(surf, p)?.graph_quantity(v))
}

fn s_v_dd(surf: &ParametricHypersurface, v: &KillingField, p: &[f64]) -> Result<Dd, GeomError> {
    Ok(surf.precise(p, 1)?.graph_quantity(v))
}

fn a2(surf: &ParametricHypersurface, p: &[f64]) -> Result<Dd, GeomError> {
    Ok(surf.precise(p, 2)?.a_norm_sq())
}

fn support(surf: &ParametricHypersurface, p: &[f64]) -> Result<Dd, GeomError> {
    Ok(surf.precise(p, 1)?.support())
}

fn one() -> Dd {
    Dd::from(1.0)
}

fn gradient<T, F>(
    surf: &ParametricHypersurface,
    f: &F,
    p: &[f64],
    h: f64,
    geo: &LocalGeometry,
) -> Result<SurfaceGradient, GeomError>
where
    T: FieldValue,
    F: Fn(&[f64]) -> Result<T, GeomError>,
{
    Ok(SurfaceGradient::from_partials(
        chart_partials(surf, f, p, h)?,
        &geo.g_inv,
    ))
}

/// `Δ s_V = −|A|² s_V`.
pub fn check_graph_laplacian(
    surf: &ParametricHypersurface,
    v: &KillingField,
    grid: &SampleGrid,
    cfg: &VerifyConfig,
) -> Result<VerificationReport, VerifyError> {
    let name = "graph-laplacian";
    minimality_gate(surf, grid, cfg, name)?;
    let h = cfg.h;
    let f = |q: &[f64]| s_v_dd(surf, v, q);
    let res = evaluate(grid, cfg, |p| {
        let geo = surf.local(p, 2, ChartDiff::Exact)?;
        let lap = laplace_beltrami(surf, &f, p, h)?;
        let rhs = -geo.a_norm_sq() * geo.graph_quantity(v);
        Ok(scaled(lap - rhs, &[lap, rhs]))
    })?;
    Ok(report(name, surf, grid, cfg, cfg.interior_tol, &res))
}

/// `Δ v² = 2|A|² v² + 6|∇v|²` with `v = 1/s_V`.
pub fn check_v2_identity(
    surf: &ParametricHypersurface,
    v: &KillingField,
    grid: &SampleGrid,
    cfg: &VerifyConfig,
) -> Result<VerificationReport, VerifyError> {
    let name = "v2";
    minimality_gate(surf, grid, cfg, name)?;
    let min_s = graphical_gate(surf, v, grid, cfg)?;
    let h = cfg.h;
    let vf = |q: &[f64]| Ok(one() / s_v_dd(surf, v, q)?);
    let v2 = |q: &[f64]| Ok(one() / s_v_dd(surf, v, q)?.square());
    let res = evaluate(grid, cfg, |p| {
        let geo = surf.local(p, 2, ChartDiff::Exact)?;
        let lap = laplace_beltrami(surf, &v2, p, h)?;
        let w2 = geo.graph_quantity(v).powi(-2);
        let grad = gradient(surf, &vf, p, h, &geo)?;
        let t1 = 2.0 * geo.a_norm_sq() * w2;
        let t2 = 6.0 * grad.norm_sq;
        Ok(scaled(lap - t1 - t2, &[lap, t1, t2]))
    })?;
    Ok(report(name, surf, grid, cfg, cfg.interior_tol, &res).with_metric("min_abs_s_v", min_s))
}

/// `Δ u² = −2|A|² u² + 2|∇u|²`.
pub fn check_u2_identity(
    surf: &ParametricHypersurface,
    grid: &SampleGrid,
    cfg: &VerifyConfig,
) -> Result<VerificationReport, VerifyError> {
    let name = "u2";
    minimality_gate(surf, grid, cfg, name)?;
    let h = cfg.h;
    let uf = |q: &[f64]| support(surf, q);
    let u2 = |q: &[f64]| Ok(support(surf, q)?.square());
    let res = evaluate(grid, cfg, |p| {
        let geo = surf.local(p, 2, ChartDiff::Exact)?;
        let lap = laplace_beltrami(surf, &u2, p, h)?;
        let u = geo.support();
        let grad = gradient(surf, &uf, p, h, &geo)?;
        let t1 = -2.0 * geo.a_norm_sq() * u * u;
        let t2 = 2.0 * grad.norm_sq;
        Ok(scaled(lap - t1 - t2, &[lap, t1, t2]))
    })?;
    Ok(report(name, surf, grid, cfg, cfg.interior_tol, &res))
}

/// `½ Δ|A|² = |∇A|² − |A|⁴`.
pub fn check_simons(
    surf: &ParametricHypersurface,
    grid: &SampleGrid,
    cfg: &VerifyConfig,
) -> Result<VerificationReport, VerifyError> {
    let name = "simons";
    minimality_gate(surf, grid, cfg, name)?;
    let h = cfg.h;
    let f = |q: &[f64]| a2(surf, q);
    let res = evaluate(grid, cfg, |p| {
        let geo = surf.local(p, 3, ChartDiff::Exact)?;
        let half_lap = 0.5 * laplace_beltrami(surf, &f, p, h)?;
        let grad_a = geo.nabla_a_norm_sq();
        let a4 = geo.a_norm_sq().powi(2);
        Ok(scaled(half_lap - grad_a + a4, &[half_lap, grad_a, a4]))
    })?;
    Ok(report(name, surf, grid, cfg, cfg.interior_tol, &res))
}

/// Per-point quantities of the `Q` inequality.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QTerms {
    /// `ΔQ − 2⟨∇v/v, ∇Q⟩`.
    pub d: f64,
    /// `2|v∇u + u∇v|²`.
    pub square: f64,
    /// `2v²|∇u|² + 2u²|∇v|² + 4uv⟨∇v, ∇u⟩`.
    pub expanded: f64,
    pub scale: f64,
}

pub fn q_terms(
    surf: &ParametricHypersurface,
    v: &KillingField,
    p: &[f64],
    h: f64,
) -> Result<QTerms, GeomError> {
    let geo = first(surf, p)?;
    let uf = |q: &[f64]| support(surf, q);
    let vf = |q: &[f64]| Ok(one() / s_v_dd(surf, v, q)?);
    let qf = |q: &[f64]| {
        let g = surf.precise(q, 1)?;
        Ok((g.support() / g.graph_quantity(v)).square())
    };
    let u = geo.support();
    let w = 1.0 / geo.graph_quantity(v);
    let gu = gradient(surf, &uf, p, h, &geo)?;
    let gv = gradient(surf, &vf, p, h, &geo)?;
    let gq = gradient(surf, &qf, p, h, &geo)?;
    let lap_q = laplace_beltrami(surf, &qf, p, h)?;
    let drift = 2.0 * gv.dot(&gq) / w;
    let combo: Vec<f64> = gu
        .partials
        .iter()
        .zip(&gv.partials)
        .map(|(a, b)| w * a + u * b)
        .collect();
    let combo = SurfaceGradient::from_partials(combo, &geo.g_inv);
    let square = 2.0 * combo.norm_sq;
    let expanded = 2.0 * w * w * gu.norm_sq + 2.0 * u * u * gv.norm_sq + 4.0 * u * w * gv.dot(&gu);
    Ok(QTerms {
        d: lap_q - drift,
        square,
        expanded,
        scale: lap_q.abs() + drift.abs() + square.abs(),
    })
}

/// `ΔQ − 2⟨∇v/v, ∇Q⟩ ≥ 0`, checked together with the exact rearrangement
/// `ΔQ − 2⟨∇v/v, ∇Q⟩ = 2|v∇u + u∇v|²`.
///
/// The per-point residual is the larger of the scaled rearrangement
/// residual and the inequality violation `max(0, −D)`.
pub fn check_q_inequality(
    surf: &ParametricHypersurface,
    v: &KillingField,
    grid: &SampleGrid,
    cfg: &VerifyConfig,
) -> Result<VerificationReport, VerifyError> {
    let name = "q-inequality";
    minimality_gate(surf, grid, cfg, name)?;
    let min_s = graphical_gate(surf, v, grid, cfg)?;
    let terms = cfg.exec.try_map(&grid.points, |p| q_terms(surf, v, p, cfg.h))?;
    let identity: Vec<PointResidual> = terms
        .iter()
        .map(|t| {
            let r = scaled(t.d - t.square, &[t.scale]);
            PointResidual {
                // `+ 0.0` turns a −0 from `-t.d` into +0.
                scaled: r.scaled.max(-t.d) + 0.0,
                absolute: r.absolute,
            }
        })
        .collect();
    let min_d = terms.iter().map(|t| t.d).fold(f64::INFINITY, f64::min);
    let algebra = terms
        .iter()
        .map(|t| (t.expanded - t.square).abs() / (t.expanded.abs() + t.square.abs()).max(1.0))
        .fold(0.0, f64::max);
    let mut rep = report(name, surf, grid, cfg, cfg.q_tol, &identity)
        .with_metric("min_d", min_d)
        .with_metric("rearrangement_residual", algebra)
        .with_metric("min_abs_s_v", min_s);
    if algebra > 1e-10 {
        rep.passed = false;
        rep = rep.with_note("assembled square disagrees with its expansion");
    }
    Ok(rep)
}
