//! Sign scan of `s_V` and refinement of its zeros.

use super::report::{GridSpec, VerificationReport};
use super::{VerifyConfig, VerifyError};
use crate::geom::{KillingField, ParametricHypersurface, Side, Topology};

/// Nodes with `|s_V|` at or below this count as zeros without refinement.
const NODE_ZERO: f64 = 1e-12;
/// Parameter-space length at which edge bisection stops.
const BISECTION_TOL: f64 = 1e-10;
/// Locations copied into the report; the full list stays in [`ZeroSearch`].
const REPORTED_LOCATIONS: usize = 1024;

/// Outcome of [`killing_zero_search`].
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroSearch {
    /// Parameter points where `s_V` vanishes (to the bisection tolerance).
    pub zeros: Vec<Vec<f64>>,
    pub min_s_v: f64,
    pub max_s_v: f64,
    pub min_abs_s_v: f64,
    /// No zero and a constant sign on every node.
    pub certified_sign: Option<f64>,
    pub report: VerificationReport,
}

fn axis_nodes(surf: &ParametricHypersurface, axis: usize, count: usize) -> Vec<f64> {
    let ax = surf.domain().axes[axis];
    if ax.periodic {
        return (0..count)
            .map(|i| ax.lo + ax.length() * i as f64 / count as f64)
            .collect();
    }
    // Coordinate poles are nudged inward; the chart is singular there.
    let nudge = 1e-9 * ax.length();
    let polar = |side: Side| {
        surf.polar_faces()
            .iter()
            .any(|f| f.axis == axis && f.side == side)
    };
    let lo = if polar(Side::Lo) { ax.lo + nudge } else { ax.lo };
    let hi = if polar(Side::Hi) { ax.hi - nudge } else { ax.hi };
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}

/// Scans `s_V` on a dense closed grid of `cfg.zero_grid` nodes per axis,
/// bisects every sign change along grid edges to `1e-10` in parameter, and
/// otherwise reports the sign and the minimum of `|s_V|`.
///
/// Passing means: zeros were found and `|s_V|` there is below
/// `cfg.zero_tol`, or no sign change exists on a disk (positivity holds at
/// grid resolution only). A non-disk without zeros fails.
pub fn killing_zero_search(
    surf: &ParametricHypersurface,
    v: &KillingField,
    cfg: &VerifyConfig,
) -> Result<ZeroSearch, VerifyError> {
    let d = surf.dim();
    let count = cfg.zero_grid.max(2);
    let nodes: Vec<Vec<f64>> = (0..d).map(|k| axis_nodes(surf, k, count)).collect();
    let total = count.pow(d as u32);
    let index = |mut idx: usize| -> Vec<usize> {
        (0..d)
            .map(|_| {
                let i = idx % count;
                idx /= count;
                i
            })
            .collect()
    };
    let point = |ix: &[usize]| -> Vec<f64> { ix.iter().enumerate().map(|(k, &i)| nodes[k][i]).collect() };
    let s = |p: &[f64]| -> Option<f64> {
        surf.local(p, 1, crate::geom::ChartDiff::Exact)
            .ok()
            .map(|g| g.graph_quantity(v))
            .filter(|x| x.is_finite())
    };
    let values: Vec<Option<f64>> = cfg.exec.map_range(total, |i| s(&point(&index(i))));

    let mut strides = vec![1usize; d];
    for k in 1..d {
        strides[k] = strides[k - 1] * count;
    }
    let edge_zeros: Vec<Vec<Vec<f64>>> = cfg.exec.map_range(total, |i| {
        let Some(sa) = values[i] else { return Vec::new() };
        if sa.abs() <= NODE_ZERO {
            return vec![point(&index(i))];
        }
        let ix = index(i);
        let mut found = Vec::new();
        for k in 0..d {
            let periodic = surf.domain().axes[k].periodic;
            let j = if ix[k] + 1 < count {
                i + strides[k]
            } else if periodic {
                i + strides[k] - count * strides[k]
            } else {
                continue;
            };
            let Some(sb) = values[j] else { continue };
            if sb.abs() <= NODE_ZERO || sa * sb > 0.0 {
                continue;
            }
            let a = point(&ix);
            let mut b = a.clone();
            b[k] = if ix[k] + 1 < count {
                nodes[k][ix[k] + 1]
            } else {
                a[k] + surf.domain().axes[k].length() / count as f64
            };
            let (mut lo, mut hi) = (a[k], b[k]);
            let mut p = a.clone();
            while hi - lo > BISECTION_TOL {
                p[k] = 0.5 * (lo + hi);
                match s(&p) {
                    Some(sm) if sm * sa > 0.0 => lo = p[k],
                    Some(_) => hi = p[k],
                    None => break,
                }
            }
            p[k] = 0.5 * (lo + hi);
            found.push(p);
        }
        found
    });
    let zeros: Vec<Vec<f64>> = edge_zeros.into_iter().flatten().collect();
    let finite: Vec<f64> = values.iter().flatten().copied().collect();
    let min_s_v = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let max_s_v = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min_abs_s_v = finite.iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min);

    let residuals: Vec<f64> = zeros
        .iter()
        .map(|p| s(p).map_or(f64::INFINITY, f64::abs))
        .collect();
    let spec = GridSpec {
        kind: "dense".into(),
        counts: vec![count; d],
        points: total,
        description: "closed node grid with edge bisection".into(),
    };
    let certified_sign = if zeros.is_empty() && (min_s_v > 0.0 || max_s_v < 0.0) {
        Some(min_s_v.signum())
    } else {
        None
    };
    let (max, l2, note) = if !zeros.is_empty() {
        let max = residuals.iter().copied().fold(0.0, f64::max);
        let l2 = (residuals.iter().map(|r| r * r).sum::<f64>() / residuals.len() as f64).sqrt();
        (max, l2, format!("{} zero(s) of s_V located", zeros.len()))
    } else if surf.topology() == Topology::Disk {
        let sign = if min_s_v > 0.0 { "positive" } else { "negative" };
        (
            0.0,
            0.0,
            format!("no sign change: s_V certified {sign} at grid resolution, min s_V = {min_s_v}"),
        )
    } else {
        (
            min_abs_s_v,
            min_abs_s_v,
            "no zero of s_V found on a surface that is not a disk".to_string(),
        )
    };
    let mut report = VerificationReport::new("killing-zeros", surf.id(), spec, max, l2, cfg.zero_tol, None)
        .with_note(note)
        .with_metric("zero_count", zeros.len() as f64)
        .with_metric("min_s_v", min_s_v)
        .with_metric("max_s_v", max_s_v)
        .with_metric("min_abs_s_v", min_abs_s_v);
    report.locations = zeros.iter().take(REPORTED_LOCATIONS).cloned().collect();
    Ok(ZeroSearch {
        zeros,
        min_s_v,
        max_s_v,
        min_abs_s_v,
        certified_sign,
        report,
    })
}
