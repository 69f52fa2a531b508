//! Chart-based differential operators acting on scalar fields.
//!
//! The fields themselves are usually evaluated from exact chart jets; the
//! operators here add one layer of finite differencing with step `h`.

use super::local::{LocalGeometry, PMat};
use super::precise::FieldValue;
use super::surface::{ChartDiff, Face, ParametricHypersurface};
use super::GeomError;

/// Checks that every point within `reach` of `p` along each non-periodic
/// axis stays inside the closed domain.
fn check_reach(surf: &ParametricHypersurface, p: &[f64], reach: f64) -> Result<(), GeomError> {
    for (axis, ax) in surf.domain().axes.iter().enumerate() {
        if ax.periodic {
            continue;
        }
        let slack = 1e-12 * ax.length().abs().max(1.0);
        if p[axis] - reach < ax.lo - slack || p[axis] + reach > ax.hi + slack {
            return Err(GeomError::StencilOutOfDomain {
                point: p.to_vec(),
                axis,
                step: reach,
            });
        }
    }
    Ok(())
}

fn shifted(p: &[f64], moves: &[(usize, f64)]) -> Vec<f64> {
    let mut q = p.to_vec();
    for &(axis, d) in moves {
        q[axis] += d;
    }
    q
}

/// Second-order Laplace–Beltrami operator in conservative form,
/// `Δf = (1/√g) ∂_i(√g g^{ij} ∂_j f)`.
///
/// The fluxes `√g g^{ij} ∂_j f` are formed at the half points `p ± h/2 e_i`
/// (metric exact there, `∂_j f` by compact differences), then differenced
/// once more. The stencil reaches `h` along every axis. Field values are
/// subtracted before rounding (see [`FieldValue`]).
pub fn laplace_beltrami<T, F>(
    surf: &ParametricHypersurface,
    f: &F,
    p: &[f64],
    h: f64,
) -> Result<f64, GeomError>
where
    T: FieldValue,
    F: Fn(&[f64]) -> Result<T, GeomError>,
{
    let n = surf.dim();
    check_reach(surf, p, h)?;
    let half = 0.5 * h;
    let f0 = f(p)?;
    let mut axial = vec![[f0; 2]; n];
    for (i, vals) in axial.iter_mut().enumerate() {
        vals[0] = f(&shifted(p, &[(i, -h)]))?;
        vals[1] = f(&shifted(p, &[(i, h)]))?;
    }
    // corner[i][j][a][b] = f(p + (2a-1) h/2 e_i + (2b-1) h/2 e_j), i < j.
    let mut corner = vec![vec![[[f0; 2]; 2]; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            for a in 0..2 {
                for b in 0..2 {
                    let si = if a == 0 { -half } else { half };
                    let sj = if b == 0 { -half } else { half };
                    corner[i][j][a][b] = f(&shifted(p, &[(i, si), (j, sj)]))?;
                }
            }
        }
    }
    let corner_at = |i: usize, a: usize, j: usize, b: usize| {
        if i < j {
            corner[i][j][a][b]
        } else {
            corner[j][i][b][a]
        }
    };
    let mut div = 0.0;
    for i in 0..n {
        let mut flux = [0.0; 2];
        for (a, fl) in flux.iter_mut().enumerate() {
            let sign = if a == 0 { -1.0 } else { 1.0 };
            let q = shifted(p, &[(i, sign * half)]);
            let geo = surf.local(&q, 1, ChartDiff::Exact)?;
            let mut grad = vec![0.0; n];
            for (j, gj) in grad.iter_mut().enumerate() {
                *gj = if j == i {
                    sign * axial[i][a].minus(f0) / h
                } else {
                    corner_at(i, a, j, 1).minus(corner_at(i, a, j, 0)) / h
                };
            }
            *fl = geo.sqrt_det * (0..n).map(|j| geo.g_inv[(i, j)] * grad[j]).sum::<f64>();
        }
        div += (flux[1] - flux[0]) / h;
    }
    let geo = surf.local(p, 1, ChartDiff::Exact)?;
    Ok(div / geo.sqrt_det)
}

/// Richardson extrapolation of [`laplace_beltrami`]: `(4Δ_{h/2} − Δ_h)/3`,
/// fourth order.
pub fn laplace_beltrami_4<T, F>(
    surf: &ParametricHypersurface,
    f: &F,
    p: &[f64],
    h: f64,
) -> Result<f64, GeomError>
where
    T: FieldValue,
    F: Fn(&[f64]) -> Result<T, GeomError>,
{
    let coarse = laplace_beltrami(surf, f, p, h)?;
    let fine = laplace_beltrami(surf, f, p, 0.5 * h)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Gradient of a scalar field: chart partials, contravariant components and
/// squared norm.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceGradient {
    pub partials: Vec<f64>,
    pub components: Vec<f64>,
    pub norm_sq: f64,
}

impl SurfaceGradient {
    pub fn from_partials(partials: Vec<f64>, g_inv: &PMat) -> Self {
        let n = partials.len();
        let components: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| g_inv[(i, j)] * partials[j]).sum())
            .collect();
        let norm_sq = components.iter().zip(&partials).map(|(a, b)| a * b).sum();
        Self {
            partials,
            components,
            norm_sq,
        }
    }

    /// `⟨∇f, ∇k⟩ = g^{ij} ∂_i f ∂_j k`.
    pub fn dot(&self, other: &SurfaceGradient) -> f64 {
        self.components
            .iter()
            .zip(&other.partials)
            .map(|(a, b)| a * b)
            .sum()
    }
}

/// Central second-order chart partials of `f`.
pub fn chart_partials<T, F>(
    surf: &ParametricHypersurface,
    f: &F,
    p: &[f64],
    h: f64,
) -> Result<Vec<f64>, GeomError>
where
    T: FieldValue,
    F: Fn(&[f64]) -> Result<T, GeomError>,
{
    check_reach(surf, p, h)?;
    (0..surf.dim())
        .map(|i| Ok(f(&shifted(p, &[(i, h)]))?.minus(f(&shifted(p, &[(i, -h)]))?) / (2.0 * h)))
        .collect()
}

/// `(∇f)^i = g^{ij} ∂_j f` and `|∇f|²`, with central differences of step `h`.
pub fn surface_gradient<T, F>(
    surf: &ParametricHypersurface,
    f: &F,
    p: &[f64],
    h: f64,
) -> Result<SurfaceGradient, GeomError>
where
    T: FieldValue,
    F: Fn(&[f64]) -> Result<T, GeomError>,
{
    let partials = chart_partials(surf, f, p, h)?;
    let geo = surf.local(p, 1, ChartDiff::Exact)?;
    Ok(SurfaceGradient::from_partials(partials, &geo.g_inv))
}

/// Chart components of the outward unit conormal along `face`:
/// `τ^k = ± g^{ka} / √g^{aa}` with `a` the face axis.
pub fn conormal(geo: &LocalGeometry, face: Face) -> Vec<f64> {
    let a = face.axis;
    let scale = face.outward_sign() / geo.g_inv[(a, a)].sqrt();
    (0..geo.n).map(|k| geo.g_inv[(k, a)] * scale).collect()
}
