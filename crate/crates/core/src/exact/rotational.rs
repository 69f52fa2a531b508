//! Minimal hypersurfaces of revolution meeting the unit sphere orthogonally.
//!
//! The profile `r(z)` solves `r'' = (n−1)(1 + r'²)/r` with `r(0) = a`,
//! `r'(0) = 0`. The waist `a` is chosen by shooting so that the support
//! function `u = (r − z r')/√(1 + r'²)` vanishes where the profile first
//! meets the unit sphere.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::Serialize;

use super::ode::{integrate_to_event, Tolerance};
use super::{orient, sphere_point, ExactError};
use crate::geom::{Axis, Face, ParamDomain, ParametricHypersurface, SmoothMap, Topology};
use crate::jet::{Scalar, MAX_VARS};
use crate::par::Exec;

/// Taylor order of the local profile expansions.
const ORDER: usize = 20;
/// Target spacing of expansion centres.
const SPACING: f64 = 0.0125;

/// Waist radii scanned for a sign change of the shooting functional.
pub const SCAN_RANGE: (f64, f64) = (0.2, 0.98);
const SCAN_SAMPLES: usize = 40;
const BISECTION_TOL: f64 = 1e-11;

/// State of the profile where it meets the unit sphere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Crossing {
    pub z: f64,
    pub r: f64,
    pub dr: f64,
    /// Support function of the profile at the crossing.
    pub support: f64,
}

/// Integrates the profile from waist `a` to the first sphere crossing.
pub fn profile_crossing(n: usize, a: f64) -> Result<Crossing, ExactError> {
    let k = (n - 1) as f64;
    let rhs = |_z: f64, y: &[f64; 2]| [y[1], k * (1.0 + y[1] * y[1]) / y[0]];
    let event = |z: f64, y: &[f64; 2]| y[0] * y[0] + z * z - 1.0;
    let hit = integrate_to_event(&rhs, &event, 0.0, [a, 0.0], 1.0, Tolerance::default())
        .ok_or_else(|| ExactError::Integration(format!("no sphere crossing from waist {a}")))?;
    let (z, r, dr) = (hit.t, hit.y[0], hit.y[1]);
    Ok(Crossing {
        z,
        r,
        dr,
        support: (r - z * dr) / (1.0 + dr * dr).sqrt(),
    })
}

/// Samples of the shooting functional `a ↦ u(a)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShootingScan {
    pub samples: Vec<(f64, f64)>,
}

/// Finds the waist radius whose profile meets the sphere orthogonally.
///
/// Scans [`SCAN_RANGE`] (in parallel under `exec`), takes the first sign
/// change, and bisects it down to `1e-11` in `a`.
pub fn shoot_waist(n: usize, exec: Exec) -> Result<(f64, Crossing, ShootingScan), ExactError> {
    let (lo, hi) = SCAN_RANGE;
    let grid: Vec<f64> = (0..SCAN_SAMPLES)
        .map(|i| lo + (hi - lo) * i as f64 / (SCAN_SAMPLES - 1) as f64)
        .collect();
    let values = exec.try_map(&grid, |&a| profile_crossing(n, a).map(|c| (a, c.support)))?;
    let scan = ShootingScan { samples: values };
    let bracket = scan
        .samples
        .windows(2)
        .find(|w| w[0].1.signum() != w[1].1.signum())
        .map(|w| (w[0], w[1]));
    let Some(((mut a0, mut g0), (mut a1, _))) = bracket else {
        return Err(ExactError::ShootingNoBracket {
            lo,
            hi,
            samples: SCAN_SAMPLES,
            scan: scan.samples,
        });
    };
    while a1 - a0 > BISECTION_TOL {
        let mid = 0.5 * (a0 + a1);
        let g = profile_crossing(n, mid)?.support;
        if g == 0.0 {
            a0 = mid;
            a1 = mid;
            break;
        }
        if g.signum() == g0.signum() {
            a0 = mid;
            g0 = g;
        } else {
            a1 = mid;
        }
    }
    let a = 0.5 * (a0 + a1);
    Ok((a, profile_crossing(n, a)?, scan))
}

/// Coefficients of the Taylor series of a profile solution about a point
/// where `r = r0`, `r' = r1`, from `r r'' = (n−1)(1 + r'²)`.
fn taylor_coefficients(n: usize, r0: f64, r1: f64) -> [f64; ORDER + 1] {
    let k = (n - 1) as f64;
    let mut a = [0.0; ORDER + 1];
    a[0] = r0;
    a[1] = r1;
    for m in 0..=ORDER - 2 {
        // Coefficient of t^m on both sides.
        let mut rhs: f64 = (0..=m)
            .map(|j| (j + 1) as f64 * a[j + 1] * (m - j + 1) as f64 * a[m - j + 1])
            .sum();
        if m == 0 {
            rhs += 1.0;
        }
        rhs *= k;
        let lhs_rest: f64 = (1..=m)
            .map(|j| a[j] * ((m - j + 2) * (m - j + 1)) as f64 * a[m - j + 2])
            .sum();
        a[m + 2] = (rhs - lhs_rest) / (a[0] * ((m + 2) * (m + 1)) as f64);
    }
    a
}

fn horner<S: Scalar>(c: &[f64], t: S) -> S {
    c.iter().rev().fold(S::constant(0.0), |acc, &ck| acc * t + ck)
}

/// The profile as a chain of local Taylor expansions centred at
/// `z_k = k δ`, `k = −K..=K`, with `z_K` the sphere crossing.
#[derive(Clone, Debug)]
pub struct ProfileCurve {
    pub n: usize,
    pub waist: f64,
    pub spacing: f64,
    /// Coefficients for centres `z_0, z_1, …, z_K`; negative centres use the
    /// mirror image `r(−z) = r(z)`.
    coeffs: Vec<[f64; ORDER + 1]>,
    pub z_max: f64,
}

impl ProfileCurve {
    pub fn new(n: usize, waist: f64, z_max: f64) -> Self {
        let count = (z_max / SPACING).ceil().max(1.0) as usize;
        let spacing = z_max / count as f64;
        let mut coeffs = Vec::with_capacity(count + 1);
        let (mut r0, mut r1) = (waist, 0.0);
        for _ in 0..=count {
            let c = taylor_coefficients(n, r0, r1);
            r0 = horner(&c, spacing);
            let dc: Vec<f64> = (1..=ORDER).map(|j| j as f64 * c[j]).collect();
            r1 = horner(&dc, spacing);
            coeffs.push(c);
        }
        Self {
            n,
            waist,
            spacing,
            coeffs,
            z_max,
        }
    }

    /// Expansion nearest to `z`, as `(centre, coefficients in t = z − centre)`.
    fn local(&self, z: f64) -> (f64, [f64; ORDER + 1]) {
        let k = (z.abs() / self.spacing).round() as usize;
        let k = k.min(self.coeffs.len() - 1);
        let c = self.coeffs[k];
        if z >= 0.0 {
            (k as f64 * self.spacing, c)
        } else {
            let mut m = c;
            for (j, x) in m.iter_mut().enumerate() {
                if j % 2 == 1 {
                    *x = -*x;
                }
            }
            (-(k as f64) * self.spacing, m)
        }
    }

    pub fn eval<S: Scalar>(&self, z: S) -> S {
        let (centre, c) = self.local(z.value());
        horner(&c, z - centre)
    }

    /// `(r, r', r'')` at `z`.
    pub fn derivatives(&self, z: f64) -> (f64, f64, f64) {
        let (centre, c) = self.local(z);
        let t = z - centre;
        let d1: Vec<f64> = (1..=ORDER).map(|j| j as f64 * c[j]).collect();
        let d2: Vec<f64> = (2..=ORDER).map(|j| (j * (j - 1)) as f64 * c[j]).collect();
        (horner(&c, t), horner(&d1, t), horner(&d2, t))
    }

    /// `r'' − (n−1)(1 + r'²)/r` at `z`.
    pub fn ode_residual(&self, z: f64) -> f64 {
        let (r, dr, ddr) = self.derivatives(z);
        ddr - (self.n - 1) as f64 * (1.0 + dr * dr) / r
    }

    /// Newton solve of `r(z)² + z² = 1` near `z_guess`.
    pub fn sphere_crossing(&self, z_guess: f64) -> f64 {
        let mut z = z_guess;
        for _ in 0..20 {
            let (r, dr, _) = self.derivatives(z);
            let step = (r * r + z * z - 1.0) / (2.0 * r * dr + 2.0 * z);
            z -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        z
    }
}

/// `(φ…, θ, z) ↦ (r(z) ω(φ…, θ), z)`.
struct RevolutionChart {
    profile: ProfileCurve,
}

impl SmoothMap for RevolutionChart {
    fn param_dim(&self) -> usize {
        self.profile.n
    }

    fn ambient_dim(&self) -> usize {
        self.profile.n + 1
    }

    fn map<S: Scalar>(&self, p: &[S]) -> Vec<S> {
        let n = self.profile.n;
        let r = self.profile.eval(p[n - 1]);
        let mut x: Vec<S> = sphere_point(&p[..n - 1]).into_iter().map(|w| w * r).collect();
        x.push(p[n - 1]);
        x
    }
}

/// Free-boundary minimal hypersurface of revolution in the unit ball of
/// `R^{n+1}`, returned with its profile and the shooting scan.
pub fn rotational_minimal_with_profile(
    n: usize,
    exec: Exec,
) -> Result<(ParametricHypersurface, ProfileCurve, ShootingScan), ExactError> {
    if !(2..=MAX_VARS).contains(&n) {
        return Err(ExactError::UnsupportedDimension(n));
    }
    let (a, crossing, scan) = shoot_waist(n, exec)?;
    let rough = ProfileCurve::new(n, a, crossing.z);
    let z_b = rough.sphere_crossing(crossing.z);
    let profile = ProfileCurve::new(n, a, z_b);
    let mut axes = Vec::new();
    let mut polar = Vec::new();
    for k in 0..n - 2 {
        axes.push(Axis::closed(0.0, PI));
        polar.push(Face::lo(k));
        polar.push(Face::hi(k));
    }
    axes.push(Axis::periodic(0.0, 2.0 * PI));
    axes.push(Axis::closed(-z_b, z_b));
    let surf = ParametricHypersurface::new(
        format!("rotational{n}"),
        Arc::new(RevolutionChart {
            profile: profile.clone(),
        }),
        ParamDomain::new(axes),
    )
    .with_boundary_faces(vec![Face::lo(n - 1), Face::hi(n - 1)])
    .with_polar_faces(polar)
    .with_flags(true, true)
    .with_topology(Topology::Annulus);
    let probe: Vec<f64> = (0..n).map(|k| if k == n - 1 { 0.0 } else { 1.0 }).collect();
    let surf = orient(surf, &probe, move |x| {
        let mut radial = *x;
        radial[n] = 0.0;
        radial
    });
    Ok((surf, profile, scan))
}

pub fn rotational_minimal(n: usize) -> Result<ParametricHypersurface, ExactError> {
    rotational_minimal_with_profile(n, Exec::default()).map(|(s, _, _)| s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn taylor_series_of_catenary() {
        // n = 2: r = a cosh(z/a).
        let a = 0.7;
        let c = taylor_coefficients(2, a, 0.0);
        let z: f64 = 0.05;
        let r = horner(&c, z);
        assert!((r - a * (z / a).cosh()).abs() < 1e-15);
    }

    #[test]
    fn profile_chain_matches_catenary() {
        let a = 0.5;
        let p = ProfileCurve::new(2, a, 0.6);
        for &z in &[-0.6, -0.31, 0.0, 0.0062, 0.3, 0.59] {
            let (r, dr, _) = p.derivatives(z);
            assert!((r - a * (z / a).cosh()).abs() < 1e-13, "z={z}");
            assert!((dr - (z / a).sinh()).abs() < 1e-12, "z={z}");
            assert!(p.ode_residual(z).abs() < 1e-11);
        }
    }
}
