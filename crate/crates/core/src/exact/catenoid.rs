use std::f64::consts::PI;
use std::sync::Arc;

use serde::Serialize;

use crate::geom::{Axis, Face, ParamDomain, ParametricHypersurface, SmoothMap, Topology};
use crate::jet::Scalar;

/// Half-span `s0` of the profile parameter and scale `c` of the critical
/// catenoid in the unit ball of R³.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CatenoidParameters {
    /// Root of `s tanh s = 1` after Newton polishing.
    pub s0: f64,
    /// The same root from bisection alone.
    pub s0_bisection: f64,
    /// `1/√(cosh² s0 + s0²)`.
    pub c: f64,
    pub n: usize,
}

impl CatenoidParameters {
    /// `s0 tanh s0 − 1`.
    pub fn root_residual(&self) -> f64 {
        self.s0 * self.s0.tanh() - 1.0
    }

    /// `c² cosh² s0 + c² s0² − 1`.
    pub fn sphere_residual(&self) -> f64 {
        let c2 = self.c * self.c;
        c2 * self.s0.cosh().powi(2) + c2 * self.s0 * self.s0 - 1.0
    }

    pub fn area(&self) -> f64 {
        let s = self.s0;
        2.0 * PI * self.c * self.c * (s + s.sinh() * s.cosh())
    }

    pub fn boundary_length(&self) -> f64 {
        2.0 * 2.0 * PI * self.c * self.s0.cosh()
    }

    /// `|A|²` on the circle with profile parameter `s`.
    pub fn a_norm_sq(&self, s: f64) -> f64 {
        2.0 / (self.c * self.c * s.cosh().powi(4))
    }
}

fn residual(s: f64) -> f64 {
    s * s.tanh() - 1.0
}

/// Solves `s tanh s = 1` on `[1, 1.5]` by bisection, then polishes with Newton.
pub fn critical_catenoid_parameters() -> CatenoidParameters {
    let (mut lo, mut hi) = (1.0_f64, 1.5_f64);
    assert!(residual(lo) < 0.0 && residual(hi) > 0.0, "bracket");
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if residual(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let s0_bisection = 0.5 * (lo + hi);
    let mut s = s0_bisection;
    for _ in 0..8 {
        let ds = residual(s) / (s.tanh() + s / s.cosh().powi(2));
        s -= ds;
        if ds.abs() < 1e-16 {
            break;
        }
    }
    CatenoidParameters {
        s0: s,
        s0_bisection,
        c: 1.0 / (s.cosh().powi(2) + s * s).sqrt(),
        n: 2,
    }
}

/// `(θ, s) ↦ (c cosh s cos θ, c cosh s sin θ, c s)`.
struct CatenoidChart {
    c: f64,
}

impl SmoothMap for CatenoidChart {
    fn param_dim(&self) -> usize {
        2
    }

    fn ambient_dim(&self) -> usize {
        3
    }

    fn map<S: Scalar>(&self, p: &[S]) -> Vec<S> {
        let r = p[1].cosh() * self.c;
        vec![r * p[0].cos(), r * p[0].sin(), p[1] * self.c]
    }
}

/// The critical catenoid over `θ ∈ [0, 2π)` (periodic), `s ∈ [−s0, s0]`.
///
/// The normal `(cos θ, sin θ, −sinh s)/cosh s` points away from the axis,
/// so `s_{e3} = −tanh s` and `u = c (1 − s tanh s)`.
pub fn critical_catenoid() -> ParametricHypersurface {
    let params = critical_catenoid_parameters();
    ParametricHypersurface::new(
        "catenoid",
        Arc::new(CatenoidChart { c: params.c }),
        ParamDomain::new(vec![
            Axis::periodic(0.0, 2.0 * PI),
            Axis::closed(-params.s0, params.s0),
        ]),
    )
    .with_boundary_faces(vec![Face::lo(1), Face::hi(1)])
    .with_flags(true, true)
    .with_topology(Topology::Annulus)
}
