use std::f64::consts::PI;
use std::sync::Arc;

use super::{orient, sphere_point, ExactError};
use crate::geom::{AVec, Axis, Face, ParamDomain, ParametricHypersurface, SmoothMap, Topology};
use crate::jet::{Scalar, MAX_VARS};

/// `(r, φ_1, …, φ_{n-2}, θ) ↦ (r ω, 0)`.
struct DiskChart {
    n: usize,
}

impl SmoothMap for DiskChart {
    fn param_dim(&self) -> usize {
        self.n
    }

    fn ambient_dim(&self) -> usize {
        self.n + 1
    }

    fn map<S: Scalar>(&self, p: &[S]) -> Vec<S> {
        let mut x: Vec<S> = sphere_point(&p[1..]).into_iter().map(|w| w * p[0]).collect();
        x.push(S::constant(0.0));
        x
    }
}

/// Flat unit `n`-disk in `{x_{n+1} = 0}` in polar-type coordinates, with
/// normal `+e_{n+1}`.
///
/// Degenerate faces: `r = 0` and both ends of every polar angle.
pub fn equatorial_disk(n: usize) -> Result<ParametricHypersurface, ExactError> {
    if !(2..=MAX_VARS).contains(&n) {
        return Err(ExactError::UnsupportedDimension(n));
    }
    let mut axes = vec![Axis::closed(0.0, 1.0)];
    let mut polar = vec![Face::lo(0)];
    for k in 1..n - 1 {
        axes.push(Axis::closed(0.0, PI));
        polar.push(Face::lo(k));
        polar.push(Face::hi(k));
    }
    axes.push(Axis::periodic(0.0, 2.0 * PI));
    let surf = ParametricHypersurface::new(
        format!("disk{n}"),
        Arc::new(DiskChart { n }),
        ParamDomain::new(axes),
    )
    .with_boundary_faces(vec![Face::hi(0)])
    .with_polar_faces(polar)
    .with_flags(true, true)
    .with_topology(Topology::Disk);
    let probe: Vec<f64> = (0..n).map(|k| if k == 0 { 0.5 } else { 1.0 }).collect();
    Ok(orient(surf, &probe, |_| {
        let mut e = AVec::zeros();
        e[n] = 1.0;
        e
    }))
}
