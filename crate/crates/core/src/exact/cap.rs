use std::f64::consts::PI;
use std::sync::Arc;

use super::{orient, sphere_point, ExactError};
use crate::geom::{Axis, Face, ParamDomain, ParametricHypersurface, SmoothMap, Topology};
use crate::jet::{Scalar, MAX_VARS};

/// Radius and centre height of the sphere whose cap of the given height
/// has its boundary on the equator of the unit sphere.
pub fn cap_geometry(height: f64) -> (f64, f64) {
    let radius = (1.0 + height * height) / (2.0 * height);
    (radius, height - radius)
}

/// `(ψ, φ…, θ) ↦ z_c e_{n+1} + R ω(ψ, φ…, θ)`, `ψ` measured from `+e_{n+1}`.
struct CapChart {
    n: usize,
    radius: f64,
    center: f64,
}

impl SmoothMap for CapChart {
    fn param_dim(&self) -> usize {
        self.n
    }

    fn ambient_dim(&self) -> usize {
        self.n + 1
    }

    fn map<S: Scalar>(&self, p: &[S]) -> Vec<S> {
        let mut x: Vec<S> = sphere_point(p).into_iter().map(|w| w * self.radius).collect();
        x[self.n] = x[self.n] + self.center;
        x
    }
}

/// Cap of a round sphere meeting the unit sphere along its equator, top at
/// height `height`. Not minimal: `H = n/R` with the outward normal.
pub fn spherical_cap(n: usize, height: f64) -> Result<ParametricHypersurface, ExactError> {
    if !(2..=MAX_VARS).contains(&n) {
        return Err(ExactError::UnsupportedDimension(n));
    }
    if !(height > 0.0 && height < 2.0) {
        return Err(ExactError::InvalidHeight(height));
    }
    let (radius, center) = cap_geometry(height);
    let psi_max = (-center / radius).acos();
    let mut axes = vec![Axis::closed(0.0, psi_max)];
    let mut polar = vec![Face::lo(0)];
    for k in 1..n - 1 {
        axes.push(Axis::closed(0.0, PI));
        polar.push(Face::lo(k));
        polar.push(Face::hi(k));
    }
    axes.push(Axis::periodic(0.0, 2.0 * PI));
    let surf = ParametricHypersurface::new(
        format!("cap{n}"),
        Arc::new(CapChart { n, radius, center }),
        ParamDomain::new(axes),
    )
    .with_boundary_faces(vec![Face::hi(0)])
    .with_polar_faces(polar)
    .with_flags(false, false)
    .with_topology(Topology::Disk);
    let probe: Vec<f64> = (0..n).map(|k| if k == 0 { 0.5 * psi_max } else { 1.0 }).collect();
    Ok(orient(surf, &probe, move |x| {
        let mut r = *x;
        r[n] -= center;
        r
    }))
}
