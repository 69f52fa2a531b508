//! Exact free-boundary minimal hypersurfaces and non-minimal controls.

pub mod cap;
pub mod catenoid;
pub mod disk;
pub mod export;
pub mod ode;
pub mod rotational;

use thiserror::Error;

use crate::geom::{AVec, ChartDiff, GeomError, ParametricHypersurface};
use crate::jet::Scalar;

pub use cap::spherical_cap;
pub use catenoid::{critical_catenoid, critical_catenoid_parameters, CatenoidParameters};
pub use disk::equatorial_disk;
pub use rotational::{
    rotational_minimal, rotational_minimal_with_profile, shoot_waist, Crossing, ProfileCurve, ShootingScan,
};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ExactError {
    #[error("dimension {0} is not supported here")]
    UnsupportedDimension(usize),
    #[error("cap height {0} must lie in (0, 2)")]
    InvalidHeight(f64),
    #[error(
        "no sign change of the orthogonality functional over waist radii {lo}..{hi} ({samples} samples)"
    )]
    ShootingNoBracket {
        lo: f64,
        hi: f64,
        samples: usize,
        scan: Vec<(f64, f64)>,
    },
    #[error("profile integration failed: {0}")]
    Integration(String),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// Point of the unit sphere `S^m` from `m` angles: the first is the polar
/// angle measured from the last axis, the final one is periodic.
///
/// For `m = 2`: `(sinφ cosθ, sinφ sinθ, cosφ)`.
pub fn sphere_point<S: Scalar>(angles: &[S]) -> Vec<S> {
    let m = angles.len();
    if m == 1 {
        return vec![angles[0].cos(), angles[0].sin()];
    }
    let mut rest = sphere_point(&angles[1..]);
    let s = angles[0].sin();
    for x in rest.iter_mut() {
        *x = *x * s;
    }
    rest.push(angles[0].cos());
    rest
}

/// Flips the surface if its normal at `p` has negative inner product with
/// `reference(F(p))`.
pub(crate) fn orient(
    surf: ParametricHypersurface,
    p: &[f64],
    reference: impl Fn(&AVec) -> AVec,
) -> ParametricHypersurface {
    let geo = surf
        .local(p, 1, ChartDiff::Exact)
        .expect("orientation probe at a regular point");
    if geo.normal.dot(&reference(&geo.point)) < 0.0 {
        let sign = -surf.orientation();
        surf.with_orientation(sign)
    } else {
        surf
    }
}
