//! Fourth-order finite-difference stencils on a parameter box.
//!
//! Central stencils are used whenever the full stencil fits inside the
//! domain (always on periodic axes); otherwise the one-sided stencil of the
//! same order pointing into the domain.

use std::ops::{Add, Mul};

use super::{GeomError, ParamDomain};

const CENTRAL_FIRST: [(i32, f64); 4] = [(-2, 1.0), (-1, -8.0), (1, 8.0), (2, -1.0)];
const FORWARD_FIRST: [(i32, f64); 5] = [(0, -25.0), (1, 48.0), (2, -36.0), (3, 16.0), (4, -3.0)];
const CENTRAL_SECOND: [(i32, f64); 5] = [(-2, -1.0), (-1, 16.0), (0, -30.0), (1, 16.0), (2, -1.0)];
const FORWARD_SECOND: [(i32, f64); 6] = [
    (0, 45.0),
    (1, -154.0),
    (2, 214.0),
    (3, -156.0),
    (4, 61.0),
    (5, -10.0),
];

/// Which way a stencil extends along one axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Placement {
    Central,
    Forward,
    Backward,
}

/// Picks the placement for a stencil needing `half` steps on each side
/// (central) or `full` steps on one side.
pub fn placement(
    domain: &ParamDomain,
    p: &[f64],
    axis: usize,
    h: f64,
    half: usize,
    full: usize,
) -> Result<Placement, GeomError> {
    let ax = &domain.axes[axis];
    if ax.periodic {
        return Ok(Placement::Central);
    }
    let slack = 1e-12 * (ax.hi - ax.lo).abs().max(1.0);
    let x = p[axis];
    let fits = |lo: f64, hi: f64| lo >= ax.lo - slack && hi <= ax.hi + slack;
    if fits(x - half as f64 * h, x + half as f64 * h) {
        Ok(Placement::Central)
    } else if fits(x, x + full as f64 * h) {
        Ok(Placement::Forward)
    } else if fits(x - full as f64 * h, x) {
        Ok(Placement::Backward)
    } else {
        Err(GeomError::StencilOutOfDomain {
            point: p.to_vec(),
            axis,
            step: h,
        })
    }
}

fn apply<T, F>(f: &F, p: &[f64], axis: usize, h: f64, taps: &[(i32, f64)]) -> Result<T, GeomError>
where
    T: Clone + Add<Output = T> + Mul<f64, Output = T>,
    F: Fn(&[f64]) -> Result<T, GeomError>,
{
    let mut q = p.to_vec();
    let mut acc: Option<T> = None;
    for &(offset, w) in taps {
        q[axis] = p[axis] + offset as f64 * h;
        let term = f(&q)? * w;
        acc = Some(match acc {
            None => term,
            Some(a) => a + term,
        });
    }
    Ok(acc.expect("non-empty stencil"))
}

fn mirrored(taps: &[(i32, f64)], sign: f64) -> Vec<(i32, f64)> {
    taps.iter().map(|&(o, w)| (-o, w * sign)).collect()
}

/// Fourth-order approximation of `∂f/∂p_axis`.
pub fn first<T, F>(f: &F, p: &[f64], axis: usize, h: f64, domain: &ParamDomain) -> Result<T, GeomError>
where
    T: Clone + Add<Output = T> + Mul<f64, Output = T>,
    F: Fn(&[f64]) -> Result<T, GeomError>,
{
    let scale = 1.0 / (12.0 * h);
    let v = match placement(domain, p, axis, h, 2, 4)? {
        Placement::Central => apply(f, p, axis, h, &CENTRAL_FIRST)?,
        Placement::Forward => apply(f, p, axis, h, &FORWARD_FIRST)?,
        Placement::Backward => apply(f, p, axis, h, &mirrored(&FORWARD_FIRST, -1.0))?,
    };
    Ok(v * scale)
}

/// Fourth-order approximation of `∂²f/∂p_axis²`.
pub fn second<T, F>(f: &F, p: &[f64], axis: usize, h: f64, domain: &ParamDomain) -> Result<T, GeomError>
where
    T: Clone + Add<Output = T> + Mul<f64, Output = T>,
    F: Fn(&[f64]) -> Result<T, GeomError>,
{
    let scale = 1.0 / (12.0 * h * h);
    let v = match placement(domain, p, axis, h, 2, 5)? {
        Placement::Central => apply(f, p, axis, h, &CENTRAL_SECOND)?,
        Placement::Forward => apply(f, p, axis, h, &FORWARD_SECOND)?,
        Placement::Backward => apply(f, p, axis, h, &mirrored(&FORWARD_SECOND, 1.0))?,
    };
    Ok(v * scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Axis;

    fn unit_box() -> ParamDomain {
        ParamDomain::new(vec![Axis::closed(0.0, 1.0), Axis::periodic(0.0, 1.0)])
    }

    #[test]
    fn exact_on_quartics() {
        let d = unit_box();
        let f = |q: &[f64]| -> Result<f64, GeomError> { Ok(q[0].powi(4) - 2.0 * q[0].powi(3) + q[0]) };
        let df = |x: f64| 4.0 * x.powi(3) - 6.0 * x * x + 1.0;
        let d2f = |x: f64| 12.0 * x * x - 12.0 * x;
        for &x in &[0.0, 0.01, 0.5, 0.99, 1.0] {
            let p = [x, 0.3];
            let a: f64 = first(&f, &p, 0, 1e-2, &d).unwrap();
            assert!((a - df(x)).abs() < 1e-10, "x={x}");
            let b: f64 = second(&f, &p, 0, 1e-2, &d).unwrap();
            assert!((b - d2f(x)).abs() < 1e-7, "x={x} {b}");
        }
    }

    #[test]
    fn placement_rules() {
        let d = unit_box();
        assert_eq!(
            placement(&d, &[0.5, 0.0], 0, 0.1, 2, 4).unwrap(),
            Placement::Central
        );
        assert_eq!(
            placement(&d, &[0.0, 0.0], 0, 0.1, 2, 4).unwrap(),
            Placement::Forward
        );
        assert_eq!(
            placement(&d, &[1.0, 0.0], 0, 0.1, 2, 4).unwrap(),
            Placement::Backward
        );
        assert_eq!(
            placement(&d, &[0.0, 0.0], 1, 0.1, 2, 4).unwrap(),
            Placement::Central
        );
        assert!(placement(&d, &[0.5, 0.0], 0, 0.3, 2, 4).is_err());
    }
}
