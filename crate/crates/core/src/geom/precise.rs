//! Double-double evaluation of the scalar fields that get differenced.
//!
//! A second difference with step `h` amplifies the rounding error of each
//! field value by roughly `g^{ii}/h²`, about `1e6` at `h = 1e-3`. Chart jets
//! stay in `f64`; everything after them (ambient rotation, frame, normal,
//! second fundamental form, the scalar itself) is carried in double-double,
//! and stencil differences are formed before rounding back to `f64`.

use std::ops::{Add, Div, Mul, Neg, Sub};

use super::chart::{AVec, MAX_AMBIENT};
use super::killing::KillingField;
use super::surface::ParametricHypersurface;
use super::{GeomError, DEGENERATE_DET};
use crate::jet::MAX_VARS;

/// Unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd {
        hi: s,
        lo: b - (s - a),
    }
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    /// Exact product of two doubles.
    pub fn prod(a: f64, b: f64) -> Dd {
        let p = a * b;
        Dd {
            hi: p,
            lo: a.mul_add(b, -p),
        }
    }

    pub fn abs(self) -> Dd {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn sqrt(self) -> Dd {
        if self.hi <= 0.0 {
            return Dd::from(self.hi.max(0.0).sqrt());
        }
        let x = self.hi.sqrt();
        let r = self - Dd::prod(x, x);
        quick_two_sum(x, r.hi / (2.0 * x))
    }

    pub fn square(self) -> Dd {
        self * self
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        quick_two_sum(s, e + self.lo + o.lo)
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, o: Dd) -> Dd {
        self + (-o)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, o: Dd) -> Dd {
        let p = Dd::prod(self.hi, o.hi);
        quick_two_sum(p.hi, p.lo + self.hi * o.lo + self.lo * o.hi)
    }
}

impl Mul<f64> for Dd {
    type Output = Dd;
    fn mul(self, o: f64) -> Dd {
        let p = Dd::prod(self.hi, o);
        quick_two_sum(p.hi, p.lo + self.lo * o)
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self - o * q1;
        let q2 = r.hi / o.hi;
        let r = r - o * q2;
        let q3 = r.hi / o.hi;
        quick_two_sum(q1, q2) + Dd::from(q3)
    }
}

/// A scalar field value that finite-difference stencils can subtract
/// before rounding to `f64`.
pub trait FieldValue: Copy + Send + Sync {
    fn value(self) -> f64;
    /// `self − other`, rounded once.
    fn minus(self, other: Self) -> f64;
}

impl FieldValue for f64 {
    fn value(self) -> f64 {
        self
    }

    fn minus(self, other: f64) -> f64 {
        self - other
    }
}

impl FieldValue for Dd {
    fn value(self) -> f64 {
        self.to_f64()
    }

    fn minus(self, other: Dd) -> f64 {
        (self - other).to_f64()
    }
}

type Vd = [Dd; MAX_AMBIENT];
type Md = [[Dd; MAX_VARS]; MAX_VARS];

fn dot(a: &Vd, b: &Vd, m: usize) -> Dd {
    (0..m).fold(Dd::ZERO, |acc, k| acc + a[k] * b[k])
}

/// Determinant of the leading `n × n` block by elimination with partial
/// pivoting.
fn det(mut a: Md, n: usize) -> Dd {
    let mut d = Dd::from(1.0);
    for c in 0..n {
        let piv = (c..n)
            .max_by(|&i, &j| a[i][c].hi.abs().total_cmp(&a[j][c].hi.abs()))
            .expect("non-empty");
        if a[piv][c].hi == 0.0 {
            return Dd::ZERO;
        }
        if piv != c {
            a.swap(piv, c);
            d = -d;
        }
        d = d * a[c][c];
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] = a[r][k] - f * a[c][k];
            }
        }
    }
    d
}

/// Inverse of the leading `n × n` block by Gauss–Jordan elimination.
fn inverse(mut a: Md, n: usize) -> Md {
    let mut inv = [[Dd::ZERO; MAX_VARS]; MAX_VARS];
    for (i, row) in inv.iter_mut().enumerate().take(n) {
        row[i] = Dd::from(1.0);
    }
    for c in 0..n {
        let piv = (c..n)
            .max_by(|&i, &j| a[i][c].hi.abs().total_cmp(&a[j][c].hi.abs()))
            .expect("non-empty");
        a.swap(piv, c);
        inv.swap(piv, c);
        let p = a[c][c];
        for k in 0..n {
            a[c][k] = a[c][k] / p;
            inv[c][k] = inv[c][k] / p;
        }
        for r in (0..n).filter(|&r| r != c) {
            let f = a[r][c];
            for k in 0..n {
                a[r][k] = a[r][k] - f * a[c][k];
                inv[r][k] = inv[r][k] - f * inv[c][k];
            }
        }
    }
    inv
}

/// Point, unit normal and (with `order ≥ 2`) shape data in double-double.
#[derive(Clone, Debug)]
pub struct PreciseGeometry {
    n: usize,
    point: Vd,
    normal: Vd,
    g_inv: Md,
    h: Option<Md>,
}

impl PreciseGeometry {
    pub fn new(surf: &ParametricHypersurface, p: &[f64], order: usize) -> Result<Self, GeomError> {
        let n = surf.dim();
        let m = n + 1;
        let d = surf.raw_derivatives(p, order.min(2))?;
        let rot = surf.rotation();
        let lift = |v: &AVec| -> Vd {
            let mut out = [Dd::ZERO; MAX_AMBIENT];
            match rot {
                None => {
                    for i in 0..m {
                        out[i] = Dd::from(v[i]);
                    }
                }
                Some(r) => {
                    for i in 0..m {
                        out[i] = (0..m).fold(Dd::ZERO, |acc, j| acc + Dd::prod(r[(i, j)], v[j]));
                    }
                }
            }
            out
        };
        let point = lift(&d.point);
        let tangents: Vec<Vd> = d.first[..n].iter().map(lift).collect();
        let mut g = [[Dd::ZERO; MAX_VARS]; MAX_VARS];
        for i in 0..n {
            for j in i..n {
                let v = dot(&tangents[i], &tangents[j], m);
                g[i][j] = v;
                g[j][i] = v;
            }
        }
        let det_g = det(g, n);
        let lengths: f64 = (0..n).map(|i| g[i][i].hi).product();
        if !(lengths > 0.0 && det_g.hi > DEGENERATE_DET * lengths) {
            return Err(GeomError::DegenerateChart {
                point: p.to_vec(),
                det: det_g.to_f64(),
            });
        }
        // N_k = det[t_1, …, t_n, e_k] = (−1)^{k+n} det(t without row k).
        let mut normal = [Dd::ZERO; MAX_AMBIENT];
        for (k, slot) in normal.iter_mut().enumerate().take(m) {
            let mut minor = [[Dd::ZERO; MAX_VARS]; MAX_VARS];
            for (row, amb) in (0..m).filter(|&r| r != k).enumerate() {
                for (col, t) in tangents.iter().enumerate() {
                    minor[row][col] = t[amb];
                }
            }
            let c = det(minor, n);
            *slot = if (k + n).is_multiple_of(2) { c } else { -c };
        }
        let scale = normal[..m].iter().map(|x| x.hi.abs()).fold(0.0, f64::max);
        for x in normal[..m].iter_mut() {
            *x = *x / Dd::from(scale);
        }
        let len = dot(&normal, &normal, m).sqrt();
        let sign = Dd::from(surf.orientation());
        for x in normal[..m].iter_mut() {
            *x = *x / len * sign;
        }
        let g_inv = inverse(g, n);
        let h = (order >= 2).then(|| {
            let mut h = [[Dd::ZERO; MAX_VARS]; MAX_VARS];
            for i in 0..n {
                for j in i..n {
                    let v = -dot(&lift(d.d2(i, j)), &normal, m);
                    h[i][j] = v;
                    h[j][i] = v;
                }
            }
            h
        });
        Ok(Self {
            n,
            point,
            normal,
            g_inv,
            h,
        })
    }

    /// `s_V = ⟨ν, V(F)⟩`.
    pub fn graph_quantity(&self, v: &KillingField) -> Dd {
        let m = self.n + 1;
        let b = v.skew();
        let t = v.translation_part();
        (0..m).fold(Dd::ZERO, |acc, i| {
            let vi = (0..m).fold(Dd::from(t[i]), |s, j| s + self.point[j] * b[(i, j)]);
            acc + self.normal[i] * vi
        })
    }

    /// `u = ⟨F, ν⟩`.
    pub fn support(&self) -> Dd {
        dot(&self.point, &self.normal, self.n + 1)
    }

    /// `|A|²`; requires `order ≥ 2`.
    pub fn a_norm_sq(&self) -> Dd {
        let n = self.n;
        let h = self.h.as_ref().expect("second derivatives not available");
        let mut s = [[Dd::ZERO; MAX_VARS]; MAX_VARS];
        for i in 0..n {
            for j in 0..n {
                s[i][j] = (0..n).fold(Dd::ZERO, |acc, k| acc + self.g_inv[i][k] * h[k][j]);
            }
        }
        let mut tr = Dd::ZERO;
        for i in 0..n {
            for j in 0..n {
                tr = tr + s[i][j] * s[j][i];
            }
        }
        tr
    }
}

impl ParametricHypersurface {
    /// Double-double geometry at `p` (see [`PreciseGeometry`]).
    pub fn precise(&self, p: &[f64], order: usize) -> Result<PreciseGeometry, GeomError> {
        PreciseGeometry::new(self, p, order)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_beats_f64() {
        let third = Dd::from(1.0) / Dd::from(3.0);
        let back = third * Dd::from(3.0) - Dd::from(1.0);
        assert!(back.to_f64().abs() < 1e-31);
        let r2 = Dd::from(2.0).sqrt();
        assert!((r2 * r2 - Dd::from(2.0)).to_f64().abs() < 1e-31);
        let x = Dd::from(1.0) + Dd::from(1e-20);
        assert_eq!(x.minus(Dd::from(1.0)), 1e-20);
    }

    #[test]
    fn determinant_and_inverse() {
        let mut a = [[Dd::ZERO; MAX_VARS]; MAX_VARS];
        let vals = [[2.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 4.0]];
        for i in 0..3 {
            for j in 0..3 {
                a[i][j] = Dd::from(vals[i][j]);
            }
        }
        assert!((det(a, 3).to_f64() - 18.0).abs() < 1e-28);
        let inv = inverse(a, 3);
        for i in 0..3 {
            for j in 0..3 {
                let e = (0..3).fold(Dd::ZERO, |s, k| s + a[i][k] * inv[k][j]).to_f64();
                assert!((e - if i == j { 1.0 } else { 0.0 }).abs() < 1e-30);
            }
        }
    }
}
