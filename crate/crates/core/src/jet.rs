//! Truncated multivariate Taylor arithmetic.
//!
//! A [`Jet`] carries the Taylor coefficients of a scalar function of up to
//! [`MAX_VARS`] parameters, truncated at total degree `K`. Evaluating a chart
//! on jets seeded with [`Jet::variable`] yields every partial derivative of
//! the chart up to order `K` in a single pass, free of step-size error.
//!
//! Monomials are ordered so that those involving only the first `v`
//! variables form a prefix of the coefficient array; arithmetic only touches
//! the prefix for the variables actually in play.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};
use std::sync::OnceLock;

/// Largest number of independent variables a jet can carry.
pub const MAX_VARS: usize = 4;

/// Scalar type a chart can be evaluated on: plain `f64` or a [`Jet`].
pub trait Scalar:
    Copy
    + Send
    + Sync
    + std::fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn constant(x: f64) -> Self;
    fn value(&self) -> f64;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sinh(self) -> Self;
    fn cosh(self) -> Self;
    fn exp(self) -> Self;
    fn sqrt(self) -> Self;
    fn recip(self) -> Self;

    fn square(self) -> Self {
        self * self
    }
}

impl Scalar for f64 {
    fn constant(x: f64) -> Self {
        x
    }
    fn value(&self) -> f64 {
        *self
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn sinh(self) -> Self {
        f64::sinh(self)
    }
    fn cosh(self) -> Self {
        f64::cosh(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn recip(self) -> Self {
        1.0 / self
    }
}

type Exponent = [u8; MAX_VARS];

struct Tables {
    monomials: Vec<Exponent>,
    /// `prefix[v]` = number of monomials using only variables `< v`.
    prefix: [usize; MAX_VARS + 1],
    /// `products[v]` lists `(i, j, k)` with `mono[i] * mono[j] = mono[k]`.
    products: [Vec<(u16, u16, u16)>; MAX_VARS + 1],
}

fn degree(e: &Exponent) -> usize {
    e.iter().map(|&x| x as usize).sum()
}

fn highest_var(e: &Exponent) -> usize {
    e.iter().rposition(|&x| x > 0).map_or(0, |i| i + 1)
}

impl Tables {
    fn build(order: usize) -> Self {
        let mut monomials = Vec::new();
        let o = order as u8;
        for a in 0..=o {
            for b in 0..=o {
                for c in 0..=o {
                    for d in 0..=o {
                        let e = [a, b, c, d];
                        if degree(&e) <= order {
                            monomials.push(e);
                        }
                    }
                }
            }
        }
        monomials.sort_by_key(|e| (highest_var(e), degree(e), std::cmp::Reverse(*e)));
        let mut prefix = [0usize; MAX_VARS + 1];
        for (v, slot) in prefix.iter_mut().enumerate() {
            *slot = monomials.iter().filter(|e| highest_var(e) <= v).count();
        }
        let index_of = |e: &Exponent| monomials.iter().position(|m| m == e);
        let products = std::array::from_fn(|v| {
            let mut list = Vec::new();
            for i in 0..prefix[v] {
                for j in 0..prefix[v] {
                    let (ei, ej) = (&monomials[i], &monomials[j]);
                    if degree(ei) + degree(ej) > order {
                        continue;
                    }
                    let sum: Exponent = std::array::from_fn(|t| ei[t] + ej[t]);
                    let k = index_of(&sum).expect("product monomial within order");
                    list.push((i as u16, j as u16, k as u16));
                }
            }
            list
        });
        Self {
            monomials,
            prefix,
            products,
        }
    }
}

fn tables(order: usize) -> &'static Tables {
    static T1: OnceLock<Tables> = OnceLock::new();
    static T2: OnceLock<Tables> = OnceLock::new();
    static T3: OnceLock<Tables> = OnceLock::new();
    match order {
        1 => T1.get_or_init(|| Tables::build(1)),
        2 => T2.get_or_init(|| Tables::build(2)),
        3 => T3.get_or_init(|| Tables::build(3)),
        _ => panic!("jet order {order} not supported"),
    }
}

/// Number of coefficients of a jet of order `k` in [`MAX_VARS`] variables.
pub const fn coefficient_count(k: usize) -> usize {
    // C(MAX_VARS + k, k)
    let mut num = 1;
    let mut den = 1;
    let mut i = 1;
    while i <= k {
        num *= MAX_VARS + i;
        den *= i;
        i += 1;
    }
    num / den
}

/// Truncated Taylor polynomial of total degree `K` with `L` stored coefficients.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet<const K: usize, const L: usize> {
    nv: u8,
    c: [f64; L],
}

pub type Jet1 = Jet<1, { coefficient_count(1) }>;
pub type Jet2 = Jet<2, { coefficient_count(2) }>;
pub type Jet3 = Jet<3, { coefficient_count(3) }>;

impl<const K: usize, const L: usize> Jet<K, L> {
    fn tables() -> &'static Tables {
        let t = tables(K);
        debug_assert_eq!(t.monomials.len(), L);
        t
    }

    pub fn constant(x: f64) -> Self {
        let mut c = [0.0; L];
        c[0] = x;
        Self { nv: 0, c }
    }

    /// The independent variable `index` out of `nvars`, evaluated at `x`.
    pub fn variable(x: f64, index: usize, nvars: usize) -> Self {
        assert!(index < nvars && nvars <= MAX_VARS);
        let mut c = [0.0; L];
        c[0] = x;
        let mut e = [0u8; MAX_VARS];
        e[index] = 1;
        let k = Self::tables()
            .monomials
            .iter()
            .position(|m| *m == e)
            .expect("linear monomial");
        c[k] = 1.0;
        Self { nv: nvars as u8, c }
    }

    /// Seeds one jet per parameter coordinate.
    pub fn seed(p: &[f64]) -> Vec<Self> {
        p.iter()
            .enumerate()
            .map(|(i, &x)| Self::variable(x, i, p.len()))
            .collect()
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// Partial derivative with multi-index `alpha` (entries sum to at most `K`).
    pub fn partial(&self, alpha: &[u8]) -> f64 {
        let mut e = [0u8; MAX_VARS];
        e[..alpha.len()].copy_from_slice(alpha);
        let t = Self::tables();
        let k = t
            .monomials
            .iter()
            .position(|m| *m == e)
            .expect("multi-index within jet order");
        let factorial: f64 = e
            .iter()
            .map(|&a| (1..=a as u32).product::<u32>() as f64)
            .product();
        self.c[k] * factorial
    }

    /// First partial derivative along `i`.
    pub fn d1(&self, i: usize) -> f64 {
        let mut a = [0u8; MAX_VARS];
        a[i] += 1;
        self.partial(&a)
    }

    pub fn d2(&self, i: usize, j: usize) -> f64 {
        let mut a = [0u8; MAX_VARS];
        a[i] += 1;
        a[j] += 1;
        self.partial(&a)
    }

    pub fn d3(&self, i: usize, j: usize, k: usize) -> f64 {
        let mut a = [0u8; MAX_VARS];
        a[i] += 1;
        a[j] += 1;
        a[k] += 1;
        self.partial(&a)
    }

    fn active(&self) -> usize {
        Self::tables().prefix[self.nv as usize]
    }

    /// Evaluates `f(self)` given `derivs[m] = f^(m)(self.value())`.
    fn compose(self, derivs: &[f64]) -> Self {
        let mut delta = self;
        delta.c[0] = 0.0;
        let mut out = Self::constant(derivs[0]);
        out.nv = self.nv;
        let mut power = delta;
        let mut factorial = 1.0;
        for (m, &dm) in derivs.iter().enumerate().take(K + 1).skip(1) {
            factorial *= m as f64;
            let w = dm / factorial;
            let n = power.active();
            for t in 0..n {
                out.c[t] += w * power.c[t];
            }
            if m < K {
                power = power * delta;
            }
        }
        out
    }
}

impl<const K: usize, const L: usize> Add for Jet<K, L> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self.nv = self.nv.max(rhs.nv);
        let n = self.active();
        for t in 0..n {
            self.c[t] += rhs.c[t];
        }
        self
    }
}

impl<const K: usize, const L: usize> AddAssign for Jet<K, L> {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<const K: usize, const L: usize> Sub for Jet<K, L> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        self.nv = self.nv.max(rhs.nv);
        let n = self.active();
        for t in 0..n {
            self.c[t] -= rhs.c[t];
        }
        self
    }
}

impl<const K: usize, const L: usize> Neg for Jet<K, L> {
    type Output = Self;
    fn neg(mut self) -> Self {
        for x in self.c.iter_mut() {
            *x = -*x;
        }
        self
    }
}

impl<const K: usize, const L: usize> Mul for Jet<K, L> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let nv = self.nv.max(rhs.nv);
        if self.nv == 0 {
            return rhs * self.c[0];
        }
        if rhs.nv == 0 {
            return self * rhs.c[0];
        }
        let mut out = Self { nv, c: [0.0; L] };
        for &(i, j, k) in &Self::tables().products[nv as usize] {
            out.c[k as usize] += self.c[i as usize] * rhs.c[j as usize];
        }
        out
    }
}

impl<const K: usize, const L: usize> Div for Jet<K, L> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        if rhs.nv == 0 {
            return self / rhs.c[0];
        }
        self * Scalar::recip(rhs)
    }
}

impl<const K: usize, const L: usize> Add<f64> for Jet<K, L> {
    type Output = Self;
    fn add(mut self, rhs: f64) -> Self {
        self.c[0] += rhs;
        self
    }
}

impl<const K: usize, const L: usize> Sub<f64> for Jet<K, L> {
    type Output = Self;
    fn sub(mut self, rhs: f64) -> Self {
        self.c[0] -= rhs;
        self
    }
}

impl<const K: usize, const L: usize> Mul<f64> for Jet<K, L> {
    type Output = Self;
    fn mul(mut self, rhs: f64) -> Self {
        for x in self.c.iter_mut() {
            *x *= rhs;
        }
        self
    }
}

impl<const K: usize, const L: usize> Div<f64> for Jet<K, L> {
    type Output = Self;
    fn div(mut self, rhs: f64) -> Self {
        for x in self.c.iter_mut() {
            *x /= rhs;
        }
        self
    }
}

impl<const K: usize, const L: usize> Scalar for Jet<K, L> {
    fn constant(x: f64) -> Self {
        Jet::constant(x)
    }

    fn value(&self) -> f64 {
        self.c[0]
    }

    fn sin(self) -> Self {
        let (s, c) = self.c[0].sin_cos();
        self.compose(&[s, c, -s, -c])
    }

    fn cos(self) -> Self {
        let (s, c) = self.c[0].sin_cos();
        self.compose(&[c, -s, -c, s])
    }

    fn sinh(self) -> Self {
        let (s, c) = (self.c[0].sinh(), self.c[0].cosh());
        self.compose(&[s, c, s, c])
    }

    fn cosh(self) -> Self {
        let (s, c) = (self.c[0].sinh(), self.c[0].cosh());
        self.compose(&[c, s, c, s])
    }

    fn exp(self) -> Self {
        let e = self.c[0].exp();
        self.compose(&[e, e, e, e])
    }

    fn sqrt(self) -> Self {
        let x = self.c[0];
        let r = x.sqrt();
        self.compose(&[r, 0.5 / r, -0.25 / (r * x), 0.375 / (r * x * x)])
    }

    fn recip(self) -> Self {
        let x = self.c[0];
        let r = 1.0 / x;
        self.compose(&[r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn coefficient_counts() {
        assert_eq!(coefficient_count(1), 5);
        assert_eq!(coefficient_count(2), 15);
        assert_eq!(coefficient_count(3), 35);
        for k in 1..=3 {
            let t = tables(k);
            assert_eq!(t.monomials.len(), coefficient_count(k));
            assert_eq!(t.prefix[0], 1);
            assert_eq!(t.prefix[MAX_VARS], t.monomials.len());
        }
    }

    #[test]
    fn polynomial_partials() {
        // f = x^2 y + 3 y^3 at (2, -1)
        let v = Jet3::seed(&[2.0, -1.0]);
        let (x, y) = (v[0], v[1]);
        let f = x * x * y + y * y * y * 3.0;
        assert_relative_eq!(f.value(), -4.0 - 3.0);
        assert_relative_eq!(f.d1(0), -(2.0 * 2.0));
        assert_relative_eq!(f.d1(1), 4.0 + 9.0);
        assert_relative_eq!(f.d2(0, 0), -2.0);
        assert_relative_eq!(f.d2(0, 1), 4.0);
        assert_relative_eq!(f.d2(1, 1), -18.0);
        assert_relative_eq!(f.d3(0, 0, 1), 2.0);
        assert_relative_eq!(f.d3(1, 1, 1), 18.0);
        assert_relative_eq!(f.d3(0, 0, 0), 0.0);
    }

    #[test]
    fn elementary_functions_match_closed_forms() {
        let x0 = 0.7;
        let x = Jet3::variable(x0, 0, 1);
        let checks: [(Jet3, [f64; 4]); 5] = [
            (x.sin(), [x0.sin(), x0.cos(), -x0.sin(), -x0.cos()]),
            (x.cosh(), [x0.cosh(), x0.sinh(), x0.cosh(), x0.sinh()]),
            (x.exp(), [x0.exp(); 4]),
            (
                x.sqrt(),
                [
                    x0.sqrt(),
                    0.5 * x0.powf(-0.5),
                    -0.25 * x0.powf(-1.5),
                    0.375 * x0.powf(-2.5),
                ],
            ),
            (
                Scalar::recip(x),
                [1.0 / x0, -1.0 / (x0 * x0), 2.0 / x0.powi(3), -6.0 / x0.powi(4)],
            ),
        ];
        for (jet, d) in checks {
            assert_relative_eq!(jet.value(), d[0], max_relative = 1e-14);
            assert_relative_eq!(jet.d1(0), d[1], max_relative = 1e-14);
            assert_relative_eq!(jet.d2(0, 0), d[2], max_relative = 1e-14);
            assert_relative_eq!(jet.d3(0, 0, 0), d[3], max_relative = 1e-14);
        }
    }

    #[test]
    fn composition_chain_rule() {
        // g(x, y) = sin(x * y), mixed third derivative d^3 g / dx dy dy
        let (x0, y0) = (0.3, 1.1);
        let v = Jet3::seed(&[x0, y0]);
        let g = (v[0] * v[1]).sin();
        let t = x0 * y0;
        // d/dx sin(xy) = y cos; d/dy -> cos - xy sin; d/dy -> -x sin - x sin - x^2 y cos
        let expected = -2.0 * x0 * t.sin() - x0 * x0 * y0 * t.cos();
        assert_relative_eq!(g.d3(0, 1, 1), expected, max_relative = 1e-13);
    }

    #[test]
    fn division_and_constants() {
        let v = Jet2::seed(&[1.5, 0.5, 2.0]);
        let q = (v[0] + 1.0) / (v[1] * v[2]);
        // q = (x+1)/(y z)
        assert_relative_eq!(q.value(), 2.5);
        assert_relative_eq!(q.d1(0), 1.0);
        assert_relative_eq!(q.d1(1), -2.5 / 0.5);
        assert_relative_eq!(q.d2(1, 2), 2.5 / (0.5 * 2.0), max_relative = 1e-14);
        let c = Jet2::constant(4.0) * v[0];
        assert_relative_eq!(c.d1(0), 4.0);
    }
}
