//! Chart maps and their derivative tensors.

use nalgebra::SVector;

use crate::jet::{Jet1, Jet2, Jet3, Scalar, MAX_VARS};

/// Largest ambient dimension supported (`n + 1` with `n <= MAX_VARS`).
pub const MAX_AMBIENT: usize = MAX_VARS + 1;

/// Ambient vector, zero-padded beyond the surface's ambient dimension.
pub type AVec = SVector<f64, MAX_AMBIENT>;

/// A smooth map from parameters to ambient space, written once for every
/// [`Scalar`] type so it can be evaluated on plain floats or on jets.
pub trait SmoothMap: Send + Sync + 'static {
    fn param_dim(&self) -> usize;
    fn ambient_dim(&self) -> usize;
    fn map<S: Scalar>(&self, p: &[S]) -> Vec<S>;
}

/// Object-safe chart interface consumed by [`ParametricHypersurface`](super::ParametricHypersurface).
pub trait Chart: Send + Sync {
    fn param_dim(&self) -> usize;
    fn ambient_dim(&self) -> usize;
    fn point(&self, p: &[f64]) -> AVec;
    /// Exact partial derivatives up to `order` (1..=3).
    fn jet_derivatives(&self, p: &[f64], order: usize) -> ChartDerivatives;
}

fn pad(values: impl IntoIterator<Item = f64>) -> AVec {
    let mut v = AVec::zeros();
    for (slot, x) in v.iter_mut().zip(values) {
        *slot = x;
    }
    v
}

impl<M: SmoothMap> Chart for M {
    fn param_dim(&self) -> usize {
        SmoothMap::param_dim(self)
    }

    fn ambient_dim(&self) -> usize {
        SmoothMap::ambient_dim(self)
    }

    fn point(&self, p: &[f64]) -> AVec {
        pad(self.map(p))
    }

    fn jet_derivatives(&self, p: &[f64], order: usize) -> ChartDerivatives {
        let n = p.len();
        let mut d = ChartDerivatives::zeros(n, order);
        match order {
            1 => {
                let out = self.map(&Jet1::seed(p));
                d.point = pad(out.iter().map(|j| j.value()));
                for i in 0..n {
                    d.first[i] = pad(out.iter().map(|j| j.d1(i)));
                }
            }
            2 => {
                let out = self.map(&Jet2::seed(p));
                d.point = pad(out.iter().map(|j| j.value()));
                for i in 0..n {
                    d.first[i] = pad(out.iter().map(|j| j.d1(i)));
                    for k in 0..n {
                        d.second[i * n + k] = pad(out.iter().map(|j| j.d2(i, k)));
                    }
                }
            }
            3 => {
                let out = self.map(&Jet3::seed(p));
                d.point = pad(out.iter().map(|j| j.value()));
                for i in 0..n {
                    d.first[i] = pad(out.iter().map(|j| j.d1(i)));
                    for k in 0..n {
                        d.second[i * n + k] = pad(out.iter().map(|j| j.d2(i, k)));
                        for l in 0..n {
                            d.third[(i * n + k) * n + l] = pad(out.iter().map(|j| j.d3(i, k, l)));
                        }
                    }
                }
            }
            _ => panic!("derivative order {order} not supported"),
        }
        d
    }
}

/// Point and partial derivatives of a chart at one parameter point.
///
/// `second[i * n + j]` holds `∂_i∂_j F`, `third[(i * n + j) * n + k]` holds
/// `∂_i∂_j∂_k F`; tensors beyond `order` are left empty.
#[derive(Clone, Debug)]
pub struct ChartDerivatives {
    pub n: usize,
    pub order: usize,
    pub point: AVec,
    pub first: Vec<AVec>,
    pub second: Vec<AVec>,
    pub third: Vec<AVec>,
}

impl ChartDerivatives {
    pub fn zeros(n: usize, order: usize) -> Self {
        Self {
            n,
            order,
            point: AVec::zeros(),
            first: vec![AVec::zeros(); n],
            second: if order >= 2 {
                vec![AVec::zeros(); n * n]
            } else {
                Vec::new()
            },
            third: if order >= 3 {
                vec![AVec::zeros(); n * n * n]
            } else {
                Vec::new()
            },
        }
    }

    pub fn d2(&self, i: usize, j: usize) -> &AVec {
        &self.second[i * self.n + j]
    }

    pub fn d3(&self, i: usize, j: usize, k: usize) -> &AVec {
        &self.third[(i * self.n + j) * self.n + k]
    }

    /// Applies a linear map to every ambient vector.
    pub fn map_vectors(&mut self, f: impl Fn(&AVec) -> AVec) {
        self.point = f(&self.point);
        for v in self
            .first
            .iter_mut()
            .chain(self.second.iter_mut())
            .chain(self.third.iter_mut())
        {
            *v = f(v);
        }
    }
}
