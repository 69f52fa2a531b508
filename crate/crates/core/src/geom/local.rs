//! Fundamental forms and curvature at a single parameter point.

use nalgebra::{DMatrix, DVector, SMatrix};

use super::chart::{AVec, ChartDerivatives, MAX_AMBIENT};
use super::killing::KillingField;
use super::surface::{ChartDiff, ParametricHypersurface};
use super::{GeomError, DEGENERATE_DET, GRAPH_EPS};
use crate::jet::MAX_VARS;

/// Square matrix over parameter indices, padded with the identity (metric)
/// or zeros (second form) beyond `n` so inverses and determinants of the
/// padded matrix equal those of the `n × n` block.
pub type PMat = SMatrix<f64, MAX_VARS, MAX_VARS>;

/// Everything needed pointwise: frame, fundamental forms and, when third
/// derivatives were supplied, the Christoffel symbols and `∇A`.
#[derive(Clone, Debug)]
pub struct LocalGeometry {
    pub n: usize,
    pub param: Vec<f64>,
    pub point: AVec,
    pub tangents: Vec<AVec>,
    pub g: PMat,
    pub g_inv: PMat,
    pub sqrt_det: f64,
    pub normal: AVec,
    pub h: PMat,
    /// `∇_k h_ij` at index `(k * n + i) * n + j`; empty without third derivatives.
    pub nabla_h: Vec<f64>,
}

impl LocalGeometry {
    pub fn from_derivatives(
        d: &ChartDerivatives,
        orientation: f64,
        param: &[f64],
    ) -> Result<Self, GeomError> {
        let n = d.n;
        let mut g = PMat::identity();
        for i in 0..n {
            for j in 0..n {
                g[(i, j)] = d.first[i].dot(&d.first[j]);
            }
        }
        let det = g.determinant();
        // Scale-free test: small tangents near a coordinate pole are fine as
        // long as they stay independent.
        let lengths: f64 = (0..n).map(|i| g[(i, i)]).product();
        if !(lengths > 0.0 && det > DEGENERATE_DET * lengths) {
            return Err(GeomError::DegenerateChart {
                point: param.to_vec(),
                det,
            });
        }
        let g_inv = g.try_inverse().ok_or_else(|| GeomError::DegenerateChart {
            point: param.to_vec(),
            det,
        })?;
        let normal = oriented_normal(&d.first[..n], orientation);
        let mut h = PMat::zeros();
        if d.order >= 2 {
            for i in 0..n {
                for j in i..n {
                    let v = -d.d2(i, j).dot(&normal);
                    h[(i, j)] = v;
                    h[(j, i)] = v;
                }
            }
        }
        let mut geo = Self {
            n,
            param: param.to_vec(),
            point: d.point,
            tangents: d.first.clone(),
            g,
            g_inv,
            sqrt_det: det.sqrt(),
            normal,
            h,
            nabla_h: Vec::new(),
        };
        if d.order >= 3 {
            geo.nabla_h = geo.covariant_second_form(d);
        }
        Ok(geo)
    }

    /// `Γ^k_ij` at index `(k * n + i) * n + j`.
    pub fn christoffel(&self, d: &ChartDerivatives) -> Vec<f64> {
        let n = self.n;
        let mut lower = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    lower[(l * n + i) * n + j] = d.d2(i, j).dot(&d.first[l]);
                }
            }
        }
        let mut gamma = vec![0.0; n * n * n];
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    gamma[(k * n + i) * n + j] = (0..n)
                        .map(|l| self.g_inv[(k, l)] * lower[(l * n + i) * n + j])
                        .sum();
                }
            }
        }
        gamma
    }

    fn covariant_second_form(&self, d: &ChartDerivatives) -> Vec<f64> {
        let n = self.n;
        let gamma = self.christoffel(d);
        // Weingarten: ∂_k ν = g^{ij} h_jk ∂_i F.
        let shape = self.g_inv * self.h;
        let dnu: Vec<AVec> = (0..n)
            .map(|k| (0..n).fold(AVec::zeros(), |acc, i| acc + d.first[i] * shape[(i, k)]))
            .collect();
        let mut out = vec![0.0; n * n * n];
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let partial = -d.d3(i, j, k).dot(&self.normal) - d.d2(i, j).dot(&dnu[k]);
                    let corr: f64 = (0..n)
                        .map(|l| {
                            gamma[(l * n + k) * n + i] * self.h[(l, j)]
                                + gamma[(l * n + k) * n + j] * self.h[(i, l)]
                        })
                        .sum();
                    out[(k * n + i) * n + j] = partial - corr;
                }
            }
        }
        out
    }

    /// Mixed shape operator `S^i_j = g^{ik} h_kj`.
    pub fn shape(&self) -> PMat {
        self.g_inv * self.h
    }

    pub fn mean_curvature(&self) -> f64 {
        self.shape().trace()
    }

    pub fn a_norm_sq(&self) -> f64 {
        let s = self.shape();
        (s * s).trace()
    }

    /// `|∇A|²`; requires third chart derivatives.
    pub fn nabla_a_norm_sq(&self) -> f64 {
        let n = self.n;
        assert!(!self.nabla_h.is_empty(), "third derivatives not available");
        // Raise every index of ∇h once, then contract with the lowered tensor.
        let t = &self.nabla_h;
        let gi = &self.g_inv;
        let mut raised = vec![0.0; n * n * n];
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    let mut acc = 0.0;
                    for i in 0..n {
                        for j in 0..n {
                            for k in 0..n {
                                acc += gi[(p, i)] * gi[(q, j)] * gi[(r, k)] * t[(i * n + j) * n + k];
                            }
                        }
                    }
                    raised[(p * n + q) * n + r] = acc;
                }
            }
        }
        raised.iter().zip(t).map(|(a, b)| a * b).sum()
    }

    pub fn graph_quantity(&self, v: &KillingField) -> f64 {
        self.normal.dot(&v.eval(&self.point))
    }

    pub fn support(&self) -> f64 {
        self.point.dot(&self.normal)
    }

    pub fn sample(&self, v: Option<&KillingField>) -> GeometrySample {
        let n = self.n;
        let block = |m: &PMat| DMatrix::from_fn(n, n, |i, j| m[(i, j)]);
        let ambient = n + 1;
        let s_v = v.map(|v| self.graph_quantity(v));
        let support = self.support();
        let v_sq = s_v.filter(|s| s.abs() > GRAPH_EPS).map(|s| 1.0 / (s * s));
        GeometrySample {
            point: DVector::from_fn(ambient, |i, _| self.point[i]),
            metric: block(&self.g),
            inverse_metric: block(&self.g_inv),
            normal: DVector::from_fn(ambient, |i, _| self.normal[i]),
            second_form: block(&self.h),
            mean_curvature: self.mean_curvature(),
            a_norm_sq: self.a_norm_sq(),
            s_v,
            support,
            v_sq,
            q: v_sq.map(|w| support * support * w),
        }
    }
}

/// Unit vector `ν` with `det[t_1, …, t_n, ν] > 0`, times `orientation`.
///
/// Component `k` of the unnormalised normal is `det[t_1, …, t_n, e_k]`, so
/// `det[t, N] = |N|² > 0`.
pub fn oriented_normal(tangents: &[AVec], orientation: f64) -> AVec {
    let n = tangents.len();
    let mut nu = AVec::zeros();
    for k in 0..=n {
        let mut m = SMatrix::<f64, MAX_AMBIENT, MAX_AMBIENT>::identity();
        for (col, t) in tangents.iter().enumerate() {
            for row in 0..=n {
                m[(row, col)] = t[row];
            }
        }
        for row in 0..=n {
            m[(row, n)] = if row == k { 1.0 } else { 0.0 };
        }
        nu[k] = m.determinant();
    }
    // Rescale first so an axis-aligned normal normalizes exactly.
    let nu = nu / nu.amax();
    nu * (orientation / nu.norm())
}

/// Record of first and second fundamental data at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct GeometrySample {
    pub point: DVector<f64>,
    pub metric: DMatrix<f64>,
    pub inverse_metric: DMatrix<f64>,
    pub normal: DVector<f64>,
    pub second_form: DMatrix<f64>,
    pub mean_curvature: f64,
    pub a_norm_sq: f64,
    /// `s_V`; present when a Killing field was supplied.
    pub s_v: Option<f64>,
    pub support: f64,
    /// `1/s_V²`, present only when `|s_V|` is not numerically zero.
    pub v_sq: Option<f64>,
    pub q: Option<f64>,
}

impl ParametricHypersurface {
    /// Local geometry with derivatives up to `order` (2 or 3).
    pub fn local(&self, p: &[f64], order: usize, diff: ChartDiff) -> Result<LocalGeometry, GeomError> {
        let d = self.derivatives(p, order, diff)?;
        LocalGeometry::from_derivatives(&d, self.orientation(), p)
    }
}

pub fn metric_at(
    surf: &ParametricHypersurface,
    p: &[f64],
    diff: ChartDiff,
) -> Result<DMatrix<f64>, GeomError> {
    let d = surf.derivatives(p, 1, diff)?;
    let geo = LocalGeometry::from_derivatives(&d, surf.orientation(), p)?;
    Ok(DMatrix::from_fn(geo.n, geo.n, |i, j| geo.g[(i, j)]))
}

pub fn unit_normal(
    surf: &ParametricHypersurface,
    p: &[f64],
    diff: ChartDiff,
) -> Result<DVector<f64>, GeomError> {
    let d = surf.derivatives(p, 1, diff)?;
    let geo = LocalGeometry::from_derivatives(&d, surf.orientation(), p)?;
    Ok(DVector::from_fn(geo.n + 1, |i, _| geo.normal[i]))
}

pub fn shape_operator(
    surf: &ParametricHypersurface,
    p: &[f64],
    diff: ChartDiff,
) -> Result<GeometrySample, GeomError> {
    Ok(surf.local(p, 2, diff)?.sample(None))
}

pub fn mean_curvature(surf: &ParametricHypersurface, p: &[f64], diff: ChartDiff) -> Result<f64, GeomError> {
    Ok(surf.local(p, 2, diff)?.mean_curvature())
}

pub fn graph_quantity(
    surf: &ParametricHypersurface,
    v: &KillingField,
    p: &[f64],
    diff: ChartDiff,
) -> Result<f64, GeomError> {
    let d = surf.derivatives(p, 1, diff)?;
    let geo = LocalGeometry::from_derivatives(&d, surf.orientation(), p)?;
    Ok(geo.graph_quantity(v))
}

pub fn support_function(surf: &ParametricHypersurface, p: &[f64], diff: ChartDiff) -> Result<f64, GeomError> {
    let d = surf.derivatives(p, 1, diff)?;
    Ok(LocalGeometry::from_derivatives(&d, surf.orientation(), p)?.support())
}

/// `Q = u² / s_V²`.
pub fn q_quantity(
    surf: &ParametricHypersurface,
    v: &KillingField,
    p: &[f64],
    diff: ChartDiff,
) -> Result<f64, GeomError> {
    let d = surf.derivatives(p, 1, diff)?;
    let geo = LocalGeometry::from_derivatives(&d, surf.orientation(), p)?;
    let s = geo.graph_quantity(v);
    if s.abs() <= GRAPH_EPS {
        return Err(GeomError::ZeroGraphQuantity {
            point: p.to_vec(),
            s_v: s,
        });
    }
    let u = geo.support();
    Ok(u * u / (s * s))
}

/// `|∇A|²` from exact third chart derivatives.
pub fn nabla_a_norm_sq(surf: &ParametricHypersurface, p: &[f64]) -> Result<f64, GeomError> {
    Ok(surf.local(p, 3, ChartDiff::Exact)?.nabla_a_norm_sq())
}
