use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::chart::{AVec, Chart, ChartDerivatives};
use super::{stencil, GeomError};

/// One coordinate axis of the parameter box.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub periodic: bool,
}

impl Axis {
    pub fn closed(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            periodic: false,
        }
    }

    pub fn periodic(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            periodic: true,
        }
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Axis-aligned parameter box with per-axis periodicity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamDomain {
    pub axes: Vec<Axis>,
}

impl ParamDomain {
    pub fn new(axes: Vec<Axis>) -> Self {
        Self { axes }
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn volume(&self) -> f64 {
        self.axes.iter().map(Axis::length).product()
    }

    /// True when `p` lies in the closed box (periodic axes are unconstrained).
    pub fn contains(&self, p: &[f64]) -> bool {
        self.axes.iter().zip(p).all(|(ax, &x)| {
            let slack = 1e-12 * ax.length().abs().max(1.0);
            ax.periodic || (x >= ax.lo - slack && x <= ax.hi + slack)
        })
    }

    /// Distance from `p` to the nearest non-periodic face.
    pub fn distance_to_faces(&self, p: &[f64]) -> f64 {
        self.axes
            .iter()
            .zip(p)
            .filter(|(ax, _)| !ax.periodic)
            .map(|(ax, &x)| (x - ax.lo).min(ax.hi - x))
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Lo,
    Hi,
}

/// A face `{p_axis = lo}` or `{p_axis = hi}` of the parameter box.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Face {
    pub axis: usize,
    pub side: Side,
}

impl Face {
    pub fn lo(axis: usize) -> Self {
        Self { axis, side: Side::Lo }
    }

    pub fn hi(axis: usize) -> Self {
        Self { axis, side: Side::Hi }
    }

    pub fn coordinate(&self, domain: &ParamDomain) -> f64 {
        let ax = &domain.axes[self.axis];
        match self.side {
            Side::Lo => ax.lo,
            Side::Hi => ax.hi,
        }
    }

    /// +1 when increasing the face coordinate leaves the domain.
    pub fn outward_sign(&self) -> f64 {
        match self.side {
            Side::Lo => -1.0,
            Side::Hi => 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    Disk,
    Annulus,
}

/// How chart derivatives are obtained.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ChartDiff {
    /// Truncated Taylor arithmetic: exact to rounding.
    Exact,
    /// Fourth-order finite differences with step `h`.
    Stencil(f64),
}

/// A chart into `R^{n+1}` over a parameter box, plus boundary bookkeeping.
///
/// Normals are oriented by the tangent order: `det[∂_1F, …, ∂_nF, ν] > 0`,
/// times the stored orientation sign. An optional ambient rotation is
/// applied after the chart.
#[derive(Clone)]
pub struct ParametricHypersurface {
    id: String,
    chart: Arc<dyn Chart>,
    domain: ParamDomain,
    boundary_faces: Vec<Face>,
    polar_faces: Vec<Face>,
    minimal: bool,
    free_boundary: bool,
    topology: Topology,
    rotation: Option<DMatrix<f64>>,
    orientation: f64,
}

impl fmt::Debug for ParametricHypersurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParametricHypersurface")
            .field("id", &self.id)
            .field("dim", &self.dim())
            .field("domain", &self.domain)
            .field("boundary_faces", &self.boundary_faces)
            .field("minimal", &self.minimal)
            .field("free_boundary", &self.free_boundary)
            .field("orientation", &self.orientation)
            .finish()
    }
}

impl ParametricHypersurface {
    pub fn new(id: impl Into<String>, chart: Arc<dyn Chart>, domain: ParamDomain) -> Self {
        assert_eq!(chart.param_dim(), domain.dim());
        assert_eq!(chart.ambient_dim(), domain.dim() + 1);
        Self {
            id: id.into(),
            chart,
            domain,
            boundary_faces: Vec::new(),
            polar_faces: Vec::new(),
            minimal: false,
            free_boundary: false,
            topology: Topology::Disk,
            rotation: None,
            orientation: 1.0,
        }
    }

    pub fn with_boundary_faces(mut self, faces: Vec<Face>) -> Self {
        self.boundary_faces = faces;
        self
    }

    /// Faces where the chart degenerates (polar coordinates); sample grids
    /// keep an ε-margin from them.
    pub fn with_polar_faces(mut self, faces: Vec<Face>) -> Self {
        self.polar_faces = faces;
        self
    }

    pub fn with_flags(mut self, minimal: bool, free_boundary: bool) -> Self {
        self.minimal = minimal;
        self.free_boundary = free_boundary;
        self
    }

    pub fn with_topology(mut self, topology: Topology) -> Self {
        self.topology = topology;
        self
    }

    /// Sets the orientation sign (`±1`) relative to the tangent-order rule.
    pub fn with_orientation(mut self, sign: f64) -> Self {
        self.orientation = sign.signum();
        self
    }

    /// The same surface moved by the ambient rotation `r` (applied after any
    /// rotation already present).
    pub fn rotated(&self, r: &DMatrix<f64>) -> Self {
        let n = self.ambient_dim();
        assert_eq!(r.shape(), (n, n));
        let mut out = self.clone();
        out.rotation = Some(match &self.rotation {
            Some(old) => r * old,
            None => r.clone(),
        });
        out.id = format!("{}+rotated", self.id);
        out
    }

    /// The same surface with the opposite unit normal.
    pub fn flipped(&self) -> Self {
        let mut out = self.clone();
        out.orientation = -self.orientation;
        out.id = format!("{}+flipped", self.id);
        out
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim() + 1
    }

    pub fn domain(&self) -> &ParamDomain {
        &self.domain
    }

    pub fn boundary_faces(&self) -> &[Face] {
        &self.boundary_faces
    }

    pub fn polar_faces(&self) -> &[Face] {
        &self.polar_faces
    }

    pub fn is_minimal(&self) -> bool {
        self.minimal
    }

    pub fn is_free_boundary(&self) -> bool {
        self.free_boundary
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn orientation(&self) -> f64 {
        self.orientation
    }

    pub fn rotation(&self) -> Option<&DMatrix<f64>> {
        self.rotation.as_ref()
    }

    fn rotate(&self, v: &AVec) -> AVec {
        match &self.rotation {
            None => *v,
            Some(r) => {
                let n = r.nrows();
                let mut out = AVec::zeros();
                for i in 0..n {
                    out[i] = (0..n).map(|j| r[(i, j)] * v[j]).sum();
                }
                out
            }
        }
    }

    fn check_domain(&self, p: &[f64]) -> Result<(), GeomError> {
        if p.len() != self.dim() || !self.domain.contains(p) {
            return Err(GeomError::OutsideDomain { point: p.to_vec() });
        }
        Ok(())
    }

    /// Ambient position `F(p)`.
    pub fn point(&self, p: &[f64]) -> Result<AVec, GeomError> {
        self.check_domain(p)?;
        Ok(self.rotate(&self.chart.point(p)))
    }

    /// Position and partials up to `order` at `p`.
    pub fn derivatives(
        &self,
        p: &[f64],
        order: usize,
        diff: ChartDiff,
    ) -> Result<ChartDerivatives, GeomError> {
        self.check_domain(p)?;
        let mut d = match diff {
            ChartDiff::Exact => self.chart.jet_derivatives(p, order),
            ChartDiff::Stencil(h) => self.stencil_derivatives(p, order, h)?,
        };
        if self.rotation.is_some() {
            d.map_vectors(|v| self.rotate(v));
        }
        Ok(d)
    }

    /// Exact chart jets at `p` before the ambient rotation.
    pub(crate) fn raw_derivatives(&self, p: &[f64], order: usize) -> Result<ChartDerivatives, GeomError> {
        self.check_domain(p)?;
        Ok(self.chart.jet_derivatives(p, order))
    }

    fn stencil_derivatives(&self, p: &[f64], order: usize, h: f64) -> Result<ChartDerivatives, GeomError> {
        let n = self.dim();
        let dom = &self.domain;
        let chart = &self.chart;
        let f = |q: &[f64]| -> Result<AVec, GeomError> { Ok(chart.point(q)) };
        let mut d = ChartDerivatives::zeros(n, order);
        d.point = chart.point(p);
        for i in 0..n {
            d.first[i] = stencil::first(&f, p, i, h, dom)?;
        }
        if order >= 2 {
            for i in 0..n {
                for j in i..n {
                    let v = if i == j {
                        stencil::second(&f, p, i, h, dom)?
                    } else {
                        let dj = |q: &[f64]| stencil::first(&f, q, j, h, dom);
                        stencil::first(&dj, p, i, h, dom)?
                    };
                    d.second[i * n + j] = v;
                    d.second[j * n + i] = v;
                }
            }
        }
        if order >= 3 {
            for i in 0..n {
                for j in i..n {
                    let dij = |q: &[f64]| -> Result<AVec, GeomError> {
                        if i == j {
                            stencil::second(&f, q, i, h, dom)
                        } else {
                            let dj = |r: &[f64]| stencil::first(&f, r, j, h, dom);
                            stencil::first(&dj, q, i, h, dom)
                        }
                    };
                    for k in j..n {
                        let v = stencil::first(&dij, p, k, h, dom)?;
                        for (a, b, c) in permutations(i, j, k) {
                            d.third[(a * n + b) * n + c] = v;
                        }
                    }
                }
            }
        }
        Ok(d)
    }
}

fn permutations(i: usize, j: usize, k: usize) -> [(usize, usize, usize); 6] {
    [(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)]
}
