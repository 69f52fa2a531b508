//! Pointwise differential geometry of parametric hypersurfaces.
//!
//! Sign convention: `h_ij = -⟨∂_i∂_jF, ν⟩`, so the unit sphere with its
//! outward normal has `h = g` and `H = n`. Flipping `ν` flips `h`, `H`, `s_V`
//! and `u`; `|A|²`, `|∇A|²` and `Q` are unchanged.

pub mod chart;
pub mod killing;
pub mod local;
pub mod operators;
pub mod precise;
pub mod quadrature;
pub mod stencil;
pub mod surface;

use thiserror::Error;

pub use chart::{AVec, Chart, ChartDerivatives, SmoothMap, MAX_AMBIENT};
pub use killing::KillingField;
pub use local::{
    graph_quantity, mean_curvature, metric_at, nabla_a_norm_sq, q_quantity, shape_operator, support_function,
    unit_normal, GeometrySample, LocalGeometry,
};
pub use operators::{laplace_beltrami, laplace_beltrami_4, surface_gradient, SurfaceGradient};
pub use precise::{Dd, FieldValue, PreciseGeometry};
pub use quadrature::{boundary_volume, surface_area, GaussLegendre, Integral, QuadratureRule};
pub use surface::{Axis, ChartDiff, Face, ParamDomain, ParametricHypersurface, Side, Topology};

/// Smallest `det g / Π g_ii` accepted as an immersion.
pub const DEGENERATE_DET: f64 = 1e-14;

/// Smallest `|s_V|` for which `v_V = 1/s_V` is formed.
pub const GRAPH_EPS: f64 = 1e-10;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GeomError {
    #[error("chart is not an immersion at {point:?} (det g = {det:e})")]
    DegenerateChart { point: Vec<f64>, det: f64 },
    #[error("s_V = {s_v:e} vanishes at {point:?}; the surface is not graphical there")]
    ZeroGraphQuantity { point: Vec<f64>, s_v: f64 },
    #[error("stencil with step {step:e} leaves the domain along axis {axis} at {point:?}")]
    StencilOutOfDomain { point: Vec<f64>, axis: usize, step: f64 },
    #[error("parameter point {point:?} is outside the domain")]
    OutsideDomain { point: Vec<f64> },
    #[error("quadrature did not converge: relative change {change:e} with {points} points per axis")]
    QuadratureNonConvergence { points: usize, change: f64 },
    #[error("surface has no boundary faces")]
    NoBoundary,
}
