//! Numerical residual checks of the identities satisfied by free-boundary
//! minimal hypersurfaces, each producing a [`VerificationReport`].
//!
//! Checks are pure functions of the surface, an optional Killing field and
//! a [`VerifyConfig`]; [`run_suite`] evaluates several of them concurrently.

pub mod boundary;
pub mod grid;
pub mod integral;
pub mod interior;
pub mod report;
pub mod zeros;

use std::fmt;
use std::str::FromStr;

use crate::geom::{GeomError, KillingField, ParametricHypersurface};
use crate::Exec;

pub use boundary::{check_boundary_relations, check_normal_derivative_a2, AdaptedFrame};
pub use grid::{BoundaryGrid, SampleGrid};
pub use integral::{check_isoperimetric, curvature_gap_report};
pub use interior::{
    check_graph_laplacian, check_q_inequality, check_simons, check_u2_identity, check_v2_identity,
    graphical_gate, minimality_gate, q_terms, QTerms,
};
pub use report::{
    parse_reports, render_table, reports_to_json, GridSpec, ReportParseError, VerificationReport,
    REPORT_VERSION,
};
pub use zeros::{killing_zero_search, ZeroSearch};

#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error("{check}: precondition violated: {reason}")]
    PreconditionViolation { check: String, reason: String },
    #[error("|s_V| <= {cutoff} at {} grid point(s), first at {:?}", points.len(), points.first())]
    ZeroGraphQuantity { cutoff: f64, points: Vec<Vec<f64>> },
    #[error("no grid point has |s_V| > {cutoff}, so there is no graphical region to test")]
    EmptyGraphicalRegion { cutoff: f64 },
    #[error("adapted boundary frame degenerates at {point:?}")]
    FrameConstruction { point: Vec<f64> },
    #[error("unknown check {0:?}")]
    UnknownCheck(String),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// Step sizes, grids and tolerances shared by all checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyConfig {
    /// Finite-difference step in parameter space.
    pub h: f64,
    /// Interior cells per axis.
    pub grid: usize,
    /// Target number of samples per boundary face.
    pub boundary_samples: usize,
    /// Starting Gauss–Legendre points per axis on two-dimensional domains;
    /// see [`VerifyConfig::per_axis`].
    pub quad_points: usize,
    /// Graphical-region cutoff on `|s_V|`.
    pub graph_cutoff: f64,
    pub interior_tol: f64,
    pub boundary_tol: f64,
    pub q_tol: f64,
    pub iso_tol: f64,
    pub gap_tol: f64,
    pub zero_tol: f64,
    /// Largest `|H|` accepted as minimal.
    pub minimality_gate: f64,
    /// Nodes per axis of the dense zero-search grid, and of the extremum
    /// scans (through [`VerifyConfig::per_axis`]).
    pub zero_grid: usize,
    pub exec: Exec,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            h: 1e-3,
            grid: 24,
            boundary_samples: 64,
            quad_points: 64,
            graph_cutoff: 0.05,
            interior_tol: 1e-3,
            boundary_tol: 5e-3,
            q_tol: 1e-4,
            iso_tol: 1e-8,
            gap_tol: 1e-5,
            zero_tol: 1e-9,
            minimality_gate: 1e-7,
            zero_grid: 64,
            exec: Exec::default(),
        }
    }
}

impl VerifyConfig {
    pub fn with_h(mut self, h: f64) -> Self {
        self.h = h;
        self
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    /// Per-axis count on a `dim`-dimensional domain that keeps the total
    /// of a `base × base` grid, so tensor rules stay affordable for n ≥ 3.
    pub fn per_axis(base: usize, dim: usize) -> usize {
        if dim <= 2 {
            return base;
        }
        ((base as f64).powf(2.0 / dim as f64).round() as usize).max(8)
    }

    pub fn interior_grid(&self, surf: &ParametricHypersurface) -> SampleGrid {
        SampleGrid::interior(surf, self.grid)
    }

    /// Interior grid restricted to `|s_V| > graph_cutoff`.
    pub fn graphical_grid(&self, surf: &ParametricHypersurface, v: &KillingField) -> SampleGrid {
        let cutoff = self.graph_cutoff;
        self.interior_grid(surf).filtered(
            |p| matches!(interior::s_v(surf, v, p), Ok(s) if s.abs() > cutoff),
            &format!("|s_V| > {cutoff}"),
        )
    }

    pub fn boundary_grid(&self, surf: &ParametricHypersurface) -> BoundaryGrid {
        BoundaryGrid::new(surf, self.boundary_samples)
    }
}

/// The available checks, by their report names.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CheckKind {
    GraphLaplacian,
    V2,
    U2,
    QInequality,
    Simons,
    BoundaryRelations,
    NormalDerivativeA2,
    Isoperimetric,
    CurvatureGap,
    KillingZeros,
}

impl CheckKind {
    pub const ALL: [CheckKind; 10] = [
        CheckKind::GraphLaplacian,
        CheckKind::V2,
        CheckKind::U2,
        CheckKind::QInequality,
        CheckKind::Simons,
        CheckKind::BoundaryRelations,
        CheckKind::NormalDerivativeA2,
        CheckKind::Isoperimetric,
        CheckKind::CurvatureGap,
        CheckKind::KillingZeros,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::GraphLaplacian => "graph-laplacian",
            CheckKind::V2 => "v2",
            CheckKind::U2 => "u2",
            CheckKind::QInequality => "q-inequality",
            CheckKind::Simons => "simons",
            CheckKind::BoundaryRelations => "boundary-relations",
            CheckKind::NormalDerivativeA2 => "normal-derivative-a2",
            CheckKind::Isoperimetric => "isoperimetric",
            CheckKind::CurvatureGap => "curvature-gap",
            CheckKind::KillingZeros => "killing-zeros",
        }
    }

    /// Whether the check reads a Killing field.
    pub fn uses_killing(self) -> bool {
        matches!(
            self,
            CheckKind::GraphLaplacian | CheckKind::V2 | CheckKind::QInequality | CheckKind::KillingZeros
        )
    }

    /// Whether the check uses the step `h` (and so has a convergence order).
    pub fn uses_h(self) -> bool {
        !matches!(self, CheckKind::Isoperimetric | CheckKind::KillingZeros)
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CheckKind {
    type Err = VerifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CheckKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| VerifyError::UnknownCheck(s.to_string()))
    }
}

/// Translation along the last ambient axis, the default Killing field.
pub fn default_killing(surf: &ParametricHypersurface) -> KillingField {
    let m = surf.ambient_dim();
    KillingField::axis_translation(m, m - 1)
}

/// Runs one check with its default grid. `v` defaults to
/// [`default_killing`].
pub fn run_check(
    kind: CheckKind,
    surf: &ParametricHypersurface,
    v: Option<&KillingField>,
    cfg: &VerifyConfig,
) -> Result<VerificationReport, VerifyError> {
    let fallback;
    let v = match v {
        Some(v) => v,
        None => {
            fallback = default_killing(surf);
            &fallback
        }
    };
    match kind {
        CheckKind::GraphLaplacian => check_graph_laplacian(surf, v, &cfg.interior_grid(surf), cfg),
        CheckKind::V2 => check_v2_identity(surf, v, &cfg.graphical_grid(surf, v), cfg),
        CheckKind::U2 => check_u2_identity(surf, &cfg.interior_grid(surf), cfg),
        CheckKind::QInequality => check_q_inequality(surf, v, &cfg.graphical_grid(surf, v), cfg),
        CheckKind::Simons => check_simons(surf, &cfg.interior_grid(surf), cfg),
        CheckKind::BoundaryRelations => check_boundary_relations(surf, &cfg.boundary_grid(surf), cfg),
        CheckKind::NormalDerivativeA2 => check_normal_derivative_a2(surf, &cfg.boundary_grid(surf), cfg),
        CheckKind::Isoperimetric => check_isoperimetric(surf, cfg),
        CheckKind::CurvatureGap => curvature_gap_report(surf, cfg),
        CheckKind::KillingZeros => Ok(killing_zero_search(surf, v, cfg)?.report),
    }
}

/// Runs `checks` concurrently (per `cfg.exec`), returning results in input
/// order.
pub fn run_suite(
    checks: &[CheckKind],
    surf: &ParametricHypersurface,
    v: Option<&KillingField>,
    cfg: &VerifyConfig,
) -> Vec<Result<VerificationReport, VerifyError>> {
    cfg.exec.map(checks, |&k| run_check(k, surf, v, cfg))
}

/// Residuals of one check across several step sizes.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceStudy {
    pub hs: Vec<f64>,
    pub residuals: Vec<f64>,
    /// `log2` of consecutive residual ratios, assuming `hs` halves.
    pub orders: Vec<f64>,
}

impl ConvergenceStudy {
    pub fn min_order(&self) -> f64 {
        self.orders.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Reruns `kind` at each step in `hs` (expected to halve successively).
pub fn convergence_study(
    kind: CheckKind,
    surf: &ParametricHypersurface,
    v: Option<&KillingField>,
    cfg: &VerifyConfig,
    hs: &[f64],
) -> Result<ConvergenceStudy, VerifyError> {
    let residuals = hs
        .iter()
        .map(|&h| Ok(run_check(kind, surf, v, &cfg.with_h(h))?.residual_max))
        .collect::<Result<Vec<f64>, VerifyError>>()?;
    let orders = residuals
        .windows(2)
        .zip(hs.windows(2))
        .map(|(r, h)| (r[0] / r[1]).ln() / (h[0] / h[1]).ln())
        .collect();
    Ok(ConvergenceStudy {
        hs: hs.to_vec(),
        residuals,
        orders,
    })
}
