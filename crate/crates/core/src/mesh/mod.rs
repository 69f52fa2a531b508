//! Discrete free-boundary area minimization for triangle meshes in R³
//! whose boundary vertices lie on the unit sphere.

pub mod curvature;
pub mod init;
pub mod metrics;
pub mod solve;
pub mod trimesh;

pub use curvature::{
    area_gradient, discrete_a2, discrete_mean_curvature, fit_quadric, mixed_areas, CotanWeights, DiscreteA2,
    MeanCurvature, QuadricFit,
};
pub use init::{catenoid_annulus, catenoid_half_height, flat_disk, init_graph_disk, sphere_patch};
pub use metrics::{
    boundary_orthogonality, discrete_isoperimetric_residual, flatness_metrics, FlatnessMetrics,
};
pub use solve::{
    minimize, project_boundary, BoundaryProjection, DescentMetric, Minimized, SolverConfig, StopReason,
    Trace, TraceRow,
};
pub use trimesh::{Point, TriMesh};

#[derive(Debug, thiserror::Error)]
pub enum MeshError {
    #[error("invalid mesh topology: {0}")]
    Topology(String),
    #[error("degenerate triangle {triangle}: area {area:e}, smallest angle {min_angle_deg:.3}°")]
    Degenerate {
        triangle: usize,
        area: f64,
        min_angle_deg: f64,
    },
    #[error("mesh is not graphical: vertex {vertex} at {position:?} has <ν, e3> = {s:e}")]
    GraphicalityViolation {
        vertex: usize,
        position: [f64; 3],
        s: f64,
    },
    #[error("vertex {vertex} has only {points} usable neighbours for a quadric fit")]
    InsufficientNeighborhood { vertex: usize, points: usize },
    #[error("{0}")]
    InvalidParameter(String),
    #[error("no convergence after {iterations} steps: {reason}")]
    NotConverged {
        iterations: usize,
        reason: String,
        trace: Box<Trace>,
        mesh: Box<TriMesh>,
    },
    #[error("OBJ line {line}: {reason}")]
    Obj { line: usize, reason: String },
}
