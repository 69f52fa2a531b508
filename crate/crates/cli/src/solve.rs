use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use freebound::exact::critical_catenoid_parameters;
use freebound::mesh::{
    boundary_orthogonality, catenoid_annulus, discrete_isoperimetric_residual, flat_disk, flatness_metrics,
    init_graph_disk, minimize, BoundaryProjection, DescentMetric, MeshError, SolverConfig, Trace, TriMesh,
};
use freebound::Exec;

use crate::expr::Expr;
use crate::output::{write_atomic, Object, RunManifest};
use crate::{OutArgs, EXIT_FAIL};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Init {
    /// Graph of `--height` over the structured unit disk.
    Graph,
    Flat,
    /// Catenoid annulus with waist radius `--neck`.
    Annulus,
    /// Mesh read from `--mesh`.
    Obj,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Metric {
    Sobolev,
    Euclidean,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Projection {
    Balanced,
    Radial,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[arg(long, value_enum, default_value = "graph")]
    init: Init,
    /// Height f(x, y) for `--init graph`, e.g. `0.2*(1-r^2)`.
    #[arg(long, default_value = "0.2*(1-r^2)", allow_hyphen_values = true)]
    height: String,
    /// Mesh resolution (rings of the disk, rows of the annulus).
    #[arg(long, default_value_t = 32)]
    res: usize,
    /// Waist radius for `--init annulus` (default: the critical catenoid).
    #[arg(long)]
    neck: Option<f64>,
    /// OBJ file for `--init obj`.
    #[arg(long)]
    mesh: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "sobolev")]
    metric: Metric,
    #[arg(long, value_enum, default_value = "balanced")]
    projection: Projection,
    #[arg(long, default_value_t = 500)]
    max_iter: usize,
    /// First trial step of each line search.
    #[arg(long, default_value_t = 1.0)]
    step: f64,
    #[arg(long, default_value_t = 1e-8)]
    gradient_tol: f64,
    #[arg(long, default_value_t = 1e-8)]
    displacement_tol: f64,
    /// File name stem of the outputs.
    #[arg(long, default_value = "solve")]
    name: String,
    #[command(flatten)]
    out: OutArgs,
}

fn initial_mesh(args: &SolveArgs) -> Result<TriMesh> {
    Ok(match args.init {
        Init::Graph => {
            let h: Expr = args
                .height
                .parse()
                .map_err(|e| anyhow::anyhow!("--height: {e}"))?;
            init_graph_disk(args.res, |x, y| h.eval(x, y))?
        }
        Init::Flat => flat_disk(args.res)?,
        Init::Annulus => {
            let neck = args.neck.unwrap_or_else(|| critical_catenoid_parameters().c);
            catenoid_annulus(args.res, neck)?
        }
        Init::Obj => {
            let path = args.mesh.as_ref().context("--init obj needs --mesh")?;
            let text =
                std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            TriMesh::from_obj(&text)?
        }
    })
}

fn summary(mesh: &TriMesh, trace: &Trace, converged: bool, stop: &str, iterations: usize) -> Object {
    let flat = flatness_metrics(mesh, Exec::default());
    let last = trace.rows.last();
    Object::default()
        .val("report_version", &freebound::verify::REPORT_VERSION)
        .val("converged", &converged)
        .val("stop", stop)
        .val("iterations", &iterations)
        .val("vertices", &mesh.vertex_count())
        .val("triangles", &mesh.triangles().len())
        .num("area", mesh.area())
        .num("boundary_length", mesh.boundary_length())
        .num("isoperimetric_residual", discrete_isoperimetric_residual(mesh))
        .num("boundary_orthogonality", boundary_orthogonality(mesh))
        .num("boundary_sphere_residual", mesh.boundary_sphere_residual())
        .num("max_gradient", last.map_or(f64::NAN, |r| r.max_gradient))
        .num("plane_deviation", flat.plane_deviation)
        .nums("plane_normal", &flat.plane_normal)
        .num("max_a2", flat.max_a2)
        .val("a2_excluded", &flat.a2_excluded)
        .num("min_s_e3", flat.min_s_e3)
}

pub fn run(args: SolveArgs) -> Result<u8> {
    if args.res < 2 {
        bail!("--res must be at least 2");
    }
    let cfg = SolverConfig {
        step: args.step,
        gradient_tol: args.gradient_tol,
        displacement_tol: args.displacement_tol,
        max_iterations: args.max_iter,
        metric: match args.metric {
            Metric::Sobolev => DescentMetric::Sobolev,
            Metric::Euclidean => DescentMetric::Euclidean,
        },
        projection: match args.projection {
            Projection::Balanced => BoundaryProjection::Balanced,
            Projection::Radial => BoundaryProjection::Radial,
        },
        ..SolverConfig::default()
    };
    cfg.validate()?;
    let initial = initial_mesh(&args)?;

    let (mesh, trace, converged, stop, iterations) = match args.out.install(|| minimize(&initial, &cfg))? {
        Ok(m) => {
            let stop = serde_json::to_value(m.stop)?
                .as_str()
                .unwrap_or_default()
                .to_string();
            (m.mesh, m.trace, true, stop, m.iterations)
        }
        Err(MeshError::NotConverged {
            iterations,
            reason,
            trace,
            mesh,
        }) => {
            eprintln!("solver did not converge after {iterations} iterations: {reason}");
            (*mesh, *trace, false, reason, iterations)
        }
        Err(e) => return Err(e.into()),
    };

    let dir = &args.out.out;
    let obj = dir.join(format!("{}.obj", args.name));
    let csv = dir.join(format!("{}.trace.csv", args.name));
    let json = dir.join(format!("{}.json", args.name));
    write_atomic(&csv, trace.to_csv().as_bytes())?;
    write_atomic(&obj, mesh.to_obj().as_bytes())?;
    let metrics = summary(&mesh, &trace, converged, &stop, iterations);
    write_atomic(&json, metrics.to_json().as_bytes())?;
    print!("{}", metrics.to_json());

    let code = if converged { 0 } else { EXIT_FAIL };
    let params = Object::default()
        .val("init", &format!("{:?}", args.init).to_lowercase())
        .val("height", &args.height)
        .val("res", &args.res)
        .num("neck", args.neck.unwrap_or(f64::NAN))
        .val("mesh", &args.mesh)
        .val("metric", &cfg.metric)
        .val("projection", &cfg.projection)
        .val("max_iterations", &cfg.max_iterations)
        .num("step", cfg.step)
        .num("gradient_tol", cfg.gradient_tol)
        .num("displacement_tol", cfg.displacement_tol);
    let mut manifest = RunManifest::new("solve", None, params);
    manifest.outputs = vec![obj, csv, json];
    manifest.write(&dir.join(format!("{}.manifest.json", args.name)), code)?;
    Ok(code)
}
