use anyhow::{bail, Result};
use clap::Args;
use freebound::verify::{
    convergence_study, render_table, reports_to_json, run_check, CheckKind, VerificationReport, VerifyConfig,
};

use crate::output::{write_atomic, Object, RunManifest};
use crate::spec::{parse_killing, SurfaceSpec};
use crate::{OutArgs, EXIT_FAIL};

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Surface: disk, catenoid, rotational or cap, with optional
    /// parameters such as `disk:n=3` or `cap:height=0.3`.
    #[arg(long)]
    surface: SurfaceSpec,
    /// Comma-separated check names, or `all`.
    #[arg(long, default_value = "all")]
    checks: String,
    /// Killing field: tx|ty|tz|rx|ry|rz (also t<k>, r<i><j>) or
    /// `matrix=<upper triangle>;vector=<translation>`. Default: translation
    /// along the last axis.
    #[arg(long)]
    killing: Option<String>,
    /// Interior grid cells per axis.
    #[arg(long, default_value_t = 24)]
    grid: usize,
    /// Finite-difference step.
    #[arg(long, default_value_t = 1e-3)]
    h: f64,
    /// Starting Gauss-Legendre points per axis.
    #[arg(long, default_value_t = 64)]
    quad_points: usize,
    /// Samples per boundary face.
    #[arg(long, default_value_t = 64)]
    boundary_samples: usize,
    /// Also rerun step-dependent checks at h/2 and h/4 and record the
    /// observed convergence order.
    #[arg(long)]
    convergence: bool,
    #[command(flatten)]
    out: OutArgs,
}

fn parse_checks(list: &str) -> Result<Vec<CheckKind>> {
    if list.trim() == "all" {
        return Ok(CheckKind::ALL.to_vec());
    }
    let mut out = Vec::new();
    for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let kind: CheckKind = name.parse()?;
        if !out.contains(&kind) {
            out.push(kind);
        }
    }
    if out.is_empty() {
        bail!("--checks names no checks");
    }
    Ok(out)
}

pub fn run(args: VerifyArgs) -> Result<u8> {
    let checks = parse_checks(&args.checks)?;
    if !(args.h > 0.0 && args.h < 0.1) {
        bail!("--h must lie in (0, 0.1)");
    }
    if args.grid < 2 || args.quad_points < 2 || args.boundary_samples < 2 {
        bail!("--grid, --quad-points and --boundary-samples must be at least 2");
    }
    let surf = args.surface.build()?;
    let killing = args
        .killing
        .as_deref()
        .map(|k| parse_killing(k, surf.ambient_dim()))
        .transpose()?;
    let cfg = VerifyConfig {
        h: args.h,
        grid: args.grid,
        quad_points: args.quad_points,
        boundary_samples: args.boundary_samples,
        ..VerifyConfig::default()
    };
    let results = args.out.install(|| {
        cfg.exec.map(&checks, |&kind| {
            let mut report = run_check(kind, &surf, killing.as_ref(), &cfg)?;
            if args.convergence && kind.uses_h() {
                let hs = [cfg.h, cfg.h / 2.0, cfg.h / 4.0];
                let study = convergence_study(kind, &surf, killing.as_ref(), &cfg, &hs)?;
                report = report.with_metric("convergence_order_min", study.min_order());
            }
            Ok::<_, freebound::verify::VerifyError>(report)
        })
    })?;

    let mut reports: Vec<VerificationReport> = Vec::new();
    let mut errors = Vec::new();
    for (kind, r) in checks.iter().zip(results) {
        match r {
            Ok(rep) => reports.push(rep),
            Err(e) => {
                let msg = e.to_string();
                errors.push(if msg.starts_with(kind.name()) {
                    msg
                } else {
                    format!("{kind}: {msg}")
                });
            }
        }
    }

    let stem = format!("verify-{}", surf.id());
    let json_path = args.out.out.join(format!("{stem}.json"));
    let table_path = args.out.out.join(format!("{stem}.txt"));
    let table = render_table(&reports);
    write_atomic(&json_path, reports_to_json(&reports).as_bytes())?;
    write_atomic(&table_path, table.as_bytes())?;
    print!("{table}");

    let failed: Vec<&VerificationReport> = reports.iter().filter(|r| !r.passed).collect();
    for r in &failed {
        eprintln!(
            "FAIL {} on {}: residual_max {:e} >= tolerance {:e}",
            r.check_name, r.surface_id, r.residual_max, r.tolerance
        );
    }
    for e in &errors {
        eprintln!("ERROR {e}");
    }
    let code = if failed.is_empty() && errors.is_empty() {
        0
    } else {
        EXIT_FAIL
    };

    let params = Object::default()
        .val("checks", &checks.iter().map(|k| k.name()).collect::<Vec<_>>())
        .val("killing", &args.killing)
        .val("grid", &args.grid)
        .num("h", args.h)
        .val("quad_points", &args.quad_points)
        .val("boundary_samples", &args.boundary_samples)
        .val("convergence", &args.convergence)
        .val("errors", &errors);
    let mut manifest = RunManifest::new("verify", Some(args.surface.to_string()), params);
    manifest.outputs = vec![json_path, table_path];
    manifest.write(&args.out.out.join(format!("{stem}.manifest.json")), code)?;
    Ok(code)
}
