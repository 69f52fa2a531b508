use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use freebound::verify::report::sig6;
use freebound::verify::{parse_reports, CheckKind, VerificationReport};

use crate::output::{write_atomic, Object, RunManifest};
use crate::{OutArgs, EXIT_FAIL};

#[derive(Args, Debug)]
pub struct ReportArgs {
    /// Report JSON files written by `verify`.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// File name stem of the summaries.
    #[arg(long, default_value = "summary")]
    name: String,
    #[command(flatten)]
    out: OutArgs,
}

pub const COLUMNS: [&str; 8] = [
    "surface",
    "check",
    "status",
    "residual_max",
    "residual_l2",
    "tolerance",
    "h",
    "points",
];

fn check_rank(name: &str) -> usize {
    CheckKind::ALL
        .iter()
        .position(|k| k.name() == name)
        .unwrap_or(CheckKind::ALL.len())
}

/// One row per (surface, check), later inputs replacing earlier ones;
/// surfaces alphabetical, checks in battery order.
pub fn merge(reports: Vec<VerificationReport>) -> Vec<VerificationReport> {
    let mut rows = BTreeMap::new();
    for r in reports {
        let key = (
            r.surface_id.clone(),
            check_rank(&r.check_name),
            r.check_name.clone(),
        );
        rows.insert(key, r);
    }
    rows.into_values().collect()
}

fn cells(r: &VerificationReport) -> [String; 8] {
    [
        r.surface_id.clone(),
        r.check_name.clone(),
        if r.passed { "PASS" } else { "FAIL" }.to_string(),
        sig6(r.residual_max),
        sig6(r.residual_l2),
        sig6(r.tolerance),
        r.h_used.map(sig6).unwrap_or_else(|| "-".to_string()),
        r.grid.points.to_string(),
    ]
}

pub fn to_csv(rows: &[VerificationReport]) -> String {
    let mut out = COLUMNS.join(",") + "\n";
    for r in rows {
        out += &(cells(r).join(",") + "\n");
    }
    out
}

pub fn to_markdown(rows: &[VerificationReport]) -> String {
    let mut out = format!("| {} |\n", COLUMNS.join(" | "));
    out += &format!("|{}\n", "---|".repeat(COLUMNS.len()));
    for r in rows {
        out += &format!("| {} |\n", cells(r).join(" | "));
    }
    let passed = rows.iter().filter(|r| r.passed).count();
    out += &format!("\n{passed} of {} checks passed.\n", rows.len());
    out
}

pub fn run(args: ReportArgs) -> Result<u8> {
    let mut all = Vec::new();
    for path in &args.inputs {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let reports = parse_reports(&text).with_context(|| format!("{}", path.display()))?;
        all.extend(reports);
    }
    if all.is_empty() {
        bail!("the inputs contain no reports");
    }
    let rows = merge(all);
    let csv = args.out.out.join(format!("{}.csv", args.name));
    let md = args.out.out.join(format!("{}.md", args.name));
    write_atomic(&csv, to_csv(&rows).as_bytes())?;
    let markdown = to_markdown(&rows);
    write_atomic(&md, markdown.as_bytes())?;
    print!("{markdown}");

    let code = if rows.iter().all(|r| r.passed) {
        0
    } else {
        EXIT_FAIL
    };
    let params = Object::default().val("inputs", &args.inputs);
    let mut manifest = RunManifest::new("report", None, params);
    manifest.outputs = vec![csv, md];
    manifest.write(&args.out.out.join(format!("{}.manifest.json", args.name)), code)?;
    Ok(code)
}
