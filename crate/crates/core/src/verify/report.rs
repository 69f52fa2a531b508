//! Structured check results and their JSON form.

use std::collections::BTreeMap;

use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

/// Version tag written into every serialized report.
pub const REPORT_VERSION: u32 = 1;

/// Where a check was evaluated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// `interior`, `boundary`, `quadrature` or `dense`.
    pub kind: String,
    /// Nodes per axis (per face for boundary grids).
    pub counts: Vec<usize>,
    /// Number of points actually evaluated.
    pub points: usize,
    pub description: String,
}

/// Outcome of one check on one surface.
///
/// `passed` is `residual_max < tolerance`, always.
#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct VerificationReport {
    pub report_version: u32,
    pub check_name: String,
    pub surface_id: String,
    pub grid: GridSpec,
    pub residual_max: f64,
    pub residual_l2: f64,
    pub tolerance: f64,
    pub h_used: Option<f64>,
    pub passed: bool,
    pub notes: String,
    /// Named scalar side results (absolute residuals, gap scalars, ...).
    #[serde(default)]
    pub metrics: BTreeMap<String, f64>,
    /// Parameter-space locations reported by the check (zeros of `s_V`).
    #[serde(default)]
    pub locations: Vec<Vec<f64>>,
}

impl VerificationReport {
    pub fn new(
        check_name: &str,
        surface_id: &str,
        grid: GridSpec,
        residual_max: f64,
        residual_l2: f64,
        tolerance: f64,
        h_used: Option<f64>,
    ) -> Self {
        Self {
            report_version: REPORT_VERSION,
            check_name: check_name.to_string(),
            surface_id: surface_id.to_string(),
            grid,
            residual_max,
            residual_l2,
            tolerance,
            h_used,
            passed: residual_max < tolerance,
            notes: String::new(),
            metrics: BTreeMap::new(),
            locations: Vec::new(),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        let note = note.into();
        if !self.notes.is_empty() {
            self.notes.push_str("; ");
        }
        self.notes.push_str(&note);
        self
    }

    pub fn with_metric(mut self, name: &str, value: f64) -> Self {
        self.metrics.insert(name.to_string(), value);
        self
    }
}

/// Formats `x` with 17 significant digits; non-finite values become `null`.
pub fn sig17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

/// Formats `x` with 6 significant digits for tables.
pub fn sig6(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.5e}")
    } else {
        "nan".to_string()
    }
}

struct F17(f64);

impl Serialize for F17 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let raw = RawValue::from_string(sig17(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

struct F17Vec<'a>(&'a [f64]);

impl Serialize for F17Vec<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(|&x| F17(x)))
    }
}

impl Serialize for VerificationReport {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(None)?;
        m.serialize_entry("report_version", &self.report_version)?;
        m.serialize_entry("check_name", &self.check_name)?;
        m.serialize_entry("surface_id", &self.surface_id)?;
        m.serialize_entry("grid", &self.grid)?;
        m.serialize_entry("residual_max", &F17(self.residual_max))?;
        m.serialize_entry("residual_l2", &F17(self.residual_l2))?;
        m.serialize_entry("tolerance", &F17(self.tolerance))?;
        m.serialize_entry("h_used", &self.h_used.map(F17))?;
        m.serialize_entry("passed", &self.passed)?;
        m.serialize_entry("notes", &self.notes)?;
        let metrics: BTreeMap<&str, F17> = self.metrics.iter().map(|(k, v)| (k.as_str(), F17(*v))).collect();
        m.serialize_entry("metrics", &metrics)?;
        let locations: Vec<F17Vec> = self.locations.iter().map(|p| F17Vec(p)).collect();
        m.serialize_entry("locations", &locations)?;
        m.end()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ReportParseError {
    #[error("invalid report JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("report_version {found} is not supported (expected {REPORT_VERSION})")]
    Version { found: u64 },
    #[error("report is missing report_version")]
    MissingVersion,
}

/// Parses a JSON report array (or a single report object), rejecting any
/// record whose `report_version` differs from [`REPORT_VERSION`].
pub fn parse_reports(text: &str) -> Result<Vec<VerificationReport>, ReportParseError> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let items = match value {
        serde_json::Value::Array(items) => items,
        other => vec![other],
    };
    items
        .into_iter()
        .map(|item| {
            match item.get("report_version").and_then(|v| v.as_u64()) {
                Some(v) if v == REPORT_VERSION as u64 => {}
                Some(v) => return Err(ReportParseError::Version { found: v }),
                None => return Err(ReportParseError::MissingVersion),
            }
            Ok(serde_json::from_value(item)?)
        })
        .collect()
}

/// Serializes reports as a pretty JSON array.
pub fn reports_to_json(reports: &[VerificationReport]) -> String {
    serde_json::to_string_pretty(reports).expect("reports serialize")
}

/// Fixed-width text table, one row per report, six significant digits.
pub fn render_table(reports: &[VerificationReport]) -> String {
    let header = [
        "check",
        "surface",
        "residual_max",
        "residual_l2",
        "tolerance",
        "h",
        "status",
    ];
    let rows: Vec<[String; 7]> = reports
        .iter()
        .map(|r| {
            [
                r.check_name.clone(),
                r.surface_id.clone(),
                sig6(r.residual_max),
                sig6(r.residual_l2),
                sig6(r.tolerance),
                r.h_used.map(sig6).unwrap_or_else(|| "-".to_string()),
                if r.passed { "PASS" } else { "FAIL" }.to_string(),
            ]
        })
        .collect();
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: Vec<&str>| -> String {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(header.to_vec());
    for row in &rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    out
}
