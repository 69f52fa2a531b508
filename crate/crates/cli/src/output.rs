//! Atomic file output, 17-digit JSON values and the run manifest.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use freebound::verify::report::sig17;
use serde::Serialize;
use serde_json::value::RawValue;

/// Writes `contents` to a temporary file next to `path`, then renames it
/// into place, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating a temporary file in {}", dir.display()))?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Raw JSON number with 17 significant digits (`null` if not finite).
pub fn num(x: f64) -> Box<RawValue> {
    RawValue::from_string(sig17(x)).expect("valid number")
}

pub fn raw<T: Serialize + ?Sized>(value: &T) -> Box<RawValue> {
    serde_json::value::to_raw_value(value).expect("serializable")
}

/// Ordered JSON object of already-formatted values.
#[derive(Default, Serialize)]
#[serde(transparent)]
pub struct Object(BTreeMap<String, Box<RawValue>>);

impl Object {
    pub fn num(mut self, key: &str, x: f64) -> Self {
        self.0.insert(key.to_string(), num(x));
        self
    }

    pub fn nums(mut self, key: &str, xs: &[f64]) -> Self {
        let text = format!("[{}]", xs.iter().map(|&x| sig17(x)).collect::<Vec<_>>().join(","));
        self.0
            .insert(key.to_string(), RawValue::from_string(text).expect("valid array"));
        self
    }

    pub fn val<T: Serialize + ?Sized>(mut self, key: &str, value: &T) -> Self {
        self.0.insert(key.to_string(), raw(value));
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable") + "\n"
    }
}

/// Record of one invocation. The only place a timestamp is written, so
/// result files from identical runs are byte-identical.
#[derive(Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    /// Full argument vector; replaying it reproduces the outputs.
    pub arguments: Vec<String>,
    pub surface: Option<String>,
    pub parameters: Object,
    pub outputs: Vec<PathBuf>,
    pub exit_code: u8,
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(command: &str, surface: Option<String>, parameters: Object) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            arguments: std::env::args().collect(),
            surface,
            parameters,
            outputs: Vec::new(),
            exit_code: 0,
            timestamp: String::new(),
        }
    }

    pub fn write(mut self, path: &Path, exit_code: u8) -> Result<()> {
        self.exit_code = exit_code;
        self.timestamp = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true);
        let text = serde_json::to_string_pretty(&self)? + "\n";
        write_atomic(path, text.as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sub/out.txt");
        write_atomic(&path, b"first").unwrap();
        write_atomic(&path, b"second").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "second");
        assert_eq!(std::fs::read_dir(dir.path().join("sub")).unwrap().count(), 1);
    }

    #[test]
    fn numbers_keep_seventeen_digits() {
        let json = Object::default()
            .num("x", 0.1)
            .nums("v", &[1.0, f64::NAN])
            .to_json();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["x"].as_f64(), Some(0.1));
        assert!(json.contains("1.0000000000000001e-1"));
        assert!(v["v"][1].is_null());
    }
}
