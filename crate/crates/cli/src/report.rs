use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde_json::{json, Value};

/// Environment variable that redirects all reports.
pub const OUTPUT_ENV: &str = "LAB_OUTPUT_DIR";

pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Pre-rendered CSV text, used instead of header/rows when set.
    raw: Option<String>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            raw: None,
        }
    }

    pub fn raw(name: &str, text: String) -> Self {
        Self {
            name: name.to_string(),
            header: Vec::new(),
            rows: Vec::new(),
            raw: Some(text),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    fn render(&self) -> Result<Vec<u8>> {
        if let Some(t) = &self.raw {
            return Ok(t.clone().into_bytes());
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        Ok(w.into_inner().map_err(|e| anyhow::anyhow!("csv flush: {e}"))?)
    }
}

/// `--out`, then the environment override, then `lab-output/<scenario>`.
pub fn output_dir(flag: Option<&Path>, scenario: &str) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    match std::env::var_os(OUTPUT_ENV) {
        Some(d) if !d.is_empty() => PathBuf::from(d),
        _ => PathBuf::from("lab-output").join(scenario),
    }
}

pub fn unix_seconds(t: SystemTime) -> f64 {
    t.duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

/// Writes `summary.json`, the CSV tables and `timestamps.json`. The summary
/// holds no wall-clock data, so identical runs produce identical bytes.
pub fn write_all(dir: &Path, summary: &Value, tables: &[Table], started: SystemTime, finished: SystemTime) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let mut text = serde_json::to_string_pretty(summary)?;
    text.push('\n');
    fs::write(dir.join("summary.json"), text)?;
    for t in tables {
        fs::write(dir.join(&t.name), t.render()?)?;
    }
    let stamps = json!({
        "started_unix": unix_seconds(started),
        "finished_unix": unix_seconds(finished),
        "elapsed_seconds": finished.duration_since(started).map(|d| d.as_secs_f64()).unwrap_or(0.0),
    });
    fs::write(dir.join("timestamps.json"), serde_json::to_string_pretty(&stamps)? + "\n")?;
    Ok(())
}
