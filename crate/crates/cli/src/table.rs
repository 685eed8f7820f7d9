//! CSV output with an audit header of `# key: value` lines.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use sqbath::dynamics::STABILITY_MARGIN;
use sqbath::model::DARK_MODE_THRESHOLD;
use sqbath::studies::RNG_NAME;
use sqbath::{Error, Result};

pub struct Audit {
    pub command: &'static str,
    pub seed: Option<u64>,
    pub timestamp: bool,
    pub extra: Vec<(String, String)>,
}

impl Audit {
    pub fn new(command: &'static str, seed: Option<u64>, timestamp: bool) -> Self {
        Self {
            command,
            seed,
            timestamp,
            extra: Vec::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.extra.push((key.to_string(), value.to_string()));
        self
    }

    pub fn header(&self) -> String {
        let mut lines = vec![
            format!("# sqbath {}", env!("CARGO_PKG_VERSION")),
            format!("# command: {}", self.command),
        ];
        if let Some(s) = self.seed {
            lines.push(format!("# seed: {s}"));
            lines.push(format!("# rng: {RNG_NAME}"));
        }
        lines.push(format!(
            "# tolerances: lyapunov_residual <= 1e-10*|D|, stability_margin = {STABILITY_MARGIN:e}*|A|, dark_mode_threshold = {DARK_MODE_THRESHOLD:e}"
        ));
        for (k, v) in &self.extra {
            lines.push(format!("# {k}: {v}"));
        }
        if self.timestamp {
            let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
            lines.push(format!("# timestamp_unix: {secs}"));
        }
        let mut out = lines.join("\n");
        out.push('\n');
        out
    }
}

/// Renders the audit header followed by the CSV table.
pub fn render(audit: &Audit, columns: &[String], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Error::Parse {
        context: "csv".into(),
        message: e.to_string(),
    };
    w.write_record(columns).map_err(err)?;
    for r in rows {
        w.write_record(r).map_err(err)?;
    }
    let body = w.into_inner().map_err(|e| Error::Parse {
        context: "csv".into(),
        message: e.to_string(),
    })?;
    Ok(audit.header() + &String::from_utf8_lossy(&body))
}

pub fn write(path: &Path, audit: &Audit, columns: &[String], rows: &[Vec<String>]) -> Result<()> {
    sqbath::io::write_text(path, &render(audit, columns, rows)?)
}

pub fn num(v: f64) -> String {
    format!("{v:e}")
}
