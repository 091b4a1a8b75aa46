//! CSV emission with a `# key=value` run manifest header.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use haavail_core::ModelParams;

pub const TOOL_NAME: &str = env!("CARGO_PKG_NAME");
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Everything needed to reproduce an output file.
#[derive(Debug, Clone, Default)]
pub struct RunManifest {
    pub command: String,
    pub params: Option<ModelParams>,
    pub seed: Option<u64>,
    pub rng: Option<&'static str>,
    /// Seconds since the Unix epoch; only recorded when requested.
    pub timestamp: Option<u64>,
    pub outputs: Vec<PathBuf>,
    /// Command-specific settings and summary values.
    pub extra: Vec<(String, String)>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            ..Self::default()
        }
    }

    pub fn stamp_now(&mut self) {
        self.timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .ok()
            .map(|d| d.as_secs());
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.extra.push((key.to_string(), value.to_string()));
    }

    pub fn header(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: &str| {
            let _ = writeln!(out, "# {k}={v}");
        };
        line("tool", &format!("{TOOL_NAME} {TOOL_VERSION}"));
        line("command", &self.command);
        if let Some(p) = &self.params {
            line("lambda", &num(p.lambda_active));
            line("lambda_s", &num(p.lambda_standby));
            line("mu", &num(p.mu));
            line("beta", &num(p.beta));
            line("c", &num(p.c));
            line("c_s", &num(p.c_s));
            line("T", &num(p.diag_interval));
        }
        if let Some(seed) = self.seed {
            line("seed", &seed.to_string());
        }
        if let Some(rng) = self.rng {
            line("rng", rng);
        }
        if let Some(ts) = self.timestamp {
            line("timestamp", &ts.to_string());
        }
        for path in &self.outputs {
            line("output", &path.display().to_string());
        }
        for (k, v) in &self.extra {
            line(k, v);
        }
        out
    }
}

/// Full double precision: 17 significant digits, '.' decimal separator.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes manifest header, column header and rows with LF line endings.
pub fn write_csv(path: &Path, manifest: &RunManifest, columns: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut out = manifest.header();
    out.push_str(&columns.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_keep_seventeen_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(525600.0), "5.2560000000000000e5");
        assert_eq!(num(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn header_lists_params() {
        let mut m = RunManifest::new("solve");
        m.params = Some(ModelParams::baseline());
        m.seed = Some(7);
        let h = m.header();
        assert!(h.contains("# command=solve\n"));
        assert!(h.contains("# T=1.6800000000000000e2\n"));
        assert!(h.contains("# seed=7\n"));
        assert!(!h.contains("timestamp"));
    }
}
