//! Parameter ingestion: built-in baseline, then a JSON file, then flags.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use haavail_core::ModelParams;
use serde::Deserialize;

/// Flat JSON parameter file. Every key is optional; unknown keys are rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamFile {
    pub lambda: Option<f64>,
    pub lambda_s: Option<f64>,
    pub mu: Option<f64>,
    pub beta: Option<f64>,
    pub c: Option<f64>,
    pub c_s: Option<f64>,
    #[serde(rename = "T")]
    pub t: Option<f64>,
}

impl ParamFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading parameter file {}", path.display()))?;
        serde_json::from_str(&text)
            .with_context(|| format!("parsing parameter file {}", path.display()))
    }
}

#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    /// JSON parameter file with keys lambda, lambda_s, mu, beta, c, c_s, T
    #[arg(long = "params", value_name = "FILE")]
    pub file: Option<PathBuf>,

    /// Active unit failure rate (per hour)
    #[arg(long)]
    pub lambda: Option<f64>,

    /// Standby unit failure rate (per hour)
    #[arg(long = "lambda-s")]
    pub lambda_s: Option<f64>,

    /// Restoration rate of a failed unit (per hour)
    #[arg(long)]
    pub mu: Option<f64>,

    /// Reboot rate after an uncovered failure (per hour)
    #[arg(long)]
    pub beta: Option<f64>,

    /// Coverage probability of the active unit
    #[arg(long)]
    pub c: Option<f64>,

    /// Coverage probability of the standby unit
    #[arg(long = "cs", alias = "c-s")]
    pub c_s: Option<f64>,

    /// Diagnostic interval for latent standby faults (hours)
    #[arg(long = "T", value_name = "HOURS")]
    pub t: Option<f64>,
}

impl ParamArgs {
    /// Baseline values, overridden by the file, overridden by flags.
    /// The result is not validated.
    pub fn resolve(&self) -> Result<ModelParams> {
        let file = match &self.file {
            Some(path) => ParamFile::load(path)?,
            None => ParamFile::default(),
        };
        let base = ModelParams::baseline();
        let pick = |flag: Option<f64>, from_file: Option<f64>, default: f64| {
            flag.or(from_file).unwrap_or(default)
        };
        Ok(ModelParams {
            lambda_active: pick(self.lambda, file.lambda, base.lambda_active),
            lambda_standby: pick(self.lambda_s, file.lambda_s, base.lambda_standby),
            mu: pick(self.mu, file.mu, base.mu),
            beta: pick(self.beta, file.beta, base.beta),
            c: pick(self.c, file.c, base.c),
            c_s: pick(self.c_s, file.c_s, base.c_s),
            diag_interval: pick(self.t, file.t, base.diag_interval),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        let err = serde_json::from_str::<ParamFile>(r#"{"lamda": 0.1}"#).unwrap_err();
        assert!(err.to_string().contains("unknown field"));
    }

    #[test]
    fn t_key_is_uppercase() {
        let f: ParamFile = serde_json::from_str(r#"{"T": 24, "c_s": 0.5}"#).unwrap();
        assert_eq!(f.t, Some(24.0));
        assert_eq!(f.c_s, Some(0.5));
    }
}
