//! Plain-text job configuration: one `key = value` pair per line.
//!
//! Blank lines are skipped and `#` starts a comment. The `job` key names
//! the computation; every other key is a nonnegative integer parameter.
//! Unknown keys are rejected so a typo cannot silently fall back to a
//! default.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::CliError;

/// Job names the binary understands.
pub const JOBS: [&str; 10] = [
    "cotor",
    "annular",
    "coskeletal",
    "koszul",
    "fgl",
    "pseries",
    "det",
    "betastar",
    "dieudonne",
    "prolim",
];

/// Integer parameter keys any job may use.
const PARAM_KEYS: [&str; 8] = ["p", "d", "j", "q", "T", "N", "window", "seed"];

/// A parsed config: the job name and its integer parameters.
#[derive(Debug, Clone)]
pub struct JobConfig {
    pub job: String,
    pub values: BTreeMap<String, u64>,
}

/// Reads and parses a config file, rejecting unknown or duplicate keys.
pub fn parse_config(path: &Path) -> Result<JobConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| {
        CliError::validation(format!("cannot read config {}: {e}", path.display()))
    })?;
    let mut job: Option<String> = None;
    let mut values = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::validation(format!(
                "config line {lineno}: expected `key = value`, got {raw:?}"
            )));
        };
        let (key, value) = (key.trim(), value.trim());
        if key == "job" {
            if !JOBS.contains(&value) {
                return Err(CliError::validation(format!(
                    "config line {lineno}: unknown job {value:?}; expected one of {}",
                    JOBS.join(", ")
                )));
            }
            if job.replace(value.to_string()).is_some() {
                return Err(CliError::validation(format!(
                    "config line {lineno}: duplicate key `job`"
                )));
            }
        } else if PARAM_KEYS.contains(&key) {
            let parsed: u64 = value.parse().map_err(|_| {
                CliError::validation(format!(
                    "config line {lineno}: value for `{key}` must be a nonnegative integer, got {value:?}"
                ))
            })?;
            if values.insert(key.to_string(), parsed).is_some() {
                return Err(CliError::validation(format!(
                    "config line {lineno}: duplicate key `{key}`"
                )));
            }
        } else {
            return Err(CliError::validation(format!(
                "config line {lineno}: unknown key `{key}`"
            )));
        }
    }
    let job = job.ok_or_else(|| CliError::validation("config is missing the `job` key"))?;
    Ok(JobConfig { job, values })
}
