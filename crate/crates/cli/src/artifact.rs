//! The artifact schema shared by every job, and its JSON and CSV renderings.
//!
//! All collections are ordered (`BTreeMap`, `Vec`) so a rerun with the same
//! config and seed serializes to the exact same bytes. JSON carries the full
//! artifact; CSV carries only the dimension table, with identical rows.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::CliError;

/// One job's complete output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Artifact {
    pub job: String,
    /// Resolved integer parameters, defaults included.
    pub params: BTreeMap<String, u64>,
    pub result: JobResult,
    pub meta: Meta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobResult {
    /// Rows `[s, n, dim]`: the job's dimension table.
    pub bigraded_dims: Vec<(u64, u64, u64)>,
    /// Named values that are not dimensions: digit vectors, offsets, totals.
    pub scalars: BTreeMap<String, serde_json::Value>,
    /// Named checks the job ran; every value is computed, never assumed.
    pub verdicts: BTreeMap<String, bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    /// Degrees below this bound are exact; above it the window truncates.
    pub window_valid_below: Option<u64>,
    /// Coefficient-ring precision used, for jobs that have one.
    pub precision: Option<u64>,
    pub caveats: Vec<String>,
}

/// The caveat attached to every artifact: the algebra layer is exact at any
/// height, so no large-prime assumption is consumed.
pub const STANDARD_CAVEAT: &str = "p >> d assumption not used at algebra level";

impl Meta {
    pub fn new(window_valid_below: Option<u64>, precision: Option<u64>) -> Self {
        Meta {
            window_valid_below,
            precision,
            caveats: vec![STANDARD_CAVEAT.to_string()],
        }
    }
}

impl Artifact {
    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("artifact serializes");
        out.push('\n');
        out
    }

    /// The dimension table alone: an `s,n,dim` header plus one row per cell.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,n,dim\n");
        for &(s, n, dim) in &self.result.bigraded_dims {
            out.push_str(&format!("{s},{n},{dim}\n"));
        }
        out
    }
}

/// Writes through a temporary file in the destination directory plus a
/// rename, so an interrupted run never leaves a partial artifact.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let parent = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(parent).map_err(|e| {
        CliError::validation(format!(
            "cannot create a temporary file in {}: {e}",
            parent.display()
        ))
    })?;
    tmp.write_all(bytes)
        .map_err(|e| CliError::validation(format!("cannot write artifact: {e}")))?;
    tmp.persist(path).map_err(|e| {
        CliError::validation(format!("cannot move artifact into {}: {e}", path.display()))
    })?;
    Ok(())
}
