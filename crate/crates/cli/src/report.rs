//! Output documents: JSON with provenance, or a flat CSV projection.

use crate::args::Format;
use crate::jobs::{Failure, Job, Outcome, EXIT_USAGE};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

pub const GIT_DESCRIBE: &str = env!("HEISENBERG_GIT_DESCRIBE");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    #[serde(rename = "git-describe")]
    pub git_describe: String,
    pub tolerances: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub config: Job,
    pub results: Value,
    pub provenance: Provenance,
}

impl Document {
    pub fn new(job: &Job, outcome: &Outcome) -> Self {
        Document {
            config: job.clone(),
            results: outcome.results.clone(),
            provenance: Provenance {
                seed: job.seed(),
                git_describe: GIT_DESCRIBE.to_string(),
                tolerances: outcome.tolerances.clone(),
            },
        }
    }
}

pub fn render(job: &Job, outcome: &Outcome, format: Format) -> Result<Vec<u8>, Failure> {
    let io = |e: &dyn std::fmt::Display| Failure { code: EXIT_USAGE, message: format!("cannot render output: {e}") };
    match format {
        Format::Json => {
            let mut s = serde_json::to_vec_pretty(&Document::new(job, outcome)).map_err(|e| io(&e))?;
            s.push(b'\n');
            Ok(s)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&outcome.csv_header).map_err(|e| io(&e))?;
            for row in &outcome.csv_rows {
                w.write_record(row).map_err(|e| io(&e))?;
            }
            w.into_inner().map_err(|e| io(&e))
        }
    }
}

pub fn emit(bytes: &[u8], output: Option<&Path>) -> Result<(), Failure> {
    let fail = |e: std::io::Error| Failure { code: EXIT_USAGE, message: format!("cannot write output: {e}") };
    match output {
        Some(p) => std::fs::write(p, bytes).map_err(fail),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes).map_err(fail)?;
            out.flush().map_err(fail)
        }
    }
}

pub fn read_document(path: &Path) -> Result<Document, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{} is not a run document: {e}", path.display())))
}
