//! Scenario documents, batch certification, surveys and report records.
//!
//! Reports are JSON lines with every big integer written as a decimal string;
//! CSV is available for flat tables. Batch output follows input order no
//! matter how scenarios are scheduled.

mod record;
mod scenario;
mod survey;

pub use record::{records_to_csv, ReportRecord, WitnessFields, CSV_HEADER};
pub use scenario::{
    parse_scenario, parse_scenario_batch, parse_scenario_document, parse_vector_arg,
    scenario_from_value, scenario_to_value, ScenarioDocument,
};
pub use survey::{run_oracle_check, run_survey, OracleCheckSummary, Survey, SurveyRow, SurveySample};

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use crate::witness::{certify_scenario, CertPath, CertifyOptions, PipelineOrder};

/// Command-line settings that take precedence over a document's own options.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OptionOverrides {
    pub order: Option<PipelineOrder>,
    pub cap: Option<usize>,
    pub budget: Option<u64>,
}

impl OptionOverrides {
    pub fn apply(&self, base: Option<&CertifyOptions>) -> CertifyOptions {
        let mut o = base.cloned().unwrap_or_default();
        if let Some(order) = self.order {
            o.order = order;
        }
        if let Some(cap) = self.cap {
            o.u_cap = cap;
        }
        if let Some(budget) = self.budget {
            o.lift_budget = budget;
        }
        o
    }
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_NONE_PATH: i32 = 2;

#[derive(Clone, Debug)]
pub struct CertifyRun {
    pub records: Vec<ReportRecord>,
    /// Unreadable or malformed inputs, one message each.
    pub errors: Vec<String>,
    pub exit_code: i32,
}

fn scenario_id(path: &Path, index: usize, total: usize, id: Option<&str>) -> String {
    if let Some(id) = id {
        return id.to_string();
    }
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    if total == 1 {
        stem
    } else {
        format!("{stem}#{index}")
    }
}

/// Certifies every scenario in `paths`. Exit code 1 if any input could not
/// be read or parsed, else 2 if any scenario ended on the none path, else 0.
pub fn run_certify(paths: &[PathBuf], overrides: &OptionOverrides, timing: bool) -> CertifyRun {
    let mut jobs = Vec::new();
    let mut errors = Vec::new();
    for path in paths {
        let parsed = std::fs::read(path)
            .map_err(|e| format!("{}: {e}", path.display()))
            .and_then(|bytes| {
                parse_scenario_batch(&bytes).map_err(|e| format!("{}: {e}", path.display()))
            });
        match parsed {
            Ok(docs) => {
                let total = docs.len();
                for (i, d) in docs.into_iter().enumerate() {
                    let id = scenario_id(path, i, total, d.id.as_deref());
                    jobs.push((id, d));
                }
            }
            Err(e) => errors.push(e),
        }
    }
    let records: Vec<ReportRecord> = jobs
        .par_iter()
        .map(|(id, doc)| {
            let opts = overrides.apply(doc.options.as_ref());
            let start = Instant::now();
            let cert = certify_scenario(&doc.scenario, &opts);
            let ms = timing.then(|| start.elapsed().as_millis() as u64);
            ReportRecord::from_certificate(id.clone(), &cert, ms)
        })
        .collect();
    let exit_code = if !errors.is_empty() {
        EXIT_FAILURE
    } else if records.iter().any(|r| r.path == CertPath::None) {
        EXIT_NONE_PATH
    } else {
        EXIT_OK
    };
    CertifyRun {
        records,
        errors,
        exit_code,
    }
}

/// JSON-lines rendering, one record per line.
pub fn records_to_jsonl(records: &[ReportRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&r.to_jsonl_line());
        out.push('\n');
    }
    out
}
