use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::witness::{
    lemma11_exponent, twisted_rank, vb_holds, AxiomCitation, CertPath, Certificate, Check,
    TheoremTag,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessFields {
    #[serde(with = "crate::decimal")]
    pub r: BigInt,
    #[serde(with = "crate::decimal")]
    pub m_abs: BigInt,
    #[serde(with = "crate::decimal")]
    pub s: BigInt,
    #[serde(with = "crate::decimal")]
    pub h2: BigInt,
    pub div_branch: u8,
    #[serde(with = "crate::decimal")]
    pub u: BigInt,
    pub theorem_tag: TheoremTag,
}

/// One line of a certify report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub id: String,
    pub n: u32,
    #[serde(with = "crate::decimal")]
    pub ell: BigInt,
    pub path: CertPath,
    pub exponent: Option<u32>,
    #[serde(with = "crate::decimal::option")]
    pub twisted_rank: Option<BigInt>,
    pub witness: Option<WitnessFields>,
    pub annotations: Vec<String>,
    pub checks: Vec<Check>,
    pub axioms_cited: Vec<AxiomCitation>,
    pub failure_reason: Option<String>,
    /// Milliseconds spent certifying; left out unless timing was requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
}

impl ReportRecord {
    pub fn from_certificate(id: impl Into<String>, cert: &Certificate, wall_time_ms: Option<u64>) -> Self {
        ReportRecord {
            id: id.into(),
            n: cert.summary.n,
            ell: cert.summary.ell.clone(),
            path: cert.path,
            exponent: cert.exponent,
            twisted_rank: cert.twisted_rank.clone(),
            witness: cert.witness.as_ref().map(|w| WitnessFields {
                r: w.r.clone(),
                m_abs: w.m.abs(),
                s: w.s.clone(),
                h2: w.h2.clone(),
                div_branch: w.div_branch,
                u: w.u.clone(),
                theorem_tag: w.theorem_tag,
            }),
            annotations: cert.annotations.clone(),
            checks: cert.verified_checks.clone(),
            axioms_cited: cert.axioms_cited.clone(),
            failure_reason: cert.failure_reason.clone(),
            wall_time_ms,
        }
    }

    pub fn to_jsonl_line(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }

    pub fn from_jsonl_line(line: &str) -> Result<Self> {
        serde_json::from_str(line).map_err(|e| Error::Parse {
            location: format!("line {} column {}", e.line(), e.column()),
            message: e.to_string(),
        })
    }

    /// Re-runs the arithmetic checks on the recorded numbers.
    pub fn revalidate(&self) -> Vec<Check> {
        let mut out = Vec::new();
        let mut push = |name: &str, passed: bool| {
            out.push(Check {
                name: name.into(),
                passed,
            })
        };
        push("recorded checks all pass", self.checks.iter().all(|c| c.passed));
        match (&self.path, &self.witness, &self.twisted_rank, self.exponent) {
            (CertPath::None, None, None, None) => push("none path carries no witness", true),
            (CertPath::None, ..) => push("none path carries no witness", false),
            (path, Some(w), Some(rank), Some(e)) => {
                let m2h2: BigInt = &w.m_abs * &w.m_abs * &w.h2;
                let two_r: BigInt = &w.r * BigInt::from(2);
                push("2r | m^2 h2", !two_r.is_zero() && (&m2h2 % &two_r).is_zero());
                push("s * 2r = m^2 h2", &w.s * &two_r == m2h2);
                push("VB", vb_holds(&w.r, &w.m_abs, &w.h2));
                push("h2 positive even", w.h2.is_positive() && w.h2.is_even());
                push("twisted_rank = n! r^n", *rank == twisted_rank(self.n, &w.r));
                push(
                    "exponent = lemma11_exponent",
                    lemma11_exponent(rank, &self.ell).ok() == Some(e),
                );
                let strong = *path == CertPath::Thm04;
                push("tag matches path", w.theorem_tag.is_strong() == strong);
                let ceiling = if strong { self.n } else { 2 * self.n };
                push("exponent ceiling", e <= ceiling);
            }
            _ => push("witness fields present", false),
        }
        out
    }
}

pub const CSV_HEADER: [&str; 14] = [
    "id",
    "n",
    "ell",
    "path",
    "exponent",
    "twisted_rank",
    "r",
    "m_abs",
    "s",
    "h2",
    "div_branch",
    "u",
    "theorem_tag",
    "failure_reason",
];

/// Flat CSV rendering of a batch of records.
pub fn records_to_csv(records: &[ReportRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for r in records {
        let opt = |v: Option<String>| v.unwrap_or_default();
        let wf = r.witness.as_ref();
        w.write_record([
            r.id.clone(),
            r.n.to_string(),
            r.ell.to_string(),
            r.path.as_str().to_string(),
            opt(r.exponent.map(|e| e.to_string())),
            opt(r.twisted_rank.as_ref().map(|x| x.to_string())),
            opt(wf.map(|w| w.r.to_string())),
            opt(wf.map(|w| w.m_abs.to_string())),
            opt(wf.map(|w| w.s.to_string())),
            opt(wf.map(|w| w.h2.to_string())),
            opt(wf.map(|w| w.div_branch.to_string())),
            opt(wf.map(|w| w.u.to_string())),
            opt(wf.map(|w| w.theorem_tag.as_str().to_string())),
            opt(r.failure_reason.clone()),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("csv is UTF-8")
}
