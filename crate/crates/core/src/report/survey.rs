use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::brauer::BrauerScenario;
use crate::congruence::{hensel_crt_solve, Solvability};
use crate::error::{invalid, Error, Result};
use crate::lattice::LatticeVector;
use crate::matrix::{self, Matrix};
use crate::oracle::brute_force_solve;
use crate::witness::{certify_scenario, CertPath, CertifyOptions};

/// Coefficient range for random combinations of the transcendental basis.
const SAMPLE_COEFF: i64 = 2;
const SAMPLE_ATTEMPTS: usize = 1000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyRow {
    #[serde(with = "crate::decimal")]
    pub ell: BigInt,
    pub n_samples: usize,
    pub thm04: usize,
    pub thm02: usize,
    pub none: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveySample {
    #[serde(with = "crate::decimal")]
    pub ell: BigInt,
    pub index: usize,
    #[serde(with = "crate::decimal")]
    pub q_b: BigInt,
    pub path: CertPath,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Survey {
    pub rows: Vec<SurveyRow>,
    pub samples: Vec<SurveySample>,
}

impl Survey {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["ell", "n_samples", "thm04", "thm02", "none"])
            .expect("in-memory write");
        for r in &self.rows {
            w.write_record([
                r.ell.to_string(),
                r.n_samples.to_string(),
                r.thm04.to_string(),
                r.thm02.to_string(),
                r.none.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("csv is UTF-8")
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.rows {
            out.push_str(&serde_json::to_string(r).expect("rows serialize"));
            out.push('\n');
        }
        out
    }
}

fn sample_b(template: &BrauerScenario, ell: &BigInt, rng: &mut ChaCha8Rng) -> Result<LatticeVector> {
    let t = template.embedding.transcendental_basis();
    let rank = template.lattice().rank();
    for _ in 0..SAMPLE_ATTEMPTS {
        let coeffs: Vec<BigInt> = t
            .iter()
            .map(|_| BigInt::from(rng.gen_range(-SAMPLE_COEFF..=SAMPLE_COEFF)))
            .collect();
        let b = LatticeVector::combination(&coeffs, t, rank);
        if !b.is_zero() && b.content().gcd(ell).is_one() {
            return Ok(b);
        }
    }
    Err(Error::ResourceExhausted(format!(
        "no B coprime to ell = {ell} after {SAMPLE_ATTEMPTS} draws"
    )))
}

/// Certifies `count` random B-fields per `ell` drawn from the template's
/// transcendental lattice. Samples are drawn sequentially from one seeded
/// stream, so the table depends only on the inputs and `seed`.
pub fn run_survey(
    template: &BrauerScenario,
    ells: &[BigInt],
    count: usize,
    seed: u64,
    opts: &CertifyOptions,
) -> Result<Survey> {
    if ells.is_empty() {
        return invalid("empty ell range");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut jobs = Vec::new();
    for ell in ells {
        if ell < &BigInt::one() {
            return invalid(format!("ell must be positive, got {ell}"));
        }
        for index in 0..count {
            let b_class = sample_b(template, ell, &mut rng)?;
            let s = BrauerScenario {
                b_class,
                ell: ell.clone(),
                ..template.clone()
            };
            s.validate()?;
            jobs.push((index, s));
        }
    }
    let samples: Vec<SurveySample> = jobs
        .par_iter()
        .map(|(index, s)| SurveySample {
            ell: s.ell.clone(),
            index: *index,
            q_b: s.q_b(),
            path: certify_scenario(s, opts).path,
        })
        .collect();
    let rows = if count == 0 {
        Vec::new()
    } else {
        ells.iter()
            .map(|ell| {
                let of = |p: CertPath| samples.iter().filter(|x| &x.ell == ell && x.path == p).count();
                SurveyRow {
                    ell: ell.clone(),
                    n_samples: count,
                    thm04: of(CertPath::Thm04),
                    thm02: of(CertPath::Thm02),
                    none: of(CertPath::None),
                }
            })
            .collect()
    };
    Ok(Survey { rows, samples })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleCheckSummary {
    pub problems: usize,
    pub solvable: usize,
    pub unsolvable: usize,
    pub disagreements: Vec<String>,
}

/// Moduli used by the oracle comparison: odd numbers up to 99.
pub fn oracle_check_moduli() -> Vec<i64> {
    (1..=99).filter(|m| m % 2 == 1).collect()
}

fn random_form(rng: &mut ChaCha8Rng) -> Matrix {
    loop {
        let mu = rng.gen_range(1..=3usize);
        let mut m = vec![vec![BigInt::zero(); mu]; mu];
        for i in 0..mu {
            for j in i..mu {
                let x = BigInt::from(rng.gen_range(-10i64..=10));
                m[i][j] = x.clone();
                m[j][i] = x;
            }
        }
        if !matrix::determinant(&m).is_zero() {
            return m;
        }
    }
}

/// Compares the lifting solver with the brute-force oracle on `count`
/// random problems.
pub fn run_oracle_check(seed: u64, count: usize) -> OracleCheckSummary {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let moduli = oracle_check_moduli();
    let problems: Vec<(Matrix, BigInt, BigInt)> = (0..count)
        .map(|_| {
            let q = random_form(&mut rng);
            let b = BigInt::from(rng.gen_range(-50i64..=50));
            let ell = BigInt::from(moduli[rng.gen_range(0..moduli.len())]);
            (q, b, ell)
        })
        .collect();
    let results: Vec<std::result::Result<bool, String>> = problems
        .par_iter()
        .map(|(q, b, ell)| {
            let fast = hensel_crt_solve(q, b, ell).map_err(|e| e.to_string())?;
            let slow = brute_force_solve(q, b, ell).map_err(|e| e.to_string())?;
            let tag = || format!("Q={q:?} b={b} ell={ell}");
            match (fast, slow) {
                (Solvability::Solved(sol), Some(oracle)) => {
                    if !sol.verify(q, b, ell) {
                        return Err(format!("solver answer fails verification: {}", tag()));
                    }
                    if !oracle.verify(q, b, ell) {
                        return Err(format!("oracle answer fails verification: {}", tag()));
                    }
                    Ok(true)
                }
                (Solvability::Unsolvable { .. }, None) => Ok(false),
                (f, o) => Err(format!("solver {f:?} vs oracle {o:?}: {}", tag())),
            }
        })
        .collect();
    let mut summary = OracleCheckSummary {
        problems: count,
        solvable: 0,
        unsolvable: 0,
        disagreements: Vec::new(),
    };
    for r in results {
        match r {
            Ok(true) => summary.solvable += 1,
            Ok(false) => summary.unsolvable += 1,
            Err(e) => summary.disagreements.push(e),
        }
    }
    summary
}
