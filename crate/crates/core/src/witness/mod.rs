//! Numerical witnesses for twisted bundles: the classes
//! `L_u = 2 ell A + 2 B + u D`, Mukai triples `(r, m H, s)` with their K3
//! degree `h2`, condition (VB), and the exponent read off a twisted rank.

mod certify;

pub use certify::{
    ample_proxy, certify_scenario, AxiomCitation, CertPath, Certificate, CertifyOptions, Check,
    PipelineOrder, ScenarioSummary,
};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{factorial, mod_inverse, part_supported_on};
use crate::error::{invalid, Error, Result};
use crate::lattice::{IntegerLattice, LatticeVector};

/// Candidates tried by [`find_u`] before giving up.
pub const DEFAULT_U_CAP: usize = 10_000;

/// Least `e` such that `rank = c * k` with `gcd(c, ell) = 1` and `k | ell^e`.
pub fn lemma11_exponent(rank: &BigInt, ell: &BigInt) -> Result<u32> {
    if !rank.is_positive() || !ell.is_positive() {
        return invalid("rank and ell must be positive");
    }
    let part = part_supported_on(rank, ell);
    let mut e = 0u32;
    let mut power = BigInt::one();
    while !(&power % &part).is_zero() {
        power *= ell;
        e += 1;
    }
    Ok(e)
}

/// `n! r^n`.
pub fn twisted_rank(n: u32, r: &BigInt) -> BigInt {
    factorial(n) * r.pow(n)
}

/// `2 ell a + 2 b + u d`.
pub fn build_lu(
    a: &LatticeVector,
    b: &LatticeVector,
    d: &LatticeVector,
    u: &BigInt,
    ell: &BigInt,
) -> Result<LatticeVector> {
    if a.len() != b.len() || b.len() != d.len() {
        return invalid(format!(
            "length mismatch: a={}, b={}, d={}",
            a.len(),
            b.len(),
            d.len()
        ));
    }
    let two_ell = ell * 2;
    Ok(LatticeVector(
        a.coords()
            .iter()
            .zip(b.coords())
            .zip(d.coords())
            .map(|((x, y), z)| &two_ell * x + y * 2 + u * z)
            .collect(),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Case {
    A,
    B,
}

/// `A` when `ell` does not divide `2 q_B + 1`.
pub fn select_case(q_b: &BigInt, ell: &BigInt) -> Case {
    let t: BigInt = q_b * 2 + 1;
    if (t % ell).is_zero() {
        Case::B
    } else {
        Case::A
    }
}

/// `d + ell k ample` for the least `k >= 0` giving positive norm and a class
/// that is not twice an integral class.
pub fn adjust_d(
    lat: &IntegerLattice,
    ell: &BigInt,
    d: &LatticeVector,
    ample: &LatticeVector,
    budget: u64,
) -> Result<LatticeVector> {
    if !lat.norm(ample)?.is_positive() {
        return invalid("ample class must have positive norm");
    }
    lat.norm(d)?;
    let step = ample.scale(ell);
    let mut cand = d.clone();
    for _ in 0..=budget {
        let norm = lat.pairing_unchecked(&cand, &cand);
        if norm.is_positive() && cand.content().is_odd() {
            return Ok(cand);
        }
        cand = cand.add(&step);
    }
    Err(Error::ResourceExhausted(format!(
        "no positive non-2-divisible D + ell k H with k <= {budget}"
    )))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum UMode {
    /// Odd multiples of `ell`.
    Thm02U1,
    /// Odd `u` coprime to `ell`.
    Thm02U2,
    /// Odd `u` with `u d = 2 (mod ell)`.
    Thm04 {
        #[serde(with = "crate::decimal")]
        d_scalar: BigInt,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum USearch {
    Found { u: BigInt, l_u: LatticeVector },
    CapExhausted { last: BigInt },
}

/// Candidate stream for `mode`: first candidate and step.
fn u_stream(mode: &UMode, ell: &BigInt) -> Result<(BigInt, BigInt)> {
    let two = BigInt::from(2);
    match mode {
        UMode::Thm02U1 => {
            if ell.is_even() {
                return invalid("odd multiples of an even ell do not exist");
            }
            Ok((ell.clone(), ell * 2))
        }
        UMode::Thm02U2 => {
            if ell.is_even() {
                return invalid("ell must be odd");
            }
            Ok((BigInt::one(), two))
        }
        UMode::Thm04 { d_scalar } => {
            if ell.is_even() {
                return invalid("ell must be odd");
            }
            let inv = mod_inverse(d_scalar, ell).ok_or_else(|| {
                Error::InvalidArgument(format!("gcd(d = {d_scalar}, ell = {ell}) != 1"))
            })?;
            let doubled: BigInt = inv * 2;
            let mut u0 = doubled.mod_floor(ell);
            if u0.is_even() {
                u0 += ell;
            }
            Ok((u0, ell * 2))
        }
    }
}

fn mode_accepts(lat: &IntegerLattice, mode: &UMode, ell: &BigInt, u: &BigInt, l_u: &LatticeVector) -> bool {
    if !lat.pairing_unchecked(l_u, l_u).is_positive() {
        return false;
    }
    match mode {
        UMode::Thm02U1 | UMode::Thm02U2 => {
            if matches!(mode, UMode::Thm02U2) && !u.gcd(ell).is_one() {
                return false;
            }
            l_u.content().is_one()
                && matches!(lat.divisibility(l_u), Ok(d) if d == BigInt::one() || d == BigInt::from(2))
        }
        UMode::Thm04 { .. } => true,
    }
}

/// Smallest candidate `u` of the mode's stream meeting the mode's conditions,
/// trying at most `cap` candidates.
pub fn find_u(
    lat: &IntegerLattice,
    mode: &UMode,
    a: &LatticeVector,
    b: &LatticeVector,
    d: &LatticeVector,
    ell: &BigInt,
    cap: usize,
) -> Result<USearch> {
    search_u(lat, mode, a, b, d, ell, cap, |_, _| true)
}

/// [`find_u`] with an extra acceptance predicate on `(u, L_u)`.
#[allow(clippy::too_many_arguments)]
pub fn search_u(
    lat: &IntegerLattice,
    mode: &UMode,
    a: &LatticeVector,
    b: &LatticeVector,
    d: &LatticeVector,
    ell: &BigInt,
    cap: usize,
    mut accept: impl FnMut(&BigInt, &LatticeVector) -> bool,
) -> Result<USearch> {
    let (mut u, step) = u_stream(mode, ell)?;
    let mut last = u.clone();
    for _ in 0..cap {
        let l_u = build_lu(a, b, d, &u, ell)?;
        if mode_accepts(lat, mode, ell, &u, &l_u) && accept(&u, &l_u) {
            return Ok(USearch::Found { u, l_u });
        }
        last = u.clone();
        u += &step;
    }
    Ok(USearch::CapExhausted { last })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TheoremTag {
    #[serde(rename = "Thm02-A1")]
    Thm02A1,
    #[serde(rename = "Thm02-A2")]
    Thm02A2,
    #[serde(rename = "Thm02-B")]
    Thm02B,
    #[serde(rename = "Thm04-1")]
    Thm04Case1,
    #[serde(rename = "Thm04-2")]
    Thm04Case2,
}

impl TheoremTag {
    pub fn is_strong(self) -> bool {
        matches!(self, TheoremTag::Thm04Case1 | TheoremTag::Thm04Case2)
    }

    /// Divisibility of `L_u` the tag is meant for; `None` for case B (either).
    pub fn expected_div(self) -> Option<u8> {
        match self {
            TheoremTag::Thm02A1 | TheoremTag::Thm04Case1 => Some(1),
            TheoremTag::Thm02A2 | TheoremTag::Thm04Case2 => Some(2),
            TheoremTag::Thm02B => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremTag::Thm02A1 => "Thm02-A1",
            TheoremTag::Thm02A2 => "Thm02-A2",
            TheoremTag::Thm02B => "Thm02-B",
            TheoremTag::Thm04Case1 => "Thm04-1",
            TheoremTag::Thm04Case2 => "Thm04-2",
        }
    }

    pub fn weak(case: Case, div: u8) -> Self {
        match (case, div) {
            (Case::A, 1) => TheoremTag::Thm02A1,
            (Case::A, _) => TheoremTag::Thm02A2,
            (Case::B, _) => TheoremTag::Thm02B,
        }
    }

    pub fn strong(div: u8) -> Self {
        if div == 1 {
            TheoremTag::Thm04Case1
        } else {
            TheoremTag::Thm04Case2
        }
    }
}

/// A Mukai vector `(r, m H, s)` on a K3 surface of degree `H^2 = h2`,
/// recorded with `|m|` since every check depends on `m^2` only.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MukaiWitness {
    #[serde(with = "crate::decimal")]
    pub r: BigInt,
    #[serde(with = "crate::decimal")]
    pub m: BigInt,
    #[serde(with = "crate::decimal")]
    pub s: BigInt,
    #[serde(with = "crate::decimal")]
    pub h2: BigInt,
    #[serde(with = "crate::decimal")]
    pub rho: BigInt,
    pub div_branch: u8,
    pub theorem_tag: TheoremTag,
    pub l_u: LatticeVector,
    #[serde(with = "crate::decimal")]
    pub u: BigInt,
}

/// (VB): `(r / rho) does not divide m^2 h2 / (2 rho^2) + 1`, `rho = gcd(r, m)`.
/// False when the bracket is not an integer.
pub fn vb_holds(r: &BigInt, m: &BigInt, h2: &BigInt) -> bool {
    let rho = r.gcd(m);
    if rho.is_zero() {
        return false;
    }
    let num: BigInt = m * m * h2;
    let den: BigInt = &rho * &rho * 2;
    if !(&num % &den).is_zero() {
        return false;
    }
    let bracket: BigInt = num / den + 1;
    let modulus: BigInt = r / &rho;
    !(bracket % modulus).is_zero()
}

/// Checks the numerical conditions on `(r, m, h2)` and returns `(s, rho)`.
pub fn mukai_triple(r: &BigInt, m: &BigInt, h2: &BigInt) -> Result<(BigInt, BigInt)> {
    let fail = |what: &str| Err(Error::ConstructionFailed(what.to_string()));
    if !r.is_positive() {
        return fail("r-not-positive");
    }
    if !h2.is_positive() || h2.is_odd() {
        return fail("h2-not-positive-even");
    }
    let m2h2: BigInt = m * m * h2;
    let two_r: BigInt = r * 2;
    if !(&m2h2 % &two_r).is_zero() {
        return fail("2r-does-not-divide-m2h2");
    }
    if !vb_holds(r, m, h2) {
        return fail("VB-violated");
    }
    let s = m2h2 / two_r;
    if !s.is_positive() {
        return fail("s-not-positive");
    }
    Ok((s, r.gcd(m)))
}

/// Builds the witness for `L_u` from the four-way `(r, |m|)` table.
pub fn mukai_witness(
    lat: &IntegerLattice,
    l_u: &LatticeVector,
    u: &BigInt,
    ell: &BigInt,
    n: u32,
    tag: TheoremTag,
) -> Result<MukaiWitness> {
    let fail = |what: &str| Err(Error::ConstructionFailed(what.to_string()));
    let q = lat.norm(l_u)?;
    if !q.is_positive() {
        return fail("L_u-norm-not-positive");
    }
    if !lat.is_primitive(l_u)? {
        return fail("L_u-not-primitive");
    }
    let div = lat.divisibility(l_u)?;
    let div_branch: u8 = if div.is_one() {
        1
    } else if div == BigInt::from(2) {
        2
    } else {
        return fail("div-not-1-or-2");
    };
    if tag.expected_div().is_some_and(|d| d != div_branch) {
        return fail("div-branch-mismatch");
    }
    let (r, m) = match (tag.is_strong(), div_branch) {
        (false, 1) => (ell * ell * 4, ell * 2),
        (false, _) => (ell * ell * 4, ell * 4),
        (true, 1) => (ell * 4, BigInt::from(2)),
        (true, _) => (ell * 4, BigInt::from(4)),
    };
    let total: BigInt = BigInt::from(2 * n as i64 - 2) * ell * ell + &q;
    let h2 = if div_branch == 1 {
        total
    } else {
        if !(&total % BigInt::from(4)).is_zero() {
            return fail("h2-not-integral");
        }
        total / 4
    };
    let (s, rho) = mukai_triple(&r, &m, &h2)?;
    Ok(MukaiWitness {
        r,
        m,
        s,
        h2,
        rho,
        div_branch,
        theorem_tag: tag,
        l_u: l_u.clone(),
        u: u.clone(),
    })
}

impl MukaiWitness {
    /// Recomputes the purely numerical invariants from the recorded fields.
    pub fn recheck_numbers(&self) -> Vec<(&'static str, bool)> {
        let m2h2: BigInt = &self.m * &self.m * &self.h2;
        let two_r: BigInt = &self.r * 2;
        vec![
            ("2r | m^2 h2", (&m2h2 % &two_r).is_zero()),
            ("s * 2r = m^2 h2", &self.s * &two_r == m2h2),
            ("rho = gcd(r, m)", self.rho == self.r.gcd(&self.m)),
            ("VB", vb_holds(&self.r, &self.m, &self.h2)),
            ("h2 positive even", self.h2.is_positive() && self.h2.is_even()),
        ]
    }

    /// Recomputes every invariant, including those tying the witness to `L_u`.
    pub fn verify(&self, lat: &IntegerLattice, n: u32, ell: &BigInt) -> Vec<(&'static str, bool)> {
        let mut out = self.recheck_numbers();
        let q = lat.norm(&self.l_u).unwrap_or_else(|_| BigInt::zero());
        let total = BigInt::from(2 * n as i64 - 2) * ell * ell + &q;
        let degree_ok = match self.div_branch {
            1 => self.h2 == total,
            2 => &self.h2 * 4 == total,
            _ => false,
        };
        out.push(("h2 matches q(L_u)", degree_ok));
        out.push(("q(L_u) > 0", q.is_positive()));
        out.push(("L_u primitive", self.l_u.content().is_one()));
        let div = lat.divisibility(&self.l_u).ok();
        out.push(("div(L_u) = div_branch", div == Some(BigInt::from(self.div_branch))));
        out
    }

    pub fn all_pass(checks: &[(&'static str, bool)]) -> bool {
        checks.iter().all(|(_, ok)| *ok)
    }
}

/// `N_X = c_x n! i_x` and whether `ell` is coprime to it.
pub fn lagrangian_bound(c_x: &BigInt, n: u32, i_x: &BigInt, ell: &BigInt) -> Result<(BigInt, bool)> {
    if !c_x.is_positive() || !i_x.is_positive() || !ell.is_positive() || n == 0 {
        return invalid("Lagrangian bound needs positive inputs");
    }
    let n_x = c_x * factorial(n) * i_x;
    let applicable = n_x.gcd(ell).is_one();
    Ok((n_x, applicable))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_k3n_lattice, K3N_RANK};

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn exponent_examples() {
        assert_eq!(lemma11_exponent(&big(800), &big(5)).unwrap(), 2);
        assert_eq!(lemma11_exponent(&big(20000), &big(5)).unwrap(), 4);
        assert_eq!(lemma11_exponent(&big(6), &big(5)).unwrap(), 0);
        assert_eq!(lemma11_exponent(&big(81 * 4), &big(9)).unwrap(), 2);
        assert_eq!(lemma11_exponent(&big(27), &big(9)).unwrap(), 2);
        assert_eq!(lemma11_exponent(&big(7), &big(1)).unwrap(), 0);
        assert!(lemma11_exponent(&big(0), &big(5)).is_err());
    }

    #[test]
    fn lu_examples() {
        let z = LatticeVector::zero(K3N_RANK);
        let d = LatticeVector::basis(K3N_RANK, 0);
        assert_eq!(build_lu(&z, &z, &d, &big(3), &big(5)).unwrap(), d.scale(&big(3)));
        let a = LatticeVector::basis(K3N_RANK, 0);
        let b = LatticeVector::basis(K3N_RANK, 1);
        let d = LatticeVector::basis(K3N_RANK, 2);
        let l = build_lu(&a, &b, &d, &big(1), &big(5)).unwrap();
        assert_eq!(l, LatticeVector::sparse(K3N_RANK, &[(0, 10), (1, 2), (2, 1)]));
        assert!(build_lu(&a, &b, &LatticeVector::zero(3), &big(1), &big(5)).is_err());
    }

    #[test]
    fn case_examples() {
        assert_eq!(select_case(&big(-2), &big(5)), Case::A);
        assert_eq!(select_case(&big(-3), &big(5)), Case::B);
        assert_eq!(select_case(&big(12), &big(25)), Case::B);
    }

    #[test]
    fn adjust_examples() {
        let lat = build_k3n_lattice(2).unwrap();
        // d = e1 + f1 has norm 2 and odd content
        let d = LatticeVector::sparse(K3N_RANK, &[(0, 1), (1, 1)]);
        let ample = LatticeVector::sparse(K3N_RANK, &[(2, 1), (3, 1)]);
        assert_eq!(adjust_d(&lat, &big(5), &d, &ample, 10).unwrap(), d);
        // q(d) = -4 with d = e1 - 2 f1, ample orthogonal of norm 2
        let d = LatticeVector::sparse(K3N_RANK, &[(0, 1), (1, -2)]);
        let out = adjust_d(&lat, &big(5), &d, &ample, 10).unwrap();
        assert_eq!(out, d.add(&ample.scale(&big(5))));
        assert_eq!(lat.norm(&out).unwrap(), big(46));
        assert_eq!((lat.norm(&out).unwrap() - lat.norm(&d).unwrap()) % 5, big(0));
        // twice an integral class is skipped even when the norm is positive
        let d2 = LatticeVector::sparse(K3N_RANK, &[(0, 2), (1, 2)]);
        let out = adjust_d(&lat, &big(5), &d2, &ample, 10).unwrap();
        assert_eq!(out, d2.add(&ample.scale(&big(5))));
    }

    #[test]
    fn u_streams() {
        let lat = build_k3n_lattice(2).unwrap();
        let a = LatticeVector::basis(K3N_RANK, 4);
        let b = LatticeVector::sparse(K3N_RANK, &[(2, 1), (3, -1)]);
        let d = LatticeVector::sparse(K3N_RANK, &[(0, 1), (1, 1)]);
        let mut seen = Vec::new();
        let r = search_u(&lat, &UMode::Thm02U1, &a, &b, &d, &big(5), 3, |u, _| {
            seen.push(u.clone());
            false
        })
        .unwrap();
        assert_eq!(r, USearch::CapExhausted { last: big(25) });
        assert_eq!(seen, vec![big(5), big(15), big(25)]);

        let (u0, step) = u_stream(&UMode::Thm04 { d_scalar: big(2) }, &big(5)).unwrap();
        assert_eq!((u0, step), (big(1), big(10)));
        // 2 * 1^{-1} = 2 mod 7 is even, so the stream starts at 2 + 7
        let (u0, _) = u_stream(&UMode::Thm04 { d_scalar: big(1) }, &big(7)).unwrap();
        assert_eq!(u0, big(9));
        assert!(u_stream(&UMode::Thm04 { d_scalar: big(5) }, &big(5)).is_err());
    }

    #[test]
    fn witness_examples() {
        // Thm04 div 1, n = 2, ell = 5, q(L_u) = 30
        let (r, m) = (big(20), big(2));
        let h2 = big(2 * 25 + 30);
        assert_eq!(h2, big(80));
        let (s, rho) = mukai_triple(&r, &m, &h2).unwrap();
        assert_eq!((s, rho), (big(8), big(2)));
        assert_eq!(twisted_rank(2, &r), big(800));

        // Thm02 div 1, q(L_u) = 10
        let (r, m) = (big(100), big(10));
        let h2 = big(50 + 10);
        let (s, _) = mukai_triple(&r, &m, &h2).unwrap();
        assert_eq!(s, big(100 * 60 / 200));
        assert_eq!(twisted_rank(2, &r), big(20000));

        // VB probe
        assert_eq!(
            mukai_triple(&big(4), &big(2), &big(2)),
            Err(Error::ConstructionFailed("VB-violated".into()))
        );
    }

    #[test]
    fn witness_from_lattice_class() {
        let lat = build_k3n_lattice(2).unwrap();
        // L = e1 + 15 f1: norm 30, primitive, divisibility 1
        let l = LatticeVector::sparse(K3N_RANK, &[(0, 1), (1, 15)]);
        let w = mukai_witness(&lat, &l, &big(1), &big(5), 2, TheoremTag::Thm04Case1).unwrap();
        assert_eq!((w.r.clone(), w.m.clone(), w.s.clone(), w.h2.clone()), (big(20), big(2), big(8), big(80)));
        assert!(MukaiWitness::all_pass(&w.verify(&lat, 2, &big(5))));
        assert_eq!(
            mukai_witness(&lat, &l, &big(1), &big(5), 2, TheoremTag::Thm04Case2),
            Err(Error::ConstructionFailed("div-branch-mismatch".into()))
        );
        let twice = l.scale(&big(3));
        assert_eq!(
            mukai_witness(&lat, &twice, &big(1), &big(5), 2, TheoremTag::Thm04Case1),
            Err(Error::ConstructionFailed("L_u-not-primitive".into()))
        );
    }

    #[test]
    fn lagrangian_examples() {
        assert_eq!(lagrangian_bound(&big(1), 2, &big(2), &big(5)).unwrap(), (big(4), true));
        assert_eq!(lagrangian_bound(&big(3), 2, &big(1), &big(3)).unwrap(), (big(6), false));
    }
}
