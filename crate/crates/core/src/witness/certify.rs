use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{
    adjust_d, lemma11_exponent, mukai_witness, search_u, select_case, twisted_rank, Case,
    MukaiWitness, TheoremTag, UMode, USearch, DEFAULT_U_CAP,
};
use crate::arith::{factorial, for_each_shell, is_prime};
use crate::brauer::{compute_index_ix, is_nonspecial, period_of, BrauerScenario, PicardEmbedding};
use crate::congruence::{
    bilinear, compute_cq, find_dprime, hensel_crt_solve_with_budget, rank1_qr_obstruction,
    QdSolution, Solvability, DEFAULT_LIFT_BUDGET,
};
use crate::lattice::{LatticeVector, PairSearch};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PipelineOrder {
    #[serde(rename = "thm04-first")]
    Thm04First,
    #[serde(rename = "thm02-first")]
    Thm02First,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct CertifyOptions {
    pub order: PipelineOrder,
    /// Candidates tried per `u` search.
    pub u_cap: usize,
    /// Node budget of the congruence lift search.
    pub lift_budget: u64,
    /// Kernel-coordinate radius for the orthogonal pair search.
    pub pair_radius: usize,
    /// Shell radius for the `D'` search and the ample proxy.
    pub search_radius: usize,
    /// Multiples of `ell * ample` tried when adjusting `D`.
    pub adjust_budget: u64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            order: PipelineOrder::Thm04First,
            u_cap: DEFAULT_U_CAP,
            lift_budget: DEFAULT_LIFT_BUDGET,
            pair_radius: 6,
            search_radius: 4,
            adjust_budget: 100_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CertPath {
    Thm04,
    Thm02,
    #[serde(rename = "none")]
    None,
}

impl CertPath {
    pub fn as_str(self) -> &'static str {
        match self {
            CertPath::Thm04 => "Thm04",
            CertPath::Thm02 => "Thm02",
            CertPath::None => "none",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomCitation {
    pub step: String,
    pub location: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioSummary {
    pub n: u32,
    #[serde(with = "crate::decimal")]
    pub ell: BigInt,
    pub picard_rank: usize,
    #[serde(with = "crate::decimal")]
    pub q_b: BigInt,
    #[serde(with = "crate::decimal::option")]
    pub i_x: Option<BigInt>,
    #[serde(with = "crate::decimal::option")]
    pub period: Option<BigInt>,
    pub nonspecial: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub summary: ScenarioSummary,
    pub path: CertPath,
    /// Guarantees whose hypotheses hold, e.g. `Thm06` or `Lagrangian(N_X=4)`.
    pub annotations: Vec<String>,
    pub witness: Option<MukaiWitness>,
    #[serde(with = "crate::decimal::option")]
    pub twisted_rank: Option<BigInt>,
    pub exponent: Option<u32>,
    pub verified_checks: Vec<Check>,
    pub axioms_cited: Vec<AxiomCitation>,
    pub failure_reason: Option<String>,
    /// Why earlier routes in the pipeline order were abandoned.
    pub attempts: Vec<String>,
    pub congruence: Option<QdSolution>,
    pub d_class: Option<LatticeVector>,
    pub d_prime: Option<LatticeVector>,
    pub a_class: Option<LatticeVector>,
}

impl Certificate {
    /// Recomputes the rank, exponent and witness arithmetic from the recorded
    /// fields alone.
    pub fn revalidate(&self) -> Vec<Check> {
        let mut out = Vec::new();
        let mut push = |name: &str, passed: bool| {
            out.push(Check {
                name: name.to_string(),
                passed,
            })
        };
        match (&self.path, &self.witness, &self.twisted_rank, self.exponent) {
            (CertPath::None, None, None, None) => push("none path carries no witness", true),
            (CertPath::None, ..) => push("none path carries no witness", false),
            (path, Some(w), Some(rank), Some(e)) => {
                let n = self.summary.n;
                let ell = &self.summary.ell;
                for (name, ok) in w.recheck_numbers() {
                    push(name, ok);
                }
                push("twisted_rank = n! r^n", *rank == twisted_rank(n, &w.r));
                push(
                    "exponent = lemma11_exponent",
                    lemma11_exponent(rank, ell).ok() == Some(e),
                );
                let strong = *path == CertPath::Thm04;
                push("tag matches path", w.theorem_tag.is_strong() == strong);
                let ceiling = if strong { n } else { 2 * n };
                push("exponent ceiling", e <= ceiling);
            }
            _ => push("witness fields present", false),
        }
        out
    }

    pub fn all_checks_pass(&self) -> bool {
        self.verified_checks.iter().all(|c| c.passed)
    }
}

fn axioms() -> Vec<AxiomCitation> {
    let cite = |step: &str, location: &str| AxiomCitation {
        step: step.to_string(),
        location: location.to_string(),
    };
    vec![
        cite(
            "Eichler criterion",
            "orbit of H - ell*delta (div 1) or 2H - ell*delta (div 2) under the monodromy group contains +-L_u",
        ),
        cite(
            "Torelli transport",
            "polarized K3 surface (S, H) with Pic(S) = ZH, H^2 = h2, and a parallel transport S^[n] -> X",
        ),
        cite(
            "Markman bundle",
            "alpha-twisted locally free sheaf of rank n! r^n from the isotropic Mukai vector (r, mH, s) under (VB)",
        ),
    ]
}

struct Route {
    path: CertPath,
    witness: MukaiWitness,
    checks: Vec<Check>,
    congruence: Option<QdSolution>,
    d_class: LatticeVector,
    d_prime: Option<LatticeVector>,
    a_class: LatticeVector,
}

struct Ctx<'a> {
    s: &'a BrauerScenario,
    opts: &'a CertifyOptions,
    q_b: BigInt,
    i_x: BigInt,
}

fn check(checks: &mut Vec<Check>, name: impl Into<String>, passed: bool) {
    checks.push(Check {
        name: name.into(),
        passed,
    });
}

/// First primitive Picard class of positive norm: the polarization if one is
/// designated, otherwise a shell search in Picard coordinates.
pub fn ample_proxy(
    emb: &PicardEmbedding,
    polarization: Option<&LatticeVector>,
    radius: usize,
) -> Option<LatticeVector> {
    if let Some(p) = polarization {
        return Some(p.clone());
    }
    let lat = emb.ambient();
    let mut found = None;
    for r in 1..=radius as i64 {
        if for_each_shell(emb.picard_rank(), r, |x| {
            let v = emb.from_pic_coords(x);
            if v.content().is_one() && lat.pairing_unchecked(&v, &v).is_positive() {
                found = Some(v);
                true
            } else {
                false
            }
        }) {
            break;
        }
    }
    found
}

fn strong_route(ctx: &Ctx) -> Result<Route, String> {
    let s = ctx.s;
    let emb = &s.embedding;
    let lat = s.lattice();
    let ell = &s.ell;
    let q_b = &ctx.q_b;
    let q_form = emb.pic_gram();
    let mut checks = Vec::new();

    let solved = hensel_crt_solve_with_budget(q_form, &-q_b, ell, ctx.opts.lift_budget)
        .map_err(|e| format!("congruence solver: {e}"))?;
    let rank1_obstructed = if emb.picard_rank() == 1
        && is_prime(ell)
        && ell.is_odd()
        && !(&q_form[0][0] % ell).is_zero()
    {
        Some(rank1_qr_obstruction(&q_form[0][0], q_b, ell).map_err(|e| e.to_string())?)
    } else {
        None
    };
    let sol = match solved {
        Solvability::Solved(sol) => sol,
        Solvability::Unsolvable { prime } => {
            let mut reason = format!(
                "q(D) = -q(B) d^2 (mod ell) has no solution with gcd(d, ell) = 1 (fails modulo a power of {prime})"
            );
            if rank1_obstructed == Some(true) {
                reason.push_str("; -q(R) q(B) is a quadratic non-residue mod ell");
            }
            return Err(reason);
        }
    };
    if let Some(obstructed) = rank1_obstructed {
        check(&mut checks, "rank-1 residue test agrees with solver", !obstructed);
    }
    let d = emb.from_pic_coords(&sol.x);
    let congruence_holds = |v: &LatticeVector| {
        ((lat.pairing_unchecked(v, v) + q_b * &sol.d * &sol.d) % ell).is_zero()
    };
    check(&mut checks, "q(D) = -q(B) d^2 mod ell", congruence_holds(&d));
    check(&mut checks, "gcd(d, ell) = 1", sol.d.gcd(ell).is_one());

    let d_prime_coords = find_dprime(q_form, &sol.x, q_b, ell, ctx.opts.search_radius)
        .map_err(|e| e.to_string())?
        .ok_or_else(|| {
            format!(
                "no D' in Pic with gcd(q(D, D'), q(B), ell) = 1 within radius {}",
                ctx.opts.search_radius
            )
        })?;
    let d_prime = emb.from_pic_coords(&d_prime_coords);
    let dd = bilinear(q_form, &sol.x, &d_prime_coords);
    check(
        &mut checks,
        "gcd(q(D, D'), q(B), ell) = 1",
        dd.gcd(q_b).gcd(ell).is_one(),
    );

    let ample = ample_proxy(emb, s.polarization.as_ref(), ctx.opts.search_radius)
        .ok_or("no positive class in Pic to adjust D with")?;
    let d_adj = adjust_d(lat, ell, &d, &ample, ctx.opts.adjust_budget).map_err(|e| e.to_string())?;
    check(&mut checks, "adjusted D keeps the congruence", congruence_holds(&d_adj));
    check(
        &mut checks,
        "q(D) > 0 and D/2 not integral",
        lat.pairing_unchecked(&d_adj, &d_adj).is_positive() && d_adj.content().is_odd(),
    );

    let pair = match lat
        .find_orthogonal_pair(&s.b_class, &d_adj, ctx.opts.pair_radius)
        .map_err(|e| e.to_string())?
    {
        PairSearch::Found(p) => p,
        PairSearch::BudgetExhausted { radius } => {
            return Err(format!("no class A with q(A, L) = 1 in B^perp and D^perp up to radius {radius}"))
        }
    };
    check(&mut checks, "A, L orthogonal to B, D with q(A, L) = 1", pair.verify(lat, &s.b_class, &d_adj));

    let mode = UMode::Thm04 {
        d_scalar: sol.d.clone(),
    };
    let mut witness = None;
    let found = search_u(lat, &mode, &pair.a, &s.b_class, &d_adj, ell, ctx.opts.u_cap, |u, l_u| {
        let Ok(div) = lat.divisibility(l_u) else { return false };
        if !l_u.content().is_one() || div > BigInt::from(2) {
            return false;
        }
        let tag = TheoremTag::strong(if div.is_one() { 1 } else { 2 });
        match mukai_witness(lat, l_u, u, ell, s.n, tag) {
            Ok(w) => {
                witness = Some(w);
                true
            }
            Err(_) => false,
        }
    })
    .map_err(|e| e.to_string())?;
    let (u, l_u) = match found {
        USearch::Found { u, l_u } => (u, l_u),
        USearch::CapExhausted { last } => {
            return Err(format!(
                "no admissible u among {} candidates (last tried {last})",
                ctx.opts.u_cap
            ))
        }
    };
    let witness = witness.expect("accepted candidate carries a witness");
    let q_lu = lat.pairing_unchecked(&l_u, &l_u);
    check(&mut checks, "u odd", u.is_odd());
    check(
        &mut checks,
        "u d = 2 mod ell",
        ((&u * &sol.d - BigInt::from(2)) % ell).is_zero(),
    );
    check(&mut checks, "ell | q(L_u)", (&q_lu % ell).is_zero());
    // the class 2c B + 2c ell A + D'' with c = 4 and D'' = 4 u D
    let d23 = d_adj.scale(&(&u * 4));
    check(
        &mut checks,
        "ell | q(4uD) + 64 q(B)",
        ((lat.pairing_unchecked(&d23, &d23) + q_b * BigInt::from(64)) % ell).is_zero(),
    );
    Ok(Route {
        path: CertPath::Thm04,
        witness,
        checks,
        congruence: Some(sol),
        d_class: d_adj,
        d_prime: Some(d_prime),
        a_class: pair.a,
    })
}

fn weak_route(ctx: &Ctx) -> Result<Route, String> {
    let s = ctx.s;
    let lat = s.lattice();
    let ell = &s.ell;
    let q_b = &ctx.q_b;
    let mut checks = Vec::new();
    let pol = s
        .polarization
        .as_ref()
        .ok_or("no designated polarization for the weak bound")?;
    let h: BigInt = lat.pairing_unchecked(pol, pol) / BigInt::from(2);
    let prod: BigInt = factorial(s.n) * &h * &ctx.i_x;
    let g = prod.gcd(ell);
    if !g.is_one() {
        return Err(format!("gcd(ell, n!*h*I_X) = {g} > 1 with h = {h}"));
    }
    check(&mut checks, "gcd(ell, n!*h*I_X) = 1", true);
    check(
        &mut checks,
        "polarization primitive of positive degree",
        pol.content().is_one() && h.is_positive(),
    );

    let pair = match lat
        .find_orthogonal_pair(&s.b_class, pol, ctx.opts.pair_radius)
        .map_err(|e| e.to_string())?
    {
        PairSearch::Found(p) => p,
        PairSearch::BudgetExhausted { radius } => {
            return Err(format!("no class A with q(A, L) = 1 in B^perp and H^perp up to radius {radius}"))
        }
    };
    check(&mut checks, "A, L orthogonal to B, D with q(A, L) = 1", pair.verify(lat, &s.b_class, pol));

    let case = select_case(q_b, ell);
    let mode = match case {
        Case::A => UMode::Thm02U1,
        Case::B => UMode::Thm02U2,
    };
    let mut witness = None;
    let found = search_u(lat, &mode, &pair.a, &s.b_class, pol, ell, ctx.opts.u_cap, |u, l_u| {
        let Ok(div) = lat.divisibility(l_u) else { return false };
        let tag = TheoremTag::weak(case, if div.is_one() { 1 } else { 2 });
        match mukai_witness(lat, l_u, u, ell, s.n, tag) {
            Ok(w) => {
                witness = Some(w);
                true
            }
            Err(_) => false,
        }
    })
    .map_err(|e| e.to_string())?;
    let (u, l_u) = match found {
        USearch::Found { u, l_u } => (u, l_u),
        USearch::CapExhausted { last } => {
            return Err(format!(
                "no admissible u among {} candidates in case {case:?} (last tried {last})",
                ctx.opts.u_cap
            ))
        }
    };
    let witness = witness.expect("accepted candidate carries a witness");
    let q_lu = lat.pairing_unchecked(&l_u, &l_u);
    check(&mut checks, "u odd", u.is_odd());
    match case {
        Case::A => check(&mut checks, "case A: ell | u", (&u % ell).is_zero()),
        Case::B => check(&mut checks, "case B: gcd(u, ell) = 1", u.gcd(ell).is_one()),
    }
    check(
        &mut checks,
        "ell does not divide q(L_u)/2 + 1",
        !((&q_lu / BigInt::from(2) + BigInt::one()) % ell).is_zero(),
    );
    Ok(Route {
        path: CertPath::Thm02,
        witness,
        checks,
        congruence: None,
        d_class: pol.clone(),
        d_prime: None,
        a_class: pair.a,
    })
}

/// `Some(c)` when the Picard form is `[[0, c], [c, 0]]` with `c > 0`.
fn lagrangian_constant(emb: &PicardEmbedding) -> Option<BigInt> {
    let g = emb.pic_gram();
    if g.len() == 2 && g[0][0].is_zero() && g[1][1].is_zero() && g[0][1].is_positive() {
        Some(g[0][1].clone())
    } else {
        None
    }
}

/// Runs the certification pipeline on a validated scenario.
pub fn certify_scenario(s: &BrauerScenario, opts: &CertifyOptions) -> Certificate {
    let q_b = s.q_b();
    let i_x = compute_index_ix(&s.embedding).ok();
    let period = i_x.as_ref().map(|_| period_of(s));
    let mut cert = Certificate {
        summary: ScenarioSummary {
            n: s.n,
            ell: s.ell.clone(),
            picard_rank: s.embedding.picard_rank(),
            q_b: q_b.clone(),
            i_x: i_x.clone(),
            period: period.clone(),
            nonspecial: is_nonspecial(s),
        },
        path: CertPath::None,
        annotations: Vec::new(),
        witness: None,
        twisted_rank: None,
        exponent: None,
        verified_checks: Vec::new(),
        axioms_cited: axioms(),
        failure_reason: None,
        attempts: Vec::new(),
        congruence: None,
        d_class: None,
        d_prime: None,
        a_class: None,
    };
    let Some(i_x) = i_x else {
        cert.failure_reason = Some("could not compute I_X".into());
        return cert;
    };
    let gate = (factorial(s.n) * &i_x).gcd(&s.ell);
    if !gate.is_one() {
        cert.failure_reason = Some(format!("gcd(ell, n!*I_X) = {gate} > 1"));
        return cert;
    }
    check(&mut cert.verified_checks, "gcd(ell, n!*I_X) = 1", true);
    if period.as_ref() != Some(&s.ell) {
        cert.failure_reason = Some(format!(
            "period {} differs from ell = {}",
            period.unwrap_or_default(),
            s.ell
        ));
        return cert;
    }
    check(&mut cert.verified_checks, "period = ell", true);

    let q_form = s.embedding.pic_gram();
    let thm06 = cert.summary.nonspecial
        && cert.summary.picard_rank >= 2
        && compute_cq(q_form).is_ok_and(|cq| cq.gcd(&s.ell).is_one());
    if thm06 {
        cert.annotations.push("Thm06".into());
    }
    let lagrangian = lagrangian_constant(&s.embedding).and_then(|c| {
        super::lagrangian_bound(&c, s.n, &i_x, &s.ell)
            .ok()
            .map(|(n_x, applicable)| (c, n_x, applicable))
    });
    if let Some((c, n_x, applicable)) = &lagrangian {
        cert.annotations
            .push(format!("Lagrangian(C_X={c}, N_X={n_x}, applicable={applicable})"));
    }

    let ctx = Ctx {
        s,
        opts,
        q_b,
        i_x,
    };
    type RouteFn = fn(&Ctx) -> Result<Route, String>;
    let routes: [(bool, RouteFn); 2] = match opts.order {
        PipelineOrder::Thm04First => [(true, strong_route), (false, weak_route)],
        PipelineOrder::Thm02First => [(false, weak_route), (true, strong_route)],
    };
    let mut strong_tried = false;
    for (is_strong, route) in routes {
        strong_tried |= is_strong;
        let route = match route(&ctx) {
            Ok(r) => r,
            Err(reason) => {
                cert.attempts.push(reason);
                continue;
            }
        };
        let mut checks = route.checks;
        let lat = s.lattice();
        for (name, ok) in route.witness.verify(lat, s.n, &s.ell) {
            check(&mut checks, format!("witness: {name}"), ok);
        }
        let rank = twisted_rank(s.n, &route.witness.r);
        let exponent = lemma11_exponent(&rank, &s.ell).expect("positive rank and ell");
        let n = s.n;
        let (expected, ceiling) = match route.path {
            CertPath::Thm04 => (BigInt::from(4).pow(n) * factorial(n) * s.ell.pow(n), n),
            _ => (BigInt::from(4).pow(n) * factorial(n) * s.ell.pow(2 * n), 2 * n),
        };
        check(&mut checks, "twisted rank = 2^{2n} n! ell^k", rank == expected);
        check(&mut checks, "exponent ceiling", exponent <= ceiling);
        if let Some(bad) = checks.iter().find(|c| !c.passed) {
            cert.attempts.push(format!("{} route: check failed: {}", route.path.as_str(), bad.name));
            continue;
        }
        cert.verified_checks.extend(checks);
        cert.path = route.path;
        cert.witness = Some(route.witness);
        cert.twisted_rank = Some(rank);
        cert.exponent = Some(exponent);
        cert.congruence = route.congruence;
        cert.d_class = Some(route.d_class);
        cert.d_prime = route.d_prime;
        cert.a_class = Some(route.a_class);
        break;
    }
    // guarantees apply only once the strong route has run
    let strong = cert.path == CertPath::Thm04 || !strong_tried;
    if thm06 {
        check(&mut cert.verified_checks, "non-special guarantee honoured", strong);
    }
    if let Some((_, _, true)) = lagrangian {
        check(&mut cert.verified_checks, "Lagrangian guarantee honoured", strong);
    }
    if cert.path == CertPath::None {
        cert.failure_reason = Some(cert.attempts.join("; "));
    }
    cert
}
