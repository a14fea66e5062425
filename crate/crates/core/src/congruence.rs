//! Solving `Q(x) = b w^2 (mod N)` with `gcd(w, N) = 1`, where `Q` is the
//! Picard form and `b = -q(B)`.
//!
//! The main route factors `N`, finds a nonsingular `F_p`-point on the quadric
//! `V_p = {Q - b w^2 = 0}` with `w != 0`, lifts it to `Z/p^e` by Newton
//! iteration and glues the prime powers by CRT. Primes where every point of
//! `V_p` with `w != 0` is singular (and `p = 2`, where the gradient of an
//! integral form vanishes identically) fall back to an exhaustive lift search.
//! Exhausting the lift budget is an error, never `Unsolvable`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{crt, for_each_shell, factorize, is_prime, jacobi};
use crate::error::{invalid, Error, Result};
use crate::matrix::{self, Matrix};

/// Upper bound on points visited by one smooth-point enumeration.
pub const SMOOTH_POINT_LIMIT: u64 = 100_000_000;
/// Default node budget for the exhaustive lift search at one prime power.
pub const DEFAULT_LIFT_BUDGET: u64 = 2_000_000;
/// Prime powers handled by machine-word modular arithmetic.
const MAX_PRIME_POWER: u64 = 1 << 62;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadricProblem {
    pub q_form: Matrix,
    pub b: BigInt,
    pub modulus: BigInt,
}

impl QuadricProblem {
    pub fn new(q_form: Matrix, b: BigInt, modulus: BigInt) -> Result<Self> {
        check_form(&q_form)?;
        if modulus < BigInt::one() {
            return invalid(format!("modulus must be >= 1, got {modulus}"));
        }
        Ok(QuadricProblem {
            q_form,
            b,
            modulus,
        })
    }

    pub fn dimension(&self) -> usize {
        self.q_form.len()
    }
}

pub(crate) fn check_form(q_form: &Matrix) -> Result<()> {
    let mu = q_form.len();
    if mu == 0 {
        return invalid("quadratic form must have at least one variable");
    }
    if q_form.iter().any(|r| r.len() != mu) {
        return invalid("quadratic form matrix must be square");
    }
    for i in 0..mu {
        for j in 0..i {
            if q_form[i][j] != q_form[j][i] {
                return invalid(format!("quadratic form matrix not symmetric at ({i},{j})"));
            }
        }
    }
    if matrix::determinant(q_form).is_zero() {
        return invalid("quadratic form is degenerate");
    }
    Ok(())
}

/// `Q(x) = x^T A x`.
pub fn eval_form(q_form: &Matrix, x: &[BigInt]) -> BigInt {
    bilinear(q_form, x, x)
}

/// `x^T A y`.
pub fn bilinear(q_form: &Matrix, x: &[BigInt], y: &[BigInt]) -> BigInt {
    x.iter()
        .zip(q_form)
        .fold(BigInt::zero(), |acc, (xi, row)| {
            acc + xi * row.iter().zip(y).fold(BigInt::zero(), |s, (a, yj)| s + a * yj)
        })
}

/// Coordinates of `D` in the Picard basis and the unit `d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QdSolution {
    #[serde(with = "crate::decimal::vec")]
    pub x: Vec<BigInt>,
    #[serde(with = "crate::decimal")]
    pub d: BigInt,
}

impl QdSolution {
    /// `Q(x) = b d^2 (mod N)` and `gcd(d, N) = 1`, rechecked from scratch.
    pub fn verify(&self, q_form: &Matrix, b: &BigInt, modulus: &BigInt) -> bool {
        if self.x.len() != q_form.len() || !self.d.gcd(modulus).is_one() {
            return false;
        }
        let lhs = eval_form(q_form, &self.x) - b * &self.d * &self.d;
        (lhs % modulus).is_zero()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solvability {
    Solved(QdSolution),
    /// No solution modulo a power of this prime (the smallest such prime).
    Unsolvable { prime: BigInt },
}

/// A point of `V_p` with `w != 0`, nonsingular on `V_p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmoothPoint {
    pub x: Vec<BigInt>,
    pub w: BigInt,
}

// The form reduced modulo a machine-sized modulus.
struct ModForm {
    m: u64,
    a: Vec<Vec<u64>>,
    b: u64,
}

impl ModForm {
    fn new(q_form: &Matrix, b: &BigInt, m: u64) -> Self {
        let mb = BigInt::from(m);
        let red = |x: &BigInt| x.mod_floor(&mb).to_u64().expect("reduced below modulus");
        ModForm {
            m,
            a: q_form.iter().map(|r| r.iter().map(red).collect()).collect(),
            b: red(b),
        }
    }

    fn mul(&self, x: u64, y: u64) -> u64 {
        ((x as u128 * y as u128) % self.m as u128) as u64
    }

    fn add(&self, x: u64, y: u64) -> u64 {
        ((x as u128 + y as u128) % self.m as u128) as u64
    }

    fn sub(&self, x: u64, y: u64) -> u64 {
        self.add(x, self.m - y % self.m)
    }

    fn q(&self, x: &[u64]) -> u64 {
        let mut acc = 0;
        for (i, xi) in x.iter().enumerate() {
            let mut row = 0;
            for (aij, xj) in self.a[i].iter().zip(x) {
                row = self.add(row, self.mul(*aij, *xj));
            }
            acc = self.add(acc, self.mul(*xi, row));
        }
        acc
    }

    /// `Q(x) - b w^2`.
    fn residual(&self, x: &[u64], w: u64) -> u64 {
        self.sub(self.q(x), self.mul(self.b, self.mul(w, w)))
    }

    /// `(2 A x, -2 b w)`.
    fn gradient(&self, x: &[u64], w: u64) -> Vec<u64> {
        let mut g: Vec<u64> = (0..x.len())
            .map(|i| {
                let row = self.a[i]
                    .iter()
                    .zip(x)
                    .fold(0, |acc, (aij, xj)| self.add(acc, self.mul(*aij, *xj)));
                self.mul(2, row)
            })
            .collect();
        g.push(self.sub(0, self.mul(2, self.mul(self.b, w))));
        g
    }
}

fn to_u64_checked(v: &BigInt, what: &str) -> Result<u64> {
    v.to_u64()
        .filter(|&x| x < MAX_PRIME_POWER)
        .ok_or_else(|| Error::ResourceExhausted(format!("{what} {v} exceeds the supported range")))
}

/// Advances `x` through `(Z/m)^len` in lexicographic order; false after the last.
fn next_lex(x: &mut [u64], m: u64) -> bool {
    for c in x.iter_mut().rev() {
        *c += 1;
        if *c < m {
            return true;
        }
        *c = 0;
    }
    false
}

/// First nonsingular `F_p`-point of `V_p` with `w != 0`, scanning `w` from 1
/// upward and `x` lexicographically.
///
/// Rescaling by `w^{-1}` maps points with `w != 0` bijectively onto the
/// plane `w = 1` and preserves nonsingularity, so an empty `w = 1` plane ends
/// the scan.
pub fn smooth_point_mod_p(prob: &QuadricProblem) -> Result<Option<SmoothPoint>> {
    if !is_prime(&prob.modulus) {
        return invalid(format!("smooth point search needs a prime modulus, got {}", prob.modulus));
    }
    let p = to_u64_checked(&prob.modulus, "prime")?;
    let mu = prob.dimension();
    let work = (p as f64).powi(mu as i32);
    if work > SMOOTH_POINT_LIMIT as f64 {
        return Err(Error::ResourceExhausted(format!(
            "enumerating (Z/{p})^{mu} exceeds {SMOOTH_POINT_LIMIT} points"
        )));
    }
    let form = ModForm::new(&prob.q_form, &prob.b, p);
    let w = 1u64;
    let mut x = vec![0u64; mu];
    loop {
        if form.residual(&x, w) == 0 && form.gradient(&x, w).iter().any(|&g| g != 0) {
            return Ok(Some(SmoothPoint {
                x: x.iter().map(|&v| BigInt::from(v)).collect(),
                w: BigInt::from(w),
            }));
        }
        if !next_lex(&mut x, p) {
            return Ok(None);
        }
    }
}

/// Newton lift of a solution modulo `p^k` to modulo `p^e` along the lowest
/// coordinate (x first, then w) whose partial derivative is a unit mod p.
/// Returns `None` if no partial derivative is a unit.
fn hensel_lift(
    q_form: &Matrix,
    b: &BigInt,
    p: u64,
    from_exp: u32,
    to_exp: u32,
    x: &[u64],
    w: u64,
) -> Option<(Vec<u64>, u64)> {
    let base = ModForm::new(q_form, b, p);
    let grad = base.gradient(&x.iter().map(|v| v % p).collect::<Vec<_>>(), w % p);
    let pivot = grad.iter().position(|&g| g != 0)?;
    let mut z: Vec<u64> = x.to_vec();
    z.push(w);
    let mut modulus = p.pow(from_exp);
    for _ in from_exp..to_exp {
        modulus *= p;
        let form = ModForm::new(q_form, b, modulus);
        let (xs, ws) = z.split_at(z.len() - 1);
        let xs: Vec<u64> = xs.iter().map(|v| v % modulus).collect();
        let ws = ws[0] % modulus;
        let f = form.residual(&xs, ws);
        let g = form.gradient(&xs, ws)[pivot];
        let g_inv = inverse_u64(g, modulus)?;
        let step = form.mul(f, g_inv);
        let cur = z[pivot] % modulus;
        z[pivot] = form.sub(cur, step);
        for (i, v) in z.iter_mut().enumerate() {
            if i != pivot {
                *v %= modulus;
            }
        }
    }
    let w = z.pop().expect("w coordinate");
    Some((z, w))
}

fn inverse_u64(a: u64, m: u64) -> Option<u64> {
    crate::arith::mod_inverse(&BigInt::from(a), &BigInt::from(m)).and_then(|v| v.to_u64())
}

/// Complete search for `Q(x) = b (mod p^e)` (the `w = 1` normalisation)
/// by lifting residues one digit at a time. Branches whose gradient becomes a
/// unit are finished by Newton lifting.
fn lift_search(
    q_form: &Matrix,
    b: &BigInt,
    p: u64,
    e: u32,
    budget: u64,
) -> Result<Option<Vec<u64>>> {
    let mu = q_form.len();
    let mut nodes = 0u64;
    let base = ModForm::new(q_form, b, p);
    // stack of (x mod p^k, k)
    let mut stack: Vec<(Vec<u64>, u32)> = vec![(vec![0; mu], 0)];
    while let Some((x, k)) = stack.pop() {
        nodes += 1;
        if nodes > budget {
            return Err(Error::ResourceExhausted(format!(
                "lift search modulo {p}^{e} exceeded {budget} nodes"
            )));
        }
        if k == e {
            return Ok(Some(x));
        }
        if k >= 1 && p != 2 {
            let xr: Vec<u64> = x.iter().map(|v| v % p).collect();
            if base.gradient(&xr, 1).iter().any(|&g| g != 0) {
                if let Some((z, w)) = hensel_lift(q_form, b, p, k, e, &x, 1) {
                    // pivot might have moved w; renormalise to w = 1
                    let m = p.pow(e);
                    let inv = inverse_u64(w, m).expect("w stays a unit");
                    let form = ModForm::new(q_form, b, m);
                    return Ok(Some(z.iter().map(|&v| form.mul(v, inv)).collect()));
                }
            }
        }
        let step = p.pow(k);
        let next_mod = step * p;
        let form = ModForm::new(q_form, b, next_mod);
        let mut t = vec![0u64; mu];
        let mut children = Vec::new();
        loop {
            let child: Vec<u64> = x
                .iter()
                .zip(&t)
                .map(|(xi, ti)| (xi + step * ti) % next_mod)
                .collect();
            if form.residual(&child, 1) == 0 {
                children.push((child, k + 1));
            }
            if !next_lex(&mut t, p) {
                break;
            }
        }
        // pop order matches lexicographic order
        stack.extend(children.into_iter().rev());
    }
    Ok(None)
}

/// Solution `(x, w)` modulo `p^e`, or `None` if there is none.
fn solve_prime_power(
    q_form: &Matrix,
    b: &BigInt,
    p: &BigInt,
    e: u32,
    budget: u64,
) -> Result<Option<(Vec<u64>, u64)>> {
    let pu = to_u64_checked(p, "prime")?;
    let pe = p.pow(e);
    to_u64_checked(&pe, "prime power")?;
    if pu != 2 {
        let prob = QuadricProblem {
            q_form: q_form.clone(),
            b: b.clone(),
            modulus: p.clone(),
        };
        if let Some(pt) = smooth_point_mod_p(&prob)? {
            let x: Vec<u64> = pt.x.iter().map(|v| v.to_u64().unwrap()).collect();
            let w = pt.w.to_u64().unwrap();
            if let Some(lifted) = hensel_lift(q_form, b, pu, 1, e, &x, w) {
                return Ok(Some(lifted));
            }
        }
    }
    Ok(lift_search(q_form, b, pu, e, budget)?.map(|x| (x, 1)))
}

/// Solves `Q(x) = b d^2 (mod ell)` with `gcd(d, ell) = 1`.
pub fn hensel_crt_solve(q_form: &Matrix, b: &BigInt, ell: &BigInt) -> Result<Solvability> {
    hensel_crt_solve_with_budget(q_form, b, ell, DEFAULT_LIFT_BUDGET)
}

pub fn hensel_crt_solve_with_budget(
    q_form: &Matrix,
    b: &BigInt,
    ell: &BigInt,
    budget: u64,
) -> Result<Solvability> {
    check_form(q_form)?;
    if !ell.is_positive() {
        return invalid(format!("ell must be positive, got {ell}"));
    }
    let mu = q_form.len();
    if ell.is_one() {
        return Ok(Solvability::Solved(QdSolution {
            x: vec![BigInt::zero(); mu],
            d: BigInt::one(),
        }));
    }
    let mut x_parts: Vec<Vec<(BigInt, BigInt)>> = vec![Vec::new(); mu];
    let mut w_parts = Vec::new();
    for (p, e) in factorize(ell)? {
        let pe = p.pow(e);
        match solve_prime_power(q_form, b, &p, e, budget)? {
            None => return Ok(Solvability::Unsolvable { prime: p }),
            Some((x, w)) => {
                for (part, xi) in x_parts.iter_mut().zip(x) {
                    part.push((BigInt::from(xi), pe.clone()));
                }
                w_parts.push((BigInt::from(w), pe));
            }
        }
    }
    let glue = |parts: &[(BigInt, BigInt)]| crt(parts).expect("prime powers are coprime").0;
    let solution = QdSolution {
        x: x_parts.iter().map(|p| glue(p)).collect(),
        d: glue(&w_parts),
    };
    debug_assert!(solution.verify(q_form, b, ell));
    if !solution.verify(q_form, b, ell) {
        return Err(Error::ConstructionFailed("CRT-combined solution failed verification".into()));
    }
    Ok(Solvability::Solved(solution))
}

/// True when `-q_R q_B` is a non-residue mod the odd prime `ell`, which rules
/// out the congruence for a rank-one Picard lattice `Z R`.
pub fn rank1_qr_obstruction(q_r: &BigInt, q_b: &BigInt, ell: &BigInt) -> Result<bool> {
    if !is_prime(ell) || ell.is_even() {
        return invalid(format!("ell must be an odd prime, got {ell}"));
    }
    if (q_r % ell).is_zero() {
        return invalid(format!("ell = {ell} divides q(R) = {q_r}"));
    }
    Ok(jacobi(&(-(q_r * q_b)), ell) == -1)
}

fn gcd3(a: &BigInt, b: &BigInt, c: &BigInt) -> BigInt {
    a.gcd(b).gcd(c)
}

/// A Picard vector `D'` with `gcd(q(D, D'), q_B, ell) = 1`.
///
/// Returns `D` itself when the class is non-special or `D` already works;
/// otherwise scans max-norm shells of radius `1..=budget`.
pub fn find_dprime(
    q_form: &Matrix,
    d_coords: &[BigInt],
    q_b: &BigInt,
    ell: &BigInt,
    budget: usize,
) -> Result<Option<Vec<BigInt>>> {
    check_form(q_form)?;
    if d_coords.len() != q_form.len() {
        return invalid("D coordinates do not match the form dimension");
    }
    let good = |v: &[BigInt]| gcd3(&bilinear(q_form, d_coords, v), q_b, ell).is_one();
    if q_b.gcd(ell).is_one() || good(d_coords) {
        return Ok(Some(d_coords.to_vec()));
    }
    let mu = q_form.len();
    let mut found = None;
    for radius in 1..=budget as i64 {
        if for_each_shell(mu, radius, |v| {
            if good(v) {
                found = Some(v.to_vec());
                true
            } else {
                false
            }
        }) {
            return Ok(found);
        }
    }
    Ok(None)
}

/// Product of primes where the affine cone `{Q = 0}` is singular away from
/// the origin: 2 times the odd primes dividing `det Q`.
pub fn compute_cq(q_form: &Matrix) -> Result<BigInt> {
    check_form(q_form)?;
    let det = matrix::determinant(q_form).abs();
    let odd: BigInt = factorize(&det)?
        .into_iter()
        .map(|(p, _)| p)
        .filter(|p| p.is_odd())
        .product();
    Ok(odd * 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::from_i64;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn bigs(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| big(x)).collect()
    }

    fn hyperbolic() -> Matrix {
        from_i64(&[&[0, 1], &[1, 0]])
    }

    #[test]
    fn smooth_point_examples() {
        let prob = QuadricProblem::new(hyperbolic(), big(3), big(5)).unwrap();
        let pt = smooth_point_mod_p(&prob).unwrap().unwrap();
        assert_eq!((pt.x, pt.w), (bigs(&[1, 4]), big(1)));

        let prob = QuadricProblem::new(from_i64(&[&[2, 0], &[0, -10]]), big(-3), big(3)).unwrap();
        assert_eq!(smooth_point_mod_p(&prob).unwrap(), None);

        let prob = QuadricProblem::new(from_i64(&[&[2]]), big(2), big(7)).unwrap();
        let pt = smooth_point_mod_p(&prob).unwrap().unwrap();
        assert_eq!((pt.x, pt.w), (bigs(&[1]), big(1)));

        let prob = QuadricProblem::new(hyperbolic(), big(3), big(9)).unwrap();
        assert!(smooth_point_mod_p(&prob).is_err());
    }

    #[test]
    fn hensel_lifts_mod_25() {
        let Solvability::Solved(sol) = hensel_crt_solve(&hyperbolic(), &big(3), &big(25)).unwrap()
        else {
            panic!("expected a solution")
        };
        // pivot is the first coordinate (partial 2y = 8 is a unit mod 5)
        assert_eq!(sol.x, bigs(&[16, 4]));
        assert_eq!(sol.d, big(1));
        assert!(sol.verify(&hyperbolic(), &big(3), &big(25)));
        // reduces to the base point mod 5
        assert_eq!(sol.x.iter().map(|v| v % 5).collect::<Vec<_>>(), bigs(&[1, 4]));
        // the alternative lift along y is also a solution
        assert!(QdSolution { x: bigs(&[1, 14]), d: big(1) }.verify(&hyperbolic(), &big(3), &big(25)));
    }

    #[test]
    fn obstruction_example_mod_9() {
        let q = from_i64(&[&[2, 0], &[0, -10]]);
        for q_b in [3i64, 12, -6, 21] {
            let got = hensel_crt_solve(&q, &big(-q_b), &big(9)).unwrap();
            assert_eq!(got, Solvability::Unsolvable { prime: big(3) }, "q(B) = {q_b}");
        }
    }

    #[test]
    fn trivial_modulus() {
        let got = hensel_crt_solve(&from_i64(&[&[2, 1], &[1, 4]]), &big(7), &big(1)).unwrap();
        assert_eq!(
            got,
            Solvability::Solved(QdSolution { x: bigs(&[0, 0]), d: big(1) })
        );
    }

    #[test]
    fn singular_only_solutions_are_found() {
        // Q = 2x^2, b = 3, ell = 3: only x = 0 works, a singular point
        let q = from_i64(&[&[2]]);
        let Solvability::Solved(sol) = hensel_crt_solve(&q, &big(3), &big(3)).unwrap() else {
            panic!("x = 0 solves it")
        };
        assert!(sol.verify(&q, &big(3), &big(3)));
        // mod 9 that point does not lift
        assert_eq!(
            hensel_crt_solve(&q, &big(3), &big(9)).unwrap(),
            Solvability::Unsolvable { prime: big(3) }
        );
        // b = 9: x = 3y with 2y^2 = 1 mod 3 has no solution, but mod 9 x = 0 works
        assert!(matches!(
            hensel_crt_solve(&q, &big(9), &big(9)).unwrap(),
            Solvability::Solved(_)
        ));
    }

    #[test]
    fn even_moduli_use_the_lift_search() {
        let q = from_i64(&[&[2, 1], &[1, 2]]);
        for ell in [2i64, 4, 8, 12, 40] {
            for b in -5i64..=5 {
                if let Solvability::Solved(sol) = hensel_crt_solve(&q, &big(b), &big(ell)).unwrap() {
                    assert!(sol.verify(&q, &big(b), &big(ell)));
                }
            }
        }
    }

    #[test]
    fn crt_combines_prime_powers() {
        let q = from_i64(&[&[2, 1, 0], &[1, -4, 3], &[0, 3, 6]]);
        for ell in [15i64, 45, 63, 99, 175] {
            let Solvability::Solved(sol) = hensel_crt_solve(&q, &big(5), &big(ell)).unwrap() else {
                continue;
            };
            assert!(sol.verify(&q, &big(5), &big(ell)), "ell = {ell}");
        }
    }

    #[test]
    fn qr_obstruction_examples() {
        assert!(!rank1_qr_obstruction(&big(2), &big(-3), &big(5)).unwrap());
        assert!(rank1_qr_obstruction(&big(2), &big(-3), &big(7)).unwrap());
        assert!(!rank1_qr_obstruction(&big(1), &big(-1), &big(5)).unwrap());
        assert!(rank1_qr_obstruction(&big(1), &big(-1), &big(9)).is_err());
        assert!(rank1_qr_obstruction(&big(1), &big(-1), &big(2)).is_err());
        assert!(rank1_qr_obstruction(&big(5), &big(-1), &big(5)).is_err());
    }

    #[test]
    fn dprime_examples() {
        // non-special: D itself
        let got = find_dprime(&hyperbolic(), &bigs(&[1, 0]), &big(-3), &big(5), 3).unwrap();
        assert_eq!(got, Some(bigs(&[1, 0])));
        // and (0, 1) satisfies the gcd condition too
        assert!(gcd3(&bilinear(&hyperbolic(), &bigs(&[1, 0]), &bigs(&[0, 1])), &big(-3), &big(5)).is_one());

        let got = find_dprime(&from_i64(&[&[2]]), &bigs(&[1]), &big(5), &big(5), 3).unwrap();
        assert_eq!(got, Some(bigs(&[1])));

        // special class, D isotropic: needs the shell search
        let got = find_dprime(&hyperbolic(), &bigs(&[1, 0]), &big(10), &big(5), 3).unwrap();
        assert_eq!(got, Some(bigs(&[0, 1])));

        // D = 5 R: every pairing is a multiple of 5
        let got = find_dprime(&from_i64(&[&[2]]), &bigs(&[5]), &big(10), &big(5), 4).unwrap();
        assert_eq!(got, None);
    }

    #[test]
    fn cq_examples() {
        assert_eq!(compute_cq(&hyperbolic()).unwrap(), big(2));
        assert_eq!(compute_cq(&from_i64(&[&[2, 0], &[0, -10]])).unwrap(), big(10));
        assert_eq!(compute_cq(&from_i64(&[&[2, 1], &[1, 2]])).unwrap(), big(6));
        assert!(compute_cq(&from_i64(&[&[2, 2], &[2, 2]])).is_err());
    }

    #[test]
    fn smooth_points_exist_off_cq() {
        let forms = [
            from_i64(&[&[2, 1], &[1, 2]]),
            from_i64(&[&[2, 0], &[0, -10]]),
            from_i64(&[&[4, 1, 0], &[1, -2, 3], &[0, 3, 2]]),
        ];
        for q in &forms {
            let cq = compute_cq(q).unwrap();
            for p in (3i64..50).filter(|&p| is_prime(&big(p))) {
                for b in [1i64, -3, 7] {
                    if ((&cq * b) % p).is_zero() {
                        continue;
                    }
                    let prob = QuadricProblem::new(q.clone(), big(b), big(p)).unwrap();
                    assert!(smooth_point_mod_p(&prob).unwrap().is_some(), "p={p} b={b}");
                }
            }
        }
    }

    fn symmetric_form() -> impl proptest::strategy::Strategy<Value = Matrix> {
        use proptest::prelude::*;
        (1usize..=3)
            .prop_flat_map(|mu| proptest::collection::vec(-10i64..=10, mu * mu).prop_map(move |e| (mu, e)))
            .prop_map(|(mu, e)| {
                (0..mu)
                    .map(|i| (0..mu).map(|j| big(e[i.min(j) * mu + i.max(j)])).collect())
                    .collect::<Matrix>()
            })
            .prop_filter("non-degenerate", |m| !matrix::determinant(m).is_zero())
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]
        #[test]
        fn agrees_with_oracle(
            q in symmetric_form(),
            b in -30i64..=30,
            ell in proptest::sample::select(vec![3i64, 5, 7, 9, 15, 21, 25, 27, 33, 45, 49]),
        ) {
            let fast = hensel_crt_solve(&q, &big(b), &big(ell)).unwrap();
            let slow = crate::oracle::brute_force_solve(&q, &big(b), &big(ell)).unwrap();
            match fast {
                Solvability::Solved(sol) => {
                    proptest::prop_assert!(slow.is_some());
                    proptest::prop_assert!(sol.verify(&q, &big(b), &big(ell)));
                }
                Solvability::Unsolvable { prime } => {
                    proptest::prop_assert!(slow.is_none());
                    proptest::prop_assert!((big(ell) % prime).is_zero());
                }
            }
        }

        #[test]
        fn hensel_lift_is_sound(
            q in symmetric_form(),
            b in -30i64..=30,
            p in proptest::sample::select(vec![3u64, 5, 7, 11, 13]),
            e in 2u32..=5,
        ) {
            let prob = QuadricProblem::new(q.clone(), big(b), big(p as i64)).unwrap();
            let Some(base) = smooth_point_mod_p(&prob).unwrap() else {
                return Ok(());
            };
            let to_u64 = |v: &BigInt| crate::arith::modulo(v, &big(p as i64)).to_u64().unwrap();
            let x0: Vec<u64> = base.x.iter().map(to_u64).collect();
            let w0 = to_u64(&base.w);
            let (x, w) = hensel_lift(&q, &big(b), p, 1, e, &x0, w0).expect("smooth points lift");
            let xs: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v)).collect();
            let w = BigInt::from(w);
            let pe = big(p.pow(e) as i64);
            proptest::prop_assert!(((eval_form(&q, &xs) - big(b) * &w * &w) % &pe).is_zero());
            proptest::prop_assert_eq!(x.iter().map(|v| v % p).collect::<Vec<_>>(), x0);
            proptest::prop_assert_eq!(to_u64(&w), w0);
        }
    }
}
