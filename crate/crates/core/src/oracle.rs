//! Naive brute-force ground truth for the property tests.
//!
//! Everything here is plain enumeration over machine integers. The module
//! imports type definitions only (`QdSolution`, `IntegerLattice`,
//! `LatticeVector`) and none of the solver, lattice or quotient routines, so
//! a bug in those cannot be reproduced here.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::congruence::QdSolution;
use crate::error::{Error, Result};
use crate::lattice::{IntegerLattice, LatticeVector};
use crate::matrix::Matrix;

/// Largest modulus accepted by [`brute_force_solve`].
pub const ORACLE_MAX_ELL: i128 = 10_000;
/// Largest dimension accepted by [`brute_force_solve`].
pub const ORACLE_MAX_DIM: usize = 3;
/// Default cap on enumerated candidates.
pub const ORACLE_BUDGET: u128 = 2_000_000_000;

fn small(v: &BigInt, what: &str) -> Result<i128> {
    v.to_i128()
        .filter(|x| x.abs() < 1 << 60)
        .ok_or_else(|| Error::InvalidArgument(format!("{what} too large for the oracle")))
}

fn euclid(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Lexicographically first `(x_1, ..., x_mu, d)` in `(Z/ell)^{mu+1}` with
/// `Q(x) = b d^2 (mod ell)` and `gcd(d, ell) = 1`, or `None`.
pub fn brute_force_solve(q_form: &Matrix, b: &BigInt, ell: &BigInt) -> Result<Option<QdSolution>> {
    brute_force_solve_with_budget(q_form, b, ell, ORACLE_BUDGET)
}

pub fn brute_force_solve_with_budget(
    q_form: &Matrix,
    b: &BigInt,
    ell: &BigInt,
    budget: u128,
) -> Result<Option<QdSolution>> {
    let mu = q_form.len();
    let m = small(ell, "ell")?;
    if m < 1 {
        return Err(Error::InvalidArgument(format!("ell must be positive, got {ell}")));
    }
    if m > ORACLE_MAX_ELL || mu > ORACLE_MAX_DIM || mu == 0 {
        return Err(Error::ResourceExhausted(format!(
            "oracle handles ell <= {ORACLE_MAX_ELL} and 1 <= mu <= {ORACLE_MAX_DIM}"
        )));
    }
    if (m as u128).pow(mu as u32 + 1) > budget {
        return Err(Error::ResourceExhausted(format!(
            "oracle enumeration ell^(mu+1) exceeds {budget}"
        )));
    }
    let mut a = vec![vec![0i128; mu]; mu];
    for i in 0..mu {
        if q_form[i].len() != mu {
            return Err(Error::InvalidArgument("form matrix must be square".into()));
        }
        for j in 0..mu {
            a[i][j] = small(&q_form[i][j], "form entry")?.rem_euclid(m);
        }
    }
    let bm = small(b, "b")?.rem_euclid(m);

    // smallest unit d realising each value b d^2 mod ell
    let mut first_d: Vec<Option<i128>> = vec![None; m as usize];
    for d in 1..=m {
        if euclid(d, m) != 1 {
            continue;
        }
        let t = (bm * d % m) * d % m;
        first_d[t as usize].get_or_insert(d);
    }

    let mut x = vec![0i128; mu];
    loop {
        let mut q = 0i128;
        for i in 0..mu {
            let mut row = 0i128;
            for j in 0..mu {
                row = (row + a[i][j] * x[j]) % m;
            }
            q = (q + x[i] * row) % m;
        }
        if let Some(d) = first_d[q as usize] {
            return Ok(Some(QdSolution {
                x: x.iter().map(|&v| BigInt::from(v)).collect(),
                d: BigInt::from(d),
            }));
        }
        let mut k = mu;
        loop {
            if k == 0 {
                return Ok(None);
            }
            k -= 1;
            x[k] += 1;
            if x[k] < m {
                break;
            }
            x[k] = 0;
        }
    }
}

/// Smallest `k >= 1` with `k * element` in `span(pic_basis) + ell * Z^rank`,
/// i.e. the order of `element / ell` modulo the Picard span. Tries every `k`
/// and every coefficient vector in `(Z/ell)^mu`.
pub fn brute_force_order(
    pic_basis: &[LatticeVector],
    element: &LatticeVector,
    ell: &BigInt,
    limit: u128,
) -> Result<BigInt> {
    let m = small(ell, "ell")?;
    if m < 1 {
        return Err(Error::InvalidArgument(format!("ell must be positive, got {ell}")));
    }
    let mu = pic_basis.len();
    if (m as u128).pow(mu as u32 + 1) > limit {
        return Err(Error::ResourceExhausted(format!(
            "order enumeration ell^(mu+1) exceeds {limit}"
        )));
    }
    let rank = element.len();
    let to_small = |v: &LatticeVector| -> Result<Vec<i128>> {
        if v.len() != rank {
            return Err(Error::InvalidArgument("vector length mismatch".into()));
        }
        v.coords()
            .iter()
            .map(|c| small(c, "coordinate").map(|x| x.rem_euclid(m)))
            .collect()
    };
    let e = to_small(element)?;
    let pics: Vec<Vec<i128>> = pic_basis.iter().map(to_small).collect::<Result<_>>()?;
    for k in 1..=m {
        let target: Vec<i128> = e.iter().map(|x| x * k % m).collect();
        let mut c = vec![0i128; mu];
        loop {
            let hit = (0..rank).all(|t| {
                let s = pics.iter().zip(&c).fold(0, |acc, (p, ci)| acc + p[t] * ci);
                (target[t] - s).rem_euclid(m) == 0
            });
            if hit {
                return Ok(BigInt::from(k));
            }
            let mut idx = mu;
            let mut done = true;
            while idx > 0 {
                idx -= 1;
                c[idx] += 1;
                if c[idx] < m {
                    done = false;
                    break;
                }
                c[idx] = 0;
            }
            if done {
                break;
            }
        }
    }
    // k = ell always works, so this is unreachable for consistent input
    Ok(BigInt::from(m))
}

/// gcd of `q(v, e_i)` over all basis vectors, each pairing summed entry by entry.
pub fn brute_force_divisibility(lat: &IntegerLattice, v: &LatticeVector) -> Result<BigInt> {
    let gram = lat.gram();
    if v.len() != gram.len() {
        return Err(Error::InvalidArgument("vector length mismatch".into()));
    }
    if v.coords().iter().all(Zero::is_zero) {
        return Err(Error::InvalidArgument("divisibility of the zero vector".into()));
    }
    let mut g = BigInt::zero();
    for col in 0..gram.len() {
        let mut pairing = BigInt::zero();
        for (row, coord) in v.coords().iter().enumerate() {
            pairing += coord * &gram[row][col];
        }
        // Euclid by hand on BigInt
        let (mut a, mut b) = (g, if pairing < BigInt::zero() { -pairing } else { pairing });
        while !b.is_zero() {
            let t = &a % &b;
            a = b;
            b = t;
        }
        g = a;
    }
    Ok(g)
}
