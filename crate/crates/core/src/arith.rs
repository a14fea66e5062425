//! Integer helpers shared by the lattice and congruence code: gcd/content,
//! factorization of desk-scale integers, modular inverses, CRT and the
//! Jacobi symbol.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Trial division runs over all candidates below this bound.
pub const TRIAL_DIVISION_LIMIT: u64 = 1_000_000;

/// gcd of all entries, always non-negative; zero for the zero vector.
pub fn content(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x))
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// Least non-negative residue.
pub fn modulo(a: &BigInt, m: &BigInt) -> BigInt {
    a.mod_floor(m)
}

/// Inverse of `a` modulo `m` (m >= 1), if it exists.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    if m.is_one() {
        return Some(BigInt::zero());
    }
    let ext = a.mod_floor(m).extended_gcd(m);
    if !ext.gcd.is_one() {
        return None;
    }
    Some(ext.x.mod_floor(m))
}

/// Combine `x = r_i (mod m_i)` for pairwise coprime moduli. Returns the
/// residue in `[0, prod m_i)` together with the product.
pub fn crt(residues: &[(BigInt, BigInt)]) -> Option<(BigInt, BigInt)> {
    let mut acc = BigInt::zero();
    let mut modulus = BigInt::one();
    for (r, m) in residues {
        // acc + modulus * t = r (mod m)
        let inv = mod_inverse(&modulus, m)?;
        let t = ((r - &acc) * inv).mod_floor(m);
        acc += &modulus * t;
        modulus *= m;
        acc = acc.mod_floor(&modulus);
    }
    Some((acc, modulus))
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for the whole `u64` range.
pub fn is_prime_u64(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn is_prime(n: &BigInt) -> bool {
    match n.to_u64() {
        Some(v) => is_prime_u64(v),
        None => false,
    }
}

/// Prime factorization of `n >= 1` as `(p, e)` pairs in increasing order.
///
/// Trial division below [`TRIAL_DIVISION_LIMIT`], then the cofactor must be
/// 1 or a prime that fits in 64 bits. Anything else is rejected.
pub fn factorize(n: &BigInt) -> Result<Vec<(BigInt, u32)>> {
    if n.sign() != Sign::Plus {
        return Err(Error::InvalidArgument(format!(
            "factorization needs a positive integer, got {n}"
        )));
    }
    let mut rest: BigUint = n.magnitude().clone();
    let mut out = Vec::new();
    let mut p: u64 = 2;
    while p < TRIAL_DIVISION_LIMIT {
        if BigUint::from(p) * BigUint::from(p) > rest {
            break;
        }
        let mut e = 0u32;
        while (&rest % p).is_zero() {
            rest /= p;
            e += 1;
        }
        if e > 0 {
            out.push((BigInt::from(p), e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if !rest.is_one() {
        let fits = rest.to_u64();
        match fits {
            Some(v) if is_prime_u64(v) => out.push((BigInt::from(v), 1)),
            _ if BigUint::from(p) * BigUint::from(p) > rest => {
                // trial division exhausted every possible factor
                out.push((BigInt::from(rest), 1));
            }
            _ => {
                return Err(Error::ResourceExhausted(format!(
                    "cannot factor {n}: cofactor {rest} is beyond trial division and 64-bit primality"
                )))
            }
        }
    }
    Ok(out)
}

/// Jacobi symbol (a/n) for odd positive n.
pub fn jacobi(a: &BigInt, n: &BigInt) -> i32 {
    assert!(n.is_positive() && n.is_odd(), "jacobi symbol needs odd positive n");
    let mut a = a.mod_floor(n);
    let mut n = n.clone();
    let mut sign = 1;
    let three = BigInt::from(3);
    let five = BigInt::from(5);
    let eight = BigInt::from(8);
    let four = BigInt::from(4);
    while !a.is_zero() {
        while a.is_even() {
            a >>= 1;
            let r = n.mod_floor(&eight);
            if r == three || r == five {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a.mod_floor(&four) == three && n.mod_floor(&four) == three {
            sign = -sign;
        }
        a = a.mod_floor(&n);
    }
    if n.is_one() {
        sign
    } else {
        0
    }
}

/// Largest divisor of `value` built only from primes dividing `base`.
pub fn part_supported_on(value: &BigInt, base: &BigInt) -> BigInt {
    let mut rest = value.abs();
    let mut part = BigInt::one();
    if rest.is_zero() {
        return BigInt::zero();
    }
    loop {
        let g = rest.gcd(base);
        if g.is_one() {
            return part;
        }
        rest /= &g;
        part *= g;
    }
}

/// Visits every vector of `Z^dim` with max-norm exactly `radius`, each
/// coordinate running through `0, 1, -1, 2, -2, ...` and the first coordinate
/// varying slowest. Stops at the first vector for which `f` returns true.
pub fn for_each_shell(dim: usize, radius: i64, mut f: impl FnMut(&[BigInt]) -> bool) -> bool {
    let order: Vec<i64> = std::iter::once(0)
        .chain((1..=radius).flat_map(|k| [k, -k]))
        .collect();
    let mut idx = vec![0usize; dim];
    loop {
        if radius == 0 || idx.iter().any(|&i| order[i].abs() == radius) {
            let v: Vec<BigInt> = idx.iter().map(|&i| BigInt::from(order[i])).collect();
            if f(&v) {
                return true;
            }
        }
        let mut pos = dim;
        loop {
            if pos == 0 {
                return false;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < order.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn miller_rabin_matches_sieve() {
        let limit = 5000usize;
        let mut sieve = vec![true; limit];
        sieve[0] = false;
        sieve[1] = false;
        for i in 2..limit {
            if sieve[i] {
                for j in (i * i..limit).step_by(i) {
                    sieve[j] = false;
                }
            }
        }
        for (i, &p) in sieve.iter().enumerate() {
            assert_eq!(is_prime_u64(i as u64), p, "{i}");
        }
        assert!(is_prime_u64(18_446_744_073_709_551_557));
        assert!(!is_prime_u64(3_215_031_751));
    }

    #[test]
    fn factorize_small_and_large() {
        assert_eq!(factorize(&big(1)).unwrap(), vec![]);
        assert_eq!(
            factorize(&big(20000)).unwrap(),
            vec![(big(2), 5), (big(5), 4)]
        );
        let p = BigInt::from(1_000_000_007u64);
        assert_eq!(factorize(&(&p * 9)).unwrap(), vec![(big(3), 2), (p.clone(), 1)]);
        // two primes above the trial bound
        let q = BigInt::from(1_000_000_009u64);
        assert!(matches!(
            factorize(&(&p * &q)),
            Err(Error::ResourceExhausted(_))
        ));
        assert!(factorize(&big(0)).is_err());
    }

    #[test]
    fn jacobi_against_euler() {
        for p in [3i64, 5, 7, 11, 13, 97] {
            for a in -20i64..20 {
                let e = pow_mod(a.rem_euclid(p) as u64, ((p - 1) / 2) as u64, p as u64);
                let expected = match e {
                    0 => 0,
                    1 => 1,
                    _ => -1,
                };
                assert_eq!(jacobi(&big(a), &big(p)), expected, "({a}/{p})");
            }
        }
    }

    #[test]
    fn crt_and_inverse() {
        assert_eq!(mod_inverse(&big(2), &big(5)), Some(big(3)));
        assert_eq!(mod_inverse(&big(8), &big(25)), Some(big(22)));
        assert_eq!(mod_inverse(&big(3), &big(9)), None);
        let (x, m) = crt(&[(big(2), big(3)), (big(3), big(5)), (big(2), big(7))]).unwrap();
        assert_eq!((x, m), (big(23), big(105)));
    }

    #[test]
    fn shells_partition_the_box() {
        let mut seen = Vec::new();
        for r in 0..=2 {
            for_each_shell(2, r, |v| {
                seen.push((v[0].clone(), v[1].clone()));
                false
            });
        }
        assert_eq!(seen.len(), 25);
        assert_eq!(seen[0], (big(0), big(0)));
        assert_eq!(seen[1], (big(0), big(1)));
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 25);
    }

    #[test]
    fn supported_part() {
        assert_eq!(part_supported_on(&big(800), &big(5)), big(25));
        assert_eq!(part_supported_on(&big(6), &big(5)), big(1));
        assert_eq!(part_supported_on(&big(720), &big(6)), big(144));
    }
}
