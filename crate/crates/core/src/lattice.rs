//! Even integer lattices given by a Gram matrix, and the fixed coordinate
//! model of the K3^[n] lattice `U^3 + E8(-1)^2 + <2-2n>`.
//!
//! Basis order of [`build_k3n_lattice`]: `e1 f1 e2 f2 e3 f3` (three hyperbolic
//! planes), then two copies of `E8(-1)` (indices 6..14 and 14..22), then
//! `delta` at index 22.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::content;
use crate::error::{invalid, Result};
use crate::matrix::{self, Matrix};

pub const K3N_RANK: usize = 23;
pub const DELTA_INDEX: usize = 22;
pub const HYPERBOLIC_BLOCKS: usize = 3;

/// Cartan matrix of E8 (Bourbaki numbering); the lattice blocks use its negative.
const E8_CARTAN: [[i64; 8]; 8] = [
    [2, 0, -1, 0, 0, 0, 0, 0],
    [0, 2, 0, -1, 0, 0, 0, 0],
    [-1, 0, 2, -1, 0, 0, 0, 0],
    [0, -1, -1, 2, -1, 0, 0, 0],
    [0, 0, 0, -1, 2, -1, 0, 0],
    [0, 0, 0, 0, -1, 2, -1, 0],
    [0, 0, 0, 0, 0, -1, 2, -1],
    [0, 0, 0, 0, 0, 0, -1, 2],
];

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticeVector(#[serde(with = "crate::decimal::vec")] pub Vec<BigInt>);

impl LatticeVector {
    pub fn zero(rank: usize) -> Self {
        LatticeVector(vec![BigInt::zero(); rank])
    }

    pub fn basis(rank: usize, i: usize) -> Self {
        let mut v = Self::zero(rank);
        v.0[i] = BigInt::one();
        v
    }

    pub fn from_i64(coords: &[i64]) -> Self {
        LatticeVector(coords.iter().map(|&x| BigInt::from(x)).collect())
    }

    /// Dense vector of length `rank` with the given `(index, value)` entries.
    pub fn sparse(rank: usize, entries: &[(usize, i64)]) -> Self {
        let mut v = Self::zero(rank);
        for &(i, x) in entries {
            v.0[i] += x;
        }
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.0
    }

    /// gcd of the coordinates.
    pub fn content(&self) -> BigInt {
        content(&self.0)
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        LatticeVector(self.0.iter().map(|x| x * k).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.len(), other.len());
        LatticeVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `sum_i coeffs[i] * vectors[i]`; all vectors share one length.
    pub fn combination(coeffs: &[BigInt], vectors: &[LatticeVector], rank: usize) -> Self {
        let mut out = Self::zero(rank);
        for (c, v) in coeffs.iter().zip(vectors) {
            if c.is_zero() {
                continue;
            }
            for (o, x) in out.0.iter_mut().zip(&v.0) {
                *o += c * x;
            }
        }
        out
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// A free abelian group with an even, symmetric integral pairing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerLattice {
    gram: Matrix,
}

impl IntegerLattice {
    /// Checks symmetry, evenness and non-degeneracy.
    pub fn new(gram: Matrix) -> Result<Self> {
        let rank = gram.len();
        if rank == 0 {
            return invalid("lattice must have positive rank");
        }
        if gram.iter().any(|row| row.len() != rank) {
            return invalid("Gram matrix must be square");
        }
        for i in 0..rank {
            if gram[i][i].is_odd() {
                return invalid(format!("Gram diagonal entry {i} is odd; lattice must be even"));
            }
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return invalid(format!("Gram matrix not symmetric at ({i},{j})"));
                }
            }
        }
        if matrix::determinant(&gram).is_zero() {
            return invalid("Gram matrix is degenerate");
        }
        Ok(IntegerLattice { gram })
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    fn check_len(&self, v: &LatticeVector) -> Result<()> {
        if v.len() != self.rank() {
            return invalid(format!(
                "vector has length {}, lattice rank is {}",
                v.len(),
                self.rank()
            ));
        }
        Ok(())
    }

    /// `q(v, w) = v^T G w`.
    pub fn pairing(&self, v: &LatticeVector, w: &LatticeVector) -> Result<BigInt> {
        self.check_len(v)?;
        self.check_len(w)?;
        Ok(self.pairing_unchecked(v, w))
    }

    pub(crate) fn pairing_unchecked(&self, v: &LatticeVector, w: &LatticeVector) -> BigInt {
        let mut acc = BigInt::zero();
        for (i, vi) in v.0.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            let row = &self.gram[i];
            let mut inner = BigInt::zero();
            for (g, wj) in row.iter().zip(&w.0) {
                if !g.is_zero() && !wj.is_zero() {
                    inner += g * wj;
                }
            }
            acc += vi * inner;
        }
        acc
    }

    pub fn norm(&self, v: &LatticeVector) -> Result<BigInt> {
        self.pairing(v, v)
    }

    /// The row `G v`, i.e. the pairings of `v` with every basis vector.
    pub fn dual_coords(&self, v: &LatticeVector) -> Result<Vec<BigInt>> {
        self.check_len(v)?;
        Ok(matrix::mul_vec(&self.gram, &v.0))
    }

    /// Positive generator of `{ q(v, w) : w in L }`.
    pub fn divisibility(&self, v: &LatticeVector) -> Result<BigInt> {
        self.check_len(v)?;
        if v.is_zero() {
            return invalid("divisibility of the zero vector is undefined");
        }
        Ok(content(&self.dual_coords(v)?))
    }

    pub fn is_primitive(&self, v: &LatticeVector) -> Result<bool> {
        self.check_len(v)?;
        if v.is_zero() {
            return invalid("primitivity of the zero vector is undefined");
        }
        Ok(v.content().is_one())
    }

    /// Searches for `(a, l)` with `a, l` orthogonal to both `b` and `d` and `q(l, a) = 1`.
    ///
    /// First any hyperbolic plane (lowest index first) on which `b` and `d`
    /// vanish; otherwise candidates `a` in the common orthogonal complement,
    /// enumerated by increasing L1 radius in a kernel basis, up to `budget`.
    pub fn find_orthogonal_pair(
        &self,
        b: &LatticeVector,
        d: &LatticeVector,
        budget: usize,
    ) -> Result<PairSearch> {
        self.check_len(b)?;
        self.check_len(d)?;
        if b.is_zero() || d.is_zero() {
            return invalid("orthogonal pair search needs nonzero b and d");
        }
        if let Some(pair) = self.free_hyperbolic_pair(b, d) {
            return Ok(PairSearch::Found(pair));
        }

        let constraints = vec![self.dual_coords(b)?, self.dual_coords(d)?];
        let kernel = matrix::integer_kernel(&constraints, self.rank());
        let kernel: Vec<LatticeVector> = kernel.into_iter().map(LatticeVector).collect();
        let k = kernel.len();
        if k == 0 {
            return Ok(PairSearch::BudgetExhausted { radius: 0 });
        }
        // Gram of the complement in kernel coordinates
        let kgram: Matrix = kernel
            .iter()
            .map(|x| kernel.iter().map(|y| self.pairing_unchecked(x, y)).collect())
            .collect();

        for radius in 1..=budget {
            let mut found = None;
            for_each_l1_sphere(k, radius, &mut |coeffs| {
                let row = matrix::mul_vec(&kgram, coeffs);
                if !content(&row).is_one() {
                    return false;
                }
                let y = bezout_vector(&row);
                let a = LatticeVector::combination(coeffs, &kernel, self.rank());
                let l = LatticeVector::combination(&y, &kernel, self.rank());
                found = Some(OrthogonalPair { a, l });
                true
            });
            if let Some(pair) = found {
                debug_assert!(pair.verify(self, b, d));
                return Ok(PairSearch::Found(pair));
            }
        }
        Ok(PairSearch::BudgetExhausted { radius: budget })
    }

    fn free_hyperbolic_pair(&self, b: &LatticeVector, d: &LatticeVector) -> Option<OrthogonalPair> {
        if self.rank() != K3N_RANK {
            return None;
        }
        (0..HYPERBOLIC_BLOCKS).find_map(|blk| {
            let (e, f) = (2 * blk, 2 * blk + 1);
            let unused = [e, f]
                .iter()
                .all(|&i| b.0[i].is_zero() && d.0[i].is_zero());
            let is_plane = self.gram[e][e].is_zero()
                && self.gram[f][f].is_zero()
                && self.gram[e][f].is_one()
                && (0..self.rank())
                    .filter(|&j| j != e && j != f)
                    .all(|j| self.gram[e][j].is_zero() && self.gram[f][j].is_zero());
            (unused && is_plane).then(|| OrthogonalPair {
                a: LatticeVector::basis(K3N_RANK, e),
                l: LatticeVector::basis(K3N_RANK, f),
            })
        })
    }
}

/// `y` with `y . row = 1`, for a row whose entries have gcd 1.
fn bezout_vector(row: &[BigInt]) -> Vec<BigInt> {
    let mut y = vec![BigInt::zero(); row.len()];
    let mut g = BigInt::zero();
    for (i, x) in row.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        let ext = g.extended_gcd(x);
        for c in y.iter_mut().take(i) {
            *c *= &ext.x;
        }
        y[i] = ext.y;
        g = ext.gcd;
    }
    debug_assert!(g.is_one());
    y
}

/// Calls `f` on every integer vector of dimension `dim` with L1 norm exactly
/// `radius`; stops early when `f` returns true.
fn for_each_l1_sphere(dim: usize, radius: usize, f: &mut dyn FnMut(&[BigInt]) -> bool) -> bool {
    fn rec(
        pos: usize,
        left: usize,
        cur: &mut Vec<BigInt>,
        f: &mut dyn FnMut(&[BigInt]) -> bool,
    ) -> bool {
        let dim = cur.len();
        if pos == dim - 1 {
            let choices: Vec<i64> = if left == 0 {
                vec![0]
            } else {
                vec![left as i64, -(left as i64)]
            };
            for c in choices {
                cur[pos] = BigInt::from(c);
                if f(cur) {
                    return true;
                }
            }
            cur[pos] = BigInt::zero();
            return false;
        }
        for mag in 0..=left {
            let signs: &[i64] = if mag == 0 { &[1] } else { &[1, -1] };
            for s in signs {
                cur[pos] = BigInt::from(s * mag as i64);
                if rec(pos + 1, left - mag, cur, f) {
                    return true;
                }
            }
        }
        cur[pos] = BigInt::zero();
        false
    }
    let mut cur = vec![BigInt::zero(); dim];
    rec(0, radius, &mut cur, f)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrthogonalPair {
    pub a: LatticeVector,
    pub l: LatticeVector,
}

impl OrthogonalPair {
    /// Re-checks the four orthogonality equations and `q(l, a) = 1`.
    pub fn verify(&self, lat: &IntegerLattice, b: &LatticeVector, d: &LatticeVector) -> bool {
        let q = |x: &LatticeVector, y: &LatticeVector| lat.pairing(x, y).ok();
        let zero = Some(BigInt::zero());
        q(&self.a, b) == zero
            && q(&self.a, d) == zero
            && q(&self.l, b) == zero
            && q(&self.l, d) == zero
            && q(&self.l, &self.a) == Some(BigInt::one())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PairSearch {
    Found(OrthogonalPair),
    BudgetExhausted { radius: usize },
}

/// The K3^[n] lattice in the fixed basis described in the module docs.
pub fn build_k3n_lattice(n: u32) -> Result<IntegerLattice> {
    if n < 2 {
        return invalid(format!("K3^[n] lattice needs n >= 2, got {n}"));
    }
    let mut gram = vec![vec![BigInt::zero(); K3N_RANK]; K3N_RANK];
    for blk in 0..HYPERBOLIC_BLOCKS {
        gram[2 * blk][2 * blk + 1] = BigInt::one();
        gram[2 * blk + 1][2 * blk] = BigInt::one();
    }
    for offset in [6, 14] {
        for (i, row) in E8_CARTAN.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                gram[offset + i][offset + j] = BigInt::from(-x);
            }
        }
    }
    gram[DELTA_INDEX][DELTA_INDEX] = BigInt::from(2i64 - 2 * n as i64);
    Ok(IntegerLattice { gram })
}

/// `2n - 2`.
pub fn delta_divisor(n: u32) -> BigInt {
    BigInt::from(2u64 * n as u64 - 2)
}

/// Whether `div(v) | 2n - 2` for a primitive `v` of the K3^[n] lattice.
pub fn lemma21_check(lat: &IntegerLattice, n: u32, v: &LatticeVector) -> Result<bool> {
    if !lat.is_primitive(v)? {
        return invalid("divisibility bound applies to primitive vectors only");
    }
    let div = lat.divisibility(v)?;
    Ok((delta_divisor(n) % div).is_zero())
}

/// Sign-free helper used by tests and the witness checks.
pub fn abs_divides(a: &BigInt, b: &BigInt) -> bool {
    if a.is_zero() {
        return b.is_zero();
    }
    (b % a.abs()).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e(i: usize) -> usize {
        2 * (i - 1)
    }
    fn f(i: usize) -> usize {
        2 * (i - 1) + 1
    }

    #[test]
    fn k3n_shape() {
        let lat = build_k3n_lattice(2).unwrap();
        assert_eq!(lat.rank(), 23);
        assert_eq!(lat.gram()[22][22], BigInt::from(-2));
        // |det| = 2n - 2
        assert_eq!(matrix::determinant(lat.gram()), BigInt::from(2));
        let lat5 = build_k3n_lattice(5).unwrap();
        assert_eq!(lat5.gram()[22][22], BigInt::from(-8));
        for i in 0..22 {
            assert_eq!(lat.gram()[i][..22], lat5.gram()[i][..22]);
        }
        assert!(build_k3n_lattice(1).is_err());
        // validated constructor accepts it too
        assert!(IntegerLattice::new(lat.gram().clone()).is_ok());
    }

    #[test]
    fn pairing_examples() {
        let lat = build_k3n_lattice(2).unwrap();
        let ev = LatticeVector::basis(23, e(1));
        let fv = LatticeVector::basis(23, f(1));
        assert_eq!(lat.pairing(&ev, &fv).unwrap(), BigInt::one());
        let delta = LatticeVector::basis(23, DELTA_INDEX);
        assert_eq!(lat.norm(&delta).unwrap(), BigInt::from(-2));
        assert_eq!(lat.norm(&ev.add(&fv)).unwrap(), BigInt::from(2));
        assert!(lat.pairing(&ev, &LatticeVector::zero(22)).is_err());
    }

    #[test]
    fn divisibility_examples() {
        let lat = build_k3n_lattice(2).unwrap();
        let delta = LatticeVector::basis(23, DELTA_INDEX);
        assert_eq!(lat.divisibility(&delta).unwrap(), BigInt::from(2));
        let ev = LatticeVector::basis(23, e(1));
        assert_eq!(lat.divisibility(&ev).unwrap(), BigInt::one());
        assert_eq!(lat.divisibility(&ev.scale(&BigInt::from(3))).unwrap(), BigInt::from(3));
        assert!(lat.divisibility(&LatticeVector::zero(23)).is_err());
    }

    #[test]
    fn primitivity_examples() {
        let lat = build_k3n_lattice(3).unwrap();
        assert!(lat.is_primitive(&LatticeVector::sparse(23, &[(0, 1)])).unwrap());
        assert!(!lat.is_primitive(&LatticeVector::sparse(23, &[(0, 2), (1, 4)])).unwrap());
        assert!(lat
            .is_primitive(&LatticeVector::sparse(23, &[(0, 6), (1, 10), (2, 15)]))
            .unwrap());
        assert!(lat.is_primitive(&LatticeVector::zero(23)).is_err());
    }

    #[test]
    fn lemma21_examples() {
        let lat2 = build_k3n_lattice(2).unwrap();
        assert!(lemma21_check(&lat2, 2, &LatticeVector::basis(23, DELTA_INDEX)).unwrap());
        let lat4 = build_k3n_lattice(4).unwrap();
        assert!(lemma21_check(&lat4, 4, &LatticeVector::basis(23, e(1))).unwrap());
        assert!(lemma21_check(&lat4, 4, &LatticeVector::sparse(23, &[(0, 2)])).is_err());
    }

    #[test]
    fn orthogonal_pair_free_block() {
        let lat = build_k3n_lattice(3).unwrap();
        // b, d on U1 + <2-2n>: the first unused plane is U2
        let b = LatticeVector::sparse(23, &[(e(1), 1), (DELTA_INDEX, 1)]);
        let d = LatticeVector::sparse(23, &[(f(1), 2), (DELTA_INDEX, -1)]);
        let PairSearch::Found(pair) = lat.find_orthogonal_pair(&b, &d, 3).unwrap() else {
            panic!("expected a pair")
        };
        assert_eq!(pair.a, LatticeVector::basis(23, e(2)));
        assert_eq!(pair.l, LatticeVector::basis(23, f(2)));
        assert!(pair.verify(&lat, &b, &d));

        let b = LatticeVector::basis(23, e(1));
        let d = LatticeVector::basis(23, f(1));
        let PairSearch::Found(pair) = lat.find_orthogonal_pair(&b, &d, 3).unwrap() else {
            panic!("expected a pair")
        };
        assert_eq!(pair.a, LatticeVector::basis(23, e(2)));
        assert_eq!(pair.l, LatticeVector::basis(23, f(2)));

        let b = LatticeVector::sparse(23, &[(e(1), 1), (e(2), 1)]);
        let d = LatticeVector::sparse(23, &[(f(1), 1), (f(2), 2)]);
        let PairSearch::Found(pair) = lat.find_orthogonal_pair(&b, &d, 3).unwrap() else {
            panic!("expected a pair")
        };
        assert_eq!(lat.pairing(&pair.a, &b).unwrap(), BigInt::zero());
        assert_eq!(lat.pairing(&pair.a, &d).unwrap(), BigInt::zero());
        assert_eq!(lat.pairing(&pair.l, &b).unwrap(), BigInt::zero());
        assert_eq!(lat.pairing(&pair.l, &d).unwrap(), BigInt::zero());
        assert_eq!(lat.pairing(&pair.l, &pair.a).unwrap(), BigInt::one());
    }

    #[test]
    fn orthogonal_pair_kernel_search() {
        let lat = build_k3n_lattice(2).unwrap();
        // every hyperbolic plane touched
        let b = LatticeVector::sparse(23, &[(e(1), 1), (e(2), 1), (e(3), 1), (6, 1)]);
        let d = LatticeVector::sparse(23, &[(f(1), 1), (f(2), 3), (f(3), -1), (DELTA_INDEX, 1)]);
        match lat.find_orthogonal_pair(&b, &d, 2).unwrap() {
            PairSearch::Found(pair) => assert!(pair.verify(&lat, &b, &d)),
            PairSearch::BudgetExhausted { radius } => panic!("exhausted at {radius}"),
        }
        assert!(lat.find_orthogonal_pair(&b, &LatticeVector::zero(23), 2).is_err());
    }

    #[test]
    fn l1_sphere_counts() {
        let mut count = 0;
        for_each_l1_sphere(3, 2, &mut |_| {
            count += 1;
            false
        });
        // 6 vectors with a single +-2, 12 with two +-1
        assert_eq!(count, 18);
    }

    fn vector_strategy() -> impl Strategy<Value = LatticeVector> {
        proptest::collection::vec(-5i64..=5, 23).prop_map(|v| LatticeVector::from_i64(&v))
    }

    proptest! {
        #[test]
        fn pairing_is_bilinear(v in vector_strategy(), w in vector_strategy(), x in vector_strategy()) {
            let lat = build_k3n_lattice(3).unwrap();
            let lhs = lat.pairing(&v.add(&w), &x).unwrap();
            let rhs = lat.pairing(&v, &x).unwrap() + lat.pairing(&w, &x).unwrap();
            prop_assert_eq!(lhs, rhs);
            prop_assert_eq!(lat.pairing(&v, &x).unwrap(), lat.pairing(&x, &v).unwrap());
        }

        #[test]
        fn divisibility_scales(v in vector_strategy(), k in -7i64..=7) {
            prop_assume!(!v.is_zero() && k != 0);
            let lat = build_k3n_lattice(4).unwrap();
            let kv = v.scale(&BigInt::from(k));
            prop_assert_eq!(
                lat.divisibility(&kv).unwrap(),
                BigInt::from(k.abs()) * lat.divisibility(&v).unwrap()
            );
        }

        #[test]
        fn primitive_divisibility_divides_2n_minus_2(v in vector_strategy(), n in 2u32..=6) {
            prop_assume!(!v.is_zero());
            let c = v.content();
            let prim = LatticeVector(v.0.iter().map(|x| x / &c).collect());
            let lat = build_k3n_lattice(n).unwrap();
            prop_assert!(lemma21_check(&lat, n, &prim).unwrap());
        }
    }
}
