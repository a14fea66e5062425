//! Dense integer matrices over `BigInt`: Bareiss determinant, column echelon
//! form with a unimodular transform, integer kernels and Smith invariants.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type Matrix = Vec<Vec<BigInt>>;

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect()
}

pub fn from_i64(rows: &[&[i64]]) -> Matrix {
    rows.iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect()
}

pub fn transpose(m: &Matrix) -> Matrix {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len())
        .map(|j| m.iter().map(|row| row[j].clone()).collect())
        .collect()
}

pub fn mul(a: &Matrix, b: &Matrix) -> Matrix {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| {
            debug_assert_eq!(row.len(), inner);
            (0..cols)
                .map(|j| {
                    row.iter()
                        .zip(b.iter())
                        .fold(BigInt::zero(), |acc, (x, brow)| acc + x * &brow[j])
                })
                .collect()
        })
        .collect()
}

pub fn mul_vec(a: &Matrix, v: &[BigInt]) -> Vec<BigInt> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .fold(BigInt::zero(), |acc, (x, y)| acc + x * y)
        })
        .collect()
}

/// Determinant by fraction-free Gaussian elimination. Panics on non-square input.
pub fn determinant(m: &Matrix) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    assert!(m.iter().all(|r| r.len() == n), "determinant of a non-square matrix");
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Column echelon form: returns `(h, v)` with `m * v = h`, `v` unimodular,
/// and the nonzero columns of `h` occupying a prefix `0..rank`.
pub fn column_echelon(m: &Matrix) -> (Matrix, Matrix, usize) {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut h = m.clone();
    let mut v = identity(cols);
    let mut pivot = 0;
    for r in 0..rows {
        if pivot == cols {
            break;
        }
        for j in pivot + 1..cols {
            if h[r][j].is_zero() {
                continue;
            }
            let a = h[r][pivot].clone();
            let b = h[r][j].clone();
            let ext = a.extended_gcd(&b);
            let (x, y) = (ext.x, ext.y);
            let (ap, bp) = (&a / &ext.gcd, &b / &ext.gcd);
            combine_columns(&mut h, pivot, j, &x, &y, &bp, &ap);
            combine_columns(&mut v, pivot, j, &x, &y, &bp, &ap);
        }
        if !h[r][pivot].is_zero() {
            if h[r][pivot].is_negative() {
                negate_column(&mut h, pivot);
                negate_column(&mut v, pivot);
            }
            pivot += 1;
        }
    }
    (h, v, pivot)
}

// (col_p, col_j) <- (x*col_p + y*col_j, -bp*col_p + ap*col_j); determinant x*ap + y*bp = 1.
fn combine_columns(
    m: &mut Matrix,
    p: usize,
    j: usize,
    x: &BigInt,
    y: &BigInt,
    bp: &BigInt,
    ap: &BigInt,
) {
    for row in m.iter_mut() {
        let cp = row[p].clone();
        let cj = row[j].clone();
        row[p] = x * &cp + y * &cj;
        row[j] = ap * &cj - bp * &cp;
    }
}

fn negate_column(m: &mut Matrix, c: usize) {
    for row in m.iter_mut() {
        row[c] = -row[c].clone();
    }
}

/// A basis of `{ v in Z^cols : m v = 0 }`. The returned sublattice is saturated.
pub fn integer_kernel(m: &Matrix, cols: usize) -> Vec<Vec<BigInt>> {
    if m.is_empty() {
        return identity(cols);
    }
    let (_, v, rank) = column_echelon(m);
    let mut basis: Vec<Vec<BigInt>> = (rank..cols)
        .map(|c| v.iter().map(|row| row[c].clone()).collect())
        .collect();
    size_reduce(&mut basis);
    basis
}

// Cheap pairwise reduction keeping the span; keeps coordinates small enough
// to be readable in certificates.
fn size_reduce(basis: &mut [Vec<BigInt>]) {
    let norm = |v: &[BigInt]| -> BigInt { v.iter().fold(BigInt::zero(), |acc, x| acc + x * x) };
    for _ in 0..4 {
        let mut changed = false;
        for i in 0..basis.len() {
            for j in 0..basis.len() {
                if i == j {
                    continue;
                }
                let nj = norm(&basis[j]);
                if nj.is_zero() {
                    continue;
                }
                let dot: BigInt = basis[i]
                    .iter()
                    .zip(&basis[j])
                    .fold(BigInt::zero(), |acc, (a, b)| acc + a * b);
                // nearest integer to dot / nj
                let two = BigInt::from(2);
                let q = (&dot * &two + &nj).div_floor(&(&nj * &two));
                if q.is_zero() {
                    continue;
                }
                let candidate: Vec<BigInt> = basis[i]
                    .iter()
                    .zip(&basis[j])
                    .map(|(a, b)| a - &q * b)
                    .collect();
                if norm(&candidate) < norm(&basis[i]) {
                    basis[i] = candidate;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
}

/// Nonzero Smith invariant factors `d_1 | d_2 | ...`, all positive.
pub fn smith_invariants(m: &Matrix) -> Vec<BigInt> {
    let mut a = m.clone();
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut diag = Vec::new();
    for t in 0..rows.min(cols) {
        // smallest nonzero entry of the trailing block becomes the pivot
        let Some((pi, pj)) = min_entry(&a, t) else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                for j in t..cols {
                    let v = &a[i][j] - &q * &a[t][j];
                    a[i][j] = v;
                }
                if !a[i][t].is_zero() {
                    a.swap(t, i);
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                for row in a.iter_mut().skip(t) {
                    let v = &row[j] - &q * &row[t];
                    row[j] = v;
                }
                if !a[t][j].is_zero() {
                    for row in a.iter_mut() {
                        row.swap(t, j);
                    }
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // row and column cleared; enforce divisibility on the rest
            let bad = (t + 1..rows)
                .find(|&i| (t + 1..cols).any(|j| !(&a[i][j] % &a[t][t]).is_zero()));
            match bad {
                Some(i) => {
                    for j in t..cols {
                        let v = &a[t][j] + &a[i][j];
                        a[t][j] = v;
                    }
                }
                None => break,
            }
        }
        diag.push(a[t][t].abs());
    }
    diag
}

fn min_entry(a: &Matrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (i, row) in a.iter().enumerate().skip(t) {
        for (j, x) in row.iter().enumerate().skip(t) {
            if x.is_zero() {
                continue;
            }
            match best {
                Some((bi, bj)) if a[bi][bj].abs() <= x.abs() => {}
                _ => best = Some((i, j)),
            }
        }
    }
    best
}
