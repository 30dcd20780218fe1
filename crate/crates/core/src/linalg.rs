//! Exact rank and kernel computations over the rationals and prime fields.
//!
//! Integer matrices have the same rank over `Q` as over `Z`. Small ones go
//! through fraction-free (Bareiss) elimination; larger ones through modular
//! ranks over enough primes to exceed the Hadamard bound on their minors, so
//! the largest modular rank seen is the rational rank.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix<E> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<E>,
}

impl<E: Copy> Matrix<E> {
    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> E) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds a matrix whose columns are the given vectors of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<E>], zero: E) -> Self {
        let cols = columns.len();
        let mut data = vec![zero; rows * cols];
        for (j, col) in columns.iter().enumerate() {
            debug_assert_eq!(col.len(), rows);
            for (i, &v) in col.iter().enumerate() {
                data[i * cols + j] = v;
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn get(&self, i: usize, j: usize) -> E {
        self.data[i * self.cols + j]
    }
}

/// Min dimension at or below which [`rank_exact`] uses Bareiss elimination.
const BAREISS_LIMIT: usize = 6;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Primes below `2^31` in decreasing order.
pub fn primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let mut out = Vec::with_capacity(512);
        let mut n = (1u64 << 31) - 1;
        while out.len() < 512 {
            if is_prime(n) {
                out.push(n);
            }
            n -= 2;
        }
        out
    })
}

pub fn mod_pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

pub fn mod_inv(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    mod_pow(a, p - 2, p)
}

pub fn reduce_i128(v: i128, p: u64) -> u64 {
    v.rem_euclid(p as i128) as u64
}

/// Row echelon form in place; returns the pivot columns. Requires `p < 2^32`.
fn echelon_mod_p(data: &mut [u64], rows: usize, cols: usize, p: u64) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| data[i * cols + c] != 0) else {
            continue;
        };
        if pr != r {
            for j in c..cols {
                data.swap(pr * cols + j, r * cols + j);
            }
        }
        let inv = mod_inv(data[r * cols + c], p);
        for j in c..cols {
            data[r * cols + j] = data[r * cols + j] * inv % p;
        }
        let (head, tail) = data.split_at_mut((r + 1) * cols);
        let pivot_row = &head[r * cols..];
        for row in tail.chunks_mut(cols) {
            let f = row[c];
            if f == 0 {
                continue;
            }
            for j in c..cols {
                row[j] = (row[j] + (p - f) * pivot_row[j]) % p;
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Rank of a matrix with entries already reduced modulo `p`.
pub fn rank_mod_p(m: &Matrix<u64>, p: u64) -> usize {
    // Eliminate along the shorter side.
    if m.rows > m.cols {
        let mut t = transpose(m);
        return echelon_mod_p(&mut t.data, t.rows, t.cols, p).len();
    }
    let mut data = m.data.clone();
    echelon_mod_p(&mut data, m.rows, m.cols, p).len()
}

fn transpose<E: Copy>(m: &Matrix<E>) -> Matrix<E> {
    Matrix::from_fn(m.cols, m.rows, |i, j| m.get(j, i))
}

pub fn reduce_matrix(m: &Matrix<i128>, p: u64) -> Matrix<u64> {
    Matrix {
        rows: m.rows,
        cols: m.cols,
        data: m.data.iter().map(|&v| reduce_i128(v, p)).collect(),
    }
}

/// Basis of the right kernel modulo `p`.
pub fn kernel_mod_p(m: &Matrix<u64>, p: u64) -> Vec<Vec<u64>> {
    let mut data = m.data.clone();
    let pivots = echelon_mod_p(&mut data, m.rows, m.cols, p);
    // Back-substitute to reduced form.
    for (r, &c) in pivots.iter().enumerate().rev() {
        for above in 0..r {
            let f = data[above * m.cols + c];
            if f == 0 {
                continue;
            }
            for j in c..m.cols {
                data[above * m.cols + j] = (data[above * m.cols + j] + (p - f) * data[r * m.cols + j]) % p;
            }
        }
    }
    let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0u64; m.cols];
            v[f] = 1;
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = (p - data[r * m.cols + f]) % p;
            }
            v
        })
        .collect()
}

/// Fraction-free Gaussian elimination over the integers.
pub fn rank_bareiss(m: &Matrix<i128>) -> usize {
    let (rows, cols) = (m.rows, m.cols);
    let mut a: Vec<BigInt> = m.data.iter().map(|&v| BigInt::from(v)).collect();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !a[i * cols + c].is_zero()) else {
            continue;
        };
        if pr != r {
            for j in 0..cols {
                a.swap(pr * cols + j, r * cols + j);
            }
        }
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = (&a[r * cols + c] * &a[i * cols + j] - &a[i * cols + c] * &a[r * cols + j]) / &prev;
                a[i * cols + j] = v;
            }
            a[i * cols + c] = BigInt::zero();
        }
        prev = a[r * cols + c].clone();
        r += 1;
    }
    r
}

/// `log2` of a bound on the absolute value of every minor: the product of
/// the largest column (or row) Euclidean norms, whichever is smaller.
fn hadamard_log2(m: &Matrix<i128>) -> f64 {
    let k = m.rows.min(m.cols);
    let norms = |outer: usize, inner: usize, at: &dyn Fn(usize, usize) -> i128| -> f64 {
        let mut logs: Vec<f64> = (0..outer)
            .map(|o| (0..inner).map(|x| (at(o, x) as f64).powi(2)).sum::<f64>())
            .filter(|&s| s > 0.0)
            .map(|s| 0.5 * s.log2())
            .collect();
        logs.sort_by(|a, b| b.total_cmp(a));
        logs.iter().take(k).sum()
    };
    let by_cols = norms(m.cols, m.rows, &|c, r| m.get(r, c));
    let by_rows = norms(m.rows, m.cols, &|r, c| m.get(r, c));
    by_cols.min(by_rows)
}

/// Rational rank via modular ranks. `lower` is a rank already known to be
/// attained (e.g. from an earlier modular pass).
pub fn rank_multimodular(m: &Matrix<i128>, lower: usize) -> usize {
    let nonzero_cols = (0..m.cols).filter(|&c| (0..m.rows).any(|r| m.get(r, c) != 0)).count();
    let nonzero_rows = (0..m.rows).filter(|&r| (0..m.cols).any(|c| m.get(r, c) != 0)).count();
    let ceiling = nonzero_cols.min(nonzero_rows);
    let mut best = lower;
    if best >= ceiling {
        return ceiling;
    }
    let bound = hadamard_log2(m) + 1.0;
    let mut covered = 0.0;
    for &p in primes() {
        best = best.max(rank_mod_p(&reduce_matrix(m, p), p));
        if best >= ceiling {
            return ceiling;
        }
        covered += (p as f64).log2();
        if covered > bound {
            return best;
        }
    }
    panic!("prime table too short for Hadamard bound 2^{bound:.0}");
}

pub fn rank_exact(m: &Matrix<i128>) -> usize {
    if m.rows.min(m.cols) <= BAREISS_LIMIT {
        rank_bareiss(m)
    } else {
        rank_multimodular(m, 0)
    }
}

/// Basis of the right kernel over `Q`, scaled to primitive integer vectors.
pub fn kernel_rational(m: &Matrix<i128>) -> Vec<Vec<BigInt>> {
    let (rows, cols) = (m.rows, m.cols);
    let mut a: Vec<BigRational> = m.data.iter().map(|&v| BigRational::from_integer(v.into())).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !a[i * cols + c].is_zero()) else {
            continue;
        };
        for j in 0..cols {
            a.swap(pr * cols + j, r * cols + j);
        }
        let inv = a[r * cols + c].recip();
        for j in c..cols {
            a[r * cols + j] = &a[r * cols + j] * &inv;
        }
        for i in 0..rows {
            if i == r || a[i * cols + c].is_zero() {
                continue;
            }
            let f = a[i * cols + c].clone();
            for j in c..cols {
                let v = &a[i * cols + j] - &f * &a[r * cols + j];
                a[i * cols + j] = v;
            }
        }
        pivots.push(c);
        r += 1;
    }
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|f| {
            let mut v = vec![BigRational::zero(); cols];
            v[f] = BigRational::one();
            for (row, &c) in pivots.iter().enumerate() {
                v[c] = -a[row * cols + f].clone();
            }
            primitive(&v)
        })
        .collect()
}

fn primitive(v: &[BigRational]) -> Vec<BigInt> {
    use num_integer::Integer;
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

/// Narrows an exact integer to `i128`, failing on overflow.
pub fn to_i128(v: &BigInt) -> Option<i128> {
    if v.abs().bits() > 120 {
        return None;
    }
    v.to_i128()
}
