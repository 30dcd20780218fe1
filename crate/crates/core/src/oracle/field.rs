use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

/// The field the oracle computes over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExactField {
    Rationals,
    Prime(u64),
}

/// `2^31 − 1`.
pub const DEFAULT_PRIME: u64 = 2_147_483_647;

/// Schemes with more points than this default to [`DEFAULT_PRIME`].
pub const RATIONAL_POINT_LIMIT: usize = 30;

impl ExactField {
    pub fn default_for(points: usize) -> Self {
        if points <= RATIONAL_POINT_LIMIT {
            ExactField::Rationals
        } else {
            ExactField::Prime(DEFAULT_PRIME)
        }
    }
}

impl fmt::Display for ExactField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactField::Rationals => f.write_str("rationals"),
            ExactField::Prime(p) => write!(f, "GF({p})"),
        }
    }
}

impl FromStr for ExactField {
    type Err = Error;

    /// Accepts `rationals`/`q` or a prime, optionally written `p=…` or `GF(…)`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        if t == "rationals" || t == "q" {
            return Ok(ExactField::Rationals);
        }
        let digits = t
            .strip_prefix("p=")
            .or_else(|| t.strip_prefix("gf(").and_then(|r| r.strip_suffix(')')))
            .unwrap_or(&t);
        digits
            .parse::<u64>()
            .map(ExactField::Prime)
            .map_err(|_| Error::BadField(format!("cannot parse field {s:?}")))
    }
}

/// Exact arithmetic used to build and reduce evaluation matrices.
pub(crate) trait Backend: Sync {
    type E: Copy + Send + Sync + PartialEq + fmt::Debug;

    fn zero(&self) -> Self::E;
    fn one(&self) -> Self::E;
    fn int(&self, v: i64) -> Self::E;
    fn add(&self, a: Self::E, b: Self::E) -> Result<Self::E>;
    fn mul(&self, a: Self::E, b: Self::E) -> Result<Self::E>;
    fn neg(&self, a: Self::E) -> Self::E;
    fn is_zero(&self, a: Self::E) -> bool;

    fn rank(&self, m: &Matrix<Self::E>) -> usize;
    /// A rank that is a lower bound for the true one, and whether it is known
    /// to be exact.
    fn quick_rank(&self, m: &Matrix<Self::E>) -> (usize, bool);
    /// Exact rank given an attained lower bound.
    fn rank_from(&self, m: &Matrix<Self::E>, lower: usize) -> usize;
    fn kernel(&self, m: &Matrix<Self::E>) -> Result<Vec<Vec<Self::E>>>;

    fn sub(&self, a: Self::E, b: Self::E) -> Result<Self::E> {
        self.add(a, self.neg(b))
    }

    /// Homogeneous coordinates `[den : num]` of an affine parameter.
    fn point(&self, t: Rational64) -> Result<(Self::E, Self::E)>;
}

/// Integers standing in for the rationals (all forms have integer values on
/// primitive integer representatives).
pub(crate) struct Integers;

impl Backend for Integers {
    type E = i128;

    fn zero(&self) -> i128 {
        0
    }
    fn one(&self) -> i128 {
        1
    }
    fn int(&self, v: i64) -> i128 {
        v as i128
    }
    fn add(&self, a: i128, b: i128) -> Result<i128> {
        a.checked_add(b).ok_or(Error::Overflow)
    }
    fn mul(&self, a: i128, b: i128) -> Result<i128> {
        a.checked_mul(b).ok_or(Error::Overflow)
    }
    fn neg(&self, a: i128) -> i128 {
        -a
    }
    fn is_zero(&self, a: i128) -> bool {
        a == 0
    }

    fn rank(&self, m: &Matrix<i128>) -> usize {
        linalg::rank_exact(m)
    }

    fn quick_rank(&self, m: &Matrix<i128>) -> (usize, bool) {
        let p = DEFAULT_PRIME;
        (linalg::rank_mod_p(&linalg::reduce_matrix(m, p), p), false)
    }

    fn rank_from(&self, m: &Matrix<i128>, lower: usize) -> usize {
        linalg::rank_multimodular(m, lower)
    }

    fn kernel(&self, m: &Matrix<i128>) -> Result<Vec<Vec<i128>>> {
        linalg::kernel_rational(m)
            .iter()
            .map(|v| v.iter().map(|x| linalg::to_i128(x).ok_or(Error::Overflow)).collect())
            .collect()
    }

    fn point(&self, t: Rational64) -> Result<(i128, i128)> {
        Ok((*t.denom() as i128, *t.numer() as i128))
    }
}

pub(crate) struct ModP(pub u64);

impl ModP {
    pub(crate) fn checked(p: u64, points: usize) -> Result<Self> {
        if p >= 1 << 32 {
            return Err(Error::BadField(format!("{p} must be below 2^32")));
        }
        if !linalg::is_prime(p) {
            return Err(Error::BadField(format!("{p} is not prime")));
        }
        if p as usize <= points {
            return Err(Error::BadField(format!("{p} does not exceed the {points} points")));
        }
        Ok(ModP(p))
    }
}

impl Backend for ModP {
    type E = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn int(&self, v: i64) -> u64 {
        v.rem_euclid(self.0 as i64) as u64
    }
    fn add(&self, a: u64, b: u64) -> Result<u64> {
        Ok((a + b) % self.0)
    }
    fn mul(&self, a: u64, b: u64) -> Result<u64> {
        Ok(a * b % self.0)
    }
    fn neg(&self, a: u64) -> u64 {
        (self.0 - a) % self.0
    }
    fn is_zero(&self, a: u64) -> bool {
        a == 0
    }

    fn rank(&self, m: &Matrix<u64>) -> usize {
        linalg::rank_mod_p(m, self.0)
    }

    fn quick_rank(&self, m: &Matrix<u64>) -> (usize, bool) {
        (self.rank(m), true)
    }

    fn rank_from(&self, m: &Matrix<u64>, _lower: usize) -> usize {
        self.rank(m)
    }

    fn kernel(&self, m: &Matrix<u64>) -> Result<Vec<Vec<u64>>> {
        Ok(linalg::kernel_mod_p(m, self.0))
    }

    fn point(&self, t: Rational64) -> Result<(u64, u64)> {
        let den = self.int(*t.denom());
        if den == 0 {
            return Err(Error::BadField(format!("parameter {t} has no value modulo {}", self.0)));
        }
        Ok((den, self.int(*t.numer())))
    }
}
