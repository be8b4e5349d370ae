//! Exact rational vectors and matrices.
//!
//! Everything here is backed by [`BigRational`], so no rounding ever
//! happens: equality and hashing are sound, which the group closures and
//! root-system axiom checks rely on.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type Rational = BigRational;

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("cannot parse {0:?} as a rational number")]
    Parse(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("{0} does not fit in a 64-bit [num, den] pair")]
    Overflow(String),
    #[error("zero denominator")]
    ZeroDenominator,
}

/// Integer as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `num / den` as a rational.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn is_integer(x: &Rational) -> bool {
    x.denom().is_one()
}

pub fn parse_rational(s: &str) -> Result<Rational, ExactError> {
    let s = s.trim();
    let bad = || ExactError::Parse(s.to_string());
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(ExactError::ZeroDenominator);
        }
        Ok(Rational::new(n, d))
    } else if let Some((whole, frac)) = s.split_once('.') {
        // decimal literal, e.g. "0.25"
        let negative = whole.trim_start().starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), frac);
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        let v = Rational::new(n, d);
        Ok(if negative { -v } else { v })
    } else {
        let n: BigInt = s.parse().map_err(|_| bad())?;
        Ok(Rational::from_integer(n))
    }
}

pub fn format_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// `[num, den]` JSON encoding of a rational.
pub fn rational_to_pair(x: &Rational) -> Result<[i64; 2], ExactError> {
    let n = x.numer().to_i64();
    let d = x.denom().to_i64();
    match (n, d) {
        (Some(n), Some(d)) => Ok([n, d]),
        _ => Err(ExactError::Overflow(format_rational(x))),
    }
}

pub fn rational_from_pair(pair: [i64; 2]) -> Result<Rational, ExactError> {
    if pair[1] == 0 {
        return Err(ExactError::ZeroDenominator);
    }
    Ok(ratio(pair[0], pair[1]))
}

/// Vector with rational coordinates in a Euclidean space.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ExactVector {
    coords: Vec<Rational>,
}

impl ExactVector {
    pub fn new(coords: Vec<Rational>) -> Self {
        Self { coords }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { coords: vec![Rational::zero(); dim] }
    }

    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.coords[i] = Rational::one();
        v
    }

    pub fn from_ints(xs: &[i64]) -> Self {
        Self { coords: xs.iter().map(|&x| int(x)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<Rational> {
        self.coords
    }

    pub fn dot(&self, other: &ExactVector) -> Rational {
        debug_assert_eq!(self.dim(), other.dim());
        self.coords
            .iter()
            .zip(&other.coords)
            .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
    }

    pub fn norm_sq(&self) -> Rational {
        self.dot(self)
    }

    pub fn scale(&self, s: &Rational) -> ExactVector {
        ExactVector { coords: self.coords.iter().map(|c| c * s).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    /// Positive in the lexicographic order: first nonzero coordinate is > 0.
    pub fn is_positive(&self) -> bool {
        self.coords
            .iter()
            .find(|c| !c.is_zero())
            .is_some_and(|c| c.is_positive())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coords.iter().map(to_f64).collect()
    }

    /// Indices (0-based) of nonzero coordinates.
    pub fn support(&self) -> Vec<usize> {
        self.coords
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, _)| i)
            .collect()
    }

    /// Scalar `a` with `self = a * other`, if the two are parallel.
    pub fn ratio_to(&self, other: &ExactVector) -> Option<Rational> {
        let i = other.coords.iter().position(|c| !c.is_zero())?;
        let a = &self.coords[i] / &other.coords[i];
        (other.scale(&a) == *self).then_some(a)
    }

    pub fn padded(&self, dim: usize) -> ExactVector {
        let mut coords = self.coords.clone();
        coords.resize(dim, Rational::zero());
        ExactVector { coords }
    }
}

impl fmt::Display for ExactVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(format_rational).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl FromStr for ExactVector {
    type Err = ExactError;

    /// Comma-separated rationals, e.g. `"1,-1/2,0"`; surrounding
    /// parentheses are allowed.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        if inner.trim().is_empty() {
            return Ok(ExactVector::new(Vec::new()));
        }
        inner
            .split(',')
            .map(parse_rational)
            .collect::<Result<Vec<_>, _>>()
            .map(ExactVector::new)
    }
}

impl Add for &ExactVector {
    type Output = ExactVector;
    fn add(self, rhs: &ExactVector) -> ExactVector {
        ExactVector { coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &ExactVector {
    type Output = ExactVector;
    fn sub(self, rhs: &ExactVector) -> ExactVector {
        ExactVector { coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &ExactVector {
    type Output = ExactVector;
    fn neg(self) -> ExactVector {
        ExactVector { coords: self.coords.iter().map(|a| -a).collect() }
    }
}

impl Serialize for ExactVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let pairs = self
            .coords
            .iter()
            .map(rational_to_pair)
            .collect::<Result<Vec<_>, _>>()
            .map_err(serde::ser::Error::custom)?;
        pairs.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ExactVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let pairs = Vec::<[i64; 2]>::deserialize(deserializer)?;
        pairs
            .into_iter()
            .map(rational_from_pair)
            .collect::<Result<Vec<_>, _>>()
            .map(ExactVector::new)
            .map_err(serde::de::Error::custom)
    }
}

/// Dense square-or-rectangular rational matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, ExactError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(ExactError::Dimension { expected: c, got: row.len() });
            }
            data.extend(row);
        }
        Ok(Self { rows: r, cols: c, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> ExactMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let v = self.get(i, j);
                    if i == j { v.is_one() } else { v.is_zero() }
                })
            })
    }

    /// `self * self^T == I`, checked exactly.
    pub fn is_orthogonal(&self) -> bool {
        (self * &self.transpose()).is_identity()
    }

    pub fn mul_vec(&self, v: &ExactVector) -> ExactVector {
        debug_assert_eq!(self.cols, v.dim());
        ExactVector::new(
            (0..self.rows)
                .map(|i| {
                    self.row(i)
                        .iter()
                        .zip(v.coords())
                        .filter(|(a, _)| !a.is_zero())
                        .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
                })
                .collect(),
        )
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).iter().map(to_f64).collect()).collect()
    }
}

impl Mul for &ExactMatrix {
    type Output = ExactMatrix;
    fn mul(self, rhs: &ExactMatrix) -> ExactMatrix {
        debug_assert_eq!(self.cols, rhs.rows);
        let mut out = ExactMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out.data[i * rhs.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }
}

/// Solution set `{particular + span(kernel)}` of a linear system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineSolution {
    pub particular: Vec<Rational>,
    pub kernel: Vec<Vec<Rational>>,
}

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(m: &mut [Vec<Rational>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(vectors: &[ExactVector]) -> usize {
    let mut m: Vec<Vec<Rational>> = vectors.iter().map(|v| v.coords().to_vec()).collect();
    rref(&mut m).len()
}

/// Solves `a x = b` exactly. `None` when inconsistent.
pub fn solve(a: &[Vec<Rational>], b: &[Rational], unknowns: usize) -> Option<AffineSolution> {
    let mut aug: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.contains(&unknowns) {
        return None;
    }
    let mut particular = vec![Rational::zero(); unknowns];
    for (r, &c) in pivots.iter().enumerate() {
        particular[c] = aug[r][unknowns].clone();
    }
    let free: Vec<usize> = (0..unknowns).filter(|c| !pivots.contains(c)).collect();
    let kernel = free
        .iter()
        .map(|&f| {
            let mut k = vec![Rational::zero(); unknowns];
            k[f] = Rational::one();
            for (r, &c) in pivots.iter().enumerate() {
                k[c] = -aug[r][f].clone();
            }
            k
        })
        .collect();
    Some(AffineSolution { particular, kernel })
}

/// Orthogonal (not normalised) basis of `span(vectors)` via Gram-Schmidt.
/// Returns `None` when the input is linearly dependent.
pub fn gram_schmidt(vectors: &[ExactVector]) -> Option<Vec<ExactVector>> {
    let mut out: Vec<ExactVector> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        for u in &out {
            let c = v.dot(u) / u.norm_sq();
            w = &w - &u.scale(&c);
        }
        if w.is_zero() {
            return None;
        }
        out.push(w);
    }
    Some(out)
}

/// Orthogonal projection onto the span of an orthogonal basis.
pub fn project(v: &ExactVector, orthogonal_basis: &[ExactVector]) -> ExactVector {
    let mut out = ExactVector::zeros(v.dim());
    for u in orthogonal_basis {
        let c = v.dot(u) / u.norm_sq();
        out = &out + &u.scale(&c);
    }
    out
}

/// A basis (subset of the input) of the span of `vectors`.
pub fn independent_subset(vectors: &[ExactVector]) -> Vec<ExactVector> {
    let mut basis: Vec<ExactVector> = Vec::new();
    for v in vectors {
        let mut trial = basis.clone();
        trial.push(v.clone());
        if rank(&trial) == trial.len() {
            basis = trial;
        }
    }
    basis
}

/// Integer row-style Hermite reduction: a Z-basis of the lattice spanned by
/// the integer rows.
pub fn integer_row_basis(rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let mut m: Vec<Vec<BigInt>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut basis = Vec::new();
    for c in 0..cols {
        // Euclid on column c among remaining rows
        loop {
            let nonzero: Vec<usize> = (0..m.len()).filter(|&i| !m[i][c].is_zero()).collect();
            if nonzero.len() <= 1 {
                break;
            }
            let p = *nonzero.iter().min_by_key(|&&i| m[i][c].abs()).unwrap();
            let pivot = m[p][c].clone();
            for &i in &nonzero {
                if i != p {
                    let q = num_integer::Integer::div_floor(&m[i][c], &pivot);
                    let pr = m[p].clone();
                    for (x, y) in m[i].iter_mut().zip(&pr) {
                        *x -= &q * y;
                    }
                }
            }
        }
        if let Some(p) = (0..m.len()).find(|&i| !m[i][c].is_zero()) {
            basis.push(m.remove(p));
        }
    }
    basis
}

/// Clears denominators of a family of rational vectors by one common factor.
pub fn common_denominator(vectors: &[ExactVector]) -> BigInt {
    vectors
        .iter()
        .flat_map(|v| v.coords().iter())
        .fold(BigInt::one(), |acc, x| num_integer::Integer::lcm(&acc, x.denom()))
}
