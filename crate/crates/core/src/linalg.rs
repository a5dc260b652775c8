//! Exact integer and rational linear algebra.
//!
//! Everything here works over arbitrary-precision integers ([`BigInt`]) and
//! rationals ([`BigRational`]). There is no floating point anywhere in the
//! crate; geometric predicates are decided exactly.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Int = BigInt;
pub type Rat = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("zero vector has no primitive generator")]
    ZeroVector,
    #[error("not a simplicial generator set")]
    NotSimplicial,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("malformed rational {0:?}")]
    BadRational(String),
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}

pub fn rat_from_int(n: &Int) -> Rat {
    Rat::from_integer(n.clone())
}

/// Canonical `"p/q"` rendering (q > 0, gcd 1). Integers keep the `/1`.
pub fn format_rational(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(s: &str) -> Result<Rat, LinalgError> {
    let bad = || LinalgError::BadRational(s.to_string());
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: Int = n.parse().map_err(|_| bad())?;
    let d: Int = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rat::new(n, d))
}

/// A point of the ambient lattice `Z^k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeVector(Vec<Int>);

impl LatticeVector {
    pub fn new(coords: Vec<Int>) -> Self {
        LatticeVector(coords)
    }

    pub fn from_i64(coords: &[i64]) -> Self {
        LatticeVector(coords.iter().map(|&c| Int::from(c)).collect())
    }

    pub fn zero(dim: usize) -> Self {
        LatticeVector(vec![Int::zero(); dim])
    }

    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = Self::zero(dim);
        v.0[i] = Int::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Int] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<Int> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn content(&self) -> Int {
        self.0.iter().fold(Int::zero(), |g, c| g.gcd(c))
    }

    pub fn scale(&self, s: &Int) -> Self {
        LatticeVector(self.0.iter().map(|c| c * s).collect())
    }

    pub fn to_rational(&self) -> RationalVector {
        RationalVector(self.0.iter().map(rat_from_int).collect())
    }

    pub fn is_primitive(&self) -> bool {
        self.content().is_one()
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl Add for &LatticeVector {
    type Output = LatticeVector;
    fn add(self, rhs: &LatticeVector) -> LatticeVector {
        LatticeVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &LatticeVector {
    type Output = LatticeVector;
    fn sub(self, rhs: &LatticeVector) -> LatticeVector {
        LatticeVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &LatticeVector {
    type Output = LatticeVector;
    fn neg(self) -> LatticeVector {
        LatticeVector(self.0.iter().map(|a| -a).collect())
    }
}

/// A point of `Q^k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalVector(Vec<Rat>);

impl RationalVector {
    pub fn new(coords: Vec<Rat>) -> Self {
        RationalVector(coords)
    }

    pub fn zero(dim: usize) -> Self {
        RationalVector(vec![Rat::zero(); dim])
    }

    pub fn from_i64(coords: &[i64]) -> Self {
        RationalVector(coords.iter().map(|&c| rat(c, 1)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Rat] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, s: &Rat) -> Self {
        RationalVector(self.0.iter().map(|c| c * s).collect())
    }

    pub fn add_scaled(&self, s: &Rat, other: &RationalVector) -> Self {
        RationalVector(self.0.iter().zip(&other.0).map(|(a, b)| a + s * b).collect())
    }

    pub fn dot(&self, other: &RationalVector) -> Rat {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    /// Returns the lattice vector when every coordinate is integral.
    pub fn to_lattice(&self) -> Option<LatticeVector> {
        self.0.iter().map(|c| c.is_integer().then(|| c.to_integer())).collect::<Option<Vec<_>>>().map(LatticeVector)
    }

    /// The primitive lattice vector on the ray through `self`.
    pub fn primitive_direction(&self) -> Result<LatticeVector, LinalgError> {
        let lcm = self.0.iter().fold(Int::one(), |l, c| l.lcm(c.denom()));
        let cleared = LatticeVector(self.0.iter().map(|c| (c * rat_from_int(&lcm)).to_integer()).collect());
        primitive(&cleared)
    }
}

impl fmt::Display for RationalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl Add for &RationalVector {
    type Output = RationalVector;
    fn add(self, rhs: &RationalVector) -> RationalVector {
        RationalVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &RationalVector {
    type Output = RationalVector;
    fn sub(self, rhs: &RationalVector) -> RationalVector {
        RationalVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

/// Divides out the gcd of the coordinates.
pub fn primitive(v: &LatticeVector) -> Result<LatticeVector, LinalgError> {
    if v.is_zero() {
        return Err(LinalgError::ZeroVector);
    }
    let g = v.content();
    Ok(LatticeVector(v.0.iter().map(|c| c / &g).collect()))
}

/// Dense rational matrix, row major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Rat::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, Vec::len);
        for r in &rows {
            if r.len() != cols {
                return Err(LinalgError::DimensionMismatch { expected: cols, found: r.len() });
            }
        }
        let n = rows.len();
        Ok(RationalMatrix { rows: n, cols, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Result<Self, LinalgError> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&c| rat(c, 1)).collect()).collect())
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[RationalVector], dim: usize) -> Self {
        let mut m = Self::zeros(dim, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for i in 0..dim {
                m.data[i * cols.len() + j] = c.0[i].clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> RationalVector {
        RationalVector(self.data[i * self.cols..(i + 1) * self.cols].to_vec())
    }

    pub fn mul_vec(&self, v: &RationalVector) -> Result<RationalVector, LinalgError> {
        if v.dim() != self.cols {
            return Err(LinalgError::DimensionMismatch { expected: self.cols, found: v.dim() });
        }
        Ok(RationalVector((0..self.rows).map(|i| self.row(i).dot(v)).collect()))
    }

    pub fn mul(&self, other: &RationalMatrix) -> Result<RationalMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let s: Rat = (0..self.cols).map(|t| self.get(i, t) * other.get(t, j)).sum();
                out.set(i, j, s);
            }
        }
        Ok(out)
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.row_reduce().len()
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    fn row_reduce(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            self.swap_rows(r, p);
            let inv = self.get(r, c).recip();
            for j in 0..self.cols {
                let v = self.get(r, j) * &inv;
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i != r && !self.get(i, c).is_zero() {
                    let f = self.get(i, c).clone();
                    for j in 0..self.cols {
                        let v = self.get(i, j) - &f * self.get(r, j);
                        self.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    /// Basis of the right null space `{x : A x = 0}`.
    pub fn null_space(&self) -> Vec<RationalVector> {
        let mut m = self.clone();
        let pivots = m.row_reduce();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut x = vec![Rat::zero(); self.cols];
                x[f] = Rat::one();
                for (r, &p) in pivots.iter().enumerate() {
                    x[p] = -m.get(r, f).clone();
                }
                RationalVector(x)
            })
            .collect()
    }

    pub fn inverse(&self) -> Option<RationalMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, Rat::one());
        }
        let pivots = aug.row_reduce();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, aug.get(i, n + j).clone());
            }
        }
        Some(inv)
    }
}

/// Outcome of [`solve_rational_system`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solution {
    Unique(RationalVector),
    /// Consistent but underdetermined: one particular solution (free
    /// variables set to zero) and the dimension of the solution space.
    Parametrized {
        particular: RationalVector,
        nullity: usize,
    },
    Inconsistent,
}

impl Solution {
    pub fn unique(self) -> Option<RationalVector> {
        match self {
            Solution::Unique(v) => Some(v),
            _ => None,
        }
    }
}

/// Solves `A x = b` exactly. Rows are scaled to integers and reduced by
/// Bareiss fraction-free elimination; only the final back substitution
/// divides.
pub fn solve_rational_system(a: &RationalMatrix, b: &RationalVector) -> Result<Solution, LinalgError> {
    if b.dim() != a.rows {
        return Err(LinalgError::DimensionMismatch { expected: a.rows, found: b.dim() });
    }
    let (m, n) = (a.rows, a.cols);
    // integer augmented matrix [A | b]
    let mut rows: Vec<Vec<Int>> = (0..m)
        .map(|i| {
            let mut r: Vec<Rat> = a.row(i).0;
            r.push(b.0[i].clone());
            let l = r.iter().fold(Int::one(), |l, c| l.lcm(c.denom()));
            r.iter().map(|c| (c * rat_from_int(&l)).to_integer()).collect()
        })
        .collect();

    let mut pivots: Vec<usize> = Vec::new();
    let mut prev = Int::one();
    let mut r = 0;
    for c in 0..n {
        if r == m {
            break;
        }
        let Some(p) = (r..m).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        for i in r + 1..m {
            for j in (c + 1)..=n {
                let v = (&rows[r][c] * &rows[i][j] - &rows[i][c] * &rows[r][j]) / &prev;
                rows[i][j] = v;
            }
            rows[i][c] = Int::zero();
        }
        prev = rows[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    if rows[r..].iter().any(|row| !row[n].is_zero()) {
        return Ok(Solution::Inconsistent);
    }
    let mut x = vec![Rat::zero(); n];
    for (ri, &pc) in pivots.iter().enumerate().rev() {
        let mut acc = rat_from_int(&rows[ri][n]);
        for j in pc + 1..n {
            acc -= rat_from_int(&rows[ri][j]) * &x[j];
        }
        x[pc] = acc / rat_from_int(&rows[ri][pc]);
    }
    let x = RationalVector(x);
    if pivots.len() == n {
        Ok(Solution::Unique(x))
    } else {
        Ok(Solution::Parametrized { particular: x, nullity: n - pivots.len() })
    }
}

/// Dense integer matrix used for Smith normal form computations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Int>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![Int::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Int::one();
        }
        m
    }

    /// Matrix whose columns are the given vectors (all of dimension `dim`).
    pub fn from_columns(cols: &[LatticeVector], dim: usize) -> Self {
        let mut m = Self::zeros(dim, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for i in 0..dim {
                m.data[i * cols.len() + j] = c.0[i].clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Int {
        &self.data[i * self.cols + j]
    }

    fn at(&mut self, i: usize, j: usize) -> &mut Int {
        &mut self.data[i * self.cols + j]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += f * row[src]
    fn add_row(&mut self, dst: usize, src: usize, f: &Int) {
        for j in 0..self.cols {
            let v = self.get(src, j) * f;
            *self.at(dst, j) += v;
        }
    }

    /// col[dst] += f * col[src]
    fn add_col(&mut self, dst: usize, src: usize, f: &Int) {
        for i in 0..self.rows {
            let v = self.get(i, src) * f;
            *self.at(i, dst) += v;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = -self.get(r, j).clone();
            *self.at(r, j) = v;
        }
    }

    pub fn to_rational(&self) -> RationalMatrix {
        RationalMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(rat_from_int).collect() }
    }
}

/// `left * input * right == diag(divisors)` with `left`, `right` unimodular
/// and each divisor dividing the next.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub left: IntMatrix,
    pub right: IntMatrix,
    pub divisors: Vec<Int>,
}

pub fn smith_normal_form(a: &IntMatrix) -> SmithForm {
    let (m, n) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut left = IntMatrix::identity(m);
    let mut right = IntMatrix::identity(n);
    let mut divisors = Vec::new();
    for t in 0..m.min(n) {
        loop {
            // smallest nonzero entry of the trailing block becomes the pivot
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    let v = d.get(i, j);
                    if !v.is_zero() && best.is_none_or(|(bi, bj)| v.abs() < d.get(bi, bj).abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return SmithForm { left, right, divisors };
            };
            d.swap_rows(t, pi);
            left.swap_rows(t, pi);
            d.swap_cols(t, pj);
            right.swap_cols(t, pj);

            let mut clean = true;
            for i in t + 1..m {
                let q = d.get(i, t).div_floor(d.get(t, t));
                if !q.is_zero() {
                    d.add_row(i, t, &-q.clone());
                    left.add_row(i, t, &-q);
                }
                if !d.get(i, t).is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..n {
                let q = d.get(t, j).div_floor(d.get(t, t));
                if !q.is_zero() {
                    d.add_col(j, t, &-q.clone());
                    right.add_col(j, t, &-q);
                }
                if !d.get(t, j).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // pivot must divide the rest of the block
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !d.get(i, j).is_multiple_of(d.get(t, t))));
            match bad {
                Some(i) => {
                    d.add_row(t, i, &Int::one());
                    left.add_row(t, i, &Int::one());
                }
                None => break,
            }
        }
        if d.get(t, t).is_negative() {
            d.negate_row(t);
            left.negate_row(t);
        }
        divisors.push(d.get(t, t).clone());
    }
    SmithForm { left, right, divisors }
}

/// Nonzero elementary divisors of the lattice generated by `vs`.
pub fn elementary_divisors(vs: &[LatticeVector]) -> Vec<Int> {
    let Some(dim) = vs.first().map(LatticeVector::dim) else {
        return Vec::new();
    };
    smith_normal_form(&IntMatrix::from_columns(vs, dim)).divisors
}

/// Index of the sublattice generated by `vs` inside the saturated lattice
/// `span(vs) ∩ Z^k`. Requires linearly independent input.
pub fn lattice_index(vs: &[LatticeVector]) -> Result<Int, LinalgError> {
    check_independent(vs)?;
    if vs.len() == 2 && vs[0].dim() == 2 {
        let c = (vs[0].coords(), vs[1].coords());
        return Ok((&c.0[0] * &c.1[1] - &c.0[1] * &c.1[0]).abs());
    }
    Ok(elementary_divisors(vs).iter().product())
}

/// True iff `vs` extends to a basis of `Z^k`.
pub fn is_unimodular(vs: &[LatticeVector]) -> Result<bool, LinalgError> {
    Ok(lattice_index(vs)?.is_one())
}

pub fn check_independent(vs: &[LatticeVector]) -> Result<(), LinalgError> {
    let Some(dim) = vs.first().map(LatticeVector::dim) else {
        return Ok(());
    };
    if let Some(v) = vs.iter().find(|v| v.dim() != dim) {
        return Err(LinalgError::DimensionMismatch { expected: dim, found: v.dim() });
    }
    let cols: Vec<RationalVector> = vs.iter().map(LatticeVector::to_rational).collect();
    if RationalMatrix::from_columns(&cols, dim).rank() != vs.len() {
        return Err(LinalgError::NotSimplicial);
    }
    Ok(())
}

/// Coordinate system adapted to a linearly independent generator set `G`
/// (k × d): `coords · x` gives the coefficients of `x` in `G` whenever
/// `x ∈ span G`, and `annihilator · x = 0` characterizes the span.
#[derive(Clone, Debug)]
pub struct Frame {
    pub coords: RationalMatrix,
    pub annihilator: RationalMatrix,
}

impl Frame {
    pub fn new(gens: &[LatticeVector], dim: usize) -> Result<Frame, LinalgError> {
        check_independent(gens)?;
        let d = gens.len();
        let mut basis: Vec<RationalVector> = gens.iter().map(LatticeVector::to_rational).collect();
        for i in 0..dim {
            if basis.len() == dim {
                break;
            }
            let mut trial = basis.clone();
            trial.push(LatticeVector::unit(dim, i).to_rational());
            if RationalMatrix::from_columns(&trial, dim).rank() == trial.len() {
                basis = trial;
            }
        }
        let inv = RationalMatrix::from_columns(&basis, dim).inverse().expect("completed basis is invertible");
        let mut coords = RationalMatrix::zeros(d, dim);
        let mut annihilator = RationalMatrix::zeros(dim - d, dim);
        for i in 0..dim {
            for j in 0..dim {
                let v = inv.get(i, j).clone();
                if i < d {
                    coords.set(i, j, v);
                } else {
                    annihilator.set(i - d, j, v);
                }
            }
        }
        Ok(Frame { coords, annihilator })
    }

    pub fn in_span(&self, x: &RationalVector) -> bool {
        (0..self.annihilator.rows()).all(|i| self.annihilator.row(i).dot(x).is_zero())
    }

    /// Coefficients of `x` in the generators, or `None` outside the span.
    pub fn coefficients(&self, x: &RationalVector) -> Option<Vec<Rat>> {
        if !self.in_span(x) {
            return None;
        }
        Some((0..self.coords.rows()).map(|i| self.coords.row(i).dot(x)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lv(c: &[i64]) -> LatticeVector {
        LatticeVector::from_i64(c)
    }

    #[test]
    fn primitive_examples() {
        assert_eq!(primitive(&lv(&[2, 4])).unwrap(), lv(&[1, 2]));
        assert_eq!(primitive(&lv(&[1, 2])).unwrap(), lv(&[1, 2]));
        assert_eq!(primitive(&lv(&[-6, 0, 9])).unwrap(), lv(&[-2, 0, 3]));
        let err = primitive(&lv(&[0, 0])).unwrap_err();
        assert_eq!(err.to_string(), "zero vector has no primitive generator");
    }

    fn det2(a: &[i64], b: &[i64]) -> i64 {
        a[0] * b[1] - a[1] * b[0]
    }

    #[test]
    fn unimodular_examples_match_determinants() {
        assert!(is_unimodular(&[lv(&[1, 0]), lv(&[0, 1])]).unwrap());
        assert_eq!(det2(&[1, 2], &[2, 1]), -3);
        assert!(!is_unimodular(&[lv(&[1, 2]), lv(&[2, 1])]).unwrap());
        assert_eq!(det2(&[1, 1], &[1, 2]), 1);
        assert!(is_unimodular(&[lv(&[1, 1]), lv(&[1, 2])]).unwrap());
        assert_eq!(is_unimodular(&[lv(&[1, 2]), lv(&[2, 4])]).unwrap_err(), LinalgError::NotSimplicial);
    }

    #[test]
    fn unimodular_in_higher_ambient_dimension() {
        // a 2-cone inside Z^3: (1,1,0),(0,1,1) spans a saturated plane
        assert!(is_unimodular(&[lv(&[1, 1, 0]), lv(&[0, 1, 1])]).unwrap());
        // (1,1,0),(1,-1,0) has index 2
        assert_eq!(lattice_index(&[lv(&[1, 1, 0]), lv(&[1, -1, 0])]).unwrap(), Int::from(2));
        assert_eq!(lattice_index(&[lv(&[1, 1, 1]), lv(&[1, 0, 0]), lv(&[0, 1, 0])]).unwrap(), Int::from(1));
        assert_eq!(lattice_index(&[lv(&[1, 1, 2]), lv(&[1, 0, 0]), lv(&[0, 1, 0])]).unwrap(), Int::from(2));
    }

    #[test]
    fn smith_form_reconstructs() {
        let vs = [lv(&[2, 4, 4]), lv(&[-6, 6, 12]), lv(&[10, -4, -16])];
        let a = IntMatrix::from_columns(&vs, 3);
        let s = smith_normal_form(&a);
        assert_eq!(s.divisors, vec![Int::from(2), Int::from(6), Int::from(12)]);
        let prod = s.left.to_rational().mul(&a.to_rational()).unwrap().mul(&s.right.to_rational()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { rat_from_int(&s.divisors[i]) } else { Rat::zero() };
                assert_eq!(prod.get(i, j), &expect);
            }
        }
    }

    #[test]
    fn solve_identity_and_inconsistent() {
        let id = RationalMatrix::identity(3);
        let b = RationalVector::new(vec![rat(1, 2), rat(-3, 1), rat(0, 1)]);
        assert_eq!(solve_rational_system(&id, &b).unwrap(), Solution::Unique(b.clone()));

        let zero = RationalMatrix::from_i64_rows(&[&[0]]).unwrap();
        assert_eq!(solve_rational_system(&zero, &RationalVector::from_i64(&[1])).unwrap(), Solution::Inconsistent);
        assert!(matches!(
            solve_rational_system(&id, &RationalVector::from_i64(&[1, 2])),
            Err(LinalgError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn solve_paper_example_balancing_system() {
        // unknowns (m_e1, m_e2) in one direction; vertex equations
        // v1: m1 = d1 - c1, v2: m2 = d2 - c2, v3: -m1 - m2 = d3 - c3
        let a = RationalMatrix::from_i64_rows(&[&[1, 0], &[0, 1], &[-1, -1]]).unwrap();
        let first = RationalVector::from_i64(&[2 - 1, 2, 0 - 3]);
        let second = RationalVector::from_i64(&[2, 2 - 1, 0 - 3]);
        assert_eq!(solve_rational_system(&a, &first).unwrap().unique().unwrap(), RationalVector::from_i64(&[1, 2]));
        assert_eq!(solve_rational_system(&a, &second).unwrap().unique().unwrap(), RationalVector::from_i64(&[2, 1]));
    }

    #[test]
    fn underdetermined_is_flagged() {
        let a = RationalMatrix::from_i64_rows(&[&[1, 1]]).unwrap();
        match solve_rational_system(&a, &RationalVector::from_i64(&[3])).unwrap() {
            Solution::Parametrized { particular, nullity } => {
                assert_eq!(nullity, 1);
                assert_eq!(a.mul_vec(&particular).unwrap(), RationalVector::from_i64(&[3]));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn frame_coefficients() {
        let f = Frame::new(&[lv(&[1, 1, 0]), lv(&[0, 1, 1])], 3).unwrap();
        let x = RationalVector::from_i64(&[2, 5, 3]);
        assert_eq!(f.coefficients(&x).unwrap(), vec![rat(2, 1), rat(3, 1)]);
        assert!(f.coefficients(&RationalVector::from_i64(&[1, 0, 0])).is_none());
    }

    #[test]
    fn rational_round_trip() {
        for s in ["3/4", "-7/2", "0/1", "5/1"] {
            assert_eq!(format_rational(&parse_rational(s).unwrap()), s);
        }
        assert_eq!(format_rational(&parse_rational("6/4").unwrap()), "3/2");
        assert_eq!(format_rational(&parse_rational("4").unwrap()), "4/1");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn small_vec(dim: usize) -> impl Strategy<Value = LatticeVector> {
            proptest::collection::vec(-12i64..=12, dim).prop_map(|c| LatticeVector::from_i64(&c))
        }

        proptest! {
            #[test]
            fn primitive_is_idempotent(v in small_vec(3)) {
                prop_assume!(!v.is_zero());
                let p = primitive(&v).unwrap();
                prop_assert_eq!(primitive(&p).unwrap(), p.clone());
                prop_assert!(p.is_primitive());
            }

            #[test]
            fn unimodularity_is_permutation_and_sign_invariant(a in small_vec(3), b in small_vec(3), flip in any::<bool>()) {
                let vs = vec![a.clone(), b.clone()];
                prop_assume!(check_independent(&vs).is_ok());
                let base = is_unimodular(&vs).unwrap();
                let negated = if flip { -&a } else { a.clone() };
                prop_assert_eq!(is_unimodular(&[b.clone(), negated]).unwrap(), base);
            }

            #[test]
            fn solutions_resubstitute(rows in proptest::collection::vec(proptest::collection::vec(-5i64..=5, 3), 1..5),
                                      rhs in proptest::collection::vec(-5i64..=5, 5)) {
                let m = rows.len();
                let refs: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
                let a = RationalMatrix::from_i64_rows(&refs).unwrap();
                let b = RationalVector::from_i64(&rhs[..m]);
                match solve_rational_system(&a, &b).unwrap() {
                    Solution::Unique(x) | Solution::Parametrized { particular: x, .. } => {
                        prop_assert_eq!(a.mul_vec(&x).unwrap(), b);
                    }
                    Solution::Inconsistent => {
                        // consistent systems have rank(A) == rank([A|b])
                        let mut aug: Vec<Vec<Rat>> = (0..m).map(|i| a.row(i).coords().to_vec()).collect();
                        for (i, r) in aug.iter_mut().enumerate() {
                            r.push(b.coords()[i].clone());
                        }
                        prop_assert!(RationalMatrix::from_rows(aug).unwrap().rank() > a.rank());
                    }
                }
            }
        }
    }
}
