//! Sparse matrices over the scalar ring and the matrix-level braiding checks.
//!
//! Pair indices are flattened as `(i, k) -> i * n + k` (0-based), so the
//! entry `R^{ik}_{jl}` sits at row `(i, k)` and column `(j, l)`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use thiserror::Error;

use crate::scalar::{Scalar, ScalarError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TensorError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("matrix is not invertible by the unipotent method: {0}")]
    NotInvertible(String),
    #[error("cannot parse matrix dump: {0}")]
    Parse(String),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RingMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BTreeMap<usize, Scalar>>,
}

fn dim_err(what: &str, a: &RingMatrix, b: &RingMatrix) -> TensorError {
    TensorError::DimensionMismatch(format!("{what}: {}x{} vs {}x{}", a.rows, a.cols, b.rows, b.cols))
}

impl RingMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RingMatrix { rows, cols, data: vec![BTreeMap::new(); rows] }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal((0..n).map(|_| Scalar::one()).collect())
    }

    pub fn diagonal(d: Vec<Scalar>) -> Self {
        let n = d.len();
        let mut m = Self::zeros(n, n);
        for (i, s) in d.into_iter().enumerate() {
            m.set(i, i, s);
        }
        m
    }

    pub fn from_entries(rows: usize, cols: usize, entries: impl IntoIterator<Item = (usize, usize, Scalar)>) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (i, j, s) in entries {
            let cur = m.entry(i, j);
            m.set(i, j, &cur + &s);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&Scalar> {
        self.data[i].get(&j)
    }

    pub fn entry(&self, i: usize, j: usize) -> Scalar {
        self.get(i, j).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Stores `s`, or removes the entry when `s` is zero.
    pub fn set(&mut self, i: usize, j: usize, s: Scalar) {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) outside {}x{}", self.rows, self.cols);
        if s.is_zero() {
            self.data[i].remove(&j);
        } else {
            self.data[i].insert(j, s);
        }
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, &Scalar)> {
        self.data[i].iter().map(|(j, s)| (*j, s))
    }

    /// Nonzero entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> {
        self.data.iter().enumerate().flat_map(|(i, r)| r.iter().map(move |(j, s)| (i, *j, s)))
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(|r| r.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.is_empty())
    }

    pub fn is_diagonal(&self) -> bool {
        self.entries().all(|(i, j, _)| i == j)
    }

    pub fn root_order(&self) -> u32 {
        use num_integer::Integer;
        self.entries().fold(1u32, |l, (_, _, s)| (l as u64).lcm(&(s.root_order() as u64)) as u32)
    }

    /// Applies a fallible map to every stored entry.
    pub fn try_map<E>(&self, f: impl Fn(&Scalar) -> Result<Scalar, E>) -> Result<Self, E> {
        let mut m = Self::zeros(self.rows, self.cols);
        for (i, j, s) in self.entries() {
            m.set(i, j, f(s)?);
        }
        Ok(m)
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for (i, j, s) in self.entries() {
            m.data[j].insert(i, s.clone());
        }
        m
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::zeros(self.rows, self.cols);
        }
        let data = self
            .data
            .iter()
            .map(|r| r.iter().map(|(j, s)| (*j, s * c)).filter(|(_, s)| !s.is_zero()).collect())
            .collect();
        RingMatrix { rows: self.rows, cols: self.cols, data }
    }

    fn combine(&self, other: &Self, sign: i32) -> Result<Self, TensorError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(dim_err("add", self, other));
        }
        let mut out = self.clone();
        for (i, j, s) in other.entries() {
            let cur = out.entry(i, j);
            let v = if sign > 0 { cur.try_add(s)? } else { cur.try_sub(s)? };
            out.set(i, j, v);
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self, TensorError> {
        self.combine(other, 1)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, TensorError> {
        self.combine(other, -1)
    }

    pub fn matmul(&self, other: &Self) -> Result<Self, TensorError> {
        if self.cols != other.rows {
            return Err(dim_err("matmul", self, other));
        }
        let row_product = |r: &BTreeMap<usize, Scalar>| -> Result<BTreeMap<usize, Scalar>, ScalarError> {
            let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
            for (k, a) in r {
                for (j, b) in &other.data[*k] {
                    let p = a.try_mul(b)?;
                    match acc.get_mut(j) {
                        Some(v) => *v = v.try_add(&p)?,
                        None => {
                            acc.insert(*j, p);
                        }
                    }
                }
            }
            acc.retain(|_, s| !s.is_zero());
            Ok(acc)
        };
        let data: Result<Vec<_>, ScalarError> = if self.rows >= 24 {
            self.data.par_iter().map(row_product).collect()
        } else {
            self.data.iter().map(row_product).collect()
        };
        Ok(RingMatrix { rows: self.rows, cols: other.cols, data: data? })
    }

    pub fn kron(&self, other: &Self) -> Self {
        let mut m = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for (i, j, a) in self.entries() {
            for (k, l, b) in other.entries() {
                m.data[i * other.rows + k].insert(j * other.cols + l, a * b);
            }
        }
        m
    }

    pub fn pow(&self, n: u32) -> Result<Self, TensorError> {
        let mut acc = Self::identity(self.rows);
        for _ in 0..n {
            acc = acc.matmul(self)?;
        }
        Ok(acc)
    }

    /// Inverse of a diagonal matrix with monomial entries.
    pub fn diagonal_inverse(&self) -> Result<Self, TensorError> {
        if !self.is_square() || !self.is_diagonal() {
            return Err(TensorError::NotInvertible("not diagonal".into()));
        }
        let mut d = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let s = self.get(i, i).ok_or_else(|| TensorError::NotInvertible(format!("zero at ({i},{i})")))?;
            d.push(s.inv()?);
        }
        Ok(Self::diagonal(d))
    }

    /// Inverse of `D + O` with `D` diagonal and monomial and `D^{-1} O`
    /// nilpotent, as the finite series `sum (-D^{-1} O)^k D^{-1}`.
    pub fn unipotent_inverse(&self) -> Result<Self, TensorError> {
        if !self.is_square() {
            return Err(TensorError::DimensionMismatch("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut diag = Self::zeros(n, n);
        let mut off = Self::zeros(n, n);
        for (i, j, s) in self.entries() {
            if i == j {
                diag.set(i, j, s.clone());
            } else {
                off.set(i, j, s.clone());
            }
        }
        let dinv = diag.diagonal_inverse()?;
        let nil = dinv.matmul(&off)?.scale(&Scalar::from(-1));
        let mut term = Self::identity(n);
        let mut sum = Self::identity(n);
        for _ in 0..=n {
            term = term.matmul(&nil)?;
            if term.is_zero() {
                return sum.matmul(&dinv);
            }
            sum = sum.add(&term)?;
        }
        Err(TensorError::NotInvertible("off-diagonal part is not nilpotent".into()))
    }

    /// First entry (row-major) where the two matrices differ.
    pub fn first_difference(&self, other: &Self) -> Option<(usize, usize, Scalar, Scalar)> {
        let mut keys: Vec<(usize, usize)> = self.entries().map(|(i, j, _)| (i, j)).collect();
        keys.extend(other.entries().map(|(i, j, _)| (i, j)));
        keys.sort_unstable();
        keys.dedup();
        keys.into_iter().find_map(|(i, j)| {
            let (a, b) = (self.entry(i, j), other.entry(i, j));
            (a != b).then_some((i, j, a, b))
        })
    }

    /// Dump text: `rows cols root_order`, then `row col scalar` per entry.
    pub fn dump(&self) -> String {
        let mut s = format!("{} {} {}\n", self.rows, self.cols, self.root_order());
        for (i, j, v) in self.entries() {
            let _ = writeln!(s, "{i} {j} {v}");
        }
        s
    }

    pub fn parse_dump(text: &str) -> Result<Self, TensorError> {
        let bad = |m: &str| TensorError::Parse(m.to_string());
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let head: Vec<usize> = lines
            .next()
            .ok_or_else(|| bad("empty dump"))?
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| bad("header")))
            .collect::<Result<_, _>>()?;
        if head.len() != 3 {
            return Err(bad("header needs rows cols root_order"));
        }
        let mut m = Self::zeros(head[0], head[1]);
        for line in lines {
            let mut it = line.splitn(3, ' ');
            let i: usize = it.next().and_then(|t| t.parse().ok()).ok_or_else(|| bad(line))?;
            let j: usize = it.next().and_then(|t| t.parse().ok()).ok_or_else(|| bad(line))?;
            let s: Scalar = it.next().ok_or_else(|| bad(line))?.parse()?;
            if i >= m.rows || j >= m.cols {
                return Err(bad(line));
            }
            m.set(i, j, s);
        }
        Ok(m)
    }
}

impl std::ops::Mul for &RingMatrix {
    type Output = RingMatrix;
    fn mul(self, rhs: &RingMatrix) -> RingMatrix {
        self.matmul(rhs).expect("matrix product")
    }
}

impl std::ops::Add for &RingMatrix {
    type Output = RingMatrix;
    fn add(self, rhs: &RingMatrix) -> RingMatrix {
        RingMatrix::add(self, rhs).expect("matrix sum")
    }
}

impl std::ops::Sub for &RingMatrix {
    type Output = RingMatrix;
    fn sub(self, rhs: &RingMatrix) -> RingMatrix {
        RingMatrix::sub(self, rhs).expect("matrix difference")
    }
}

/// `P^{ij}_{kl} = delta_il delta_jk`: swaps the two tensor legs.
pub fn permutation_matrix(n: usize) -> RingMatrix {
    RingMatrix::from_entries(n * n, n * n, (0..n).flat_map(|i| (0..n).map(move |j| (i * n + j, j * n + i, Scalar::one()))))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Legs {
    L12,
    L13,
    L23,
}

fn side(m: &RingMatrix) -> Result<usize, TensorError> {
    let n = (m.rows() as f64).sqrt().round() as usize;
    if !m.is_square() || n * n != m.rows() {
        return Err(TensorError::DimensionMismatch(format!("{}x{} is not an operator on V(x)V", m.rows(), m.cols())));
    }
    Ok(n)
}

pub fn leg_embed(r: &RingMatrix, n: usize, legs: Legs) -> Result<RingMatrix, TensorError> {
    if r.rows() != n * n || !r.is_square() {
        return Err(TensorError::DimensionMismatch(format!("{}x{} on legs of dimension {n}", r.rows(), r.cols())));
    }
    let id = RingMatrix::identity(n);
    Ok(match legs {
        Legs::L12 => r.kron(&id),
        Legs::L23 => id.kron(r),
        Legs::L13 => {
            let swap23 = id.kron(&permutation_matrix(n));
            &(&swap23 * &r.kron(&id)) * &swap23
        }
    })
}

/// `R12 R13 R23 = R23 R13 R12`, both sides built in full.
pub fn qybe_holds(r: &RingMatrix) -> Result<bool, TensorError> {
    let n = side(r)?;
    let (a, b, c) = (leg_embed(r, n, Legs::L12)?, leg_embed(r, n, Legs::L13)?, leg_embed(r, n, Legs::L23)?);
    Ok(&(&a * &b) * &c == &(&c * &b) * &a)
}

/// Whether `prod_t (M - mu_t I)` vanishes, factors taken in the given order.
pub fn annihilates(m: &RingMatrix, roots: &[Scalar]) -> Result<bool, TensorError> {
    if !m.is_square() {
        return Err(TensorError::DimensionMismatch("annihilates needs a square matrix".into()));
    }
    let id = RingMatrix::identity(m.rows());
    let mut acc = id.clone();
    for mu in roots {
        acc = acc.matmul(&m.sub(&id.scale(mu))?)?;
    }
    Ok(acc.is_zero())
}

/// `(PR + I)(PR' - I) = 0`
pub fn hecke_pair_check(r: &RingMatrix, rp: &RingMatrix) -> Result<bool, TensorError> {
    let n = side(r)?;
    if r.rows() != rp.rows() || !rp.is_square() {
        return Err(dim_err("hecke", r, rp));
    }
    let p = permutation_matrix(n);
    let id = RingMatrix::identity(n * n);
    Ok((&(&(&p * r) + &id) * &(&(&p * rp) - &id)).is_zero())
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct MixedQybe {
    pub r12_r13_rp23: bool,
    pub r23_r13_rp12: bool,
    pub r21_rp12: bool,
}

impl MixedQybe {
    pub fn all(&self) -> bool {
        self.r12_r13_rp23 && self.r23_r13_rp12 && self.r21_rp12
    }
}

pub fn mixed_qybe_check(r: &RingMatrix, rp: &RingMatrix) -> Result<MixedQybe, TensorError> {
    let n = side(r)?;
    if r.rows() != rp.rows() || !rp.is_square() {
        return Err(dim_err("mixed qybe", r, rp));
    }
    let (r12, r13, r23) = (leg_embed(r, n, Legs::L12)?, leg_embed(r, n, Legs::L13)?, leg_embed(r, n, Legs::L23)?);
    let (s12, s23) = (leg_embed(rp, n, Legs::L12)?, leg_embed(rp, n, Legs::L23)?);
    let p = permutation_matrix(n);
    let r21 = &(&p * r) * &p;
    let s21 = &(&p * rp) * &p;
    Ok(MixedQybe {
        r12_r13_rp23: &(&r12 * &r13) * &s23 == &(&s23 * &r13) * &r12,
        r23_r13_rp12: &(&r23 * &r13) * &s12 == &(&s12 * &r13) * &r23,
        r21_rp12: &r21 * rp == &s21 * r,
    })
}
