//! Cartan data, concrete representations, root vectors through Lusztig's
//! braid automorphisms, and the truncated universal R-matrix.
//!
//! Representations carry the ordinary relations
//! `K_i E_j K_i^{-1} = q^{(a_i,a_j)} E_j` and
//! `[E_i, F_j] = delta_ij (K_i - K_i^{-1}) / (q_i - q_i^{-1})`.
//! Weights are rational coordinates in the fundamental-weight basis, so
//! `K_i` acts on `x` by `q^{d_i wt(x)_i}`.

use std::fmt::Write as _;
use std::sync::Arc;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rmatrix::{Family, Series, SeriesCase};
use crate::scalar::{int, q_binomial, q_factorial, rat, type_b_modulus, Laurent, Rational, Scalar, ScalarError};
use crate::tensor::{RingMatrix, TensorError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RepError {
    #[error("rank {1} is out of range for series {0:?}")]
    RankOutOfRange(Series, usize),
    #[error("unknown case {0:?}")]
    UnknownCase(String),
    #[error("invalid Cartan data: {0}")]
    InvalidCartan(String),
    #[error("word {0:?} is not a reduced expression of the longest element")]
    NotReduced(Vec<usize>),
    #[error("incompatible lattices: {0}")]
    IncompatibleLattice(String),
    #[error("root vector is not nilpotent: {0}")]
    NonNilpotent(String),
    #[error("malformed representation: {0}")]
    Malformed(String),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

fn rational_inverse(m: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| r.iter().cloned().chain((0..n).map(|j| int((i == j) as i64))).collect())
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, p);
        let pv = a[c][c].clone();
        for x in a[c].iter_mut() {
            *x = &*x / &pv;
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                for k in 0..2 * n {
                    let v = &a[c][k] * &f;
                    a[r][k] = &a[r][k] - &v;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Cartan matrix, symmetrizers `d_i` and the Gram matrix of fundamental weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartanData {
    pub label: String,
    a: Vec<Vec<i64>>,
    d: Vec<Rational>,
    gram: Vec<Vec<Rational>>,
}

impl CartanData {
    pub fn new(label: impl Into<String>, a: Vec<Vec<i64>>, d: Vec<Rational>) -> Result<Self, RepError> {
        let n = a.len();
        let bad = |m: String| RepError::InvalidCartan(m);
        if d.len() != n || a.iter().any(|r| r.len() != n) {
            return Err(bad("shape".into()));
        }
        for i in 0..n {
            if a[i][i] != 2 || !d[i].is_positive() {
                return Err(bad(format!("node {i}")));
            }
            for j in 0..n {
                if &d[i] * int(a[i][j]) != &d[j] * int(a[j][i]) {
                    return Err(bad(format!("d_i a_ij != d_j a_ji at ({i},{j})")));
                }
            }
        }
        let ar: Vec<Vec<Rational>> = a.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
        let inv = rational_inverse(&ar).ok_or_else(|| bad("singular".into()))?;
        let gram = (0..n).map(|i| (0..n).map(|j| &inv[i][j] * &d[i]).collect()).collect();
        Ok(CartanData { label: label.into(), a, d, gram })
    }

    pub fn rank(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self, i: usize, j: usize) -> i64 {
        self.a[i][j]
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.a
    }

    pub fn d(&self, i: usize) -> &Rational {
        &self.d[i]
    }

    /// `(a_i, a_j) = d_i a_ij`.
    pub fn root_pair(&self, i: usize, j: usize) -> Rational {
        &self.d[i] * int(self.a[i][j])
    }

    /// `(mu, nu)` for weights in fundamental coordinates.
    pub fn form(&self, mu: &[Rational], nu: &[Rational]) -> Rational {
        let mut s = Rational::zero();
        for (i, a) in mu.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in nu.iter().enumerate() {
                if !b.is_zero() {
                    s += a * &self.gram[i][j] * b;
                }
            }
        }
        s
    }

    /// Simple root `a_i` in fundamental coordinates.
    pub fn root(&self, i: usize) -> Vec<Rational> {
        (0..self.rank()).map(|k| int(self.a[k][i])).collect()
    }

    pub fn reflect(&self, i: usize, mu: &[Rational]) -> Vec<Rational> {
        let c = mu[i].clone();
        mu.iter().enumerate().map(|(k, m)| m - &c * int(self.a[k][i])).collect()
    }

    /// A reduced word for the longest Weyl element, 0-based node labels.
    pub fn longest_word(&self) -> Vec<usize> {
        let mut v: Vec<Rational> = vec![Rational::one(); self.rank()];
        let mut word = Vec::new();
        while let Some(i) = (0..self.rank()).find(|&i| v[i].is_positive()) {
            v = self.reflect(i, &v);
            word.push(i);
        }
        word.reverse();
        word
    }

    pub fn check_longest(&self, word: &[usize]) -> Result<(), RepError> {
        let rho: Vec<Rational> = vec![Rational::one(); self.rank()];
        let n = self.longest_word().len();
        let mut v = rho.clone();
        for &i in word.iter().rev() {
            if i >= self.rank() {
                return Err(RepError::NotReduced(word.to_vec()));
            }
            v = self.reflect(i, &v);
        }
        if word.len() != n || v.iter().zip(&rho).any(|(a, b)| a != &-b) {
            return Err(RepError::NotReduced(word.to_vec()));
        }
        Ok(())
    }

    /// Positive roots `s_{i_1} ... s_{i_{k-1}}(a_{i_k})` in the order of `word`.
    pub fn convex_roots(&self, word: &[usize]) -> Vec<Vec<Rational>> {
        (0..word.len())
            .map(|k| {
                let mut r = self.root(word[k]);
                for &i in word[..k].iter().rev() {
                    r = self.reflect(i, &r);
                }
                r
            })
            .collect()
    }

    /// Node `k` of the result is node `order[k]` of `self`.
    pub fn permuted(&self, order: &[usize], label: impl Into<String>) -> Result<CartanData, RepError> {
        let n = self.rank();
        let mut seen = vec![false; n];
        if order.len() != n || order.iter().any(|&i| i >= n || std::mem::replace(&mut seen[i], true)) {
            return Err(RepError::InvalidCartan(format!("{order:?} is not a permutation")));
        }
        let a = order.iter().map(|&i| order.iter().map(|&j| self.a[i][j]).collect()).collect();
        let d = order.iter().map(|&i| self.d[i].clone()).collect();
        CartanData::new(label, a, d)
    }

    /// Same matrix and symmetrizers.
    pub fn same_lattice(&self, other: &CartanData) -> bool {
        self.a == other.a && self.d == other.d
    }
}

fn cartan_err(series: Series, rank: usize) -> RepError {
    RepError::RankOutOfRange(series, rank)
}

/// Classical Cartan data. B, C, D are labelled from the special end: node 1
/// is the short node of B, the long node of C, and nodes 1, 2 form the fork
/// of D; node `n` is the one an extra node attaches to.
pub fn cartan(series: Series, rank: usize) -> Result<CartanData, RepError> {
    let case = SeriesCase::new(series, rank).map_err(|_| cartan_err(series, rank))?;
    let n = case.rank;
    let mut a = vec![vec![0i64; n]; n];
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = 2;
    }
    let link = |a: &mut Vec<Vec<i64>>, i: usize, j: usize| {
        a[i][j] = -1;
        a[j][i] = -1;
    };
    let mut d = vec![int(1); n];
    match series {
        Series::A => (0..n.saturating_sub(1)).for_each(|i| link(&mut a, i, i + 1)),
        Series::B | Series::C => {
            (1..n - 1).for_each(|i| link(&mut a, i, i + 1));
            if series == Series::B {
                a[0][1] = -2;
                a[1][0] = -1;
                d[0] = rat(1, 2);
            } else {
                a[0][1] = -1;
                a[1][0] = -2;
                d[0] = int(2);
            }
        }
        Series::D => {
            link(&mut a, 0, 2);
            link(&mut a, 1, 2);
            (2..n - 1).for_each(|i| link(&mut a, i, i + 1));
        }
    }
    CartanData::new(format!("{series:?}{n}"), a, d)
}

/// Generator matrices and weights of a finite-dimensional module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Representation {
    pub label: String,
    pub cartan: CartanData,
    pub e: Vec<RingMatrix>,
    pub f: Vec<RingMatrix>,
    pub weights: Vec<Vec<Rational>>,
}

/// One violated defining relation.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct RepViolation {
    pub family: String,
    pub i: usize,
    pub j: usize,
}

fn elem(n: usize, entries: &[(usize, usize, Scalar)]) -> RingMatrix {
    RingMatrix::from_entries(n, n, entries.iter().cloned())
}

fn divided_power(x: &RingMatrix, r: u32, d: &Rational) -> Result<RingMatrix, RepError> {
    let p = x.pow(r)?;
    let fact = q_factorial(r, d);
    Ok(p.try_map(|s| s.div_exact(&fact))?)
}

impl Representation {
    pub fn new(
        label: impl Into<String>,
        cartan: CartanData,
        e: Vec<RingMatrix>,
        f: Vec<RingMatrix>,
        weights: Vec<Vec<Rational>>,
    ) -> Result<Self, RepError> {
        let n = weights.len();
        let r = cartan.rank();
        if e.len() != r || f.len() != r || weights.iter().any(|w| w.len() != r) {
            return Err(RepError::Malformed("generator count or weight length".into()));
        }
        if e.iter().chain(&f).any(|m| m.rows() != n || m.cols() != n) {
            return Err(RepError::Malformed("generator size".into()));
        }
        Ok(Representation { label: label.into(), cartan, e, f, weights })
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn rank(&self) -> usize {
        self.cartan.rank()
    }

    /// `K_i^p`.
    pub fn k_pow(&self, i: usize, p: &Rational) -> RingMatrix {
        let d = self.cartan.d(i);
        RingMatrix::diagonal(self.weights.iter().map(|w| Scalar::q_rat(&(p * d * &w[i]))).collect())
    }

    /// `K_mu`, acting by `q^{(mu, wt)}`.
    pub fn k_weight(&self, mu: &[Rational]) -> RingMatrix {
        RingMatrix::diagonal(self.weights.iter().map(|w| Scalar::q_rat(&self.cartan.form(mu, w))).collect())
    }

    /// Least common denominator of all pairings among the weights.
    pub fn lattice_denominator(&self) -> u32 {
        let mut l = 1u64;
        for a in &self.weights {
            for b in &self.weights {
                let f = self.cartan.form(a, b);
                let den: u64 = f.denom().try_into().unwrap_or(1);
                l = l.lcm(&den);
            }
        }
        l as u32
    }

    /// `E -> F^T`, `F -> E^T`: the module whose matrix coefficients pair
    /// with the covector side.
    pub fn hat(&self) -> Representation {
        Representation {
            label: format!("hat({})", self.label),
            cartan: self.cartan.clone(),
            e: self.f.iter().map(|m| m.transpose()).collect(),
            f: self.e.iter().map(|m| m.transpose()).collect(),
            weights: self.weights.clone(),
        }
    }

    /// Restriction to the sub-diagram on `nodes`, relabelled as `base`.
    pub fn restrict(&self, nodes: &[usize], base: &CartanData) -> Result<Representation, RepError> {
        if nodes.len() != base.rank() {
            return Err(RepError::IncompatibleLattice("node count".into()));
        }
        for (x, &i) in nodes.iter().enumerate() {
            for (y, &j) in nodes.iter().enumerate() {
                if self.cartan.a(i, j) != base.a(x, y) || self.cartan.d(i) != base.d(x) {
                    return Err(RepError::IncompatibleLattice(format!("nodes {i},{j}")));
                }
            }
        }
        Ok(Representation {
            label: format!("{}|{}", self.label, base.label),
            cartan: base.clone(),
            e: nodes.iter().map(|&i| self.e[i].clone()).collect(),
            f: nodes.iter().map(|&i| self.f[i].clone()).collect(),
            weights: self.weights.iter().map(|w| nodes.iter().map(|&i| w[i].clone()).collect()).collect(),
        })
    }

    /// `V (x) W` through `E -> E(x)K + 1(x)E`, `F -> F(x)1 + K^{-1}(x)F`.
    pub fn tensor(&self, other: &Representation) -> Result<Representation, RepError> {
        if !self.cartan.same_lattice(&other.cartan) {
            return Err(RepError::IncompatibleLattice(format!("{} vs {}", self.cartan.label, other.cartan.label)));
        }
        let (i1, i2) = (RingMatrix::identity(self.dim()), RingMatrix::identity(other.dim()));
        let mut e = Vec::new();
        let mut f = Vec::new();
        for i in 0..self.rank() {
            let k2 = other.k_pow(i, &int(1));
            let k1inv = self.k_pow(i, &int(-1));
            e.push(self.e[i].kron(&k2).add(&i1.kron(&other.e[i]))?);
            f.push(self.f[i].kron(&i2).add(&k1inv.kron(&other.f[i]))?);
        }
        let mut weights = Vec::new();
        for a in &self.weights {
            for b in &other.weights {
                weights.push(a.iter().zip(b).map(|(x, y)| x + y).collect());
            }
        }
        Ok(Representation { label: format!("{}*{}", self.label, other.label), cartan: self.cartan.clone(), e, f, weights })
    }

    /// The module `X -> rho(T_i X)` for Lusztig's automorphism `T_i`.
    pub fn pullback(&self, i: usize) -> Result<Representation, RepError> {
        let di = self.cartan.d(i).clone();
        let qi = |k: i64| Scalar::q_rat(&(&di * int(k)));
        let ki = self.k_pow(i, &int(1));
        let kinv = self.k_pow(i, &int(-1));
        let neg = Scalar::from(-1);
        let mut e = Vec::with_capacity(self.rank());
        let mut f = Vec::with_capacity(self.rank());
        for j in 0..self.rank() {
            if j == i {
                e.push(self.f[i].matmul(&ki)?.scale(&neg));
                f.push(kinv.matmul(&self.e[i])?.scale(&neg));
                continue;
            }
            let m = (-self.cartan.a(i, j)) as u32;
            let mut ej = RingMatrix::zeros(self.dim(), self.dim());
            let mut fj = RingMatrix::zeros(self.dim(), self.dim());
            for r in 0..=m {
                let sign = if r % 2 == 0 { Scalar::one() } else { neg.clone() };
                let ea = divided_power(&self.e[i], m - r, &di)?;
                let eb = divided_power(&self.e[i], r, &di)?;
                let te = ea.matmul(&self.e[j])?.matmul(&eb)?.scale(&(&sign * &qi(-(r as i64))));
                ej = ej.add(&te)?;
                let fa = divided_power(&self.f[i], r, &di)?;
                let fb = divided_power(&self.f[i], m - r, &di)?;
                let tf = fa.matmul(&self.f[j])?.matmul(&fb)?.scale(&(&sign * &qi(r as i64)));
                fj = fj.add(&tf)?;
            }
            e.push(ej);
            f.push(fj);
        }
        Ok(Representation {
            label: format!("{}.T{}", self.label, i + 1),
            cartan: self.cartan.clone(),
            e,
            f,
            weights: self.weights.iter().map(|w| self.cartan.reflect(i, w)).collect(),
        })
    }

    /// The same module over the relabelled Cartan data of [`CartanData::permuted`].
    pub fn permute_nodes(&self, order: &[usize], label: impl Into<String>) -> Result<Representation, RepError> {
        let cartan = self.cartan.permuted(order, label)?;
        Ok(Representation {
            label: format!("{}[{}]", self.label, cartan.label),
            e: order.iter().map(|&i| self.e[i].clone()).collect(),
            f: order.iter().map(|&i| self.f[i].clone()).collect(),
            weights: self.weights.iter().map(|w| order.iter().map(|&i| w[i].clone()).collect()).collect(),
            cartan,
        })
    }

    /// Header `dim rank root_order`, a weight table, then labelled matrix dumps.
    pub fn dump(&self) -> String {
        let order = self.e.iter().chain(&self.f).map(|m| m.root_order()).fold(self.lattice_denominator(), |a, b| {
            (a as u64).lcm(&(b as u64)) as u32
        });
        let mut s = format!("{} {} {}\n", self.dim(), self.rank(), order);
        for (i, w) in self.weights.iter().enumerate() {
            let cs: Vec<String> = w.iter().map(|c| c.to_string()).collect();
            let _ = writeln!(s, "weight {} {}", i, cs.join(" "));
        }
        for (name, ms) in [("E", &self.e), ("F", &self.f)] {
            for (i, m) in ms.iter().enumerate() {
                let _ = writeln!(s, "{} {}", name, i + 1);
                s.push_str(&m.dump());
            }
        }
        s
    }
}

/// Violations of the defining relations, including the q-Serre relations.
pub fn check_rep(rep: &Representation) -> Result<Vec<RepViolation>, RepError> {
    let c = &rep.cartan;
    let n = rep.dim();
    let mut bad = Vec::new();
    let push = |bad: &mut Vec<RepViolation>, fam: &str, i: usize, j: usize| {
        bad.push(RepViolation { family: fam.into(), i: i + 1, j: j + 1 })
    };
    for i in 0..rep.rank() {
        let ki = rep.k_pow(i, &int(1));
        let kinv = rep.k_pow(i, &int(-1));
        let qi = Laurent::q_rat(c.d(i));
        let qd = &qi - &qi.inv()?;
        for j in 0..rep.rank() {
            let s = Scalar::q_rat(&c.root_pair(i, j));
            let lhs = ki.matmul(&rep.e[j])?.matmul(&kinv)?;
            if lhs != rep.e[j].scale(&s) {
                push(&mut bad, "KE", i, j);
            }
            let lhs = ki.matmul(&rep.f[j])?.matmul(&kinv)?;
            if lhs != rep.f[j].scale(&s.inv()?) {
                push(&mut bad, "KF", i, j);
            }
            let comm = rep.e[i].matmul(&rep.f[j])?.sub(&rep.f[j].matmul(&rep.e[i])?)?;
            let rhs = if i == j { ki.sub(&kinv)? } else { RingMatrix::zeros(n, n) };
            if comm.scale(&qd.clone().into()) != rhs {
                push(&mut bad, "EF", i, j);
            }
            if i != j {
                for (fam, x) in [("SerreE", &rep.e), ("SerreF", &rep.f)] {
                    if !serre_sum(&x[i], &x[j], (1 - c.a(i, j)) as u32, c.d(i))?.is_zero() {
                        push(&mut bad, fam, i, j);
                    }
                }
            }
        }
    }
    Ok(bad)
}

/// `sum_k (-1)^k [m k]_{q_i} X_i^{m-k} X_j X_i^k`.
pub fn serre_sum(xi: &RingMatrix, xj: &RingMatrix, m: u32, d: &Rational) -> Result<RingMatrix, RepError> {
    let mut acc = RingMatrix::zeros(xi.rows(), xi.cols());
    for k in 0..=m {
        let mut c: Scalar = q_binomial(m, k, d).into();
        if k % 2 == 1 {
            c = -c;
        }
        let t = xi.pow(m - k)?.matmul(xj)?.matmul(&xi.pow(k)?)?;
        acc = acc.add(&t.scale(&c))?;
    }
    Ok(acc)
}

/// One positive root vector: `E_beta`, `F_beta` and `q_beta = q^{d}`.
#[derive(Clone, Debug)]
pub struct RootVector {
    pub root: Vec<Rational>,
    pub node: usize,
    pub d: Rational,
    pub e: RingMatrix,
    pub f: RingMatrix,
}

/// Root vectors in the convex order of `word`: `E_{b_k} = T_{i_1}...T_{i_{k-1}}(E_{i_k})`.
pub fn root_vectors(rep: &Representation, word: &[usize]) -> Result<Vec<RootVector>, RepError> {
    rep.cartan.check_longest(word)?;
    let roots = rep.cartan.convex_roots(word);
    let mut cur = rep.clone();
    let mut out = Vec::with_capacity(word.len());
    for (k, &i) in word.iter().enumerate() {
        out.push(RootVector {
            root: roots[k].clone(),
            node: i,
            d: rep.cartan.d(i).clone(),
            e: cur.e[i].clone(),
            f: cur.f[i].clone(),
        });
        if k + 1 < word.len() {
            cur = cur.pullback(i)?;
        }
    }
    Ok(out)
}

/// `B(v (x) w) = q^{(mu, mu')} v (x) w`.
pub fn bvv(v: &Representation, w: &Representation) -> Result<RingMatrix, RepError> {
    if !v.cartan.same_lattice(&w.cartan) {
        return Err(RepError::IncompatibleLattice(format!("{} vs {}", v.cartan.label, w.cartan.label)));
    }
    let mut d = Vec::with_capacity(v.dim() * w.dim());
    for a in &v.weights {
        for b in &w.weights {
            d.push(Scalar::q_rat(&v.cartan.form(a, b)));
        }
    }
    Ok(RingMatrix::diagonal(d))
}

/// `(B o (T_V (x) T_W)(r))^T` with the root factors multiplied left to
/// right in the convex order of the longest word of the Cartan data.
pub fn universal_r(v: &Representation, w: &Representation) -> Result<RingMatrix, RepError> {
    universal_r_with_word(v, w, &v.cartan.longest_word())
}

pub fn universal_r_with_word(v: &Representation, w: &Representation, word: &[usize]) -> Result<RingMatrix, RepError> {
    let b = bvv(v, w)?;
    let rv = root_vectors(v, word)?;
    let rw = root_vectors(w, word)?;
    let (dv, dw) = (v.dim(), w.dim());
    let mut acc = RingMatrix::identity(dv * dw);
    for (x, y) in rv.iter().zip(&rw) {
        let qb = Laurent::q_rat(&x.d);
        let qb_inv = qb.inv()?;
        let base = &Laurent::one() - &(&qb_inv * &qb_inv);
        let mut factor = RingMatrix::identity(dv * dw);
        let mut er = RingMatrix::identity(dv);
        let mut fr = RingMatrix::identity(dw);
        let mut r = 0u32;
        loop {
            r += 1;
            er = er.matmul(&x.e)?;
            fr = fr.matmul(&y.f)?;
            if er.is_zero() || fr.is_zero() {
                break;
            }
            if r as usize > dv.max(dw) {
                return Err(RepError::NonNilpotent(format!("{:?}", x.root)));
            }
            let c = &base.pow(r) * &Laurent::q_rat(&(&x.d * int((r * (r + 1) / 2) as i64)));
            // divided on the product: a leg alone need not be divisible by [r]!
            let term = er.kron(&fr).try_map(|s| s.div_exact(&q_factorial(r, &x.d)))?;
            factor = factor.add(&term.scale(&c.into()))?;
        }
        acc = acc.matmul(&factor)?;
    }
    Ok(b.matmul(&acc)?.transpose())
}

/// Weights from `x_0` by walking raising edges `(node, from, to)`.
fn weights_from_edges(c: &CartanData, dim: usize, lowest: Vec<Rational>, edges: &[(usize, usize, usize)]) -> Vec<Vec<Rational>> {
    let mut w: Vec<Option<Vec<Rational>>> = vec![None; dim];
    w[0] = Some(lowest);
    loop {
        let mut changed = false;
        for &(node, a, b) in edges {
            if let (Some(x), None) = (w[a].clone(), &w[b]) {
                let r = c.root(node);
                w[b] = Some(x.iter().zip(&r).map(|(p, q)| p + q).collect());
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    w.into_iter().map(|x| x.expect("weight graph is connected")).collect()
}

/// `E_node x_from = c x_to`, `F_node x_to = c' x_from`.
struct Edge {
    node: usize,
    from: usize,
    to: usize,
    e: Scalar,
    f: Scalar,
}

fn from_edges(label: &str, c: CartanData, dim: usize, lowest: Vec<Rational>, edges: Vec<Edge>) -> Result<Representation, RepError> {
    let r = c.rank();
    let plain: Vec<(usize, usize, usize)> = edges.iter().map(|x| (x.node, x.from, x.to)).collect();
    let weights = weights_from_edges(&c, dim, lowest, &plain);
    let mut e = Vec::new();
    let mut f = Vec::new();
    for i in 0..r {
        let es: Vec<_> = edges.iter().filter(|x| x.node == i).map(|x| (x.to, x.from, x.e.clone())).collect();
        let fs: Vec<_> = edges.iter().filter(|x| x.node == i).map(|x| (x.from, x.to, x.f.clone())).collect();
        e.push(elem(dim, &es));
        f.push(elem(dim, &fs));
    }
    Representation::new(label, c, e, f, weights)
}

fn edge(node: usize, from: usize, to: usize, e: Scalar, f: Scalar) -> Edge {
    Edge { node, from, to, e, f }
}

fn unit(node: usize, from: usize, to: usize) -> Edge {
    edge(node, from, to, Scalar::one(), Scalar::one())
}

/// The `(n+1)`-dimensional module of `sl_{n+1}` with `E_i x_i = x_{i+1}` and
/// `x_1` of lowest weight `-lambda_1`.
pub fn sl_dual(rank: usize) -> Result<Representation, RepError> {
    let c = cartan(Series::A, rank)?;
    let mut low = vec![int(0); rank];
    low[0] = int(-1);
    let edges = (0..rank).map(|i| unit(i, i, i + 1)).collect();
    from_edges(&format!("V(A{rank})"), c, rank + 1, low, edges)
}

/// Signs on the mirrored edges of the B, C, D vector modules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorGauge {
    pub mirrored: i64,
    pub special: Vec<i64>,
    /// Series B: the second short edge carries `E = +-s q^{shift}`, `F = +-s q^{-shift}`.
    pub shift: Rational,
}

impl VectorGauge {
    /// The gauge matching both the closed-form R-matrix and the tabulated `m+-` entries.
    pub fn standard(series: Series) -> Self {
        match series {
            Series::D => VectorGauge { mirrored: -1, special: vec![1, -1, -1], shift: int(0) },
            Series::B => VectorGauge { mirrored: -1, special: vec![-1], shift: rat(1, 2) },
            Series::C => VectorGauge { mirrored: -1, special: vec![1], shift: int(0) },
            Series::A => VectorGauge { mirrored: 1, special: vec![], shift: int(0) },
        }
    }
}

/// Coordinates in the fundamental basis of `sum_i c_i eps_i`.
fn eps_to_fundamental(case: &SeriesCase, c: &CartanData, eps: &[Rational]) -> Vec<Rational> {
    let n = case.rank;
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        // the simple root of node k in eps coordinates
        let mut a = vec![int(0); n];
        if k == 0 || (k == 1 && case.series == Series::D) {
            match case.series {
                Series::B => a[n - 1] = int(1),
                Series::C => a[n - 1] = int(2),
                _ => {
                    a[n - 2] = int(1);
                    a[n - 1] = int(if k == 0 { 1 } else { -1 });
                }
            }
        } else {
            let i = n - 1 - k;
            a[i] = int(1);
            a[i + 1] = int(-1);
        }
        let dot = |x: &[Rational], y: &[Rational]| x.iter().zip(y).fold(int(0), |s, (p, q)| s + p * q);
        let _ = c;
        out.push(int(2) * dot(&a, eps) / dot(&a, &a));
    }
    out
}

/// The vector module of B, C or D in the gauge `g`: `x_i` has weight
/// `-eps_i` for `i <= n` and `x_{i'}` weight `+eps_i`.
pub fn bcd_vector(case: &SeriesCase, g: &VectorGauge) -> Result<Representation, RepError> {
    let c = cartan(case.series, case.rank)?;
    let n = case.rank;
    let big = case.dim();
    let conj = |i: usize| big - 1 - i; // 0-based
    let sg = |s: i64| Scalar::from(s);
    let mut edges = Vec::new();
    let first = if case.series == Series::D { 2 } else { 1 };
    for k in first..n {
        let i = n - 1 - k;
        edges.push(unit(k, i, i + 1));
        edges.push(edge(k, conj(i + 1), conj(i), sg(g.mirrored), sg(g.mirrored)));
    }
    match case.series {
        Series::B => {
            let s = Scalar::sqrt_of(Arc::new(type_b_modulus()));
            let t = &s * &sg(g.special[0]);
            let (up, down) = (Scalar::q_rat(&g.shift), Scalar::q_rat(&-&g.shift));
            edges.push(edge(0, n - 1, n, s.clone(), s));
            edges.push(edge(0, n, n + 1, &t * &up, &t * &down));
        }
        Series::C => edges.push(edge(0, n - 1, n, sg(g.special[0]), sg(g.special[0]))),
        Series::D => {
            edges.push(edge(0, n - 2, n, sg(g.special[0]), sg(g.special[0])));
            edges.push(edge(0, n - 1, n + 1, sg(g.special[1]), sg(g.special[1])));
            edges.push(unit(1, n - 2, n - 1));
            edges.push(edge(1, n, n + 1, sg(g.special[2]), sg(g.special[2])));
        }
        Series::A => return Err(RepError::UnknownCase("bcd_vector of type A".into())),
    }
    let mut eps = vec![int(0); n];
    eps[0] = int(-1);
    let low = eps_to_fundamental(case, &c, &eps);
    from_edges(&format!("V({:?}{})", case.series, n), c, big, low, edges)
}

/// The vector module of a classical series; type A uses [`sl_dual`].
pub fn vector_rep(case: &SeriesCase) -> Result<Representation, RepError> {
    match case.series {
        Series::A => sl_dual(case.rank),
        s => bcd_vector(case, &VectorGauge::standard(s)),
    }
}

/// The modules of the type-crossing constructions, as printed.
pub fn crossing_rep(family: &Family) -> Result<Representation, RepError> {
    let two: Scalar = (&Laurent::q() + &Laurent::q_pow(-1, 1)).into();
    let one = Scalar::one;
    match family {
        Family::A1B2 => {
            let c = cartan(Series::A, 1)?;
            let edges = vec![edge(0, 0, 1, two.clone(), one()), edge(0, 1, 2, two, one())];
            from_edges("V(A1B2)", c, 3, vec![int(-2)], edges)
        }
        Family::A2C3 => {
            let c = cartan(Series::A, 2)?;
            let edges = vec![
                edge(0, 0, 1, one(), two.clone()),
                edge(0, 1, 3, two.clone(), one()),
                edge(0, 2, 4, one(), one()),
                edge(1, 1, 2, one(), one()),
                edge(1, 3, 4, one(), two.clone()),
                edge(1, 4, 5, two, one()),
            ];
            from_edges("V(A2C3)", c, 6, vec![int(-2), int(0)], edges)
        }
        Family::A3D4 => {
            let c = cartan(Series::A, 3)?;
            let edges = vec![
                unit(0, 1, 3),
                unit(0, 2, 4),
                unit(1, 0, 1),
                unit(1, 4, 5),
                unit(2, 1, 2),
                unit(2, 3, 4),
            ];
            from_edges("V(A3D4)", c, 6, vec![int(0), int(-1), int(0)], edges)
        }
        Family::Series(s) => Err(RepError::UnknownCase(format!("{s:?} is not a crossing"))),
    }
}

/// The vector module of the target group of a crossing, with the base
/// nodes first (in base order) and the new node last. For `A1B2` the target
/// is `so_5` with symmetrizers `(1, 2)`, the base node being short.
pub fn crossing_target(family: &Family) -> Result<Representation, RepError> {
    match family {
        Family::A1B2 => {
            let c = CartanData::new("B2(1,2)", vec![vec![2, -2], vec![-1, 2]], vec![int(1), int(2)])?;
            let two: Scalar = q_integer_scalar(2);
            let edges = vec![
                unit(1, 0, 1),
                edge(0, 1, 2, two.clone(), Scalar::one()),
                edge(0, 2, 3, Scalar::one(), two),
                edge(1, 3, 4, Scalar::from(-1), Scalar::from(-1)),
            ];
            from_edges("V(B2)", c, 5, vec![int(0), int(-1)], edges)
        }
        Family::A2C3 => vector_rep(&SeriesCase::new(Series::C, 3).map_err(|_| cartan_err(Series::C, 3))?)?
            .permute_nodes(&[2, 1, 0], "C3(A2+1)"),
        Family::A3D4 => vector_rep(&SeriesCase::new(Series::D, 4).map_err(|_| cartan_err(Series::D, 4))?)?
            .permute_nodes(&[0, 2, 3, 1], "D4(A3+1)"),
        Family::Series(s) => Err(RepError::UnknownCase(format!("{s:?} is not a crossing"))),
    }
}

fn q_integer_scalar(n: u32) -> Scalar {
    crate::scalar::q_integer(n, &int(1)).into()
}

/// The module whose `R_VV` a family's `R` is built from.
pub fn family_rep(family: &Family) -> Result<Representation, RepError> {
    match family {
        Family::Series(c) => vector_rep(c),
        f => crossing_rep(f),
    }
}

/// `lambda^{-1} R_VV`, the normalized R-matrix of a family.
pub fn family_r(family: &Family) -> Result<RingMatrix, RepError> {
    let v = family_rep(family)?;
    let rvv = universal_r(&v, &v)?;
    Ok(rvv.scale(&family.lambda().inv()?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gram_is_symmetric() {
        for (s, n) in [(Series::A, 3), (Series::B, 3), (Series::C, 3), (Series::D, 4)] {
            let c = cartan(s, n).unwrap();
            for i in 0..n {
                for j in 0..n {
                    assert_eq!(c.gram[i][j], c.gram[j][i]);
                }
            }
        }
    }

    #[test]
    fn longest_word_lengths() {
        let len = |s, n| cartan(s, n).unwrap().longest_word().len();
        assert_eq!(len(Series::A, 3), 6);
        assert_eq!(len(Series::B, 3), 9);
        assert_eq!(len(Series::C, 3), 9);
        assert_eq!(len(Series::D, 4), 12);
    }

    #[test]
    fn rejects_non_reduced_word() {
        let c = cartan(Series::A, 2).unwrap();
        assert!(c.check_longest(&[0, 1, 0]).is_ok());
        assert!(matches!(c.check_longest(&[0, 0, 1]), Err(RepError::NotReduced(_))));
    }
}
