//! Symbolic quantum-group words, the tabulated FRT matrices `m+-`, their
//! evaluation in representations, the pairing-derived images and the
//! `R m1 m2 = m2 m1 R` checker.
//!
//! Letters of an expression are read in the base algebra `U'`, the opposite
//! of the algebra the representations carry. Evaluation therefore sends
//! `K_i^p` to `rho(K_i)^{-p}`, and `E_i`, `F_i` to `rho(E_i)`, `rho(F_i)` up
//! to the signs of an [`EvalSigns`].

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::repcat::{universal_r, RepError, Representation};
use crate::rmatrix::{Family, RMatrixError, Series, SeriesCase};
use crate::scalar::{int, q_integer, rat, type_b_modulus, Laurent, Rational, Scalar, ScalarError};
use crate::tensor::{RingMatrix, TensorError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FrtError {
    #[error("rank {1} is out of range for series {0:?}")]
    RankOutOfRange(Series, usize),
    #[error("unknown table {0:?}")]
    UnknownCase(String),
    #[error("letter {0} does not exist in a rank-{1} representation")]
    LetterOutOfRange(String, usize),
    #[error("expression uses c but no image of c was supplied")]
    MissingC,
    #[error("cannot parse expression: {0}")]
    Parse(String),
    #[error("no convention agrees with table {table}: best {best} matched {agreed} of {total}")]
    ConventionMismatch { table: String, best: String, agreed: usize, total: usize },
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    RMatrix(#[from] RMatrixError),
}

/// A generator of the base algebra. Node indices are 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Letter {
    E(usize),
    F(usize),
    K(usize, Rational),
    C(i64),
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::E(i) => write!(f, "E{}", i + 1),
            Letter::F(i) => write!(f, "F{}", i + 1),
            Letter::K(i, p) if p == &int(1) => write!(f, "K{}", i + 1),
            Letter::K(i, p) => write!(f, "K{}^({})", i + 1, p),
            Letter::C(1) => write!(f, "c"),
            Letter::C(p) => write!(f, "c^({p})"),
        }
    }
}

impl FromStr for Letter {
    type Err = FrtError;
    fn from_str(s: &str) -> Result<Self, FrtError> {
        let bad = || FrtError::Parse(format!("letter {s:?}"));
        let (head, exp) = match s.split_once('^') {
            Some((h, e)) => {
                let e = e.strip_prefix('(').and_then(|e| e.strip_suffix(')')).unwrap_or(e);
                let e = e.replace('\u{2212}', "-");
                (h, Some(crate::scalar::parse_rational(&e).ok_or_else(bad)?))
            }
            None => (s, None),
        };
        if head == "c" {
            let p = exp.unwrap_or_else(|| int(1));
            if !p.is_integer() {
                return Err(bad());
            }
            return Ok(Letter::C(p.to_integer().try_into().map_err(|_| bad())?));
        }
        let (kind, idx) = head.split_at(1);
        let i: usize = idx.parse().map_err(|_| bad())?;
        if i == 0 {
            return Err(bad());
        }
        match (kind, exp) {
            ("E", None) => Ok(Letter::E(i - 1)),
            ("F", None) => Ok(Letter::F(i - 1)),
            ("K", p) => Ok(Letter::K(i - 1, p.unwrap_or_else(|| int(1)))),
            _ => Err(bad()),
        }
    }
}

/// `coeff / denom` times a word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coeff: Scalar,
    pub denom: Laurent,
    pub word: Vec<Letter>,
}

/// A formal sum of scalar-weighted words, stored as written.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct QGExpression {
    pub terms: Vec<Term>,
}

fn push_letter(word: &mut Vec<Letter>, l: Letter) {
    if let (Some(Letter::K(i, p)), Letter::K(j, r)) = (word.last_mut(), &l) {
        if i == j {
            *p = &*p + r;
            if p.numer() == &num_bigint::BigInt::from(0) {
                word.pop();
            }
            return;
        }
    }
    word.push(l);
}

impl QGExpression {
    pub fn zero() -> Self {
        QGExpression { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::word(Scalar::one(), Vec::new())
    }

    /// A single term; adjacent `K` letters of one node are merged.
    pub fn word(coeff: impl Into<Scalar>, letters: Vec<Letter>) -> Self {
        let mut w = Vec::new();
        for l in letters {
            push_letter(&mut w, l);
        }
        QGExpression { terms: vec![Term { coeff: coeff.into(), denom: Laurent::one(), word: w }] }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        QGExpression { terms: self.terms.iter().map(|t| Term { coeff: &t.coeff * c, ..t.clone() }).collect() }
    }

    /// Divides every coefficient by `d` formally; evaluation performs the exact division.
    pub fn divide(&self, d: &Laurent) -> Self {
        QGExpression { terms: self.terms.iter().map(|t| Term { denom: &t.denom * d, ..t.clone() }).collect() }
    }

    pub fn plus(&self, other: &Self) -> Self {
        QGExpression { terms: self.terms.iter().chain(&other.terms).cloned().collect() }
    }

    pub fn minus(&self, other: &Self) -> Self {
        self.plus(&other.scale(&Scalar::from(-1)))
    }

    /// Concatenation of words, distributed over the sums.
    pub fn times(&self, other: &Self) -> Self {
        let mut terms = Vec::new();
        for a in &self.terms {
            for b in &other.terms {
                let mut w = a.word.clone();
                for l in &b.word {
                    push_letter(&mut w, l.clone());
                }
                terms.push(Term { coeff: &a.coeff * &b.coeff, denom: &a.denom * &b.denom, word: w });
            }
        }
        QGExpression { terms }
    }

    /// `[a, b]_s = a b - s b a`.
    pub fn q_commutator(a: &Self, b: &Self, s: &Scalar) -> Self {
        a.times(b).minus(&b.times(a).scale(s))
    }

    pub fn letters(&self) -> impl Iterator<Item = &Letter> {
        self.terms.iter().flat_map(|t| t.word.iter())
    }
}

impl fmt::Display for QGExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, t) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "[{}]", t.coeff)?;
            if !t.denom.is_one() {
                write!(f, "/[{}]", t.denom)?;
            }
            for l in &t.word {
                write!(f, " {l}")?;
            }
        }
        Ok(())
    }
}

fn take_bracket(s: &str) -> Option<(&str, &str)> {
    let s = s.trim_start().strip_prefix('[')?;
    let end = s.find(']')?;
    Some((&s[..end], &s[end + 1..]))
}

impl QGExpression {
    /// Parses the dump grammar; radicals are read against `modulus`.
    pub fn parse_with_modulus(text: &str, modulus: Option<Arc<Laurent>>) -> Result<Self, FrtError> {
        let text = text.trim();
        if text == "0" {
            return Ok(Self::zero());
        }
        let bad = |m: &str| FrtError::Parse(format!("{m} in {text:?}"));
        let mut terms = Vec::new();
        let mut rest = text;
        loop {
            let (c, r) = take_bracket(rest).ok_or_else(|| bad("missing coefficient"))?;
            let coeff = Scalar::parse_with_modulus(c, modulus.clone())?;
            let mut r = r;
            let mut denom = Laurent::one();
            if let Some(after) = r.strip_prefix('/') {
                let (d, r2) = take_bracket(after).ok_or_else(|| bad("missing denominator"))?;
                denom = d.parse()?;
                r = r2;
            }
            // the word runs to the next " + [" or the end
            let (word_text, next) = match r.find(" + [") {
                Some(p) => (&r[..p], Some(&r[p + 3..])),
                None => (r, None),
            };
            let mut word = Vec::new();
            for tok in word_text.split_whitespace() {
                push_letter(&mut word, tok.parse()?);
            }
            terms.push(Term { coeff, denom, word });
            match next {
                Some(n) => rest = n,
                None => break,
            }
        }
        Ok(QGExpression { terms })
    }
}

impl FromStr for QGExpression {
    type Err = FrtError;
    fn from_str(s: &str) -> Result<Self, FrtError> {
        Self::parse_with_modulus(s, Some(Arc::new(type_b_modulus())))
    }
}

/// Signs attached to `E` and `F` letters under evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct EvalSigns {
    pub e: i64,
    pub f: i64,
}

impl EvalSigns {
    pub const PLAIN: EvalSigns = EvalSigns { e: 1, f: 1 };
    pub const ALL: [EvalSigns; 4] =
        [EvalSigns { e: 1, f: 1 }, EvalSigns { e: 1, f: -1 }, EvalSigns { e: -1, f: 1 }, EvalSigns { e: -1, f: -1 }];
}

fn letter_matrix(
    l: &Letter,
    rep: &Representation,
    c_image: Option<&RingMatrix>,
    signs: EvalSigns,
) -> Result<RingMatrix, FrtError> {
    let r = rep.rank();
    let check = |i: usize| if i < r { Ok(()) } else { Err(FrtError::LetterOutOfRange(l.to_string(), r)) };
    Ok(match l {
        Letter::E(i) => {
            check(*i)?;
            rep.e[*i].scale(&Scalar::from(signs.e))
        }
        Letter::F(i) => {
            check(*i)?;
            rep.f[*i].scale(&Scalar::from(signs.f))
        }
        Letter::K(i, p) => {
            check(*i)?;
            rep.k_pow(*i, &-p)
        }
        Letter::C(p) => {
            let c = c_image.ok_or(FrtError::MissingC)?;
            if *p >= 0 {
                c.pow(*p as u32)?
            } else {
                c.diagonal_inverse()?.pow(p.unsigned_abs() as u32)?
            }
        }
    })
}

/// Evaluates an expression in `rep` with the plain signs.
pub fn eval_expr(expr: &QGExpression, rep: &Representation, c_image: Option<&RingMatrix>) -> Result<RingMatrix, FrtError> {
    eval_expr_signed(expr, rep, c_image, EvalSigns::PLAIN)
}

pub fn eval_expr_signed(
    expr: &QGExpression,
    rep: &Representation,
    c_image: Option<&RingMatrix>,
    signs: EvalSigns,
) -> Result<RingMatrix, FrtError> {
    let n = rep.dim();
    let mut out = RingMatrix::zeros(n, n);
    for t in &expr.terms {
        let mut m = RingMatrix::identity(n);
        for l in &t.word {
            m = m.matmul(&letter_matrix(l, rep, c_image, signs)?)?;
        }
        let mut m = m.scale(&t.coeff);
        if !t.denom.is_one() {
            m = m.try_map(|s| s.div_exact(&t.denom))?;
        }
        out = out.add(&m)?;
    }
    Ok(out)
}

/// A tabulated entry; `known` marks the positions the tables are checked on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableEntry {
    pub expr: QGExpression,
    pub known: bool,
}

/// Partially known symbolic `m+` and `m-`. Indices are 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FRTTable {
    pub name: String,
    pub dim: usize,
    pub plus: Vec<Vec<Option<TableEntry>>>,
    pub minus: Vec<Vec<Option<TableEntry>>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

impl FRTTable {
    pub fn empty(name: impl Into<String>, dim: usize) -> Self {
        FRTTable { name: name.into(), dim, plus: vec![vec![None; dim]; dim], minus: vec![vec![None; dim]; dim] }
    }

    /// Sets a 1-based entry.
    pub fn set(&mut self, sign: Sign, i: usize, j: usize, expr: QGExpression, known: bool) {
        let m = match sign {
            Sign::Plus => &mut self.plus,
            Sign::Minus => &mut self.minus,
        };
        m[i - 1][j - 1] = Some(TableEntry { expr, known });
    }

    /// 0-based entry lookup.
    pub fn get(&self, sign: Sign, i: usize, j: usize) -> Option<&TableEntry> {
        match sign {
            Sign::Plus => self.plus[i][j].as_ref(),
            Sign::Minus => self.minus[i][j].as_ref(),
        }
    }

    /// Every filled position in row-major order, plus before minus.
    pub fn entries(&self) -> Vec<(Sign, usize, usize, &TableEntry)> {
        let mut out = Vec::new();
        for (sign, m) in [(Sign::Plus, &self.plus), (Sign::Minus, &self.minus)] {
            for (i, row) in m.iter().enumerate() {
                for (j, e) in row.iter().enumerate() {
                    if let Some(e) = e {
                        out.push((sign, i, j, e));
                    }
                }
            }
        }
        out
    }

    pub fn known_count(&self) -> usize {
        self.entries().iter().filter(|e| e.3.known).count()
    }

    /// One line per filled entry: `m+ i j known|shown: expr` (1-based).
    pub fn dump(&self) -> String {
        let mut s = format!("table {} {}\n", self.name, self.dim);
        for (sign, i, j, e) in self.entries() {
            let tag = if e.known { "known" } else { "shown" };
            s.push_str(&format!("m{} {} {} {}: {}\n", sign, i + 1, j + 1, tag, e.expr));
        }
        s
    }

    pub fn parse_dump(text: &str) -> Result<Self, FrtError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let bad = |l: &str| FrtError::Parse(format!("table line {l:?}"));
        let head = lines.next().ok_or_else(|| bad(""))?;
        let mut h = head.split_whitespace();
        if h.next() != Some("table") {
            return Err(bad(head));
        }
        let name = h.next().ok_or_else(|| bad(head))?;
        let dim: usize = h.next().and_then(|d| d.parse().ok()).ok_or_else(|| bad(head))?;
        let mut t = FRTTable::empty(name, dim);
        for line in lines {
            let (lhs, rhs) = line.split_once(": ").ok_or_else(|| bad(line))?;
            let f: Vec<&str> = lhs.split_whitespace().collect();
            if f.len() != 4 {
                return Err(bad(line));
            }
            let sign = match f[0] {
                "m+" => Sign::Plus,
                "m-" => Sign::Minus,
                _ => return Err(bad(line)),
            };
            let i: usize = f[1].parse().map_err(|_| bad(line))?;
            let j: usize = f[2].parse().map_err(|_| bad(line))?;
            if i == 0 || j == 0 || i > dim || j > dim {
                return Err(bad(line));
            }
            let known = match f[3] {
                "known" => true,
                "shown" => false,
                _ => return Err(bad(line)),
            };
            t.set(sign, i, j, rhs.parse()?, known);
        }
        Ok(t)
    }
}

fn t_scalar() -> Scalar {
    (&Laurent::q() - &Laurent::q_pow(-1, 1)).into()
}

fn qq(a: i64) -> Scalar {
    Scalar::q_pow(a, 1)
}

/// `K` letters from 1-based `(node, exponent)` pairs, dropping zero exponents.
fn ks(parts: &[(usize, Rational)]) -> Vec<Letter> {
    parts.iter().filter(|(_, p)| p != &int(0)).map(|(i, p)| Letter::K(i - 1, p.clone())).collect()
}

fn kword(parts: &[(usize, Rational)]) -> QGExpression {
    QGExpression::word(Scalar::one(), ks(parts))
}

fn e(i: usize) -> QGExpression {
    QGExpression::word(Scalar::one(), vec![Letter::E(i - 1)])
}

fn f(i: usize) -> QGExpression {
    QGExpression::word(Scalar::one(), vec![Letter::F(i - 1)])
}

/// Diagonal and minor-diagonal entries for `U_q(sl_n)` on its `n`-dimensional module.
pub fn mtable_type_a(n: usize) -> Result<FRTTable, FrtError> {
    if n < 2 {
        return Err(FrtError::RankOutOfRange(Series::A, n.saturating_sub(1)));
    }
    let nn = n as i64;
    let plus_exp = |k: usize, cut: usize| -> Rational {
        if k <= cut {
            rat(-(k as i64), nn)
        } else {
            rat(nn - k as i64, nn)
        }
    };
    let mut t = FRTTable::empty(format!("A{}", n - 1), n);
    for i in 1..=n {
        let diag: Vec<_> = (1..n).map(|k| (k, plus_exp(k, i - 1))).collect();
        let inv: Vec<_> = diag.iter().map(|(k, p)| (*k, -p)).collect();
        t.set(Sign::Plus, i, i, kword(&diag), true);
        t.set(Sign::Minus, i, i, kword(&inv), true);
        if i < n {
            let side: Vec<_> = (1..n).map(|k| (k, plus_exp(k, i))).collect();
            let inv: Vec<_> = side.iter().map(|(k, p)| (*k, -p)).collect();
            t.set(Sign::Plus, i, i + 1, e(i).times(&kword(&side)).scale(&t_scalar()), true);
            t.set(Sign::Minus, i + 1, i, kword(&inv).times(&f(i)).scale(&t_scalar()), true);
        }
    }
    Ok(t)
}

/// `(q^{1/2}+q^{-1/2})^{1/2} (q^{1/2}-q^{-1/2})`.
pub fn c0() -> Scalar {
    Scalar::extended(
        Laurent::zero(),
        &Laurent::q_pow(1, 2) - &Laurent::q_pow(-1, 2),
        Arc::new(type_b_modulus()),
    )
}

/// Diagonal and minor-diagonal entries for series B, C, D on the vector module.
pub fn mtable_bcd(case: &SeriesCase) -> Result<FRTTable, FrtError> {
    let n = case.rank;
    let big = case.dim();
    let neg_t = -t_scalar();
    let half = rat(1, 2);
    let mut t = FRTTable::empty(format!("{:?}{}", case.series, n), big);
    let run = |from: usize, to: usize, p: i64| -> Vec<(usize, Rational)> { (from..=to).map(|k| (k, int(p))).collect() };
    let neg = |v: &[(usize, Rational)]| -> Vec<(usize, Rational)> { v.iter().map(|(k, p)| (*k, -p)).collect() };
    match case.series {
        Series::B => {
            for i in 1..=n {
                let d = run(1, n + 1 - i, 1);
                t.set(Sign::Plus, i, i, kword(&d), true);
                t.set(Sign::Minus, i, i, kword(&neg(&d)), true);
            }
            t.set(Sign::Plus, n + 1, n + 1, QGExpression::one(), true);
            t.set(Sign::Minus, n + 1, n + 1, QGExpression::one(), true);
            for i in 1..n {
                let side = run(1, n - i, 1);
                t.set(Sign::Plus, i, i + 1, e(n + 1 - i).times(&kword(&side)).scale(&neg_t), true);
                t.set(Sign::Minus, i + 1, i, kword(&neg(&side)).times(&f(n + 1 - i)).scale(&t_scalar()), true);
            }
            t.set(Sign::Plus, n, n + 1, e(1).scale(&-c0()), true);
            t.set(Sign::Minus, n + 1, n, f(1).scale(&c0()), true);
        }
        Series::C => {
            let two = &qq(2) - &qq(-2);
            for i in 1..=n {
                let mut d = vec![(1, half.clone())];
                d.extend(run(2, n + 1 - i, 1));
                t.set(Sign::Plus, i, i, kword(&d), true);
                t.set(Sign::Plus, big + 1 - i, big + 1 - i, kword(&neg(&d)), true);
                t.set(Sign::Minus, i, i, kword(&neg(&d)), true);
                t.set(Sign::Minus, big + 1 - i, big + 1 - i, kword(&d), true);
            }
            for i in 1..n {
                let mut side = vec![(1, half.clone())];
                side.extend(run(2, n - i, 1));
                t.set(Sign::Plus, i, i + 1, e(n + 1 - i).times(&kword(&side)).scale(&neg_t), true);
                t.set(Sign::Minus, i + 1, i, kword(&neg(&side)).times(&f(n + 1 - i)).scale(&t_scalar()), true);
            }
            t.set(Sign::Plus, n, n + 1, e(1).times(&kword(&[(1, -&half)])).scale(&-&two), true);
            t.set(Sign::Minus, n + 1, n, kword(&[(1, half)]).times(&f(1)).scale(&two), true);
        }
        Series::D => {
            let pair = |a: Rational, b: Rational| vec![(1, a), (2, b)];
            for i in 1..=n - 2 {
                let mut d = pair(half.clone(), half.clone());
                d.extend(run(3, n + 1 - i, 1));
                t.set(Sign::Plus, i, i, kword(&d), true);
                t.set(Sign::Plus, big + 1 - i, big + 1 - i, kword(&neg(&d)), true);
                t.set(Sign::Minus, i, i, kword(&neg(&d)), true);
                t.set(Sign::Minus, big + 1 - i, big + 1 - i, kword(&d), true);
            }
            t.set(Sign::Plus, n - 1, n - 1, kword(&pair(half.clone(), half.clone())), true);
            t.set(Sign::Plus, n, n, kword(&pair(half.clone(), -&half)), true);
            t.set(Sign::Minus, n - 1, n - 1, kword(&pair(-&half, -&half)), true);
            t.set(Sign::Minus, n, n, kword(&pair(-&half, half.clone())), true);
            for i in 1..n {
                let mut side = pair(half.clone(), half.clone());
                side.extend(run(3, n - i, 1));
                t.set(Sign::Plus, i, i + 1, e(n + 1 - i).times(&kword(&side)).scale(&neg_t), true);
                t.set(Sign::Minus, i + 1, i, kword(&neg(&side)).times(&f(n + 1 - i)).scale(&t_scalar()), true);
            }
            t.set(Sign::Plus, n - 1, n + 1, e(1).times(&kword(&pair(-&half, half.clone()))).scale(&neg_t), true);
            t.set(Sign::Minus, n + 1, n - 1, kword(&pair(half.clone(), -&half)).times(&f(1)).scale(&t_scalar()), true);
        }
        Series::A => return mtable_type_a(n + 1),
    }
    Ok(t)
}

/// [`mtable_bcd`] with the series-D entries `(m+)^{n-1}_n`, `(m-)^n_{n-1}`
/// carrying `K_2^{-1/2}`, `K_2^{1/2}` as the pattern `(m+)^i_j ~ E (m+)^j_j`
/// requires; other series are returned unchanged.
pub fn mtable_bcd_amended(case: &SeriesCase) -> Result<FRTTable, FrtError> {
    let mut t = mtable_bcd(case)?;
    if case.series == Series::D {
        let n = case.rank;
        let half = rat(1, 2);
        let tq = t_scalar();
        t.name = format!("D{n}*");
        let side = vec![(1, half.clone()), (2, -&half)];
        let inv = vec![(1, -&half), (2, half)];
        t.set(Sign::Plus, n - 1, n, e(2).times(&kword(&side)).scale(&-&tq), true);
        t.set(Sign::Minus, n, n - 1, kword(&inv).times(&f(2)).scale(&tq), true);
    }
    Ok(t)
}

/// The worked-example tables: `"3.1"`, `"4.1"` (complete `3x3`), `"4.2"`, `"4.3"` (partial).
pub fn mtable_example(tag: &str) -> Result<FRTTable, FrtError> {
    let tq = t_scalar();
    let third = |a: i64, b: i64| vec![(1, rat(a, 3)), (2, rat(b, 3))];
    let halves = |a: i64, b: i64, c: i64| vec![(1, rat(a, 2)), (2, rat(b, 2)), (3, rat(c, 2))];
    let zero = QGExpression::zero;
    match tag {
        "3.1" => {
            let mut t = FRTTable::empty("Ex3.1", 3);
            t.set(Sign::Plus, 1, 1, kword(&third(2, 1)), true);
            t.set(Sign::Plus, 1, 2, e(1).times(&kword(&third(-1, 1))).scale(&tq), true);
            let e12 = QGExpression::q_commutator(&e(1), &e(2), &qq(-1));
            t.set(Sign::Plus, 1, 3, e12.times(&kword(&third(-1, -2))).scale(&(&qq(-1) * &tq)), false);
            t.set(Sign::Plus, 2, 2, kword(&third(-1, 1)), true);
            t.set(Sign::Plus, 2, 3, e(2).times(&kword(&third(-1, -2))).scale(&tq), true);
            t.set(Sign::Plus, 3, 3, kword(&third(-1, -2)), true);
            t.set(Sign::Minus, 1, 1, kword(&third(-2, -1)), true);
            t.set(Sign::Minus, 2, 1, kword(&third(1, -1)).times(&f(1)).scale(&tq), true);
            t.set(Sign::Minus, 2, 2, kword(&third(1, -1)), true);
            let f21 = QGExpression::q_commutator(&f(2), &f(1), &qq(1));
            t.set(Sign::Minus, 3, 1, kword(&third(1, 2)).times(&f21).scale(&(&qq(1) * &tq)), false);
            t.set(Sign::Minus, 3, 2, kword(&third(1, 2)).times(&f(2)).scale(&tq), true);
            t.set(Sign::Minus, 3, 3, kword(&third(1, 2)), true);
            for (i, j) in [(2, 1), (3, 1), (3, 2)] {
                t.set(Sign::Plus, i, j, zero(), false);
                t.set(Sign::Minus, j, i, zero(), false);
            }
            Ok(t)
        }
        "4.1" => {
            let mut t = FRTTable::empty("Ex4.1", 3);
            let k1 = |p: i64| kword(&[(1, int(p))]);
            let one_m = &Scalar::one() - &qq(-2);
            let two = q_integer(2, &int(1));
            t.set(Sign::Plus, 1, 1, k1(1), true);
            t.set(Sign::Plus, 1, 2, e(1).scale(&-&tq), true);
            let corner = e(1).times(&e(1)).times(&k1(-1)).scale(&(&qq(1) * &(&one_m * &one_m))).divide(&two);
            t.set(Sign::Plus, 1, 3, corner, false);
            t.set(Sign::Plus, 2, 2, QGExpression::one(), true);
            t.set(Sign::Plus, 2, 3, e(1).times(&k1(-1)).scale(&-&tq), true);
            t.set(Sign::Plus, 3, 3, k1(-1), true);
            let q4m1 = &qq(4) - &Scalar::one();
            t.set(Sign::Minus, 1, 1, k1(-1), true);
            t.set(Sign::Minus, 2, 1, f(1).scale(&q4m1), true);
            t.set(Sign::Minus, 2, 2, QGExpression::one(), true);
            let c31 = &(&qq(4) - &qq(2)) * &q4m1;
            t.set(Sign::Minus, 3, 1, k1(1).times(&f(1)).times(&f(1)).scale(&c31), false);
            t.set(Sign::Minus, 3, 2, k1(1).times(&f(1)).scale(&(&qq(2) - &qq(-2))), true);
            t.set(Sign::Minus, 3, 3, k1(1), true);
            for (i, j) in [(2, 1), (3, 1), (3, 2)] {
                t.set(Sign::Plus, i, j, zero(), false);
                t.set(Sign::Minus, j, i, zero(), false);
            }
            Ok(t)
        }
        "4.2" => {
            let mut t = FRTTable::empty("Ex4.2", 6);
            let two = &qq(2) - &qq(-2);
            t.set(Sign::Plus, 1, 2, e(1).times(&kword(&third(1, 2))).scale(&-&tq), true);
            t.set(Sign::Plus, 2, 2, kword(&third(1, 2)), true);
            t.set(Sign::Plus, 5, 6, e(2).times(&kword(&third(-2, -4))).scale(&-two), true);
            t.set(Sign::Plus, 6, 6, kword(&third(-2, -4)), true);
            t.set(Sign::Plus, 4, 4, kword(&third(-2, 2)), true);
            t.set(Sign::Minus, 5, 3, kword(&third(2, 1)).times(&f(1)).scale(&(&qq(1) * &tq)), true);
            t.set(Sign::Minus, 5, 5, kword(&third(2, 1)), true);
            t.set(Sign::Minus, 6, 5, kword(&third(2, 4)).times(&f(2)).scale(&tq), true);
            t.set(Sign::Minus, 6, 6, kword(&third(2, 4)), true);
            Ok(t)
        }
        "4.3" => {
            let mut t = FRTTable::empty("Ex4.3", 6);
            let qt = &qq(1) * &tq;
            t.set(Sign::Plus, 1, 2, e(2).times(&kword(&halves(1, 0, 1))).scale(&-&tq), true);
            t.set(Sign::Plus, 2, 2, kword(&halves(1, 0, 1)), true);
            t.set(Sign::Plus, 2, 3, e(3).times(&kword(&halves(1, 0, -1))).scale(&-&tq), true);
            t.set(Sign::Plus, 3, 3, kword(&halves(1, 0, -1)), true);
            t.set(Sign::Plus, 2, 4, e(1).times(&kword(&halves(-1, 0, 1))).scale(&-&tq), true);
            t.set(Sign::Plus, 4, 4, kword(&halves(-1, 0, 1)), true);
            t.set(Sign::Plus, 6, 6, kword(&halves(-1, -2, -1)), true);
            t.set(Sign::Minus, 2, 1, kword(&halves(-1, 0, -1)).times(&f(2)).scale(&qt), true);
            t.set(Sign::Minus, 2, 2, kword(&halves(-1, 0, -1)), true);
            t.set(Sign::Minus, 3, 2, kword(&halves(-1, 0, 1)).times(&f(3)).scale(&qt), true);
            t.set(Sign::Minus, 3, 3, kword(&halves(-1, 0, 1)), true);
            t.set(Sign::Minus, 5, 3, kword(&halves(1, 0, 1)).times(&f(1)).scale(&qt), true);
            t.set(Sign::Minus, 5, 5, kword(&halves(1, 0, 1)), true);
            Ok(t)
        }
        _ => Err(FrtError::UnknownCase(tag.to_string())),
    }
}

/// The tables attached to a base family: the general lemma table first,
/// then any worked-example table for that base.
pub fn tables_for(family: &Family) -> Result<Vec<FRTTable>, FrtError> {
    Ok(match family {
        Family::Series(c) if c.series == Series::A => {
            let mut v = vec![mtable_type_a(c.rank + 1)?];
            if c.rank == 2 {
                v.push(mtable_example("3.1")?);
            }
            v
        }
        Family::Series(c) => vec![mtable_bcd(c)?],
        Family::A1B2 => vec![mtable_example("4.1")?],
        Family::A2C3 => vec![mtable_example("4.2")?],
        Family::A3D4 => vec![mtable_example("4.3")?],
    })
}

/// How the pairing values `<m+-, t>` are read off a universal R-matrix.
///
/// `Hat` reads `m+` from `R_{V, hat W}` with `W` as the second leg and `m-`
/// from `R_{hat W, V}^{-1}`; the flipped variants exchange the two
/// R-matrices between `m+` and `m-`; `Direct` uses `W` itself in place of
/// `hat W`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Arrangement {
    Hat,
    HatFlipped,
    Direct,
    DirectFlipped,
}

impl Arrangement {
    pub const ALL: [Arrangement; 4] =
        [Arrangement::Hat, Arrangement::HatFlipped, Arrangement::Direct, Arrangement::DirectFlipped];
}

/// An arrangement together with the evaluation signs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Convention {
    pub arrangement: Arrangement,
    pub signs: EvalSigns,
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} E{:+} F{:+}", self.arrangement, self.signs.e, self.signs.f)
    }
}

impl Convention {
    pub fn candidates() -> Vec<Convention> {
        Arrangement::ALL
            .iter()
            .flat_map(|&arrangement| EvalSigns::ALL.iter().map(move |&signs| Convention { arrangement, signs }))
            .collect()
    }
}

/// Images of every `(m+-)^i_j` in one module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MImages {
    pub n: usize,
    pub m: usize,
    pub plus: Vec<RingMatrix>,
    pub minus: Vec<RingMatrix>,
}

impl MImages {
    /// 0-based.
    pub fn get(&self, sign: Sign, i: usize, j: usize) -> &RingMatrix {
        match sign {
            Sign::Plus => &self.plus[i * self.n + j],
            Sign::Minus => &self.minus[i * self.n + j],
        }
    }

    pub fn get_mut(&mut self, sign: Sign, i: usize, j: usize) -> &mut RingMatrix {
        match sign {
            Sign::Plus => &mut self.plus[i * self.n + j],
            Sign::Minus => &mut self.minus[i * self.n + j],
        }
    }
}

/// Operator blocks of a `V (x) W` matrix, with `V` the first leg.
fn blocks_first(x: &RingMatrix, n: usize, m: usize) -> Vec<RingMatrix> {
    let mut out = vec![RingMatrix::zeros(m, m); n * n];
    for (r, c, s) in x.entries() {
        let (i, k, j, l) = (r / m, r % m, c / m, c % m);
        out[i * n + j].set(k, l, s.clone());
    }
    out
}

/// Operator blocks of a `W (x) V` matrix, with `V` the second leg.
fn blocks_second(y: &RingMatrix, n: usize, m: usize) -> Vec<RingMatrix> {
    let mut out = vec![RingMatrix::zeros(m, m); n * n];
    for (r, c, s) in y.entries() {
        let (k, i, l, j) = (r / n, r % n, c / n, c % n);
        out[i * n + j].set(k, l, s.clone());
    }
    out
}

/// Full `m+-` images in `w`, read from the universal R-matrix between the
/// vector module `v` and `w`. The normalization `lambda` cancels: the pairing
/// is `lambda R = R_VV` on `V (x) V`, which is what the universal R-matrix
/// restricts to.
pub fn m_image(v: &Representation, w: &Representation, arrangement: Arrangement) -> Result<MImages, FrtError> {
    let hatted = matches!(arrangement, Arrangement::Hat | Arrangement::HatFlipped);
    if hatted {
        match m_image_with(v, &w.hat(), arrangement) {
            Err(FrtError::Rep(RepError::Scalar(ScalarError::InexactDivision(..)))) => {}
            other => return other,
        }
        // hat W = S W S^{-1} for a diagonal S. The blocks come out transposed,
        // so the images in hat W are S^{-1} (..) S of those in W.
        if let Some((num, den)) = hat_gauge(w) {
            let g = (den, num);
            let direct = m_image_with(v, w, arrangement)?;
            let conj = |b: &RingMatrix| conjugate(b, &g);
            return Ok(MImages {
                n: direct.n,
                m: direct.m,
                plus: direct.plus.iter().map(conj).collect::<Result<_, _>>()?,
                minus: direct.minus.iter().map(conj).collect::<Result<_, _>>()?,
            });
        }
    }
    m_image_with(v, &if hatted { w.hat() } else { w.clone() }, arrangement)
}

/// `(num, den)` with `hat W = S W S^{-1}`, `S = diag(num/den)`, when every
/// edge coefficient is a plain Laurent polynomial and the ratios are consistent.
fn hat_gauge(w: &Representation) -> Option<(Vec<Laurent>, Vec<Laurent>)> {
    let m = w.dim();
    let mut edges: Vec<(usize, usize, Laurent, Laurent)> = Vec::new();
    for i in 0..w.rank() {
        for (b, a, e) in w.e[i].entries() {
            let f = w.f[i].get(a, b)?;
            edges.push((a, b, e.as_laurent()?.clone(), f.as_laurent()?.clone()));
        }
    }
    let mut d: Vec<Option<(Laurent, Laurent)>> = vec![None; m];
    for start in 0..m {
        if d[start].is_some() {
            continue;
        }
        d[start] = Some((Laurent::one(), Laurent::one()));
        let mut changed = true;
        while changed {
            changed = false;
            for (a, b, e, f) in &edges {
                match (&d[*a], &d[*b]) {
                    (Some((na, da)), None) => {
                        d[*b] = Some((na * f, da * e));
                        changed = true;
                    }
                    (None, Some((nb, db))) => {
                        d[*a] = Some((nb * e, db * f));
                        changed = true;
                    }
                    _ => {}
                }
            }
        }
    }
    let d: Vec<(Laurent, Laurent)> = d.into_iter().collect::<Option<_>>()?;
    for (a, b, e, f) in &edges {
        // d_b e == d_a f
        if &(&d[*b].0 * e) * &d[*a].1 != &(&d[*a].0 * f) * &d[*b].1 {
            return None;
        }
    }
    Some(d.into_iter().unzip())
}

/// `S M S^{-1}` with exact division.
fn conjugate(mat: &RingMatrix, g: &(Vec<Laurent>, Vec<Laurent>)) -> Result<RingMatrix, FrtError> {
    let (num, den) = g;
    let mut out = RingMatrix::zeros(mat.rows(), mat.cols());
    for (k, l, s) in mat.entries() {
        let top: Scalar = (&num[k] * &den[l]).into();
        let v = (s * &top).div_exact(&(&den[k] * &num[l]))?;
        out.set(k, l, v);
    }
    Ok(out)
}

fn m_image_with(v: &Representation, wx: &Representation, arrangement: Arrangement) -> Result<MImages, FrtError> {
    let (n, m) = (v.dim(), wx.dim());
    let (plus, minus) = match arrangement {
        Arrangement::Hat | Arrangement::Direct => {
            let x = universal_r(v, wx)?;
            let y = universal_r(wx, v)?.unipotent_inverse()?;
            (blocks_first(&x, n, m), blocks_second(&y, n, m))
        }
        Arrangement::HatFlipped | Arrangement::DirectFlipped => {
            let x = universal_r(wx, v)?;
            let y = universal_r(v, wx)?.unipotent_inverse()?;
            (blocks_second(&x, n, m), blocks_first(&y, n, m))
        }
    };
    Ok(MImages { n, m, plus, minus })
}

/// One comparison between a tabulated entry and its image.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EntryCheck {
    pub module: String,
    pub sign: Sign,
    pub i: usize,
    pub j: usize,
    pub known: bool,
    pub agrees: bool,
}

/// Every filled entry of `table` compared in every module (indices 1-based).
pub fn compare_table(
    table: &FRTTable,
    modules: &[(Representation, MImages)],
    signs: EvalSigns,
) -> Result<Vec<EntryCheck>, FrtError> {
    let mut out = Vec::new();
    for (w, img) in modules {
        for (sign, i, j, entry) in table.entries() {
            let val = eval_expr_signed(&entry.expr, w, None, signs)?;
            out.push(EntryCheck {
                module: w.label.clone(),
                sign,
                i: i + 1,
                j: j + 1,
                known: entry.known,
                agrees: &val == img.get(sign, i, j),
            });
        }
    }
    Ok(out)
}

/// The outcome of matching a table against the candidate conventions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Agreement {
    pub table: String,
    pub convention: Convention,
    pub known_agreed: usize,
    pub known_total: usize,
    pub checks: Vec<EntryCheck>,
}

impl Agreement {
    pub fn all_known_agree(&self) -> bool {
        self.known_agreed == self.known_total
    }

    pub fn failures(&self) -> impl Iterator<Item = &EntryCheck> {
        self.checks.iter().filter(|c| !c.agrees)
    }
}

/// Tries every candidate convention in a fixed order and returns the first
/// on which all known entries agree in all modules, or else the best one.
pub fn best_convention(table: &FRTTable, v: &Representation, ws: &[Representation]) -> Result<Agreement, FrtError> {
    let mut best: Option<Agreement> = None;
    for arrangement in Arrangement::ALL {
        let modules: Result<Vec<(Representation, MImages)>, FrtError> =
            ws.iter().map(|w| Ok((w.clone(), m_image(v, w, arrangement)?))).collect();
        // images outside the Laurent ring rule the arrangement out
        let modules = match modules {
            Err(FrtError::Scalar(ScalarError::InexactDivision(..)))
            | Err(FrtError::Rep(RepError::Scalar(ScalarError::InexactDivision(..)))) => continue,
            m => m?,
        };
        for signs in EvalSigns::ALL {
            let checks = compare_table(table, &modules, signs)?;
            let known: Vec<_> = checks.iter().filter(|c| c.known).collect();
            let a = Agreement {
                table: table.name.clone(),
                convention: Convention { arrangement, signs },
                known_agreed: known.iter().filter(|c| c.agrees).count(),
                known_total: known.len(),
                checks,
            };
            if a.all_known_agree() {
                return Ok(a);
            }
            if best.as_ref().is_none_or(|b| a.known_agreed > b.known_agreed) {
                best = Some(a);
            }
        }
    }
    best.ok_or_else(|| FrtError::ConventionMismatch {
        table: table.name.clone(),
        best: "none".into(),
        agreed: 0,
        total: table.known_count() * ws.len(),
    })
}

/// Like [`best_convention`] but fails unless some convention matches fully.
pub fn select_convention(table: &FRTTable, v: &Representation, ws: &[Representation]) -> Result<Agreement, FrtError> {
    let a = best_convention(table, v, ws)?;
    if a.all_known_agree() {
        Ok(a)
    } else {
        Err(FrtError::ConventionMismatch {
            table: a.table.clone(),
            best: a.convention.to_string(),
            agreed: a.known_agreed,
            total: a.known_total,
        })
    }
}

/// Which of the three operator relations a failure belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, PartialOrd, Ord)]
pub enum C4Family {
    PlusPlus,
    MinusMinus,
    PlusMinus,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct C4Failure {
    pub family: C4Family,
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub l: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Default)]
pub struct C4Report {
    pub cells: usize,
    pub failures: Vec<C4Failure>,
}

impl C4Report {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// `sum R^{ij}_{ab} A^a_k B^b_l = sum B^j_b A^i_a R^{ab}_{kl}` for
/// `(A, B)` in `(m+, m+)`, `(m-, m-)`, `(m+, m-)`; indices reported 1-based.
pub fn c4_check(images: &MImages, r: &RingMatrix) -> Result<C4Report, FrtError> {
    let n = images.n;
    if r.rows() != n * n || r.cols() != n * n {
        return Err(TensorError::DimensionMismatch(format!("R is {}x{}, images are {n}x{n}", r.rows(), r.cols())).into());
    }
    let rt = r.transpose();
    let fams = [C4Family::PlusPlus, C4Family::MinusMinus, C4Family::PlusMinus];
    let cells: Vec<(C4Family, usize, usize, usize, usize)> = fams
        .iter()
        .flat_map(|&fam| {
            (0..n).flat_map(move |i| (0..n).flat_map(move |j| (0..n).flat_map(move |k| (0..n).map(move |l| (fam, i, j, k, l)))))
        })
        .collect();
    let results: Vec<Result<Option<C4Failure>, FrtError>> = cells
        .par_iter()
        .map(|&(fam, i, j, k, l)| {
            let (a, b) = match fam {
                C4Family::PlusPlus => (Sign::Plus, Sign::Plus),
                C4Family::MinusMinus => (Sign::Minus, Sign::Minus),
                C4Family::PlusMinus => (Sign::Plus, Sign::Minus),
            };
            let mut lhs = RingMatrix::zeros(images.m, images.m);
            for (col, s) in r.row(i * n + j) {
                let (x, y) = (col / n, col % n);
                lhs = lhs.add(&images.get(a, x, k).matmul(images.get(b, y, l))?.scale(s))?;
            }
            let mut rhs = RingMatrix::zeros(images.m, images.m);
            for (row, s) in rt.row(k * n + l) {
                let (x, y) = (row / n, row % n);
                rhs = rhs.add(&images.get(b, j, y).matmul(images.get(a, i, x))?.scale(s))?;
            }
            Ok((lhs != rhs).then_some(C4Failure { family: fam, i: i + 1, j: j + 1, k: k + 1, l: l + 1 }))
        })
        .collect();
    let mut failures = Vec::new();
    for r in results {
        if let Some(f) = r? {
            failures.push(f);
        }
    }
    Ok(C4Report { cells: cells.len(), failures })
}
