//! Exact scalars: Laurent polynomials in a root `q^(1/L)` with rational
//! coefficients, and their quadratic extension by one formal square root.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("non-invertible scalar {0} (only nonzero monomials can be inverted)")]
    NonInvertibleScalar(String),
    #[error("extended scalars carry different moduli")]
    ModulusMismatch,
    #[error("{0} is not divisible by {1}")]
    InexactDivision(String, String),
    #[error("cannot parse scalar text {0:?}")]
    Parse(String),
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `sum c_k q^(k/L)`; canonical when `L` is as small as the exponents allow.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Laurent {
    order: u32,
    terms: BTreeMap<i64, Rational>,
}

impl Laurent {
    pub fn zero() -> Self {
        Laurent { order: 1, terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, 0, 1)
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(int(n))
    }

    /// `c * q^(k/order)`
    pub fn monomial(c: Rational, k: i64, order: u32) -> Self {
        assert!(order > 0, "root order must be positive");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(k, c);
        }
        Laurent { order, terms }.normalized()
    }

    /// `q^(num/den)`
    pub fn q_pow(num: i64, den: u32) -> Self {
        Self::monomial(Rational::one(), num, den)
    }

    /// `q^r` for a rational exponent.
    pub fn q_rat(r: &Rational) -> Self {
        let den: u32 = r.denom().try_into().expect("exponent denominator too large");
        let num: i64 = r.numer().try_into().expect("exponent numerator too large");
        Self::q_pow(num, den)
    }

    pub fn q() -> Self {
        Self::q_pow(1, 1)
    }

    pub fn root_order(&self) -> u32 {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(|c| c.is_one())
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    /// Terms as `(exponent numerator, coefficient)` over `root_order()`.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &Rational)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Exponent of a monomial as a rational, with its coefficient.
    pub fn as_monomial(&self) -> Option<(Rational, &Rational)> {
        if self.terms.len() != 1 {
            return None;
        }
        let (k, c) = self.terms.iter().next().unwrap();
        Some((rat(*k, self.order as i64), c))
    }

    /// The same scalar written over `q^(1/order)`; `order` must be a multiple.
    pub fn rescaled(&self, order: u32) -> Self {
        assert!(order % self.order == 0, "rescale target {order} is not a multiple of {}", self.order);
        let f = (order / self.order) as i64;
        Laurent {
            order,
            terms: self.terms.iter().map(|(k, c)| (k * f, c.clone())).collect(),
        }
    }

    fn normalized(mut self) -> Self {
        self.terms.retain(|_, c| !c.is_zero());
        if self.terms.is_empty() {
            self.order = 1;
            return self;
        }
        let mut g = self.order as i64;
        for k in self.terms.keys() {
            g = g.gcd(k);
            if g == 1 {
                return self;
            }
        }
        if g > 1 {
            self.order /= g as u32;
            self.terms = std::mem::take(&mut self.terms).into_iter().map(|(k, c)| (k / g, c)).collect();
        }
        self
    }

    fn common(a: &Self, b: &Self) -> (u32, i64, i64) {
        let l = (a.order as u64).lcm(&(b.order as u64)) as u32;
        (l, (l / a.order) as i64, (l / b.order) as i64)
    }

    fn combine(&self, other: &Self, sign: i32) -> Self {
        let (l, fa, fb) = Self::common(self, other);
        let mut terms: BTreeMap<i64, Rational> = self.terms.iter().map(|(k, c)| (k * fa, c.clone())).collect();
        for (k, c) in &other.terms {
            let e = terms.entry(k * fb).or_insert_with(Rational::zero);
            if sign > 0 {
                *e += c;
            } else {
                *e -= c;
            }
        }
        Laurent { order: l, terms }.normalized()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Laurent { order: self.order, terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect() }
    }

    pub fn mul_ref(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let (l, fa, fb) = Self::common(self, other);
        let mut terms: BTreeMap<i64, Rational> = BTreeMap::new();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let p = ca * cb;
                match terms.entry(ka * fa + kb * fb) {
                    std::collections::btree_map::Entry::Vacant(v) => {
                        v.insert(p);
                    }
                    std::collections::btree_map::Entry::Occupied(mut o) => {
                        *o.get_mut() += p;
                    }
                }
            }
        }
        Laurent { order: l, terms }.normalized()
    }

    pub fn inv(&self) -> Result<Self, ScalarError> {
        if self.terms.len() != 1 {
            return Err(ScalarError::NonInvertibleScalar(self.to_string()));
        }
        let (k, c) = self.terms.iter().next().unwrap();
        Ok(Laurent::monomial(c.recip(), -k, self.order))
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = acc.mul_ref(self);
        }
        acc
    }

    /// Integer power; negative exponents need a monomial.
    pub fn powi(&self, n: i64) -> Result<Self, ScalarError> {
        if n >= 0 {
            Ok(self.pow(n as u32))
        } else {
            Ok(self.inv()?.pow((-n) as u32))
        }
    }

    /// Exact quotient by long division in `q^(1/L)`; fails on a remainder.
    pub fn div_exact(&self, d: &Self) -> Result<Self, ScalarError> {
        let fail = || ScalarError::InexactDivision(self.to_string(), d.to_string());
        if d.is_zero() {
            return Err(fail());
        }
        if d.is_monomial() {
            return Ok(self.mul_ref(&d.inv()?));
        }
        let (l, fa, fb) = Self::common(self, d);
        let mut rem: BTreeMap<i64, Rational> = self.terms.iter().map(|(k, c)| (k * fa, c.clone())).collect();
        let den: Vec<(i64, Rational)> = d.terms.iter().map(|(k, c)| (k * fb, c.clone())).collect();
        let (dmin, dmax) = (den[0].0, den[den.len() - 1].0);
        let lead = den[den.len() - 1].1.clone();
        let floor = match rem.keys().next() {
            Some(m) => m - dmin,
            None => return Ok(Self::zero()),
        };
        let mut quot: BTreeMap<i64, Rational> = BTreeMap::new();
        while let Some((&top, c)) = rem.iter().next_back() {
            let shift = top - dmax;
            if shift < floor {
                return Err(fail());
            }
            let t = c / &lead;
            for (k, dc) in &den {
                let e = rem.entry(k + shift).or_insert_with(Rational::zero);
                *e -= &t * dc;
                if e.is_zero() {
                    rem.remove(&(k + shift));
                }
            }
            quot.insert(shift, t);
        }
        Ok(Laurent { order: l, terms: quot }.normalized())
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, c)| format!("{}*q^({}/{})", c, k, self.order))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl FromStr for Laurent {
    type Err = ScalarError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || ScalarError::Parse(s.to_string());
        if s == "0" {
            return Ok(Laurent::zero());
        }
        let mut acc = Laurent::zero();
        for term in s.split(" + ") {
            let (c, e) = term.trim().split_once("*q^(").ok_or_else(bad)?;
            let e = e.strip_suffix(')').ok_or_else(bad)?;
            let (k, l) = e.split_once('/').ok_or_else(bad)?;
            let c = parse_rational(c).ok_or_else(bad)?;
            let k: i64 = k.parse().map_err(|_| bad())?;
            let l: u32 = l.parse().map_err(|_| bad())?;
            if l == 0 {
                return Err(bad());
            }
            acc = &acc + &Laurent::monomial(c, k, l);
        }
        Ok(acc)
    }
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    match s.split_once('/') {
        Some((n, d)) => {
            let d = BigInt::from_str(d).ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rational::new(BigInt::from_str(n).ok()?, d))
        }
        None => Some(Rational::from_integer(BigInt::from_str(s).ok()?)),
    }
}

impl<'a> Add<&'a Laurent> for &'a Laurent {
    type Output = Laurent;
    fn add(self, rhs: &Laurent) -> Laurent {
        self.combine(rhs, 1)
    }
}

impl<'a> Sub<&'a Laurent> for &'a Laurent {
    type Output = Laurent;
    fn sub(self, rhs: &Laurent) -> Laurent {
        self.combine(rhs, -1)
    }
}

impl<'a> Mul<&'a Laurent> for &'a Laurent {
    type Output = Laurent;
    fn mul(self, rhs: &Laurent) -> Laurent {
        self.mul_ref(rhs)
    }
}

impl Neg for &Laurent {
    type Output = Laurent;
    fn neg(self) -> Laurent {
        Laurent { order: self.order, terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect() }
    }
}

macro_rules! forward_owned {
    ($t:ty, $tr:ident, $m:ident) => {
        impl $tr<$t> for $t {
            type Output = $t;
            fn $m(self, rhs: $t) -> $t {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a $t> for $t {
            type Output = $t;
            fn $m(self, rhs: &'a $t) -> $t {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Laurent, Add, add);
forward_owned!(Laurent, Sub, sub);
forward_owned!(Laurent, Mul, mul);

impl Neg for Laurent {
    type Output = Laurent;
    fn neg(self) -> Laurent {
        -&self
    }
}

/// `a + b*s` with `s^2 = modulus`. The modulus is dropped when `b = 0`, so
/// plain Laurent values compare equal whatever context produced them.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Scalar {
    base: Laurent,
    rad: Laurent,
    modulus: Option<Arc<Laurent>>,
}

pub type RingScalar = Scalar;

impl From<Laurent> for Scalar {
    fn from(base: Laurent) -> Self {
        Scalar { base, rad: Laurent::zero(), modulus: None }
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Laurent::from_int(n).into()
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Laurent::zero().into()
    }

    pub fn one() -> Self {
        Laurent::one().into()
    }

    pub fn q_pow(num: i64, den: u32) -> Self {
        Laurent::q_pow(num, den).into()
    }

    pub fn q_rat(r: &Rational) -> Self {
        Laurent::q_rat(r).into()
    }

    pub fn constant(c: Rational) -> Self {
        Laurent::constant(c).into()
    }

    pub fn extended(base: Laurent, rad: Laurent, modulus: Arc<Laurent>) -> Self {
        if rad.is_zero() {
            return base.into();
        }
        Scalar { base, rad, modulus: Some(modulus) }
    }

    /// The formal root `s` itself.
    pub fn sqrt_of(modulus: Arc<Laurent>) -> Self {
        Self::extended(Laurent::zero(), Laurent::one(), modulus)
    }

    pub fn base(&self) -> &Laurent {
        &self.base
    }

    pub fn radical(&self) -> &Laurent {
        &self.rad
    }

    pub fn modulus(&self) -> Option<&Laurent> {
        self.modulus.as_deref()
    }

    pub fn as_laurent(&self) -> Option<&Laurent> {
        self.rad.is_zero().then_some(&self.base)
    }

    pub fn is_zero(&self) -> bool {
        self.base.is_zero() && self.rad.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.rad.is_zero() && self.base.is_one()
    }

    pub fn is_monomial(&self) -> bool {
        self.rad.is_zero() && self.base.is_monomial()
    }

    /// Least common root order of both parts.
    pub fn root_order(&self) -> u32 {
        (self.base.root_order() as u64).lcm(&(self.rad.root_order() as u64)) as u32
    }

    fn join(a: &Option<Arc<Laurent>>, b: &Option<Arc<Laurent>>) -> Result<Option<Arc<Laurent>>, ScalarError> {
        match (a, b) {
            (Some(x), Some(y)) if x != y => Err(ScalarError::ModulusMismatch),
            (Some(x), _) => Ok(Some(x.clone())),
            (None, y) => Ok(y.clone()),
        }
    }

    fn build(base: Laurent, rad: Laurent, modulus: Option<Arc<Laurent>>) -> Self {
        if rad.is_zero() {
            Scalar { base, rad, modulus: None }
        } else {
            Scalar { base, rad, modulus }
        }
    }

    pub fn try_add(&self, o: &Self) -> Result<Self, ScalarError> {
        let m = Self::join(&self.modulus, &o.modulus)?;
        Ok(Self::build(&self.base + &o.base, &self.rad + &o.rad, m))
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self, ScalarError> {
        let m = Self::join(&self.modulus, &o.modulus)?;
        Ok(Self::build(&self.base - &o.base, &self.rad - &o.rad, m))
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self, ScalarError> {
        if self.rad.is_zero() && o.rad.is_zero() {
            return Ok(self.base.mul_ref(&o.base).into());
        }
        let m = Self::join(&self.modulus, &o.modulus)?;
        let modulus = m.as_deref().expect("radical part without modulus");
        let base = &(&self.base * &o.base) + &(&(&self.rad * &o.rad) * modulus);
        let rad = &(&self.base * &o.rad) + &(&self.rad * &o.base);
        Ok(Self::build(base, rad, m))
    }

    pub fn scale_laurent(&self, l: &Laurent) -> Self {
        Self::build(&self.base * l, &self.rad * l, self.modulus.clone())
    }

    pub fn inv(&self) -> Result<Self, ScalarError> {
        if !self.rad.is_zero() {
            return Err(ScalarError::NonInvertibleScalar(self.to_string()));
        }
        Ok(self.base.inv()?.into())
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Scalar::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    pub fn div_exact(&self, d: &Laurent) -> Result<Self, ScalarError> {
        Ok(Self::build(self.base.div_exact(d)?, self.rad.div_exact(d)?, self.modulus.clone()))
    }

    pub fn parse_with_modulus(s: &str, modulus: Option<Arc<Laurent>>) -> Result<Self, ScalarError> {
        let s = s.trim();
        match s.strip_suffix(")·s") {
            Some(head) => {
                let (b, r) = head.rsplit_once(" + (").ok_or_else(|| ScalarError::Parse(s.to_string()))?;
                let m = modulus.ok_or_else(|| ScalarError::Parse(format!("{s} needs a modulus")))?;
                Ok(Self::extended(b.parse()?, r.parse()?, m))
            }
            None => Ok(s.parse::<Laurent>()?.into()),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rad.is_zero() {
            write!(f, "{}", self.base)
        } else {
            write!(f, "{} + ({})·s", self.base, self.rad)
        }
    }
}

impl FromStr for Scalar {
    type Err = ScalarError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scalar::parse_with_modulus(s, Some(Arc::new(type_b_modulus())))
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.try_add(rhs).expect("scalar addition")
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.try_sub(rhs).expect("scalar subtraction")
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.try_mul(rhs).expect("scalar multiplication")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { base: -&self.base, rad: -&self.rad, modulus: self.modulus.clone() }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

forward_owned!(Scalar, Add, add);
forward_owned!(Scalar, Sub, sub);
forward_owned!(Scalar, Mul, mul);

/// `q^(1/2) + q^(-1/2)`, whose formal square root carries the series-B constant.
pub fn type_b_modulus() -> Laurent {
    &Laurent::q_pow(1, 2) + &Laurent::q_pow(-1, 2)
}

/// `[n]_{q^d} = (q^{dn} - q^{-dn}) / (q^d - q^{-d})`
pub fn q_integer(n: u32, d: &Rational) -> Laurent {
    let mut acc = Laurent::zero();
    for k in 0..n as i64 {
        let e = d * int(n as i64 - 1 - 2 * k);
        acc = &acc + &Laurent::q_rat(&e);
    }
    acc
}

pub fn q_factorial(n: u32, d: &Rational) -> Laurent {
    (1..=n).fold(Laurent::one(), |acc, k| &acc * &q_integer(k, d))
}

/// Gaussian binomial via the q-Pascal rule, so no division is needed.
pub fn q_binomial(n: u32, k: u32, d: &Rational) -> Laurent {
    if k > n {
        return Laurent::zero();
    }
    let mut row = vec![Laurent::one()];
    for m in 1..=n {
        let mut next = Vec::with_capacity(m as usize + 1);
        for j in 0..=m {
            let left = if j < m { row[j as usize].clone() } else { Laurent::zero() };
            let right = if j > 0 { row[j as usize - 1].clone() } else { Laurent::zero() };
            // [m j] = q^{-dj}[m-1 j] + q^{d(m-j)}[m-1 j-1]
            let a = &left * &Laurent::q_rat(&(d * int(-(j as i64))));
            let b = &right * &Laurent::q_rat(&(d * int((m - j) as i64)));
            next.push(&a + &b);
        }
        row = next;
    }
    row[k as usize].clone()
}

/// `q^d - q^{-d}`
pub fn q_minus_inv(d: &Rational) -> Laurent {
    &Laurent::q_rat(d) - &Laurent::q_rat(&-d)
}

