//! Closed-form R-matrices of the classical series, their R' companions,
//! normalization constants and spectra.

use serde::Serialize;
use thiserror::Error;

use crate::scalar::{int, rat, Laurent, Rational, Scalar};
use crate::tensor::{permutation_matrix, RingMatrix, TensorError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RMatrixError {
    #[error("rank {rank} is out of range for series {series:?}")]
    RankOutOfRange { series: Series, rank: usize },
    #[error("unknown case {0:?}")]
    UnknownCase(String),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, PartialOrd, Ord)]
pub enum Series {
    A,
    B,
    C,
    D,
}

/// A classical series at a given rank, with the index data of its vector
/// representation (indices are 1-based here, as in the formulas).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SeriesCase {
    pub series: Series,
    pub rank: usize,
}

impl SeriesCase {
    pub fn new(series: Series, rank: usize) -> Result<Self, RMatrixError> {
        let min = match series {
            Series::A => 1,
            Series::B => 2,
            Series::C => 3,
            Series::D => 4,
        };
        if rank < min {
            return Err(RMatrixError::RankOutOfRange { series, rank });
        }
        Ok(SeriesCase { series, rank })
    }

    /// Dimension of the vector representation.
    pub fn dim(&self) -> usize {
        match self.series {
            Series::A => self.rank + 1,
            Series::B => 2 * self.rank + 1,
            Series::C | Series::D => 2 * self.rank,
        }
    }

    /// +1 for orthogonal, -1 for symplectic.
    pub fn epsilon(&self) -> i64 {
        if self.series == Series::C {
            -1
        } else {
            1
        }
    }

    pub fn conj(&self, i: usize) -> usize {
        self.dim() + 1 - i
    }

    pub fn eps_i(&self, i: usize) -> i64 {
        if self.series == Series::C && i > self.rank {
            -1
        } else {
            1
        }
    }

    pub fn rho(&self, i: usize) -> Rational {
        let n2 = rat(self.dim() as i64, 2);
        let shift = if self.series == Series::C { int(1) } else { int(0) };
        let ip = self.conj(i);
        if i < ip {
            n2 + shift - int(i as i64)
        } else if i == ip {
            int(0)
        } else {
            -(n2 + shift - int(ip as i64))
        }
    }
}

pub fn theta(k: i64) -> i64 {
    (k > 0) as i64
}

/// `R^{ij}_{kl} = q q^{d_ij} d_ik d_jl + (q^2-1) d_il d_jk theta(j-i)` on the
/// `n`-dimensional vector module.
pub fn closed_r_type_a(n: usize) -> RingMatrix {
    let q = Laurent::q();
    let q2m1 = &Laurent::q_pow(2, 1) - &Laurent::one();
    let mut m = RingMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            let diag = if i == j { Laurent::q_pow(2, 1) } else { q.clone() };
            m.set(i * n + j, i * n + j, diag.into());
            if j > i {
                m.set(i * n + j, j * n + i, q2m1.clone().into());
            }
        }
    }
    m
}

/// Which index difference feeds the step function of the BCD formula.
/// The printed formula uses `j - l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ThetaArg {
    JMinusL,
    LMinusJ,
    IMinusK,
    KMinusI,
    JMinusI,
    IMinusJ,
}

impl ThetaArg {
    pub const ALL: [ThetaArg; 6] =
        [ThetaArg::JMinusL, ThetaArg::LMinusJ, ThetaArg::IMinusK, ThetaArg::KMinusI, ThetaArg::JMinusI, ThetaArg::IMinusJ];

    fn eval(&self, i: i64, j: i64, k: i64, l: i64) -> i64 {
        theta(match self {
            ThetaArg::JMinusL => j - l,
            ThetaArg::LMinusJ => l - j,
            ThetaArg::IMinusK => i - k,
            ThetaArg::KMinusI => k - i,
            ThetaArg::JMinusI => j - i,
            ThetaArg::IMinusJ => i - j,
        })
    }
}

/// The BCD formula with `K^{ij}_{lk} = eps C^i_j C^l_k`,
/// `C^m_t = eps_m delta_{m t'} q^{-rho_m}`.
pub fn closed_r_bcd(case: &SeriesCase, arg: ThetaArg) -> Result<RingMatrix, RMatrixError> {
    if case.series == Series::A {
        return Err(RMatrixError::UnknownCase("closed_r_bcd needs series B, C or D".into()));
    }
    let n = case.dim();
    let eps = case.epsilon();
    let q2m1 = &Laurent::q_pow(2, 1) - &Laurent::one();
    let c = |m: usize, t: usize| -> Option<Laurent> {
        (m == case.conj(t)).then(|| Laurent::q_rat(&-case.rho(m)).scale(&int(case.eps_i(m))))
    };
    let mut out = RingMatrix::zeros(n * n, n * n);
    for i in 1..=n {
        for j in 1..=n {
            for k in 1..=n {
                for l in 1..=n {
                    let mut v = Laurent::zero();
                    if i == k && j == l {
                        let e = (j == i) as i64 - (j == case.conj(i)) as i64;
                        v = Laurent::q_pow(1 + e, 1);
                    }
                    if arg.eval(i as i64, j as i64, k as i64, l as i64) == 1 {
                        let mut inner = Laurent::zero();
                        if i == l && j == k {
                            inner = Laurent::one();
                        }
                        if let (Some(a), Some(b)) = (c(i, j), c(l, k)) {
                            inner = &inner - &(&a * &b).scale(&int(eps));
                        }
                        v = &v + &(&q2m1 * &inner);
                    }
                    if !v.is_zero() {
                        out.set((i - 1) * n + (j - 1), (k - 1) * n + (l - 1), v.into());
                    }
                }
            }
        }
    }
    Ok(out)
}

/// The base data that fixes `R'` and `lambda`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Family {
    Series(SeriesCase),
    A1B2,
    A2C3,
    A3D4,
}

impl Family {
    pub fn name(&self) -> String {
        match self {
            Family::Series(c) => format!("{:?}{}", c.series, c.rank),
            Family::A1B2 => "A1B2".into(),
            Family::A2C3 => "A2C3".into(),
            Family::A3D4 => "A3D4".into(),
        }
    }

    pub fn parse(s: &str) -> Result<Family, RMatrixError> {
        match s {
            "A1B2" => return Ok(Family::A1B2),
            "A2C3" => return Ok(Family::A2C3),
            "A3D4" => return Ok(Family::A3D4),
            _ => {}
        }
        let bad = || RMatrixError::UnknownCase(s.to_string());
        let (head, rank) = s.split_at(1);
        let series = match head {
            "A" => Series::A,
            "B" => Series::B,
            "C" => Series::C,
            "D" => Series::D,
            _ => return Err(bad()),
        };
        Ok(Family::Series(SeriesCase::new(series, rank.parse().map_err(|_| bad())?)?))
    }

    pub fn dim(&self) -> usize {
        match self {
            Family::Series(c) => c.dim(),
            Family::A1B2 => 3,
            Family::A2C3 | Family::A3D4 => 6,
        }
    }

    /// Normalization constant; in every case `lambda R = R_VV`.
    pub fn lambda(&self) -> Scalar {
        match self {
            Family::Series(c) if c.series == Series::A => {
                let n = c.dim() as i64;
                Scalar::q_rat(&rat(-(n + 1), n))
            }
            Family::Series(_) => Scalar::q_pow(-1, 1),
            Family::A1B2 => Scalar::q_pow(-2, 1),
            Family::A2C3 => Scalar::q_pow(-4, 3),
            Family::A3D4 => Scalar::q_pow(-1, 1),
        }
    }

    /// Roots of the minimal polynomial of `P R_VV`, as stated for each case.
    pub fn spectrum(&self) -> Vec<Scalar> {
        let qp = |a: i64, b: u32| Scalar::q_pow(a, b);
        match self {
            Family::Series(c) if c.series == Series::A => {
                let n = c.dim() as i64;
                vec![Scalar::q_rat(&rat(n - 1, n)), -Scalar::q_rat(&rat(-(n + 1), n))]
            }
            Family::Series(c) => {
                let (eps, n) = (c.epsilon(), c.dim() as i64);
                vec![-qp(-1, 1), qp(1, 1), Scalar::from(eps) * qp(eps - n, 1)]
            }
            Family::A1B2 => vec![-qp(-2, 1), qp(2, 1), qp(-4, 1)],
            Family::A2C3 => vec![qp(8, 3), -qp(-4, 3), qp(-10, 3)],
            Family::A3D4 => vec![-qp(-1, 1), qp(-1, 1), qp(1, 1)],
        }
    }

    /// `R'` from `R`: a rescaling for type A, the cubic-spectrum formula otherwise.
    pub fn r_prime(&self, r: &RingMatrix) -> Result<RingMatrix, RMatrixError> {
        let qp = |a: i64| Scalar::q_pow(a, 1);
        let n = self.dim();
        let p = permutation_matrix(n);
        let rpr = r.matmul(&p)?.matmul(r)?;
        let (a, b) = match self {
            Family::Series(c) if c.series == Series::A => return Ok(r.scale(&qp(-2))),
            Family::Series(c) => {
                let (eps, big_n) = (Scalar::from(c.epsilon()), c.dim() as i64);
                let e = c.epsilon();
                (&eps * &qp(e - big_n + 1) + qp(2), &eps * &qp(e - big_n + 3) + Scalar::one())
            }
            Family::A1B2 => (qp(-2) + qp(4), qp(2) + Scalar::one()),
            Family::A2C3 => (qp(-2) + qp(4), qp(2) + Scalar::one()),
            Family::A3D4 => (qp(2) + Scalar::one(), qp(2) + Scalar::one()),
        };
        Ok(rpr.sub(&r.scale(&a))?.add(&p.scale(&b))?)
    }

    /// The spectrum of `P R_VV` as computed from the module; differs from
    /// [`Family::spectrum`] only for `A3D4`, whose module is the `so_6` vector.
    pub fn computed_spectrum(&self) -> Vec<Scalar> {
        match self {
            Family::A3D4 => vec![-Scalar::q_pow(-1, 1), Scalar::q_pow(-5, 1), Scalar::q_pow(1, 1)],
            f => f.spectrum(),
        }
    }

    /// `R'` built from [`Family::computed_spectrum`]; equal to [`Family::r_prime`]
    /// except for `A3D4`.
    pub fn r_prime_computed(&self, r: &RingMatrix) -> Result<RingMatrix, RMatrixError> {
        match self {
            Family::A3D4 => {
                let qp = |a: i64| Scalar::q_pow(a, 1);
                r_prime_from_eigenvalues(r, &qp(-4), &qp(2))
            }
            f => f.r_prime(r),
        }
    }
}

/// `R' = R P R - (a+b) R + (ab+1) P` when `P R` has minimal polynomial
/// `(x+1)(x-a)(x-b)`; then `(P R + 1)(P R' - 1) = 0`.
pub fn r_prime_from_eigenvalues(r: &RingMatrix, a: &Scalar, b: &Scalar) -> Result<RingMatrix, RMatrixError> {
    let n = (r.rows() as f64).sqrt().round() as usize;
    let p = permutation_matrix(n);
    let rpr = r.matmul(&p)?.matmul(r)?;
    Ok(rpr.sub(&r.scale(&(a + b)))?.add(&p.scale(&(&(a * b) + &Scalar::one())))?)
}

/// `P R P`, i.e. `(flip R)^{ij}_{kl} = R^{ji}_{lk}`.
pub fn majid_flip(r: &RingMatrix) -> Result<RingMatrix, RMatrixError> {
    let n = (r.rows() as f64).sqrt().round() as usize;
    if n * n != r.rows() || !r.is_square() {
        return Err(TensorError::DimensionMismatch(format!("{}x{} is not on V(x)V", r.rows(), r.cols())).into());
    }
    let p = permutation_matrix(n);
    Ok(p.matmul(r)?.matmul(&p)?)
}

/// `R^{-1}` for the triangular-with-monomial-diagonal matrices met here.
pub fn r_inverse(r: &RingMatrix) -> Result<RingMatrix, RMatrixError> {
    Ok(r.unipotent_inverse()?)
}

/// `R_21^{-1} = P R^{-1} P`, the braiding of the covector algebra.
pub fn r21_inverse(r: &RingMatrix) -> Result<RingMatrix, RMatrixError> {
    majid_flip(&r_inverse(r)?)
}
