#![allow(dead_code)]

use qgverify::scalar::Scalar;
use qgverify::tensor::RingMatrix;

pub fn q(k: i64) -> Scalar {
    Scalar::q_pow(k, 1)
}

pub fn one() -> Scalar {
    Scalar::one()
}

/// Builds a matrix from 1-based `(row, col, value)` triples.
pub fn from_one_based(n: usize, entries: Vec<(usize, usize, Scalar)>) -> RingMatrix {
    RingMatrix::from_entries(n, n, entries.into_iter().map(|(i, j, s)| (i - 1, j - 1, s)))
}

/// The printed 9x9 type-A matrix for the 3-dim vector module.
pub fn printed_type_a_3() -> RingMatrix {
    let d = q(2) - one();
    from_one_based(
        9,
        vec![
            (1, 1, q(2)),
            (2, 2, q(1)),
            (2, 4, d.clone()),
            (3, 3, q(1)),
            (3, 7, d.clone()),
            (4, 4, q(1)),
            (5, 5, q(2)),
            (6, 6, q(1)),
            (6, 8, d),
            (7, 7, q(1)),
            (8, 8, q(1)),
            (9, 9, q(2)),
        ],
    )
}

/// The printed 9x9 `R_VV` of the 3-dim sl2 module.
pub fn printed_rvv_a1b2() -> RingMatrix {
    let t = q(2) - q(-2);
    from_one_based(
        9,
        vec![
            (1, 1, q(2)),
            (2, 2, one()),
            (2, 4, t.clone()),
            (3, 3, q(-2)),
            (3, 5, t.clone()),
            (3, 7, (one() - q(-2)) * t.clone()),
            (4, 4, one()),
            (5, 5, one()),
            (5, 7, one() - q(-4)),
            (6, 6, one()),
            (6, 8, t),
            (7, 7, q(-2)),
            (8, 8, one()),
            (9, 9, q(2)),
        ],
    )
}

/// Direct substitution in the type-A formula:
/// `R^{ij}_{kl} = q^{d_ij} d_ik d_jl + (q^2 - 1) theta(i - k) d_il d_jk`,
/// rows `(i, j)`, columns `(k, l)`, with `theta(x) = 1` for `x > 0`.
pub fn type_a_by_substitution(n: usize) -> RingMatrix {
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut v = Scalar::zero();
                    if i == k && j == l {
                        v = v + if i == j { q(2) } else { q(1) };
                    }
                    if i == l && j == k && i < k {
                        v = v + (q(2) - one());
                    }
                    if !v.is_zero() {
                        out.push((i * n + j, k * n + l, v));
                    }
                }
            }
        }
    }
    RingMatrix::from_entries(n * n, n * n, out)
}
