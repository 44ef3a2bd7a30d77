mod common;

use std::sync::Arc;

use proptest::prelude::*;
use qgverify::dbos::{build_case, case_images, verify_case, verify_case_with, Level, Side, VerifyOptions};
use qgverify::repcat::{cartan, universal_r, universal_r_with_word, vector_rep};
use qgverify::rmatrix::{Series, SeriesCase};
use qgverify::scalar::{int, q_binomial, q_factorial, q_integer, rat, type_b_modulus, Laurent, Scalar};
use qgverify::tensor::RingMatrix;

fn laurent() -> impl Strategy<Value = Laurent> {
    (1u32..=3, prop::collection::vec((-6i64..=6, -4i64..=4, 1i64..=3), 0..5)).prop_map(|(order, terms)| {
        terms
            .into_iter()
            .fold(Laurent::zero(), |acc, (k, n, d)| &acc + &Laurent::monomial(rat(n, d), k, order))
    })
}

fn extended() -> impl Strategy<Value = Scalar> {
    let m = Arc::new(type_b_modulus());
    (laurent(), laurent()).prop_map(move |(a, b)| Scalar::extended(a, b, m.clone()))
}

fn small_matrix(n: usize) -> impl Strategy<Value = RingMatrix> {
    prop::collection::vec(laurent(), n * n).prop_map(move |v| {
        RingMatrix::from_entries(n, n, v.into_iter().enumerate().map(|(k, s)| (k / n, k % n, Scalar::from(s))))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn laurent_ring_axioms(a in laurent(), b in laurent(), c in laurent()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &Laurent::one(), a.clone());
        prop_assert_eq!(&a + &Laurent::zero(), a.clone());
    }

    #[test]
    fn exact_division_undoes_multiplication(a in laurent(), b in laurent()) {
        prop_assume!(!b.is_zero());
        prop_assert_eq!((&a * &b).div_exact(&b).unwrap(), a);
    }

    #[test]
    fn rescale_is_invisible(a in laurent(), k in 1u32..4) {
        let b = a.rescaled(a.root_order() * k);
        prop_assert!((&b - &a).is_zero());
    }

    #[test]
    fn monomials_invert(k in -9i64..9, order in 1u32..4, n in 1i64..5) {
        let m = Laurent::monomial(rat(n, 1), k, order);
        prop_assert!((&m * &m.inv().unwrap()).is_one());
    }

    #[test]
    fn extension_ring_axioms(a in extended(), b in extended(), c in extended()) {
        let ab = a.try_mul(&b).unwrap();
        prop_assert_eq!(ab.clone(), b.try_mul(&a).unwrap());
        prop_assert_eq!(ab.try_mul(&c).unwrap(), a.try_mul(&b.try_mul(&c).unwrap()).unwrap());
        let lhs = a.try_mul(&b.try_add(&c).unwrap()).unwrap();
        let rhs = ab.try_add(&a.try_mul(&c).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn scalar_text_round_trip(a in laurent()) {
        let s = Scalar::from(a);
        prop_assert_eq!(s.to_string().parse::<Scalar>().unwrap(), s);
    }

    #[test]
    fn q_binomial_identities(n in 0u32..7, k in 0u32..7, d in 1i64..3) {
        prop_assume!(k <= n);
        let d = int(d);
        prop_assert_eq!(q_binomial(n, k, &d), q_binomial(n, n - k, &d));
        let lhs = &(&q_binomial(n, k, &d) * &q_factorial(k, &d)) * &q_factorial(n - k, &d);
        prop_assert_eq!(lhs, q_factorial(n, &d));
        // [n] = q^{d(n-1)} + q^{-d} [n-1]
        if n > 0 {
            let rec = &Laurent::q_rat(&(&d * int(n as i64 - 1))) + &(&Laurent::q_rat(&-&d) * &q_integer(n - 1, &d));
            prop_assert_eq!(q_integer(n, &d), rec);
        }
    }

    #[test]
    fn matrix_products(a in small_matrix(2), b in small_matrix(2), c in small_matrix(3), e in small_matrix(3)) {
        let lhs = a.kron(&c).matmul(&b.kron(&e)).unwrap();
        let rhs = a.matmul(&b).unwrap().kron(&c.matmul(&e).unwrap());
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(a.matmul(&b).unwrap().transpose(), b.transpose().matmul(&a.transpose()).unwrap());
    }

    #[test]
    fn dump_round_trip(a in small_matrix(3)) {
        prop_assert_eq!(RingMatrix::parse_dump(&a.dump()).unwrap(), a);
    }
}

#[test]
fn reduced_word_independence() {
    let words: [(usize, [&[usize]; 2]); 2] = [(2, [&[0, 1, 0], &[1, 0, 1]]), (3, [&[0, 1, 0, 2, 1, 0], &[2, 1, 2, 0, 1, 2]])];
    for (rank, [w1, w2]) in words {
        let c = cartan(Series::A, rank).unwrap();
        c.check_longest(w1).unwrap();
        c.check_longest(w2).unwrap();
        let v = vector_rep(&SeriesCase::new(Series::A, rank).unwrap()).unwrap();
        let vv = v.tensor(&v).unwrap();
        for (x, y) in [(&v, &v), (&v, &vv), (&v.hat(), &v)] {
            let r1 = universal_r_with_word(x, y, w1).unwrap();
            let r2 = universal_r_with_word(x, y, w2).unwrap();
            assert_eq!(r1, r2, "A{rank} {} (x) {}", x.label, y.label);
            assert_eq!(r1, universal_r(x, y).unwrap());
        }
    }
}

#[test]
fn non_reduced_words_are_rejected() {
    let c = cartan(Series::A, 2).unwrap();
    assert!(c.check_longest(&[0, 0, 1]).is_err());
    assert!(c.check_longest(&[0, 1]).is_err());
}

#[test]
fn gauge_rescaling_keeps_status() {
    for name in ["A1-A2", "A2-A3", "A1-B2"] {
        let case = build_case(name).unwrap();
        for gauge in [Scalar::q_pow(3, 1), Scalar::q_pow(-1, 2), Scalar::from(-2)] {
            let ok = VerifyOptions { gauge: gauge.clone(), ..VerifyOptions::default() };
            assert!(verify_case_with(&case, Level::L2, &ok).unwrap().passed(), "{name} {gauge}");
            let bad = VerifyOptions { gauge, side: Side::Reversed, ..VerifyOptions::default() };
            assert!(!verify_case_with(&case, Level::L2, &bad).unwrap().passed(), "{name}");
        }
    }
}

#[test]
fn extraction_is_deterministic() {
    for name in ["A2-A3", "B2-B3", "A2-C3"] {
        let case = build_case(name).unwrap();
        let a = case_images(&case, Level::L2, &VerifyOptions::default()).unwrap();
        let b = case_images(&case, Level::L2, &VerifyOptions::default()).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.steps, y.steps);
            assert_eq!(x.e, y.e);
            assert_eq!(x.f, y.f);
            assert_eq!(x.m, y.m);
        }
    }
}

#[test]
fn reports_are_byte_identical() {
    let case = build_case("A1-A2").unwrap();
    let a = serde_json::to_string(&verify_case(&case, Level::L2).unwrap()).unwrap();
    let b = serde_json::to_string(&verify_case(&build_case("A1-A2").unwrap(), Level::L2).unwrap()).unwrap();
    assert_eq!(a, b);
}
