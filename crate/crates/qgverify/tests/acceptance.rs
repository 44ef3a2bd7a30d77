//! One line per acceptance criterion. A criterion passes when every one of
//! its checks holds exactly. Checks listed in `DOCUMENTED` are known to fail
//! on the printed data and do not fail the run; anything else does.

mod common;

use std::time::Instant;

use proptest::test_runner::{Config, TestRunner};
use qgverify::cli::selftest;
use qgverify::dbos::{
    bracket_check, build_case, case_images, serre_check, target_cartan, verify_case, verify_case_with, Level, Side,
    VerifyOptions, CASE_NAMES,
};
use qgverify::frt::{best_convention, c4_check, m_image, tables_for, Arrangement};
use qgverify::repcat::{cartan, crossing_rep, family_r, family_rep, universal_r, universal_r_with_word, vector_rep};
use qgverify::rmatrix::{closed_r_type_a, Family, Series, SeriesCase};
use qgverify::scalar::{rat, Laurent, Scalar};
use qgverify::tensor::{annihilates, hecke_pair_check, mixed_qybe_check, permutation_matrix, qybe_holds};

const DOCUMENTED: &[&str] = &[
    "minpoly A3D4 printed roots",
    "hecke A3D4 printed R'",
    "table D4 on V(D4)",
    "table D4 on hat V(D4)",
    "table Ex4.1",
];

struct Criterion {
    checks: Vec<(String, bool)>,
}

impl Criterion {
    fn new() -> Self {
        Criterion { checks: Vec::new() }
    }

    fn check(&mut self, name: impl Into<String>, ok: bool) {
        self.checks.push((name.into(), ok));
    }
}

fn series(s: Series, n: usize) -> Family {
    Family::Series(SeriesCase::new(s, n).unwrap())
}

fn catalog_bases() -> Vec<Family> {
    let mut v: Vec<Family> = Vec::new();
    for name in CASE_NAMES {
        let b = build_case(name).unwrap().base;
        if !v.contains(&b) {
            v.push(b);
        }
    }
    v
}

fn c1() -> Criterion {
    let mut c = Criterion::new();
    c.check("type A n=3 closed form equals the printed 9x9", closed_r_type_a(3) == common::printed_type_a_3());
    c
}

fn c2() -> Criterion {
    let mut c = Criterion::new();
    let v = crossing_rep(&Family::A1B2).unwrap();
    c.check("R_VV of the 3-dim sl2 module equals the printed 9x9", universal_r(&v, &v).unwrap() == common::printed_rvv_a1b2());
    c
}

fn c3() -> Criterion {
    let mut c = Criterion::new();
    for n in 2..=4 {
        c.check(format!("qybe closed type A n={n}"), qybe_holds(&closed_r_type_a(n)).unwrap());
    }
    for f in [series(Series::B, 2), series(Series::C, 3), series(Series::D, 4), Family::A1B2, Family::A2C3, Family::A3D4] {
        c.check(format!("qybe {}", f.name()), qybe_holds(&family_r(&f).unwrap()).unwrap());
    }
    c
}

fn c4() -> Criterion {
    let mut c = Criterion::new();
    let pr = |f: &Family| permutation_matrix(f.dim()).matmul(&family_r(f).unwrap().scale(&f.lambda())).unwrap();
    for n in 2..=4usize {
        let f = series(Series::A, n - 1);
        let (n, m) = (n as i64, n as i64);
        let roots = [Scalar::q_rat(&rat(n - 1, m)), -Scalar::q_rat(&rat(-(n + 1), m))];
        c.check(format!("minpoly type A n={n}"), annihilates(&pr(&f), &roots).unwrap());
    }
    for f in [series(Series::B, 2), series(Series::C, 3), series(Series::D, 4)] {
        let Family::Series(s) = f else { unreachable!() };
        let (eps, big_n) = (s.epsilon(), s.dim() as i64);
        let roots = [-Scalar::q_pow(-1, 1), Scalar::q_pow(1, 1), Scalar::from(eps) * Scalar::q_pow(eps - big_n, 1)];
        c.check(format!("minpoly {}", f.name()), annihilates(&pr(&f), &roots).unwrap());
    }
    let a2c3 = [Scalar::q_pow(8, 3), -Scalar::q_pow(-4, 3), Scalar::q_pow(-10, 3)];
    c.check("minpoly A2C3", annihilates(&pr(&Family::A2C3), &a2c3).unwrap());
    let a3d4 = [-Scalar::q_pow(-1, 1), Scalar::q_pow(-1, 1), Scalar::q_pow(1, 1)];
    c.check("minpoly A3D4 printed roots", annihilates(&pr(&Family::A3D4), &a3d4).unwrap());
    let computed = [-Scalar::q_pow(-1, 1), Scalar::q_pow(-5, 1), Scalar::q_pow(1, 1)];
    c.check("minpoly A3D4 computed roots", annihilates(&pr(&Family::A3D4), &computed).unwrap());
    c
}

fn c5() -> Criterion {
    let mut c = Criterion::new();
    for f in catalog_bases() {
        let r = family_r(&f).unwrap();
        let rp = f.r_prime(&r).unwrap();
        let tag = if f == Family::A3D4 { " printed R'" } else { "" };
        c.check(format!("hecke {}{tag}", f.name()), hecke_pair_check(&r, &rp).unwrap());
        c.check(format!("mixed qybe {}{tag}", f.name()), mixed_qybe_check(&r, &rp).unwrap().all());
        if f == Family::A3D4 {
            let rpc = f.r_prime_computed(&r).unwrap();
            c.check("hecke A3D4 computed R'", hecke_pair_check(&r, &rpc).unwrap());
            c.check("mixed qybe A3D4 computed R'", mixed_qybe_check(&r, &rpc).unwrap().all());
        }
    }
    c
}

fn c6(detail: &mut Vec<String>) -> Criterion {
    let mut c = Criterion::new();
    for f in catalog_bases() {
        let v = family_rep(&f).unwrap();
        let ws = match f {
            Family::Series(_) => vec![v.clone(), v.hat()],
            _ => vec![v.clone()],
        };
        for table in tables_for(&f).unwrap() {
            let series_table = matches!(f, Family::Series(_)) && !table.name.starts_with("Ex");
            if series_table {
                // one line per module
                for (w, label) in ws.iter().zip([format!("on V({})", f.name()), format!("on hat V({})", f.name())]) {
                    let a = best_convention(&table, &v, std::slice::from_ref(w)).unwrap();
                    note_failures(detail, &table.name, &a);
                    c.check(format!("table {} {label}", table.name), a.all_known_agree());
                }
            } else {
                let a = best_convention(&table, &v, &ws).unwrap();
                note_failures(detail, &table.name, &a);
                // the partial tables of the two larger crossings are reported only
                if matches!(f, Family::A2C3 | Family::A3D4) {
                    continue;
                }
                c.check(format!("table {}", table.name), a.all_known_agree());
            }
        }
    }
    for name in CASE_NAMES {
        let case = build_case(name).unwrap();
        let nodes: Vec<usize> = (0..case.new_node).collect();
        for t in &case.target_reps {
            let w = t.restrict(&nodes, &case.base_rep.cartan).unwrap();
            let img = m_image(&case.base_rep, &w, Arrangement::Hat).unwrap();
            c.check(format!("c4 {name} in {}", t.label), c4_check(&img, &case.r).unwrap().passed());
        }
    }
    c
}

fn note_failures(detail: &mut Vec<String>, table: &str, a: &qgverify::frt::Agreement) {
    if a.all_known_agree() {
        return;
    }
    let bad: Vec<String> =
        a.failures().filter(|e| e.known).map(|e| format!("(m{})^{}_{} in {}", e.sign, e.i, e.j, e.module)).collect();
    detail.push(format!(
        "table {table}: {}/{} known entries under {}; differing {}",
        a.known_agreed,
        a.known_total,
        a.convention,
        bad.join(", ")
    ));
}

fn induction(c: &mut Criterion, name: &str, levels: &[Level], target: &[Vec<i64>]) {
    let case = build_case(name).unwrap();
    for &level in levels {
        let r = verify_case(&case, level).unwrap();
        c.check(format!("{name} {level:?} {}/{}", r.summary.passed, r.summary.total), r.passed());
    }
    let s = serre_check(&case).unwrap();
    c.check(format!("{name} serre"), s.passed);
    c.check(format!("{name} cartan"), s.cartan_from_serre == target);
}

fn c7() -> Criterion {
    let mut c = Criterion::new();
    for name in ["A1-A2", "A2-A3", "A3-A4"] {
        let t = cartan(Series::A, name[4..].parse().unwrap()).unwrap();
        induction(&mut c, name, &[Level::L2], t.matrix());
    }
    for name in ["B2-B3", "C3-C4", "D4-D5"] {
        let t = target_cartan(name).unwrap();
        induction(&mut c, name, &[Level::L1, Level::L2], t.matrix());
    }
    c
}

fn c8() -> Criterion {
    let mut c = Criterion::new();
    for (name, series_, rank) in [("A1-B2", Series::B, 2), ("A2-C3", Series::C, 3), ("A3-D4", Series::D, 4)] {
        let t = target_cartan(name).unwrap();
        induction(&mut c, name, &[Level::L2], t.matrix());
        // the same Dynkin type up to relabeling
        let std = cartan(series_, rank).unwrap();
        c.check(format!("{name} is {series_:?}{rank}"), t.same_lattice(&std) || same_type(t.matrix(), std.matrix()));
        let b = bracket_check(&build_case(name).unwrap()).unwrap();
        c.check(format!("{name} bracket {}", b.printed), b.passed);
    }
    c
}

fn same_type(a: &[Vec<i64>], b: &[Vec<i64>]) -> bool {
    let n = a.len();
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        if (0..n).all(|i| (0..n).all(|j| a[perm[i]][perm[j]] == b[i][j])) {
            return true;
        }
        // next permutation
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| perm[i] < perm[i + 1]) else { return false };
        let j = (i + 1..n).rev().find(|&j| perm[j] > perm[i]).unwrap();
        perm.swap(i, j);
        perm[i + 1..].reverse();
    }
}

fn c9() -> Criterion {
    let mut c = Criterion::new();
    let mut runner = TestRunner::new(Config { cases: 200, failure_persistence: None, ..Config::default() });
    let term = (-6i64..=6, -4i64..=4);
    let poly = proptest::collection::vec(term, 0..5);
    let axioms = runner.run(&(poly.clone(), poly.clone(), poly), |(a, b, d)| {
        let mk = |t: Vec<(i64, i64)>| t.into_iter().fold(Laurent::zero(), |acc, (k, n)| &acc + &Laurent::monomial(rat(n, 1), k, 3));
        let (a, b, d) = (mk(a), mk(b), mk(d));
        assert_eq!(&a * &b, &b * &a);
        assert_eq!(&(&a * &b) * &d, &a * &(&b * &d));
        assert_eq!(&a * &(&b + &d), &(&a * &b) + &(&a * &d));
        assert!((&a - &a).is_zero());
        Ok(())
    });
    c.check("scalar ring axioms on 200 random triples", axioms.is_ok());

    for (rank, w1, w2) in [(2, vec![0, 1, 0], vec![1, 0, 1]), (3, vec![0, 1, 0, 2, 1, 0], vec![2, 1, 2, 0, 1, 2])] {
        let v = vector_rep(&SeriesCase::new(Series::A, rank).unwrap()).unwrap();
        let vv = v.tensor(&v).unwrap();
        let same = universal_r_with_word(&v, &vv, &w1).unwrap() == universal_r_with_word(&v, &vv, &w2).unwrap();
        c.check(format!("reduced-word independence A{rank}"), same);
    }

    for name in ["A1-A2", "A1-B2"] {
        let case = build_case(name).unwrap();
        let g = VerifyOptions { gauge: Scalar::q_pow(3, 1), ..VerifyOptions::default() };
        let rev = VerifyOptions { side: Side::Reversed, ..g.clone() };
        let ok = verify_case_with(&case, Level::L2, &g).unwrap().passed()
            && !verify_case_with(&case, Level::L2, &rev).unwrap().passed();
        c.check(format!("gauge invariance {name}"), ok);
    }

    let case = build_case("A2-A3").unwrap();
    let a = case_images(&case, Level::L2, &VerifyOptions::default()).unwrap();
    let b = case_images(&case, Level::L2, &VerifyOptions::default()).unwrap();
    let same = a.iter().zip(&b).all(|(x, y)| x.steps == y.steps && x.e == y.e && x.f == y.f);
    c.check("extraction determinism", same);

    let clean = selftest(None).unwrap();
    c.check("selftest clean", clean.iter().all(|r| r.failed.is_empty()));
    for p in ["qybe", "hecke", "mtable", "c4", "relations", "serre", "bracket"] {
        let rows = selftest(Some(p)).unwrap();
        let localized = rows.iter().all(|r| r.failed.is_empty() != (r.check == p));
        c.check(format!("corruption {p} localized"), localized);
    }
    c
}

fn main() {
    let mut detail = Vec::new();
    let titles = [
        "closed type-A R equals the printed matrix",
        "universal R on the sl2 crossing module equals the printed matrix",
        "QYBE for type A, BCD and crossing R-matrices",
        "minimal-polynomial certificates",
        "Hecke and mixed QYBE for every catalog pair",
        "m+- table agreement and RTT relations on full images",
        "rank inductions: relations, Serre, Cartan",
        "type crossings: relations, bracket, Serre, Cartan",
        "property suite",
    ];
    let mut unexpected = Vec::new();
    let mut passed = 0;
    for (k, title) in titles.iter().enumerate() {
        let t = Instant::now();
        let crit = match k {
            0 => c1(),
            1 => c2(),
            2 => c3(),
            3 => c4(),
            4 => c5(),
            5 => c6(&mut detail),
            6 => c7(),
            7 => c8(),
            _ => c9(),
        };
        let failing: Vec<&String> = crit.checks.iter().filter(|(_, ok)| !ok).map(|(n, _)| n).collect();
        let ok = failing.is_empty();
        passed += ok as usize;
        println!(
            "criterion {}: {} {} ({}/{} checks, {:.1}s){}",
            k + 1,
            if ok { "PASS" } else { "FAIL" },
            title,
            crit.checks.len() - failing.len(),
            crit.checks.len(),
            t.elapsed().as_secs_f64(),
            if ok { String::new() } else { format!(" failing: {}", failing.iter().map(|s| s.as_str()).collect::<Vec<_>>().join("; ")) }
        );
        unexpected.extend(failing.into_iter().filter(|n| !DOCUMENTED.contains(&n.as_str())).cloned());
    }
    for d in &detail {
        println!("  {d}");
    }
    println!("acceptance: {passed}/9 criteria pass exactly");
    if !unexpected.is_empty() {
        println!("undocumented failures: {}", unexpected.join("; "));
        std::process::exit(1);
    }
}
