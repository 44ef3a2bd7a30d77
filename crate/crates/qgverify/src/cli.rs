//! Command-line driver: `rmatrix`, `verify`, `selftest` and `--list`.
//!
//! Exit codes: 0 pass, 1 verification failure, 2 case or extraction error,
//! 64 usage error. Thread count follows `RAYON_NUM_THREADS`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::dbos::{self, Bracket, Certificate, DbosError, Level, Side, VerifyOptions};
use crate::frt::{self, c4_check, m_image, Arrangement, Sign};
use crate::repcat::family_r;
use crate::rmatrix::{closed_r_bcd, closed_r_type_a, Family, Series, SeriesCase, ThetaArg};
use crate::scalar::Scalar;
use crate::tensor::{annihilates, hecke_pair_check, mixed_qybe_check, permutation_matrix, qybe_holds, RingMatrix};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CASE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "qgverify", version, about = "Exact verification of R-matrices, FRT matrices and double bosonization")]
pub struct Cli {
    /// List the catalog cases and exit.
    #[arg(long)]
    pub list: bool,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dump R, R', P and a certificate for one base.
    Rmatrix(RmatrixArgs),
    /// Verify one catalog case and write a JSON report.
    Verify(VerifyArgs),
    /// Run the invariant suite across the catalog.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
pub struct RmatrixArgs {
    /// A, B, C or D; with `--rank`.
    #[arg(long, requires = "rank", conflicts_with = "crossing")]
    pub series: Option<String>,
    /// Lie rank of the base.
    #[arg(long)]
    pub rank: Option<usize>,
    /// A1B2, A2C3 or A3D4.
    #[arg(long)]
    pub crossing: Option<String>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Case name, e.g. A2-A3 or A1-B2.
    #[arg(long)]
    pub case: String,
    #[arg(long, default_value = "L1")]
    pub level: String,
    /// Add the target's vector (x) vector representation where the catalog lacks it.
    #[arg(long)]
    pub strong: bool,
    /// Report path; defaults to `<case>-<level>.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Audit: literal delta_ij in the [e, f] relation.
    #[arg(long)]
    pub delta_bracket: bool,
    /// Audit: multiply relation words right to left.
    #[arg(long)]
    pub reversed_sides: bool,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    /// Test hook: corrupt the input of one check.
    #[arg(long, value_parser = ["qybe", "hecke", "c4", "mtable", "relations", "serre", "bracket"])]
    pub perturb: Option<String>,
    /// Summary output file; printed to stdout as well.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    if cli.list {
        print!("{}", list_text());
        return EXIT_PASS;
    }
    match cli.command {
        None => {
            eprintln!("no subcommand; see --help");
            EXIT_USAGE
        }
        Some(Command::Rmatrix(a)) => cmd_rmatrix(&a),
        Some(Command::Verify(a)) => cmd_verify(&a),
        Some(Command::Selftest(a)) => cmd_selftest(&a),
    }
}

pub fn list_text() -> String {
    let mut s = String::new();
    for name in dbos::CASE_NAMES {
        let _ = writeln!(s, "{name}");
    }
    s
}

fn family_from_args(a: &RmatrixArgs) -> Result<Family, String> {
    match (&a.series, a.rank, &a.crossing) {
        (Some(s), Some(r), None) => {
            let series = match s.as_str() {
                "A" | "a" => Series::A,
                "B" | "b" => Series::B,
                "C" | "c" => Series::C,
                "D" | "d" => Series::D,
                _ => return Err(format!("unknown series {s}")),
            };
            SeriesCase::new(series, r).map(Family::Series).map_err(|e| e.to_string())
        }
        (None, None, Some(c)) => Family::parse(c).map_err(|e| e.to_string()).and_then(|f| match f {
            Family::Series(_) => Err(format!("{c} is not a crossing")),
            f => Ok(f),
        }),
        _ => Err("give --series with --rank, or --crossing".into()),
    }
}

/// One certificate line per check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertLine {
    pub name: String,
    pub passed: bool,
}

/// Certificate for the R-matrix data of one base: QYBE, the closed form
/// for series, the stated minimal polynomial, Hecke and mixed QYBE for the
/// stated `R'`; for `A3D4` also the computed spectrum and `R'`.
pub fn rmatrix_certificate(family: &Family) -> Result<(RingMatrix, RingMatrix, Vec<CertLine>), String> {
    let err = |e: &dyn std::fmt::Display| e.to_string();
    let r = family_r(family).map_err(|e| err(&e))?;
    let rp = family.r_prime(&r).map_err(|e| err(&e))?;
    let mut lines = Vec::new();
    let mut push = |name: String, passed: bool| lines.push(CertLine { name, passed });
    push("qybe".into(), qybe_holds(&r).map_err(|e| err(&e))?);
    if let Family::Series(c) = family {
        let closed = match c.series {
            Series::A => closed_r_type_a(c.dim()),
            _ => closed_r_bcd(c, ThetaArg::JMinusL).map_err(|e| err(&e))?,
        };
        push("closed_form".into(), closed == r);
    }
    let n = family.dim();
    let pr_vv = permutation_matrix(n).matmul(&r.scale(&family.lambda())).map_err(|e| err(&e))?;
    let roots = family.spectrum();
    push(format!("minimal_polynomial {}", roots_text(&roots)), annihilates(&pr_vv, &roots).map_err(|e| err(&e))?);
    push("hecke".into(), hecke_pair_check(&r, &rp).map_err(|e| err(&e))?);
    push("mixed_qybe".into(), mixed_qybe_check(&r, &rp).map_err(|e| err(&e))?.all());
    if family.computed_spectrum() != roots {
        let roots = family.computed_spectrum();
        let rpc = family.r_prime_computed(&r).map_err(|e| err(&e))?;
        push(format!("computed minimal_polynomial {}", roots_text(&roots)), annihilates(&pr_vv, &roots).map_err(|e| err(&e))?);
        push("computed hecke".into(), hecke_pair_check(&r, &rpc).map_err(|e| err(&e))?);
        push("computed mixed_qybe".into(), mixed_qybe_check(&r, &rpc).map_err(|e| err(&e))?.all());
    }
    Ok((r, rp, lines))
}

fn roots_text(roots: &[Scalar]) -> String {
    let parts: Vec<String> = roots.iter().map(|r| r.to_string()).collect();
    format!("{{{}}}", parts.join(", "))
}

fn write_file(path: &Path, text: &str) -> Result<(), String> {
    fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

pub fn cmd_rmatrix(a: &RmatrixArgs) -> i32 {
    let family = match family_from_args(a) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("{e}");
            return EXIT_USAGE;
        }
    };
    let (r, rp, lines) = match rmatrix_certificate(&family) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("{e}");
            return EXIT_CASE;
        }
    };
    let name = family.name();
    let mut cert = format!("certificate {name}\n");
    for l in &lines {
        let _ = writeln!(cert, "{}: {}", l.name, if l.passed { "pass" } else { "FAIL" });
    }
    let p = permutation_matrix(family.dim());
    let mut files = vec![
        (format!("{name}.R.txt"), r.dump()),
        (format!("{name}.RVV.txt"), r.scale(&family.lambda()).dump()),
        (format!("{name}.Rprime.txt"), rp.dump()),
        (format!("{name}.P.txt"), p.dump()),
        (format!("{name}.certificate.txt"), cert.clone()),
    ];
    if family.computed_spectrum() != family.spectrum() {
        if let Ok(rpc) = family.r_prime_computed(&r) {
            files.push((format!("{name}.Rprime_computed.txt"), rpc.dump()));
        }
    }
    if let Err(e) = fs::create_dir_all(&a.out) {
        eprintln!("{}: {e}", a.out.display());
        return EXIT_CASE;
    }
    for (f, text) in &files {
        if let Err(e) = write_file(&a.out.join(f), text) {
            eprintln!("{e}");
            return EXIT_CASE;
        }
    }
    print!("{cert}");
    if lines.iter().all(|l| l.passed) {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

fn exit_for(e: &DbosError) -> i32 {
    eprintln!("{e}");
    EXIT_CASE
}

pub fn cmd_verify(a: &VerifyArgs) -> i32 {
    let level: Level = match a.level.parse() {
        Ok(l) => l,
        Err(_) => {
            eprintln!("level must be L1 or L2");
            return EXIT_USAGE;
        }
    };
    let mut case = match dbos::build_case(&a.case) {
        Ok(c) => c,
        Err(e) => return exit_for(&e),
    };
    if a.strong && case.target_reps.len() == 1 {
        match case.target_reps[0].tensor(&case.target_reps[0]) {
            Ok(t) => case.target_reps.push(t),
            Err(e) => return exit_for(&e.into()),
        }
    }
    let opts = VerifyOptions {
        bracket: if a.delta_bracket { Bracket::DeltaIJ } else { Bracket::AllPairs },
        side: if a.reversed_sides { Side::Reversed } else { Side::AsWritten },
        gauge: Scalar::one(),
    };
    let cert = match dbos::certify_case(&case, level, &opts) {
        Ok(c) => c,
        Err(e) => return exit_for(&e),
    };
    let out = a.out.clone().unwrap_or_else(|| PathBuf::from(format!("{}-{:?}.json", case.name, level)));
    let text = report_json(&cert);
    if let Err(e) = write_file(&out, &text) {
        eprintln!("{e}");
        return EXIT_CASE;
    }
    println!("{}", verify_summary(&cert));
    if cert.passed {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

/// Pretty JSON with a trailing newline; deterministic for fixed input.
pub fn report_json(cert: &Certificate) -> String {
    let mut s = serde_json::to_string_pretty(cert).expect("report serializes");
    s.push('\n');
    s
}

pub fn verify_summary(cert: &Certificate) -> String {
    let r = &cert.report;
    format!(
        "{} {:?}: relations {}/{} passed, serre {}, bracket {}, cartan {:?} -> {}",
        r.case,
        r.level,
        r.summary.passed,
        r.summary.total,
        if cert.serre.passed { "pass" } else { "FAIL" },
        if cert.bracket.passed { "pass" } else { "FAIL" },
        cert.serre.cartan_from_serre,
        if cert.passed { "PASS" } else { "FAIL" }
    )
}

/// One selftest row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelftestRow {
    pub check: String,
    pub items: usize,
    pub failed: Vec<String>,
}

fn row(check: &str) -> SelftestRow {
    SelftestRow { check: check.into(), items: 0, failed: Vec::new() }
}

fn base_families() -> Vec<Family> {
    let mut v = Vec::new();
    for name in dbos::CASE_NAMES {
        if let Ok(c) = dbos::build_case(name) {
            if !v.contains(&c.base) {
                v.push(c.base);
            }
        }
    }
    v
}

/// The invariant suite; `perturb` corrupts the first input of the named check.
pub fn selftest(perturb: Option<&str>) -> Result<Vec<SelftestRow>, DbosError> {
    let on = |name: &str| perturb == Some(name);
    let cases = dbos::builtin_cases()?;
    let mut rows = Vec::new();

    let mut qy = row("qybe");
    for (k, f) in base_families().iter().enumerate() {
        let mut r = family_r(f)?;
        if on("qybe") && k == 0 {
            let x = r.entry(1, 2 * f.dim() - 1);
            r.set(1, 2 * f.dim() - 1, &x + &Scalar::one());
        }
        qy.items += 1;
        if !qybe_holds(&r)? {
            qy.failed.push(f.name());
        }
    }
    rows.push(qy);

    let mut he = row("hecke");
    for (k, c) in cases.iter().enumerate() {
        let rp = if on("hecke") && k == 0 { c.r_prime.scale(&Scalar::q_pow(1, 1)) } else { c.r_prime.clone() };
        he.items += 1;
        if !(hecke_pair_check(&c.r, &rp)? && mixed_qybe_check(&c.r, &rp)?.all()) {
            he.failed.push(c.name.clone());
        }
    }
    rows.push(he);

    let mut mt = row("mtable");
    for (k, c) in cases.iter().enumerate() {
        let Family::Series(sc) = c.base else { continue };
        let mut table = match sc.series {
            Series::D => frt::mtable_bcd_amended(&sc)?,
            _ => c.table.clone(),
        };
        if on("mtable") && k == 0 {
            let e = table.get(Sign::Plus, 0, 0).cloned().expect("diagonal entry");
            table.set(Sign::Plus, 1, 1, e.expr.scale(&Scalar::q_pow(1, 1)), true);
        }
        mt.items += 1;
        let ws = vec![c.base_rep.clone(), c.base_rep.hat()];
        if !frt::best_convention(&table, &c.base_rep, &ws)?.all_known_agree() {
            mt.failed.push(table.name.clone());
        }
    }
    rows.push(mt);

    let mut c4 = row("c4");
    for (k, c) in cases.iter().enumerate() {
        let nodes: Vec<usize> = (0..c.new_node).collect();
        let w = c.target_reps[0].restrict(&nodes, &c.base_rep.cartan)?;
        let mut images = m_image(&c.base_rep, &w, Arrangement::Hat)?;
        if on("c4") && k == 0 {
            let t = images.get(Sign::Plus, 0, 1).transpose();
            *images.get_mut(Sign::Plus, 0, 1) = t;
        }
        c4.items += 1;
        if !c4_check(&images, &c.r)?.passed() {
            c4.failed.push(c.name.clone());
        }
    }
    rows.push(c4);

    let mut rel = row("relations");
    for (k, c) in cases.iter().enumerate() {
        let opts = VerifyOptions::default();
        let pres = dbos::build_presentation(&c.r, &c.r_prime, &c.lambda, c.dim(), &c.q_star, opts.bracket)?;
        let mut images = dbos::case_images(c, Level::L2, &opts)?;
        if on("relations") && k == 0 {
            let top = c.top();
            let e = images[0].e[top].clone().expect("e^top");
            images[0].e[top] = Some(dbos::FracMatrix::whole(e.num.scale(&Scalar::from(2))));
        }
        let report = dbos::verify_with_images(c, Level::L2, &opts, &pres, &images)?;
        rel.items += 1;
        if !report.passed() {
            let fams: std::collections::BTreeSet<String> = report.failures().map(|f| format!("{:?}", f.family)).collect();
            rel.failed.push(format!("{} ({})", c.name, fams.into_iter().collect::<Vec<_>>().join(",")));
        }
    }
    rows.push(rel);

    let mut se = row("serre");
    for (k, c) in cases.iter().enumerate() {
        let mut images = dbos::case_images(c, Level::L1, &VerifyOptions::default())?;
        if on("serre") && k == 0 {
            let top = c.top();
            images[0].e[top] = images[0].f[top].clone();
        }
        se.items += 1;
        if !dbos::serre_check_images(c, &images)?.passed {
            se.failed.push(c.name.clone());
        }
    }
    rows.push(se);

    let mut br = row("bracket");
    for (k, c) in cases.iter().enumerate() {
        let mut c = c.clone();
        if on("bracket") && k == 0 {
            c.q_star = &c.q_star * &c.q_star;
        }
        br.items += 1;
        if !dbos::bracket_check(&c)?.passed {
            br.failed.push(c.name.clone());
        }
    }
    rows.push(br);
    Ok(rows)
}

pub fn selftest_table(rows: &[SelftestRow]) -> String {
    let mut s = format!("{:<10} {:>5} {:>6}  {}\n", "check", "items", "failed", "where");
    for r in rows {
        let _ = writeln!(s, "{:<10} {:>5} {:>6}  {}", r.check, r.items, r.failed.len(), r.failed.join("; "));
    }
    let ok = rows.iter().all(|r| r.failed.is_empty());
    let _ = writeln!(s, "{}", if ok { "selftest: PASS" } else { "selftest: FAIL" });
    s
}

pub fn cmd_selftest(a: &SelftestArgs) -> i32 {
    let rows = match selftest(a.perturb.as_deref()) {
        Ok(r) => r,
        Err(e) => return exit_for(&e),
    };
    let text = selftest_table(&rows);
    print!("{text}");
    if let Some(out) = &a.out {
        if let Err(e) = write_file(out, &text) {
            eprintln!("{e}");
            return EXIT_CASE;
        }
    }
    if rows.iter().all(|r| r.failed.is_empty()) {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}
