//! The A1 to B2 crossing: full certificate with Serre degrees, the
//! reconstructed Cartan matrix and the [e, f] bracket.

use qgverify::dbos::{build_case, certify_case, identification, Level, VerifyOptions};

fn main() {
    let case = build_case("A1-B2").unwrap();
    for (from, to) in identification(&case) {
        println!("{from} -> {to}");
    }
    let cert = certify_case(&case, Level::L2, &VerifyOptions::default()).unwrap();
    println!("relations {}/{}", cert.report.summary.passed, cert.report.summary.total);
    println!("cartan from serre degrees {:?}", cert.serre.cartan_from_serre);
    println!("{} : {}", cert.bracket.printed, cert.bracket.passed);
    println!("certificate passed {}", cert.passed);
}
