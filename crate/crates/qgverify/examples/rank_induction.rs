//! Double bosonization from A2 to A3: the presentation, the extracted
//! images and the relation check in the sl4 vector module.

use qgverify::dbos::{build_case, case_images, expected_relation_count, verify_case, Level, VerifyOptions};

fn main() {
    let case = build_case("A2-A3").unwrap();
    println!("{} relations expected for n = {}", expected_relation_count(case.dim()), case.dim());
    let images = case_images(&case, Level::L2, &VerifyOptions::default()).unwrap();
    for step in &images[0].steps {
        println!("   {} from {} at {:?}", step.solved, step.from, step.position);
    }
    for level in [Level::L1, Level::L2] {
        let report = verify_case(&case, level).unwrap();
        println!("{:?}: {}/{} relations hold", level, report.summary.passed, report.summary.total);
    }
    let first = &verify_case(&case, Level::L1).unwrap().relations[0];
    println!("first: {:?} {:?} passed {}", first.family, first.indices, first.passed);
}
