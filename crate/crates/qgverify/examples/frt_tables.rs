//! Tabulated m+- entries against the images read off the universal
//! R-matrix, under the first convention that matches.

use qgverify::frt::tables_for;
use qgverify::repcat::family_rep;
use qgverify::rmatrix::{Family, Series, SeriesCase};

fn main() {
    let fams = [
        Family::Series(SeriesCase::new(Series::A, 2).unwrap()),
        Family::Series(SeriesCase::new(Series::B, 2).unwrap()),
        Family::A1B2,
    ];
    for fam in fams {
        let v = family_rep(&fam).unwrap();
        // the hat of a crossing module leaves the Laurent ring
        let ws = match fam {
            Family::Series(_) => vec![v.clone(), v.hat()],
            _ => vec![v.clone()],
        };
        for table in tables_for(&fam).unwrap() {
            let a = qgverify::frt::best_convention(&table, &v, &ws).unwrap();
            println!("{} [{}]: {}/{} known entries agree", a.table, a.convention, a.known_agreed, a.known_total);
            for f in a.failures().filter(|c| c.known) {
                println!("   {} (m{})^{}_{} differs in {}", a.table, f.sign, f.i, f.j, f.module);
            }
        }
    }
    let t = qgverify::frt::mtable_example("4.1").unwrap();
    print!("{}", t.dump());
}
