//! Closed-form R-matrices of the classical series, checked against the
//! universal R-matrix on the vector module and against QYBE.

use qgverify::repcat::family_r;
use qgverify::rmatrix::{closed_r_bcd, closed_r_type_a, Family, Series, SeriesCase, ThetaArg};
use qgverify::tensor::{annihilates, permutation_matrix, qybe_holds};

fn main() {
    let r = closed_r_type_a(3);
    print!("{}", r.dump());

    for (s, n) in [(Series::A, 2), (Series::B, 2), (Series::C, 3), (Series::D, 4)] {
        let c = SeriesCase::new(s, n).unwrap();
        let fam = Family::Series(c);
        let closed = match s {
            Series::A => closed_r_type_a(c.dim()),
            _ => closed_r_bcd(&c, ThetaArg::JMinusL).unwrap(),
        };
        let universal = family_r(&fam).unwrap();
        let pr = permutation_matrix(c.dim()).matmul(&universal.scale(&fam.lambda())).unwrap();
        println!(
            "{}: dim {}, closed == universal {}, qybe {}, minimal polynomial {}",
            fam.name(),
            c.dim(),
            closed == universal,
            qybe_holds(&closed).unwrap(),
            annihilates(&pr, &fam.spectrum()).unwrap()
        );
    }
}
