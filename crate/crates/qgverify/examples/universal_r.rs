//! The truncated universal R-matrix on the three crossing modules: the
//! module checks, R_VV and the spectrum of P R_VV.

use qgverify::repcat::{check_rep, crossing_rep, universal_r};
use qgverify::rmatrix::Family;
use qgverify::tensor::{annihilates, hecke_pair_check, permutation_matrix};

fn main() {
    for fam in [Family::A1B2, Family::A2C3, Family::A3D4] {
        let v = crossing_rep(&fam).unwrap();
        let bad = check_rep(&v).unwrap();
        let rvv = universal_r(&v, &v).unwrap();
        let pr = permutation_matrix(v.dim()).matmul(&rvv).unwrap();
        let r = rvv.scale(&fam.lambda().inv().unwrap());
        println!(
            "{}: module violations {}, nnz(R_VV) {}, stated roots annihilate {}, computed roots annihilate {}",
            fam.name(),
            bad.len(),
            rvv.nnz(),
            annihilates(&pr, &fam.spectrum()).unwrap(),
            annihilates(&pr, &fam.computed_spectrum()).unwrap()
        );
        println!("   hecke with stated R' {}", hecke_pair_check(&r, &fam.r_prime(&r).unwrap()).unwrap());
        if fam == Family::A1B2 {
            print!("{}", rvv.dump());
        }
    }
}
