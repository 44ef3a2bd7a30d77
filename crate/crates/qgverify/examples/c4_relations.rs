//! R m1 m2 = m2 m1 R on pairing-derived images, and what a single
//! transposed image does to it.

use qgverify::frt::{c4_check, m_image, Arrangement, Sign};
use qgverify::repcat::{family_r, vector_rep};
use qgverify::rmatrix::{Family, Series, SeriesCase};

fn main() {
    let c = SeriesCase::new(Series::A, 2).unwrap();
    let v = vector_rep(&c).unwrap();
    let r = family_r(&Family::Series(c)).unwrap();
    let mut images = m_image(&v, &v.hat(), Arrangement::Hat).unwrap();
    let ok = c4_check(&images, &r).unwrap();
    println!("cells {}, failures {}", ok.cells, ok.failures.len());

    let t = images.get(Sign::Plus, 0, 1).transpose();
    *images.get_mut(Sign::Plus, 0, 1) = t;
    let bad = c4_check(&images, &r).unwrap();
    println!("after transposing (m+)^1_2: failures {}", bad.failures.len());
    for f in bad.failures.iter().take(4) {
        println!("   {:?} at ({}, {}, {}, {})", f.family, f.i, f.j, f.k, f.l);
    }
}
