//! The invariant suite, clean and with one check corrupted.

use qgverify::cli::{selftest, selftest_table};

fn main() {
    print!("{}", selftest_table(&selftest(None).unwrap()));
    print!("{}", selftest_table(&selftest(Some("c4")).unwrap()));
}
