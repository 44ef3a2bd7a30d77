//! Laurent arithmetic in fractional powers of q, q-integers and the
//! quadratic extension used by the series-B vector module.

use std::sync::Arc;

use qgverify::scalar::{int, q_binomial, q_factorial, q_integer, type_b_modulus, Laurent, Scalar};

fn main() {
    let q = Laurent::q();
    let qi = Laurent::q_pow(-1, 1);
    let prod = &(&q - &qi) * &(&q + &qi);
    println!("(q - q^-1)(q + q^-1) = {prod}");

    let lambda = Laurent::q_pow(-4, 3);
    println!("q^(-4/3) at order 6: {}", lambda.rescaled(6));
    println!("[3]! = {}", q_factorial(3, &int(1)));
    println!("[4 2] = {}", q_binomial(4, 2, &int(1)));
    let num = &q_integer(2, &int(1)) * &q_integer(3, &int(1));
    println!("[2][3] / [3] = {}", num.div_exact(&q_integer(3, &int(1))).unwrap());

    let m = Arc::new(type_b_modulus());
    let s = Scalar::sqrt_of(m);
    println!("s^2 = {}", s.try_mul(&s).unwrap());
}
