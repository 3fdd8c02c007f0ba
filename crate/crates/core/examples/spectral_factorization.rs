//! Factor an even polynomial as d(-s) d(s) with d Hurwitz.
//!
//! cargo run --example spectral_factorization

use twodof_sea::poly::{poly_mul, relative_coeff_error, spectral_factor, Polynomial, DEFAULT_TOL};

fn main() {
    // s^4 + 1 = d(-s) d(s) with d = s^2 + sqrt(2) s + 1
    let e = Polynomial::new(vec![1.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
    let d = spectral_factor(&e, DEFAULT_TOL).unwrap();
    println!("e(s) = {e}");
    println!("d(s) = {d}");
    println!("roots of d: {:?}", d.roots().unwrap());

    let back = poly_mul(&d.paraconjugate(), &d);
    println!(
        "reconstruction error {:.2e}",
        relative_coeff_error(&back, &e)
    );

    // roots on the imaginary axis have no stable factor
    let marginal = Polynomial::new(vec![1.0, 0.0, 2.0, 0.0, 1.0]).unwrap();
    match spectral_factor(&marginal, DEFAULT_TOL) {
        Ok(d) => println!("unexpected factor {d}"),
        Err(e) => println!("{marginal}: {e}"),
    }
}
