use num_complex::Complex64;
use proptest::prelude::*;

use twodof_sea::poly::{poly_mul, relative_coeff_error, spectral_factor, Polynomial, DEFAULT_TOL};

/// Stable roots, conjugate-closed, at least 0.3 apart so recovering `d`
/// itself (not just its square) stays well-conditioned.
fn hurwitz_roots() -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((0.2f64..8.0, 0.0f64..8.0, any::<bool>()), 1..=6).prop_filter_map(
        "separated roots",
        |specs| {
            let mut roots: Vec<Complex64> = Vec::new();
            for (re, im, pair) in specs {
                if roots.len() >= 6 {
                    break;
                }
                if pair && im > 0.3 && roots.len() + 2 <= 6 {
                    roots.push(Complex64::new(-re, im));
                    roots.push(Complex64::new(-re, -im));
                } else {
                    roots.push(Complex64::new(-re, 0.0));
                }
            }
            let separated = roots.iter().enumerate().all(|(i, a)| {
                roots[..i]
                    .iter()
                    .all(|b| (a - b).norm() > 0.3 || a.conj() == *b)
            });
            separated.then_some(roots)
        },
    )
}

fn coeffs(max_degree: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-100.0f64..100.0, 1..=max_degree + 1)
        .prop_filter("nonzero leading", |c| c[0].abs() > 0.1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn spectral_factor_recovers_hurwitz_factor(roots in hurwitz_roots(), gain in 0.1f64..10.0) {
        let d = Polynomial::from_roots(gain, &roots);
        let e = poly_mul(&d.paraconjugate(), &d);
        let f = spectral_factor(&e, DEFAULT_TOL).unwrap();
        // leading sign convention: d has positive coefficients already
        prop_assert!(relative_coeff_error(&f, &d) < 1e-8, "{} vs {}", f, d);
        prop_assert!(f.is_hurwitz(0.0).unwrap());
        prop_assert!(relative_coeff_error(&poly_mul(&f.paraconjugate(), &f), &e) < 1e-8);
    }

    #[test]
    fn paraconjugate_is_an_involution(c in coeffs(10)) {
        let p = Polynomial::new(c).unwrap();
        prop_assert_eq!(p.paraconjugate().paraconjugate(), p);
    }

    #[test]
    fn paraconjugate_product_is_even(c in coeffs(6)) {
        let p = Polynomial::new(c).unwrap();
        let e = poly_mul(&p.paraconjugate(), &p);
        let scale = e.max_abs_coeff();
        for power in (1..=e.degree()).step_by(2) {
            prop_assert!(e.coeff(power).abs() <= 1e-13 * scale);
        }
    }

    #[test]
    fn root_residuals_are_small(c in coeffs(8)) {
        let p = Polynomial::new(c).unwrap();
        prop_assume!(p.degree() >= 1);
        let scale = p.max_abs_coeff();
        let roots = p.roots().unwrap();
        prop_assert_eq!(roots.len(), p.degree());
        for r in roots {
            let residual = p.eval_complex(r).norm() / scale;
            // residual is judged relative to the size of the terms at |r|
            let magnitude = p.coeffs().iter().rev().enumerate().map(|(i, c)| c.abs() * r.norm().powi(i as i32)).sum::<f64>() / scale;
            prop_assert!(residual < 1e-7 * magnitude.max(1.0), "p = {}, r = {}, residual {:e}", p, r, residual);
        }
    }

    #[test]
    fn from_roots_then_roots_round_trip(roots in hurwitz_roots()) {
        let p = Polynomial::from_roots(1.0, &roots);
        let mut found = p.roots().unwrap();
        for r in &roots {
            let (i, dist) = found.iter().enumerate().map(|(i, f)| (i, (f - r).norm())).min_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
            prop_assert!(dist < 1e-6 * r.norm().max(1.0), "{} missing from {:?}", r, found);
            found.remove(i);
        }
    }

    #[test]
    fn axis_roots_are_rejected(roots in hurwitz_roots(), w in 0.05f64..20.0) {
        let axis = Polynomial::new(vec![1.0, 0.0, w * w]).unwrap();
        let d = poly_mul(&Polynomial::from_roots(1.0, &roots[..roots.len().min(4)]), &axis);
        prop_assert!(spectral_factor(&poly_mul(&d.paraconjugate(), &d), DEFAULT_TOL).is_err());
    }

    #[test]
    fn multiplication_matches_evaluation(a in coeffs(5), b in coeffs(5), x in -3.0f64..3.0) {
        let (a, b) = (Polynomial::new(a).unwrap(), Polynomial::new(b).unwrap());
        let lhs = poly_mul(&a, &b).eval(x);
        let rhs = a.eval(x) * b.eval(x);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()) * 1e3);
    }
}
