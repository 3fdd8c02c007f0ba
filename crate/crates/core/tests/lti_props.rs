use num_complex::Complex64;
use proptest::prelude::*;

use twodof_sea::lti::TransferFunction;
use twodof_sea::poly::{relative_coeff_error, Polynomial};

fn proper_tf() -> impl Strategy<Value = TransferFunction> {
    (1usize..=6)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(-10.0f64..10.0, n),
                0.5f64..5.0,
                prop::collection::vec(-10.0f64..10.0, 1..=n + 1),
            )
        })
        .prop_map(|(tail, lead, num)| {
            let mut den = vec![lead];
            den.extend(tail);
            TransferFunction::from_coeffs(&num, &den).unwrap()
        })
}

fn stable_roots(max: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((1.0f64..100.0, 0.0f64..50.0, any::<bool>()), 1..=max).prop_map(
        move |specs| {
            let mut roots = Vec::new();
            for (re, im, pair) in specs {
                if pair && roots.len() + 2 <= max {
                    roots.push(Complex64::new(-re, im));
                    roots.push(Complex64::new(-re, -im));
                } else if roots.len() < max {
                    roots.push(Complex64::new(-re, 0.0));
                }
            }
            roots
        },
    )
}

/// Stable, strictly proper, order <= 4, with left-half-plane zeros.
fn stable_tf() -> impl Strategy<Value = TransferFunction> {
    (stable_roots(4), stable_roots(3), 0.1f64..10.0).prop_map(|(poles, zeros, gain)| {
        let keep = zeros.len().min(poles.len() - 1);
        let zeros = if keep < zeros.len()
            && keep > 0
            && zeros[keep - 1].im != 0.0
            && zeros[keep - 1].im == -zeros[keep].im
        {
            &zeros[..keep - 1]
        } else {
            &zeros[..keep]
        };
        TransferFunction::new(
            Polynomial::from_roots(gain, zeros),
            Polynomial::from_roots(1.0, &poles),
        )
        .unwrap()
    })
}

fn monic(tf: &TransferFunction) -> (Polynomial, Polynomial) {
    let l = tf.den().leading();
    (tf.num().scale(1.0 / l), tf.den().scale(1.0 / l))
}

/// Log grid up to a twentieth of the sampling frequency.
fn band(ts: f64) -> Vec<f64> {
    let w_max = 2.0 * std::f64::consts::PI / ts / 20.0;
    (0..25)
        .map(|i| 0.1 * (w_max / 0.1f64).powf(i as f64 / 24.0))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn realization_round_trip(tf in proper_tf()) {
        let back = tf.to_statespace().to_tf().unwrap();
        let (n0, d0) = monic(&tf);
        let (n1, d1) = monic(&back);
        prop_assert!(relative_coeff_error(&d1, &d0) < 1e-9, "{} vs {}", d1, d0);
        // numerator degrees may differ by exact zeros in the leading slots
        let num_err = relative_coeff_error(&n1, &n0);
        prop_assert!(num_err < 1e-9, "{} vs {} ({:e})", n1, n0, num_err);
    }

    #[test]
    fn zoh_tracks_the_continuous_response(tf in stable_tf()) {
        let ts = 1e-3;
        let omegas = band(ts);
        let cont = tf.freq_response(&omegas);
        let zoh = tf.to_statespace().discretize_zoh(ts).unwrap().freq_response(&omegas);
        for i in 0..omegas.len() {
            let rel = (zoh[i].norm() - cont[i].norm()).abs() / cont[i].norm();
            prop_assert!(rel < 0.02, "w = {}: |H| = {} vs {}", omegas[i], zoh[i].norm(), cont[i].norm());
        }
    }

    /// The 2% band holds for Tustin up to relative degree 2; beyond that
    /// frequency warping alone exceeds it near the top of the band.
    #[test]
    fn tustin_tracks_the_continuous_response(tf in stable_tf()) {
        prop_assume!(tf.den().degree() - tf.num().degree() <= 2);
        let ts = 1e-3;
        let omegas = band(ts);
        let cont = tf.freq_response(&omegas);
        let tustin = tf.discretize_tustin(ts).unwrap().freq_response(&omegas);
        for i in 0..omegas.len() {
            let rel = (tustin[i].norm() - cont[i].norm()).abs() / cont[i].norm();
            prop_assert!(rel < 0.02, "w = {}: |H| = {} vs {}", omegas[i], tustin[i].norm(), cont[i].norm());
        }
    }

    #[test]
    fn tustin_equals_the_warped_continuous_response(tf in stable_tf()) {
        let ts = 1e-3;
        let omegas = band(ts);
        let warped: Vec<f64> = omegas.iter().map(|w| 2.0 / ts * (w * ts / 2.0).tan()).collect();
        let cont = tf.freq_response(&warped);
        let tustin = tf.discretize_tustin(ts).unwrap().freq_response(&omegas);
        for i in 0..omegas.len() {
            let rel = (tustin[i] - cont[i]).norm() / cont[i].norm();
            prop_assert!(rel <= 1e-9, "w = {}: relative error {:e}", omegas[i], rel);
        }
    }

    #[test]
    fn discretization_preserves_stability(tf in stable_tf(), ts in 1e-4f64..1e-2) {
        prop_assert!(tf.to_statespace().discretize_zoh(ts).unwrap().is_schur_stable());
        prop_assert!(tf.discretize_tustin(ts).unwrap().is_schur_stable());
    }
}

#[test]
fn zoh_of_integrator_is_exact() {
    let tf = TransferFunction::from_coeffs(&[1.0], &[1.0, 0.0]).unwrap();
    for ts in [1e-4, 1e-3, 0.1, 1.0] {
        let z = tf.to_statespace().discretize_zoh(ts).unwrap();
        assert_eq!(z.a[(0, 0)], 1.0);
        assert!((z.b[(0, 0)] * z.c[0] - ts).abs() <= f64::EPSILON * ts);
    }
}
