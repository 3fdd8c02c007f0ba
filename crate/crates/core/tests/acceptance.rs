//! Acceptance suite. Prints one `[PASS]`/`[FAIL]` line per criterion and
//! exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use rand_chacha::rand_core::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use twodof_sea::cli::cmd_simulate;
use twodof_sea::config::Discretization;
use twodof_sea::config::{
    ControllerSpec, PlantSpec, ReferenceSpec, ScenarioConfig, ScenarioSettings, TwoDofWeights,
};
use twodof_sea::lti::TransferFunction;
use twodof_sea::metrics::step_metrics;
use twodof_sea::poly::{poly_mul, relative_coeff_error, spectral_factor, PolyError, Polynomial};
use twodof_sea::sea_model::{plant_tf, SeaParams};
use twodof_sea::simulation::{
    make_reference, run_closed_loop, simulate_open_loop, Signal, SimTrace,
};
use twodof_sea::synthesis::{closed_loop, design_2dof, verify_internal_stability, PidGains};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn sea_plant() -> TransferFunction {
    plant_tf(&SeaParams::paper_gain()).expect("plant")
}

fn poly(c: &[f64]) -> Polynomial {
    Polynomial::new(c.to_vec()).unwrap()
}

fn criterion_1() -> Outcome {
    let plant = TransferFunction::from_coeffs(&[1.0], &[1.0, 0.0]).unwrap();
    let c = design_2dof(&plant, 1.0, 1.0, 1.0, 1e-8).map_err(|e| e.to_string())?;
    let r2 = 2f64.sqrt();
    let checks: [(&str, &Polynomial, Vec<f64>); 6] = [
        ("d_rho", &c.d_rho, vec![1.0, 1.0]),
        ("d_lambda_k", &c.d_lambda_k, vec![1.0, r2, 1.0]),
        ("p", &c.p, vec![1.0, 1.0 + r2, 0.0]),
        ("q", &c.q, vec![1.0 + r2, 1.0]),
        ("C1 num", c.c1.num(), vec![1.0, r2, 1.0]),
        ("C1 den", c.c1.den(), vec![1.0, 1.0 + r2, 0.0]),
    ];
    let mut worst = 0.0f64;
    for (name, got, want) in checks {
        if got.coeffs().len() != want.len() {
            return Err(format!(
                "{name} has degree {}, expected {}",
                got.degree(),
                want.len() - 1
            ));
        }
        let err = got
            .coeffs()
            .iter()
            .zip(&want)
            .map(|(g, w)| (g - w).abs())
            .fold(0.0, f64::max);
        if err >= 1e-9 {
            return Err(format!("{name} = {got}, coefficient error {err:.3e}"));
        }
        worst = worst.max(err);
    }
    Ok(format!("max coefficient error {worst:.2e}"))
}

/// Checks 2(a) through 2(d) for one design on `plant`.
fn synthesis_identities(plant: &TransferFunction, rho: f64, lambda: f64, k: f64) -> Outcome {
    let c = design_2dof(plant, rho, lambda, k, 1e-8).map_err(|e| e.to_string())?;
    let bezout = c.diagnostics.bezout_residual;
    if bezout >= 1e-8 {
        return Err(format!("(a) bezout residual {bezout:.3e}"));
    }
    let cl = closed_loop(plant, &c.c1, &c.c2).map_err(|e| e.to_string())?;
    let reduced = cl
        .t_ref
        .cancel_common_factor(&poly_mul(&c.d_lambda_k, &c.p), 1e-6)
        .map_err(|e| format!("(b) {e}"))?;
    let target = c.target_reference(plant).map_err(|e| e.to_string())?;
    let norm = |tf: &TransferFunction| {
        let l = tf.den().leading();
        (tf.num().scale(1.0 / l), tf.den().scale(1.0 / l))
    };
    let (rn, rd) = norm(&reduced);
    let (tn, td) = norm(&target);
    let tref_err = relative_coeff_error(&rn, &tn).max(relative_coeff_error(&rd, &td));
    if tref_err >= 1e-6 {
        return Err(format!("(b) T_ref coefficient error {tref_err:.3e}"));
    }
    let (dc_ref, dc_dist) = (cl.t_ref.dc_gain(), cl.t_dist.dc_gain());
    if (dc_ref - 1.0).abs() > 1e-10 || dc_dist.abs() > 1e-10 {
        return Err(format!("(c) T_ref(0) = {dc_ref}, T_dist(0) = {dc_dist}"));
    }
    let report = verify_internal_stability(plant, &c.c1, &c.c2, 0.0);
    let max_re = report
        .closed_loop_poles
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    if !report.stable || max_re >= 0.0 {
        return Err(format!("(d) closed loop not stable, max Re = {max_re}"));
    }
    Ok(format!(
        "bezout {bezout:.1e}, T_ref err {tref_err:.1e}, max pole Re {max_re:.2}"
    ))
}

fn criterion_2() -> Outcome {
    synthesis_identities(&sea_plant(), 3.0, 10.0, 2.0)
}

fn random_hurwitz(rng: &mut ChaCha8Rng) -> Polynomial {
    let mut uniform =
        |lo: f64, hi: f64| lo + (hi - lo) * (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
    let degree = 1 + (uniform(0.0, 6.0) as usize).min(5);
    let mut roots = Vec::with_capacity(degree);
    while roots.len() < degree {
        let re = -uniform(0.1, 10.0);
        if roots.len() + 2 <= degree && uniform(0.0, 1.0) < 0.5 {
            let im = uniform(0.1, 10.0);
            roots.push(Complex64::new(re, im));
            roots.push(Complex64::new(re, -im));
        } else {
            roots.push(Complex64::new(re, 0.0));
        }
    }
    let gain = uniform(0.5, 2.0);
    Polynomial::from_roots(gain, &roots)
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let d = random_hurwitz(&mut rng);
        let e = poly_mul(&d.paraconjugate(), &d);
        let f = spectral_factor(&e, 1e-8).map_err(|err| format!("case {i} ({d}): {err}"))?;
        let err = relative_coeff_error(&poly_mul(&f.paraconjugate(), &f), &e);
        if err >= 1e-8 || !f.is_hurwitz(0.0).unwrap_or(false) {
            return Err(format!("case {i} ({d}): reconstruction error {err:.3e}"));
        }
        worst = worst.max(err);
    }
    // Imaginary-axis roots: origin, conjugate pairs, and both mixed with stable roots.
    let mut axis_cases = vec![poly(&[-1.0, 0.0, 0.0]), poly(&[1.0, 0.0, 2.0, 0.0, 1.0])];
    for i in 0..200 {
        let stable = random_hurwitz(&mut rng);
        let w = 0.1 + 0.05 * i as f64;
        let axis = if i % 3 == 0 {
            poly(&[1.0, 0.0])
        } else {
            poly(&[1.0, 0.0, w * w])
        };
        let d = poly_mul(&stable, &axis);
        axis_cases.push(poly_mul(&d.paraconjugate(), &d));
    }
    for (i, e) in axis_cases.iter().enumerate() {
        match spectral_factor(e, 1e-8) {
            Err(PolyError::MarginalFactorization { .. }) => {}
            other => {
                return Err(format!(
                    "axis case {i}: expected marginal error, got {other:?}"
                ))
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    if elapsed >= 10.0 {
        return Err(format!("runtime {elapsed:.2} s"));
    }
    Ok(format!(
        "max reconstruction error {worst:.2e}, {} axis cases rejected, {elapsed:.2} s",
        axis_cases.len()
    ))
}

fn noise_free(reference: ReferenceSpec, duration_s: f64) -> ScenarioSettings {
    ScenarioSettings {
        reference,
        duration_s,
        ..ScenarioSettings::default()
    }
    .noise_free()
}

fn run(controller: ControllerSpec, scenario: ScenarioSettings) -> Result<SimTrace, String> {
    let cfg = ScenarioConfig {
        plant: PlantSpec::Sea(SeaParams::paper_gain()),
        controller,
        scenario,
        sweep: None,
    };
    run_closed_loop(&cfg).map_err(|e| e.to_string())
}

fn within(got: f64, want: f64, frac: f64) -> bool {
    (got - want).abs() <= frac * want.abs()
}

fn criterion_4() -> Outcome {
    // (gains, rise s, settling s, overshoot N)
    let groups = [
        ("A", PidGains::group_a(), 0.093, 0.3885, 1.530),
        ("B", PidGains::group_b(), 0.070, 1.0478, 5.164),
    ];
    let mut lines = Vec::new();
    let mut failed = false;
    for (name, gains, rise, settle, over) in groups {
        let trace = run(
            ControllerSpec::Pid(gains),
            noise_free(ReferenceSpec::Step { amplitude: 10.0 }, 5.0),
        )?;
        let m = step_metrics(&trace, 10.0).map_err(|e| e.to_string())?;
        let ts = m.settling_time.unwrap_or(f64::INFINITY);
        let ok = within(m.rise_time, rise, 0.25)
            && within(m.overshoot_abs, over, 0.25)
            && within(ts, settle, 0.30)
            && m.steady_state_error < 0.05;
        failed |= !ok;
        lines.push(format!(
            "group {name}: rise {:.4}/{rise} s, overshoot {:.3}/{over} N, settling {ts:.4}/{settle} s, ss err {:.2e} N",
            m.rise_time, m.overshoot_abs, m.steady_state_error
        ));
    }
    let detail = lines.join("; ");
    if failed {
        Err(detail)
    } else {
        Ok(detail)
    }
}

fn criterion_5() -> Outcome {
    let plant = sea_plant();
    let mut count = 0;
    let mut worst_step = 0.0f64;
    let mut worst_dist = 0.0f64;
    for rho in [0.5, 1.0, 3.0, 6.0] {
        for lambda in [1.0, 10.0] {
            for k in [0.5, 2.0] {
                let tag = format!("rho={rho} lambda={lambda} k={k}");
                synthesis_identities(&plant, rho, lambda, k).map_err(|e| format!("{tag}: {e}"))?;
                let spec = ControllerSpec::TwoDof(TwoDofWeights::new(rho, lambda, k));
                // last sample lands on t = 5 s
                let step = run(
                    spec.clone(),
                    noise_free(ReferenceSpec::Step { amplitude: 10.0 }, 5.0005),
                )?;
                let step_err = (step.f.last().unwrap() - 10.0).abs();
                if step_err >= 0.01 {
                    return Err(format!("{tag}: step error {step_err:.3e} N at 5 s"));
                }
                let mut dist = noise_free(ReferenceSpec::Step { amplitude: 0.0 }, 10.0005);
                dist.d_offset = 0.05;
                let trace = run(spec, dist)?;
                let residual = trace.f.last().unwrap().abs();
                if residual >= 0.01 {
                    return Err(format!(
                        "{tag}: disturbance residual {residual:.3e} N at 10 s"
                    ));
                }
                worst_step = worst_step.max(step_err);
                worst_dist = worst_dist.max(residual);
                count += 1;
            }
        }
    }
    Ok(format!("{count} designs, worst step error {worst_step:.2e} N, worst disturbance residual {worst_dist:.2e} N"))
}

fn parity_gap(ts: f64) -> Result<f64, String> {
    let plant = sea_plant();
    let design = design_2dof(&plant, 3.0, 10.0, 2.0, 1e-8).map_err(|e| e.to_string())?;
    let reference = ReferenceSpec::Step { amplitude: 10.0 };
    let scenario = ScenarioSettings {
        ts_s: ts,
        ..noise_free(reference, 2.0)
    };
    let full = run(
        ControllerSpec::TwoDof(TwoDofWeights::hardware_weights()),
        scenario,
    )?;
    let r: Signal = make_reference(&reference, ts, 2.0).map_err(|e| e.to_string())?;
    let t_ref = design.target_reference(&plant).map_err(|e| e.to_string())?;
    let direct = simulate_open_loop(&t_ref, &r, Discretization::Zoh).map_err(|e| e.to_string())?;
    Ok(full
        .f
        .iter()
        .zip(&direct)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

fn criterion_6() -> Outcome {
    let coarse = parity_gap(1e-3)?;
    let fine = parity_gap(5e-4)?;
    let detail = format!(
        "max gap {coarse:.4e} N at 1 ms, {fine:.4e} N at 0.5 ms, ratio {:.3}",
        coarse / fine
    );
    if coarse < 0.05 && fine <= 0.5 * coarse {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_7() -> Outcome {
    let scenario = ScenarioSettings {
        reference: ReferenceSpec::default_chirp(),
        duration_s: 10.0,
        ..ScenarioSettings::default()
    };
    let two_dof = run(
        ControllerSpec::TwoDof(TwoDofWeights::hardware_weights()),
        scenario.clone(),
    )?;
    let pid = run(ControllerSpec::Pid(PidGains::group_a()), scenario)?;
    let m = |t: &SimTrace| {
        (
            twodof_sea::metrics::tracking_rms(t).unwrap(),
            twodof_sea::metrics::control_energy(t).unwrap(),
        )
    };
    let ((rms2, e2), (rmsp, ep)) = (m(&two_dof), m(&pid));
    let detail =
        format!("2-DOF rms {rms2:.4} N energy {e2:.4}; PID rms {rmsp:.4} N energy {ep:.4}");
    if rms2 < rmsp && e2 < ep {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_8() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = ScenarioConfig {
        plant: PlantSpec::Sea(SeaParams::paper_gain()),
        controller: ControllerSpec::TwoDof(TwoDofWeights::hardware_weights()),
        scenario: ScenarioSettings {
            duration_s: 10.0,
            ..ScenarioSettings::default()
        },
        sweep: None,
    };
    let cfg_path = dir.path().join("config.json");
    std::fs::write(&cfg_path, cfg.to_json()).map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for i in 0..2 {
        let (csv, json) = (
            dir.path().join(format!("t{i}.csv")),
            dir.path().join(format!("m{i}.json")),
        );
        let res = cmd_simulate(&cfg_path, &csv, &json, None);
        if !res.is_success() {
            return Err(res.message);
        }
        outputs.push((std::fs::read(&csv).unwrap(), std::fs::read(&json).unwrap()));
    }
    if outputs[0] != outputs[1] {
        return Err("outputs differ between identical runs".into());
    }
    let start = Instant::now();
    let trace = run_closed_loop(&cfg).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed().as_secs_f64();
    let detail = format!(
        "byte-identical outputs; {} steps in {elapsed:.3} s",
        trace.len()
    );
    if trace.len() == 10_000 && elapsed < 1.0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_9() -> Outcome {
    let integ = TransferFunction::from_coeffs(&[1.0], &[1.0, 0.0]).unwrap();
    let ts = 1e-3;
    let z = integ
        .to_statespace()
        .discretize_zoh(ts)
        .map_err(|e| e.to_string())?;
    let (ad, bd) = (z.a[(0, 0)], z.b[(0, 0)] * z.c[0]);
    if (ad - 1.0).abs() > f64::EPSILON || (bd - ts).abs() > f64::EPSILON * ts {
        return Err(format!("ZOH 1/s: Ad = {ad:e}, Bd = {bd:e}"));
    }
    let lag = TransferFunction::from_coeffs(&[1.0], &[1.0, 1.0]).unwrap();
    let z = lag
        .to_statespace()
        .discretize_zoh(0.1)
        .map_err(|e| e.to_string())?;
    let (ad, bd) = (z.a[(0, 0)], z.b[(0, 0)] * z.c[0]);
    let want = (-0.1f64).exp();
    let zoh_err = (ad - want).abs().max((bd - (1.0 - want)).abs());
    if zoh_err > 1e-12 {
        return Err(format!("ZOH 1/(s+1): error {zoh_err:.3e}"));
    }
    let mut tustin_err = 0.0f64;
    for ts in [1e-3, 0.1] {
        let zt = lag.discretize_tustin(ts).map_err(|e| e.to_string())?;
        let pole = zt.eigenvalues()[0];
        let want = (1.0 - ts / 2.0) / (1.0 + ts / 2.0);
        tustin_err = tustin_err.max((pole - Complex64::new(want, 0.0)).norm());
    }
    if tustin_err > 1e-12 {
        return Err(format!("Tustin pole error {tustin_err:.3e}"));
    }
    Ok(format!(
        "ZOH error {zoh_err:.1e}, Tustin pole error {tustin_err:.1e}"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("worked example exactness", criterion_1),
        ("synthesis identities on the SEA plant", criterion_2),
        ("spectral factorization property suite", criterion_3),
        ("PID regression against published metrics", criterion_4),
        ("weight grid properties", criterion_5),
        ("reduced-loop parity", criterion_6),
        ("chirp comparison against PID", criterion_7),
        ("determinism and performance", criterion_8),
        ("discretization checks", criterion_9),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("[PASS] criterion {}: {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("[FAIL] criterion {}: {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
