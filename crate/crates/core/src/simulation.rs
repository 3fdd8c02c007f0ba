//! Fixed-step closed-loop simulation of `u = C1 r - C2 (F + n)`,
//! `F = P (u + d)`.
//!
//! Per sample `k`: read the plant output `F[k]`, form the measurement
//! `F[k] + n[k]`, compute `u[k]` from the controller state and inputs, then
//! apply `u[k] + d[k]` to the plant (held for one sample) and advance all
//! states. Everything starts at rest.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rand_chacha::rand_core::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::config::{ConfigError, Discretization, ReferenceSpec, ScenarioConfig};
use crate::lti::{
    discretize_tustin_miso, realize_miso, DiscreteStateSpace, LtiError, Stepper, TransferFunction,
};
use crate::poly::{relative_coeff_error, Polynomial};
use crate::synthesis::{verify_internal_stability, SynthesisError};

/// Noise stream used for the input disturbance in [`run_closed_loop`].
pub const DISTURBANCE_STREAM: u64 = 1;
/// Noise stream used for the measurement noise in [`run_closed_loop`].
pub const MEASUREMENT_STREAM: u64 = 2;

pub const CSV_HEADER: &str = "t,r,F,u,d,n,e";

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("simulation diverged at sample {index}")]
    Divergence { index: usize },
    #[error("loop has an algebraic singularity (1 + Dp*Dc = 0)")]
    AlgebraicLoop,
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Synthesis(#[from] SynthesisError),
    #[error(transparent)]
    Lti(#[from] LtiError),
}

impl From<crate::sea_model::SeaError> for SimError {
    fn from(e: crate::sea_model::SeaError) -> Self {
        SimError::Parameter(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    pub ts: f64,
    pub samples: Vec<f64>,
}

impl Signal {
    pub fn zeros(count: usize, ts: f64) -> Self {
        Self {
            ts,
            samples: vec![0.0; count],
        }
    }

    pub fn constant(value: f64, count: usize, ts: f64) -> Self {
        Self {
            ts,
            samples: vec![value; count],
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Number of samples covering `duration` at period `ts`.
pub fn sample_count(duration: f64, ts: f64) -> usize {
    (duration / ts).round() as usize
}

pub fn make_reference(spec: &ReferenceSpec, ts: f64, duration: f64) -> Result<Signal, SimError> {
    if !(ts.is_finite() && ts > 0.0) || !(duration.is_finite() && duration > 0.0) {
        return Err(SimError::Parameter(format!(
            "need ts > 0 and duration > 0, got {ts}, {duration}"
        )));
    }
    if !spec.amplitude().is_finite() {
        return Err(SimError::Parameter(
            "reference amplitude must be finite".into(),
        ));
    }
    let count = sample_count(duration, ts);
    let t = |i: usize| i as f64 * ts;
    let samples = match *spec {
        ReferenceSpec::Step { amplitude } => vec![amplitude; count],
        ReferenceSpec::Sine { amplitude, freq_hz } => {
            if !freq_hz.is_finite() {
                return Err(SimError::Parameter("sine frequency must be finite".into()));
            }
            (0..count)
                .map(|i| amplitude * (2.0 * PI * freq_hz * t(i)).sin())
                .collect()
        }
        ReferenceSpec::Chirp {
            amplitude,
            f0_hz,
            f1_hz,
            sweep_s,
        } => {
            if !(sweep_s.is_finite() && sweep_s > 0.0) || !f0_hz.is_finite() || !f1_hz.is_finite() {
                return Err(SimError::Parameter(format!(
                    "chirp needs finite frequencies and sweep_s > 0, got {sweep_s}"
                )));
            }
            (0..count)
                .map(|i| {
                    let ti = t(i);
                    let phase =
                        2.0 * PI * (f0_hz * ti + (f1_hz - f0_hz) * ti * ti / (2.0 * sweep_s));
                    amplitude * phase.sin()
                })
                .collect()
        }
    };
    Ok(Signal { ts, samples })
}

/// Standard-normal draws scaled by `sigma`.
///
/// Generator: ChaCha8 seeded with `seed` via `SeedableRng::seed_from_u64`,
/// stream 0. Transform: Box-Muller on two 53-bit uniforms, using `libm` for
/// `ln`, `sin`, and `cos` so the sequence is identical on every platform.
pub fn gaussian_noise(seed: u64, sigma: f64, count: usize, ts: f64) -> Signal {
    gaussian_noise_stream(seed, 0, sigma, count, ts)
}

/// As [`gaussian_noise`], on an independent ChaCha stream.
pub fn gaussian_noise_stream(seed: u64, stream: u64, sigma: f64, count: usize, ts: f64) -> Signal {
    if sigma == 0.0 {
        return Signal::zeros(count, ts);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut samples = Vec::with_capacity(count + 1);
    const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
    while samples.len() < count {
        // u1 in (0, 1], u2 in [0, 1)
        let u1 = ((rng.next_u64() >> 11) + 1) as f64 * SCALE;
        let u2 = (rng.next_u64() >> 11) as f64 * SCALE;
        let radius = libm::sqrt(-2.0 * libm::log(u1));
        let angle = 2.0 * PI * u2;
        samples.push(sigma * radius * libm::cos(angle));
        samples.push(sigma * radius * libm::sin(angle));
    }
    samples.truncate(count);
    Signal { ts, samples }
}

/// Time-indexed record of one closed-loop run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimTrace {
    pub ts: f64,
    pub t: Vec<f64>,
    pub r: Vec<f64>,
    pub f: Vec<f64>,
    pub u: Vec<f64>,
    pub d: Vec<f64>,
    pub n: Vec<f64>,
    pub e: Vec<f64>,
    /// Set when the pre-run stability check failed; the run still proceeds.
    pub warnings: Vec<String>,
}

impl SimTrace {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.len() as f64 * self.ts
    }

    /// CSV with header `t,r,F,u,d,n,e`, nine significant digits, LF endings.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.len() * 96);
        out.push_str(CSV_HEADER);
        out.push('\n');
        for i in 0..self.len() {
            let row = [
                self.t[i], self.r[i], self.f[i], self.u[i], self.d[i], self.n[i], self.e[i],
            ];
            for (j, v) in row.iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                out.push_str(&format_sig9(*v));
            }
            out.push('\n');
        }
        out
    }
}

/// Plain decimal rendering with at most nine significant digits, trailing
/// zeros trimmed. Non-finite values print as `nan`, `inf`, `-inf`.
pub fn format_sig9(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.8e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };
    let mut s = String::new();
    if negative {
        s.push('-');
    }
    let point = exp + 1;
    if point <= 0 {
        s.push_str("0.");
        for _ in 0..(-point) {
            s.push('0');
        }
        s.push_str(digits);
    } else {
        let point = point as usize;
        if digits.len() <= point {
            s.push_str(digits);
            for _ in digits.len()..point {
                s.push('0');
            }
        } else {
            let _ = write!(s, "{}.{}", &digits[..point], &digits[point..]);
        }
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoopOptions {
    pub plant: Discretization,
    pub controller: Discretization,
}

impl Default for LoopOptions {
    fn default() -> Self {
        Self {
            plant: Discretization::Zoh,
            controller: Discretization::Tustin,
        }
    }
}

fn discretize(
    nums: &[&Polynomial],
    den: &Polynomial,
    ts: f64,
    how: Discretization,
) -> Result<DiscreteStateSpace, LtiError> {
    match how {
        Discretization::Tustin => discretize_tustin_miso(nums, den, ts),
        Discretization::Zoh => realize_miso(nums, den)?.balanced().discretize_zoh(ts),
    }
}

/// Discretizes `[C1, -C2]` as one two-input system over a shared
/// denominator, so integrators common to both parts occupy one state.
pub fn discretize_controller(
    c1: &TransferFunction,
    c2: &TransferFunction,
    ts: f64,
    how: Discretization,
) -> Result<DiscreteStateSpace, LtiError> {
    let (d1, d2) = (c1.den(), c2.den());
    let same = d1.degree() == d2.degree()
        && relative_coeff_error(&d1.scale(1.0 / d1.leading()), &d2.scale(1.0 / d2.leading()))
            <= 1e-12;
    if same {
        let n1 = c1.num().scale(1.0 / d1.leading());
        let n2 = c2.num().scale(-1.0 / d2.leading());
        let den = d1.scale(1.0 / d1.leading());
        discretize(&[&n1, &n2], &den, ts, how)
    } else {
        let n1 = c1.num() * d2;
        let n2 = -&(c2.num() * d1);
        discretize(&[&n1, &n2], &(d1 * d2), ts, how)
    }
}

/// Simulates one discretized system driven by `input`.
pub fn simulate_open_loop(
    tf: &TransferFunction,
    input: &Signal,
    how: Discretization,
) -> Result<Vec<f64>, SimError> {
    let sys = discretize(&[tf.num()], tf.den(), input.ts, how)?;
    let mut stepper = Stepper::new(sys);
    let mut out = Vec::with_capacity(input.len());
    for (i, &u) in input.samples.iter().enumerate() {
        out.push(stepper.output(&[u]));
        stepper.advance(&[u]);
        if !stepper.is_finite() {
            return Err(SimError::Divergence { index: i });
        }
    }
    Ok(out)
}

/// Runs the loop on explicit signals. `r`, `d`, `n` must share length and period.
pub fn simulate_loop(
    plant: &TransferFunction,
    c1: &TransferFunction,
    c2: &TransferFunction,
    r: &Signal,
    d: &Signal,
    n: &Signal,
    opts: LoopOptions,
) -> Result<SimTrace, SimError> {
    let ts = r.ts;
    if d.len() != r.len() || n.len() != r.len() || d.ts != ts || n.ts != ts {
        return Err(SimError::Parameter(
            "reference, disturbance, and noise must share length and period".into(),
        ));
    }
    let mut plant_sys = Stepper::new(discretize(&[plant.num()], plant.den(), ts, opts.plant)?);
    let mut ctrl = Stepper::new(discretize_controller(c1, c2, ts, opts.controller)?);

    let dp = plant_sys.feedthrough(0);
    let (dr, dy) = (ctrl.feedthrough(0), ctrl.feedthrough(1));
    let loop_gain = 1.0 - dp * dy;
    if loop_gain.abs() <= f64::EPSILON {
        return Err(SimError::AlgebraicLoop);
    }

    let count = r.len();
    let mut trace = SimTrace {
        ts,
        t: Vec::with_capacity(count),
        r: r.samples.clone(),
        f: Vec::with_capacity(count),
        u: Vec::with_capacity(count),
        d: d.samples.clone(),
        n: n.samples.clone(),
        e: Vec::with_capacity(count),
        warnings: Vec::new(),
    };
    let report = verify_internal_stability(plant, c1, c2, 0.0);
    if !report.stable {
        trace.warnings.push(format!(
            "loop is not internally stable (poles: {:?})",
            report.closed_loop_poles
        ));
    }

    for k in 0..count {
        let (rk, dk, nk) = (r.samples[k], d.samples[k], n.samples[k]);
        let ctrl_free = ctrl.state_output() + dr * rk + dy * nk;
        let force = (plant_sys.state_output() + dp * (ctrl_free + dk)) / loop_gain;
        let meas = force + nk;
        let u = ctrl.output(&[rk, meas]);
        ctrl.advance(&[rk, meas]);
        plant_sys.advance(&[u + dk]);
        if !(force.is_finite() && u.is_finite() && ctrl.is_finite() && plant_sys.is_finite()) {
            return Err(SimError::Divergence { index: k });
        }
        trace.t.push(k as f64 * ts);
        trace.f.push(force);
        trace.u.push(u);
        trace.e.push(rk - force);
    }
    Ok(trace)
}

/// Builds every signal from the config and runs the loop.
pub fn run_closed_loop(cfg: &ScenarioConfig) -> Result<SimTrace, SimError> {
    let s = &cfg.scenario;
    s.validate()?;
    let plant = cfg.plant.transfer_function()?;
    let ctrl = cfg.controller.resolve(&plant)?;
    let r = make_reference(&s.reference, s.ts_s, s.duration_s)?;
    let count = r.len();
    let mut d = gaussian_noise_stream(s.seed, DISTURBANCE_STREAM, s.sigma_d, count, s.ts_s);
    if s.d_offset != 0.0 {
        d.samples.iter_mut().for_each(|v| *v += s.d_offset);
    }
    let n = gaussian_noise_stream(s.seed, MEASUREMENT_STREAM, s.sigma_n, count, s.ts_s);
    let opts = LoopOptions {
        plant: s.plant_discretization,
        controller: s.controller_discretization,
    };
    simulate_loop(&plant, &ctrl.c1, &ctrl.c2, &r, &d, &n, opts)
}
