//! Command implementations behind the `twodof-sea` binary.
//!
//! Every command returns a [`CommandResult`]. Exit code 0 is success, 1 a
//! validation error (bad config, bad arguments, invalid parameters), 2 a
//! numerical failure (synthesis or simulation). A failing command removes
//! any file it had already written.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ConfigError, ControllerSpec, ReferenceSpec, ScenarioConfig, TwoDofWeights};
use crate::metrics::{MetricsError, MetricsReport};
use crate::sea_model::SeaError;
use crate::simulation::{format_sig9, run_closed_loop, SimError};
use crate::synthesis::{
    closed_loop, verify_internal_stability, NearCancellation, PidGains, SynthesisError,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

pub const SWEEP_INDEX_HEADER_2DOF: &str =
    "rho,lambda,k,rise_time_s,settling_time_s,overshoot_pct,control_energy";
pub const SWEEP_INDEX_HEADER_PID: &str =
    "kp,ki,kd,rise_time_s,settling_time_s,overshoot_pct,control_energy";
pub const FREQRESP_HEADER: &str = "omega_rad_s,mag_abs,phase_deg";
const FAILED: &str = "failed";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandResult {
    pub exit_code: i32,
    pub written: Vec<PathBuf>,
    /// Summary on success, error text otherwise.
    pub message: String,
}

impl CommandResult {
    pub fn is_success(&self) -> bool {
        self.exit_code == EXIT_OK
    }
}

#[derive(Debug)]
struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn validation(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_VALIDATION,
            message: message.into(),
        }
    }

    fn numerical(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_NUMERICAL,
            message: message.into(),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        Self::validation(e.to_string())
    }
}

impl From<SeaError> for CliError {
    fn from(e: SeaError) -> Self {
        Self::validation(e.to_string())
    }
}

impl From<SynthesisError> for CliError {
    fn from(e: SynthesisError) -> Self {
        match e {
            SynthesisError::Parameter(_) => Self::validation(e.to_string()),
            _ => Self::numerical(e.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Parameter(_) | SimError::Config(_) => Self::validation(e.to_string()),
            SimError::Synthesis(s) => s.into(),
            _ => Self::numerical(e.to_string()),
        }
    }
}

impl From<MetricsError> for CliError {
    fn from(e: MetricsError) -> Self {
        Self::numerical(e.to_string())
    }
}

/// Tracks files written by a command so they can be rolled back.
#[derive(Default)]
struct Outputs {
    written: Vec<PathBuf>,
}

impl Outputs {
    fn write(&mut self, path: &Path, contents: &str) -> Result<(), CliError> {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent).map_err(|e| {
                CliError::validation(format!("cannot create {}: {e}", parent.display()))
            })?;
        }
        let tmp = path.with_extension("partial");
        fs::write(&tmp, contents)
            .and_then(|_| fs::rename(&tmp, path))
            .map_err(|e| {
                let _ = fs::remove_file(&tmp);
                CliError::validation(format!("cannot write {}: {e}", path.display()))
            })?;
        self.written.push(path.to_path_buf());
        Ok(())
    }

    fn finish(self, outcome: Result<String, CliError>) -> CommandResult {
        match outcome {
            Ok(message) => CommandResult {
                exit_code: EXIT_OK,
                written: self.written,
                message,
            },
            Err(e) => {
                for p in &self.written {
                    let _ = fs::remove_file(p);
                }
                CommandResult {
                    exit_code: e.code,
                    written: Vec::new(),
                    message: e.message,
                }
            }
        }
    }
}

fn load(config: &Path, seed: Option<u64>) -> Result<ScenarioConfig, CliError> {
    let mut cfg = ScenarioConfig::load(config)?;
    if let Some(seed) = seed {
        cfg.scenario.seed = seed;
    }
    Ok(cfg)
}

fn complex_pair(z: &Complex64) -> [f64; 2] {
    [z.re, z.im]
}

#[derive(Serialize)]
struct Diagnostics {
    closed_loop_poles: Vec<[f64; 2]>,
    stable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    bezout_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sylvester_condition: Option<f64>,
    near_cancellations: Vec<NearCancellation>,
}

/// Designs the configured controller and writes it as JSON with a
/// `diagnostics` block.
pub fn cmd_design(config: &Path, out: &Path) -> CommandResult {
    let mut outputs = Outputs::default();
    let outcome = (|| {
        let cfg = load(config, None)?;
        let plant = cfg.plant.transfer_function()?;
        let resolved = cfg.controller.resolve(&plant)?;
        let report = verify_internal_stability(&plant, &resolved.c1, &resolved.c2, 0.0);
        let diagnostics = Diagnostics {
            closed_loop_poles: report.closed_loop_poles.iter().map(complex_pair).collect(),
            stable: report.stable,
            bezout_residual: resolved
                .design
                .as_ref()
                .map(|d| d.diagnostics.bezout_residual),
            sylvester_condition: resolved
                .design
                .as_ref()
                .map(|d| d.diagnostics.sylvester_condition),
            near_cancellations: report.cancellations.clone(),
        };
        let mut export = resolved.export.clone();
        export.diagnostics =
            Some(serde_json::to_value(&diagnostics).expect("diagnostics serialize"));
        let mut text = serde_json::to_string_pretty(&export).expect("controller serializes");
        text.push('\n');
        outputs.write(out, &text)?;
        let verdict = if report.stable { "stable" } else { "UNSTABLE" };
        Ok(match resolved.design {
            Some(d) => format!(
                "{verdict}; bezout residual {:.3e}",
                d.diagnostics.bezout_residual
            ),
            None => verdict.to_string(),
        })
    })();
    outputs.finish(outcome)
}

fn step_target(reference: &ReferenceSpec) -> Option<f64> {
    match *reference {
        ReferenceSpec::Step { amplitude } if amplitude != 0.0 => Some(amplitude),
        _ => None,
    }
}

/// Runs the configured scenario; writes the trace CSV and metrics JSON.
pub fn cmd_simulate(
    config: &Path,
    trace_out: &Path,
    metrics_out: &Path,
    seed: Option<u64>,
) -> CommandResult {
    let mut outputs = Outputs::default();
    let outcome = (|| {
        let cfg = load(config, seed)?;
        let trace = run_closed_loop(&cfg)?;
        let report = MetricsReport::from_trace(&trace, step_target(&cfg.scenario.reference))?;
        outputs.write(trace_out, &trace.to_csv())?;
        outputs.write(metrics_out, &report.to_json())?;
        let mut summary = report.summary();
        for w in &trace.warnings {
            let _ = write!(summary, "\nwarning: {w}");
        }
        Ok(summary)
    })();
    outputs.finish(outcome)
}

enum GridPoint {
    TwoDof(TwoDofWeights),
    Pid(PidGains),
}

impl GridPoint {
    fn key(&self) -> [f64; 3] {
        match self {
            GridPoint::TwoDof(w) => [w.rho, w.lambda, w.k],
            GridPoint::Pid(g) => [g.kp, g.ki, g.kd],
        }
    }

    fn controller(&self) -> ControllerSpec {
        match self {
            GridPoint::TwoDof(w) => ControllerSpec::TwoDof(*w),
            GridPoint::Pid(g) => ControllerSpec::Pid(*g),
        }
    }
}

fn axis(values: &[f64], base: Option<f64>, name: &str) -> Result<Vec<f64>, CliError> {
    if !values.is_empty() {
        Ok(values.to_vec())
    } else {
        base.map(|b| vec![b]).ok_or_else(|| {
            CliError::validation(format!(
                "sweep grid needs `{name}` values (base controller does not supply one)"
            ))
        })
    }
}

fn cartesian(a: &[f64], b: &[f64], c: &[f64]) -> Vec<[f64; 3]> {
    let mut out = Vec::with_capacity(a.len() * b.len() * c.len());
    for &x in a {
        for &y in b {
            for &z in c {
                out.push([x, y, z]);
            }
        }
    }
    out
}

fn grid_points(cfg: &ScenarioConfig) -> Result<(Vec<GridPoint>, &'static str), CliError> {
    let grid = cfg.sweep.clone().unwrap_or_default();
    match (grid.is_two_dof(), grid.is_pid()) {
        (false, false) => Err(CliError::validation("sweep grid is empty")),
        (true, true) => Err(CliError::validation(
            "sweep grid mixes 2-DOF weights and PID gains",
        )),
        (true, false) => {
            let base = match &cfg.controller {
                ControllerSpec::TwoDof(w) => Some(*w),
                _ => None,
            };
            let tol = base.map_or(crate::poly::DEFAULT_TOL, |w| w.tol);
            let points = cartesian(
                &axis(&grid.rho, base.map(|w| w.rho), "rho")?,
                &axis(&grid.lambda, base.map(|w| w.lambda), "lambda")?,
                &axis(&grid.k, base.map(|w| w.k), "k")?,
            );
            Ok((
                points
                    .into_iter()
                    .map(|[rho, lambda, k]| {
                        GridPoint::TwoDof(TwoDofWeights {
                            rho,
                            lambda,
                            k,
                            tol,
                        })
                    })
                    .collect(),
                SWEEP_INDEX_HEADER_2DOF,
            ))
        }
        (false, true) => {
            let base = match &cfg.controller {
                ControllerSpec::Pid(g) => Some(*g),
                _ => None,
            };
            let n = base.map_or(crate::synthesis::DEFAULT_PID_FILTER, |g| g.n);
            let points = cartesian(
                &axis(&grid.kp, base.map(|g| g.kp), "kp")?,
                &axis(&grid.ki, base.map(|g| g.ki), "ki")?,
                &axis(&grid.kd, base.map(|g| g.kd), "kd")?,
            );
            Ok((
                points
                    .into_iter()
                    .map(|[kp, ki, kd]| GridPoint::Pid(PidGains { kp, ki, kd, n }))
                    .collect(),
                SWEEP_INDEX_HEADER_PID,
            ))
        }
    }
}

/// Simulates every grid point (in parallel) and writes one metrics JSON per
/// point plus `index.csv`, all in grid order.
pub fn cmd_sweep(config: &Path, out_dir: &Path, seed: Option<u64>) -> CommandResult {
    let mut outputs = Outputs::default();
    let outcome = (|| {
        let cfg = load(config, seed)?;
        cfg.scenario.validate()?;
        let (points, header) = grid_points(&cfg)?;
        let target = step_target(&cfg.scenario.reference);
        let results: Vec<Result<MetricsReport, CliError>> = points
            .par_iter()
            .map(|point| {
                let mut point_cfg = cfg.clone();
                point_cfg.controller = point.controller();
                point_cfg.sweep = None;
                let trace = run_closed_loop(&point_cfg)?;
                Ok(MetricsReport::from_trace(&trace, target)?)
            })
            .collect();

        let mut index = String::from(header);
        index.push('\n');
        let mut ok = 0usize;
        for (i, (point, result)) in points.iter().zip(&results).enumerate() {
            let key = point.key().map(format_sig9).join(",");
            match result {
                Ok(report) => {
                    ok += 1;
                    outputs.write(
                        &out_dir.join(format!("point_{i:04}.json")),
                        &report.to_json(),
                    )?;
                    let opt = |v: Option<f64>| v.map(format_sig9).unwrap_or_default();
                    let _ = writeln!(
                        index,
                        "{key},{},{},{},{}",
                        opt(report.rise_time_s),
                        opt(report.settling_time_s),
                        opt(report.overshoot_pct),
                        format_sig9(report.control_energy)
                    );
                }
                Err(_) => {
                    let _ = writeln!(index, "{key},{FAILED},{FAILED},{FAILED},{FAILED}");
                }
            }
        }
        if ok == 0 {
            let first = results
                .into_iter()
                .find_map(Result::err)
                .expect("grid is not empty");
            return Err(CliError {
                code: first.code,
                message: format!("every sweep point failed; first error: {}", first.message),
            });
        }
        outputs.write(&out_dir.join("index.csv"), &index)?;
        Ok(format!("{ok}/{} grid points succeeded", points.len()))
    })();
    outputs.finish(outcome)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum TransferKind {
    Plant,
    TRef,
    TDist,
    TNoise,
}

/// `points` log-spaced frequencies from `w_min` to `w_max`, inclusive.
pub fn log_grid(w_min: f64, w_max: f64, points: usize) -> Vec<f64> {
    let ratio = w_max / w_min;
    (0..points)
        .map(|i| w_min * ratio.powf(i as f64 / (points - 1) as f64))
        .collect()
}

/// Writes `omega_rad_s,mag_abs,phase_deg` for the chosen transfer. Phase is
/// unwrapped along the grid.
pub fn cmd_freqresp(
    config: &Path,
    out: &Path,
    w_min: f64,
    w_max: f64,
    points: usize,
    transfer: TransferKind,
) -> CommandResult {
    let mut outputs = Outputs::default();
    let outcome = (|| {
        if !(w_min.is_finite() && w_min > 0.0 && w_max.is_finite() && w_max > w_min) {
            return Err(CliError::validation(format!(
                "need 0 < w_min < w_max, got {w_min}, {w_max}"
            )));
        }
        if points < 2 {
            return Err(CliError::validation(format!(
                "need at least 2 points, got {points}"
            )));
        }
        let cfg = load(config, None)?;
        let plant = cfg.plant.transfer_function()?;
        let tf = match transfer {
            TransferKind::Plant => plant,
            other => {
                let ctrl = cfg.controller.resolve(&plant)?;
                let cl = closed_loop(&plant, &ctrl.c1, &ctrl.c2)?;
                match other {
                    TransferKind::TRef => cl.t_ref,
                    TransferKind::TDist => cl.t_dist,
                    _ => cl.t_noise,
                }
            }
        };
        let omegas = log_grid(w_min, w_max, points);
        let response = tf.freq_response(&omegas);
        let mut text = String::from(FREQRESP_HEADER);
        text.push('\n');
        let mut prev: Option<f64> = None;
        for (w, h) in omegas.iter().zip(&response) {
            let mag = h.norm();
            let mut phase = if mag.is_finite() {
                h.arg().to_degrees()
            } else {
                f64::NAN
            };
            if let (Some(p), true) = (prev, phase.is_finite()) {
                phase -= 360.0 * ((phase - p) / 360.0).round();
            }
            if phase.is_finite() {
                prev = Some(phase);
            }
            let _ = writeln!(
                text,
                "{},{},{}",
                format_sig9(*w),
                format_sig9(mag),
                format_sig9(phase)
            );
        }
        outputs.write(out, &text)?;
        Ok(format!("{points} points written"))
    })();
    outputs.finish(outcome)
}
