//! Step-response and tracking metrics computed from a [`SimTrace`].
//!
//! Conventions: rise time is the 10% to 90% interval of the target, with
//! both crossings located by linear interpolation; settling uses a ±2% band
//! around the target; overshoot is measured against the target; the steady
//! state is the mean of the final 10% of the trace.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::simulation::SimTrace;

pub const SETTLING_BAND: f64 = 0.02;
pub const RISE_LOW: f64 = 0.1;
pub const RISE_HIGH: f64 = 0.9;
pub const STEADY_WINDOW: f64 = 0.1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("degenerate input: {0}")]
    Degenerate(&'static str),
    #[error("response never rises through {0:.0}% of the target")]
    NoRise(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepMetrics {
    pub rise_time: f64,
    /// `None` when the response is still outside the band at the last sample.
    pub settling_time: Option<f64>,
    pub overshoot_abs: f64,
    pub overshoot_pct: f64,
    pub steady_state_value: f64,
    pub steady_state_error: f64,
    /// The final window still swings by more than the settling band.
    pub transient_in_final_window: bool,
}

/// First upward crossing of `level` by `y`, interpolated in time.
fn crossing_time(y: &[f64], level: f64, ts: f64) -> Option<f64> {
    y.windows(2).enumerate().find_map(|(i, w)| {
        if w[0] < level && w[1] >= level {
            let frac = (level - w[0]) / (w[1] - w[0]);
            Some((i as f64 + frac) * ts)
        } else {
            None
        }
    })
}

pub fn step_metrics(trace: &SimTrace, target: f64) -> Result<StepMetrics, MetricsError> {
    if target == 0.0 || !target.is_finite() {
        return Err(MetricsError::Degenerate("step target must be nonzero"));
    }
    if trace.len() < 2 {
        return Err(MetricsError::Degenerate("trace needs at least two samples"));
    }
    let ts = trace.ts;
    let scale = target.abs();
    // normalized so the target is +1 regardless of sign
    let y: Vec<f64> = trace.f.iter().map(|f| f / target).collect();

    let t_low = crossing_time(&y, RISE_LOW, ts).ok_or(MetricsError::NoRise(100.0 * RISE_LOW))?;
    let t_high = crossing_time(&y, RISE_HIGH, ts).ok_or(MetricsError::NoRise(100.0 * RISE_HIGH))?;

    let outside = |v: f64| (v - 1.0).abs() > SETTLING_BAND;
    let settling_time = match y.iter().rposition(|&v| outside(v)) {
        None => Some(0.0),
        Some(last) if last + 1 == y.len() => None,
        Some(last) => {
            let (a, b) = (y[last], y[last + 1]);
            let edge = if a > 1.0 {
                1.0 + SETTLING_BAND
            } else {
                1.0 - SETTLING_BAND
            };
            let frac = if b != a {
                ((edge - a) / (b - a)).clamp(0.0, 1.0)
            } else {
                1.0
            };
            Some((last as f64 + frac) * ts)
        }
    };

    let peak = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let overshoot_abs = ((peak - 1.0) * scale).max(0.0);

    let window = ((trace.len() as f64 * STEADY_WINDOW).ceil() as usize).max(1);
    let tail = &trace.f[trace.len() - window..];
    let steady_state_value = tail.iter().sum::<f64>() / window as f64;
    let (lo, hi) = tail
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });

    Ok(StepMetrics {
        rise_time: t_high - t_low,
        settling_time,
        overshoot_abs,
        overshoot_pct: 100.0 * overshoot_abs / scale,
        steady_state_value,
        steady_state_error: (target - steady_state_value).abs(),
        transient_in_final_window: hi - lo > 2.0 * SETTLING_BAND * scale,
    })
}

/// Root-mean-square of the tracking error column.
pub fn tracking_rms(trace: &SimTrace) -> Result<f64, MetricsError> {
    if trace.e.is_empty() {
        return Err(MetricsError::Degenerate("empty trace"));
    }
    Ok((trace.e.iter().map(|e| e * e).sum::<f64>() / trace.e.len() as f64).sqrt())
}

/// `sum u[k]^2 * Ts`, in volts squared times seconds.
pub fn control_energy(trace: &SimTrace) -> Result<f64, MetricsError> {
    if trace.u.is_empty() {
        return Err(MetricsError::Degenerate("empty trace"));
    }
    Ok(trace.u.iter().map(|u| u * u).sum::<f64>() * trace.ts)
}

/// Serialized metrics document. Step fields are `null` when no step target
/// applies or the response never rises/settles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub rise_time_s: Option<f64>,
    pub settling_time_s: Option<f64>,
    pub overshoot_n: Option<f64>,
    pub overshoot_pct: Option<f64>,
    pub steady_state_n: Option<f64>,
    pub steady_state_error_n: Option<f64>,
    pub tracking_rms_n: f64,
    pub control_energy: f64,
}

impl MetricsReport {
    /// Tracking and energy always; step metrics when `step_target` is given
    /// and the response rises through it.
    pub fn from_trace(trace: &SimTrace, step_target: Option<f64>) -> Result<Self, MetricsError> {
        let step = step_target.and_then(|target| step_metrics(trace, target).ok());
        Ok(Self {
            rise_time_s: step.map(|m| m.rise_time),
            settling_time_s: step.and_then(|m| m.settling_time),
            overshoot_n: step.map(|m| m.overshoot_abs),
            overshoot_pct: step.map(|m| m.overshoot_pct),
            steady_state_n: step.map(|m| m.steady_state_value),
            steady_state_error_n: step.map(|m| m.steady_state_error),
            tracking_rms_n: tracking_rms(trace)?,
            control_energy: control_energy(trace)?,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("metrics serialize");
        s.push('\n');
        s
    }

    /// One-line human summary.
    pub fn summary(&self) -> String {
        let opt =
            |v: Option<f64>, unit: &str| v.map_or("n/a".to_string(), |v| format!("{v:.4}{unit}"));
        format!(
            "rise {} settle {} overshoot {} ({}) ss {} rms {:.4} N energy {:.4} V^2s",
            opt(self.rise_time_s, " s"),
            opt(self.settling_time_s, " s"),
            opt(self.overshoot_n, " N"),
            opt(self.overshoot_pct, " %"),
            opt(self.steady_state_n, " N"),
            self.tracking_rms_n,
            self.control_energy
        )
    }
}
