//! JSON scenario configuration.
//!
//! A config document has the sections `plant`, `controller`, and
//! optionally `scenario` and `sweep`. Unknown keys are rejected.
//!
//! ```json
//! {
//!   "plant": { "sea": { "use_paper_gain": true } },
//!   "controller": { "two_dof": { "rho": 3, "kappa": 2, "lambda": 10 } },
//!   "scenario": {
//!     "reference": { "kind": "step", "amplitude": 10 },
//!     "duration_s": 5, "sigma_d": 0, "sigma_n": 0, "seed": 42
//!   }
//! }
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lti::{TransferFunction, DEFAULT_TS};
use crate::poly::DEFAULT_TOL;
use crate::sea_model::{plant_tf, SeaError, SeaParams};
use crate::synthesis::{
    design_2dof, pid_controller, ControllerExport, PidGains, SynthesisError, TwoDofController,
};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub plant: PlantSpec,
    pub controller: ControllerSpec,
    #[serde(default)]
    pub scenario: ScenarioSettings,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepGrid>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PlantSpec {
    Sea(SeaParams),
    Tf(TransferFunction),
}

impl PlantSpec {
    pub fn transfer_function(&self) -> Result<TransferFunction, SeaError> {
        match self {
            PlantSpec::Sea(p) => plant_tf(p),
            PlantSpec::Tf(tf) => Ok(tf.clone()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoDofWeights {
    pub rho: f64,
    pub lambda: f64,
    #[serde(alias = "kappa")]
    pub k: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

impl TwoDofWeights {
    pub fn new(rho: f64, lambda: f64, k: f64) -> Self {
        Self {
            rho,
            lambda,
            k,
            tol: DEFAULT_TOL,
        }
    }

    /// Weights used for the hardware comparison: rho = 3, k = 2, lambda = 10.
    pub fn hardware_weights() -> Self {
        Self::new(3.0, 10.0, 2.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ControllerSpec {
    TwoDof(TwoDofWeights),
    Pid(PidGains),
    /// A controller previously written by the `design` command.
    Designed(Box<ControllerExport>),
}

/// A resolved controller pair, with the 2-DOF design attached when one was run.
#[derive(Debug, Clone)]
pub struct ResolvedController {
    pub c1: TransferFunction,
    pub c2: TransferFunction,
    pub design: Option<TwoDofController>,
    pub export: ControllerExport,
}

impl ControllerSpec {
    pub fn resolve(&self, plant: &TransferFunction) -> Result<ResolvedController, SynthesisError> {
        match self {
            ControllerSpec::TwoDof(w) => {
                let design = design_2dof(plant, w.rho, w.lambda, w.k, w.tol)?;
                Ok(ResolvedController {
                    c1: design.c1.clone(),
                    c2: design.c2.clone(),
                    export: ControllerExport::from_two_dof(&design),
                    design: Some(design),
                })
            }
            ControllerSpec::Pid(g) => {
                let (c1, c2) = pid_controller(g)?;
                Ok(ResolvedController {
                    c1,
                    c2,
                    design: None,
                    export: ControllerExport::from_pid(g)?,
                })
            }
            ControllerSpec::Designed(e) => {
                let mut export = (**e).clone();
                export.diagnostics = None;
                Ok(ResolvedController {
                    c1: e.c1.clone(),
                    c2: e.c2.clone(),
                    design: None,
                    export,
                })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Discretization {
    #[default]
    Zoh,
    Tustin,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ReferenceSpec {
    Step {
        #[serde(default = "default_amplitude")]
        amplitude: f64,
    },
    Sine {
        #[serde(default = "default_amplitude")]
        amplitude: f64,
        freq_hz: f64,
    },
    /// Linear chirp from `f0_hz` to `f1_hz` over `sweep_s` seconds.
    Chirp {
        #[serde(default = "default_amplitude")]
        amplitude: f64,
        f0_hz: f64,
        f1_hz: f64,
        sweep_s: f64,
    },
}

fn default_amplitude() -> f64 {
    10.0
}

impl ReferenceSpec {
    pub fn amplitude(&self) -> f64 {
        match *self {
            ReferenceSpec::Step { amplitude }
            | ReferenceSpec::Sine { amplitude, .. }
            | ReferenceSpec::Chirp { amplitude, .. } => amplitude,
        }
    }

    pub fn with_amplitude(self, a: f64) -> Self {
        match self {
            ReferenceSpec::Step { .. } => ReferenceSpec::Step { amplitude: a },
            ReferenceSpec::Sine { freq_hz, .. } => ReferenceSpec::Sine {
                amplitude: a,
                freq_hz,
            },
            ReferenceSpec::Chirp {
                f0_hz,
                f1_hz,
                sweep_s,
                ..
            } => ReferenceSpec::Chirp {
                amplitude: a,
                f0_hz,
                f1_hz,
                sweep_s,
            },
        }
    }

    /// 0 to 2 Hz in 10 s at 10 N.
    pub fn default_chirp() -> Self {
        ReferenceSpec::Chirp {
            amplitude: 10.0,
            f0_hz: 0.0,
            f1_hz: 2.0,
            sweep_s: 10.0,
        }
    }
}

pub const DEFAULT_SIGMA_D: f64 = 0.01;
pub const DEFAULT_SIGMA_N: f64 = 0.05;
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioSettings {
    pub reference: ReferenceSpec,
    pub duration_s: f64,
    pub ts_s: f64,
    /// Input disturbance standard deviation, control volts.
    pub sigma_d: f64,
    /// Measurement noise standard deviation, N.
    pub sigma_n: f64,
    /// Constant input disturbance added to the random part, control volts.
    pub d_offset: f64,
    pub seed: u64,
    pub plant_discretization: Discretization,
    pub controller_discretization: Discretization,
}

impl Default for ScenarioSettings {
    fn default() -> Self {
        Self {
            reference: ReferenceSpec::Step { amplitude: 10.0 },
            duration_s: 5.0,
            ts_s: DEFAULT_TS,
            sigma_d: DEFAULT_SIGMA_D,
            sigma_n: DEFAULT_SIGMA_N,
            d_offset: 0.0,
            seed: DEFAULT_SEED,
            plant_discretization: Discretization::Zoh,
            controller_discretization: Discretization::Tustin,
        }
    }
}

impl ScenarioSettings {
    /// Same settings with disturbance and noise switched off.
    pub fn noise_free(mut self) -> Self {
        self.sigma_d = 0.0;
        self.sigma_n = 0.0;
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(ConfigError::Invalid(format!(
                    "{name} must be positive, got {v}"
                )))
            }
        };
        positive("duration_s", self.duration_s)?;
        positive("ts_s", self.ts_s)?;
        for (name, v) in [("sigma_d", self.sigma_d), ("sigma_n", self.sigma_n)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(ConfigError::Invalid(format!(
                    "{name} must be nonnegative, got {v}"
                )));
            }
        }
        if !self.d_offset.is_finite() {
            return Err(ConfigError::Invalid("d_offset must be finite".into()));
        }
        if self.duration_s / self.ts_s < 1.0 {
            return Err(ConfigError::Invalid(
                "duration_s must cover at least one sample".into(),
            ));
        }
        Ok(())
    }
}

/// Parameter grid for the `sweep` command. Either 2-DOF weights or PID
/// gains may be listed; unlisted parameters come from the base controller.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepGrid {
    pub rho: Vec<f64>,
    pub lambda: Vec<f64>,
    #[serde(alias = "kappa")]
    pub k: Vec<f64>,
    pub kp: Vec<f64>,
    pub ki: Vec<f64>,
    pub kd: Vec<f64>,
}

impl SweepGrid {
    pub fn is_two_dof(&self) -> bool {
        !(self.rho.is_empty() && self.lambda.is_empty() && self.k.is_empty())
    }

    pub fn is_pid(&self) -> bool {
        !(self.kp.is_empty() && self.ki.is_empty() && self.kd.is_empty())
    }
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: ScenarioConfig = serde_json::from_str(text)?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}
