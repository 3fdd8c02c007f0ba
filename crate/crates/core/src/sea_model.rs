//! Identified plant of the cable-driven series elastic actuator.
//!
//! Control voltage drives a velocity-controlled motor `G(s)`; the winch
//! integrates velocity into cable displacement, scaled by the winch radius
//! and gear reduction, and the spring converts displacement into force:
//!
//! `P(s) = G(s) * (1/s) * (r / Kg) * Ks`

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lti::{LtiError, TransferFunction};
use crate::poly::{PolyError, Polynomial};

/// Rounded plant gain as printed for the identified unit; the exact product
/// of the default parameters is `69788 * 0.02 * 460 / 3.5 ≈ 183443.1`.
pub const PAPER_PLANT_GAIN: f64 = 183_440.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeaError {
    #[error("invalid SEA parameter: {0}")]
    Parameter(String),
    #[error(transparent)]
    Lti(#[from] LtiError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SeaParams {
    /// Motor velocity model numerator (rad/s per volt), descending powers.
    pub motor_num: Vec<f64>,
    pub motor_den: Vec<f64>,
    /// Planetary gear reduction ratio.
    pub kg: f64,
    /// Spring constant, N/m.
    pub ks: f64,
    /// Winch radius, m.
    pub r: f64,
    /// Replace the plant numerator by [`PAPER_PLANT_GAIN`] verbatim.
    pub use_paper_gain: bool,
}

impl Default for SeaParams {
    fn default() -> Self {
        Self {
            motor_num: vec![69788.0],
            motor_den: vec![1.0, 39.2, 840.0],
            kg: 3.5,
            ks: 460.0,
            r: 0.02,
            use_paper_gain: false,
        }
    }
}

impl SeaParams {
    pub fn paper_gain() -> Self {
        Self {
            use_paper_gain: true,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), SeaError> {
        for (name, v) in [("kg", self.kg), ("ks", self.ks), ("r", self.r)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(SeaError::Parameter(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// `r * Ks / Kg`, converting motor angle into spring force.
    pub fn transmission_gain(&self) -> f64 {
        self.r * self.ks / self.kg
    }
}

/// Motor velocity model `G(s)` as given.
pub fn motor_tf(params: &SeaParams) -> Result<TransferFunction, SeaError> {
    params.validate()?;
    Ok(TransferFunction::from_coeffs(
        &params.motor_num,
        &params.motor_den,
    )?)
}

/// Control voltage to cable force, `G(s) * (1/s) * (r Ks / Kg)`.
pub fn plant_tf(params: &SeaParams) -> Result<TransferFunction, SeaError> {
    let motor = motor_tf(params)?;
    let integrator = Polynomial::new(vec![1.0, 0.0])?;
    let den = motor.den() * &integrator;
    let num = if params.use_paper_gain {
        if motor.num().degree() != 0 {
            return Err(SeaError::Parameter(
                "use_paper_gain requires a constant motor numerator".into(),
            ));
        }
        Polynomial::constant(PAPER_PLANT_GAIN)
    } else {
        motor.num().scale(params.transmission_gain())
    };
    Ok(TransferFunction::new(num, den)?)
}
