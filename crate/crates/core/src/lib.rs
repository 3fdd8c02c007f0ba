//! Force control of a cable-driven series elastic actuator for body weight
//! support: two-degree-of-freedom controller synthesis by spectral
//! factorization, a filtered-PID baseline, and a deterministic fixed-step
//! closed-loop simulator with step, sine, and chirp references.
//!
//! Module map:
//!
//! - [`poly`]: real polynomials, roots, Hurwitz test, spectral factorization
//! - [`lti`]: transfer functions, realizations, ZOH and Tustin discretization
//! - [`sea_model`]: the identified actuator plant
//! - [`synthesis`]: 2-DOF design, PID, closed-loop transfers, stability checks
//! - [`simulation`]: reference and noise generators, the closed loop, CSV traces
//! - [`metrics`]: step metrics, tracking RMS, control energy
//! - [`config`] and [`cli`]: JSON scenarios and the command implementations
//!
//! ```
//! use twodof_sea::sea_model::{plant_tf, SeaParams};
//! use twodof_sea::synthesis::design_2dof;
//!
//! let plant = plant_tf(&SeaParams::default()).unwrap();
//! let ctrl = design_2dof(&plant, 3.0, 10.0, 2.0, 1e-8).unwrap();
//! assert!(ctrl.diagnostics.bezout_residual < 1e-8);
//! ```

pub mod cli;
pub mod config;
pub mod lti;
pub mod metrics;
pub mod poly;
pub mod sea_model;
pub mod simulation;
pub mod synthesis;

pub use config::ScenarioConfig;
pub use lti::TransferFunction;
pub use poly::Polynomial;
pub use simulation::{run_closed_loop, SimTrace};
pub use synthesis::{design_2dof, TwoDofController};
