//! 0 to 2 Hz chirp over 10 s with default noise: tracking RMS and control energy.
//!
//! cargo run --example chirp_tracking

use twodof_sea::config::{
    ControllerSpec, PlantSpec, ReferenceSpec, ScenarioConfig, ScenarioSettings, TwoDofWeights,
};
use twodof_sea::metrics::{control_energy, tracking_rms};
use twodof_sea::sea_model::SeaParams;
use twodof_sea::simulation::run_closed_loop;
use twodof_sea::synthesis::PidGains;

fn main() {
    let scenario = ScenarioSettings {
        reference: ReferenceSpec::default_chirp(),
        duration_s: 10.0,
        ..Default::default()
    };
    let runs = [
        (
            "2-DOF rho=3",
            ControllerSpec::TwoDof(TwoDofWeights::hardware_weights()),
        ),
        (
            "2-DOF rho=0.5",
            ControllerSpec::TwoDof(TwoDofWeights::new(0.5, 10.0, 2.0)),
        ),
        ("PID group A", ControllerSpec::Pid(PidGains::group_a())),
    ];
    println!(
        "{:<16} {:>12} {:>14}",
        "controller", "rms (N)", "energy (V^2 s)"
    );
    for (name, controller) in runs {
        let cfg = ScenarioConfig {
            plant: PlantSpec::Sea(SeaParams::paper_gain()),
            controller,
            scenario: scenario.clone(),
            sweep: None,
        };
        let t = run_closed_loop(&cfg).unwrap();
        println!(
            "{name:<16} {:>12.4} {:>14.4}",
            tracking_rms(&t).unwrap(),
            control_energy(&t).unwrap()
        );
    }
}
