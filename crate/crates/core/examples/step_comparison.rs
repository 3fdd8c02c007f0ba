//! Noise-free 10 N step: 2-DOF design against both PID gain groups.
//!
//! cargo run --example step_comparison

use twodof_sea::config::{
    ControllerSpec, PlantSpec, ReferenceSpec, ScenarioConfig, ScenarioSettings, TwoDofWeights,
};
use twodof_sea::metrics::MetricsReport;
use twodof_sea::sea_model::SeaParams;
use twodof_sea::simulation::run_closed_loop;
use twodof_sea::synthesis::PidGains;

fn main() {
    let controllers = [
        (
            "2-DOF rho=3 lambda=10 k=2",
            ControllerSpec::TwoDof(TwoDofWeights::hardware_weights()),
        ),
        ("PID group A", ControllerSpec::Pid(PidGains::group_a())),
        ("PID group B", ControllerSpec::Pid(PidGains::group_b())),
    ];
    let scenario = ScenarioSettings {
        reference: ReferenceSpec::Step { amplitude: 10.0 },
        duration_s: 5.0,
        ..Default::default()
    }
    .noise_free();
    for (name, controller) in controllers {
        let cfg = ScenarioConfig {
            plant: PlantSpec::Sea(SeaParams::paper_gain()),
            controller,
            scenario: scenario.clone(),
            sweep: None,
        };
        let trace = run_closed_loop(&cfg).unwrap();
        let m = MetricsReport::from_trace(&trace, Some(10.0)).unwrap();
        println!("{name:<28} {}", m.summary());
    }
}
