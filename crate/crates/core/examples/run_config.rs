//! Design and simulate from a JSON scenario file.
//!
//! cargo run --example run_config -- crates/core/configs/step_2dof.json

use twodof_sea::metrics::MetricsReport;
use twodof_sea::simulation::run_closed_loop;
use twodof_sea::ScenarioConfig;

fn main() {
    let path = std::env::args()
        .nth(1)
        .expect("usage: run_config <config.json>");
    let cfg = ScenarioConfig::load(path.as_ref()).unwrap_or_else(|e| panic!("{e}"));
    let trace = run_closed_loop(&cfg).unwrap_or_else(|e| panic!("{e}"));
    let target = match cfg.scenario.reference {
        twodof_sea::config::ReferenceSpec::Step { amplitude } if amplitude != 0.0 => {
            Some(amplitude)
        }
        _ => None,
    };
    println!("{} samples", trace.len());
    println!(
        "{}",
        MetricsReport::from_trace(&trace, target).unwrap().summary()
    );
    for w in &trace.warnings {
        println!("warning: {w}");
    }
}
