//! Step response with input disturbance and measurement noise; writes the trace.
//!
//! cargo run --example noisy_step -- [seed] [out.csv]

use twodof_sea::config::{
    ControllerSpec, PlantSpec, ScenarioConfig, ScenarioSettings, TwoDofWeights,
};
use twodof_sea::metrics::MetricsReport;
use twodof_sea::sea_model::SeaParams;
use twodof_sea::simulation::run_closed_loop;

fn main() {
    let mut args = std::env::args().skip(1);
    let seed = args.next().map_or(42, |s| s.parse().expect("integer seed"));
    let out = args.next();

    let cfg = ScenarioConfig {
        plant: PlantSpec::Sea(SeaParams::default()),
        controller: ControllerSpec::TwoDof(TwoDofWeights::hardware_weights()),
        scenario: ScenarioSettings {
            seed,
            sigma_d: 0.02,
            sigma_n: 0.1,
            ..Default::default()
        },
        sweep: None,
    };
    let trace = run_closed_loop(&cfg).unwrap();
    println!(
        "seed {seed}: {}",
        MetricsReport::from_trace(&trace, Some(10.0))
            .unwrap()
            .summary()
    );

    let tail = &trace.f[trace.len() - 1000..];
    let mean = tail.iter().sum::<f64>() / tail.len() as f64;
    let sd = (tail.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / tail.len() as f64).sqrt();
    println!("last second: mean {mean:.4} N, std {sd:.4} N");

    if let Some(path) = out {
        std::fs::write(&path, trace.to_csv()).unwrap();
        println!("wrote {path}");
    }
}
