//! Grid over rho and k, run in parallel through the sweep command.
//!
//! cargo run --example weight_sweep -- [out_dir]

use twodof_sea::cli::cmd_sweep;
use twodof_sea::config::{
    ControllerSpec, PlantSpec, ScenarioConfig, ScenarioSettings, SweepGrid, TwoDofWeights,
};
use twodof_sea::sea_model::SeaParams;

fn main() {
    let out = std::env::args()
        .nth(1)
        .map_or_else(|| std::env::temp_dir().join("twodof_sweep"), Into::into);
    let cfg = ScenarioConfig {
        plant: PlantSpec::Sea(SeaParams::paper_gain()),
        controller: ControllerSpec::TwoDof(TwoDofWeights::hardware_weights()),
        scenario: ScenarioSettings {
            duration_s: 2.0,
            ..Default::default()
        }
        .noise_free(),
        sweep: Some(SweepGrid {
            rho: vec![0.5, 1.0, 3.0, 6.0],
            k: vec![0.5, 2.0],
            ..Default::default()
        }),
    };
    let config_path = std::env::temp_dir().join("twodof_sweep_config.json");
    std::fs::write(&config_path, cfg.to_json()).unwrap();

    let res = cmd_sweep(&config_path, &out, None);
    println!("{} (exit {})", res.message, res.exit_code);
    if res.is_success() {
        print!(
            "{}",
            std::fs::read_to_string(out.join("index.csv")).unwrap()
        );
    }
}
