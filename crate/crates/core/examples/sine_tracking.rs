//! 0.5 Hz sine tracking; reports amplitude ratio and lag from the last period.
//!
//! cargo run --example sine_tracking

use twodof_sea::config::{
    ControllerSpec, PlantSpec, ReferenceSpec, ScenarioConfig, ScenarioSettings, TwoDofWeights,
};
use twodof_sea::sea_model::SeaParams;
use twodof_sea::simulation::run_closed_loop;

fn main() {
    let freq = 0.5;
    let cfg = ScenarioConfig {
        plant: PlantSpec::Sea(SeaParams::default()),
        controller: ControllerSpec::TwoDof(TwoDofWeights::hardware_weights()),
        scenario: ScenarioSettings {
            reference: ReferenceSpec::Sine {
                amplitude: 10.0,
                freq_hz: freq,
            },
            duration_s: 6.0,
            ..Default::default()
        }
        .noise_free(),
        sweep: None,
    };
    let t = run_closed_loop(&cfg).unwrap();
    let period = (1.0 / freq / t.ts).round() as usize;
    let (r, f) = (&t.r[t.len() - period..], &t.f[t.len() - period..]);
    let peak = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let argmax = |v: &[f64]| {
        v.iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0
    };
    let lag = (argmax(f) as f64 - argmax(r) as f64) * t.ts;
    println!("amplitude ratio {:.5}", peak(f) / peak(r));
    println!("lag {:.1} ms ({:.2} deg)", lag * 1e3, lag * freq * 360.0);
    println!(
        "max |e| over last period {:.4} N",
        t.e[t.len() - period..]
            .iter()
            .fold(0.0f64, |m, e| m.max(e.abs()))
    );
}
