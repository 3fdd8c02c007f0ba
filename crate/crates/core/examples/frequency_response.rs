//! Bode data of the plant and the closed-loop transfers.
//!
//! cargo run --example frequency_response

use twodof_sea::cli::log_grid;
use twodof_sea::sea_model::{plant_tf, SeaParams};
use twodof_sea::synthesis::{closed_loop, design_2dof};

fn main() {
    let plant = plant_tf(&SeaParams::default()).unwrap();
    let c = design_2dof(&plant, 3.0, 10.0, 2.0, 1e-8).unwrap();
    let cl = closed_loop(&plant, &c.c1, &c.c2).unwrap();

    let omegas = log_grid(0.1, 1000.0, 9);
    let db = |z: num_complex::Complex64| 20.0 * z.norm().log10();
    println!(
        "{:>10} {:>10} {:>10} {:>10} {:>10}",
        "w (rad/s)", "P dB", "T_ref dB", "T_dist dB", "T_noise dB"
    );
    for w in omegas {
        let s = num_complex::Complex64::new(0.0, w);
        println!(
            "{w:>10.2} {:>10.2} {:>10.2} {:>10.2} {:>10.2}",
            db(plant.eval(s)),
            db(cl.t_ref.eval(s)),
            db(cl.t_dist.eval(s)),
            db(cl.t_noise.eval(s))
        );
    }
}
