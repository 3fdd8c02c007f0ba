//! ZOH and Tustin against closed forms, and the discretized controller.
//!
//! cargo run --example discretization

use twodof_sea::config::Discretization;
use twodof_sea::lti::TransferFunction;
use twodof_sea::sea_model::{plant_tf, SeaParams};
use twodof_sea::simulation::discretize_controller;
use twodof_sea::synthesis::design_2dof;

fn main() {
    let lag = TransferFunction::from_coeffs(&[1.0], &[1.0, 1.0]).unwrap();
    let zoh = lag.to_statespace().discretize_zoh(0.1).unwrap();
    println!(
        "ZOH 1/(s+1), Ts=0.1: Ad={:.15} (exp(-0.1)={:.15})",
        zoh.a[(0, 0)],
        (-0.1f64).exp()
    );
    println!(
        "                     Bd*C={:.15} (1-exp(-0.1)={:.15})",
        zoh.b[(0, 0)] * zoh.c[0],
        1.0 - (-0.1f64).exp()
    );

    let tustin = lag.discretize_tustin(0.1).unwrap();
    println!(
        "Tustin pole {:.15} (expected {:.15})",
        tustin.eigenvalues()[0].re,
        0.95 / 1.05
    );

    let plant = plant_tf(&SeaParams::default()).unwrap();
    let z = plant.to_statespace().discretize_zoh(1e-3).unwrap();
    println!(
        "plant ZOH at 1 ms: order {}, Schur stable: {}",
        z.order(),
        z.is_schur_stable()
    );

    let c = design_2dof(&plant, 3.0, 10.0, 2.0, 1e-8).unwrap();
    let ctrl = discretize_controller(&c.c1, &c.c2, 1e-3, Discretization::Tustin).unwrap();
    println!(
        "controller [C1, -C2]: {} states, {} inputs",
        ctrl.order(),
        ctrl.inputs()
    );
    for p in ctrl.eigenvalues() {
        println!("  |z| = {:.9}", p.norm());
    }
}
