//! 2-DOF design on the SEA plant, with the closed-loop checks.
//!
//! cargo run --example design_sea_plant -- [rho] [lambda] [k]

use twodof_sea::poly::poly_mul;
use twodof_sea::sea_model::{plant_tf, SeaParams};
use twodof_sea::synthesis::{closed_loop, design_2dof, verify_internal_stability};

fn main() {
    let args: Vec<f64> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("numeric weight"))
        .collect();
    let (rho, lambda, k) = match args[..] {
        [rho, lambda, k] => (rho, lambda, k),
        [] => (3.0, 10.0, 2.0),
        _ => panic!("usage: design_sea_plant [rho lambda k]"),
    };

    let plant = plant_tf(&SeaParams::paper_gain()).unwrap();
    println!("P(s) = ({}) / ({})", plant.num(), plant.den());

    let c = design_2dof(&plant, rho, lambda, k, 1e-8).unwrap();
    println!("d_rho      = {}", c.d_rho);
    println!("d_lambda_k = {}", c.d_lambda_k);
    println!("p          = {}", c.p);
    println!("q          = {}", c.q);
    println!("C1 = ({}) / ({})", c.c1.num(), c.c1.den());
    println!("C2 = ({}) / ({})", c.c2.num(), c.c2.den());
    println!(
        "bezout residual {:.2e}, condition {:.2e}",
        c.diagnostics.bezout_residual, c.diagnostics.sylvester_condition
    );

    let cl = closed_loop(&plant, &c.c1, &c.c2).unwrap();
    println!(
        "T_ref(0) = {:.12}, T_dist(0) = {:.3e}",
        cl.t_ref.dc_gain(),
        cl.t_dist.dc_gain()
    );
    let reduced = cl
        .t_ref
        .cancel_common_factor(&poly_mul(&c.d_lambda_k, &c.p), 1e-6)
        .unwrap();
    println!("T_ref reduced = ({}) / ({})", reduced.num(), reduced.den());

    let report = verify_internal_stability(&plant, &c.c1, &c.c2, 0.0);
    println!("stable: {}", report.stable);
    for z in &report.closed_loop_poles {
        println!("  pole {:.4} {:+.4}j", z.re, z.im);
    }
}
