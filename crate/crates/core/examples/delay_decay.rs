//! Scalar delayed reaction–diffusion equation linearized about its
//! stationary profile: the fitted decay rate of `‖u‖` against the Halanay
//! rate `λ/2`, where `λ = a − b·e^{λτ}`.
//!
//! Run with `cargo run --release --example delay_decay`.

use rdnet::certificates::solve_lambda;
use rdnet::geometry::{Grid, RectDomain};
use rdnet::initial::InitialHistory;
use rdnet::presets::statement1;
use rdnet::simulator::{simulate, SimConfig, StateForm};

fn main() -> rdnet::Result<()> {
    let (a, b) = statement1::halanay_coefficients();
    let lambda = solve_lambda(a, b, statement1::TAU)?;
    println!("a = {a:.6}, b = {b}, tau = {}: lambda = {lambda:.10}", statement1::TAU);

    let network = statement1::deviation_network(statement1::TAU)?;
    let grid = Grid::uniform(RectDomain::interval(1.0)?, 401)?;
    let initial = InitialHistory::first_mode(vec![1.0], vec![1.0]);
    for dt in [0.02, 0.01, 0.005] {
        let traj = simulate(&network, &grid, StateForm::Absolute, &SimConfig::new(dt, 10.0), &initial)?;
        let d = traj.decay(0.5)?;
        println!("dt = {dt:<5}: eta = {:.5} (R^2 {:.6}), bound lambda/2 = {:.5}", d.rate, d.r_squared, lambda / 2.0);
    }
    Ok(())
}
