//! Delayed Cohen–Grossberg network, input removed, with periodic impulses
//! on (0, 1).
//!
//! Impulses shrink the state by the gain `m` at each scheduled time; the
//! fitted decay rate is compared with the impulse-free run.
//!
//! Run with `cargo run --release --example impulsive_cg`.

use rdnet::certificates::{cg_check_c1, cg_rates};
use rdnet::geometry::{Grid, RectDomain};
use rdnet::initial::InitialHistory;
use rdnet::presets::example35;
use rdnet::simulator::{simulate_cg, SimConfig, Space};

fn main() -> rdnet::Result<()> {
    let mut plain = example35::cg()?;
    // Without the constant input the rest state is zero.
    plain.inputs = vec![0.0];
    let c1 = cg_check_c1(&plain)?;
    let rates = cg_rates(&plain)?;
    println!("block matrix lambda_max = {:.4} (holds: {}), lambda = {:.6}", c1.lambda_max, c1.holds, rates.lambda);

    let mut kicked = plain.clone();
    kicked.impulse_times = (1..=20).map(f64::from).collect();
    kicked.m = vec![0.8];

    let grid = Grid::uniform(RectDomain::interval(1.0)?, 101)?;
    let initial = InitialHistory::first_mode(vec![1.0], vec![0.3]);
    let config = SimConfig::new(0.01, 20.0);
    for (label, cg) in [("no impulses", &plain), ("m = 0.8 every t = 1", &kicked)] {
        let traj = simulate_cg(cg, &Space::Grid(grid), &config, &initial)?;
        let d = traj.decay(0.5)?;
        println!(
            "{label:>20}: V(0) = {:.4e}, V(20) = {:.4e}, eta = {:.4} (R^2 {:.4})",
            traj.v[0],
            traj.v.last().copied().unwrap_or(f64::NAN),
            d.rate,
            d.r_squared
        );
    }
    Ok(())
}
