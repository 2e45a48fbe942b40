//! Nonlinearity whose every multiple of the first eigenfunction (up to unit
//! sup norm) is stationary, so descent from different starts lands on
//! different solutions.
//!
//! Run with `cargo run --release --example multiplicity`.

use rdnet::geometry::{eigenfunction, Grid, RectDomain, ScalarField};
use rdnet::presets::statement2;
use rdnet::stationary::{find_stationary_multiplicity, EnergyFunctional, MinimizeOptions};

fn report(domain: RectDomain, nodes: usize) -> rdnet::Result<()> {
    let grid = Grid::uniform(domain, nodes)?;
    let k = vec![1; domain.dims()];
    let (phi, _) = eigenfunction(&grid, &k)?;
    let lambda_h = grid.discrete_first_eigenvalue();
    let phi = phi.scaled(1.0 / phi.sup_norm());

    // The discrete eigenvalue keeps t·φ₁ exactly critical on the grid.
    let functional = EnergyFunctional::statement2(statement2::D, statement2::C, statement2::A, lambda_h);
    let inits = [0.5, -0.5, 0.0, 0.9].map(|t| phi.scaled(t));
    let tol = 1e-9;
    let rep = find_stationary_multiplicity(&functional, &inits, &MinimizeOptions { tol, ..Default::default() })?;

    println!("domain {:?}, {} distinct solutions:", domain.lengths(), rep.count());
    for s in &rep.solutions {
        println!("  sup {:.4}  L2 {:.4}  energy {:+.3e}  from inits {:?}", s.sup_norm, s.l2_norm, s.energy, s.from_inits);
    }
    for (k, why) in &rep.failures {
        println!("  init {k} failed: {why}");
    }
    let zero = ScalarField::zeros(&grid);
    println!("  energy at zero: {:+.3e}", functional.eval(&zero)?);
    Ok(())
}

fn main() -> rdnet::Result<()> {
    report(statement2::domain(), 201)?;
    report(RectDomain::rectangle(1.0, 1.3)?, 41)
}
