//! First Dirichlet eigenvalues of rectangles, continuous and discrete.
//!
//! Run with `cargo run --example eigenvalues`.

use rdnet::geometry::{eigenfunction, first_eigenvalue, Grid, GridFunction, RectDomain};
use rdnet::presets::{EXAMPLE41_LAMBDAS, EXAMPLE41_SIDES};

fn main() -> rdnet::Result<()> {
    println!("{:>6}  {:>12}  {:>12}  {:>14}", "side", "lambda_1", "quoted", "5-point, 101^2");
    for (side, quoted) in EXAMPLE41_SIDES.iter().zip(EXAMPLE41_LAMBDAS) {
        let domain = RectDomain::square(*side)?;
        let grid = Grid::uniform(domain, 101)?;
        println!(
            "{side:>6}  {:>12.6}  {quoted:>12}  {:>14.6}",
            first_eigenvalue(&domain),
            grid.discrete_first_eigenvalue()
        );
    }

    // Sampled sin·sin is an exact eigenvector of the 5-point Laplacian, with
    // the discrete eigenvalue rather than the continuous one.
    let grid = Grid::uniform(RectDomain::rectangle(1.0, 2.0)?, 63)?;
    let (phi, lambda) = eigenfunction(&grid, &[1, 1])?;
    let lambda_h = grid.discrete_first_eigenvalue();
    let lap = grid.laplacian(phi.values());
    let residual = |l: f64| lap.iter().zip(phi.values()).map(|(d, p)| (d + l * p).abs()).fold(0.0, f64::max);
    println!("1x2 rectangle: lambda = {lambda:.6}, lambda_h = {lambda_h:.6}");
    println!("  max |Δ_h φ + λ φ|   = {:.2e}", residual(lambda));
    println!("  max |Δ_h φ + λ_h φ| = {:.2e}", residual(lambda_h));
    Ok(())
}
