//! Minimizes the energy of `−0.1u'' + 1.98u = 0.1` on (0, 1) and compares
//! the minimizer with the fixed-point solution and the cosh closed form.
//!
//! Run with `cargo run --example variational`.

use rdnet::geometry::{Grid, GridFunction, RectDomain, ScalarField, VectorField};
use rdnet::presets::example35;
use rdnet::stationary::{
    energy_eval, fixed_point_solve, helmholtz_unit_source_profile, variational_minimize, FixedPointOptions,
    MinimizeOptions, StationaryProblem,
};

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn main() -> rdnet::Result<()> {
    let grid = Grid::uniform(RectDomain::interval(1.0)?, 401)?;
    let functional = example35::functional();

    // Start from a rough guess so the descent has something to do.
    let start = ScalarField::constant(&grid, 0.2);
    let (u, report) = variational_minimize(&functional, &start, &MinimizeOptions::default())?;
    println!(
        "minimizer: {} iterations, energy {:.9} -> {:.9}, gradient norm {:.2e}",
        report.iterations,
        energy_eval(&functional, &start)?,
        report.energy,
        report.gradient_norm
    );

    let problem = StationaryProblem::new(example35::mode(), example35::activation(), grid)?;
    let (y, _) = fixed_point_solve(&problem, &VectorField::zeros(&grid, 1), &FixedPointOptions::default())?;
    let exact = ScalarField::from_fn(&grid, |[x, _]| helmholtz_unit_source_profile(19.8, 1.0, x));

    println!("sup |minimizer - closed form|   = {:.2e}", sup_diff(u.values(), exact.values()));
    println!("sup |fixed point - closed form| = {:.2e}", sup_diff(y.values(), exact.values()));
    println!("peak {:.6} < ODE equilibrium 0.1/1.98 = {:.6}", u.sup_norm(), example35::EQUILIBRIUM);
    Ok(())
}
