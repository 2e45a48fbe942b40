//! The scalar delayed equation whose ODE equilibrium 200/357 is replaced by a
//! nonconstant profile once diffusion and Dirichlet-zero boundaries enter.
//!
//! Run with `cargo run --example stationary_profile`.

use rdnet::geometry::{Grid, GridFunction, RectDomain, VectorField};
use rdnet::presets::statement1;
use rdnet::stationary::{
    fixed_point_solve, residual, statement1_closed_form, FixedPointOptions, SolverForm, StationaryProblem,
};

fn main() -> rdnet::Result<()> {
    let grid = Grid::uniform(RectDomain::interval(1.0)?, 401)?;
    let problem = StationaryProblem::new(statement1::mode(), statement1::activation(), grid)?;
    let exact = statement1_closed_form(&grid)?;

    for form in [SolverForm::Helmholtz, SolverForm::InverseLaplacian] {
        let options = FixedPointOptions { form, max_iter: 200, ..FixedPointOptions::default() };
        match fixed_point_solve(&problem, &VectorField::zeros(&grid, 1), &options) {
            Ok((y, report)) => {
                let err = y.values().iter().zip(exact.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                println!("{form:?}: {} iterations, sup error vs closed form {err:.2e}", report.iterations);
            }
            Err(e) => println!("{form:?}: {e}"),
        }
    }

    let constant = VectorField::from_values(&grid, 1, vec![statement1::EQUILIBRIUM; grid.len()])?;
    println!(
        "residual of the constant {:.6}: {:.3} (the boundary forces it out)",
        statement1::EQUILIBRIUM,
        residual(&problem, &constant)?
    );
    let mid = grid.len() / 2;
    println!("profile at x = {:.3}: {:.6}", grid.coords(mid)[0], exact.values()[mid]);
    Ok(())
}
