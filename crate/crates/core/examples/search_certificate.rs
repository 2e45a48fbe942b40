//! Searches the β simplex for the largest certifiable γ, with and without
//! the constraint `γ < λ_min(Ψ)`.
//!
//! Run with `cargo run --release --example search_certificate`.

use rdnet::certificates::{search_certificate, SearchOptions, SearchOutcome};
use rdnet::presets::{self, EXAMPLE41_Q};

fn main() -> rdnet::Result<()> {
    let network = presets::example41(1)?;
    for honor in [true, false] {
        let options = SearchOptions {
            beta_step: Some(0.02),
            q: EXAMPLE41_Q,
            honor_theorem_constraint: honor,
            ..SearchOptions::default()
        };
        match search_certificate(&network, &options)? {
            SearchOutcome::Feasible(c) => println!(
                "honor_theorem={honor}: beta = {:.2?}, gamma = {:.6}, rate = {:.6}, margin = {:.3e}",
                c.beta,
                c.gamma,
                c.rate.unwrap_or(f64::NAN),
                c.margin
            ),
            SearchOutcome::Infeasible { least_margin, beta, .. } => {
                println!("honor_theorem={honor}: infeasible, best margin {least_margin:.3e} at {beta:?}")
            }
        }
    }

    let zero = presets::zero_system()?;
    let outcome = search_certificate(&zero, &SearchOptions::default())?;
    println!("zero preset feasible: {}", outcome.certificate().is_some());
    Ok(())
}
