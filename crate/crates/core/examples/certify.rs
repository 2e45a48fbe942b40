//! Verifies the published stability certificates of the three-mode 2D
//! benchmark and reports the switching regions' quadratic forms.
//!
//! Run with `cargo run --example certify`.

use rdnet::certificates::{mode_matrices, verify_certificate};
use rdnet::linalg::lambda_max;
use rdnet::presets::{self, EXAMPLE41_Q};

fn main() -> rdnet::Result<()> {
    for case in 1..=3u8 {
        let network = presets::example41(case)?;
        let published = presets::example41_published(case)?;
        let cert = verify_certificate(&network, &published.beta, published.gamma, EXAMPLE41_Q)?;

        println!("case {case}: tau = {}, beta = {:?}, gamma = {}", network.tau_max, published.beta, published.gamma);
        println!(
            "  margin {:+.6}  feasible {}  rate {:.2}  gamma below lambda_min(Psi): {}",
            cert.margin,
            cert.feasible,
            cert.rate.unwrap_or(f64::NAN),
            cert.theorem_constraint_ok
        );

        // Per-mode forms used by the switching law.
        for (k, q) in mode_matrices(&network, published.gamma, EXAMPLE41_Q).iter().enumerate() {
            println!("  lambda_max(Q_{}) = {:+.4}", k + 1, lambda_max(q));
        }
    }
    Ok(())
}
