//! Switched three-mode network on the unit square: integrate the deviation
//! from the stationary profile under the state-dependent switching law and
//! fit the decay rate.
//!
//! Defaults to a 41² grid for speed; pass a node count (e.g. `101`) and a
//! case number to change them.
//!
//! Run with `cargo run --release --example simulate_switched -- 41 1`.

use std::time::Instant;

use rdnet::certificates::verify_certificate;
use rdnet::geometry::Grid;
use rdnet::presets::{self, EXAMPLE41_Q};
use rdnet::simulator::{simulate, stationary_reference, Reference, SimConfig, StateForm, SwitchingConfig, SwitchingForm};
use rdnet::stationary::FixedPointOptions;

fn main() -> rdnet::Result<()> {
    let mut args = std::env::args().skip(1);
    let nodes: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(41);
    let case: u8 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);

    let network = presets::example41(case)?;
    let published = presets::example41_published(case)?;
    let domain = presets::example41_common_domain();
    let grid = Grid::uniform(domain, nodes)?;

    let cert = verify_certificate(&network.on_common_domain(domain)?, &published.beta, published.gamma, EXAMPLE41_Q)?;
    println!("certificate on the common domain: margin {:.4}, rate {:?}", cert.margin, cert.rate);

    let reference = stationary_reference(&network, &grid, 0, &FixedPointOptions::default())?;
    let peak = reference.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    println!("stationary profile of mode 1: sup {peak:.4}");

    for form in [SwitchingForm::Integrated, SwitchingForm::Pointwise] {
        let config = SimConfig {
            switching: SwitchingConfig { form, ..SwitchingConfig::default() },
            ..SimConfig::new(SimConfig::default_dt(network.tau_max), 30.0)
        };
        let start = Instant::now();
        let traj = simulate(
            &network,
            &grid,
            StateForm::Deviation(Reference::Shared(reference.clone())),
            &config,
            &presets::example41_initial(),
        )?;
        let d = traj.decay(0.5)?;
        let mut visits = vec![0usize; network.mode_count()];
        for m in &traj.modes {
            visits[*m] += 1;
        }
        println!(
            "{form:?}: eta = {:.4} (R^2 {:.5}) vs certified {:.2}; {} switches, steps per mode {visits:?}; {:.1?}",
            d.rate,
            d.r_squared,
            published.rate,
            traj.switch_count(),
            start.elapsed()
        );
    }
    Ok(())
}
