//! Describes a two-mode network in the JSON system format, then certifies
//! and simulates it. The same document can be saved and passed to the
//! `rdnet` binary.
//!
//! Run with `cargo run --release --example system_document`.

use rdnet::certificates::{search_certificate, SearchOptions};
use rdnet::document::{preset_document, SystemDocument};
use rdnet::simulator::{simulate, SimConfig, StateForm};

const DOCUMENT: &str = r#"{
  "schema_version": 1,
  "name": "two_mode_tanh",
  "activation": {
    "functions": [{ "kind": "tanh", "scale": 1.0 }, { "kind": "saturation" }],
    "lipschitz": [1.0, 1.0]
  },
  "modes": [
    { "diffusion": [0.05, 0.08], "decay": [1.2, 1.0],
      "a": [[0.2, -0.1], [0.1, 0.1]], "b": [[0.1, 0.0], [0.0, 0.1]],
      "input": [0.0, 0.0], "domain": [1.0] },
    { "diffusion": [0.1, 0.04], "decay": [1.0, 1.5],
      "a": [[0.1, 0.2], [-0.2, 0.1]], "b": [[0.05, 0.05], [0.0, 0.1]],
      "input": [0.0, 0.0], "domain": [1.0] }
  ],
  "delay": { "kind": "sinusoidal", "base": 0.4, "amplitude": 0.1, "omega": 2.0 },
  "tau_max": 0.5,
  "psi": [[0.5, 0.0], [0.0, 0.5]],
  "q": 1.01,
  "gamma": 0.1,
  "grid": [201],
  "initial": { "kind": "first_mode", "amplitude": [1.0, -0.5] }
}"#;

fn main() -> rdnet::Result<()> {
    let doc = SystemDocument::from_json(DOCUMENT)?;
    let network = doc.network()?;
    println!("{}: {} modes, n = {}", doc.name.as_deref().unwrap_or("?"), network.mode_count(), network.dim());

    let options = SearchOptions { beta_step: Some(0.05), q: network.q, ..SearchOptions::default() };
    let outcome = search_certificate(&network, &options)?;
    let certified = outcome.certificate().and_then(|c| c.rate);
    match outcome.certificate() {
        Some(c) => println!("certificate: beta {:.2?}, gamma {:.4}, rate {:.4}", c.beta, c.gamma, c.rate.unwrap_or(f64::NAN)),
        None => println!("no certificate found"),
    }

    let domain = doc.simulation_domain()?;
    let grid = doc.grid_on(domain, 201)?;
    let traj = simulate(&network, &grid, StateForm::Absolute, &SimConfig::new(0.01, 15.0), &doc.initial_history(&domain, 2))?;
    let d = traj.decay(0.5)?;
    println!("simulated: eta = {:.4} (R^2 {:.5}), {} switches; certified {:?}", d.rate, d.r_squared, traj.switch_count(), certified);

    // Built-in systems come out in the same format.
    let preset = preset_document("statement1")?;
    let text = preset.to_json()?;
    assert_eq!(SystemDocument::from_json(&text)?, preset);
    println!("statement1 preset: {} bytes of JSON, round trip exact", text.len());

    // A future schema version is refused rather than misread.
    let bumped = DOCUMENT.replacen("\"schema_version\": 1", "\"schema_version\": 2", 1);
    println!("schema_version 2: {}", SystemDocument::from_json(&bumped).unwrap_err());
    Ok(())
}
