//! JSON system-definition documents.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "name": "demo",
//!   "activation": { "functions": [{ "kind": "tanh", "scale": 1.0 }], "lipschitz": [1.0] },
//!   "modes": [{ "diffusion": [0.1], "decay": [1.0], "a": [[0.2]], "b": [[0.1]],
//!               "input": [0.0], "domain": [1.0] }],
//!   "delay": { "kind": "constant", "tau": 0.5 },
//!   "tau_max": 0.5,
//!   "psi": [[0.1]],
//!   "q": 1.00001,
//!   "gamma": 0.05
//! }
//! ```
//!
//! Matrices are row-major arrays of rows. `activation.functions` may hold a
//! single entry, which is then used for every neuron.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Grid, RectDomain};
use crate::initial::InitialHistory;
use crate::linalg::{from_rows, to_rows};
use crate::model::{Activation, DelaySpec, Mode, ScalarActivation, SwitchedNetwork};

/// The only schema version this build reads and writes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDocument {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub activation: ActivationDoc,
    pub modes: Vec<ModeDoc>,
    pub delay: DelayDoc,
    pub tau_max: f64,
    pub psi: Vec<Vec<f64>>,
    pub q: f64,
    pub gamma: f64,
    /// Certificate to verify when none is given on the command line.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateDoc>,
    /// Interior nodes per axis for solves and simulations.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<usize>>,
    /// Domain shared by all modes during a simulation; defaults to the
    /// first mode's domain.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulation_domain: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActivationDoc {
    pub functions: Vec<ScalarActivation>,
    pub lipschitz: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeDoc {
    pub diffusion: Vec<f64>,
    pub decay: Vec<f64>,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
    pub input: Vec<f64>,
    /// Side lengths of the rectangle (one entry in 1D, two in 2D).
    pub domain: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DelayDoc {
    Constant { tau: f64 },
    Sinusoidal { base: f64, amplitude: f64, omega: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateDoc {
    pub beta: Vec<f64>,
    pub gamma: f64,
    pub q: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialDoc {
    Zero,
    Constant { values: Vec<f64> },
    /// `amplitude[c] · Π sin(πx_i/L_i)` on the simulation domain.
    FirstMode { amplitude: Vec<f64> },
    /// The two-component product-of-sines datum.
    ProductOfSines,
}

impl SystemDocument {
    /// Parses a document; unknown schema versions are rejected.
    pub fn from_json(text: &str) -> Result<Self> {
        let probe: serde_json::Value = serde_json::from_str(text)?;
        match probe.get("schema_version").and_then(|v| v.as_u64()) {
            Some(v) if v == SCHEMA_VERSION as u64 => {}
            Some(v) => return Err(Error::SchemaVersion(v as u32)),
            None => return Err(Error::InvalidParameter("missing integer field 'schema_version'".into())),
        }
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Describes an existing network. Custom delay closures cannot be
    /// serialized.
    pub fn from_network(network: &SwitchedNetwork, name: Option<&str>) -> Result<Self> {
        let delay = match &network.delay {
            DelaySpec::Constant(tau) => DelayDoc::Constant { tau: *tau },
            DelaySpec::Sinusoidal { base, amplitude, omega } => {
                DelayDoc::Sinusoidal { base: *base, amplitude: *amplitude, omega: *omega }
            }
            DelaySpec::Custom(_) => return Err(Error::InvalidParameter("custom delays have no document form".into())),
        };
        Ok(Self {
            schema_version: SCHEMA_VERSION,
            name: name.map(str::to_string),
            activation: ActivationDoc {
                functions: network.activation.functions.clone(),
                lipschitz: network.activation.lipschitz.clone(),
            },
            modes: network
                .modes
                .iter()
                .map(|m| ModeDoc {
                    diffusion: m.diffusion.clone(),
                    decay: m.decay.clone(),
                    a: to_rows(&m.a),
                    b: to_rows(&m.b),
                    input: m.input.clone(),
                    domain: m.domain.lengths().to_vec(),
                })
                .collect(),
            delay,
            tau_max: network.tau_max,
            psi: to_rows(&network.psi),
            q: network.q,
            gamma: network.gamma,
            certificate: None,
            grid: None,
            simulation_domain: None,
            initial: None,
        })
    }

    pub fn network(&self) -> Result<SwitchedNetwork> {
        let n = self.activation.lipschitz.len();
        let functions = match self.activation.functions.len() {
            1 => vec![self.activation.functions[0].clone(); n],
            k if k == n => self.activation.functions.clone(),
            k => return Err(Error::DimensionMismatch { expected: n, found: k }),
        };
        let activation = Activation::new(functions, self.activation.lipschitz.clone())?;
        let modes = self
            .modes
            .iter()
            .map(|m| {
                Mode::new(
                    m.diffusion.clone(),
                    m.decay.clone(),
                    from_rows(&m.a, "A")?,
                    from_rows(&m.b, "B")?,
                    m.input.clone(),
                    RectDomain::new(&m.domain)?,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        let delay = match &self.delay {
            DelayDoc::Constant { tau } => DelaySpec::Constant(*tau),
            DelayDoc::Sinusoidal { base, amplitude, omega } => {
                DelaySpec::Sinusoidal { base: *base, amplitude: *amplitude, omega: *omega }
            }
        };
        SwitchedNetwork::new(modes, activation, self.tau_max, delay, from_rows(&self.psi, "Psi")?, self.q, self.gamma)
    }

    pub fn simulation_domain(&self) -> Result<RectDomain> {
        match &self.simulation_domain {
            Some(l) => RectDomain::new(l),
            None => self
                .modes
                .first()
                .map(|m| RectDomain::new(&m.domain))
                .unwrap_or_else(|| Err(Error::InvalidParameter("document has no modes".into()))),
        }
    }

    /// Grid on `domain`, using the document's node counts or `default`.
    pub fn grid_on(&self, domain: RectDomain, default: usize) -> Result<Grid> {
        match &self.grid {
            Some(counts) if counts.len() == domain.dims() => Grid::new(domain, counts),
            Some(counts) if counts.len() == 1 => Grid::uniform(domain, counts[0]),
            Some(counts) => Err(Error::DimensionMismatch { expected: domain.dims(), found: counts.len() }),
            None => Grid::uniform(domain, default),
        }
    }

    /// Initial history; defaults to the first Dirichlet mode with unit amplitude.
    pub fn initial_history(&self, domain: &RectDomain, components: usize) -> InitialHistory {
        match &self.initial {
            Some(InitialDoc::Zero) => InitialHistory::zero(),
            Some(InitialDoc::Constant { values }) => InitialHistory::constant(values.clone()),
            Some(InitialDoc::FirstMode { amplitude }) => InitialHistory::first_mode(domain.lengths().to_vec(), amplitude.clone()),
            Some(InitialDoc::ProductOfSines) => InitialHistory::example41(),
            None => InitialHistory::first_mode(domain.lengths().to_vec(), vec![1.0; components]),
        }
    }
}

/// A built-in system as a document, with the certificate, grid, simulation
/// domain and initial datum that go with it.
pub fn preset_document(name: &str) -> Result<SystemDocument> {
    use crate::presets;
    let network = presets::by_name(name)?;
    let canonical = name.replace('.', "_");
    let mut doc = SystemDocument::from_network(&network, Some(&canonical))?;
    match canonical.as_str() {
        "example4_1_case1" | "example4_1_case2" | "example4_1_case3" => {
            let case = canonical.as_bytes()[canonical.len() - 1] - b'0';
            let published = presets::example41_published(case)?;
            doc.certificate =
                Some(CertificateDoc { beta: published.beta.to_vec(), gamma: published.gamma, q: presets::EXAMPLE41_Q });
            doc.grid = Some(vec![101, 101]);
            doc.simulation_domain = Some(vec![1.0, 1.0]);
            doc.initial = Some(InitialDoc::ProductOfSines);
        }
        "zero" => {
            doc.grid = Some(vec![31, 31]);
            doc.initial = Some(InitialDoc::Zero);
        }
        _ => {
            doc.grid = Some(vec![401]);
            doc.initial = Some(InitialDoc::FirstMode { amplitude: vec![1.0] });
        }
    }
    Ok(doc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn round_trip_of_every_preset() {
        for name in presets::NAMES {
            let net = presets::by_name(name).unwrap();
            let doc = SystemDocument::from_network(&net, Some(name)).unwrap();
            let back = SystemDocument::from_json(&doc.to_json().unwrap()).unwrap();
            assert_eq!(back, doc);
            let rebuilt = back.network().unwrap();
            assert_eq!(rebuilt.modes, net.modes);
            assert_eq!(rebuilt.activation, net.activation);
        }
    }

    #[test]
    fn version_is_mandatory() {
        let doc = SystemDocument::from_network(&presets::zero_system().unwrap(), None).unwrap();
        let mut value: serde_json::Value = serde_json::from_str(&doc.to_json().unwrap()).unwrap();
        value["schema_version"] = 7.into();
        assert!(matches!(SystemDocument::from_json(&value.to_string()), Err(Error::SchemaVersion(7))));
        value.as_object_mut().unwrap().remove("schema_version");
        assert!(SystemDocument::from_json(&value.to_string()).is_err());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = SystemDocument::from_json("{\n  \"schema_version\": 1,\n  oops\n}").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn single_function_broadcasts() {
        let text = r#"{"schema_version":1,
            "activation":{"functions":[{"kind":"saturation"}],"lipschitz":[1.0,1.0]},
            "modes":[{"diffusion":[1,1],"decay":[1,1],"a":[[0,0],[0,0]],"b":[[0,0],[0,0]],"input":[0,0],"domain":[1,2]}],
            "delay":{"kind":"constant","tau":0.1},"tau_max":0.1,"psi":[[1,0],[0,1]],"q":1.1,"gamma":0.1}"#;
        let net = SystemDocument::from_json(text).unwrap().network().unwrap();
        assert_eq!(net.activation.functions.len(), 2);
    }
}
