//! Switched delayed reaction–diffusion neural networks on rectangles with
//! Dirichlet-zero boundary: stationary solutions, exponential-stability
//! certificates and time integration.
//!
//! The usual entry points are [`presets`] for ready-made systems,
//! [`certificates::verify_certificate`] / [`certificates::search_certificate`],
//! [`stationary::fixed_point_solve`] and [`simulator::simulate`].

pub mod certificates;
pub mod cli;
pub mod document;
pub mod error;
pub mod geometry;
pub mod initial;
pub mod linalg;
pub mod model;
pub mod presets;
pub mod simulator;
pub mod stationary;

pub use error::{Error, Result};
pub use geometry::{Grid, RectDomain, ScalarField, VectorField};
