//! Built-in systems: the three-mode switched financial network with its
//! three parameter cases, the scalar benchmarks for nonconstant stationary
//! profiles and stability invariance, the cube-root multiplicity problem, and
//! a trivial zero system.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::{first_eigenvalue, RectDomain};
use crate::initial::InitialHistory;
use crate::linalg::from_rows;
use crate::model::{Activation, CGSystem, DelaySpec, Mode, ScalarActivation, SwitchedNetwork};
use crate::stationary::EnergyFunctional;

/// `(39 + 2s + 10⁻⁶ sin s)/4` written as `a + b·s + c·sin s`.
pub fn example41_scalar_activation() -> ScalarActivation {
    ScalarActivation::ScaledSine { a: 9.75, b: 0.5, c: 2.5e-7 }
}

pub fn example41_activation() -> Activation {
    Activation::uniform(example41_scalar_activation(), 0.51, 2).expect("valid activation")
}

/// Side lengths of the three square domains.
pub const EXAMPLE41_SIDES: [f64; 3] = [1.0, 1.3, 1.5];

/// Eigenvalues quoted alongside the three domains.
pub const EXAMPLE41_LAMBDAS: [f64; 3] = [19.7392, 11.68, 8.7730];

/// Published certificate data `(β, γ)` and rate per case.
pub struct PublishedCertificate {
    pub beta: [f64; 3],
    pub gamma: f64,
    pub rate: f64,
}

pub const EXAMPLE41_Q: f64 = 1.00001;
pub const EXAMPLE41_PSI: f64 = 0.00018;
/// Bound `c` of the positivity condition.
pub const EXAMPLE41_A2_BOUND: f64 = 1e8;

pub fn example41_published(case: u8) -> Result<PublishedCertificate> {
    match case {
        1 => Ok(PublishedCertificate { beta: [0.5676, 0.3633, 0.0691], gamma: 0.38, rate: 0.19 }),
        2 => Ok(PublishedCertificate { beta: [0.6769, 0.2333, 0.0898], gamma: 0.44, rate: 0.22 }),
        3 => Ok(PublishedCertificate { beta: [0.6616, 0.3113, 0.0271], gamma: 0.58, rate: 0.29 }),
        _ => Err(Error::InvalidParameter(format!("unknown case {case}, expected 1, 2 or 3"))),
    }
}

fn example41_diffusion(case: u8) -> [[f64; 2]; 3] {
    match case {
        2 => [[0.1, 0.15], [0.15, 0.2], [0.1, 0.15]],
        _ => [[0.05, 0.055], [0.07, 0.075], [0.09, 0.095]],
    }
}

fn example41_tau(case: u8) -> f64 {
    if case == 3 {
        3.0
    } else {
        3.5
    }
}

/// Mode `σ ∈ {1, 2, 3}` of the given case on its own square domain.
pub fn example41_mode(case: u8, sigma: usize) -> Result<Mode> {
    example41_published(case)?;
    if !(1..=3).contains(&sigma) {
        return Err(Error::InvalidParameter(format!("mode {sigma} out of range 1..=3")));
    }
    let decay = [[0.448, 0.441], [0.455, 0.441], [0.438, 0.433]];
    let a = [
        [[0.45, 0.00003], [-0.00003, 0.44]],
        [[0.452, 0.00001], [-0.00001, 0.441]],
        [[0.439, 0.000015], [-0.00001, 0.433]],
    ];
    let b = [
        [[0.446, -0.00003], [0.00003, 0.442]],
        [[0.458, -0.00001], [0.00001, 0.441]],
        [[0.437, -0.000015], [0.00001, 0.433]],
    ];
    let k = sigma - 1;
    let s = sigma as f64;
    let rows = |m: [[f64; 2]; 2]| from_rows(&[m[0].to_vec(), m[1].to_vec()], "weight");
    Mode::new(
        example41_diffusion(case)[k].to_vec(),
        decay[k].to_vec(),
        rows(a[k])?,
        rows(b[k])?,
        vec![0.2 * s.sin(), -0.1 * s.cos()],
        RectDomain::square(EXAMPLE41_SIDES[k])?,
    )
}

/// The three-mode network of a case, each mode on its own domain, with the
/// case's published `γ` and `q` as switching parameters.
pub fn example41(case: u8) -> Result<SwitchedNetwork> {
    let published = example41_published(case)?;
    let modes = (1..=3).map(|s| example41_mode(case, s)).collect::<Result<Vec<_>>>()?;
    let tau = example41_tau(case);
    SwitchedNetwork::new(
        modes,
        example41_activation(),
        tau,
        DelaySpec::Constant(tau),
        DMatrix::identity(2, 2) * EXAMPLE41_PSI,
        EXAMPLE41_Q,
        published.gamma,
    )
}

/// The product-of-sines initial datum, constant in `s`.
pub fn example41_initial() -> InitialHistory {
    InitialHistory::example41()
}

/// Common simulation domain `[0, 1]²`.
pub fn example41_common_domain() -> RectDomain {
    RectDomain::square(1.0).expect("unit square")
}

/// Scalar benchmark with a nonzero constant equilibrium:
/// `D = 0.001`, `C = 1.8`, `A = 0.2`, `B = 0.1`, `J = 1.09`,
/// `f(s) = 0.05(s − 6)` on `(0, 1)`.
pub mod statement1 {
    use super::*;

    pub const D: f64 = 0.001;
    pub const C: f64 = 1.8;
    pub const A: f64 = 0.2;
    pub const B: f64 = 0.1;
    pub const J: f64 = 1.09;
    /// Delay used when none is given.
    pub const TAU: f64 = 1.0;
    /// Constant equilibrium of the lumped system.
    pub const EQUILIBRIUM: f64 = 200.0 / 357.0;

    pub fn activation() -> Activation {
        Activation::uniform(ScalarActivation::Affine { slope: 0.05, offset: -0.3 }, 0.05, 1).expect("valid")
    }

    pub fn mode() -> Mode {
        Mode::new(
            vec![D],
            vec![C],
            DMatrix::from_element(1, 1, A),
            DMatrix::from_element(1, 1, B),
            vec![J],
            RectDomain::interval(1.0).expect("unit interval"),
        )
        .expect("valid mode")
    }

    pub fn network(tau: f64) -> Result<SwitchedNetwork> {
        SwitchedNetwork::new(vec![mode()], activation(), tau, DelaySpec::Constant(tau), DMatrix::identity(1, 1), 1.00001, 0.5)
    }

    /// Linear system for `y = u − 200/357`:
    /// `∂y = 0.001Δy − 1.79y + 0.005y(t − τ)`.
    pub fn deviation_network(tau: f64) -> Result<SwitchedNetwork> {
        let mode = Mode::new(
            vec![D],
            vec![C - A * 0.05],
            DMatrix::zeros(1, 1),
            DMatrix::from_element(1, 1, B * 0.05),
            vec![0.0],
            RectDomain::interval(1.0)?,
        )?;
        let act = Activation::uniform(ScalarActivation::identity(), 1.0, 1)?;
        SwitchedNetwork::new(vec![mode], act, tau, DelaySpec::Constant(tau), DMatrix::identity(1, 1), 1.00001, 0.5)
    }

    /// `(a, b)` of the Halanay-type inequality `V′ ≤ −aV + bV(t − τ)`.
    pub fn halanay_coefficients() -> (f64, f64) {
        (0.002 * PI * PI + 3.575, 0.005)
    }
}

/// Scalar Cohen–Grossberg instance with `b = 2`, `c = d = 0.01`, `g(u) = u`,
/// `r = 0.1` and equilibrium `0.1/1.98`.
pub mod example35 {
    use super::*;

    pub const R: f64 = 0.1;
    pub const B: f64 = 2.0;
    pub const C: f64 = 0.01;
    pub const D: f64 = 0.01;
    /// Input in network form (`+J`).
    pub const J: f64 = 0.1;
    pub const TAU: f64 = 1.0;
    pub const EQUILIBRIUM: f64 = 0.1 / 1.98;
    /// `ε`, `p` of the uniqueness check.
    pub const EPSILON: f64 = 1.0;
    pub const P: f64 = 0.02;

    pub fn activation() -> Activation {
        Activation::uniform(ScalarActivation::identity(), 1.0, 1).expect("valid")
    }

    pub fn mode() -> Mode {
        Mode::new(
            vec![R],
            vec![B],
            DMatrix::from_element(1, 1, C),
            DMatrix::from_element(1, 1, D),
            vec![J],
            RectDomain::interval(1.0).expect("unit interval"),
        )
        .expect("valid mode")
    }

    pub fn network() -> Result<SwitchedNetwork> {
        SwitchedNetwork::new(vec![mode()], activation(), TAU, DelaySpec::Constant(TAU), DMatrix::identity(1, 1), 1.00001, 0.5)
    }

    /// Cohen–Grossberg form; the bracket carries `+I`, so `I = −J`.
    pub fn cg() -> Result<CGSystem> {
        CGSystem::cellular(
            vec![B],
            DMatrix::from_element(1, 1, C),
            DMatrix::from_element(1, 1, D),
            &activation(),
            vec![R],
            vec![-J],
            TAU,
        )
    }

    /// `½∫|∇u|² + (19.8/2)∫u² − ∫u`.
    pub fn functional() -> EnergyFunctional {
        EnergyFunctional::quadratic((B - C - D) / R, crate::stationary::Source::Constant(J / R))
    }
}

/// The cube-root nonlinearity problem `DΔu − Cu + Af(u) = 0` on `(0, 1)`.
pub mod statement2 {
    use super::*;

    pub const D: f64 = 0.1;
    pub const C: f64 = 1.0;
    pub const A: f64 = 1.0;

    pub fn domain() -> RectDomain {
        RectDomain::interval(1.0).expect("unit interval")
    }

    /// `μ₁ = C/D + λ₁`.
    pub fn mu1(domain: &RectDomain) -> f64 {
        C / D + first_eigenvalue(domain)
    }

    pub fn scalar_activation(domain: &RectDomain) -> ScalarActivation {
        ScalarActivation::CubeRootPiecewise { d: D, a: A, mu1: mu1(domain) }
    }

    pub fn network(domain: RectDomain) -> Result<SwitchedNetwork> {
        let lip = D / A * mu1(&domain);
        let act = Activation::uniform(scalar_activation(&domain), lip, 1)?;
        let mode = Mode::new(vec![D], vec![C], DMatrix::from_element(1, 1, A), DMatrix::zeros(1, 1), vec![0.0], domain)?;
        SwitchedNetwork::new(vec![mode], act, 0.0, DelaySpec::Constant(0.0), DMatrix::identity(1, 1), 1.00001, 0.5)
    }

    pub fn functional(domain: &RectDomain) -> EnergyFunctional {
        EnergyFunctional::statement2(D, C, A, first_eigenvalue(domain))
    }
}

/// Two-component system with no coupling, no input and `tanh` activation,
/// whose stationary solution is zero and whose certificate is infeasible:
/// diffusion and decay are small, so `(1 + e^{γτ}q)G² + Ψ` dominates.
pub fn zero_system() -> Result<SwitchedNetwork> {
    let mode = Mode::new(
        vec![1e-3, 1e-3],
        vec![1e-3, 1e-3],
        DMatrix::zeros(2, 2),
        DMatrix::zeros(2, 2),
        vec![0.0, 0.0],
        RectDomain::square(1.0)?,
    )?;
    let act = Activation::uniform(ScalarActivation::Tanh { scale: 1.0 }, 1.0, 2)?;
    SwitchedNetwork::new(vec![mode], act, 1.0, DelaySpec::Constant(1.0), DMatrix::identity(2, 2), 1.00001, 0.1)
}

/// Names accepted by [`by_name`].
pub const NAMES: [&str; 8] = [
    "example4_1_case1",
    "example4_1_case2",
    "example4_1_case3",
    "statement1",
    "statement1_deviation",
    "example3_5",
    "statement2",
    "zero",
];

/// Looks up a built-in network.
pub fn by_name(name: &str) -> Result<SwitchedNetwork> {
    match name {
        "example4_1_case1" | "example4_1.case1" => example41(1),
        "example4_1_case2" | "example4_1.case2" => example41(2),
        "example4_1_case3" | "example4_1.case3" => example41(3),
        "statement1" => statement1::network(statement1::TAU),
        "statement1_deviation" => statement1::deviation_network(statement1::TAU),
        "example3_5" => example35::network(),
        "statement2" => statement2::network(statement2::domain()),
        "zero" => zero_system(),
        _ => Err(Error::InvalidParameter(format!("unknown preset '{name}'"))),
    }
}

/// Pass/fail tolerances used when reproducing the built-in benchmarks.
pub mod tolerances {
    /// Absolute error on the quoted first eigenvalues.
    pub const EIGENVALUE: f64 = 1e-3;
    /// Absolute error on certified rates `γ/2`.
    pub const RATE: f64 = 1e-12;
    /// Residual of the characteristic equation solved for `λ`.
    pub const LAMBDA_RESIDUAL: f64 = 1e-12;
    pub const STATEMENT1_MIDPOINT: f64 = 1e-6;
    pub const STATEMENT1_ODE: f64 = 1e-6;
    pub const EXAMPLE35_FIELD: f64 = 1e-4;
    pub const EXAMPLE35_ODE: f64 = 1e-8;
    /// Relative error of the sampled Lipschitz constant.
    pub const STATEMENT2_LIPSCHITZ: f64 = 0.01;
    /// Multiplier of `h²` in discretization-limited checks.
    pub const H2_FACTOR: f64 = 5.0;
    /// Fraction of the certified rate a fitted rate must reach in the soundness suite.
    pub const SOUNDNESS_RATE_FRACTION: f64 = 0.9;
    pub const SOUNDNESS_R2: f64 = 0.99;

    /// `max(1e-4, 5h²)`, the sup-norm tolerance for a discrete fixed point
    /// against the sinh closed form.
    pub fn statement1_field(h: f64) -> f64 {
        (1e-4f64).max(H2_FACTOR * h * h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_name_resolves() {
        for name in NAMES {
            assert!(by_name(name).is_ok(), "{name}");
        }
        assert!(by_name("nope").is_err());
    }

    #[test]
    fn example41_eigenvalues_match_quoted() {
        let net = example41(1).unwrap();
        for (m, quoted) in net.modes.iter().zip(EXAMPLE41_LAMBDAS) {
            assert!((m.lambda1 - quoted).abs() < 1e-3, "{} vs {quoted}", m.lambda1);
        }
    }

    #[test]
    fn published_betas_sum_to_one() {
        for case in 1..=3 {
            let b = example41_published(case).unwrap().beta;
            assert!((b.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn statement1_equilibrium_solves_lumped_equation() {
        let act = statement1::activation();
        let x = statement1::EQUILIBRIUM;
        let rhs = statement1::mode().stationary_rhs(&act, &[x]);
        assert!(rhs[0].abs() < 1e-14);
    }

    #[test]
    fn example35_cg_equilibrium() {
        let cg = example35::cg().unwrap();
        let u = example35::EQUILIBRIUM;
        let bracket = cg.behaved[0].eval(u) + cg.inputs[0] - cg.c[(0, 0)] * u - cg.d[(0, 0)] * u;
        assert!(bracket.abs() < 1e-15);
    }
}
