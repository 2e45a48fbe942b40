//! Matrix-inequality stability certificates for switched networks, the
//! uniqueness condition for stationary solutions, and the Cohen–Grossberg
//! conditions with their convergence rate.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::model::{CGSystem, Mode, SwitchedNetwork};

/// Simplex tolerance on `Σ β_σ = 1`.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// The Razumikhin factor used when none is supplied.
pub const DEFAULT_Q: f64 = 1.00001;

/// Per-mode quadratic form
/// `Q_σ = −2λ_σ1 D_σ − 2C_σ + A_σA_σᵀ + B_σB_σᵀ + G² + e^{γτ} q G² + Ψ`.
pub fn mode_margin_matrix(
    mode: &Mode,
    g_squared: &DMatrix<f64>,
    gamma: f64,
    q: f64,
    tau: f64,
    psi: &DMatrix<f64>,
) -> DMatrix<f64> {
    let m = mode_base(mode) + g_squared * (1.0 + (gamma * tau).exp() * q) + psi;
    linalg::symmetrize(&m)
}

/// `−2λ_σ1 D_σ − 2C_σ + A_σA_σᵀ + B_σB_σᵀ`, the part that depends on the mode.
fn mode_base(mode: &Mode) -> DMatrix<f64> {
    let n = mode.dim();
    let mut m = &mode.a * mode.a.transpose() + &mode.b * mode.b.transpose();
    for i in 0..n {
        m[(i, i)] -= 2.0 * mode.lambda1 * mode.diffusion[i] + 2.0 * mode.decay[i];
    }
    m
}

/// All `Q_σ` of a network at the given `γ`, `q`.
pub fn mode_matrices(network: &SwitchedNetwork, gamma: f64, q: f64) -> Vec<DMatrix<f64>> {
    let g2 = network.activation.g_squared();
    network
        .modes
        .iter()
        .map(|m| mode_margin_matrix(m, &g2, gamma, q, network.tau_max, &network.psi))
        .collect()
}

fn check_simplex(beta: &[f64], n_modes: usize) -> Result<()> {
    if beta.len() != n_modes {
        return Err(Error::DimensionMismatch { expected: n_modes, found: beta.len() });
    }
    let sum: f64 = beta.iter().sum();
    let min = beta.iter().copied().fold(f64::INFINITY, f64::min);
    if !((sum - 1.0).abs() <= SIMPLEX_TOL && min >= 0.0) {
        return Err(Error::NotOnSimplex { sum, min });
    }
    Ok(())
}

/// Outcome of checking the switched certificate at one `(β, γ, q)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub beta: Vec<f64>,
    pub gamma: f64,
    pub q: f64,
    pub tau: f64,
    /// `λ_max` of the combined matrix.
    pub margin: f64,
    /// All eigenvalues of the combined matrix, ascending.
    pub eigenvalues: Vec<f64>,
    pub feasible: bool,
    /// Whether `γ < λ_min(Ψ)`.
    pub theorem_constraint_ok: bool,
    pub lambda_min_psi: f64,
    /// Guaranteed convergence rate `γ/2`, present only when feasible.
    pub rate: Option<f64>,
}

/// Precomputed pieces of the combined matrix so repeated evaluations during a
/// search only add scaled copies.
struct MarginOracle {
    bases: Vec<DMatrix<f64>>,
    g_squared: DMatrix<f64>,
    psi: DMatrix<f64>,
    tau: f64,
}

impl MarginOracle {
    fn new(network: &SwitchedNetwork) -> Self {
        Self {
            bases: network.modes.iter().map(mode_base).collect(),
            g_squared: network.activation.g_squared(),
            psi: network.psi.clone(),
            tau: network.tau_max,
        }
    }

    fn weighted_base(&self, beta: &[f64]) -> DMatrix<f64> {
        let n = self.psi.nrows();
        let mut m = DMatrix::zeros(n, n);
        for (b, base) in beta.iter().zip(&self.bases) {
            if *b != 0.0 {
                m += base * *b;
            }
        }
        m
    }

    fn matrix(&self, base: &DMatrix<f64>, gamma: f64, q: f64) -> DMatrix<f64> {
        linalg::symmetrize(&(base + &self.g_squared * (1.0 + (gamma * self.tau).exp() * q) + &self.psi))
    }

    fn margin(&self, base: &DMatrix<f64>, gamma: f64, q: f64) -> f64 {
        linalg::lambda_max(&self.matrix(base, gamma, q))
    }
}

/// Forms `M(β, γ, q)` and reports its largest eigenvalue.
pub fn verify_certificate(network: &SwitchedNetwork, beta: &[f64], gamma: f64, q: f64) -> Result<Certificate> {
    check_simplex(beta, network.mode_count())?;
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!("γ must be positive, got {gamma}")));
    }
    if !(q > 1.0) {
        return Err(Error::InvalidParameter(format!("q must exceed 1, got {q}")));
    }
    if !linalg::is_symmetric(&network.psi, 1e-12) {
        return Err(Error::NotSymmetric("Psi".into()));
    }
    let oracle = MarginOracle::new(network);
    Ok(certificate_from(&oracle, beta, gamma, q))
}

fn certificate_from(oracle: &MarginOracle, beta: &[f64], gamma: f64, q: f64) -> Certificate {
    let m = oracle.matrix(&oracle.weighted_base(beta), gamma, q);
    let eigenvalues = linalg::sym_eigenvalues(&m);
    let margin = *eigenvalues.last().expect("nonempty");
    let feasible = margin < -linalg::DEFINITENESS_SLACK;
    let lambda_min_psi = linalg::lambda_min(&oracle.psi);
    Certificate {
        beta: beta.to_vec(),
        gamma,
        q,
        tau: oracle.tau,
        margin,
        eigenvalues,
        feasible,
        theorem_constraint_ok: gamma < lambda_min_psi,
        lambda_min_psi,
        rate: feasible.then_some(gamma / 2.0),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchOptions {
    /// Simplex lattice step; `None` picks 0.01 for up to three modes and 0.05
    /// otherwise.
    pub beta_step: Option<f64>,
    /// Upper end of the γ bracket when the theorem constraint is not honoured.
    pub gamma_cap: f64,
    pub q: f64,
    /// Restrict γ to `(0, λ_min(Ψ))`.
    pub honor_theorem_constraint: bool,
    /// Bisection stops once the bracket is narrower than this.
    pub gamma_tol: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { beta_step: None, gamma_cap: 10.0, q: DEFAULT_Q, honor_theorem_constraint: true, gamma_tol: 1e-6 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum SearchOutcome {
    Feasible(Certificate),
    Infeasible {
        /// Smallest margin seen anywhere on the lattice (as `γ → 0⁺`).
        least_margin: f64,
        beta: Vec<f64>,
        lattice_points: usize,
    },
}

impl SearchOutcome {
    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Self::Feasible(c) => Some(c),
            Self::Infeasible { .. } => None,
        }
    }
}

/// Every `β` with entries in `{0, step, 2·step, …}` summing to one, in
/// lexicographic order.
pub fn simplex_lattice(modes: usize, step: f64) -> Result<Vec<Vec<f64>>> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::InvalidParameter(format!("lattice step must lie in (0, 1], got {step}")));
    }
    if modes == 0 {
        return Err(Error::InvalidParameter("need at least one mode".into()));
    }
    let k = (1.0 / step).round() as usize;
    let k = k.max(1);
    let mut out = Vec::new();
    let mut counts = vec![0usize; modes];
    fn rec(pos: usize, left: usize, k: usize, counts: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if pos + 1 == counts.len() {
            counts[pos] = left;
            out.push(counts.iter().map(|c| *c as f64 / k as f64).collect());
            return;
        }
        for c in (0..=left).rev() {
            counts[pos] = c;
            rec(pos + 1, left - c, k, counts, out);
        }
    }
    rec(0, k, k, &mut counts, &mut out);
    Ok(out)
}

/// Searches the simplex lattice for the largest certifiable `γ`.
///
/// For each `β` the margin is nondecreasing in `γ`, so the feasible set is an
/// interval starting at `0` and its right end is found by bisection.
pub fn search_certificate(network: &SwitchedNetwork, options: &SearchOptions) -> Result<SearchOutcome> {
    if !(options.q > 1.0) {
        return Err(Error::InvalidParameter(format!("q must exceed 1, got {}", options.q)));
    }
    let step = options.beta_step.unwrap_or(if network.mode_count() <= 3 { 0.01 } else { 0.05 });
    let lattice = simplex_lattice(network.mode_count(), step)?;
    let oracle = MarginOracle::new(network);
    let gamma_hi = if options.honor_theorem_constraint {
        linalg::lambda_min(&network.psi)
    } else {
        options.gamma_cap
    };
    if !(gamma_hi > 0.0) {
        return Err(Error::InvalidParameter(format!("γ upper bound must be positive, got {gamma_hi}")));
    }
    let slack = linalg::DEFINITENESS_SLACK;
    let q = options.q;

    let mut best: Option<(f64, f64, Vec<f64>)> = None;
    let mut least = (f64::INFINITY, lattice[0].clone());
    for beta in &lattice {
        let base = oracle.weighted_base(beta);
        let m0 = oracle.margin(&base, 0.0, q);
        if m0 < least.0 {
            least = (m0, beta.clone());
        }
        if m0 >= -slack {
            continue;
        }
        let gamma = if oracle.margin(&base, gamma_hi, q) < -slack {
            gamma_hi
        } else {
            let (mut lo, mut hi) = (0.0, gamma_hi);
            while hi - lo > options.gamma_tol {
                let mid = 0.5 * (lo + hi);
                if oracle.margin(&base, mid, q) < -slack {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo
        };
        // honouring the constraint means γ strictly below λ_min(Ψ)
        let gamma = if options.honor_theorem_constraint && gamma >= gamma_hi {
            gamma_hi * (1.0 - 1e-9)
        } else {
            gamma
        };
        if gamma <= 0.0 {
            continue;
        }
        let margin = oracle.margin(&base, gamma, q);
        let better = match &best {
            None => true,
            Some((g, m, _)) => gamma > *g || (gamma == *g && margin < *m),
        };
        if better {
            best = Some((gamma, margin, beta.clone()));
        }
    }
    Ok(match best {
        Some((gamma, _, beta)) => SearchOutcome::Feasible(certificate_from(&oracle, &beta, gamma, q)),
        None => SearchOutcome::Infeasible { least_margin: least.0, beta: least.1, lattice_points: lattice.len() },
    })
}

/// Choice of the constants `p_σ` in the uniqueness condition.
#[derive(Clone, Debug, PartialEq)]
pub enum PChoice {
    /// `p_σ = σ_max(A_σ + B_σ)`, the smallest admissible value.
    Auto,
    /// One value per mode.
    Values(Vec<f64>),
    /// Same value for every mode.
    Uniform(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UniquenessModeVerdict {
    pub p: f64,
    /// Whether `p² I ≥ (A+B)ᵀ(A+B)` holds for the chosen `p`.
    pub p_admissible: bool,
    /// Eigenvalues of `−C + (p/2)(ε⁻¹I + εG²) − λ₁D`, ascending.
    pub eigenvalues: Vec<f64>,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UniquenessVerdict {
    pub epsilon: f64,
    pub modes: Vec<UniquenessModeVerdict>,
    pub holds: bool,
}

fn uniqueness_matrix(decay: &[f64], diffusion: &[f64], lambda1: f64, g_lip: &[f64], epsilon: f64, p: f64) -> DMatrix<f64> {
    let n = decay.len();
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            -decay[i] + 0.5 * p * (1.0 / epsilon + epsilon * g_lip[i] * g_lip[i]) - lambda1 * diffusion[i]
        } else {
            0.0
        }
    })
}

fn resolve_p(choice: &PChoice, idx: usize, weight: &DMatrix<f64>) -> Result<(f64, bool)> {
    let sv = linalg::largest_singular_value(weight);
    let p = match choice {
        PChoice::Auto => sv,
        PChoice::Uniform(p) => *p,
        PChoice::Values(ps) => *ps
            .get(idx)
            .ok_or(Error::DimensionMismatch { expected: idx + 1, found: ps.len() })?,
    };
    if !(p >= 0.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!("p must be nonnegative, got {p}")));
    }
    let admissible = matches!(choice, PChoice::Auto) || p * p >= sv * sv * (1.0 - 1e-12);
    Ok((p, admissible))
}

fn uniqueness_one(
    decay: &[f64],
    diffusion: &[f64],
    lambda1: f64,
    g_lip: &[f64],
    weight: &DMatrix<f64>,
    epsilon: f64,
    choice: &PChoice,
    idx: usize,
) -> Result<UniquenessModeVerdict> {
    let (p, p_admissible) = resolve_p(choice, idx, weight)?;
    let m = uniqueness_matrix(decay, diffusion, lambda1, g_lip, epsilon, p);
    let eigenvalues = linalg::sym_eigenvalues(&m);
    let holds = *eigenvalues.last().expect("nonempty") < -linalg::DEFINITENESS_SLACK;
    Ok(UniquenessModeVerdict { p, p_admissible, eigenvalues, holds })
}

/// Uniqueness condition `−C_σ + (p_σ/2)(ε⁻¹I + εG²) < λ_σ1 D_σ` per mode.
///
/// The verdict only evaluates the inequality for the given `p_σ`; whether
/// `p_σ` dominates `σ_max(A_σ + B_σ)` is reported separately in
/// `p_admissible`.
pub fn check_uniqueness_a3(modes: &[Mode], g_lip: &[f64], epsilon: f64, p: &PChoice) -> Result<UniquenessVerdict> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!("ε must be positive, got {epsilon}")));
    }
    let mut out = Vec::with_capacity(modes.len());
    for (idx, mode) in modes.iter().enumerate() {
        if g_lip.len() != mode.dim() {
            return Err(Error::DimensionMismatch { expected: mode.dim(), found: g_lip.len() });
        }
        out.push(uniqueness_one(
            &mode.decay,
            &mode.diffusion,
            mode.lambda1,
            g_lip,
            &mode.combined_weight(),
            epsilon,
            p,
            idx,
        )?);
    }
    let holds = out.iter().all(|v| v.holds);
    Ok(UniquenessVerdict { epsilon, modes: out, holds })
}

/// Cellular specialization: `−B + (p/2)(ε⁻¹I + εG²) < λ₁R` with
/// `p ≥ σ_max(C + D)`, where `G` collects the Lipschitz constants of `g`.
pub fn check_corollary34(cg: &CGSystem, lambda1: f64, epsilon: f64, p: &PChoice) -> Result<UniquenessVerdict> {
    cg.validate()?;
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!("ε must be positive, got {epsilon}")));
    }
    let weight = &cg.c + &cg.d;
    let v = uniqueness_one(&cg.b_slope, &cg.r, lambda1, &cg.g_lip, &weight, epsilon, p, 0)?;
    let holds = v.holds;
    Ok(UniquenessVerdict { epsilon, modes: vec![v], holds })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct C1Verdict {
    pub lambda_max: f64,
    pub holds: bool,
    /// The assembled `3n × 3n` matrix, row-major.
    pub matrix: Vec<Vec<f64>>,
}

/// Assembles the block matrix
/// `[[−2P A̲ B + F², PĀ|C|, PĀ|D|], [|Cᵀ|ĀP, −I, 0], [|Dᵀ|ĀP, 0, −I]]`
/// and tests it for negative definiteness.
pub fn cg_c1_matrix(cg: &CGSystem) -> Result<DMatrix<f64>> {
    cg.validate()?;
    let n = cg.dim();
    let p = linalg::diag(&cg.p);
    let a_up = linalg::diag(&cg.a_upper);
    let mut m = DMatrix::zeros(3 * n, 3 * n);
    for i in 0..n {
        m[(i, i)] = -2.0 * cg.p[i] * cg.a_lower[i] * cg.b_slope[i] + cg.f_lip[i] * cg.f_lip[i];
        m[(n + i, n + i)] = -1.0;
        m[(2 * n + i, 2 * n + i)] = -1.0;
    }
    let pc = &p * &a_up * linalg::abs(&cg.c);
    let pd = &p * &a_up * linalg::abs(&cg.d);
    m.view_mut((0, n), (n, n)).copy_from(&pc);
    m.view_mut((0, 2 * n), (n, n)).copy_from(&pd);
    m.view_mut((n, 0), (n, n)).copy_from(&(linalg::abs(&cg.c.transpose()) * &a_up * &p));
    m.view_mut((2 * n, 0), (n, n)).copy_from(&(linalg::abs(&cg.d.transpose()) * &a_up * &p));
    Ok(m)
}

pub fn cg_check_c1(cg: &CGSystem) -> Result<C1Verdict> {
    let m = cg_c1_matrix(cg)?;
    let lambda_max = linalg::lambda_max(&m);
    Ok(C1Verdict { lambda_max, holds: lambda_max < -linalg::DEFINITENESS_SLACK, matrix: linalg::to_rows(&m) })
}

/// `Φ̃ = 2P A̲ B − PĀ|C||Cᵀ|ĀP − PĀ|D||Dᵀ|ĀP − F²`.
pub fn cg_phi_tilde(cg: &CGSystem) -> Result<DMatrix<f64>> {
    cg.validate()?;
    let p = linalg::diag(&cg.p);
    let a_low = linalg::diag(&cg.a_lower);
    let a_up = linalg::diag(&cg.a_upper);
    let b = linalg::diag(&cg.b_slope);
    let f2 = linalg::diag(&cg.f_lip.iter().map(|f| f * f).collect::<Vec<_>>());
    let pa = &p * &a_up;
    let c_abs = linalg::abs(&cg.c);
    let d_abs = linalg::abs(&cg.d);
    let m = (&p * &a_low * &b) * 2.0
        - &pa * &c_abs * linalg::abs(&cg.c.transpose()) * &a_up * &p
        - &pa * &d_abs * linalg::abs(&cg.d.transpose()) * &a_up * &p
        - f2;
    Ok(linalg::symmetrize(&m))
}

/// Rate data of the Cohen–Grossberg stability theorem.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CGRates {
    pub phi_tilde: Vec<Vec<f64>>,
    pub a_tilde: f64,
    pub b: f64,
    pub lambda: f64,
    /// `|λ − ã + b e^{λτ}|` at the returned root.
    pub lambda_residual: f64,
    pub rho: f64,
    pub delta_min: f64,
    /// The `δ` used for `rate`: the user's value or `delta_min`.
    pub delta: f64,
    /// `½(λ − ln(ρ e^{λτ}) / (δτ))`; `None` when the expression is undefined
    /// (`τ = 0` with `ρ > 1`).
    pub rate: Option<f64>,
}

impl CGRates {
    pub fn rate_for_delta(&self, delta: f64, tau: f64) -> Option<f64> {
        rate_formula(self.lambda, self.rho, tau, delta)
    }
}

fn rate_formula(lambda: f64, rho: f64, tau: f64, delta: f64) -> Option<f64> {
    let log_term = rho.ln() + lambda * tau;
    if log_term == 0.0 {
        return Some(0.5 * lambda);
    }
    let denom = delta * tau;
    if denom <= 0.0 || !denom.is_finite() {
        return None;
    }
    Some(0.5 * (lambda - log_term / denom))
}

/// Unique root of `λ = a − b e^{λτ}` in `(0, a]` for `a > b ≥ 0`, `τ ≥ 0`.
pub fn solve_lambda(a: f64, b: f64, tau: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite() && tau.is_finite()) || b < 0.0 || tau < 0.0 {
        return Err(Error::InvalidParameter(format!("need finite a, b >= 0, τ >= 0 (a={a}, b={b}, τ={tau})")));
    }
    if a <= b {
        return Err(Error::C2Violated(format!("ã = {a} does not exceed b = {b}")));
    }
    if b == 0.0 {
        return Ok(a);
    }
    if tau == 0.0 {
        return Ok(a - b);
    }
    let h = |l: f64| l - a + b * (l * tau).exp();
    let (mut lo, mut hi) = (0.0, a);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Newton polish from the bracket midpoint; h is convex and increasing
    let mut l = 0.5 * (lo + hi);
    for _ in 0..4 {
        let dh = 1.0 + b * tau * (l * tau).exp();
        let next = l - h(l) / dh;
        if !(next > 0.0 && next <= a) {
            break;
        }
        l = next;
    }
    let residual = h(l).abs();
    if residual > 1e-12 * a.abs().max(1.0) {
        return Err(Error::NonFinite(format!("λ residual {residual:e} exceeds tolerance")));
    }
    Ok(l)
}

/// Checks the second condition and evaluates `λ`, `ρ`, `δ_min` and the rate.
pub fn cg_rates(cg: &CGSystem) -> Result<CGRates> {
    let phi = cg_phi_tilde(cg)?;
    let phi_min = linalg::lambda_min(&phi);
    if phi_min <= 0.0 {
        return Err(Error::C2Violated(format!("Φ̃ is not positive definite (λ_min = {phi_min:e})")));
    }
    let p_max = cg.p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let p_min = cg.p.iter().copied().fold(f64::INFINITY, f64::min);
    let a_tilde = phi_min / p_max;
    let b = cg.g_lip.iter().map(|g| g * g).fold(0.0, f64::max) / p_min;
    let lambda = solve_lambda(a_tilde, b, cg.tau)?;
    let lambda_residual = (lambda - a_tilde + b * (lambda * cg.tau).exp()).abs();

    let p = linalg::diag(&cg.p);
    let m = linalg::diag(&cg.m);
    let h = linalg::diag(&cg.h_lip);
    let pmp = &p * &m * &p;
    let hnpnh = &h * cg.n_mat.transpose() * &p * &cg.n_mat * &h;
    let rho = (2.0 * linalg::lambda_max(&pmp) / p_min
        + 2.0 * linalg::lambda_max(&hnpnh) / p_min * (lambda * cg.tau).exp())
    .max(1.0);

    let log_term = rho.ln() + lambda * cg.tau;
    let delta_min = if log_term == 0.0 {
        0.0
    } else if cg.tau == 0.0 {
        f64::INFINITY
    } else {
        (log_term / cg.tau).sqrt()
    };
    let delta = cg.delta.unwrap_or(delta_min);
    Ok(CGRates {
        phi_tilde: linalg::to_rows(&phi),
        a_tilde,
        b,
        lambda,
        lambda_residual,
        rho,
        delta_min,
        delta,
        rate: rate_formula(lambda, rho, cg.tau, delta),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::RectDomain;
    use crate::model::{Activation, DelaySpec, ScalarActivation};
    use approx::assert_abs_diff_eq;

    fn mode(d: [f64; 2], c: [f64; 2], a: [f64; 4], b: [f64; 4], side: f64) -> Mode {
        Mode::new(
            d.to_vec(),
            c.to_vec(),
            DMatrix::from_row_slice(2, 2, &a),
            DMatrix::from_row_slice(2, 2, &b),
            vec![0.0, 0.0],
            RectDomain::square(side).unwrap(),
        )
        .unwrap()
    }

    fn case1() -> SwitchedNetwork {
        let modes = vec![
            mode([0.05, 0.055], [0.448, 0.441], [0.45, 0.00003, -0.00003, 0.44], [0.446, -0.00003, 0.00003, 0.442], 1.0),
            mode([0.07, 0.075], [0.455, 0.441], [0.452, 0.00001, -0.00001, 0.441], [0.458, -0.00001, 0.00001, 0.441], 1.3),
            mode([0.09, 0.095], [0.438, 0.433], [0.439, 0.000015, -0.00001, 0.433], [0.437, -0.000015, 0.00001, 0.433], 1.5),
        ];
        let act = Activation::uniform(ScalarActivation::ScaledSine { a: 9.75, b: 0.5, c: 2.5e-7 }, 0.51, 2).unwrap();
        SwitchedNetwork::new(modes, act, 3.5, DelaySpec::Constant(3.5), DMatrix::identity(2, 2) * 0.00018, 1.00001, 0.38)
            .unwrap()
    }

    #[test]
    fn q1_matches_hand_arithmetic() {
        let net = case1();
        let m = &net.modes[0];
        let q = mode_margin_matrix(m, &net.activation.g_squared(), 0.38, 1.00001, 3.5, &net.psi);
        let lam = 2.0 * std::f64::consts::PI.powi(2);
        let factor = 1.0 + (0.38f64 * 3.5).exp() * 1.00001;
        let expect00 = -2.0 * lam * 0.05 - 2.0 * 0.448 + 0.45f64.powi(2) + 0.00003f64.powi(2)
            + 0.446f64.powi(2) + 0.00003f64.powi(2) + 0.51f64.powi(2) * factor + 0.00018;
        let expect11 = -2.0 * lam * 0.055 - 2.0 * 0.441 + 0.44f64.powi(2) + 0.00003f64.powi(2)
            + 0.442f64.powi(2) + 0.00003f64.powi(2) + 0.51f64.powi(2) * factor + 0.00018;
        assert_abs_diff_eq!(q[(0, 0)], expect00, epsilon = 1e-12);
        assert_abs_diff_eq!(q[(1, 1)], expect11, epsilon = 1e-12);
        assert!(q[(0, 1)].abs() < 1e-6);
        assert_eq!(q[(0, 1)], q[(1, 0)]);
        assert!((q[(0, 0)] + 1.225).abs() < 5e-3 && (q[(1, 1)] + 1.421).abs() < 5e-3);
        assert!(linalg::is_negative_definite(&q));
    }

    #[test]
    fn psi_only_gives_psi() {
        let zero = DMatrix::zeros(1, 1);
        let m = Mode::new(vec![1e-300], vec![1e-300], zero.clone(), zero, vec![0.0], RectDomain::interval(1.0).unwrap())
            .unwrap();
        let q = mode_margin_matrix(&m, &DMatrix::zeros(1, 1), 0.5, 2.0, 1.0, &DMatrix::identity(1, 1));
        assert_abs_diff_eq!(q[(0, 0)], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn gamma_zero_uses_one_plus_q() {
        let net = case1();
        let g2 = net.activation.g_squared();
        let q0 = mode_margin_matrix(&net.modes[1], &g2, 0.0, 1.5, 3.5, &net.psi);
        let base = mode_margin_matrix(&net.modes[1], &DMatrix::zeros(2, 2), 0.0, 1.5, 3.5, &net.psi);
        assert_abs_diff_eq!(q0[(0, 0)] - base[(0, 0)], 2.5 * 0.51 * 0.51, epsilon = 1e-12);
    }

    #[test]
    fn case1_certificate() {
        let net = case1();
        let c = verify_certificate(&net, &[0.5676, 0.3633, 0.0691], 0.38, 1.00001).unwrap();
        assert!(c.feasible);
        assert!(!c.theorem_constraint_ok);
        assert_eq!(c.rate, Some(0.19));
        assert!((c.eigenvalues[0] + 1.233).abs() < 1e-2 && (c.eigenvalues[1] + 1.075).abs() < 1e-2);
        assert!(verify_certificate(&net, &[1.0, 0.0, 0.0], 0.38, 1.00001).unwrap().feasible);
    }

    #[test]
    fn simplex_is_checked() {
        let net = case1();
        assert!(matches!(
            verify_certificate(&net, &[0.5, 0.5, 0.5], 0.38, 1.00001),
            Err(Error::NotOnSimplex { .. })
        ));
        assert!(verify_certificate(&net, &[1.2, -0.2, 0.0], 0.38, 1.00001).is_err());
    }

    #[test]
    fn lattice_counts() {
        assert_eq!(simplex_lattice(3, 0.01).unwrap().len(), 5151);
        assert_eq!(simplex_lattice(1, 0.5).unwrap(), vec![vec![1.0]]);
        for b in simplex_lattice(4, 0.25).unwrap() {
            assert!((b.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn search_reaches_published_gamma() {
        let net = case1();
        let opts = SearchOptions { gamma_cap: 1.0, honor_theorem_constraint: false, beta_step: Some(0.05), ..Default::default() };
        let out = search_certificate(&net, &opts).unwrap();
        let c = out.certificate().unwrap();
        assert!(c.gamma >= 0.38);
        assert!(verify_certificate(&net, &c.beta, c.gamma, c.q).unwrap().feasible);

        let honor = SearchOptions { beta_step: Some(0.05), ..Default::default() };
        let c = search_certificate(&net, &honor).unwrap();
        let c = c.certificate().unwrap();
        assert!(c.gamma < 0.00018 && c.theorem_constraint_ok);
    }

    #[test]
    fn a3_examples() {
        let net = case1();
        let v = check_uniqueness_a3(&net.modes, &net.activation.lipschitz, 2.0, &PChoice::Uniform(1.0)).unwrap();
        assert!(v.holds);
        let auto = check_uniqueness_a3(&net.modes, &net.activation.lipschitz, 2.0, &PChoice::Auto).unwrap();
        for (a, m) in auto.modes.iter().zip(&net.modes) {
            assert_abs_diff_eq!(a.p, linalg::largest_singular_value(&m.combined_weight()), epsilon = 1e-12);
            assert!(a.p <= 1.0);
        }
    }

    #[test]
    fn a3_fails_without_damping() {
        let zero = DMatrix::zeros(1, 1);
        let m = Mode::new(vec![1e-300], vec![1e-300], zero.clone(), zero, vec![0.0], RectDomain::interval(1.0).unwrap())
            .unwrap();
        for eps in [0.1, 1.0, 3.0] {
            let v = check_uniqueness_a3(std::slice::from_ref(&m), &[1.0], eps, &PChoice::Uniform(1.0)).unwrap();
            assert!(!v.holds);
        }
    }

    fn example35_cg() -> CGSystem {
        let act = Activation::uniform(ScalarActivation::identity(), 1.0, 1).unwrap();
        CGSystem::cellular(
            vec![2.0],
            DMatrix::from_element(1, 1, 0.01),
            DMatrix::from_element(1, 1, 0.01),
            &act,
            vec![0.1],
            vec![0.1],
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn corollary_instance() {
        let cg = example35_cg();
        let v = check_corollary34(&cg, std::f64::consts::PI.powi(2), 1.0, &PChoice::Uniform(0.02)).unwrap();
        assert!(v.holds);
        assert!(v.modes[0].p_admissible);
        assert_abs_diff_eq!(v.modes[0].eigenvalues[0], -2.0 + 0.02 - 0.1 * std::f64::consts::PI.powi(2), epsilon = 1e-12);
    }

    fn decoupled_cg(b: f64, f: f64) -> CGSystem {
        let act = Activation::uniform(ScalarActivation::identity(), 1.0, 2).unwrap();
        let mut cg = CGSystem::cellular(vec![b; 2], DMatrix::zeros(2, 2), DMatrix::zeros(2, 2), &act, vec![0.1; 2], vec![0.0; 2], 1.0)
            .unwrap();
        cg.f_lip = vec![f; 2];
        cg
    }

    #[test]
    fn c1_examples() {
        let v = cg_check_c1(&decoupled_cg(2.0, 0.0)).unwrap();
        assert!(v.holds);
        assert_abs_diff_eq!(v.lambda_max, -1.0, epsilon = 1e-14);
        assert_eq!(v.matrix[0][0], -4.0);
        let mut bad = decoupled_cg(2.0, 1.0);
        bad.b_slope = vec![1e-300; 2];
        let v = cg_check_c1(&bad).unwrap();
        assert!(!v.holds);
        assert_abs_diff_eq!(v.lambda_max, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn lambda_special_cases() {
        assert_eq!(solve_lambda(3.0, 0.0, 2.0).unwrap(), 3.0);
        assert_eq!(solve_lambda(3.0, 0.5, 0.0).unwrap(), 2.5);
        assert!(matches!(solve_lambda(1.0, 1.0, 1.0), Err(Error::C2Violated(_))));
    }

    #[test]
    fn lambda_statement1() {
        let a = 0.002 * std::f64::consts::PI.powi(2) + 3.575;
        let l = solve_lambda(a, 0.005, 1.0).unwrap();
        assert!((l - a + 0.005 * l.exp()).abs() <= 1e-12);
        assert!((l - 3.439).abs() < 1e-3);
    }

    #[test]
    fn cg_rates_zero_delay_gain() {
        let mut cg = decoupled_cg(2.0, 0.5);
        cg.g_lip = vec![0.0; 2];
        let r = cg_rates(&cg).unwrap();
        assert_abs_diff_eq!(r.a_tilde, 4.0 - 0.25, epsilon = 1e-12);
        assert_eq!(r.lambda, r.a_tilde);
        assert_eq!(r.b, 0.0);
        // M = I, N = 0: ρ = max{1, 2}
        assert_abs_diff_eq!(r.rho, 2.0, epsilon = 1e-12);
        let d = r.delta_min;
        assert_abs_diff_eq!(d * d * cg.tau, (2.0f64).ln() + r.lambda, epsilon = 1e-12);
        assert_abs_diff_eq!(r.rate.unwrap(), 0.5 * (r.lambda - d), epsilon = 1e-12);
    }

    #[test]
    fn c2_violation_reported() {
        let cg = decoupled_cg(0.1, 1.0);
        assert!(matches!(cg_rates(&cg), Err(Error::C2Violated(_))));
    }
}
