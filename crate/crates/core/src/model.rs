//! Network data model and sampled verification of the activation and
//! boundedness assumptions.
//!
//! Global conditions quantified over all of `ℝ` or `ℝⁿ` cannot be decided for
//! arbitrary functions, so every check here is a *box verdict*: it holds on
//! the sampled points of the given box and nothing is claimed outside it.
//! Affine activations are the exception and are decided in closed form.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{first_eigenvalue, RectDomain};
use crate::linalg;

/// Relative slack allowed when comparing sampled slopes to declared
/// Lipschitz constants.
pub const LIPSCHITZ_SLACK: f64 = 1e-6;

/// A scalar activation `s ↦ g(s)` from the built-in registry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalarActivation {
    /// `slope · s + offset`
    Affine { slope: f64, offset: f64 },
    /// `a + b·s + c·sin(s)`
    ScaledSine { a: f64, b: f64, c: f64 },
    /// `scale · tanh(s)`
    Tanh { scale: f64 },
    /// `½(|s + 1| − |s − 1|)`, the piecewise-linear clamp to `[−1, 1]`.
    Saturation,
    /// Piecewise cube-root nonlinearity with `k = (d / a)·mu1`:
    /// `3k·s^{1/3} + 2k` for `s ≤ −1`, `k·s` on `[−1, 1]`,
    /// `3k·s^{1/3} − 2k` for `s ≥ 1` (real signed cube root).
    CubeRootPiecewise { d: f64, a: f64, mu1: f64 },
    /// Linear interpolation through `(xs, ys)`, constant outside.
    Tabulated { xs: Vec<f64>, ys: Vec<f64> },
}

impl ScalarActivation {
    pub fn identity() -> Self {
        Self::Affine { slope: 1.0, offset: 0.0 }
    }

    pub fn constant(value: f64) -> Self {
        Self::Affine { slope: 0.0, offset: value }
    }

    pub fn eval(&self, s: f64) -> f64 {
        match self {
            Self::Affine { slope, offset } => slope * s + offset,
            Self::ScaledSine { a, b, c } => a + b * s + c * s.sin(),
            Self::Tanh { scale } => scale * s.tanh(),
            Self::Saturation => 0.5 * ((s + 1.0).abs() - (s - 1.0).abs()),
            Self::CubeRootPiecewise { d, a, mu1 } => statement2_f(s, *d, *a, *mu1),
            Self::Tabulated { xs, ys } => interpolate(xs, ys, s),
        }
    }

    /// Global Lipschitz constant when it is known in closed form.
    pub fn exact_lipschitz(&self) -> Option<f64> {
        match self {
            Self::Affine { slope, .. } => Some(slope.abs()),
            Self::ScaledSine { b, c, .. } => Some(b.abs() + c.abs()),
            Self::Tanh { scale } => Some(scale.abs()),
            Self::Saturation => Some(1.0),
            Self::CubeRootPiecewise { d, a, mu1 } => Some((d / a * mu1).abs()),
            Self::Tabulated { xs, ys } => Some(
                xs.windows(2)
                    .zip(ys.windows(2))
                    .map(|(x, y)| ((y[1] - y[0]) / (x[1] - x[0])).abs())
                    .fold(0.0, f64::max),
            ),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Tabulated { xs, ys } => {
                if xs.len() < 2 || xs.len() != ys.len() {
                    return Err(Error::InvalidParameter("tabulated activation needs >= 2 matching points".into()));
                }
                if xs.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::InvalidParameter("tabulated abscissae must increase strictly".into()));
                }
            }
            Self::CubeRootPiecewise { a, .. } if *a == 0.0 => {
                return Err(Error::InvalidParameter("cube-root activation needs a != 0".into()));
            }
            _ => {}
        }
        Ok(())
    }
}

fn interpolate(xs: &[f64], ys: &[f64], s: f64) -> f64 {
    if s <= xs[0] {
        return ys[0];
    }
    if s >= xs[xs.len() - 1] {
        return ys[ys.len() - 1];
    }
    let k = xs.partition_point(|x| *x <= s) - 1;
    let t = (s - xs[k]) / (xs[k + 1] - xs[k]);
    ys[k] + t * (ys[k + 1] - ys[k])
}

/// The piecewise nonlinearity `f(u)` with `k = (D / A)·μ₁`.
pub fn statement2_f(u: f64, d: f64, a: f64, mu1: f64) -> f64 {
    let k = d / a * mu1;
    if u <= -1.0 {
        3.0 * k * u.cbrt() + 2.0 * k
    } else if u < 1.0 {
        k * u
    } else {
        3.0 * k * u.cbrt() - 2.0 * k
    }
}

/// Antiderivative `F(u) = ∫₀ᵘ f(s) ds` of [`statement2_f`].
pub fn statement2_big_f(u: f64, d: f64, a: f64, mu1: f64) -> f64 {
    let k = d / a * mu1;
    if u <= -1.0 {
        2.25 * k * u.abs().powf(4.0 / 3.0) + 2.0 * k * u + 0.25 * k
    } else if u < 1.0 {
        0.5 * k * u * u
    } else {
        2.25 * k * u.powf(4.0 / 3.0) - 2.0 * k * u + 0.25 * k
    }
}

/// Per-neuron activation bundle `g = (g_1, …, g_n)` with declared
/// Lipschitz constants `G = diag(G_1, …, G_n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Activation {
    pub functions: Vec<ScalarActivation>,
    pub lipschitz: Vec<f64>,
}

impl Activation {
    pub fn new(functions: Vec<ScalarActivation>, lipschitz: Vec<f64>) -> Result<Self> {
        if functions.len() != lipschitz.len() {
            return Err(Error::DimensionMismatch { expected: functions.len(), found: lipschitz.len() });
        }
        if let Some(g) = lipschitz.iter().find(|g| !(g.is_finite() && **g > 0.0)) {
            return Err(Error::InvalidParameter(format!("Lipschitz constant {g} must be positive")));
        }
        for f in &functions {
            f.validate()?;
        }
        Ok(Self { functions, lipschitz })
    }

    /// Same function for every neuron.
    pub fn uniform(f: ScalarActivation, lipschitz: f64, n: usize) -> Result<Self> {
        Self::new(vec![f; n], vec![lipschitz; n])
    }

    pub fn dim(&self) -> usize {
        self.functions.len()
    }

    pub fn eval(&self, i: usize, s: f64) -> f64 {
        self.functions[i].eval(s)
    }

    pub fn eval_vec(&self, v: &[f64], out: &mut [f64]) {
        for ((o, f), x) in out.iter_mut().zip(&self.functions).zip(v) {
            *o = f.eval(*x);
        }
    }

    /// `G²` as a dense diagonal matrix.
    pub fn g_squared(&self) -> DMatrix<f64> {
        let sq: Vec<f64> = self.lipschitz.iter().map(|g| g * g).collect();
        linalg::diag(&sq)
    }
}

/// One network configuration `σ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Mode {
    /// Diffusion coefficients (diagonal of `D_σ`).
    pub diffusion: Vec<f64>,
    /// Self-decay coefficients (diagonal of `C_σ`).
    pub decay: Vec<f64>,
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub input: Vec<f64>,
    pub domain: RectDomain,
    pub lambda1: f64,
}

impl Mode {
    pub fn new(
        diffusion: Vec<f64>,
        decay: Vec<f64>,
        a: DMatrix<f64>,
        b: DMatrix<f64>,
        input: Vec<f64>,
        domain: RectDomain,
    ) -> Result<Self> {
        let n = diffusion.len();
        for (name, len) in [("C", decay.len()), ("J", input.len())] {
            if len != n {
                return Err(Error::InvalidParameter(format!("{name} has length {len}, expected {n}")));
            }
        }
        for (name, m) in [("A", &a), ("B", &b)] {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::InvalidParameter(format!("{name} must be {n}x{n}")));
            }
        }
        if diffusion.iter().chain(&decay).any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidParameter("D and C must have positive diagonals".into()));
        }
        let lambda1 = first_eigenvalue(&domain);
        Ok(Self { diffusion, decay, a, b, input, domain, lambda1 })
    }

    pub fn dim(&self) -> usize {
        self.diffusion.len()
    }

    pub fn d_matrix(&self) -> DMatrix<f64> {
        linalg::diag(&self.diffusion)
    }

    pub fn c_matrix(&self) -> DMatrix<f64> {
        linalg::diag(&self.decay)
    }

    /// `A + B`, the effective weight at stationarity.
    pub fn combined_weight(&self) -> DMatrix<f64> {
        &self.a + &self.b
    }

    /// `−C v + (A + B) g(v) + J`.
    pub fn stationary_rhs(&self, activation: &Activation, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut gv = vec![0.0; n];
        activation.eval_vec(v, &mut gv);
        let w = self.combined_weight();
        (0..n)
            .map(|i| {
                -self.decay[i] * v[i] + (0..n).map(|j| w[(i, j)] * gv[j]).sum::<f64>() + self.input[i]
            })
            .collect()
    }
}

/// Time-varying delay `τ(t)`.
#[derive(Clone)]
pub enum DelaySpec {
    Constant(f64),
    /// `base + amplitude · sin(omega · t)`
    Sinusoidal { base: f64, amplitude: f64, omega: f64 },
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for DelaySpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Constant(t) => write!(f, "Constant({t})"),
            Self::Sinusoidal { base, amplitude, omega } => {
                write!(f, "Sinusoidal {{ base: {base}, amplitude: {amplitude}, omega: {omega} }}")
            }
            Self::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl DelaySpec {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Self::Constant(tau) => *tau,
            Self::Sinusoidal { base, amplitude, omega } => base + amplitude * (omega * t).sin(),
            Self::Custom(f) => f(t),
        }
    }

    /// Checks `0 ≤ τ(t) ≤ tau_max` on a uniform sample of `[0, horizon]`.
    pub fn check_bounds(&self, tau_max: f64, horizon: f64, samples: usize) -> Result<()> {
        let samples = samples.max(2);
        for k in 0..samples {
            let t = horizon * k as f64 / (samples - 1) as f64;
            let tau = self.eval(t);
            if !(tau.is_finite() && (0.0..=tau_max * (1.0 + 1e-12)).contains(&tau)) {
                return Err(Error::InvalidParameter(format!(
                    "delay τ({t}) = {tau} outside [0, {tau_max}]"
                )));
            }
        }
        Ok(())
    }
}

/// `N` modes sharing one activation bundle, a delay and the switching
/// parameters `Ψ`, `q`, `γ`.
#[derive(Clone, Debug)]
pub struct SwitchedNetwork {
    pub modes: Vec<Mode>,
    pub activation: Activation,
    pub tau_max: f64,
    pub delay: DelaySpec,
    pub psi: DMatrix<f64>,
    pub q: f64,
    pub gamma: f64,
}

impl SwitchedNetwork {
    pub fn new(
        modes: Vec<Mode>,
        activation: Activation,
        tau_max: f64,
        delay: DelaySpec,
        psi: DMatrix<f64>,
        q: f64,
        gamma: f64,
    ) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::InvalidParameter("a network needs at least one mode".into()));
        }
        let n = activation.dim();
        if let Some(m) = modes.iter().find(|m| m.dim() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: m.dim() });
        }
        if psi.nrows() != n || psi.ncols() != n {
            return Err(Error::InvalidParameter(format!("Ψ must be {n}x{n}")));
        }
        if !linalg::is_symmetric(&psi, 1e-12) {
            return Err(Error::NotSymmetric("Psi".into()));
        }
        if linalg::lambda_min(&psi) <= 0.0 {
            return Err(Error::NotPositiveDefinite("Psi".into()));
        }
        if !(q > 1.0) {
            return Err(Error::InvalidParameter(format!("q must exceed 1, got {q}")));
        }
        if !(gamma > 0.0) {
            return Err(Error::InvalidParameter(format!("γ must be positive, got {gamma}")));
        }
        if !(tau_max >= 0.0 && tau_max.is_finite()) {
            return Err(Error::InvalidParameter(format!("τ must be >= 0, got {tau_max}")));
        }
        delay.check_bounds(tau_max, 10.0 * tau_max.max(1.0), 1001)?;
        Ok(Self { modes, activation, tau_max, delay, psi, q, gamma })
    }

    pub fn dim(&self) -> usize {
        self.activation.dim()
    }

    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }

    /// Copy of the network with every mode moved onto `domain`, so that each
    /// `λ_σ1` becomes `first_eigenvalue(domain)`.
    pub fn on_common_domain(&self, domain: RectDomain) -> Result<Self> {
        let modes = self
            .modes
            .iter()
            .map(|m| Mode::new(m.diffusion.clone(), m.decay.clone(), m.a.clone(), m.b.clone(), m.input.clone(), domain))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { modes, ..self.clone() })
    }
}

/// Delayed impulsive Cohen–Grossberg network.
#[derive(Clone, Debug, PartialEq)]
pub struct CGSystem {
    /// Amplification functions `a_i`.
    pub amplification: Vec<ScalarActivation>,
    pub a_lower: Vec<f64>,
    pub a_upper: Vec<f64>,
    /// Behaved functions `b_i` and their slope bounds `B_i`.
    pub behaved: Vec<ScalarActivation>,
    pub b_slope: Vec<f64>,
    pub f: Vec<ScalarActivation>,
    pub g: Vec<ScalarActivation>,
    pub h: Vec<ScalarActivation>,
    pub f_lip: Vec<f64>,
    pub g_lip: Vec<f64>,
    pub h_lip: Vec<f64>,
    pub c: DMatrix<f64>,
    pub d: DMatrix<f64>,
    /// Impulse gains `m_i`.
    pub m: Vec<f64>,
    pub n_mat: DMatrix<f64>,
    pub impulse_times: Vec<f64>,
    /// Diffusion `r_i`.
    pub r: Vec<f64>,
    pub inputs: Vec<f64>,
    /// Positive diagonal weight `P`.
    pub p: Vec<f64>,
    pub tau: f64,
    /// Free parameter `δ` of the rate formula, if fixed by the user.
    pub delta: Option<f64>,
}

impl CGSystem {
    pub fn dim(&self) -> usize {
        self.a_lower.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        let vecs: [(&str, usize); 11] = [
            ("a_upper", self.a_upper.len()),
            ("b_slope", self.b_slope.len()),
            ("f_lip", self.f_lip.len()),
            ("g_lip", self.g_lip.len()),
            ("h_lip", self.h_lip.len()),
            ("m", self.m.len()),
            ("r", self.r.len()),
            ("inputs", self.inputs.len()),
            ("p", self.p.len()),
            ("amplification", self.amplification.len()),
            ("behaved", self.behaved.len()),
        ];
        for (name, len) in vecs {
            if len != n {
                return Err(Error::InvalidParameter(format!("{name} has length {len}, expected {n}")));
            }
        }
        for (name, fs) in [("f", &self.f), ("g", &self.g), ("h", &self.h)] {
            if fs.len() != n {
                return Err(Error::InvalidParameter(format!("{name} has length {}, expected {n}", fs.len())));
            }
        }
        for (name, mat) in [("C", &self.c), ("D", &self.d), ("N", &self.n_mat)] {
            if mat.nrows() != n || mat.ncols() != n {
                return Err(Error::InvalidParameter(format!("{name} must be {n}x{n}")));
            }
        }
        for i in 0..n {
            if !(0.0 < self.a_lower[i] && self.a_lower[i] <= self.a_upper[i]) {
                return Err(Error::InvalidParameter(format!("need 0 < A_lower <= A_upper at index {i}")));
            }
        }
        for (name, v) in [("B", &self.b_slope), ("P", &self.p)] {
            if v.iter().any(|x| !(*x > 0.0)) {
                return Err(Error::InvalidParameter(format!("{name} must be positive diagonal")));
            }
        }
        for (name, v) in [("F", &self.f_lip), ("G", &self.g_lip), ("H", &self.h_lip)] {
            if v.iter().any(|x| !(*x >= 0.0)) {
                return Err(Error::InvalidParameter(format!("{name} must be nonnegative diagonal")));
            }
        }
        if !(self.tau >= 0.0) {
            return Err(Error::InvalidParameter("τ must be >= 0".into()));
        }
        Ok(())
    }

    /// Cellular specialization: `a_i ≡ 1`, `b_i(u) = b_i u`, `f = g`, no
    /// impulses, `P = I`.
    pub fn cellular(
        b: Vec<f64>,
        c: DMatrix<f64>,
        d: DMatrix<f64>,
        activation: &Activation,
        r: Vec<f64>,
        inputs: Vec<f64>,
        tau: f64,
    ) -> Result<Self> {
        let n = b.len();
        let sys = Self {
            amplification: vec![ScalarActivation::constant(1.0); n],
            a_lower: vec![1.0; n],
            a_upper: vec![1.0; n],
            behaved: b.iter().map(|bi| ScalarActivation::Affine { slope: *bi, offset: 0.0 }).collect(),
            b_slope: b,
            f: activation.functions.clone(),
            g: activation.functions.clone(),
            h: vec![ScalarActivation::constant(0.0); n],
            f_lip: activation.lipschitz.clone(),
            g_lip: activation.lipschitz.clone(),
            h_lip: vec![0.0; n],
            c,
            d,
            m: vec![1.0; n],
            n_mat: DMatrix::zeros(n, n),
            impulse_times: Vec::new(),
            r,
            inputs,
            p: vec![1.0; n],
            tau,
            delta: None,
        };
        sys.validate()?;
        Ok(sys)
    }
}

/// A violating pair / point retained across checks so that a verdict on a
/// superset box can never be more optimistic than one on a subset.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Witness {
    Lipschitz { neuron: usize, s: f64, t: f64 },
    Bound { point: Vec<f64> },
}

/// Result of a sampled Lipschitz check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct A1Verdict {
    pub holds: bool,
    /// Largest observed `|Δg_i| / |Δs|` per neuron.
    pub worst_ratio: Vec<f64>,
    pub witness: Option<Witness>,
}

/// Result of a sampled boundedness check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct A2Verdict {
    pub holds: bool,
    pub samples_checked: usize,
    /// First violating sample `v`, the offending component and its value.
    pub violation: Option<(Vec<f64>, usize, f64)>,
}

/// Per-condition outcome of [`SampledChecker::check_h_conditions`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionVerdict {
    pub holds: bool,
    /// For bounds checks the extreme observed value, for slope checks the
    /// worst observed ratio (min for lower bounds, max for upper bounds).
    pub worst: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HVerdict {
    pub h1: ConditionVerdict,
    pub h2: ConditionVerdict,
    pub h3_f: ConditionVerdict,
    pub h3_g: ConditionVerdict,
    pub h3_h: ConditionVerdict,
}

impl HVerdict {
    pub fn all_hold(&self) -> bool {
        self.h1.holds && self.h2.holds && self.h3_f.holds && self.h3_g.holds && self.h3_h.holds
    }
}

/// Seeded sampler for the box verdicts; keeps every violation it has found.
#[derive(Clone, Debug)]
pub struct SampledChecker {
    pub samples: usize,
    pub seed: u64,
    witnesses: Vec<Witness>,
}

impl Default for SampledChecker {
    fn default() -> Self {
        Self::new(10_000, 0)
    }
}

fn uniform_points(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count < 2 || hi == lo {
        return vec![lo, hi];
    }
    (0..count).map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64).collect()
}

fn check_box(bounds: &[(f64, f64)]) -> Result<()> {
    if bounds.iter().any(|(lo, hi)| !(lo.is_finite() && hi.is_finite() && lo <= hi)) {
        return Err(Error::InvalidParameter("box must be nonempty and finite".into()));
    }
    Ok(())
}

impl SampledChecker {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self { samples, seed, witnesses: Vec::new() }
    }

    pub fn witnesses(&self) -> &[Witness] {
        &self.witnesses
    }

    /// Sampled check of `|g_i(s) − g_i(t)| ≤ G_i |s − t|` on `bounds[i]`.
    ///
    /// On a sorted sample the largest pairwise slope is attained by adjacent
    /// points, so only neighbours are compared.
    pub fn check_a1(&mut self, activation: &Activation, bounds: &[(f64, f64)]) -> Result<A1Verdict> {
        if self.samples < 2 {
            return Err(Error::InvalidParameter("need at least 2 samples".into()));
        }
        if bounds.len() != activation.dim() {
            return Err(Error::DimensionMismatch { expected: activation.dim(), found: bounds.len() });
        }
        check_box(bounds)?;
        let mut worst_ratio = Vec::with_capacity(activation.dim());
        let mut witness = None;
        let mut holds = true;
        for (i, (f, &(lo, hi))) in activation.functions.iter().zip(bounds).enumerate() {
            let g_i = activation.lipschitz[i];
            let (ratio, pair) = if let ScalarActivation::Affine { slope, .. } = f {
                (slope.abs(), None)
            } else {
                let pts = uniform_points(lo, hi, self.samples);
                let mut vals = Vec::with_capacity(pts.len());
                for &s in &pts {
                    let v = f.eval(s);
                    if !v.is_finite() {
                        return Err(Error::NonFinite(format!("g_{}({s})", i + 1)));
                    }
                    vals.push(v);
                }
                let mut best = (0.0, None);
                for k in 1..pts.len() {
                    let ds = pts[k] - pts[k - 1];
                    if ds > 0.0 {
                        let r = (vals[k] - vals[k - 1]).abs() / ds;
                        if r > best.0 {
                            best = (r, Some((pts[k - 1], pts[k])));
                        }
                    }
                }
                // previously found violations inside this box
                for w in &self.witnesses {
                    if let Witness::Lipschitz { neuron, s, t } = w {
                        if *neuron == i && (lo..=hi).contains(s) && (lo..=hi).contains(t) {
                            let r = (f.eval(*s) - f.eval(*t)).abs() / (s - t).abs();
                            if r > best.0 {
                                best = (r, Some((*s, *t)));
                            }
                        }
                    }
                }
                best
            };
            if ratio > g_i * (1.0 + LIPSCHITZ_SLACK) {
                holds = false;
                if let Some((s, t)) = pair {
                    let w = Witness::Lipschitz { neuron: i, s, t };
                    if witness.is_none() {
                        witness = Some(w.clone());
                    }
                    if !self.witnesses.contains(&w) {
                        self.witnesses.push(w);
                    }
                }
            }
            worst_ratio.push(ratio);
        }
        Ok(A1Verdict { holds, worst_ratio, witness })
    }

    /// Sampled check of `0 ≤ −Cv + Ag(v) + Bg(v) + J ≤ c·D·E` (`signed`) or
    /// `|−Cv + Ag(v) + Bg(v) + J| ≤ c·D·E` (unsigned) on the box.
    ///
    /// In one dimension the box is sampled uniformly; in higher dimensions
    /// with a seeded Latin hypercube plus the box corners.
    pub fn check_a2(
        &mut self,
        mode: &Mode,
        activation: &Activation,
        c: f64,
        bounds: &[(f64, f64)],
        signed: bool,
    ) -> Result<A2Verdict> {
        if !(c > 0.0) {
            return Err(Error::InvalidParameter(format!("c must be positive, got {c}")));
        }
        let n = mode.dim();
        if bounds.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: bounds.len() });
        }
        check_box(bounds)?;
        let mut points: Vec<Vec<f64>> = self
            .witnesses
            .iter()
            .filter_map(|w| match w {
                Witness::Bound { point }
                    if point.len() == n
                        && point.iter().zip(bounds).all(|(x, (lo, hi))| (*lo..=*hi).contains(x)) =>
                {
                    Some(point.clone())
                }
                _ => None,
            })
            .collect();
        if n == 1 {
            points.extend(uniform_points(bounds[0].0, bounds[0].1, self.samples).into_iter().map(|x| vec![x]));
        } else {
            for corner in 0..(1usize << n.min(16)) {
                points.push((0..n).map(|i| if corner >> i & 1 == 1 { bounds[i].1 } else { bounds[i].0 }).collect());
            }
            points.extend(latin_hypercube(bounds, self.samples, self.seed));
        }
        let limit: Vec<f64> = mode.diffusion.iter().map(|d| c * d).collect();
        for (k, v) in points.iter().enumerate() {
            let w = mode.stationary_rhs(activation, v);
            for (i, wi) in w.iter().enumerate() {
                if !wi.is_finite() {
                    return Err(Error::NonFinite(format!("A2 expression at {v:?}")));
                }
                let ok = if signed { *wi >= 0.0 && *wi <= limit[i] } else { wi.abs() <= limit[i] };
                if !ok {
                    let wit = Witness::Bound { point: v.clone() };
                    if !self.witnesses.contains(&wit) {
                        self.witnesses.push(wit);
                    }
                    return Ok(A2Verdict { holds: false, samples_checked: k + 1, violation: Some((v.clone(), i, *wi)) });
                }
            }
        }
        Ok(A2Verdict { holds: true, samples_checked: points.len(), violation: None })
    }

    /// Sampled checks of the amplification bounds, the monotonicity of the
    /// behaved functions and the sector bounds on `f`, `g`, `h`.
    pub fn check_h_conditions(&mut self, cg: &CGSystem, bounds: &[(f64, f64)]) -> Result<HVerdict> {
        cg.validate()?;
        let n = cg.dim();
        if bounds.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: bounds.len() });
        }
        check_box(bounds)?;
        let grid: Vec<Vec<f64>> = bounds.iter().map(|(lo, hi)| uniform_points(*lo, *hi, self.samples)).collect();
        let slack = |x: f64| x.abs() * LIPSCHITZ_SLACK + 1e-12;

        let mut h1 = ConditionVerdict { holds: true, worst: Vec::with_capacity(2 * n) };
        let mut lows = Vec::with_capacity(n);
        let mut highs = Vec::with_capacity(n);
        for i in 0..n {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for &s in &grid[i] {
                let v = cg.amplification[i].eval(s);
                lo = lo.min(v);
                hi = hi.max(v);
            }
            if lo < cg.a_lower[i] - slack(cg.a_lower[i]) || hi > cg.a_upper[i] + slack(cg.a_upper[i]) {
                h1.holds = false;
            }
            lows.push(lo);
            highs.push(hi);
        }
        h1.worst.extend(lows);
        h1.worst.extend(highs);

        let slopes = |f: &ScalarActivation, pts: &[f64]| -> (f64, f64) {
            let vals: Vec<f64> = pts.iter().map(|s| f.eval(*s)).collect();
            let mut min = f64::INFINITY;
            let mut max = f64::NEG_INFINITY;
            for k in 1..pts.len() {
                let ds = pts[k] - pts[k - 1];
                if ds > 0.0 {
                    let r = (vals[k] - vals[k - 1]) / ds;
                    min = min.min(r);
                    max = max.max(r);
                }
            }
            (min, max)
        };

        let mut h2 = ConditionVerdict { holds: true, worst: Vec::with_capacity(n) };
        for i in 0..n {
            let (min, _) = slopes(&cg.behaved[i], &grid[i]);
            if min < cg.b_slope[i] - slack(cg.b_slope[i]) {
                h2.holds = false;
            }
            h2.worst.push(min);
        }

        let sector = |fs: &[ScalarActivation], lip: &[f64]| -> ConditionVerdict {
            let mut v = ConditionVerdict { holds: true, worst: Vec::with_capacity(n) };
            for i in 0..n {
                let (min, max) = slopes(&fs[i], &grid[i]);
                if min < -1e-12 || max > lip[i] + slack(lip[i]) {
                    v.holds = false;
                }
                v.worst.push(max);
            }
            v
        };
        let h3_f = sector(&cg.f, &cg.f_lip);
        let h3_g = sector(&cg.g, &cg.g_lip);
        let h3_h = sector(&cg.h, &cg.h_lip);
        Ok(HVerdict { h1, h2, h3_f, h3_g, h3_h })
    }
}

fn latin_hypercube(bounds: &[(f64, f64)], samples: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = bounds.len();
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(n);
    for &(lo, hi) in bounds {
        let mut strata: Vec<f64> = (0..samples)
            .map(|k| lo + (hi - lo) * (k as f64 + rng.random::<f64>()) / samples as f64)
            .collect();
        // Fisher–Yates
        for k in (1..strata.len()).rev() {
            let j = rng.random_range(0..=k);
            strata.swap(k, j);
        }
        columns.push(strata);
    }
    (0..samples).map(|k| (0..n).map(|i| columns[i][k]).collect()).collect()
}

/// Convenience wrapper: fresh checker, default sample budget.
pub fn check_a1_sampled(activation: &Activation, bounds: &[(f64, f64)], samples: usize) -> Result<A1Verdict> {
    SampledChecker::new(samples, 0).check_a1(activation, bounds)
}

pub fn check_a2_on_box(
    mode: &Mode,
    activation: &Activation,
    c: f64,
    bounds: &[(f64, f64)],
    samples: usize,
    signed: bool,
) -> Result<A2Verdict> {
    SampledChecker::new(samples, 0).check_a2(mode, activation, c, bounds, signed)
}

pub fn check_h_conditions(cg: &CGSystem, bounds: &[(f64, f64)], samples: usize) -> Result<HVerdict> {
    SampledChecker::new(samples, 0).check_h_conditions(cg, bounds)
}
