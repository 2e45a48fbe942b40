//! Stationary solutions: fixed-point iteration, variational minimization of
//! energy functionals, closed forms and a multiplicity search.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{l2_norm, weighted_dot, Grid, GridFunction, HelmholtzSolver, ScalarField, VectorField};
use crate::model::{statement2_big_f, statement2_f, Activation, Mode, ScalarActivation};

/// One mode's stationary problem `DΔy − Cy + (A+B)g(y) + J = 0` on a grid.
#[derive(Clone, Debug)]
pub struct StationaryProblem {
    pub mode: Mode,
    pub activation: Activation,
    pub grid: Grid,
}

impl StationaryProblem {
    pub fn new(mode: Mode, activation: Activation, grid: Grid) -> Result<Self> {
        if mode.dim() != activation.dim() {
            return Err(Error::DimensionMismatch { expected: mode.dim(), found: activation.dim() });
        }
        if mode.domain != *grid.domain() {
            return Err(Error::InvalidGrid("grid domain differs from the mode's domain".into()));
        }
        Ok(Self { mode, activation, grid })
    }

    pub fn dim(&self) -> usize {
        self.mode.dim()
    }

    /// `(A+B)g(y) + J` evaluated at every node, component-major.
    fn reaction_without_decay(&self, y: &VectorField) -> Vec<f64> {
        let n = self.dim();
        let len = self.grid.len();
        let w = self.mode.combined_weight();
        let mut out = vec![0.0; n * len];
        let mut v = vec![0.0; n];
        let mut gv = vec![0.0; n];
        for m in 0..len {
            y.gather(m, &mut v);
            self.activation.eval_vec(&v, &mut gv);
            for i in 0..n {
                let mut s = self.mode.input[i];
                for j in 0..n {
                    s += w[(i, j)] * gv[j];
                }
                out[i * len + m] = s;
            }
        }
        out
    }

    fn check_field(&self, y: &VectorField) -> Result<()> {
        if y.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        if y.components() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: y.components() });
        }
        Ok(())
    }
}

/// Discrete L² norm of `DΔ_h y − Cy + (A+B)g(y) + J` over interior nodes.
pub fn residual(problem: &StationaryProblem, y: &VectorField) -> Result<f64> {
    problem.check_field(y)?;
    let len = problem.grid.len();
    let mut r = problem.reaction_without_decay(y);
    let mut lap = vec![0.0; len];
    for i in 0..problem.dim() {
        let yi = y.component(i);
        problem.grid.apply_laplacian(yi, &mut lap);
        let (d, c) = (problem.mode.diffusion[i], problem.mode.decay[i]);
        for m in 0..len {
            r[i * len + m] += d * lap[m] - c * yi[m];
        }
    }
    Ok(weighted_dot(&problem.grid, &r, &r).sqrt())
}

/// Which operator the fixed-point iteration applies.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverForm {
    /// `y ← (−Δ_h)⁻¹ D⁻¹(−Cy + (A+B)g(y) + J)`.
    InverseLaplacian,
    /// `y_i ← (C_i/D_i − Δ_h)⁻¹ D_i⁻¹((A+B)g(y) + J)_i`.
    #[default]
    Helmholtz,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FixedPointOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub form: SolverForm,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_iter: 10_000, form: SolverForm::Helmholtz }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FixedPointReport {
    pub iterations: usize,
    /// Sup norm of the final update.
    pub last_update: f64,
    pub residual: f64,
    pub form: SolverForm,
}

/// Picard iteration until the sup-norm update drops to `tol`.
pub fn fixed_point_solve(
    problem: &StationaryProblem,
    init: &VectorField,
    options: &FixedPointOptions,
) -> Result<(VectorField, FixedPointReport)> {
    problem.check_field(init)?;
    if !(options.tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {}", options.tol)));
    }
    let n = problem.dim();
    let len = problem.grid.len();
    let solvers: Vec<HelmholtzSolver> = (0..n)
        .map(|i| {
            let shift = match options.form {
                SolverForm::InverseLaplacian => 0.0,
                SolverForm::Helmholtz => problem.mode.decay[i] / problem.mode.diffusion[i],
            };
            HelmholtzSolver::new(&problem.grid, shift)
        })
        .collect::<Result<_>>()?;

    let mut y = init.clone();
    let mut last_update = f64::INFINITY;
    for iter in 1..=options.max_iter {
        let mut next = problem.reaction_without_decay(&y);
        for i in 0..n {
            let (d, c) = (problem.mode.diffusion[i], problem.mode.decay[i]);
            let block = &mut next[i * len..(i + 1) * len];
            let yi = y.component(i);
            for m in 0..len {
                if options.form == SolverForm::InverseLaplacian {
                    block[m] -= c * yi[m];
                }
                block[m] /= d;
            }
            solvers[i].solve_in_place(block);
        }
        last_update = next
            .iter()
            .zip(y.values())
            .fold(0.0, |acc: f64, (a, b)| acc.max((a - b).abs()));
        if !last_update.is_finite() {
            return Err(Error::Divergence { iterations: iter, last_update, last_iterate: y.into_values() });
        }
        y = VectorField::from_values(&problem.grid, n, next)?;
        if last_update <= options.tol {
            let res = residual(problem, &y)?;
            return Ok((y, FixedPointReport { iterations: iter, last_update, residual: res, form: options.form }));
        }
    }
    Err(Error::Divergence { iterations: options.max_iter, last_update, last_iterate: y.into_values() })
}

/// Linear source term of an energy functional.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Constant(f64),
    Field(Vec<f64>),
}

impl Source {
    fn at(&self, m: usize) -> f64 {
        match self {
            Self::Constant(c) => *c,
            Self::Field(v) => v[m],
        }
    }
}

/// Nonlinear potential `−multiplier · ∫F(u)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "id", rename_all = "snake_case")]
pub enum Nonlinearity {
    None,
    /// Piecewise cube-root potential with multiplier `a / d`.
    Statement2 { d: f64, a: f64, mu1: f64 },
}

impl Nonlinearity {
    /// Looks a nonlinearity up by name; `params` are `(d, a, mu1)` where needed.
    pub fn by_name(id: &str, params: &[f64]) -> Result<Self> {
        match (id, params) {
            ("none", _) => Ok(Self::None),
            ("statement2_F" | "statement2", [d, a, mu1]) => Ok(Self::Statement2 { d: *d, a: *a, mu1: *mu1 }),
            ("statement2_F" | "statement2", _) => {
                Err(Error::InvalidParameter("statement2 nonlinearity takes (d, a, mu1)".into()))
            }
            _ => Err(Error::UnknownNonlinearity(id.to_string())),
        }
    }

    fn potential(&self, u: f64) -> f64 {
        match self {
            Self::None => 0.0,
            Self::Statement2 { d, a, mu1 } => a / d * statement2_big_f(u, *d, *a, *mu1),
        }
    }

    fn force(&self, u: f64) -> f64 {
        match self {
            Self::None => 0.0,
            Self::Statement2 { d, a, mu1 } => a / d * statement2_f(u, *d, *a, *mu1),
        }
    }
}

/// `E(u) = ½∫|∇u|² + (c₀/2)∫u² − ∫s·u − ∫Φ(u)` on a grid, where the
/// gradient term is the forward-difference energy whose first variation is
/// `−Δ_h u`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergyFunctional {
    pub c0: f64,
    pub source: Source,
    pub nonlinearity: Nonlinearity,
}

impl EnergyFunctional {
    pub fn quadratic(c0: f64, source: Source) -> Self {
        Self { c0, source, nonlinearity: Nonlinearity::None }
    }

    /// `½∫|∇u|² + (C/2D)∫u² − (A/D)∫F(u)` with `μ₁ = C/D + λ₁`.
    pub fn statement2(d: f64, c: f64, a: f64, lambda1: f64) -> Self {
        Self {
            c0: c / d,
            source: Source::Constant(0.0),
            nonlinearity: Nonlinearity::Statement2 { d, a, mu1: c / d + lambda1 },
        }
    }

    fn check(&self, u: &ScalarField) -> Result<()> {
        if !(self.c0 >= 0.0) {
            return Err(Error::InvalidParameter(format!("c0 must be >= 0, got {}", self.c0)));
        }
        if let Source::Field(v) = &self.source {
            if v.len() != u.grid().len() {
                return Err(Error::DimensionMismatch { expected: u.grid().len(), found: v.len() });
            }
        }
        Ok(())
    }

    pub fn eval(&self, u: &ScalarField) -> Result<f64> {
        self.check(u)?;
        let grid = u.grid();
        let vals = u.values();
        let local: f64 = vals
            .iter()
            .enumerate()
            .map(|(m, &x)| 0.5 * self.c0 * x * x - self.source.at(m) * x - self.nonlinearity.potential(x))
            .sum();
        Ok(grid.dirichlet_energy(vals) + grid.cell_volume() * local)
    }

    /// L² representative of the first variation:
    /// `−Δ_h u + c₀u − s − Φ′(u)`.
    pub fn gradient(&self, u: &ScalarField) -> Result<ScalarField> {
        self.check(u)?;
        let grid = u.grid();
        let mut g = grid.laplacian(u.values());
        for (m, (gm, &x)) in g.iter_mut().zip(u.values()).enumerate() {
            *gm = -*gm + self.c0 * x - self.source.at(m) - self.nonlinearity.force(x);
        }
        ScalarField::from_values(grid, g)
    }
}

/// Energy whose critical points solve a scalar stationary problem. Supported
/// activations are affine ones (a quadratic energy) and the cube-root
/// nonlinearity whose own `(d, a)` equal the mode's `D` and `A + B`.
pub fn functional_for(problem: &StationaryProblem) -> Result<EnergyFunctional> {
    if problem.dim() != 1 {
        return Err(Error::InvalidParameter("energy functionals are available for scalar problems only".into()));
    }
    let m = &problem.mode;
    let (d, c, w, j) = (m.diffusion[0], m.decay[0], m.combined_weight()[(0, 0)], m.input[0]);
    match &problem.activation.functions[0] {
        ScalarActivation::Affine { slope, offset } => {
            let c0 = (c - w * slope) / d;
            if c0 < 0.0 {
                return Err(Error::InvalidParameter(format!("quadratic energy is not coercive (c0 = {c0})")));
            }
            Ok(EnergyFunctional::quadratic(c0, Source::Constant((w * offset + j) / d)))
        }
        ScalarActivation::CubeRootPiecewise { d: fd, a: fa, mu1 } => {
            let close = |x: f64, y: f64| (x - y).abs() <= 1e-12 * x.abs().max(y.abs());
            if j != 0.0 || !close(*fd, d) || !close(*fa, w) {
                return Err(Error::InvalidParameter(
                    "cube-root energy needs zero input and activation parameters equal to D and A + B".into(),
                ));
            }
            Ok(EnergyFunctional { c0: c / d, source: Source::Constant(0.0), nonlinearity: Nonlinearity::Statement2 { d, a: w, mu1: *mu1 } })
        }
        other => Err(Error::InvalidParameter(format!("no energy functional for activation {other:?}"))),
    }
}

pub fn energy_eval(functional: &EnergyFunctional, u: &ScalarField) -> Result<f64> {
    functional.eval(u)
}

pub fn energy_gradient(functional: &EnergyFunctional, u: &ScalarField) -> Result<ScalarField> {
    functional.gradient(u)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinimizeOptions {
    /// Stop once the L² norm of the gradient is at most this.
    pub tol: f64,
    pub max_iter: usize,
    /// Armijo sufficient-decrease constant.
    pub armijo_c1: f64,
    /// Backtracking factor.
    pub shrink: f64,
    /// Use Barzilai–Borwein trial steps instead of always starting at 1.
    pub barzilai_borwein: bool,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_iter: 10_000, armijo_c1: 1e-4, shrink: 0.5, barzilai_borwein: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinimizeReport {
    pub iterations: usize,
    pub gradient_norm: f64,
    pub energy: f64,
    pub backtracks: usize,
}

/// Preconditioned gradient descent with Armijo backtracking.
///
/// Search directions are `−(κI − Δ_h)⁻¹∇E` with `κ = max(c₀, 1)`, i.e.
/// steepest descent in the `H¹`-type metric; on purely quadratic functionals
/// the unit step is exact.
pub fn variational_minimize(
    functional: &EnergyFunctional,
    init: &ScalarField,
    options: &MinimizeOptions,
) -> Result<(ScalarField, MinimizeReport)> {
    if !(options.tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {}", options.tol)));
    }
    let grid = *init.grid();
    let kappa = functional.c0.max(1.0);
    let precond = HelmholtzSolver::new(&grid, kappa)?;
    let apply_metric = |v: &[f64]| -> Vec<f64> {
        let mut out = grid.laplacian(v);
        for (o, x) in out.iter_mut().zip(v) {
            *o = kappa * x - *o;
        }
        out
    };

    let mut u = init.clone();
    let mut energy = functional.eval(&u)?;
    let mut grad = functional.gradient(&u)?;
    let mut backtracks = 0;
    let mut trial = 1.0;
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    for iter in 0..=options.max_iter {
        let gnorm = l2_norm(&grad);
        if gnorm <= options.tol {
            return Ok((u, MinimizeReport { iterations: iter, gradient_norm: gnorm, energy, backtracks }));
        }
        if iter == options.max_iter {
            return Err(Error::Divergence { iterations: iter, last_update: gnorm, last_iterate: u.into_values() });
        }
        let dir = precond.solve(grad.values());
        // slope along −dir, measured in L²
        let slope = weighted_dot(&grid, grad.values(), &dir);
        if options.barzilai_borwein {
            if let Some((s, y)) = &prev {
                let sy = weighted_dot(&grid, s, y);
                if sy > 0.0 {
                    let sps = weighted_dot(&grid, s, &apply_metric(s));
                    trial = (sps / sy).clamp(1e-4, 1e4);
                } else {
                    trial = 1.0;
                }
            }
        }
        let mut alpha = trial;
        let (candidate, cand_energy) = loop {
            let vals: Vec<f64> = u.values().iter().zip(&dir).map(|(x, d)| x - alpha * d).collect();
            let cand = ScalarField::from_values(&grid, vals)?;
            let e = functional.eval(&cand)?;
            if e <= energy - options.armijo_c1 * alpha * slope {
                break (cand, e);
            }
            alpha *= options.shrink;
            backtracks += 1;
            if alpha < 1e-16 {
                // no further decrease representable: stationary to rounding
                let gnorm = l2_norm(&grad);
                return Err(Error::Divergence { iterations: iter, last_update: gnorm, last_iterate: u.into_values() });
            }
        };
        let new_grad = functional.gradient(&candidate)?;
        let s: Vec<f64> = candidate.values().iter().zip(u.values()).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = new_grad.values().iter().zip(grad.values()).map(|(a, b)| a - b).collect();
        prev = Some((s, y));
        u = candidate;
        energy = cand_energy;
        grad = new_grad;
    }
    unreachable!("loop returns on its last iteration")
}

/// Closed-form stationary profile of the scalar benchmark
/// `u'' = 1785u − 1000`, `u(0) = u(1) = 0`.
///
/// Evaluated as `(200/357)[1 − (sinh(sx) + sinh(s(1−x)))/sinh s]` with
/// `s = √1785`, algebraically identical to the exponential form but free of
/// large cancelling terms.
pub fn statement1_profile(x: f64) -> f64 {
    let s = 1785f64.sqrt();
    let e = 200.0 / 357.0;
    e * (1.0 - ((s * x).sinh() + (s * (1.0 - x)).sinh()) / s.sinh())
}

/// The same profile written as a combination of `e^{±sx}` and a constant.
pub fn statement1_profile_exponential(x: f64) -> f64 {
    let s = 1785f64.sqrt();
    let (ep, em) = (s.exp(), (-s).exp());
    let denom = 357.0 * (ep - em);
    200.0 * (em - 1.0) / denom * (s * x).exp() - 200.0 * (ep - 1.0) / denom * (-s * x).exp() + 200.0 / 357.0
}

/// Samples [`statement1_profile`] on a 1D grid over `(0, 1)`.
pub fn statement1_closed_form(grid: &Grid) -> Result<ScalarField> {
    if grid.dims() != 1 || grid.domain().lengths()[0] != 1.0 {
        return Err(Error::InvalidGrid("the closed form lives on the unit interval".into()));
    }
    Ok(ScalarField::from_fn(grid, |[x, _]| statement1_profile(x)))
}

/// `(1/c)[1 − cosh(√c(x − L/2)) / cosh(√c L/2)]`, the solution of
/// `−u'' + cu = 1` on `(0, L)` with zero boundary values.
pub fn helmholtz_unit_source_profile(c: f64, length: f64, x: f64) -> f64 {
    let k = c.sqrt();
    (1.0 - (k * (x - 0.5 * length)).cosh() / (0.5 * k * length).cosh()) / c
}

/// A distinct stationary solution and the inits that reached it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FoundSolution {
    #[serde(skip)]
    pub field: ScalarField,
    pub energy: f64,
    pub l2_norm: f64,
    pub sup_norm: f64,
    pub gradient_norm: f64,
    pub from_inits: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultiplicityReport {
    pub solutions: Vec<FoundSolution>,
    /// Inits whose descent did not converge, with the reason.
    pub failures: Vec<(usize, String)>,
    /// Lowest energy seen, an upper estimate of the infimum.
    pub inf_estimate: f64,
}

impl MultiplicityReport {
    pub fn count(&self) -> usize {
        self.solutions.len()
    }

    pub fn nonzero_count(&self, zero_tol: f64) -> usize {
        self.solutions.iter().filter(|s| s.l2_norm > zero_tol).count()
    }
}

/// Relative L² separation below which two solutions are merged.
pub const CLUSTER_THRESHOLD: f64 = 0.1;

/// Minimizes from every init and clusters the results. Two fields are the
/// same solution when `‖a − b‖ ≤ 0.1 (1 + ‖a‖ + ‖b‖)`.
pub fn find_stationary_multiplicity(
    functional: &EnergyFunctional,
    inits: &[ScalarField],
    options: &MinimizeOptions,
) -> Result<MultiplicityReport> {
    if inits.is_empty() {
        return Err(Error::InvalidParameter("need at least one init".into()));
    }
    let mut found: Vec<FoundSolution> = Vec::new();
    let mut failures = Vec::new();
    let mut inf_estimate = f64::INFINITY;
    for (k, init) in inits.iter().enumerate() {
        match variational_minimize(functional, init, options) {
            Ok((u, report)) => {
                inf_estimate = inf_estimate.min(report.energy);
                let norm = l2_norm(&u);
                let existing = found.iter_mut().find(|s| {
                    let diff: Vec<f64> = s.field.values().iter().zip(u.values()).map(|(a, b)| a - b).collect();
                    weighted_dot(u.grid(), &diff, &diff).sqrt() <= CLUSTER_THRESHOLD * (1.0 + s.l2_norm + norm)
                });
                match existing {
                    Some(s) => s.from_inits.push(k),
                    None => found.push(FoundSolution {
                        sup_norm: u.sup_norm(),
                        field: u,
                        energy: report.energy,
                        l2_norm: norm,
                        gradient_norm: report.gradient_norm,
                        from_inits: vec![k],
                    }),
                }
            }
            Err(e) => failures.push((k, e.to_string())),
        }
    }
    found.sort_by(|a, b| a.energy.total_cmp(&b.energy).then(a.l2_norm.total_cmp(&b.l2_norm)));
    Ok(MultiplicityReport { solutions: found, failures, inf_estimate })
}
