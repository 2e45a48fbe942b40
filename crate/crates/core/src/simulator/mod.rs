//! IMEX time integration of delayed reaction–diffusion networks with
//! state-dependent switching and impulses.
//!
//! Each step solves
//! `(I − Δt D_i Δ_h) u_i^{k+1} = u_i^k + Δt R_i(u^k, u(t_k − τ(t_k)))`
//! per component, where `R` is the explicit reaction of the active mode. The
//! spatially lumped (ODE) variant runs through the same loop with the
//! diffusion solve skipped.

mod decay;
mod history;

use std::collections::HashMap;
use std::io::Write;

use nalgebra::DMatrix;
use serde::Serialize;

pub use decay::{fit_decay, DecayEstimate, MIN_FIT_SAMPLES};
pub use history::History;

use crate::certificates::mode_matrices;
use crate::error::{Error, Result};
use crate::geometry::{Grid, GridFunction, HelmholtzSolver, VectorField};
use crate::initial::InitialHistory;
use crate::model::{CGSystem, ScalarActivation, SwitchedNetwork};
use crate::stationary::{fixed_point_solve, FixedPointOptions, StationaryProblem};

/// Where the state lives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Space {
    Grid(Grid),
    /// One point, no diffusion: the delayed ODE system.
    Lumped,
}

impl Space {
    pub fn nodes(&self) -> usize {
        match self {
            Self::Grid(g) => g.len(),
            Self::Lumped => 1,
        }
    }

    /// Quadrature weight per node.
    pub fn weight(&self) -> f64 {
        match self {
            Self::Grid(g) => g.cell_volume(),
            Self::Lumped => 1.0,
        }
    }

    pub fn coords(&self, m: usize) -> [f64; 2] {
        match self {
            Self::Grid(g) => g.coords(m),
            Self::Lumped => [0.0, 0.0],
        }
    }

    fn norm_sq(&self, state: &[f64]) -> f64 {
        self.weight() * state.iter().map(|x| x * x).sum::<f64>()
    }
}

/// A reaction model the integrator can step.
pub trait Dynamics {
    fn dim(&self) -> usize;
    fn mode_count(&self) -> usize;
    /// Diffusion coefficients of a mode (ignored on [`Space::Lumped`]).
    fn diffusion(&self, mode: usize) -> &[f64];
    fn tau_max(&self) -> f64;
    fn delay(&self, t: f64) -> f64;
    /// Explicit right-hand side at one node. `scratch` has length `2·dim`.
    fn reaction(&self, mode: usize, node: usize, u: &[f64], delayed: &[f64], out: &mut [f64], scratch: &mut [f64]);
    /// Called after the active mode changes; may rewrite the state.
    fn on_switch(&self, _from: usize, _to: usize, _state: &mut [f64], _nodes: usize) {}
}

/// Reference profile `y^σ` subtracted in the deviation form.
#[derive(Clone, Debug, PartialEq)]
pub enum Reference {
    /// `y^σ ≡ 0`, i.e. `f(u) = g(u) − g(0)`.
    Zero,
    /// One profile for all modes, component-major over the nodes.
    Shared(Vec<f64>),
    /// One profile per mode. With `reexpress`, a switch from `σ` to `σ'`
    /// maps `u ↦ u + y^σ − y^{σ'}` so that `y` is continuous.
    PerMode { profiles: Vec<Vec<f64>>, reexpress: bool },
}

/// Which variable is integrated.
#[derive(Clone, Debug, PartialEq)]
pub enum StateForm {
    /// `y` itself: `−Cy + Ag(y) + Bg(y_τ) + J`.
    Absolute,
    /// `u = y − y^σ`: `−Cu + Af(u) + Bf(u_τ)` with `f(u) = g(y^σ + u) − g(y^σ)`.
    Deviation(Reference),
}

pub struct NetworkDynamics<'a> {
    network: &'a SwitchedNetwork,
    form: StateForm,
    nodes: usize,
}

impl<'a> NetworkDynamics<'a> {
    pub fn new(network: &'a SwitchedNetwork, form: StateForm, nodes: usize) -> Result<Self> {
        let len = network.dim() * nodes;
        match &form {
            StateForm::Deviation(Reference::Shared(p)) if p.len() != len => {
                return Err(Error::DimensionMismatch { expected: len, found: p.len() })
            }
            StateForm::Deviation(Reference::PerMode { profiles, .. }) => {
                if profiles.len() != network.mode_count() {
                    return Err(Error::DimensionMismatch { expected: network.mode_count(), found: profiles.len() });
                }
                if let Some(p) = profiles.iter().find(|p| p.len() != len) {
                    return Err(Error::DimensionMismatch { expected: len, found: p.len() });
                }
            }
            _ => {}
        }
        Ok(Self { network, form, nodes })
    }

    fn reference(&self, mode: usize, node: usize, i: usize) -> f64 {
        match &self.form {
            StateForm::Absolute | StateForm::Deviation(Reference::Zero) => 0.0,
            StateForm::Deviation(Reference::Shared(p)) => p[i * self.nodes + node],
            StateForm::Deviation(Reference::PerMode { profiles, .. }) => profiles[mode][i * self.nodes + node],
        }
    }
}

impl Dynamics for NetworkDynamics<'_> {
    fn dim(&self) -> usize {
        self.network.dim()
    }

    fn mode_count(&self) -> usize {
        self.network.mode_count()
    }

    fn diffusion(&self, mode: usize) -> &[f64] {
        &self.network.modes[mode].diffusion
    }

    fn tau_max(&self) -> f64 {
        self.network.tau_max
    }

    fn delay(&self, t: f64) -> f64 {
        self.network.delay.eval(t)
    }

    fn reaction(&self, mode: usize, node: usize, u: &[f64], delayed: &[f64], out: &mut [f64], scratch: &mut [f64]) {
        let n = u.len();
        let m = &self.network.modes[mode];
        let act = &self.network.activation;
        let (fu, fd) = scratch.split_at_mut(n);
        let absolute = matches!(self.form, StateForm::Absolute);
        for j in 0..n {
            if absolute {
                fu[j] = act.eval(j, u[j]);
                fd[j] = act.eval(j, delayed[j]);
            } else {
                let r = self.reference(mode, node, j);
                let g0 = act.eval(j, r);
                fu[j] = act.eval(j, r + u[j]) - g0;
                fd[j] = act.eval(j, r + delayed[j]) - g0;
            }
        }
        for i in 0..n {
            let mut s = -m.decay[i] * u[i];
            for j in 0..n {
                s += m.a[(i, j)] * fu[j] + m.b[(i, j)] * fd[j];
            }
            if absolute {
                s += m.input[i];
            }
            out[i] = s;
        }
    }

    fn on_switch(&self, from: usize, to: usize, state: &mut [f64], nodes: usize) {
        if let StateForm::Deviation(Reference::PerMode { profiles, reexpress: true }) = &self.form {
            debug_assert_eq!(nodes, self.nodes);
            for (k, s) in state.iter_mut().enumerate() {
                *s += profiles[from][k] - profiles[to][k];
            }
        }
    }
}

/// Cohen–Grossberg dynamics
/// `r_iΔu_i − a_i(u_i)[b_i(u_i) − Σc_ij f_j(u_j) − Σd_ij g_j(u_j(t−τ)) + I_i]`.
pub struct CgDynamics<'a> {
    cg: &'a CGSystem,
}

impl<'a> CgDynamics<'a> {
    pub fn new(cg: &'a CGSystem) -> Result<Self> {
        cg.validate()?;
        Ok(Self { cg })
    }
}

impl Dynamics for CgDynamics<'_> {
    fn dim(&self) -> usize {
        self.cg.dim()
    }

    fn mode_count(&self) -> usize {
        1
    }

    fn diffusion(&self, _mode: usize) -> &[f64] {
        &self.cg.r
    }

    fn tau_max(&self) -> f64 {
        self.cg.tau
    }

    fn delay(&self, _t: f64) -> f64 {
        self.cg.tau
    }

    fn reaction(&self, _mode: usize, _node: usize, u: &[f64], delayed: &[f64], out: &mut [f64], scratch: &mut [f64]) {
        let n = u.len();
        let cg = self.cg;
        let (fu, gd) = scratch.split_at_mut(n);
        for j in 0..n {
            fu[j] = cg.f[j].eval(u[j]);
            gd[j] = cg.g[j].eval(delayed[j]);
        }
        for i in 0..n {
            let mut bracket = cg.behaved[i].eval(u[i]) + cg.inputs[i];
            for j in 0..n {
                bracket -= cg.c[(i, j)] * fu[j] + cg.d[(i, j)] * gd[j];
            }
            out[i] = -cg.amplification[i].eval(u[i]) * bracket;
        }
    }
}

/// `u_i(t⁺) = m_i u_i(t⁻) + Σ_j n_ij h_j(u_j(t⁻ − τ))`.
#[derive(Clone, Debug, PartialEq)]
pub struct ImpulseMap {
    pub m: Vec<f64>,
    pub n: DMatrix<f64>,
    pub h: Vec<ScalarActivation>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ImpulseSchedule {
    pub times: Vec<f64>,
    pub map: ImpulseMap,
    /// Delay used in the impulse's memory term.
    pub tau: f64,
}

/// Applies the impulse map to the component-major state `u` at time `t`,
/// reading `u(t − τ)` from `history`.
pub fn apply_impulse(u: &[f64], nodes: usize, map: &ImpulseMap, history: &History, t: f64, tau: f64) -> Result<Vec<f64>> {
    let n = map.m.len();
    if u.len() != n * nodes {
        return Err(Error::DimensionMismatch { expected: n * nodes, found: u.len() });
    }
    let mut delayed = vec![0.0; u.len()];
    history.lookup(t - tau, &mut delayed)?;
    let mut out = vec![0.0; u.len()];
    for node in 0..nodes {
        for i in 0..n {
            let mut s = map.m[i] * u[i * nodes + node];
            for j in 0..n {
                let nij = map.n[(i, j)];
                if nij != 0.0 {
                    s += nij * map.h[j].eval(delayed[j * nodes + node]);
                }
            }
            out[i * nodes + node] = s;
        }
    }
    Ok(out)
}

/// How a mode's quadratic form is scored against a field.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SwitchingForm {
    /// `∫ uᵀ Q_σ u dx`.
    #[default]
    Integrated,
    /// `max_x u(x)ᵀ Q_σ u(x)`: a mode is acceptable only if every node lies
    /// in its region.
    Pointwise,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SwitchingConfig {
    pub enabled: bool,
    /// Evaluate the law every `cadence` steps.
    pub cadence: usize,
    /// Keep the current mode while its score is below `−hysteresis`.
    pub hysteresis: f64,
    pub form: SwitchingForm,
    /// `Q_σ` per mode; computed from the network's `γ`, `q` when absent.
    pub matrices: Option<Vec<DMatrix<f64>>>,
}

impl Default for SwitchingConfig {
    fn default() -> Self {
        Self { enabled: true, cadence: 1, hysteresis: 0.0, form: SwitchingForm::Integrated, matrices: None }
    }
}

impl SwitchingConfig {
    pub fn off() -> Self {
        Self { enabled: false, ..Self::default() }
    }
}

/// Scores `s_σ` of every mode on a component-major state.
pub fn switching_scores(state: &[f64], nodes: usize, weight: f64, q: &[DMatrix<f64>], form: SwitchingForm) -> Vec<f64> {
    let n = q.first().map_or(0, |m| m.nrows());
    let mut v = vec![0.0; n];
    q.iter()
        .map(|qm| {
            let mut acc = match form {
                SwitchingForm::Integrated => 0.0,
                SwitchingForm::Pointwise => f64::NEG_INFINITY,
            };
            for node in 0..nodes {
                for i in 0..n {
                    v[i] = state[i * nodes + node];
                }
                let mut quad = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        quad += v[i] * qm[(i, j)] * v[j];
                    }
                }
                match form {
                    SwitchingForm::Integrated => acc += quad,
                    SwitchingForm::Pointwise => acc = acc.max(quad),
                }
            }
            match form {
                SwitchingForm::Integrated => acc * weight,
                SwitchingForm::Pointwise => acc,
            }
        })
        .collect()
}

/// The minimum law with hysteresis: stay while the current score is below
/// `−hysteresis`, otherwise move to the smallest score, keeping the current
/// mode on ties and otherwise preferring the lowest index.
pub fn decide_from_scores(scores: &[f64], current: usize, hysteresis: f64) -> usize {
    if scores[current] < -hysteresis {
        return current;
    }
    let min = scores.iter().copied().fold(f64::INFINITY, f64::min);
    if scores[current] == min {
        return current;
    }
    scores.iter().position(|s| *s == min).unwrap_or(current)
}

/// Mode chosen by the switching law for the field `u`.
pub fn switching_decide(u: &VectorField, q: &[DMatrix<f64>], current: usize, hysteresis: f64, form: SwitchingForm) -> usize {
    let scores = switching_scores(u.values(), u.grid().len(), u.grid().cell_volume(), q, form);
    decide_from_scores(&scores, current, hysteresis)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub dt: f64,
    pub horizon: f64,
    pub initial_mode: usize,
    pub switching: SwitchingConfig,
    pub impulses: Option<ImpulseSchedule>,
    /// Record `V` every this many steps.
    pub record_every: usize,
    /// Keep a full state snapshot every this many steps.
    pub snapshot_every: Option<usize>,
    /// Abort once `‖u‖` exceeds this multiple of `‖φ‖_τ`.
    pub blowup_factor: f64,
}

impl SimConfig {
    pub fn new(dt: f64, horizon: f64) -> Self {
        Self {
            dt,
            horizon,
            initial_mode: 0,
            switching: SwitchingConfig::default(),
            impulses: None,
            record_every: 1,
            snapshot_every: None,
            blowup_factor: 1e6,
        }
    }

    /// `τ/100`, or `10⁻³` without delay.
    pub fn default_dt(tau: f64) -> f64 {
        if tau > 0.0 {
            tau / 100.0
        } else {
            1e-3
        }
    }

    fn validate(&self, tau: f64, modes: usize) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("Δt must be positive, got {}", self.dt)));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::InvalidParameter(format!("horizon must be positive, got {}", self.horizon)));
        }
        if tau > 0.0 && self.dt > tau {
            return Err(Error::InvalidParameter(format!("Δt = {} exceeds the delay bound {tau}", self.dt)));
        }
        if self.initial_mode >= modes {
            return Err(Error::InvalidParameter(format!("initial mode {} out of range", self.initial_mode)));
        }
        if self.record_every == 0 || self.switching.cadence == 0 || self.snapshot_every == Some(0) {
            return Err(Error::InvalidParameter("cadences must be positive".into()));
        }
        if !(self.switching.hysteresis >= 0.0) {
            return Err(Error::InvalidParameter("hysteresis must be >= 0".into()));
        }
        Ok(())
    }
}

/// Recorded output of a run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// `V(t) = ‖u(t)‖²`.
    pub v: Vec<f64>,
    /// Active mode (zero-based) after each recorded step.
    pub modes: Vec<usize>,
    /// Cumulative number of switches at each recorded step.
    pub switches: Vec<usize>,
    #[serde(skip)]
    pub snapshots: Vec<(f64, Vec<f64>)>,
    #[serde(skip)]
    pub final_state: Vec<f64>,
    pub nodes: usize,
    pub dim: usize,
    /// `‖φ‖_τ`, the largest norm over the initial history.
    pub initial_norm: f64,
    pub dt: f64,
}

impl Trajectory {
    pub fn switch_count(&self) -> usize {
        self.switches.last().copied().unwrap_or(0)
    }

    pub fn decay(&self, window_fraction: f64) -> Result<DecayEstimate> {
        fit_decay(&self.times, &self.v, window_fraction)
    }

    /// CSV with columns `t,V,sqrtV,mode,switches_so_far`; modes are
    /// reported one-based.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,V,sqrtV,mode,switches_so_far")?;
        for k in 0..self.times.len() {
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e},{},{}",
                self.times[k],
                self.v[k],
                self.v[k].sqrt(),
                self.modes[k] + 1,
                self.switches[k]
            )?;
        }
        Ok(())
    }

    /// Two-column `t ‖u‖` file for plotting.
    pub fn write_decay_columns<W: Write>(&self, mut w: W) -> Result<()> {
        for (t, v) in self.times.iter().zip(&self.v) {
            writeln!(w, "{:.16e} {:.16e}", t, v.sqrt())?;
        }
        Ok(())
    }
}

fn sample_history(initial: &InitialHistory, space: &Space, n: usize, s: f64) -> Vec<f64> {
    let nodes = space.nodes();
    let mut out = vec![0.0; n * nodes];
    for node in 0..nodes {
        let x = space.coords(node);
        for i in 0..n {
            out[i * nodes + node] = initial.eval(s, x, i);
        }
    }
    out
}

/// Runs the IMEX loop for any [`Dynamics`].
pub fn integrate<D: Dynamics>(
    dynamics: &D,
    space: &Space,
    config: &SimConfig,
    initial: &InitialHistory,
    switching_matrices: Option<&[DMatrix<f64>]>,
) -> Result<Trajectory> {
    let n = dynamics.dim();
    let tau = dynamics.tau_max();
    config.validate(tau, dynamics.mode_count())?;
    let nodes = space.nodes();
    let len = n * nodes;
    let dt = config.dt;

    // initial history on s = −K·Δt, …, 0
    let k_hist = if tau > 0.0 { (tau / dt - 1e-9).ceil() as usize } else { 0 };
    let mut history = History::new(tau + dt)?;
    let mut initial_norm = 0.0f64;
    let frozen = initial.is_time_invariant().then(|| sample_history(initial, space, n, 0.0));
    for k in 0..=k_hist {
        let s = (k as f64 - k_hist as f64) * dt;
        let sample = frozen.clone().unwrap_or_else(|| sample_history(initial, space, n, s));
        if sample.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("initial history at s = {s}")));
        }
        initial_norm = initial_norm.max(space.norm_sq(&sample).sqrt());
        history.push(s, sample)?;
    }
    let guard = config.blowup_factor * if initial_norm > 0.0 { initial_norm } else { 1.0 };

    // one factorization per distinct diffusion coefficient
    let mut solvers: HashMap<u64, HelmholtzSolver> = HashMap::new();
    if let Space::Grid(grid) = space {
        for mode in 0..dynamics.mode_count() {
            for &d in dynamics.diffusion(mode) {
                if d > 0.0 {
                    if let std::collections::hash_map::Entry::Vacant(e) = solvers.entry(d.to_bits()) {
                        e.insert(HelmholtzSolver::new(grid, 1.0 / (dt * d))?);
                    }
                }
            }
        }
    }

    let matrices = if config.switching.enabled && dynamics.mode_count() > 1 {
        let m = switching_matrices
            .ok_or_else(|| Error::InvalidParameter("switching needs one Q matrix per mode".into()))?;
        if m.len() != dynamics.mode_count() {
            return Err(Error::DimensionMismatch { expected: dynamics.mode_count(), found: m.len() });
        }
        Some(m)
    } else {
        None
    };

    let mut state = history.newest().expect("history was filled").to_vec();
    let mut mode = config.initial_mode;
    let mut switches = 0usize;
    if let Some(q) = matrices {
        let scores = switching_scores(&state, nodes, space.weight(), q, config.switching.form);
        let next = decide_from_scores(&scores, mode, config.switching.hysteresis);
        if next != mode {
            dynamics.on_switch(mode, next, &mut state, nodes);
            history.replace_newest(state.clone())?;
            mode = next;
        }
    }

    let steps = (config.horizon / dt).round().max(1.0) as usize;
    let expected = steps / config.record_every + 2;
    let mut traj = Trajectory {
        times: Vec::with_capacity(expected),
        v: Vec::with_capacity(expected),
        modes: Vec::with_capacity(expected),
        switches: Vec::with_capacity(expected),
        snapshots: Vec::new(),
        final_state: Vec::new(),
        nodes,
        dim: n,
        initial_norm,
        dt,
    };
    let record = |traj: &mut Trajectory, t: f64, state: &[f64], mode: usize, switches: usize| {
        traj.times.push(t);
        traj.v.push(space.norm_sq(state));
        traj.modes.push(mode);
        traj.switches.push(switches);
    };
    record(&mut traj, 0.0, &state, mode, switches);
    if config.snapshot_every.is_some() {
        traj.snapshots.push((0.0, state.clone()));
    }

    let mut impulse_times: Vec<f64> = config.impulses.as_ref().map(|s| s.times.clone()).unwrap_or_default();
    impulse_times.sort_by(f64::total_cmp);
    let mut next_impulse = impulse_times.partition_point(|t| *t <= 0.0);

    let mut delayed = vec![0.0; len];
    let mut rhs = vec![0.0; len];
    let mut u_node = vec![0.0; n];
    let mut d_node = vec![0.0; n];
    let mut r_node = vec![0.0; n];
    let mut scratch = vec![0.0; 2 * n];
    for k in 0..steps {
        let t = k as f64 * dt;
        let tau_t = dynamics.delay(t);
        history.lookup(t - tau_t, &mut delayed)?;
        for node in 0..nodes {
            for i in 0..n {
                u_node[i] = state[i * nodes + node];
                d_node[i] = delayed[i * nodes + node];
            }
            dynamics.reaction(mode, node, &u_node, &d_node, &mut r_node, &mut scratch);
            for i in 0..n {
                rhs[i * nodes + node] = u_node[i] + dt * r_node[i];
            }
        }
        if let Space::Grid(_) = space {
            let diffusion = dynamics.diffusion(mode);
            for i in 0..n {
                let d = diffusion[i];
                if d > 0.0 {
                    let block = &mut rhs[i * nodes..(i + 1) * nodes];
                    let scale = 1.0 / (dt * d);
                    block.iter_mut().for_each(|x| *x *= scale);
                    solvers[&d.to_bits()].solve_in_place(block);
                }
            }
        }
        std::mem::swap(&mut state, &mut rhs);
        let t_new = (k + 1) as f64 * dt;
        history.push(t_new, state.clone())?;

        if let Some(schedule) = &config.impulses {
            while next_impulse < impulse_times.len() && impulse_times[next_impulse] <= t_new + 1e-12 * t_new.max(1.0) {
                state = apply_impulse(&state, nodes, &schedule.map, &history, t_new, schedule.tau)?;
                history.replace_newest(state.clone())?;
                next_impulse += 1;
            }
        }

        let norm_sq = space.norm_sq(&state);
        if !norm_sq.is_finite() || norm_sq.sqrt() > guard {
            return Err(Error::BlowUp { time: t_new, norm: norm_sq.sqrt(), guard });
        }

        if let Some(q) = matrices {
            if (k + 1) % config.switching.cadence == 0 {
                let scores = switching_scores(&state, nodes, space.weight(), q, config.switching.form);
                let next = decide_from_scores(&scores, mode, config.switching.hysteresis);
                if next != mode {
                    dynamics.on_switch(mode, next, &mut state, nodes);
                    history.replace_newest(state.clone())?;
                    mode = next;
                    switches += 1;
                }
            }
        }

        if (k + 1) % config.record_every == 0 || k + 1 == steps {
            record(&mut traj, t_new, &state, mode, switches);
        }
        if let Some(every) = config.snapshot_every {
            if (k + 1) % every == 0 || k + 1 == steps {
                traj.snapshots.push((t_new, state.clone()));
            }
        }
    }
    traj.final_state = state;
    Ok(traj)
}

/// Stationary profile of one mode on `grid`, flattened component-major,
/// for use as [`Reference::Shared`].
pub fn stationary_reference(network: &SwitchedNetwork, grid: &Grid, mode: usize, options: &FixedPointOptions) -> Result<Vec<f64>> {
    let common = network.on_common_domain(*grid.domain())?;
    let m = common
        .modes
        .get(mode)
        .cloned()
        .ok_or_else(|| Error::InvalidParameter(format!("mode {mode} out of range")))?;
    let problem = StationaryProblem::new(m, common.activation.clone(), *grid)?;
    let (field, _) = fixed_point_solve(&problem, &VectorField::zeros(grid, common.dim()), options)?;
    Ok(field.into_values())
}

/// Integrates a switched network on a grid. Modes are moved onto the
/// grid's domain for the switching matrices, so each `λ_σ1` becomes the
/// first eigenvalue of the common domain.
pub fn simulate(
    network: &SwitchedNetwork,
    grid: &Grid,
    form: StateForm,
    config: &SimConfig,
    initial: &InitialHistory,
) -> Result<Trajectory> {
    let common = network.on_common_domain(*grid.domain())?;
    let dynamics = NetworkDynamics::new(&common, form, grid.len())?;
    let q = config.switching.matrices.clone().unwrap_or_else(|| mode_matrices(&common, common.gamma, common.q));
    integrate(&dynamics, &Space::Grid(*grid), config, initial, Some(&q))
}

/// The spatially lumped network: same stepping with diffusion removed.
pub fn simulate_ode(network: &SwitchedNetwork, form: StateForm, config: &SimConfig, initial: &InitialHistory) -> Result<Trajectory> {
    let dynamics = NetworkDynamics::new(network, form, 1)?;
    let q = config.switching.matrices.clone().unwrap_or_else(|| mode_matrices(network, network.gamma, network.q));
    integrate(&dynamics, &Space::Lumped, config, initial, Some(&q))
}

/// Cohen–Grossberg system on a grid or lumped; the system's impulse times
/// and maps are used unless the config carries its own schedule.
pub fn simulate_cg(cg: &CGSystem, space: &Space, config: &SimConfig, initial: &InitialHistory) -> Result<Trajectory> {
    let dynamics = CgDynamics::new(cg)?;
    let mut config = config.clone();
    if config.impulses.is_none() && !cg.impulse_times.is_empty() {
        config.impulses = Some(ImpulseSchedule {
            times: cg.impulse_times.clone(),
            map: ImpulseMap { m: cg.m.clone(), n: cg.n_mat.clone(), h: cg.h.clone() },
            tau: cg.tau,
        });
    }
    integrate(&dynamics, space, &config, initial, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::RectDomain;
    use crate::model::{Activation, DelaySpec, Mode};
    use approx::assert_abs_diff_eq;

    fn scalar_network(d: f64, c: f64, a: f64, b: f64, j: f64, g: ScalarActivation, lip: f64, tau: f64) -> SwitchedNetwork {
        let mode = Mode::new(
            vec![d],
            vec![c],
            DMatrix::from_element(1, 1, a),
            DMatrix::from_element(1, 1, b),
            vec![j],
            RectDomain::interval(1.0).unwrap(),
        )
        .unwrap();
        let act = Activation::uniform(g, lip, 1).unwrap();
        SwitchedNetwork::new(vec![mode], act, tau, DelaySpec::Constant(tau), DMatrix::identity(1, 1), 1.00001, 0.5).unwrap()
    }

    #[test]
    fn scores_and_decision() {
        let q = vec![DMatrix::from_element(1, 1, 1.0), DMatrix::from_element(1, 1, -1.0)];
        let s = switching_scores(&[0.5, -0.2], 2, 0.1, &q, SwitchingForm::Integrated);
        assert_abs_diff_eq!(s[0], 0.1 * 0.29, epsilon = 1e-15);
        assert_eq!(decide_from_scores(&s, 0, 0.0), 1);
        let same = vec![q[0].clone(), q[0].clone(), q[0].clone()];
        let s = switching_scores(&[0.5, -0.2], 2, 0.1, &same, SwitchingForm::Integrated);
        assert_eq!(decide_from_scores(&s, 2, 0.0), 2);
        assert_eq!(decide_from_scores(&[0.0], 0, 0.0), 0);
        // hysteresis keeps a mode that is negative enough
        assert_eq!(decide_from_scores(&[-1.0, -5.0], 0, 0.5), 0);
        assert_eq!(decide_from_scores(&[-0.1, -5.0], 0, 0.5), 1);
    }

    #[test]
    fn impulse_maps() {
        let nodes = 5;
        let u: Vec<f64> = (0..nodes).map(|k| (k as f64 * 0.3).sin()).collect();
        let mut h = History::new(1.0).unwrap();
        h.push(0.0, u.clone()).unwrap();
        let id = ImpulseMap { m: vec![1.0], n: DMatrix::zeros(1, 1), h: vec![ScalarActivation::identity()] };
        assert_eq!(apply_impulse(&u, nodes, &id, &h, 0.0, 0.0).unwrap(), u);
        let reset = ImpulseMap { m: vec![0.0], ..id.clone() };
        assert!(apply_impulse(&u, nodes, &reset, &h, 0.0, 0.0).unwrap().iter().all(|x| *x == 0.0));
        let half = ImpulseMap { m: vec![0.5], ..id };
        let out = apply_impulse(&u, nodes, &half, &h, 0.0, 0.0).unwrap();
        for (o, x) in out.iter().zip(&u) {
            assert_eq!(*o, 0.5 * x);
        }
    }

    #[test]
    fn zero_data_stays_zero() {
        let net = scalar_network(0.1, 1.0, 0.3, 0.2, 0.0, ScalarActivation::Tanh { scale: 1.0 }, 1.0, 0.5);
        let grid = Grid::uniform(RectDomain::interval(1.0).unwrap(), 40).unwrap();
        let tr = simulate(&net, &grid, StateForm::Deviation(Reference::Zero), &SimConfig::new(0.01, 2.0), &InitialHistory::zero())
            .unwrap();
        assert!(tr.v.iter().all(|v| *v == 0.0));
        assert_eq!(tr.decay(0.5).unwrap().rate, f64::INFINITY);
    }

    #[test]
    fn heat_equation_rate() {
        let (d, c) = (0.05, 0.7);
        let net = scalar_network(d, c, 0.0, 0.0, 0.0, ScalarActivation::identity(), 1.0, 0.0);
        let grid = Grid::uniform(RectDomain::interval(1.0).unwrap(), 63).unwrap();
        let init = InitialHistory::first_mode(vec![1.0], vec![1.0]);
        let tr = simulate(&net, &grid, StateForm::Deviation(Reference::Zero), &SimConfig::new(1e-3, 3.0), &init).unwrap();
        let est = tr.decay(0.5).unwrap();
        let exact = d * std::f64::consts::PI.powi(2) + c;
        assert!((est.rate - exact).abs() < 0.01 * exact, "{} vs {exact}", est.rate);
        assert!(est.r_squared > 0.999);
    }

    #[test]
    fn scalar_ode_rate_one() {
        let net = scalar_network(1.0, 1.0, 0.0, 0.0, 0.0, ScalarActivation::identity(), 1.0, 0.0);
        let tr = simulate_ode(&net, StateForm::Absolute, &SimConfig::new(1e-3, 5.0), &InitialHistory::constant(vec![2.0]))
            .unwrap();
        let est = tr.decay(0.8).unwrap();
        assert!((est.rate - 1.0).abs() < 0.01);
    }

    #[test]
    fn statement1_ode_equilibrium() {
        let net = scalar_network(0.001, 1.8, 0.2, 0.1, 1.09, ScalarActivation::Affine { slope: 0.05, offset: -0.3 }, 0.05, 1.0);
        let tr = simulate_ode(&net, StateForm::Absolute, &SimConfig::new(0.01, 20.0), &InitialHistory::constant(vec![3.0]))
            .unwrap();
        assert!((tr.final_state[0] - 200.0 / 357.0).abs() < 1e-6);
    }

    #[test]
    fn blow_up_is_reported() {
        let net = scalar_network(1e-3, 0.1, 5.0, 0.0, 0.0, ScalarActivation::identity(), 1.0, 0.0);
        let cfg = SimConfig { blowup_factor: 10.0, ..SimConfig::new(1e-2, 50.0) };
        assert!(matches!(
            simulate_ode(&net, StateForm::Absolute, &cfg, &InitialHistory::constant(vec![1.0])),
            Err(Error::BlowUp { .. })
        ));
    }

    #[test]
    fn dt_above_delay_rejected() {
        let net = scalar_network(1.0, 1.0, 0.0, 0.1, 0.0, ScalarActivation::identity(), 1.0, 0.01);
        assert!(simulate_ode(&net, StateForm::Absolute, &SimConfig::new(0.1, 1.0), &InitialHistory::zero()).is_err());
    }

    #[test]
    fn csv_has_header_and_rows() {
        let net = scalar_network(1.0, 1.0, 0.0, 0.0, 0.0, ScalarActivation::identity(), 1.0, 0.0);
        let tr = simulate_ode(&net, StateForm::Absolute, &SimConfig::new(0.1, 1.0), &InitialHistory::constant(vec![1.0]))
            .unwrap();
        let mut buf = Vec::new();
        tr.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,V,sqrtV,mode,switches_so_far");
        assert_eq!(lines.len(), 12);
        assert!(lines[1].starts_with("0.0000000000000000e0,1.0000000000000000e0"));
    }

    #[test]
    fn cg_impulse_halves_state() {
        let act = Activation::uniform(ScalarActivation::identity(), 1.0, 1).unwrap();
        let mut cg = CGSystem::cellular(vec![1e-9], DMatrix::zeros(1, 1), DMatrix::zeros(1, 1), &act, vec![0.0], vec![0.0], 0.1)
            .unwrap();
        cg.impulse_times = vec![0.5];
        cg.m = vec![0.5];
        let tr = simulate_cg(&cg, &Space::Lumped, &SimConfig::new(0.01, 1.0), &InitialHistory::constant(vec![1.0])).unwrap();
        assert!((tr.final_state[0] - 0.5).abs() < 1e-6);
        let grid = Grid::uniform(RectDomain::interval(1.0).unwrap(), 20).unwrap();
        let init = InitialHistory::first_mode(vec![1.0], vec![1.0]);
        let tr = simulate_cg(&cg, &Space::Grid(grid), &SimConfig::new(0.01, 1.0), &init).unwrap();
        let ratio = tr.v.last().unwrap() / tr.v[0];
        assert!((ratio - 0.25).abs() < 1e-3, "{ratio}");
        assert!(tr.final_state.iter().all(|x| x.is_finite()));
    }
}
