//! Command-line front end.
//!
//! Exit codes: `0` success, `1` infeasible certificate or failed stage,
//! `2` unreadable input (bad arguments, malformed or unsupported documents).
//! Outputs go to `--out`, else `$RDNET_OUT_DIR`, else `./rdnet-out`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::certificates::{
    cg_check_c1, cg_rates, check_corollary34, check_uniqueness_a3, search_certificate, solve_lambda,
    verify_certificate, PChoice, SearchOptions, SearchOutcome,
};
use crate::document::{preset_document, SystemDocument};
use crate::error::Error;
use crate::geometry::{eigenfunction, first_eigenvalue, l2_norm, Grid, GridFunction, RectDomain, ScalarField, VectorField};
use crate::initial::InitialHistory;
use crate::model::{DelaySpec, SampledChecker, SwitchedNetwork};
use crate::presets::{self, example35, statement1, statement2, tolerances as tol};
use crate::simulator::{
    simulate, simulate_cg, simulate_ode, stationary_reference, Reference, SimConfig, Space, StateForm,
    SwitchingConfig, SwitchingForm, Trajectory,
};
use crate::stationary::{
    find_stationary_multiplicity, fixed_point_solve, functional_for, helmholtz_unit_source_profile, residual,
    statement1_profile, variational_minimize, FixedPointOptions, MinimizeOptions, SolverForm, StationaryProblem,
};

/// Output directory used when neither `--out` nor the environment sets one.
pub const DEFAULT_OUT_DIR: &str = "rdnet-out";
pub const OUT_DIR_ENV: &str = "RDNET_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "rdnet", version, about = "Switched delayed reaction-diffusion networks: certificates, stationary solutions, simulation")]
pub struct Cli {
    /// Output directory (overrides $RDNET_OUT_DIR).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for every sampled check.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Verify or search a stability certificate.
    Certify(CertifyArgs),
    /// Compute stationary solutions of one mode.
    Stationary(StationaryArgs),
    /// Integrate the switched delayed system and fit its decay rate.
    Simulate(SimulateArgs),
    /// Rerun a built-in benchmark and compare with published values.
    Reproduce(ReproduceArgs),
    /// Print a built-in system as a JSON document.
    Preset(PresetArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct CertifyArgs {
    /// System document path, or `preset:NAME`.
    pub system: String,
    /// Simplex weights, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub beta: Option<Vec<f64>>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    /// Search the simplex lattice instead of verifying one point.
    #[arg(long)]
    pub search: bool,
    /// Cap the searched γ at λ_min(Ψ) and require it for success.
    #[arg(long)]
    pub honor_theorem: bool,
    #[arg(long)]
    pub beta_step: Option<f64>,
    #[arg(long, default_value_t = 10.0)]
    pub gamma_cap: f64,
    /// Samples for the activation Lipschitz check.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    /// Half width of the sampled box.
    #[arg(long, default_value_t = 100.0)]
    pub box_half_width: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverChoice {
    Helmholtz,
    InverseLaplacian,
    Variational,
    Multiplicity,
}

#[derive(Debug, Args, Serialize)]
pub struct StationaryArgs {
    pub system: String,
    #[arg(long, value_enum, default_value = "helmholtz")]
    pub solver: SolverChoice,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Multiples of the sup-normalized first eigenfunction used as inits.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub inits: Option<Vec<f64>>,
    /// Interior nodes per axis.
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Mode to solve (1-based).
    #[arg(long, default_value_t = 1)]
    pub mode: usize,
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FormChoice {
    /// Deviation from the initial mode's stationary solution.
    Deviation,
    /// Deviation with `f(u) = g(u) − g(0)`.
    DeviationZero,
    Absolute,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OnOff {
    On,
    Off,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionChoice {
    Integrated,
    Pointwise,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    pub system: String,
    /// Time horizon.
    #[arg(long = "T", visible_alias = "horizon", default_value_t = 20.0)]
    pub horizon: f64,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Replace the delay by this constant.
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long, value_enum, default_value = "on")]
    pub switching: OnOff,
    #[arg(long, value_enum, default_value = "integrated")]
    pub region: RegionChoice,
    #[arg(long, default_value_t = 0.0)]
    pub hysteresis: f64,
    /// Write a field snapshot every this many steps.
    #[arg(long)]
    pub snapshots: Option<usize>,
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long, value_enum, default_value = "deviation")]
    pub form: FormChoice,
    /// Trailing fraction of the run used for the decay fit.
    #[arg(long, default_value_t = 0.5)]
    pub window: f64,
    #[arg(long, default_value_t = 1)]
    pub record_every: usize,
    /// Mode active at t = 0 (1-based).
    #[arg(long, default_value_t = 1)]
    pub initial_mode: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Target {
    #[value(name = "example4_1")]
    #[serde(rename = "example4_1")]
    Example41,
    #[value(name = "statement1")]
    #[serde(rename = "statement1")]
    Statement1,
    #[value(name = "example3_5")]
    #[serde(rename = "example3_5")]
    Example35,
    #[value(name = "statement2")]
    #[serde(rename = "statement2")]
    Statement2,
    #[value(name = "tables")]
    #[serde(rename = "tables")]
    Tables,
}

#[derive(Debug, Args, Serialize)]
pub struct ReproduceArgs {
    #[arg(value_enum)]
    pub target: Target,
    /// Case of the three-mode example (all three when omitted).
    #[arg(long)]
    pub case: Option<u8>,
    /// Interior nodes per axis for PDE stages.
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Skip the time-integration stages.
    #[arg(long)]
    pub no_simulation: bool,
}

#[derive(Debug, Args)]
pub struct PresetArgs {
    /// Preset name; omit to list them.
    pub name: Option<String>,
}

/// Audit record written as `manifest.json` next to every report.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub schema_version: u32,
    /// Document path or `preset:NAME`.
    pub system: String,
    pub command: String,
    pub output_dir: PathBuf,
    pub seed: u64,
    /// Every command-line option after defaults were applied.
    pub overrides: Value,
    pub tool_version: String,
}

impl RunManifest {
    pub fn new(system: &str, command: &str, output_dir: &Path, seed: u64, overrides: Value) -> Self {
        Self {
            schema_version: crate::document::SCHEMA_VERSION,
            system: system.into(),
            command: command.into(),
            output_dir: output_dir.to_path_buf(),
            seed,
            overrides,
            tool_version: env!("CARGO_PKG_VERSION").into(),
        }
    }

    fn write(&self) -> std::io::Result<()> {
        write_json(&self.output_dir.join("manifest.json"), &to_json(self))
    }
}

enum Failure {
    /// Exit code 2.
    Input(String),
    /// Exit code 1.
    Failed(String),
}

impl Failure {
    fn input(e: impl std::fmt::Display) -> Self {
        Self::Input(e.to_string())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::SchemaVersion(_) => Self::Input(e.to_string()),
            other => Self::Failed(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::Failed(e.to_string())
    }
}

type Outcome = std::result::Result<i32, Failure>;

/// Parses `args` (including the program name) and runs the command, writing
/// human-readable output to `stdout`. Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = write!(stdout, "{}", e.render());
            return code;
        }
    };
    let out_dir = resolve_out_dir(cli.out.clone());
    let result = match &cli.command {
        Command::Certify(a) => certify(a, cli.seed, &out_dir, stdout),
        Command::Stationary(a) => stationary(a, cli.seed, &out_dir, stdout),
        Command::Simulate(a) => simulate_cmd(a, cli.seed, &out_dir, stdout),
        Command::Reproduce(a) => reproduce(a, cli.seed, &out_dir, stdout),
        Command::Preset(a) => preset(a, stdout),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Input(msg)) => {
            let _ = writeln!(stdout, "error: {msg}");
            2
        }
        Err(Failure::Failed(msg)) => {
            let _ = writeln!(stdout, "failed: {msg}");
            1
        }
    }
}

pub fn resolve_out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

/// Reads `preset:NAME` or a document file.
fn load_system(spec: &str) -> std::result::Result<SystemDocument, Failure> {
    let doc = match spec.strip_prefix("preset:") {
        Some(name) => preset_document(name).map_err(Failure::input)?,
        None => SystemDocument::load(Path::new(spec)).map_err(|e| Failure::Input(format!("{spec}: {e}")))?,
    };
    doc.network().map_err(|e| Failure::Input(format!("{spec}: {e}")))?;
    Ok(doc)
}

fn system_label(doc: &SystemDocument, spec: &str) -> String {
    doc.name.clone().unwrap_or_else(|| {
        Path::new(spec).file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "system".into())
    })
}

fn prepare_dir(out: &Path, parts: &[&str]) -> std::io::Result<PathBuf> {
    let mut dir = out.to_path_buf();
    for p in parts {
        dir.push(p);
    }
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn write_json(path: &Path, value: &Value) -> std::io::Result<()> {
    fs::write(path, serde_json::to_string_pretty(value).expect("serializable") + "\n")
}

/// `x[,y],component,value` rows for every interior node.
fn field_csv(grid: &Grid, components: usize, values: &[f64]) -> String {
    let mut s = String::new();
    let nodes = grid.len();
    s.push_str(if grid.dims() == 2 { "x,y,component,value\n" } else { "x,component,value\n" });
    for c in 0..components {
        for m in 0..nodes {
            let x = grid.coords(m);
            if grid.dims() == 2 {
                let _ = writeln!(s, "{:.16e},{:.16e},{},{:.16e}", x[0], x[1], c + 1, values[c * nodes + m]);
            } else {
                let _ = writeln!(s, "{:.16e},{},{:.16e}", x[0], c + 1, values[c * nodes + m]);
            }
        }
    }
    s
}

fn default_nodes(domain: &RectDomain) -> usize {
    if domain.dims() == 1 {
        401
    } else {
        101
    }
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn certify(a: &CertifyArgs, seed: u64, out: &Path, stdout: &mut dyn Write) -> Outcome {
    let doc = load_system(&a.system)?;
    let network = doc.network()?;
    let label = system_label(&doc, &a.system);
    let q = a.q.or(doc.certificate.as_ref().map(|c| c.q)).unwrap_or(network.q);
    let beta = a.beta.clone().or(doc.certificate.as_ref().map(|c| c.beta.clone()));
    let mut report = json!({
        "command": "certify",
        "system": to_json(&doc),
        "options": to_json(a),
        "seed": seed,
    });

    let (feasible, summary) = if a.search || beta.is_none() {
        let options = SearchOptions {
            beta_step: a.beta_step,
            gamma_cap: a.gamma_cap,
            q,
            honor_theorem_constraint: a.honor_theorem,
            ..SearchOptions::default()
        };
        let outcome = search_certificate(&network, &options)?;
        let (ok, text) = match &outcome {
            SearchOutcome::Feasible(c) => (
                c.feasible && (!a.honor_theorem || c.theorem_constraint_ok),
                format!(
                    "search: feasible beta={:?} gamma={:.6} margin={:.6e} rate={:.6}",
                    c.beta,
                    c.gamma,
                    c.margin,
                    c.rate.unwrap_or(f64::NAN)
                ),
            ),
            SearchOutcome::Infeasible { least_margin, beta, lattice_points } => (
                false,
                format!("search: infeasible over {lattice_points} lattice points, least margin {least_margin:.6e} at beta={beta:?}"),
            ),
        };
        report["search"] = to_json(&outcome);
        (ok, text)
    } else {
        let beta = beta.clone().expect("checked above");
        let gamma = a.gamma.or(doc.certificate.as_ref().map(|c| c.gamma)).unwrap_or(network.gamma);
        let c = verify_certificate(&network, &beta, gamma, q)?;
        let ok = c.feasible && (!a.honor_theorem || c.theorem_constraint_ok);
        let text = format!(
            "verify: feasible={} margin={:.6e} rate={} gamma<lambda_min(Psi)={}",
            c.feasible,
            c.margin,
            c.rate.map_or("-".to_string(), |r| format!("{r:.6}")),
            c.theorem_constraint_ok
        );
        report["certificate"] = to_json(&c);
        (ok, text)
    };

    let bounds = vec![(-a.box_half_width, a.box_half_width); network.dim()];
    let mut checker = SampledChecker::new(a.samples, seed);
    let a1 = checker.check_a1(&network.activation, &bounds)?;
    report["lipschitz_check"] = to_json(&a1);
    report["feasible"] = json!(feasible);

    let dir = prepare_dir(out, &["certify", &label])?;
    let manifest = RunManifest::new(&a.system, "certify", &dir, seed, to_json(a));
    manifest.write()?;
    report["manifest"] = to_json(&manifest);
    report["resolved"] = json!({ "q": q, "beta": beta, "box": bounds });
    write_json(&dir.join("report.json"), &report)?;
    writeln!(stdout, "{label}: {summary}")?;
    writeln!(stdout, "activation Lipschitz check on box: holds={} worst ratio={:?}", a1.holds, a1.worst_ratio)?;
    writeln!(stdout, "report: {}", dir.join("report.json").display())?;
    Ok(if feasible { 0 } else { 1 })
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn normalized_first_mode(grid: &Grid) -> std::result::Result<ScalarField, Failure> {
    let k = vec![1; grid.dims()];
    let (phi, _) = eigenfunction(grid, &k)?;
    let s = phi.sup_norm();
    Ok(phi.scaled(1.0 / s))
}

fn stationary(a: &StationaryArgs, seed: u64, out: &Path, stdout: &mut dyn Write) -> Outcome {
    let doc = load_system(&a.system)?;
    let network = doc.network()?;
    let label = system_label(&doc, &a.system);
    let mode = network
        .modes
        .get(a.mode.wrapping_sub(1))
        .cloned()
        .ok_or_else(|| Failure::Input(format!("mode {} out of range 1..={}", a.mode, network.mode_count())))?;
    let domain = mode.domain;
    let grid = match a.nodes {
        Some(n) => Grid::uniform(domain, n)?,
        None => doc.grid_on(domain, default_nodes(&domain))?,
    };
    let problem = StationaryProblem::new(mode.clone(), network.activation.clone(), grid)?;
    let n = problem.dim();
    let dir = prepare_dir(out, &["stationary", &label])?;
    let manifest = RunManifest::new(&a.system, "stationary", &dir, seed, to_json(a));
    manifest.write()?;
    let mut report = json!({
        "command": "stationary",
        "manifest": to_json(&manifest),
        "system": to_json(&doc),
        "options": to_json(a),
        "grid": { "counts": grid.counts(), "spacing": grid.spacing() },
    });
    let uniqueness = check_uniqueness_a3(std::slice::from_ref(&mode), &network.activation.lipschitz, 1.0, &PChoice::Auto)?;
    report["uniqueness_check_eps1_auto_p"] = to_json(&uniqueness);

    let phi = normalized_first_mode(&grid)?;
    let init_field = |t: f64| -> VectorField {
        let parts: Vec<ScalarField> = (0..n).map(|_| phi.scaled(t)).collect();
        VectorField::from_components(&parts).expect("same grid")
    };

    match a.solver {
        SolverChoice::Helmholtz | SolverChoice::InverseLaplacian => {
            let options = FixedPointOptions {
                tol: a.tol.unwrap_or(1e-8),
                max_iter: a.max_iter,
                form: if a.solver == SolverChoice::Helmholtz { SolverForm::Helmholtz } else { SolverForm::InverseLaplacian },
            };
            let inits: Vec<VectorField> = match &a.inits {
                Some(ts) => ts.iter().map(|t| init_field(*t)).collect(),
                None => vec![VectorField::zeros(&grid, n)],
            };
            let mut solutions = Vec::new();
            for init in &inits {
                solutions.push(fixed_point_solve(&problem, init, &options)?);
            }
            let (y, rep) = &solutions[0];
            let spread = solutions.iter().map(|(s, _)| sup_diff(s.values(), y.values())).fold(0.0, f64::max);
            let min = y.values().iter().copied().fold(f64::INFINITY, f64::min);
            let max = y.values().iter().copied().fold(f64::NEG_INFINITY, f64::max);
            report["fixed_point"] = to_json(rep);
            report["solution"] = json!({
                "sup_norm": y.sup_norm(), "min": min, "max": max,
                "nonconstant": max - min > 0.0,
                "spread_across_inits": spread,
            });
            writeln!(
                stdout,
                "{label}: {} iterations, residual {:.3e}, sup norm {:.6}, min {:.6}, spread across inits {:.3e}",
                rep.iterations,
                rep.residual,
                y.sup_norm(),
                min,
                spread
            )?;
            if n == 1 && grid.dims() == 1 && domain.lengths()[0] == 1.0 {
                compare_closed_forms(&label, &grid, y.values(), &mut report, stdout)?;
            }
            fs::write(dir.join("field.csv"), field_csv(&grid, n, y.values()))?;
        }
        SolverChoice::Variational => {
            let functional = functional_for(&problem)?;
            let options = MinimizeOptions { tol: a.tol.unwrap_or(1e-8), max_iter: a.max_iter, ..Default::default() };
            let t0 = a.inits.as_ref().and_then(|v| v.first().copied()).unwrap_or(0.0);
            let (u, rep) = variational_minimize(&functional, &phi.scaled(t0), &options)?;
            let y = VectorField::from_components(std::slice::from_ref(&u))?;
            let res = residual(&problem, &y)?;
            report["minimize"] = to_json(&rep);
            report["residual"] = json!(res);
            writeln!(
                stdout,
                "{label}: {} iterations, gradient norm {:.3e}, energy {:.9}, residual {:.3e}",
                rep.iterations, rep.gradient_norm, rep.energy, res
            )?;
            if grid.dims() == 1 && domain.lengths()[0] == 1.0 {
                compare_closed_forms(&label, &grid, u.values(), &mut report, stdout)?;
            }
            fs::write(dir.join("field.csv"), field_csv(&grid, 1, u.values()))?;
        }
        SolverChoice::Multiplicity => {
            let functional = functional_for(&problem)?;
            let h = grid.h_max();
            let lambda1 = mode.lambda1;
            let tol = a.tol.unwrap_or(5.0 * h * h * lambda1 * lambda1);
            let options = MinimizeOptions { tol, max_iter: a.max_iter, ..Default::default() };
            let ts = a.inits.clone().unwrap_or_else(|| vec![0.5, -0.5, 0.0]);
            let inits: Vec<ScalarField> = ts.iter().map(|t| phi.scaled(*t)).collect();
            let rep = find_stationary_multiplicity(&functional, &inits, &options)?;
            for (k, s) in rep.solutions.iter().enumerate() {
                fs::write(dir.join(format!("solution_{}.csv", k + 1)), field_csv(&grid, 1, s.field.values()))?;
            }
            report["multiplicity"] = to_json(&rep);
            report["inits"] = json!(ts);
            report["gradient_tol"] = json!(tol);
            writeln!(stdout, "{label}: {} distinct solutions ({} nonzero)", rep.count(), rep.nonzero_count(1e-6))?;
            for s in &rep.solutions {
                writeln!(stdout, "  energy {:+.9}  L2 {:.6}  sup {:.6}  from inits {:?}", s.energy, s.l2_norm, s.sup_norm, s.from_inits)?;
            }
            if rep.solutions.is_empty() {
                write_json(&dir.join("report.json"), &report)?;
                return Err(Failure::Failed("no init converged".into()));
            }
        }
    }
    write_json(&dir.join("report.json"), &report)?;
    writeln!(stdout, "report: {}", dir.join("report.json").display())?;
    Ok(0)
}

/// Adds closed-form comparisons for the known scalar benchmarks.
fn compare_closed_forms(label: &str, grid: &Grid, values: &[f64], report: &mut Value, stdout: &mut dyn Write) -> Outcome {
    let exact: Option<(&str, Box<dyn Fn(f64) -> f64>)> = match label {
        "statement1" => Some(("sinh closed form", Box::new(statement1_profile))),
        "example3_5" => Some(("cosh closed form", Box::new(|x| helmholtz_unit_source_profile(19.8, 1.0, x)))),
        _ => None,
    };
    if let Some((name, f)) = exact {
        let reference: Vec<f64> = (0..grid.len()).map(|m| f(grid.coords(m)[0])).collect();
        let diff = sup_diff(values, &reference);
        report["closed_form"] = json!({ "name": name, "sup_difference": diff });
        writeln!(stdout, "{name}: sup difference {diff:.3e}")?;
    }
    Ok(0)
}

fn with_tau(network: &SwitchedNetwork, tau: f64) -> crate::error::Result<SwitchedNetwork> {
    SwitchedNetwork::new(
        network.modes.clone(),
        network.activation.clone(),
        tau,
        DelaySpec::Constant(tau),
        network.psi.clone(),
        network.q,
        network.gamma,
    )
}

fn simulate_cmd(a: &SimulateArgs, seed: u64, out: &Path, stdout: &mut dyn Write) -> Outcome {
    let doc = load_system(&a.system)?;
    let mut network = doc.network()?;
    if let Some(tau) = a.tau {
        network = with_tau(&network, tau)?;
    }
    let label = system_label(&doc, &a.system);
    let domain = doc.simulation_domain()?;
    let grid = match a.nodes {
        Some(n) => Grid::uniform(domain, n)?,
        None => doc.grid_on(domain, default_nodes(&domain))?,
    };
    if a.initial_mode == 0 || a.initial_mode > network.mode_count() {
        return Err(Failure::Input(format!("initial mode {} out of range", a.initial_mode)));
    }
    let form = match a.form {
        FormChoice::Absolute => StateForm::Absolute,
        FormChoice::DeviationZero => StateForm::Deviation(Reference::Zero),
        FormChoice::Deviation => StateForm::Deviation(Reference::Shared(stationary_reference(
            &network,
            &grid,
            a.initial_mode - 1,
            &FixedPointOptions::default(),
        )?)),
    };
    let dt = a.dt.unwrap_or_else(|| SimConfig::default_dt(network.tau_max));
    let config = SimConfig {
        initial_mode: a.initial_mode - 1,
        switching: SwitchingConfig {
            enabled: a.switching == OnOff::On,
            hysteresis: a.hysteresis,
            form: match a.region {
                RegionChoice::Integrated => SwitchingForm::Integrated,
                RegionChoice::Pointwise => SwitchingForm::Pointwise,
            },
            ..SwitchingConfig::default()
        },
        record_every: a.record_every,
        snapshot_every: a.snapshots,
        ..SimConfig::new(dt, a.horizon)
    };
    let initial = doc.initial_history(&domain, network.dim());
    let traj = simulate(&network, &grid, form, &config, &initial)?;
    let dir = prepare_dir(out, &["simulate", &label])?;
    let manifest = RunManifest::new(&a.system, "simulate", &dir, seed, to_json(a));
    manifest.write()?;
    emit_trajectory(&dir, &grid, &traj)?;
    let decay = traj.decay(a.window);
    let mut report = json!({
        "command": "simulate",
        "manifest": to_json(&manifest),
        "system": to_json(&doc),
        "options": to_json(a),
        "resolved": { "dt": dt, "tau": network.tau_max, "grid": grid.counts(), "domain": domain.lengths(), "initial": initial.label() },
        "switches": traj.switch_count(),
        "initial_norm": traj.initial_norm,
        "final_v": traj.v.last(),
    });
    match &decay {
        Ok(d) => {
            report["decay"] = to_json(d);
            writeln!(
                stdout,
                "{label}: eta = {:.6} (R^2 = {:.6}, window {:.3}..{:.3}), switches {}",
                d.rate, d.r_squared, d.window.0, d.window.1, traj.switch_count()
            )?;
        }
        Err(e) => {
            report["decay_error"] = json!(e.to_string());
            writeln!(stdout, "{label}: decay fit unavailable: {e}")?;
        }
    }
    if let Some(c) = &doc.certificate {
        let cert = verify_certificate(&network.on_common_domain(domain)?, &c.beta, c.gamma, c.q)?;
        report["certificate_on_common_domain"] = to_json(&cert);
        if let (Some(rate), Ok(d)) = (cert.rate, &decay) {
            writeln!(stdout, "certified rate {rate:.4}; fitted eta {} it", if d.rate >= rate { "meets" } else { "falls short of" })?;
        }
    }
    write_json(&dir.join("report.json"), &report)?;
    writeln!(stdout, "trajectory: {}", dir.join("trajectory.csv").display())?;
    Ok(0)
}

fn emit_trajectory(dir: &Path, grid: &Grid, traj: &Trajectory) -> std::io::Result<()> {
    let mut csv = Vec::new();
    traj.write_csv(&mut csv).map_err(std::io::Error::other)?;
    fs::write(dir.join("trajectory.csv"), csv)?;
    let mut dat = Vec::new();
    traj.write_decay_columns(&mut dat).map_err(std::io::Error::other)?;
    fs::write(dir.join("decay.dat"), dat)?;
    if !traj.snapshots.is_empty() {
        let snap = dir.join("snapshots");
        fs::create_dir_all(&snap)?;
        for (k, (t, state)) in traj.snapshots.iter().enumerate() {
            let body = format!("# t = {t:.16e}\n{}", field_csv(grid, traj.dim, state));
            fs::write(snap.join(format!("snapshot_{k:05}.csv")), body)?;
        }
    }
    Ok(())
}

fn preset(a: &PresetArgs, stdout: &mut dyn Write) -> Outcome {
    match &a.name {
        None => {
            for name in presets::NAMES {
                writeln!(stdout, "{name}")?;
            }
        }
        Some(name) => {
            let doc = preset_document(name).map_err(Failure::input)?;
            writeln!(stdout, "{}", doc.to_json()?)?;
        }
    }
    Ok(0)
}

/// One line of a reproduction table.
#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub stage: String,
    pub quantity: String,
    pub published: String,
    pub computed: String,
    pub tolerance: String,
    pub pass: bool,
}

/// Rows of a reproduction run plus the CSV files it produced.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Bundle {
    pub rows: Vec<Row>,
    /// `(file name, contents)` pairs written next to the report.
    #[serde(skip)]
    pub files: Vec<(String, String)>,
}

impl Bundle {
    fn add(&mut self, stage: &str, quantity: &str, published: impl ToString, computed: impl ToString, tolerance: &str, pass: bool) {
        self.rows.push(Row {
            stage: stage.into(),
            quantity: quantity.into(),
            published: published.to_string(),
            computed: computed.to_string(),
            tolerance: tolerance.into(),
            pass,
        });
    }

    fn attach(&mut self, name: String, contents: String) {
        self.files.push((name, contents));
    }

    fn attach_trajectory(&mut self, stem: &str, traj: &Trajectory) -> crate::error::Result<()> {
        let mut csv = Vec::new();
        traj.write_csv(&mut csv)?;
        let mut dat = Vec::new();
        traj.write_decay_columns(&mut dat)?;
        self.attach(format!("{stem}_trajectory.csv"), String::from_utf8_lossy(&csv).into_owned());
        self.attach(format!("{stem}_decay.dat"), String::from_utf8_lossy(&dat).into_owned());
        Ok(())
    }

    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    /// Stages with at least one failing row, in order of first appearance.
    pub fn failed_stages(&self) -> Vec<String> {
        let mut v: Vec<String> = Vec::new();
        for r in self.rows.iter().filter(|r| !r.pass) {
            if !v.contains(&r.stage) {
                v.push(r.stage.clone());
            }
        }
        v
    }

    pub fn print(&self, stdout: &mut dyn Write) -> std::io::Result<()> {
        let w = |f: &dyn Fn(&Row) -> usize, h: &str| self.rows.iter().map(f).max().unwrap_or(0).max(h.len());
        let ws = w(&|r| r.stage.chars().count(), "stage");
        let wq = w(&|r| r.quantity.chars().count(), "quantity");
        let wp = w(&|r| r.published.chars().count(), "published");
        let wc = w(&|r| r.computed.chars().count(), "computed");
        let wt = w(&|r| r.tolerance.chars().count(), "tolerance");
        let pad = |s: &str, n: usize| format!("{s}{}", " ".repeat(n.saturating_sub(s.chars().count())));
        writeln!(
            stdout,
            "{}  {}  {}  {}  {}  result",
            pad("stage", ws),
            pad("quantity", wq),
            pad("published", wp),
            pad("computed", wc),
            pad("tolerance", wt)
        )?;
        for r in &self.rows {
            writeln!(
                stdout,
                "{}  {}  {}  {}  {}  {}",
                pad(&r.stage, ws),
                pad(&r.quantity, wq),
                pad(&r.published, wp),
                pad(&r.computed, wc),
                pad(&r.tolerance, wt),
                if r.pass { "PASS" } else { "FAIL" }
            )?;
        }
        Ok(())
    }
}

/// Runs one reproduction target. Deterministic for fixed arguments.
pub fn reproduce_bundle(target: Target, case: Option<u8>, nodes: Option<usize>, simulate: bool, seed: u64) -> crate::error::Result<Bundle> {
    let mut t = Bundle::default();
    match target {
        Target::Example41 => {
            let cases: Vec<u8> = case.map_or(vec![1, 2, 3], |c| vec![c]);
            for c in cases {
                repro_example41(&mut t, c, nodes.unwrap_or(101), simulate, seed)?;
            }
        }
        Target::Tables => repro_tables(&mut t)?,
        Target::Statement1 => repro_statement1(&mut t, nodes.unwrap_or(401), simulate)?,
        Target::Example35 => repro_example35(&mut t, nodes.unwrap_or(401), simulate)?,
        Target::Statement2 => repro_statement2(&mut t, nodes.unwrap_or(401), seed)?,
    }
    Ok(t)
}

fn reproduce(a: &ReproduceArgs, seed: u64, out: &Path, stdout: &mut dyn Write) -> Outcome {
    if let Some(c) = a.case {
        if !(1..=3).contains(&c) {
            return Err(Failure::Input(format!("--case must be 1, 2 or 3, got {c}")));
        }
    }
    if a.case.is_some() && a.target != Target::Example41 {
        return Err(Failure::Input("--case only applies to example4_1".into()));
    }
    let name = match a.target {
        Target::Example41 => a.case.map_or("example4_1".to_string(), |c| format!("example4_1_case{c}")),
        Target::Statement1 => "statement1".into(),
        Target::Example35 => "example3_5".into(),
        Target::Statement2 => "statement2".into(),
        Target::Tables => "tables".into(),
    };
    let bundle = reproduce_bundle(a.target, a.case, a.nodes, !a.no_simulation, seed)
        .map_err(|e| Failure::Failed(format!("{name}: {e}")))?;
    bundle.print(stdout)?;
    let dir = prepare_dir(out, &["reproduce", &name])?;
    for (file, contents) in &bundle.files {
        fs::write(dir.join(file), contents)?;
    }
    let manifest = RunManifest::new(&name, "reproduce", &dir, seed, to_json(a));
    manifest.write()?;
    write_json(
        &dir.join("report.json"),
        &json!({ "command": "reproduce", "manifest": to_json(&manifest), "rows": to_json(&bundle.rows), "files": bundle.files.iter().map(|f| &f.0).collect::<Vec<_>>() }),
    )?;
    writeln!(stdout, "report: {}", dir.join("report.json").display())?;
    let failed = bundle.failed_stages();
    if failed.is_empty() {
        Ok(0)
    } else {
        writeln!(stdout, "failing stages: {}", failed.join(", "))?;
        Ok(1)
    }
}

fn fmt(x: f64) -> String {
    format!("{x:.6}")
}

fn repro_example41(t: &mut Bundle, case: u8, nodes: usize, simulate_stage: bool, seed: u64) -> crate::error::Result<()> {
    let network = presets::example41(case)?;
    let published = presets::example41_published(case)?;
    let stage = format!("case{case}");
    if case == 1 {
        for (k, (m, quoted)) in network.modes.iter().zip(presets::EXAMPLE41_LAMBDAS).enumerate() {
            let ok = (m.lambda1 - quoted).abs() < tol::EIGENVALUE;
            t.add("eigenvalues", &format!("lambda_{}1", k + 1), quoted, format!("{:.4}", m.lambda1), &format!("{:e}", tol::EIGENVALUE), ok);
        }
    }
    let cert = verify_certificate(&network, &published.beta, published.gamma, presets::EXAMPLE41_Q)?;
    t.add(&stage, "certificate feasible", "true", cert.feasible, "margin < 0", cert.feasible);
    t.add(&stage, "margin", "< 0", format!("{:.6e}", cert.margin), "-", cert.margin < 0.0);
    let rate = cert.rate.unwrap_or(f64::NAN);
    t.add(&stage, "rate gamma/2", published.rate, fmt(rate), &format!("{:e}", tol::RATE), (rate - published.rate).abs() < tol::RATE);
    t.add(
        &stage,
        "gamma < lambda_min(Psi)",
        "false (not met by published data)",
        cert.theorem_constraint_ok,
        "reported",
        !cert.theorem_constraint_ok,
    );
    let uniq = check_uniqueness_a3(&network.modes, &network.activation.lipschitz, 2.0, &PChoice::Uniform(1.0))?;
    t.add(&stage, "uniqueness (eps=2, p=1)", "holds", uniq.holds, "all modes", uniq.holds);
    let mut checker = SampledChecker::new(10_000, seed);
    let bounds = vec![(-10.0, 10.0); 2];
    let a1 = checker.check_a1(&network.activation, &bounds)?;
    t.add(&stage, "Lipschitz G=0.51 on [-10,10]", "holds", format!("{:.8}", a1.worst_ratio[0]), "<= 0.51", a1.holds);
    for (k, m) in network.modes.iter().enumerate() {
        let a2 = checker.check_a2(m, &network.activation, presets::EXAMPLE41_A2_BOUND, &bounds, true)?;
        t.add(&stage, &format!("positivity bound mode {}", k + 1), "holds", a2.holds, "c=1e8 box", a2.holds);
    }
    if simulate_stage {
        let domain = presets::example41_common_domain();
        let grid = Grid::uniform(domain, nodes)?;
        let reference = stationary_reference(&network, &grid, 0, &FixedPointOptions::default())?;
        let common = network.on_common_domain(domain)?;
        let cert_common = verify_certificate(&common, &published.beta, published.gamma, presets::EXAMPLE41_Q)?;
        t.add(&stage, "feasible on common domain", "true", cert_common.feasible, "margin < 0", cert_common.feasible);
        t.attach(format!("{stage}_stationary.csv"), field_csv(&grid, network.dim(), &reference));
        let config = SimConfig::new(SimConfig::default_dt(network.tau_max), 30.0);
        let traj = simulate(&network, &grid, StateForm::Deviation(Reference::Shared(reference)), &config, &presets::example41_initial())?;
        let d = traj.decay(0.5)?;
        t.add(
            &stage,
            &format!("fitted eta ({nodes}^2 grid)"),
            format!(">= {}", published.rate),
            format!("{:.4} (R2 {:.4}, {} switches)", d.rate, d.r_squared, traj.switch_count()),
            "bound",
            d.rate >= published.rate,
        );
        t.attach_trajectory(&stage, &traj)?;
    }
    Ok(())
}

fn repro_tables(t: &mut Bundle) -> crate::error::Result<()> {
    let mut rates = [0.0; 3];
    let mut csv = String::from("case,beta1,beta2,beta3,gamma,q,tau,margin,rate,feasible\n");
    for case in 1..=3u8 {
        let network = presets::example41(case)?;
        let p = presets::example41_published(case)?;
        let c = verify_certificate(&network, &p.beta, p.gamma, presets::EXAMPLE41_Q)?;
        let k = case as usize - 1;
        rates[k] = c.rate.unwrap_or(f64::NAN);
        let _ = writeln!(
            csv,
            "{case},{},{},{},{},{},{},{:.16e},{},{}",
            p.beta[0], p.beta[1], p.beta[2], p.gamma, presets::EXAMPLE41_Q, network.tau_max, c.margin, rates[k], c.feasible
        );
        t.add(
            &format!("case{case}"),
            "rate (feasible)",
            format!("{:.0}%", p.rate * 100.0),
            format!("{:.0}% (margin {:.3e})", rates[k] * 100.0, c.margin),
            &format!("{:e}", tol::RATE),
            c.feasible && (rates[k] - p.rate).abs() < tol::RATE,
        );
    }
    t.add("table1", "larger diffusion is faster", "22% > 19%", format!("{} > {}", rates[1], rates[0]), "ordering", rates[1] > rates[0]);
    t.add("table2", "shorter delay is faster", "29% > 19%", format!("{} > {}", rates[2], rates[0]), "ordering", rates[2] > rates[0]);
    t.attach("rates.csv".into(), csv);
    Ok(())
}

fn repro_statement1(t: &mut Bundle, nodes: usize, simulate_stage: bool) -> crate::error::Result<()> {
    let eq = statement1::EQUILIBRIUM;
    let mid = statement1_profile(0.5);
    t.add(
        "closed form",
        "u(0.5)",
        "0.560224",
        format!("{mid:.7}"),
        &format!("{:e}", tol::STATEMENT1_MIDPOINT),
        (mid - 0.560224).abs() < tol::STATEMENT1_MIDPOINT,
    );
    t.add(
        "closed form",
        "u(0) = u(1) = 0",
        "0",
        format!("{:e}, {:e}", statement1_profile(0.0), statement1_profile(1.0)),
        "exact",
        statement1_profile(0.0) == 0.0 && statement1_profile(1.0) == 0.0,
    );
    let grid = Grid::uniform(RectDomain::interval(1.0)?, nodes)?;
    let problem = StationaryProblem::new(statement1::mode(), statement1::activation(), grid)?;
    let (y, rep) = fixed_point_solve(&problem, &VectorField::zeros(&grid, 1), &FixedPointOptions::default())?;
    let exact: Vec<f64> = (0..grid.len()).map(|m| statement1_profile(grid.coords(m)[0])).collect();
    let diff = sup_diff(y.values(), &exact);
    let field_tol = tol::statement1_field(grid.h_max());
    t.add(
        "stationary",
        "sup |fixed point - closed form|",
        "0",
        format!("{diff:.3e} ({} it)", rep.iterations),
        &format!("{field_tol:.1e}"),
        diff <= field_tol,
    );
    let (lo, hi) = y.values().iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
    t.add("stationary", "profile is nonconstant", "true", format!("range {:.4}", hi - lo), "> 0", hi - lo > 0.0);
    let constant = VectorField::from_values(&grid, 1, vec![eq; grid.len()])?;
    let r = residual(&problem, &constant)?;
    t.add("stationary", "residual of constant 200/357", "> 1 (not stationary)", format!("{r:.3}"), "> 1", r > 1.0);
    t.attach("stationary.csv".into(), field_csv(&grid, 1, y.values()));
    let (a, b) = statement1::halanay_coefficients();
    let lambda = solve_lambda(a, b, statement1::TAU)?;
    let lambda_res = (lambda - a + b * (lambda * statement1::TAU).exp()).abs();
    t.add(
        "rate",
        "lambda of lambda = a - b e^(lambda tau)",
        "-",
        format!("{lambda:.10}"),
        &format!("residual {:e}", tol::LAMBDA_RESIDUAL),
        lambda_res < tol::LAMBDA_RESIDUAL,
    );
    if simulate_stage {
        let net = statement1::network(statement1::TAU)?;
        let traj = simulate_ode(&net, StateForm::Absolute, &SimConfig::new(0.01, 20.0), &InitialHistory::constant(vec![3.0]))?;
        let x = traj.final_state[0];
        t.add("ode", "x(20)", format!("{eq:.6}"), format!("{x:.9}"), &format!("{:e}", tol::STATEMENT1_ODE), (x - eq).abs() < tol::STATEMENT1_ODE);
        t.attach_trajectory("ode", &traj)?;
        let dev = statement1::deviation_network(statement1::TAU)?;
        let traj = simulate(&dev, &grid, StateForm::Absolute, &SimConfig::new(0.005, 10.0), &InitialHistory::first_mode(vec![1.0], vec![1.0]))?;
        let d = traj.decay(0.5)?;
        t.add("pde decay", "fitted eta", format!(">= lambda/2 = {:.4}", lambda / 2.0), format!("{:.4}", d.rate), "bound", d.rate >= lambda / 2.0);
        t.attach_trajectory("pde", &traj)?;
    }
    Ok(())
}

fn repro_example35(t: &mut Bundle, nodes: usize, simulate_stage: bool) -> crate::error::Result<()> {
    let grid = Grid::uniform(RectDomain::interval(1.0)?, nodes)?;
    let exact: Vec<f64> = (0..grid.len()).map(|m| helmholtz_unit_source_profile(19.8, 1.0, grid.coords(m)[0])).collect();
    let problem = StationaryProblem::new(example35::mode(), example35::activation(), grid)?;
    let (y, _) = fixed_point_solve(&problem, &VectorField::zeros(&grid, 1), &FixedPointOptions::default())?;
    let (u, _) = variational_minimize(&example35::functional(), &ScalarField::zeros(&grid), &MinimizeOptions::default())?;
    let ft = tol::EXAMPLE35_FIELD;
    let ft_s = format!("{ft:e}");
    let d_fp = sup_diff(y.values(), &exact);
    let d_var = sup_diff(u.values(), &exact);
    let d_cross = sup_diff(y.values(), u.values());
    t.add("stationary", "fixed point vs analytic", "0", format!("{d_fp:.3e}"), &ft_s, d_fp <= ft);
    t.add("stationary", "minimizer vs analytic", "0", format!("{d_var:.3e}"), &ft_s, d_var <= ft);
    t.add("stationary", "fixed point vs minimizer", "0", format!("{d_cross:.3e}"), &ft_s, d_cross <= ft);
    let max = u.sup_norm();
    let u_mid = helmholtz_unit_source_profile(19.8, 1.0, 0.5);
    t.add(
        "stationary",
        "u*(x) differs from 0.1/1.98",
        "nonconstant",
        format!("max {max:.6} vs {:.6}", example35::EQUILIBRIUM),
        "max < u*",
        max < example35::EQUILIBRIUM && (max - u_mid).abs() < ft,
    );
    t.attach("stationary.csv".into(), field_csv(&grid, 1, u.values()));
    let cg = example35::cg()?;
    let lambda1 = first_eigenvalue(&RectDomain::interval(1.0)?);
    let uniq = check_corollary34(&cg, lambda1, example35::EPSILON, &PChoice::Uniform(example35::P))?;
    t.add("uniqueness", "eps=1, p=0.02", "holds", format!("{:.4}", uniq.modes[0].eigenvalues[0]), "< 0", uniq.holds);
    let c1 = cg_check_c1(&cg)?;
    t.add("stability", "block matrix negative definite", "holds", format!("{:.4}", c1.lambda_max), "< 0", c1.holds);
    let rates = cg_rates(&cg)?;
    t.add(
        "stability",
        "lambda",
        "-",
        format!("{:.6}", rates.lambda),
        &format!("residual {:e}", tol::LAMBDA_RESIDUAL),
        rates.lambda_residual < tol::LAMBDA_RESIDUAL,
    );
    if simulate_stage {
        let traj = simulate_cg(&cg, &Space::Lumped, &SimConfig::new(0.01, 20.0), &InitialHistory::constant(vec![1.0]))?;
        let x = traj.final_state[0];
        t.add(
            "ode",
            "u(20)",
            format!("0.1/1.98 = {:.9}", example35::EQUILIBRIUM),
            format!("{x:.12}"),
            &format!("{:e}", tol::EXAMPLE35_ODE),
            (x - example35::EQUILIBRIUM).abs() < tol::EXAMPLE35_ODE,
        );
        t.attach_trajectory("ode", &traj)?;
    }
    Ok(())
}

fn repro_statement2(t: &mut Bundle, nodes: usize, seed: u64) -> crate::error::Result<()> {
    let domain = statement2::domain();
    let grid = Grid::uniform(domain, nodes)?;
    let network = statement2::network(domain)?;
    let lip = statement2::D / statement2::A * statement2::mu1(&domain);
    let mut checker = SampledChecker::new(20_001, seed);
    let a1 = checker.check_a1(&network.activation, &[(-10.0, 10.0)])?;
    let ratio = a1.worst_ratio[0];
    t.add(
        "activation",
        "sampled Lipschitz constant",
        format!("(D/A)mu1 = {lip:.6}"),
        format!("{ratio:.6}"),
        &format!("{}%", tol::STATEMENT2_LIPSCHITZ * 100.0),
        (ratio / lip - 1.0).abs() < tol::STATEMENT2_LIPSCHITZ,
    );
    let problem = StationaryProblem::new(network.modes[0].clone(), network.activation.clone(), grid)?;
    let (phi, lambda1) = eigenfunction(&grid, &[1])?;
    let phi = phi.scaled(1.0 / phi.sup_norm());
    let h2 = tol::H2_FACTOR * grid.h_max() * grid.h_max();
    let mut worst: f64 = 0.0;
    for k in -4..=4 {
        let u = phi.scaled(k as f64 / 4.0);
        let r = residual(&problem, &VectorField::from_components(std::slice::from_ref(&u))?)?;
        let scale = statement2::D * lambda1 * lambda1 * l2_norm(&u);
        worst = worst.max(if scale > 0.0 { r / scale } else if r == 0.0 { 0.0 } else { f64::INFINITY });
    }
    t.add("critical manifold", "max residual / (D lambda1^2 |u|)", "O(h^2)", format!("{worst:.3e}"), &format!("5h^2 = {h2:.1e}"), worst <= h2);
    let functional = statement2::functional(&domain);
    let options = MinimizeOptions { tol: h2 * lambda1 * lambda1, ..Default::default() };
    let inits = vec![phi.scaled(0.5), phi.scaled(-0.5), ScalarField::zeros(&grid)];
    let rep = find_stationary_multiplicity(&functional, &inits, &options)?;
    t.add("multiplicity", "distinct solutions from {+-0.5 phi1, 0}", ">= 3", rep.count(), ">= 3", rep.count() >= 3);
    t.add("multiplicity", "nonzero solutions", ">= 2", rep.nonzero_count(1e-6), ">= 2", rep.nonzero_count(1e-6) >= 2);
    for (k, s) in rep.solutions.iter().enumerate() {
        t.attach(format!("solution_{}.csv", k + 1), field_csv(&grid, 1, s.field.values()));
    }
    Ok(())
}
