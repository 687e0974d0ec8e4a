//! `nhe`: run the qubit-entanglement scenarios from the command line.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure.

mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use nhe_core::dynamics::{InitialState, Propagator};
use nhe_core::entanglement::report_with;
use nhe_core::experiments::{
    find_optimal_drive, find_optimal_time, presets, run_scenario, DriveSearch, Objective,
    Scenario, SweepSpec, Topology,
};
use nhe_core::output::{report_table, round_sig, sweep_table, trajectory_table, Meta};
use nhe_core::{Error, Result};

use config::{RunConfig, SearchConfig, SearchTarget, TimeConfig};

#[derive(Parser)]
#[command(name = "nhe", version, about = "Entanglement dynamics of driven, lossy PT-symmetric qubits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate one setup along a time grid; writes trajectory and report tables
    Simulate(RunArgs),
    /// Run the scenario's parameter sweep
    Sweep(RunArgs),
    /// Locate the optimal time or drive strength
    Optimize(OptimizeArgs),
    /// List built-in presets
    ListPresets {
        /// Print a JSON array
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args, Debug, Default)]
struct RunArgs {
    /// JSON run configuration; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in preset to start from
    #[arg(long, visible_alias = "scenario")]
    preset: Option<String>,
    /// Output name (directory under the output root)
    #[arg(long)]
    name: Option<String>,
    /// Number of qubits
    #[arg(long)]
    n: Option<usize>,
    /// Detuning of every qubit, rad/us
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<f64>,
    /// Loss rate of every qubit, rad/us
    #[arg(long)]
    gamma: Option<f64>,
    /// Drive of every qubit, rad/us
    #[arg(long)]
    omega: Option<f64>,
    /// Coupling strength, rad/us
    #[arg(long = "J", visible_alias = "j")]
    j: Option<f64>,
    /// all_to_all, nearest_neighbour or custom
    #[arg(long)]
    topology: Option<String>,
    /// coherent or all_f
    #[arg(long)]
    initial_state: Option<String>,
    /// Start of the time grid, us
    #[arg(long)]
    t_start: Option<f64>,
    /// End of the time grid, us
    #[arg(long)]
    t_end: Option<f64>,
    /// Time step, us
    #[arg(long)]
    dt: Option<f64>,
    /// Output root (default: $NHE_OUT_DIR or ./out)
    #[arg(long)]
    output: Option<PathBuf>,
    /// csv or json
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args, Debug, Default)]
struct OptimizeArgs {
    #[command(flatten)]
    run: RunArgs,
    /// time or omega
    #[arg(long)]
    search: Option<String>,
    /// max_tau, min_max_pairwise_concurrence, max_min_entropy or max_concurrence_<jk>
    #[arg(long)]
    objective: Option<String>,
    /// Search window start, us
    #[arg(long, allow_hyphen_values = true)]
    window_start: Option<f64>,
    /// Search window end, us
    #[arg(long, allow_hyphen_values = true)]
    window_end: Option<f64>,
    /// Grid resolution of the time search, us
    #[arg(long)]
    search_dt: Option<f64>,
    /// Drive grid step, rad/us
    #[arg(long)]
    omega_step: Option<f64>,
}

fn parse<T: std::str::FromStr<Err = Error>>(v: &Option<String>) -> Result<Option<T>> {
    v.as_deref().map(str::parse).transpose()
}

fn initial_state(s: &str) -> Result<InitialState> {
    match s {
        "coherent" => Ok(InitialState::Coherent),
        "all_f" | "fff" => Ok(InitialState::AllF),
        other => Err(Error::Config(format!(
            "unknown initial state `{other}` (expected coherent or all_f; explicit amplitudes go in the config file)"
        ))),
    }
}

impl RunArgs {
    fn to_config(&self) -> Result<RunConfig> {
        let time = (self.t_start.is_some() || self.t_end.is_some() || self.dt.is_some()).then_some(
            TimeConfig {
                start: self.t_start,
                end: self.t_end,
                dt: self.dt,
            },
        );
        Ok(RunConfig {
            scenario: self.preset.clone(),
            name: self.name.clone(),
            n: self.n,
            delta: self.delta,
            gamma: self.gamma,
            omega: self.omega,
            j: self.j,
            topology: parse::<Topology>(&self.topology)?,
            initial_state: self.initial_state.as_deref().map(initial_state).transpose()?,
            time,
            output: self.output.clone(),
            format: parse(&self.format)?,
            ..Default::default()
        })
    }

    fn resolve(&self) -> Result<RunConfig> {
        let file = match &self.config {
            Some(p) => RunConfig::from_file(p)?,
            None => RunConfig::default(),
        };
        Ok(file.overlay(self.to_config()?))
    }
}

impl OptimizeArgs {
    fn resolve(&self) -> Result<RunConfig> {
        let window = match (self.window_start, self.window_end) {
            (None, None) => None,
            (Some(a), Some(b)) => Some((a, b)),
            _ => {
                return Err(Error::Config(
                    "give both --window-start and --window-end".into(),
                ))
            }
        };
        let flags = RunConfig {
            search: Some(SearchConfig {
                target: parse(&self.search)?,
                objective: parse(&self.objective)?,
                window,
                dt: self.search_dt,
                omega_step: self.omega_step,
                omega_range: None,
            }),
            ..Default::default()
        };
        Ok(self.run.resolve()?.overlay(flags))
    }
}

fn simulate(cfg: &RunConfig) -> Result<()> {
    let s = cfg.scenario()?;
    let grid = match &s.sweep {
        SweepSpec::Time { grid } => *grid,
        other => {
            return Err(Error::Config(format!(
                "scenario `{}` is a `{}` sweep; run `nhe sweep` or give a time grid (--t-end/--dt)",
                s.name,
                other.name()
            )))
        }
    };
    let psi0 = s.initial()?;
    let tr = Propagator::new(&s.hamiltonian()?).trajectory(&psi0, &grid.times())?;
    let n = s.n();
    let reports = if n >= 2 {
        tr.samples
            .iter()
            .map(|p| report_with(&p.state, p.t, &s.thresholds))
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };

    let dir = cfg.output_root().join(&s.name);
    let format = cfg.format();
    let mut meta = Meta::new("simulate", &s);
    let mut files = vec![trajectory_table(&tr).write(&dir, "trajectory", format)?];
    if n >= 2 {
        files.push(report_table(&reports, n).write(&dir, "report", format)?);
    }
    meta.files = file_names(&files);
    meta.terminated_at = tr.terminated.map(|t| t.t);
    meta.write(&dir)?;
    eprintln!("wrote {} rows to {}", tr.samples.len(), dir.display());
    if let Some(t) = tr.terminated {
        return Err(Error::PostSelectionVanished {
            norm: t.relative_norm,
            floor: nhe_core::dynamics::DEFAULT_NORM_FLOOR,
        });
    }
    Ok(())
}

fn file_names(paths: &[PathBuf]) -> Vec<String> {
    paths
        .iter()
        .filter_map(|p| p.file_name())
        .map(|f| f.to_string_lossy().into_owned())
        .collect()
}

fn sweep(cfg: &RunConfig) -> Result<()> {
    let s = cfg.scenario()?;
    if s.n() < 2 {
        return Err(Error::Config("sweeps report entanglement and need at least two qubits".into()));
    }
    let res = run_scenario(&s)?;
    let dir = cfg.output_root().join(&s.name);
    let path = sweep_table(&res, s.n()).write(&dir, &res.sweep, cfg.format())?;
    let mut meta = Meta::new("sweep", &s);
    meta.files = file_names(&[path]);
    meta.failed_points = Some(res.failed());
    meta.phase_boundary = res.phase_boundary;
    meta.write(&dir)?;
    eprintln!(
        "wrote {} points to {} ({} failed post-selection)",
        res.points.len(),
        dir.display(),
        res.failed()
    );
    Ok(())
}

fn default_objective(s: &Scenario) -> Objective {
    if s.n() == 3 {
        Objective::MaxTau
    } else {
        Objective::MaxConcurrence(0, 1)
    }
}

fn optimize(cfg: &RunConfig) -> Result<()> {
    let s = cfg.scenario()?;
    let search = cfg.search();
    let dt = search.dt.unwrap_or(nhe_core::experiments::search::DEFAULT_SEARCH_DT);
    let out = match search.target.unwrap_or(SearchTarget::Time) {
        SearchTarget::Time => {
            let objective = search.objective.unwrap_or_else(|| default_objective(&s));
            let window = search.window.unwrap_or_else(|| s.default_window());
            let o = find_optimal_time(&s, window, objective, dt)?;
            json!({
                "t_star": round_sig(o.t),
                "omega_star": round_sig(s.qubits[0].omega),
                "value": round_sig(o.value),
                "objective": objective.to_string(),
            })
        }
        SearchTarget::Omega => {
            let q = s.qubits[0];
            if s.qubits.iter().any(|p| p.gamma != q.gamma || p.delta != 0.0) {
                return Err(Error::Config(
                    "drive search needs identical loss rates and zero detuning".into(),
                ));
            }
            let mut d = DriveSearch::new(q.gamma, s.coupling.clone());
            d.n = s.n();
            d.initial_state = s.initial_state.clone();
            d.t_window = search.window;
            d.omega_range = search.omega_range;
            d.dt = dt;
            if let Some(step) = search.omega_step {
                d.omega_step = step;
            }
            let o = find_optimal_drive(&d)?;
            let objective = if d.n == 2 { "max_concurrence_12" } else { "max_tau" };
            json!({
                "t_star": round_sig(o.t),
                "omega_star": round_sig(o.omega),
                "value": round_sig(o.value),
                "objective": objective,
            })
        }
    };
    emit(&out.to_string())
}

/// Writes to stdout; a closed pipe (`nhe list-presets | head`) is not an error.
fn emit(text: &str) -> Result<()> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{text}").and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn list_presets(as_json: bool) -> Result<()> {
    if as_json {
        let v = serde_json::to_string_pretty(presets()).map_err(|e| Error::Io(e.to_string()))?;
        return emit(&v);
    }
    let width = presets().iter().map(|p| p.name.len()).max().unwrap_or(0);
    let lines: Vec<String> = presets()
        .iter()
        .map(|p| format!("{:width$}  {}", p.name, p.description))
        .collect();
    emit(&lines.join("\n"))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate(a) => simulate(&a.resolve()?),
        Command::Sweep(a) => sweep(&a.resolve()?),
        Command::Optimize(a) => optimize(&a.resolve()?),
        Command::ListPresets { json } => list_presets(json),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
    }
}
