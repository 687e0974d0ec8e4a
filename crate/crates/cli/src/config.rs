//! Run configuration: a JSON file whose keys are mirrored by command-line flags.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use nhe_core::dynamics::InitialState;
use nhe_core::entanglement::ClassThresholds;
use nhe_core::experiments::{
    default_time_grid, preset, CouplingSpec, Objective, Scenario, SweepSpec, TimeGrid, Topology,
};
use nhe_core::hamiltonian::QubitParams;
use nhe_core::output::Format;
use nhe_core::{Error, Result};

pub const OUT_DIR_ENV: &str = "NHE_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "out";

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub start: Option<f64>,
    pub end: Option<f64>,
    pub dt: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchTarget {
    Time,
    Omega,
}

impl std::str::FromStr for SearchTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "time" => Ok(SearchTarget::Time),
            "omega" => Ok(SearchTarget::Omega),
            other => Err(Error::Config(format!(
                "unknown search target `{other}` (expected time or omega)"
            ))),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchConfig {
    pub target: Option<SearchTarget>,
    pub objective: Option<Objective>,
    pub window: Option<(f64, f64)>,
    pub dt: Option<f64>,
    pub omega_step: Option<f64>,
    pub omega_range: Option<(f64, f64)>,
}

/// Everything a run can be configured with. Every field is optional so
/// file values and flags can be layered.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Preset name to start from.
    pub scenario: Option<String>,
    pub name: Option<String>,
    pub description: Option<String>,
    /// Register size for uniform parameters.
    pub n: Option<usize>,
    pub delta: Option<f64>,
    pub gamma: Option<f64>,
    pub omega: Option<f64>,
    pub qubits: Option<Vec<QubitParams>>,
    #[serde(rename = "J")]
    pub j: Option<f64>,
    pub topology: Option<Topology>,
    pub coupling: Option<CouplingSpec>,
    pub initial_state: Option<InitialState>,
    pub time: Option<TimeConfig>,
    pub sweep: Option<SweepSpec>,
    pub thresholds: Option<ClassThresholds>,
    pub search: Option<SearchConfig>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
}

macro_rules! layer {
    ($base:ident, $top:ident; $($f:ident),*) => {
        $( if $top.$f.is_some() { $base.$f = $top.$f; } )*
    };
}

impl RunConfig {
    pub fn from_json(text: &str, origin: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("{origin}: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text, &path.display().to_string())
    }

    /// `self` with every value set in `top` replaced.
    pub fn overlay(mut self, top: RunConfig) -> Self {
        let (mut time, mut search) = (self.time.take(), self.search.take());
        if let Some(t) = top.time {
            let base = time.get_or_insert_with(TimeConfig::default);
            layer!(base, t; start, end, dt);
        }
        if let Some(s) = top.search {
            let base = search.get_or_insert_with(SearchConfig::default);
            layer!(base, s; target, objective, window, dt, omega_step, omega_range);
        }
        layer!(self, top; scenario, name, description, n, delta, gamma, omega, qubits, j,
            topology, coupling, initial_state, sweep, thresholds, output, format);
        self.time = time;
        self.search = search;
        self
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or_default()
    }

    /// Output root: config or flag, then `NHE_OUT_DIR`, then `out`.
    pub fn output_root(&self) -> PathBuf {
        self.output
            .clone()
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
    }

    pub fn search(&self) -> SearchConfig {
        self.search.clone().unwrap_or_default()
    }

    /// Scenario from the preset (if any) with every explicit value applied on top.
    pub fn scenario(&self) -> Result<Scenario> {
        let mut s = match &self.scenario {
            Some(name) => preset(name).ok_or_else(|| {
                Error::Config(format!("unknown preset `{name}` (see `nhe list-presets`)"))
            })?,
            None => self.inline_base()?,
        };
        if let Some(name) = &self.name {
            s.name = name.clone();
        }
        if let Some(d) = &self.description {
            s.description = d.clone();
        }
        if let Some(qs) = &self.qubits {
            s.qubits = qs.clone();
        }
        if let Some(n) = self.n {
            if self.qubits.is_some() && n != s.qubits.len() {
                return Err(Error::Config(format!(
                    "`n` = {n} disagrees with {} entries in `qubits`",
                    s.qubits.len()
                )));
            }
            let first = s.qubits.first().copied().unwrap_or(QubitParams {
                delta: 0.0,
                gamma: 0.0,
                omega: 0.0,
            });
            s.qubits.resize(n, first);
        }
        for q in &mut s.qubits {
            if let Some(d) = self.delta {
                q.delta = d;
            }
            if let Some(g) = self.gamma {
                q.gamma = g;
            }
            if let Some(w) = self.omega {
                q.omega = w;
            }
        }
        if let Some(c) = &self.coupling {
            s.coupling = c.clone();
        }
        if let Some(t) = self.topology {
            s.coupling.topology = t;
            if t != Topology::Custom {
                s.coupling.matrix = None;
            }
        }
        if let Some(j) = self.j {
            if s.coupling.topology == Topology::Custom {
                return Err(Error::Config(
                    "`J` cannot be combined with a custom coupling matrix".into(),
                ));
            }
            s.coupling.strength = j;
        }
        if let Some(init) = &self.initial_state {
            s.initial_state = init.clone();
        }
        if let Some(th) = self.thresholds {
            s.thresholds = th;
        }
        if let Some(sw) = &self.sweep {
            s.sweep = sw.clone();
        }
        if let Some(t) = &self.time {
            let base = match &s.sweep {
                SweepSpec::Time { grid } => *grid,
                _ => default_time_grid(&s.qubits),
            };
            let grid = TimeGrid {
                start: t.start.unwrap_or(base.start),
                end: t.end.unwrap_or(base.end),
                dt: t.dt.unwrap_or(base.dt),
            };
            s.sweep = match &s.sweep {
                SweepSpec::Detuning { delta, .. } => SweepSpec::Detuning {
                    delta: delta.clone(),
                    grid,
                },
                _ => SweepSpec::Time { grid },
            };
        }
        s.validate()?;
        Ok(s)
    }

    fn inline_base(&self) -> Result<Scenario> {
        let qubits = match &self.qubits {
            Some(q) => q.clone(),
            None => vec![
                QubitParams {
                    delta: 0.0,
                    gamma: 0.0,
                    omega: 0.0,
                };
                self.n.unwrap_or(3)
            ],
        };
        let sweep = SweepSpec::Time {
            grid: default_time_grid(&uniform_preview(&qubits, self)),
        };
        Ok(Scenario {
            name: "custom".into(),
            description: String::new(),
            qubits,
            coupling: CouplingSpec::uniform(Topology::AllToAll, 0.0),
            initial_state: InitialState::Coherent,
            sweep,
            thresholds: ClassThresholds::default(),
        })
    }
}

/// Qubits with the uniform overrides applied, to size the default grid.
fn uniform_preview(qubits: &[QubitParams], c: &RunConfig) -> Vec<QubitParams> {
    qubits
        .iter()
        .map(|q| QubitParams {
            delta: c.delta.unwrap_or(q.delta),
            gamma: c.gamma.unwrap_or(q.gamma),
            omega: c.omega.unwrap_or(q.omega),
        })
        .collect()
}
