use serde::{Deserialize, Serialize};

use crate::dynamics::{InitialState, StateVector};
use crate::entanglement::ClassThresholds;
use crate::error::{Error, Result};
use crate::hamiltonian::{
    build_hamiltonian, evolution_period, CouplingGraph, HamiltonianMatrix, QubitParams,
};

/// Default time step of generated grids, in us.
pub const DEFAULT_DT: f64 = 0.01;

/// Horizon used when the evolution period is undefined, in us.
pub const DEFAULT_HORIZON: f64 = 20.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    AllToAll,
    NearestNeighbour,
    Custom,
}

impl std::str::FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all_to_all" => Ok(Topology::AllToAll),
            "nearest_neighbour" | "nearest_neighbor" => Ok(Topology::NearestNeighbour),
            "custom" => Ok(Topology::Custom),
            other => Err(Error::Config(format!(
                "unknown topology `{other}` (expected all_to_all, nearest_neighbour or custom)"
            ))),
        }
    }
}

/// Coupling as written in configuration files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingSpec {
    pub topology: Topology,
    #[serde(default)]
    pub strength: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
}

impl CouplingSpec {
    pub fn uniform(topology: Topology, strength: f64) -> Self {
        Self {
            topology,
            strength,
            matrix: None,
        }
    }

    pub fn custom(matrix: Vec<Vec<f64>>) -> Self {
        Self {
            topology: Topology::Custom,
            strength: 0.0,
            matrix: Some(matrix),
        }
    }

    pub fn resolve(&self, n: usize) -> Result<CouplingGraph> {
        match (self.topology, &self.matrix) {
            (Topology::Custom, Some(m)) => {
                let g = CouplingGraph::from_matrix(m)?;
                if g.n() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: g.n(),
                    });
                }
                Ok(g)
            }
            (Topology::Custom, None) => Err(Error::Config(
                "coupling topology `custom` requires `matrix`".into(),
            )),
            (_, Some(_)) => Err(Error::Config(
                "coupling `matrix` is only allowed with topology `custom`".into(),
            )),
            (Topology::AllToAll, None) => CouplingGraph::all_to_all(n, self.strength),
            (Topology::NearestNeighbour, None) => CouplingGraph::nearest_neighbour(n, self.strength),
        }
    }
}

/// Uniform time grid `start, start + dt, ..., end` in us.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub start: f64,
    pub end: f64,
    pub dt: f64,
}

impl TimeGrid {
    pub fn new(start: f64, end: f64, dt: f64) -> Result<Self> {
        let g = Self { start, end, dt };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidGrid(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.start >= 0.0) || !(self.end >= self.start) || !self.end.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "need 0 <= start <= end, got [{}, {}]",
                self.start, self.end
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        ((self.end - self.start) / self.dt + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid points, each computed as `start + i dt`.
    pub fn times(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| self.start + i as f64 * self.dt)
            .collect()
    }
}

/// Values of one swept parameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scale", rename_all = "snake_case", deny_unknown_fields)]
pub enum Axis {
    Linear { start: f64, end: f64, points: usize },
    Log { start: f64, end: f64, points: usize },
    Values { values: Vec<f64> },
}

impl Axis {
    /// Strictly increasing axis values.
    pub fn values(&self) -> Result<Vec<f64>> {
        let v = match self {
            Axis::Linear { start, end, points } => spaced(*start, *end, *points, |x| x, |x| x)?,
            Axis::Log { start, end, points } => {
                if !(*start > 0.0) {
                    return Err(Error::InvalidGrid("log axis needs a positive start".into()));
                }
                spaced(start.log10(), end.log10(), *points, |x| x, |x| 10f64.powf(x))?
            }
            Axis::Values { values } => values.clone(),
        };
        if v.is_empty() {
            return Err(Error::InvalidGrid("axis has no points".into()));
        }
        if v.iter().any(|x| !x.is_finite()) || v.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid(
                "axis values must be finite and strictly increasing".into(),
            ));
        }
        Ok(v)
    }
}

fn spaced(
    a: f64,
    b: f64,
    points: usize,
    pre: impl Fn(f64) -> f64,
    post: impl Fn(f64) -> f64,
) -> Result<Vec<f64>> {
    match points {
        0 => Err(Error::InvalidGrid("axis needs at least one point".into())),
        1 => Ok(vec![post(pre(a))]),
        _ => {
            let step = (b - a) / (points - 1) as f64;
            Ok((0..points).map(|i| post(a + i as f64 * step)).collect())
        }
    }
}

/// What a scenario varies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SweepSpec {
    /// Entanglement along a time grid.
    Time { grid: TimeGrid },
    /// `J12 x J23` grid at a fixed time (J13 from the base coupling).
    Couplings { j12: Axis, j23: Axis, t: f64 },
    /// Uniform detuning of every qubit, each value followed along a time grid.
    Detuning { delta: Axis, grid: TimeGrid },
    /// Uniform drive of every qubit at a fixed time.
    Drive { omega: Axis, t: f64 },
    /// `J12` only, at a fixed time.
    J12 { j12: Axis, t: f64 },
}

impl SweepSpec {
    pub fn name(&self) -> &'static str {
        match self {
            SweepSpec::Time { .. } => "time",
            SweepSpec::Couplings { .. } => "j12_j23",
            SweepSpec::Detuning { .. } => "delta",
            SweepSpec::Drive { .. } => "omega",
            SweepSpec::J12 { .. } => "j12",
        }
    }

    /// Column names of the swept coordinates.
    pub fn axis_names(&self) -> Vec<&'static str> {
        match self {
            SweepSpec::Time { .. } => vec!["t_us"],
            SweepSpec::Couplings { .. } => vec!["J12", "J23"],
            SweepSpec::Detuning { .. } => vec!["delta", "t_us"],
            SweepSpec::Drive { .. } => vec!["omega"],
            SweepSpec::J12 { .. } => vec!["J12"],
        }
    }
}

fn coherent() -> InitialState {
    InitialState::Coherent
}

/// A fully resolved simulation setup.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub qubits: Vec<QubitParams>,
    pub coupling: CouplingSpec,
    #[serde(default = "coherent")]
    pub initial_state: InitialState,
    pub sweep: SweepSpec,
    #[serde(default)]
    pub thresholds: ClassThresholds,
}

impl Scenario {
    pub fn n(&self) -> usize {
        self.qubits.len()
    }

    pub fn coupling_graph(&self) -> Result<CouplingGraph> {
        self.coupling.resolve(self.n())
    }

    pub fn hamiltonian(&self) -> Result<HamiltonianMatrix> {
        build_hamiltonian(&self.qubits, &self.coupling_graph()?)
    }

    pub fn initial(&self) -> Result<StateVector> {
        self.initial_state.prepare(self.n())
    }

    pub fn validate(&self) -> Result<()> {
        self.hamiltonian()?;
        self.initial()?;
        match &self.sweep {
            SweepSpec::Time { grid } => grid.validate()?,
            SweepSpec::Couplings { j12, j23, t } => {
                self.need_pairs(&[(0, 1), (1, 2)])?;
                j12.values()?;
                j23.values()?;
                check_time(*t)?;
            }
            SweepSpec::Detuning { delta, grid } => {
                delta.values()?;
                grid.validate()?;
            }
            SweepSpec::Drive { omega, t } => {
                if omega.values()?.iter().any(|&w| w < 0.0) {
                    return Err(Error::InvalidGrid("drive values must be non-negative".into()));
                }
                check_time(*t)?;
            }
            SweepSpec::J12 { j12, t } => {
                self.need_pairs(&[(0, 1)])?;
                j12.values()?;
                check_time(*t)?;
            }
        }
        Ok(())
    }

    fn need_pairs(&self, pairs: &[(usize, usize)]) -> Result<()> {
        let max = pairs.iter().map(|&(_, k)| k).max().unwrap_or(0);
        if self.n() <= max {
            return Err(Error::Config(format!(
                "sweep `{}` needs at least {} qubits",
                self.sweep.name(),
                max + 1
            )));
        }
        Ok(())
    }

    /// Evolution period of the first qubit, if it is in the symmetric phase.
    pub fn period(&self) -> Option<f64> {
        self.qubits.first().and_then(|q| evolution_period(q).ok())
    }

    /// `[0, T]` with `T` the first-qubit period, else the time grid or the default horizon.
    pub fn default_window(&self) -> (f64, f64) {
        if let Some(t) = self.period() {
            return (0.0, t);
        }
        match &self.sweep {
            SweepSpec::Time { grid } | SweepSpec::Detuning { grid, .. } => (grid.start, grid.end),
            _ => (0.0, DEFAULT_HORIZON),
        }
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidGrid(format!("analysis time must be >= 0, got {t}")));
    }
    Ok(())
}

/// `dt = 0.01` over `[0, 2 T]` when the first qubit has a period, else `[0, 20]`.
pub fn default_time_grid(qubits: &[QubitParams]) -> TimeGrid {
    let end = qubits
        .first()
        .and_then(|q| evolution_period(q).ok())
        .map(|t| 2.0 * t)
        .unwrap_or(DEFAULT_HORIZON);
    TimeGrid {
        start: 0.0,
        end,
        dt: DEFAULT_DT,
    }
}
