use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{Propagator, StateVector};
use crate::entanglement::{report_with, ClassThresholds, EntanglementReport};
use crate::error::{Error, Result};
use crate::experiments::scenario::{Axis, CouplingSpec, Scenario, SweepSpec, Topology};
use crate::hamiltonian::{
    build_hamiltonian, classify_phase, CouplingGraph, PtPhase, QubitParams, DEFAULT_EP_TOL,
};
use crate::dynamics::InitialState;

/// Outcome of one sweep point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum PointStatus {
    Ok,
    /// Post-selection failed; no report.
    Vanished,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    /// Swept coordinates, in the order of [`SweepResult::axis_names`].
    pub coords: Vec<f64>,
    pub status: PointStatus,
    pub raw_norm: Option<f64>,
    pub phase: Option<PtPhase>,
    pub report: Option<EntanglementReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub scenario: String,
    pub sweep: String,
    pub axis_names: Vec<String>,
    /// Drive value separating the broken and symmetric phases, for drive sweeps.
    pub phase_boundary: Option<f64>,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    pub fn reports(&self) -> impl Iterator<Item = &EntanglementReport> {
        self.points.iter().filter_map(|p| p.report.as_ref())
    }

    pub fn failed(&self) -> usize {
        self.points
            .iter()
            .filter(|p| p.status != PointStatus::Ok)
            .count()
    }
}

fn point(
    coords: Vec<f64>,
    sample: Result<crate::dynamics::Sample>,
    t: f64,
    th: &ClassThresholds,
) -> Result<SweepPoint> {
    match sample {
        Ok(s) => Ok(SweepPoint {
            coords,
            status: PointStatus::Ok,
            raw_norm: Some(s.raw_norm),
            phase: None,
            report: Some(report_with(&s.state, t, th)?),
        }),
        Err(Error::PostSelectionVanished { .. }) => Ok(vanished(coords)),
        Err(e) => Err(e),
    }
}

fn vanished(coords: Vec<f64>) -> SweepPoint {
    SweepPoint {
        coords,
        status: PointStatus::Vanished,
        raw_norm: None,
        phase: None,
        report: None,
    }
}

fn time_series(
    qubits: &[QubitParams],
    graph: &CouplingGraph,
    psi0: &StateVector,
    times: &[f64],
    prefix: &[f64],
    th: &ClassThresholds,
) -> Result<Vec<SweepPoint>> {
    let h = build_hamiltonian(qubits, graph)?;
    let tr = Propagator::new(&h).trajectory(psi0, times)?;
    let mut out = Vec::with_capacity(times.len());
    for s in &tr.samples {
        let mut c = prefix.to_vec();
        c.push(s.t);
        out.push(SweepPoint {
            coords: c,
            status: PointStatus::Ok,
            raw_norm: Some(s.raw_norm),
            phase: None,
            report: Some(report_with(&s.state, s.t, th)?),
        });
    }
    for &t in &times[out.len()..] {
        let mut c = prefix.to_vec();
        c.push(t);
        out.push(vanished(c));
    }
    Ok(out)
}

fn at_time(
    qubits: &[QubitParams],
    graph: &CouplingGraph,
    psi0: &StateVector,
    t: f64,
    coords: Vec<f64>,
    th: &ClassThresholds,
) -> Result<SweepPoint> {
    let h = build_hamiltonian(qubits, graph)?;
    point(coords, Propagator::new(&h).sample(psi0, t), t, th)
}

/// Evaluates every point of the scenario's sweep.
///
/// Points run in parallel; the result is ordered by axis index (first axis
/// outermost) whatever the completion order.
pub fn run_scenario(s: &Scenario) -> Result<SweepResult> {
    s.validate()?;
    let psi0 = s.initial()?;
    let graph = s.coupling_graph()?;
    let th = &s.thresholds;
    let mut phase_boundary = None;
    let points = match &s.sweep {
        SweepSpec::Time { grid } => time_series(&s.qubits, &graph, &psi0, &grid.times(), &[], th)?,
        SweepSpec::Detuning { delta, grid } => {
            let times = grid.times();
            let blocks = delta
                .values()?
                .par_iter()
                .map(|&d| {
                    let qs: Vec<_> = s
                        .qubits
                        .iter()
                        .map(|q| QubitParams { delta: d, ..*q })
                        .collect();
                    time_series(&qs, &graph, &psi0, &times, &[d], th)
                })
                .collect::<Result<Vec<_>>>()?;
            blocks.into_iter().flatten().collect()
        }
        SweepSpec::Drive { omega, t } => {
            if let Some(q) = s.qubits.first() {
                if q.gamma > 0.0 && s.qubits.iter().all(|p| p.gamma == q.gamma) {
                    phase_boundary = Some(q.gamma / 4.0);
                }
            }
            omega
                .values()?
                .par_iter()
                .map(|&w| {
                    let qs: Vec<_> = s
                        .qubits
                        .iter()
                        .map(|q| QubitParams { omega: w, ..*q })
                        .collect();
                    let mut p = at_time(&qs, &graph, &psi0, *t, vec![w], th)?;
                    p.phase = drive_phase(&qs);
                    Ok(p)
                })
                .collect::<Result<Vec<_>>>()?
        }
        SweepSpec::Couplings { j12, j23, t } => {
            let a = j12.values()?;
            let b = j23.values()?;
            let pairs: Vec<(f64, f64)> = a
                .iter()
                .flat_map(|&x| b.iter().map(move |&y| (x, y)))
                .collect();
            pairs
                .par_iter()
                .map(|&(x, y)| {
                    let g = graph.clone().with_pair(0, 1, x)?.with_pair(1, 2, y)?;
                    at_time(&s.qubits, &g, &psi0, *t, vec![x, y], th)
                })
                .collect::<Result<Vec<_>>>()?
        }
        SweepSpec::J12 { j12, t } => j12
            .values()?
            .par_iter()
            .map(|&x| {
                let g = graph.clone().with_pair(0, 1, x)?;
                at_time(&s.qubits, &g, &psi0, *t, vec![x], th)
            })
            .collect::<Result<Vec<_>>>()?,
    };
    Ok(SweepResult {
        scenario: s.name.clone(),
        sweep: s.sweep.name().to_string(),
        axis_names: s.sweep.axis_names().iter().map(|x| x.to_string()).collect(),
        phase_boundary,
        points,
    })
}

/// Phase of a uniformly driven, uniformly lossy resonant register; `None` otherwise.
fn drive_phase(qs: &[QubitParams]) -> Option<PtPhase> {
    let q = qs.first()?;
    if q.gamma == 0.0 || qs.iter().any(|p| p != q) {
        return None;
    }
    classify_phase(q, DEFAULT_EP_TOL).ok().map(|c| c.phase)
}

/// Entropies against drive strength at a fixed time for an all-to-all coupled lossy trio.
pub fn phase_sweep(omega: &Axis, gamma: f64, j: f64, t: f64) -> Result<SweepResult> {
    if omega.values()?.iter().any(|&w| !(w > 0.0)) {
        return Err(Error::InvalidGrid("drive values must be positive".into()));
    }
    let s = Scenario {
        name: "phase-sweep".into(),
        description: String::new(),
        qubits: vec![QubitParams::resonant(gamma, 0.0)?; 3],
        coupling: CouplingSpec::uniform(Topology::AllToAll, j),
        initial_state: InitialState::Coherent,
        sweep: SweepSpec::Drive {
            omega: omega.clone(),
            t,
        },
        thresholds: ClassThresholds::default(),
    };
    run_scenario(&s)
}
