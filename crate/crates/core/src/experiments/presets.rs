//! Built-in scenarios and a few companion controls.

use serde::Serialize;

use crate::dynamics::InitialState;
use crate::entanglement::ClassThresholds;
use crate::experiments::scenario::{Axis, CouplingSpec, Scenario, SweepSpec, TimeGrid, Topology};
use crate::hamiltonian::QubitParams;

/// Loss rate shared by the lossy presets, rad/us.
pub const GAMMA: f64 = 6.0;
/// Analysis time of the weak-coupling presets, us.
pub const T_OPT: f64 = 3.23;
/// Analysis times of the strong-coupling drive sweeps, us.
pub const T_EARLY: f64 = 1.08;
pub const T_LATE: f64 = 13.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
}

const PRESETS: &[Preset] = &[
    Preset { name: "fig1a", description: "pairwise concurrences, all-to-all, Omega=1.576, J=1e-3" },
    Preset { name: "fig1a-j1e-4", description: "pairwise concurrences, all-to-all, Omega=1.529, J=1e-4" },
    Preset { name: "fig1a-j1e-5", description: "pairwise concurrences, all-to-all, Omega=1.512, J=1e-5" },
    Preset { name: "fig1a-inset", description: "qubit 3 decoupled, C12 of the remaining pair" },
    Preset { name: "fig1a-fff", description: "as fig1a but starting from |fff>" },
    Preset { name: "fig1b", description: "entropies and tangle, nearest-neighbour chain, J=1e-3" },
    Preset { name: "fig2a", description: "tangle over a log J12 x J23 grid at t=3.23, J13=1e-3" },
    Preset { name: "fig2b", description: "entropies vs time for detuning 0, 1e-3, 1e-2, 1e-1" },
    Preset { name: "fig2c", description: "entropies vs J12 at t=3.23, J23=1e-3, J13=0" },
    Preset { name: "fig3a", description: "hybrid: three lossy qubits" },
    Preset { name: "fig3b", description: "hybrid: qubit 1 Hermitian, qubits 2-3 lossy" },
    Preset { name: "fig3c", description: "hybrid: qubits 1-2 Hermitian, qubit 3 lossy" },
    Preset { name: "fig3d", description: "hybrid: three Hermitian qubits" },
    Preset { name: "fig5a", description: "undriven Hermitian qubits, J=0.1" },
    Preset { name: "fig5b", description: "lossy qubits, J=0.1, Omega=2.04" },
    Preset { name: "fig5b-hermitian", description: "driven Hermitian qubits, J=0.1, Omega=2.04" },
    Preset { name: "fig5c", description: "entropies vs drive at t=1.08, J=0.1, lossy" },
    Preset { name: "fig5c-hermitian", description: "entropies vs drive at t=1.08, J=0.1, Hermitian" },
    Preset { name: "fig5d", description: "entropies vs drive at t=13, J=0.1, lossy" },
    Preset { name: "fig5d-hermitian", description: "entropies vs drive at t=13, J=0.1, Hermitian" },
];

pub fn presets() -> &'static [Preset] {
    PRESETS
}

fn time(end: f64) -> SweepSpec {
    SweepSpec::Time {
        grid: TimeGrid {
            start: 0.0,
            end,
            dt: 0.01,
        },
    }
}

fn uniform(gamma: f64, omega: f64) -> Vec<QubitParams> {
    vec![
        QubitParams {
            delta: 0.0,
            gamma,
            omega,
        };
        3
    ]
}

fn hybrid(gammas: [f64; 3]) -> Vec<QubitParams> {
    gammas
        .iter()
        .map(|&gamma| QubitParams {
            delta: 0.0,
            gamma,
            omega: 1.576,
        })
        .collect()
}

fn drive_axis() -> Axis {
    Axis::Linear {
        start: 0.0,
        end: 8.0,
        points: 401,
    }
}

/// Resolved scenario of a built-in preset.
pub fn preset(name: &str) -> Option<Scenario> {
    let info = PRESETS.iter().find(|p| p.name == name)?;
    let all = |j| CouplingSpec::uniform(Topology::AllToAll, j);
    let chain = |j| CouplingSpec::uniform(Topology::NearestNeighbour, j);
    let (qubits, coupling, initial_state, sweep) = match name {
        "fig1a" => (uniform(GAMMA, 1.576), all(1e-3), InitialState::Coherent, time(8.0)),
        "fig1a-j1e-4" => (uniform(GAMMA, 1.529), all(1e-4), InitialState::Coherent, time(12.0)),
        "fig1a-j1e-5" => (uniform(GAMMA, 1.512), all(1e-5), InitialState::Coherent, time(12.0)),
        "fig1a-inset" => (
            uniform(GAMMA, 1.576),
            CouplingSpec::custom(vec![
                vec![0.0, 1e-3, 0.0],
                vec![1e-3, 0.0, 0.0],
                vec![0.0, 0.0, 0.0],
            ]),
            InitialState::Coherent,
            time(8.0),
        ),
        "fig1a-fff" => (uniform(GAMMA, 1.576), all(1e-3), InitialState::AllF, time(8.0)),
        "fig1b" => (uniform(GAMMA, 1.576), chain(1e-3), InitialState::Coherent, time(10.0)),
        "fig2a" => {
            let ax = Axis::Log {
                start: 1e-5,
                end: 1e-1,
                points: 61,
            };
            (
                uniform(GAMMA, 1.576),
                all(1e-3),
                InitialState::Coherent,
                SweepSpec::Couplings {
                    j12: ax.clone(),
                    j23: ax,
                    t: T_OPT,
                },
            )
        }
        "fig2b" => (
            uniform(GAMMA, 1.576),
            all(1e-3),
            InitialState::Coherent,
            SweepSpec::Detuning {
                delta: Axis::Values {
                    values: vec![0.0, 1e-3, 1e-2, 1e-1],
                },
                grid: TimeGrid {
                    start: 0.0,
                    end: 8.0,
                    dt: 0.01,
                },
            },
        ),
        "fig2c" => (
            uniform(GAMMA, 1.576),
            chain(1e-3),
            InitialState::Coherent,
            SweepSpec::J12 {
                j12: Axis::Linear {
                    start: 0.0,
                    end: 1e-2,
                    points: 201,
                },
                t: T_OPT,
            },
        ),
        "fig3a" => (hybrid([GAMMA; 3]), all(1e-3), InitialState::Coherent, time(8.0)),
        "fig3b" => (hybrid([0.0, GAMMA, GAMMA]), all(1e-3), InitialState::Coherent, time(8.0)),
        "fig3c" => (hybrid([0.0, 0.0, GAMMA]), all(1e-3), InitialState::Coherent, time(8.0)),
        "fig3d" => (hybrid([0.0; 3]), all(1e-3), InitialState::Coherent, time(8.0)),
        "fig5a" => (uniform(0.0, 0.0), all(0.1), InitialState::Coherent, time(20.0)),
        "fig5b" => (uniform(GAMMA, 2.04), all(0.1), InitialState::Coherent, time(20.0)),
        "fig5b-hermitian" => (uniform(0.0, 2.04), all(0.1), InitialState::Coherent, time(20.0)),
        "fig5c" | "fig5c-hermitian" | "fig5d" | "fig5d-hermitian" => {
            let gamma = if name.ends_with("hermitian") { 0.0 } else { GAMMA };
            let t = if name.starts_with("fig5c") { T_EARLY } else { T_LATE };
            (
                uniform(gamma, 0.0),
                all(0.1),
                InitialState::Coherent,
                SweepSpec::Drive {
                    omega: drive_axis(),
                    t,
                },
            )
        }
        _ => unreachable!("preset table and builder disagree on `{name}`"),
    };
    Some(Scenario {
        name: info.name.to_string(),
        description: info.description.to_string(),
        qubits,
        coupling,
        initial_state,
        sweep,
        thresholds: ClassThresholds::default(),
    })
}
