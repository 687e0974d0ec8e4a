//! Optimum and signature-time searches over time and drive strength.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{InitialState, Propagator, StateVector};
use crate::entanglement::{
    concurrence, entropy, partial_trace, report_with, three_tangle, ClassThresholds,
    EntanglementReport, ReducedDensityMatrix, StateClass,
};
use crate::error::{Error, Result};
use crate::experiments::scenario::{CouplingSpec, Scenario, SweepSpec, TimeGrid};
use crate::hamiltonian::{evolution_period, HamiltonianMatrix, QubitParams};

/// Default grid resolution of time searches, in us.
pub const DEFAULT_SEARCH_DT: f64 = 0.005;

/// Default drive-grid step of [`find_optimal_drive`], in rad/us.
pub const DEFAULT_OMEGA_STEP: f64 = 1e-3;

const GOLDEN_TOL: f64 = 1e-7;
const BISECTION_TOL: f64 = 1e-7;

/// Quantity optimized by [`find_optimal_time`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Objective {
    /// Largest three-tangle.
    MaxTau,
    /// Smallest of the largest pairwise concurrence.
    MinMaxPairwiseConcurrence,
    /// Largest of the smallest single-qubit entropy.
    MaxMinEntropy,
    /// Largest concurrence of one pair, 0-based.
    MaxConcurrence(usize, usize),
}

impl Objective {
    pub const NAMES: [&'static str; 4] = [
        "max_tau",
        "min_max_pairwise_concurrence",
        "max_min_entropy",
        "max_concurrence_<jk>",
    ];

    /// Value reported for `r`.
    pub fn value(&self, r: &EntanglementReport) -> Result<f64> {
        match *self {
            Objective::MaxTau => r.tangle.ok_or_else(|| {
                Error::Unsupported("max_tau needs a three-qubit scenario".into())
            }),
            Objective::MinMaxPairwiseConcurrence => Ok(r.max_concurrence()),
            Objective::MaxMinEntropy => Ok(r.min_entropy()),
            Objective::MaxConcurrence(j, k) => r.concurrence(j, k).ok_or_else(|| {
                Error::InvalidParameter {
                    name: "objective".into(),
                    value: (10 * (j + 1) + k + 1) as f64,
                    reason: "pair outside the register",
                }
            }),
        }
    }

    /// Value at `psi`, computing only the measures the objective needs.
    pub fn value_of(&self, psi: &StateVector) -> Result<f64> {
        let n = psi.n();
        let pair = |j: usize, k: usize| -> Result<f64> {
            let rho = if n == 2 {
                ReducedDensityMatrix::pure(psi)?
            } else {
                partial_trace(psi, &[j, k])?
            };
            concurrence(&rho)
        };
        match *self {
            Objective::MaxTau => three_tangle(psi),
            Objective::MinMaxPairwiseConcurrence => {
                let mut m = 0.0f64;
                for j in 0..n {
                    for k in j + 1..n {
                        m = m.max(pair(j, k)?);
                    }
                }
                Ok(m)
            }
            Objective::MaxMinEntropy => (0..n).try_fold(f64::INFINITY, |m, j| {
                Ok(m.min(entropy(&partial_trace(psi, &[j])?)))
            }),
            Objective::MaxConcurrence(j, k) => {
                if k >= n {
                    return Err(Error::InvalidParameter {
                        name: "objective".into(),
                        value: (10 * (j + 1) + k + 1) as f64,
                        reason: "pair outside the register",
                    });
                }
                pair(j, k)
            }
        }
    }

    /// Larger is better.
    fn score(&self, value: f64) -> f64 {
        match self {
            Objective::MinMaxPairwiseConcurrence => -value,
            _ => value,
        }
    }
}

impl std::fmt::Display for Objective {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Objective::MaxTau => f.write_str("max_tau"),
            Objective::MinMaxPairwiseConcurrence => f.write_str("min_max_pairwise_concurrence"),
            Objective::MaxMinEntropy => f.write_str("max_min_entropy"),
            Objective::MaxConcurrence(j, k) => write!(f, "max_concurrence_{}{}", j + 1, k + 1),
        }
    }
}

impl std::str::FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max_tau" => return Ok(Objective::MaxTau),
            "min_max_pairwise_concurrence" => return Ok(Objective::MinMaxPairwiseConcurrence),
            "max_min_entropy" => return Ok(Objective::MaxMinEntropy),
            _ => {}
        }
        let pair = s.strip_prefix("max_concurrence_").map(|p| p.as_bytes());
        if let Some(&[a, b]) = pair {
            let (j, k) = (a.wrapping_sub(b'1') as usize, b.wrapping_sub(b'1') as usize);
            if j < k && k < 9 {
                return Ok(Objective::MaxConcurrence(j, k));
            }
        }
        Err(Error::Config(format!(
            "unknown objective `{s}` (expected one of {})",
            Self::NAMES.join(", ")
        )))
    }
}

impl TryFrom<String> for Objective {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Objective> for String {
    fn from(o: Objective) -> Self {
        o.to_string()
    }
}

/// Best time found by a search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Optimum {
    pub t: f64,
    pub value: f64,
}

/// Post-selected entanglement of one setup at arbitrary times.
pub struct Evaluator {
    propagator: Propagator,
    psi0: StateVector,
    thresholds: ClassThresholds,
}

impl Evaluator {
    pub fn new(h: &HamiltonianMatrix, psi0: StateVector, thresholds: ClassThresholds) -> Self {
        Self {
            propagator: Propagator::new(h),
            psi0,
            thresholds,
        }
    }

    pub fn from_scenario(s: &Scenario) -> Result<Self> {
        Ok(Self::new(&s.hamiltonian()?, s.initial()?, s.thresholds))
    }

    /// Post-selected state at `t`, `None` when post-selection fails.
    pub fn state_at(&self, t: f64) -> Result<Option<StateVector>> {
        match self.propagator.sample(&self.psi0, t) {
            Ok(s) => Ok(Some(s.state)),
            Err(Error::PostSelectionVanished { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    }

    /// States along a strictly increasing grid, `None` after a post-selection failure.
    pub fn states_along(&self, times: &[f64]) -> Result<Vec<Option<StateVector>>> {
        let tr = self.propagator.trajectory(&self.psi0, times)?;
        let mut out: Vec<_> = tr.samples.into_iter().map(|s| Some(s.state)).collect();
        out.resize(times.len(), None);
        Ok(out)
    }

    /// `None` when post-selection fails at `t`.
    pub fn at(&self, t: f64) -> Result<Option<EntanglementReport>> {
        match self.propagator.sample(&self.psi0, t) {
            Ok(s) => report_with(&s.state, t, &self.thresholds).map(Some),
            Err(Error::PostSelectionVanished { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    }

    /// Reports along a strictly increasing grid; entries after a post-selection failure are `None`.
    pub fn along(&self, times: &[f64]) -> Result<Vec<Option<EntanglementReport>>> {
        let tr = self.propagator.trajectory(&self.psi0, times)?;
        let mut out = tr
            .samples
            .iter()
            .map(|s| report_with(&s.state, s.t, &self.thresholds).map(Some))
            .collect::<Result<Vec<_>>>()?;
        out.resize(times.len(), None);
        Ok(out)
    }
}

fn window_grid(window: (f64, f64), dt: f64) -> Result<Vec<f64>> {
    let (a, b) = window;
    if !a.is_finite() || !b.is_finite() || !(b > a) {
        return Err(Error::EmptyWindow { start: a, end: b });
    }
    if a < 0.0 {
        return Err(Error::InvalidGrid(format!("window starts before 0: {a}")));
    }
    let g = TimeGrid::new(a, b, dt)?;
    let mut times = g.times();
    if b - times[times.len() - 1] > 1e-9 * b.max(1.0) {
        times.push(b);
    }
    Ok(times)
}

/// Golden-section maximization of `f` on `[a, b]`.
fn golden_max(mut a: f64, mut b: f64, f: impl Fn(f64) -> Result<f64>) -> Result<(f64, f64)> {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..200 {
        if b - a <= GOLDEN_TOL {
            break;
        }
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}

fn score_at(ev: &Evaluator, objective: Objective, t: f64) -> Result<f64> {
    Ok(match ev.state_at(t)? {
        Some(psi) => objective.score(objective.value_of(&psi)?),
        None => f64::NEG_INFINITY,
    })
}

/// Grid search at `dt` over `window`, then golden-section refinement around the best grid point.
pub fn find_optimal_time(
    s: &Scenario,
    window: (f64, f64),
    objective: Objective,
    dt: f64,
) -> Result<Optimum> {
    let ev = Evaluator::from_scenario(s)?;
    optimal_time(&ev, window, objective, dt)
}

pub fn optimal_time(
    ev: &Evaluator,
    window: (f64, f64),
    objective: Objective,
    dt: f64,
) -> Result<Optimum> {
    let times = window_grid(window, dt)?;
    let states = ev.states_along(&times)?;
    let mut best: Option<(usize, f64)> = None;
    for (i, psi) in states.iter().enumerate() {
        if let Some(psi) = psi {
            let sc = objective.score(objective.value_of(psi)?);
            if best.is_none_or(|(_, b)| sc > b) {
                best = Some((i, sc));
            }
        }
    }
    let (i, grid_score) = best.ok_or(Error::NotFound {
        start: window.0,
        end: window.1,
    })?;
    let lo = times[i.saturating_sub(1)];
    let hi = times[(i + 1).min(times.len() - 1)];
    let (mut t, mut sc) = (times[i], grid_score);
    if hi > lo {
        let (tg, sg) = golden_max(lo, hi, |x| score_at(ev, objective, x))?;
        if sg > sc {
            t = tg;
            sc = sg;
        }
    }
    Ok(Optimum {
        t,
        value: objective.score(sc),
    })
}

/// First time in `window` at which the state is classified as `class`.
///
/// The crossing is located on the `dt` grid and then bisected.
pub fn signature_onset(
    s: &Scenario,
    window: (f64, f64),
    class: StateClass,
    dt: f64,
) -> Result<f64> {
    let ev = Evaluator::from_scenario(s)?;
    onset(&ev, window, class, dt)
}

pub fn onset(ev: &Evaluator, window: (f64, f64), class: StateClass, dt: f64) -> Result<f64> {
    let times = window_grid(window, dt)?;
    let reports = ev.along(&times)?;
    let hit = |r: &Option<EntanglementReport>| r.as_ref().and_then(|r| r.class) == Some(class);
    let i = reports.iter().position(hit).ok_or(Error::NotFound {
        start: window.0,
        end: window.1,
    })?;
    if i == 0 {
        return Ok(times[0]);
    }
    let (mut a, mut b) = (times[i - 1], times[i]);
    while b - a > BISECTION_TOL {
        let m = 0.5 * (a + b);
        if hit(&ev.at(m)?) {
            b = m;
        } else {
            a = m;
        }
    }
    Ok(b)
}

/// First local maximum of the mean single-qubit entropy that exceeds `floor`.
pub fn first_entropy_peak(ev: &Evaluator, window: (f64, f64), dt: f64, floor: f64) -> Result<Optimum> {
    let times = window_grid(window, dt)?;
    let s: Vec<f64> = ev
        .along(&times)?
        .iter()
        .map(|r| r.as_ref().map_or(f64::NAN, |r| r.mean_entropy()))
        .collect();
    let i = (1..s.len().saturating_sub(1))
        .find(|&i| s[i] > floor && s[i] >= s[i - 1] && s[i] > s[i + 1])
        .ok_or(Error::NotFound {
            start: window.0,
            end: window.1,
        })?;
    let (t, v) = golden_max(times[i - 1], times[i + 1], |x| {
        Ok(ev.at(x)?.map_or(f64::NEG_INFINITY, |r| r.mean_entropy()))
    })?;
    Ok(if v >= s[i] { Optimum { t, value: v } } else { Optimum { t: times[i], value: s[i] } })
}

/// Setup of a drive-strength search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSearch {
    pub gamma: f64,
    pub coupling: CouplingSpec,
    #[serde(default = "three")]
    pub n: usize,
    #[serde(default = "coherent")]
    pub initial_state: InitialState,
    /// Outer time window; each drive is searched over its intersection with `[0, T(omega)]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_window: Option<(f64, f64)>,
    /// Drive range, `(gamma/4, gamma/2]` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_range: Option<(f64, f64)>,
    #[serde(default = "omega_step")]
    pub omega_step: f64,
    #[serde(default = "search_dt")]
    pub dt: f64,
}

fn three() -> usize {
    3
}
fn coherent() -> InitialState {
    InitialState::Coherent
}
fn omega_step() -> f64 {
    DEFAULT_OMEGA_STEP
}
fn search_dt() -> f64 {
    DEFAULT_SEARCH_DT
}

impl DriveSearch {
    pub fn new(gamma: f64, coupling: CouplingSpec) -> Self {
        Self {
            gamma,
            coupling,
            n: 3,
            initial_state: InitialState::Coherent,
            t_window: None,
            omega_range: None,
            omega_step: DEFAULT_OMEGA_STEP,
            dt: DEFAULT_SEARCH_DT,
        }
    }

    /// Drive values scanned, all strictly inside the symmetric phase.
    pub fn omegas(&self) -> Result<Vec<f64>> {
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            return Err(Error::InvalidParameter {
                name: "gamma".into(),
                value: self.gamma,
                reason: "drive search needs gamma > 0",
            });
        }
        if !(self.omega_step > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "omega step must be positive, got {}",
                self.omega_step
            )));
        }
        let ep = self.gamma / 4.0;
        let (lo, hi) = self.omega_range.unwrap_or((ep, 2.0 * ep));
        if !(hi > lo) || !(hi > ep) {
            return Err(Error::InvalidGrid(format!(
                "drive range [{lo}, {hi}] has no point above the exceptional point {ep}"
            )));
        }
        let steps = ((hi - lo) / self.omega_step + 1e-9).floor() as usize;
        Ok((0..=steps)
            .map(|i| hi - i as f64 * self.omega_step)
            .filter(|&w| w > ep * (1.0 + 1e-9) && w >= lo)
            .rev()
            .collect())
    }

    fn objective(&self) -> Result<Objective> {
        match self.n {
            2 => Ok(Objective::MaxConcurrence(0, 1)),
            3 => Ok(Objective::MaxTau),
            n => Err(Error::Unsupported(format!(
                "drive search supports 2 or 3 qubits, got {n}"
            ))),
        }
    }

    /// Best entanglement reachable at drive `omega`.
    pub fn best_at(&self, omega: f64) -> Result<Optimum> {
        let q = QubitParams::resonant(self.gamma, omega)?;
        let period = evolution_period(&q)?;
        let (a, b) = self.t_window.unwrap_or((0.0, period));
        let window = (a.max(0.0), b.min(period));
        let s = Scenario {
            name: "drive-search".into(),
            description: String::new(),
            qubits: vec![q; self.n],
            coupling: self.coupling.clone(),
            initial_state: self.initial_state.clone(),
            sweep: SweepSpec::Time {
                grid: TimeGrid {
                    start: window.0,
                    end: window.1,
                    dt: self.dt,
                },
            },
            thresholds: ClassThresholds::default(),
        };
        find_optimal_time(&s, window, self.objective()?, self.dt)
    }
}

/// Drive and time of the best entanglement over a drive grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriveOptimum {
    pub omega: f64,
    pub t: f64,
    pub value: f64,
}

/// Drive maximizing the best tangle (concurrence for two qubits) over the time window.
pub fn find_optimal_drive(search: &DriveSearch) -> Result<DriveOptimum> {
    search.objective()?;
    let omegas = search.omegas()?;
    let results: Vec<Result<Optimum>> = omegas.par_iter().map(|&w| search.best_at(w)).collect();
    let mut best: Option<DriveOptimum> = None;
    for (&omega, r) in omegas.iter().zip(results) {
        let o = match r {
            Ok(o) => o,
            Err(Error::NotFound { .. } | Error::EmptyWindow { .. }) => continue,
            Err(e) => return Err(e),
        };
        if best.is_none_or(|b| o.value > b.value) {
            best = Some(DriveOptimum {
                omega,
                t: o.t,
                value: o.value,
            });
        }
    }
    best.ok_or_else(|| {
        let (a, b) = search.t_window.unwrap_or((0.0, f64::INFINITY));
        Error::NotFound { start: a, end: b }
    })
}

fn three_qubit(q: QubitParams, coupling: CouplingSpec, grid: TimeGrid) -> Scenario {
    Scenario {
        name: "search".into(),
        description: String::new(),
        qubits: vec![q; 3],
        coupling,
        initial_state: InitialState::Coherent,
        sweep: SweepSpec::Time { grid },
        thresholds: ClassThresholds::default(),
    }
}

/// How an optimal time is located in [`timescale_comparison`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Locator {
    /// First local maximum of the mean entropy.
    EntropyPeak,
    /// First time the state is classified `GHZ_LIKE`.
    GhzOnset,
}

/// Drive of the Hermitian baseline.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HermitianDrive {
    Undriven,
    /// Same drive as the lossy register.
    Driven,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimescaleOptions {
    pub gamma: f64,
    pub omega: f64,
    pub hermitian_drive: HermitianDrive,
    pub lossy_locator: Locator,
    pub hermitian_locator: Locator,
    /// Search horizon, in us.
    pub horizon: f64,
    pub dt: f64,
}

impl Default for TimescaleOptions {
    fn default() -> Self {
        Self {
            gamma: 6.0,
            omega: 2.04,
            hermitian_drive: HermitianDrive::Undriven,
            lossy_locator: Locator::EntropyPeak,
            hermitian_locator: Locator::GhzOnset,
            horizon: 20.0,
            dt: DEFAULT_SEARCH_DT,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimescaleComparison {
    pub j: f64,
    pub t_lossy: f64,
    pub t_hermitian: f64,
    /// `t_lossy / t_hermitian`.
    pub ratio: f64,
}

fn locate(s: &Scenario, locator: Locator, horizon: f64, dt: f64) -> Result<f64> {
    let ev = Evaluator::from_scenario(s)?;
    let window = (0.0, horizon);
    match locator {
        Locator::EntropyPeak => Ok(first_entropy_peak(&ev, window, dt, 0.05)?.t),
        Locator::GhzOnset => onset(&ev, window, StateClass::GhzLike, dt),
    }
}

/// Optimal entangling time of an all-to-all lossy register relative to its Hermitian counterpart.
pub fn timescale_comparison(j: f64, opts: &TimescaleOptions) -> Result<TimescaleComparison> {
    if !(j > 0.0) || !j.is_finite() {
        return Err(Error::InvalidParameter {
            name: "J".into(),
            value: j,
            reason: "timescale comparison needs J > 0",
        });
    }
    let coupling = CouplingSpec::uniform(super::scenario::Topology::AllToAll, j);
    let grid = TimeGrid::new(0.0, opts.horizon, opts.dt)?;
    let lossy = three_qubit(
        QubitParams::resonant(opts.gamma, opts.omega)?,
        coupling.clone(),
        grid,
    );
    let herm_omega = match opts.hermitian_drive {
        HermitianDrive::Undriven => 0.0,
        HermitianDrive::Driven => opts.omega,
    };
    let herm = three_qubit(QubitParams::resonant(0.0, herm_omega)?, coupling, grid);
    let t_lossy = locate(&lossy, opts.lossy_locator, opts.horizon, opts.dt)?;
    let t_hermitian = locate(&herm, opts.hermitian_locator, opts.horizon, opts.dt)?;
    Ok(TimescaleComparison {
        j,
        t_lossy,
        t_hermitian,
        ratio: t_lossy / t_hermitian,
    })
}
