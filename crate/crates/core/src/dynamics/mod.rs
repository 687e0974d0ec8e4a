//! Time evolution under `exp(-iHt)` followed by post-selection.
//!
//! Propagation always goes through the matrix exponential; the spectral
//! decomposition in [`spectral`] is an analysis tool and breaks down at
//! exceptional points where `H` is defective.

mod spectral;
mod state;

use nalgebra::{DMatrix, DVector};

pub use spectral::{decompose, SpectralDecomposition, CLUSTER_TOL, UNUSABLE_CONDITION};
pub use state::{InitialState, StateVector};

use crate::error::{Error, Result};
use crate::expm::expm;
use crate::hamiltonian::HamiltonianMatrix;
use crate::C64;

/// Post-selection floor on the state norm.
pub const DEFAULT_NORM_FLOOR: f64 = 1e-12;

/// Step lengths closer than this (relative to the time) share a propagator.
const SAME_STEP_TOL: f64 = 1e-12;

/// `exp(-iHt) psi0`, unnormalized.
pub fn propagate(h: &HamiltonianMatrix, psi0: &StateVector, t: f64) -> Result<StateVector> {
    check_dims(h, psi0)?;
    check_time(t)?;
    let u = expm(&(h.matrix() * C64::new(0.0, -t)))?;
    StateVector::from_vector(psi0.n(), u * psi0.amplitudes())
        .map_err(|e| vanished_or(e, 0.0, DEFAULT_NORM_FLOOR))
}

/// Divides by the Euclidean norm (post-selection).
pub fn normalize(psi: &StateVector) -> Result<StateVector> {
    normalize_with_floor(psi, DEFAULT_NORM_FLOOR)
}

pub fn normalize_with_floor(psi: &StateVector, floor: f64) -> Result<StateVector> {
    let norm = psi.norm();
    if !(norm > floor) {
        return Err(Error::PostSelectionVanished { norm, floor });
    }
    StateVector::from_vector(psi.n(), psi.amplitudes() / C64::new(norm, 0.0))
}

/// A post-selected state at one time.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub t: f64,
    /// Normalized state.
    pub state: StateVector,
    /// Norm of `exp(-iHt) psi0` before normalization.
    pub raw_norm: f64,
}

/// Post-selection failure that ends a trajectory.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Termination {
    pub t: f64,
    /// Norm relative to the uniform decay factor at the failing time.
    pub relative_norm: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub terminated: Option<Termination>,
}

/// Propagator with the trace of `H` split off.
///
/// `exp(-iHt) = exp(-i c t) exp(-i (H - c) t)` with `c = tr(H) / 2^n`. The
/// scalar factor carries the decay shared by every basis state, which
/// post-selection removes exactly, so it is applied analytically to the
/// reported raw norm. The norm floor is tested on the remaining,
/// state-dependent part.
#[derive(Clone, Debug)]
pub struct Propagator {
    n: usize,
    shift: C64,
    generator: DMatrix<C64>,
    floor: f64,
}

impl Propagator {
    pub fn new(h: &HamiltonianMatrix) -> Self {
        Self::with_floor(h, DEFAULT_NORM_FLOOR)
    }

    pub fn with_floor(h: &HamiltonianMatrix, floor: f64) -> Self {
        let dim = h.dim();
        let shift = h.trace() / C64::new(dim as f64, 0.0);
        let generator = h.matrix() - DMatrix::<C64>::identity(dim, dim) * shift;
        Self {
            n: h.n(),
            shift,
            generator,
            floor,
        }
    }

    /// Post-selected state at a single time.
    pub fn sample(&self, psi0: &StateVector, t: f64) -> Result<Sample> {
        check_time(t)?;
        self.check_state(psi0)?;
        let v = self.step_matrix(t)? * psi0.amplitudes();
        self.finish(t, v)
    }

    /// Post-selected states on a strictly increasing grid of times.
    ///
    /// Consecutive states are linked by step propagators, cached per step
    /// length so a uniform grid costs a single matrix exponential. Sampling
    /// stops at the first post-selection failure.
    pub fn trajectory(&self, psi0: &StateVector, times: &[f64]) -> Result<Trajectory> {
        self.check_state(psi0)?;
        check_grid(times)?;
        let mut samples = Vec::with_capacity(times.len());
        let mut step: Option<(f64, DMatrix<C64>)> = None;
        let mut current: Option<(f64, DVector<C64>)> = None;
        for &t in times {
            let v = match &current {
                None => self.step_matrix(t)? * psi0.amplitudes(),
                Some((prev_t, prev)) => {
                    let dt = t - prev_t;
                    let tol = SAME_STEP_TOL * t.max(1.0);
                    if !matches!(&step, Some((h, _)) if (h - dt).abs() <= tol) {
                        step = Some((dt, self.step_matrix(dt)?));
                    }
                    &step.as_ref().expect("step cached above").1 * prev
                }
            };
            match self.finish(t, v.clone()) {
                Ok(s) => samples.push(s),
                Err(Error::PostSelectionVanished { norm, .. }) => {
                    return Ok(Trajectory {
                        samples,
                        terminated: Some(Termination {
                            t,
                            relative_norm: norm,
                        }),
                    });
                }
                Err(e) => return Err(e),
            }
            current = Some((t, v));
        }
        Ok(Trajectory {
            samples,
            terminated: None,
        })
    }

    fn step_matrix(&self, t: f64) -> Result<DMatrix<C64>> {
        expm(&(&self.generator * C64::new(0.0, -t)))
    }

    fn check_state(&self, psi0: &StateVector) -> Result<()> {
        if psi0.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: 1 << self.n,
                found: psi0.dim(),
            });
        }
        Ok(())
    }

    /// `v` is `exp(-i (H - c) t) psi0`.
    fn finish(&self, t: f64, v: DVector<C64>) -> Result<Sample> {
        let rel = v.norm();
        if !rel.is_finite() {
            return Err(Error::NonFinite("propagated state"));
        }
        if !(rel > self.floor) {
            return Err(Error::PostSelectionVanished {
                norm: rel,
                floor: self.floor,
            });
        }
        let phase = (C64::new(0.0, -self.shift.re * t)).exp();
        let raw_norm = rel * (self.shift.im * t).exp();
        let state = StateVector::from_vector(self.n, v * (phase / C64::new(rel, 0.0)))?;
        Ok(Sample { t, state, raw_norm })
    }
}

/// `normalize(propagate(H, psi0, t))` for every `t` in `times`.
pub fn trajectory(
    h: &HamiltonianMatrix,
    psi0: &StateVector,
    times: &[f64],
) -> Result<Trajectory> {
    check_dims(h, psi0)?;
    Propagator::new(h).trajectory(psi0, times)
}

fn check_grid(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::InvalidGrid("empty time grid".into()));
    }
    for &t in times {
        check_time(t)?;
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid("times must be strictly increasing".into()));
    }
    Ok(())
}

fn check_time(t: f64) -> Result<()> {
    if !t.is_finite() {
        return Err(Error::NonFinite("time"));
    }
    if t < 0.0 {
        return Err(Error::InvalidGrid(format!("negative time {t}")));
    }
    Ok(())
}

fn check_dims(h: &HamiltonianMatrix, psi: &StateVector) -> Result<()> {
    if h.dim() != psi.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: psi.dim(),
        });
    }
    Ok(())
}

fn vanished_or(e: Error, norm: f64, floor: f64) -> Error {
    match e {
        Error::InvalidState(_) => Error::PostSelectionVanished { norm, floor },
        other => other,
    }
}
