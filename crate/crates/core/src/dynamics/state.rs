use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::MAX_QUBITS;
use crate::C64;

const NORMALIZED_TOL: f64 = 1e-10;

/// Amplitudes over the `2^n` computational basis states.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amplitudes: DVector<C64>,
    normalized: bool,
}

impl StateVector {
    /// Unnormalized state. The amplitudes must be finite with a positive norm.
    pub fn new(n: usize, amplitudes: Vec<C64>) -> Result<Self> {
        Self::from_vector(n, DVector::from_vec(amplitudes))
    }

    pub fn from_vector(n: usize, amplitudes: DVector<C64>) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::QubitCount(n));
        }
        if amplitudes.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                found: amplitudes.len(),
            });
        }
        if amplitudes
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite("state amplitudes"));
        }
        let norm = amplitudes.norm();
        if norm <= 0.0 {
            return Err(Error::InvalidState("zero-norm state".into()));
        }
        let normalized = (norm - 1.0).abs() <= NORMALIZED_TOL;
        Ok(Self {
            n,
            amplitudes,
            normalized,
        })
    }

    /// Normalized state; fails unless the amplitudes already have unit norm.
    pub fn normalized_from(n: usize, amplitudes: Vec<C64>) -> Result<Self> {
        let s = Self::new(n, amplitudes)?;
        if !s.normalized {
            return Err(Error::InvalidState(format!(
                "expected unit norm, found {}",
                s.norm()
            )));
        }
        Ok(s)
    }

    /// Computational basis state `index`.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        let dim = 1usize << n.min(MAX_QUBITS + 1);
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: index + 1,
            });
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[index] = C64::new(1.0, 0.0);
        Self::new(n, amps)
    }

    /// Product state from per-qubit `(e, f)` amplitudes, qubit 0 first.
    pub fn product(factors: &[[C64; 2]]) -> Result<Self> {
        let n = factors.len();
        let mut amps = vec![C64::new(1.0, 0.0)];
        for f in factors {
            amps = amps
                .iter()
                .flat_map(|a| [a * f[0], a * f[1]])
                .collect();
        }
        Self::new(n, amps)
    }

    /// `2^{-n/2} (|f> - i|e>)^{(x) n}`.
    pub fn coherent_superposition(n: usize) -> Result<Self> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self::product(&vec![[C64::new(0.0, -s), C64::new(s, 0.0)]; n])
    }

    /// `|f...f>`.
    pub fn all_f(n: usize) -> Result<Self> {
        Self::basis(n, (1usize << n) - 1)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amplitudes[index]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn into_vector(self) -> DVector<C64> {
        self.amplitudes
    }
}

/// Initial-state selector used by scenarios and configuration files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialState {
    /// `2^{-n/2} (|f> - i|e>)^{(x) n}`
    Coherent,
    /// `|f...f>`
    AllF,
    /// Explicit `[re, im]` amplitudes in basis order.
    Amplitudes(Vec<[f64; 2]>),
}

impl InitialState {
    pub fn prepare(&self, n: usize) -> Result<StateVector> {
        match self {
            InitialState::Coherent => StateVector::coherent_superposition(n),
            InitialState::AllF => StateVector::all_f(n),
            InitialState::Amplitudes(a) => {
                StateVector::new(n, a.iter().map(|&[re, im]| C64::new(re, im)).collect())
            }
        }
    }
}
