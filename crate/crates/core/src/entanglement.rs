//! Entanglement measures of few-qubit pure states.
//!
//! Qubit indices are zero based throughout. Reduced density matrices use the
//! same basis convention as state vectors, restricted to the kept qubits in
//! ascending order.

use nalgebra::{DMatrix, SymmetricEigen, SVD};
use serde::{Deserialize, Serialize};

use crate::dynamics::StateVector;
use crate::error::{Error, Result};
use crate::C64;

const DENSITY_TOL: f64 = 1e-10;

/// Eigenvalues of a density matrix below this are treated as exact zeros
/// when factorising it for the concurrence.
const RANK_TOL: f64 = 1e-13;

/// `ln 3 - (2/3) ln 2`, the single-qubit entropy of a W state.
pub fn w_entropy() -> f64 {
    3f64.ln() - 2.0 / 3.0 * 2f64.ln()
}

/// Pairwise concurrence of a W state.
pub const W_CONCURRENCE: f64 = 2.0 / 3.0;

#[derive(Clone, Debug, PartialEq)]
pub struct ReducedDensityMatrix {
    kept: Vec<usize>,
    matrix: DMatrix<C64>,
}

impl ReducedDensityMatrix {
    /// Validates Hermiticity, unit trace and the eigenvalue range.
    pub fn from_matrix(kept: Vec<usize>, matrix: DMatrix<C64>) -> Result<Self> {
        let dim = 1usize << kept.len();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: matrix.nrows(),
            });
        }
        let defect = (&matrix - matrix.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if defect > DENSITY_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (defect {defect:e})"
            )));
        }
        let trace = matrix.trace();
        if (trace - C64::new(1.0, 0.0)).norm() > DENSITY_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "trace {trace} differs from 1"
            )));
        }
        let rho = Self { kept, matrix };
        let eig = rho.eigenvalues();
        if eig.iter().any(|p| !(-DENSITY_TOL..=1.0 + DENSITY_TOL).contains(p)) {
            return Err(Error::InvalidDensityMatrix(format!(
                "eigenvalues {eig:?} outside [0, 1]"
            )));
        }
        Ok(rho)
    }

    /// `|psi><psi|` over all qubits of a normalized state.
    pub fn pure(psi: &StateVector) -> Result<Self> {
        require_normalized(psi)?;
        let v = psi.amplitudes();
        Ok(Self {
            kept: (0..psi.n()).collect(),
            matrix: v * v.adjoint(),
        })
    }

    pub fn kept(&self) -> &[usize] {
        &self.kept
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    /// Real eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut p: Vec<f64> = SymmetricEigen::new(self.matrix.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        p.sort_by(f64::total_cmp);
        p
    }
}

fn require_normalized(psi: &StateVector) -> Result<()> {
    if !psi.is_normalized() {
        return Err(Error::InvalidState(format!(
            "expected a normalized state, norm is {}",
            psi.norm()
        )));
    }
    Ok(())
}

/// `Tr_{complement}(|psi><psi|)` keeping the qubits in `keep`.
pub fn partial_trace(psi: &StateVector, keep: &[usize]) -> Result<ReducedDensityMatrix> {
    require_normalized(psi)?;
    let n = psi.n();
    let mut kept = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.is_empty() || kept.len() >= n || kept.len() != keep.len() {
        return Err(Error::InvalidState(format!(
            "kept qubits {keep:?} must be a non-empty strict subset of 0..{n} without repeats"
        )));
    }
    if let Some(&q) = kept.iter().find(|&&q| q >= n) {
        return Err(Error::InvalidState(format!("qubit {q} out of range 0..{n}")));
    }
    let traced: Vec<usize> = (0..n).filter(|q| !kept.contains(q)).collect();

    let split = |index: usize, qubits: &[usize]| -> usize {
        qubits.iter().fold(0, |acc, &q| {
            (acc << 1) | ((index >> (n - 1 - q)) & 1)
        })
    };
    let dk = 1usize << kept.len();
    let dt = 1usize << traced.len();
    // amplitudes reshaped as (kept, traced)
    let mut m = DMatrix::<C64>::zeros(dk, dt);
    for (i, a) in psi.amplitudes().iter().enumerate() {
        m[(split(i, &kept), split(i, &traced))] = *a;
    }
    Ok(ReducedDensityMatrix {
        kept,
        matrix: &m * m.adjoint(),
    })
}

/// `sigma_y (x) sigma_y`, real in this basis.
fn spin_flip_operator() -> DMatrix<C64> {
    let mut y = DMatrix::<C64>::zeros(4, 4);
    y[(0, 3)] = C64::new(-1.0, 0.0);
    y[(3, 0)] = C64::new(-1.0, 0.0);
    y[(1, 2)] = C64::new(1.0, 0.0);
    y[(2, 1)] = C64::new(1.0, 0.0);
    y
}

/// `(sigma_y (x) sigma_y) rho^* (sigma_y (x) sigma_y)`.
pub fn spin_flip(rho: &DMatrix<C64>) -> DMatrix<C64> {
    let y = spin_flip_operator();
    &y * rho.conjugate() * &y
}

/// Two-qubit concurrence `max(0, l1 - l2 - l3 - l4)`.
///
/// The `l_i` are the square roots of the eigenvalues of `rho rho~`. With
/// `rho = M M^dagger` they are the singular values of `M^T Y M`
/// (`Y = sigma_y (x) sigma_y`), which avoids taking square roots of
/// eigenvalues that vanish up to roundoff.
pub fn concurrence(rho: &ReducedDensityMatrix) -> Result<f64> {
    if rho.kept.len() != 2 {
        return Err(Error::InvalidDensityMatrix(format!(
            "concurrence needs a two-qubit state, got {} qubits",
            rho.kept.len()
        )));
    }
    // re-validate: callers can build matrices by hand
    let rho = ReducedDensityMatrix::from_matrix(rho.kept.clone(), rho.matrix.clone())?;
    let eig = SymmetricEigen::new(rho.matrix.clone());
    let columns: Vec<_> = (0..4)
        .filter(|&i| eig.eigenvalues[i] > RANK_TOL)
        .map(|i| eig.eigenvectors.column(i) * C64::new(eig.eigenvalues[i].sqrt(), 0.0))
        .collect();
    if columns.is_empty() {
        return Ok(0.0);
    }
    let factor = DMatrix::from_columns(&columns);
    let k = factor.transpose() * spin_flip_operator() * &factor;
    let mut lambdas: Vec<f64> = SVD::new(k, false, false).singular_values.iter().copied().collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    let c = lambdas[0] - lambdas[1..].iter().sum::<f64>();
    Ok(c.clamp(0.0, 1.0))
}

/// Residual three-tangle `4 |d1 - 2 d2 + 4 d3|` of a normalized three-qubit state.
pub fn three_tangle(psi: &StateVector) -> Result<f64> {
    if psi.n() != 3 {
        return Err(Error::Unsupported(format!(
            "three-tangle needs three qubits, got {}",
            psi.n()
        )));
    }
    require_normalized(psi)?;
    // a[k] is the amplitude of basis label k + 1, i.e. a[0] = |eee>, a[7] = |fff>
    let a: Vec<C64> = psi.amplitudes().iter().copied().collect();
    let (a1, a2, a3, a4, a5, a6, a7, a8) = (a[0], a[1], a[2], a[3], a[4], a[5], a[6], a[7]);
    let sq = |z: C64| z * z;
    let d1 = sq(a1 * a8) + sq(a2 * a7) + sq(a3 * a6) + sq(a4 * a5);
    let d2 = a1 * a8 * (a4 * a5 + a3 * a6 + a2 * a7)
        + a3 * a4 * a5 * a6
        + a4 * a5 * a2 * a7
        + a2 * a7 * a3 * a6;
    let d3 = a1 * a7 * a4 * a6 + a2 * a8 * a3 * a5;
    let tau = 4.0 * (d1 - 2.0 * d2 + 4.0 * d3).norm();
    Ok(tau.min(1.0 + 1e-9))
}

/// Von Neumann entropy in nats, with `0 ln 0 = 0`.
pub fn entropy(rho: &ReducedDensityMatrix) -> f64 {
    rho.eigenvalues()
        .into_iter()
        .map(|p| p.clamp(0.0, 1.0))
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.ln())
        .sum()
}

/// Entanglement class of a three-qubit pure state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum StateClass {
    GhzLike,
    WLike,
    Biseparable,
    Separable,
    Unclassified,
}

impl StateClass {
    pub fn as_str(self) -> &'static str {
        match self {
            StateClass::GhzLike => "GHZ_LIKE",
            StateClass::WLike => "W_LIKE",
            StateClass::Biseparable => "BISEPARABLE",
            StateClass::Separable => "SEPARABLE",
            StateClass::Unclassified => "UNCLASSIFIED",
        }
    }
}

impl std::fmt::Display for StateClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Signature thresholds used by [`classify`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassThresholds {
    pub ghz_min_tangle: f64,
    pub ghz_max_concurrence: f64,
    pub w_max_tangle: f64,
    pub w_min_entropy: f64,
    pub w_signature_window: f64,
    pub pure_max_entropy: f64,
    pub entangled_min_entropy: f64,
}

impl Default for ClassThresholds {
    fn default() -> Self {
        Self {
            ghz_min_tangle: 0.9,
            ghz_max_concurrence: 0.1,
            w_max_tangle: 0.1,
            w_min_entropy: 0.5,
            w_signature_window: 0.1,
            pure_max_entropy: 0.05,
            entangled_min_entropy: 0.5,
        }
    }
}

/// Classifies a three-qubit state from `C12, C13, C23`, the tangle and `S1..S3`.
pub fn classify(
    concurrences: [f64; 3],
    tangle: f64,
    entropies: [f64; 3],
    th: &ClassThresholds,
) -> StateClass {
    let max_c = concurrences.iter().copied().fold(0.0, f64::max);
    if tangle > th.ghz_min_tangle && max_c < th.ghz_max_concurrence {
        return StateClass::GhzLike;
    }
    let s_w = w_entropy();
    let near_w = concurrences
        .iter()
        .all(|c| (c - W_CONCURRENCE).abs() <= th.w_signature_window)
        && entropies
            .iter()
            .all(|s| (s - s_w).abs() <= th.w_signature_window);
    let min_s = entropies.iter().copied().fold(f64::INFINITY, f64::min);
    if tangle < th.w_max_tangle && min_s > th.w_min_entropy && near_w {
        return StateClass::WLike;
    }
    let pure = entropies.iter().filter(|&&s| s < th.pure_max_entropy).count();
    if pure == 3 {
        return StateClass::Separable;
    }
    let mixed = entropies
        .iter()
        .filter(|&&s| s > th.entangled_min_entropy)
        .count();
    if pure == 1 && mixed == 2 {
        return StateClass::Biseparable;
    }
    StateClass::Unclassified
}

/// Concurrence of the qubit pair `(j, k)`, `j < k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairConcurrence {
    pub j: usize,
    pub k: usize,
    pub value: f64,
}

/// All measures of one post-selected state.
///
/// For three qubits every field is filled. Two- and four-qubit states carry
/// pairwise concurrences and entropies only.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntanglementReport {
    pub t: f64,
    pub concurrences: Vec<PairConcurrence>,
    pub tangle: Option<f64>,
    pub entropies: Vec<f64>,
    pub class: Option<StateClass>,
}

impl EntanglementReport {
    pub fn concurrence(&self, j: usize, k: usize) -> Option<f64> {
        self.concurrences
            .iter()
            .find(|p| (p.j, p.k) == (j.min(k), j.max(k)))
            .map(|p| p.value)
    }

    pub fn max_concurrence(&self) -> f64 {
        self.concurrences.iter().map(|p| p.value).fold(0.0, f64::max)
    }

    pub fn min_entropy(&self) -> f64 {
        self.entropies.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn mean_entropy(&self) -> f64 {
        self.entropies.iter().sum::<f64>() / self.entropies.len() as f64
    }
}

pub fn report(psi: &StateVector, t: f64) -> Result<EntanglementReport> {
    report_with(psi, t, &ClassThresholds::default())
}

pub fn report_with(
    psi: &StateVector,
    t: f64,
    thresholds: &ClassThresholds,
) -> Result<EntanglementReport> {
    require_normalized(psi)?;
    let n = psi.n();
    if n < 2 {
        return Err(Error::Unsupported(
            "entanglement report needs at least two qubits".into(),
        ));
    }
    let mut concurrences = Vec::new();
    for j in 0..n {
        for k in j + 1..n {
            let rho = if n == 2 {
                ReducedDensityMatrix::pure(psi)?
            } else {
                partial_trace(psi, &[j, k])?
            };
            concurrences.push(PairConcurrence {
                j,
                k,
                value: concurrence(&rho)?,
            });
        }
    }
    let entropies = (0..n)
        .map(|j| partial_trace(psi, &[j]).map(|r| entropy(&r)))
        .collect::<Result<Vec<_>>>()?;
    let (tangle, class) = if n == 3 {
        let tau = three_tangle(psi)?;
        let c = [
            concurrences[0].value,
            concurrences[1].value,
            concurrences[2].value,
        ];
        let s = [entropies[0], entropies[1], entropies[2]];
        (Some(tau), Some(classify(c, tau, s, thresholds)))
    } else {
        (None, None)
    };
    Ok(EntanglementReport {
        t,
        concurrences,
        tangle,
        entropies,
        class,
    })
}
