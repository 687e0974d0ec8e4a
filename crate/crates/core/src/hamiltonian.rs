//! Effective non-Hermitian Hamiltonian of driven, lossy, coupled qubits.
//!
//! Each qubit `j` carries a detuning `delta`, a loss rate `gamma` acting on
//! its `|e>` level and a drive `omega` coupling `|e>` and `|f>`. Pairs exchange
//! an excitation with real amplitude `J[j][k]`:
//!
//! ```text
//! H = sum_j (delta_j - i gamma_j / 2) |e><e|_j + omega_j X_j
//!   + sum_{j<k} J_jk (s+_j s-_k + s-_j s+_k)
//! ```
//!
//! All frequencies are angular frequencies in rad/us, times are in us and
//! hbar = 1.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::basis::qubit_mask;
use crate::error::{Error, Result};
use crate::C64;

pub const MAX_QUBITS: usize = 4;

/// Relative tolerance on `|omega - gamma/4|` used to declare an exceptional point.
pub const DEFAULT_EP_TOL: f64 = 1e-9;

/// Per-qubit parameters in rad/us. `gamma = 0` describes a Hermitian qubit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitParams {
    pub delta: f64,
    pub gamma: f64,
    pub omega: f64,
}

impl QubitParams {
    pub fn new(delta: f64, gamma: f64, omega: f64) -> Result<Self> {
        let q = Self { delta, gamma, omega };
        q.validate()?;
        Ok(q)
    }

    /// Resonant (passive PT-symmetric) qubit.
    pub fn resonant(gamma: f64, omega: f64) -> Result<Self> {
        Self::new(0.0, gamma, omega)
    }

    pub fn is_hermitian(&self) -> bool {
        self.gamma == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("delta", self.delta),
            ("gamma", self.gamma),
            ("omega", self.omega),
        ] {
            if !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name: name.into(),
                    value,
                    reason: "must be finite",
                });
            }
        }
        if self.gamma < 0.0 {
            return Err(Error::InvalidParameter {
                name: "gamma".into(),
                value: self.gamma,
                reason: "loss must be non-negative (no gain)",
            });
        }
        if self.omega < 0.0 {
            return Err(Error::InvalidParameter {
                name: "omega".into(),
                value: self.omega,
                reason: "drive must be non-negative",
            });
        }
        Ok(())
    }
}

/// Symmetric real coupling matrix with zero diagonal, in rad/us.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingGraph {
    n: usize,
    entries: Vec<f64>,
}

impl CouplingGraph {
    pub fn uncoupled(n: usize) -> Result<Self> {
        check_qubit_count(n)?;
        Ok(Self {
            n,
            entries: vec![0.0; n * n],
        })
    }

    /// Every pair coupled with the same strength.
    pub fn all_to_all(n: usize, strength: f64) -> Result<Self> {
        let mut g = Self::uncoupled(n)?;
        for j in 0..n {
            for k in j + 1..n {
                g = g.with_pair(j, k, strength)?;
            }
        }
        Ok(g)
    }

    /// Open chain 0-1-2-...; for three qubits `J[0][2] = 0`.
    pub fn nearest_neighbour(n: usize, strength: f64) -> Result<Self> {
        let mut g = Self::uncoupled(n)?;
        for j in 0..n.saturating_sub(1) {
            g = g.with_pair(j, j + 1, strength)?;
        }
        Ok(g)
    }

    /// Builds a graph from a full matrix, rejecting asymmetric input.
    #[allow(clippy::needless_range_loop)]
    pub fn from_matrix(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        check_qubit_count(n)?;
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
        }
        for j in 0..n {
            if !rows[j].iter().all(|v| v.is_finite()) {
                return Err(Error::NonFinite("coupling matrix"));
            }
            if rows[j][j] != 0.0 {
                return Err(Error::SelfCoupling(j + 1, rows[j][j]));
            }
            for k in j + 1..n {
                let (a, b) = (rows[j][k], rows[k][j]);
                if (a - b).abs() > 1e-12 * a.abs().max(b.abs()) {
                    return Err(Error::AsymmetricCoupling {
                        j: j + 1,
                        k: k + 1,
                        jk: a,
                        kj: b,
                    });
                }
            }
        }
        Ok(Self {
            n,
            entries: rows.iter().flatten().copied().collect(),
        })
    }

    /// Sets `J[j][k] = J[k][j] = strength` (zero-based indices).
    pub fn with_pair(mut self, j: usize, k: usize, strength: f64) -> Result<Self> {
        if j >= self.n || k >= self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: j.max(k) + 1,
            });
        }
        if j == k {
            return Err(Error::SelfCoupling(j + 1, strength));
        }
        if !strength.is_finite() {
            return Err(Error::NonFinite("coupling strength"));
        }
        self.entries[j * self.n + k] = strength;
        self.entries[k * self.n + j] = strength;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.entries[j * self.n + k]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    /// Coupled pairs `(j, k, J_jk)` with `j < k`, in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n)
            .flat_map(move |j| (j + 1..self.n).map(move |k| (j, k)))
            .map(|(j, k)| (j, k, self.get(j, k)))
            .filter(|&(_, _, v)| v != 0.0)
    }
}

fn check_qubit_count(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        Err(Error::QubitCount(n))
    } else {
        Ok(())
    }
}

/// Dense `2^n x 2^n` Hamiltonian in the fixed computational basis.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianMatrix {
    n: usize,
    matrix: DMatrix<C64>,
}

impl HamiltonianMatrix {
    /// Wraps an existing square matrix of dimension `2^n`.
    pub fn from_matrix(n: usize, matrix: DMatrix<C64>) -> Result<Self> {
        check_qubit_count(n)?;
        let dim = 1 << n;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("Hamiltonian"));
        }
        Ok(Self { n, matrix })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// Largest entry of `|H - H^dagger|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let adj = self.matrix.adjoint();
        (&self.matrix - adj)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }
}

/// Assembles the Hamiltonian for `params.len()` qubits.
pub fn build_hamiltonian(
    params: &[QubitParams],
    couplings: &CouplingGraph,
) -> Result<HamiltonianMatrix> {
    let n = params.len();
    check_qubit_count(n)?;
    if couplings.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: couplings.n(),
        });
    }
    for q in params {
        q.validate()?;
    }

    let dim = 1usize << n;
    let mut h = DMatrix::<C64>::zeros(dim, dim);
    for col in 0..dim {
        for (j, q) in params.iter().enumerate() {
            let mask = qubit_mask(j, n);
            if col & mask == 0 {
                h[(col, col)] += C64::new(q.delta, -0.5 * q.gamma);
            }
            if q.omega != 0.0 {
                h[(col ^ mask, col)] += C64::new(q.omega, 0.0);
            }
        }
        for (j, k, strength) in couplings.pairs() {
            let (mj, mk) = (qubit_mask(j, n), qubit_mask(k, n));
            // hopping only connects states where the two qubits differ
            if ((col & mj) == 0) != ((col & mk) == 0) {
                h[(col ^ mj ^ mk, col)] += C64::new(strength, 0.0);
            }
        }
    }
    Ok(HamiltonianMatrix { n, matrix: h })
}

/// PT phase of an uncoupled resonant qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PtPhase {
    PtSymmetric,
    ExceptionalPoint,
    PtBroken,
}

impl std::fmt::Display for PtPhase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PtPhase::PtSymmetric => "PT_SYMMETRIC",
            PtPhase::ExceptionalPoint => "EXCEPTIONAL_POINT",
            PtPhase::PtBroken => "PT_BROKEN",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseClassification {
    pub phase: PtPhase,
    /// Evolution period in us, present only in the symmetric phase.
    pub period: Option<f64>,
}

/// Classifies a resonant qubit by comparing the drive against `gamma / 4`.
///
/// `tol` is relative to `gamma / 4` (absolute when `gamma = 0`).
pub fn classify_phase(q: &QubitParams, tol: f64) -> Result<PhaseClassification> {
    q.validate()?;
    if q.delta != 0.0 {
        return Err(Error::OffPtLine(q.delta));
    }
    let quarter = q.gamma / 4.0;
    let gap = q.omega - quarter;
    let scale = if quarter > 0.0 { quarter } else { 1.0 };
    let phase = if gap.abs() <= tol * scale {
        PtPhase::ExceptionalPoint
    } else if gap > 0.0 {
        PtPhase::PtSymmetric
    } else {
        PtPhase::PtBroken
    };
    let period = match phase {
        PtPhase::PtSymmetric => Some(period_formula(q.omega, q.gamma)),
        _ => None,
    };
    Ok(PhaseClassification { phase, period })
}

/// Full evolution period `4 pi / sqrt(16 omega^2 - gamma^2)` in us.
pub fn evolution_period(q: &QubitParams) -> Result<f64> {
    q.validate()?;
    let quarter = q.gamma / 4.0;
    let scale = if quarter > 0.0 { quarter } else { 1.0 };
    if q.omega - quarter <= DEFAULT_EP_TOL * scale {
        return Err(Error::PeriodUndefined {
            omega: q.omega,
            quarter_gamma: quarter,
        });
    }
    Ok(period_formula(q.omega, q.gamma))
}

fn period_formula(omega: f64, gamma: f64) -> f64 {
    4.0 * std::f64::consts::PI / (16.0 * omega * omega - gamma * gamma).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn zero_parameters_give_zero_matrix() {
        let q = QubitParams::new(0.0, 0.0, 0.0).unwrap();
        let h = build_hamiltonian(&[q; 3], &CouplingGraph::uncoupled(3).unwrap()).unwrap();
        assert_eq!(h.dim(), 8);
        assert!(h.matrix().iter().all(|z| *z == C64::new(0.0, 0.0)));
    }

    #[test]
    fn single_qubit_matrix() {
        let q = QubitParams::resonant(6.0, 1.576).unwrap();
        let h = build_hamiltonian(&[q], &CouplingGraph::uncoupled(1).unwrap()).unwrap();
        let m = h.matrix();
        assert_eq!(m[(0, 0)], c(0.0, -3.0));
        assert_eq!(m[(0, 1)], c(1.576, 0.0));
        assert_eq!(m[(1, 0)], c(1.576, 0.0));
        assert_eq!(m[(1, 1)], c(0.0, 0.0));
    }

    #[test]
    fn two_qubit_hopping_is_single_counted() {
        let q = QubitParams::resonant(0.0, 0.0).unwrap();
        let g = CouplingGraph::all_to_all(2, 0.25).unwrap();
        let h = build_hamiltonian(&[q; 2], &g).unwrap();
        // |ef> (1) <-> |fe> (2)
        assert_eq!(h.matrix()[(1, 2)], c(0.25, 0.0));
        assert_eq!(h.matrix()[(2, 1)], c(0.25, 0.0));
        assert_eq!(h.matrix()[(0, 3)], c(0.0, 0.0));
    }

    #[test]
    fn build_rejects_bad_inputs() {
        let q = QubitParams {
            delta: 0.0,
            gamma: -1.0,
            omega: 1.0,
        };
        let g = CouplingGraph::uncoupled(1).unwrap();
        assert!(matches!(
            build_hamiltonian(&[q], &g),
            Err(Error::InvalidParameter { .. })
        ));
        let q = QubitParams::resonant(1.0, 1.0).unwrap();
        assert!(matches!(
            build_hamiltonian(&[q, q], &g),
            Err(Error::DimensionMismatch { .. })
        ));
        let err = CouplingGraph::from_matrix(&[
            vec![0.0, 1e-3, 0.0],
            vec![2e-3, 0.0, 0.0],
            vec![0.0, 0.0, 0.0],
        ])
        .unwrap_err();
        assert!(err.to_string().contains("(1,2)"), "{err}");
        assert!(matches!(
            QubitParams::new(0.0, 1.0, -0.5),
            Err(Error::InvalidParameter { .. })
        ));
    }

    #[test]
    fn nearest_neighbour_leaves_ends_uncoupled() {
        let g = CouplingGraph::nearest_neighbour(3, 1e-3).unwrap();
        assert_eq!(g.get(0, 1), 1e-3);
        assert_eq!(g.get(1, 2), 1e-3);
        assert_eq!(g.get(0, 2), 0.0);
        assert_eq!(g.pairs().count(), 2);
    }

    #[test]
    fn phase_examples() {
        let ep = classify_phase(&QubitParams::resonant(6.0, 1.5).unwrap(), DEFAULT_EP_TOL).unwrap();
        assert_eq!(ep.phase, PtPhase::ExceptionalPoint);
        assert!(ep.period.is_none());

        let sym =
            classify_phase(&QubitParams::resonant(6.0, 1.576).unwrap(), DEFAULT_EP_TOL).unwrap();
        assert_eq!(sym.phase, PtPhase::PtSymmetric);
        assert!((sym.period.unwrap() - 6.5).abs() < 0.05);

        let broken =
            classify_phase(&QubitParams::resonant(6.0, 1.2).unwrap(), DEFAULT_EP_TOL).unwrap();
        assert_eq!(broken.phase, PtPhase::PtBroken);

        let herm = classify_phase(&QubitParams::resonant(0.0, 0.7).unwrap(), DEFAULT_EP_TOL).unwrap();
        assert_eq!(herm.phase, PtPhase::PtSymmetric);
        assert!((herm.period.unwrap() - std::f64::consts::PI / 0.7).abs() < 1e-12);

        let off = QubitParams::new(0.1, 6.0, 2.0).unwrap();
        assert!(matches!(classify_phase(&off, DEFAULT_EP_TOL), Err(Error::OffPtLine(_))));
    }

    #[test]
    fn period_examples() {
        let t = evolution_period(&QubitParams::resonant(6.0, 1.576).unwrap()).unwrap();
        assert!((t - 6.50).abs() < 0.01, "{t}");
        let t = evolution_period(&QubitParams::resonant(6.0, 2.04).unwrap()).unwrap();
        let expected = 4.0 * std::f64::consts::PI / (16.0f64 * 4.1616 - 36.0).sqrt();
        assert!((t - expected).abs() < 1e-12);
        assert!((t - 2.27).abs() < 0.01, "{t}");
        assert!(matches!(
            evolution_period(&QubitParams::resonant(6.0, 1.5).unwrap()),
            Err(Error::PeriodUndefined { .. })
        ));
        assert!(evolution_period(&QubitParams::resonant(6.0, 1.0).unwrap()).is_err());
    }
}
