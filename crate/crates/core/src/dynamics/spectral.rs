//! Biorthogonal eigendecomposition of a non-Hermitian Hamiltonian.
//!
//! Right eigenvectors `r_k` (columns) satisfy `H r_k = E_k r_k` and left
//! eigenvectors `l_k` (rows) satisfy `l_k H = E_k l_k`. They are scaled so
//! that `|r_k| = 1` and `l_k r_k = 1`; the overlap coefficients are
//! `a_k = l_k psi0`, giving `exp(-iHt) psi0 = sum_k a_k exp(-i E_k t) r_k`.
//!
//! Eigenvalues closer than [`CLUSTER_TOL`] (relative) form a cluster that is
//! biorthogonalized as a block. A cluster whose geometric multiplicity falls
//! short of its size is defective (an exceptional point) and the
//! decomposition is flagged unusable.

use nalgebra::{DMatrix, DVector, Schur, SVD};

use super::StateVector;
use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianMatrix;
use crate::C64;

/// Relative eigenvalue distance below which eigenpairs are treated as one block.
pub const CLUSTER_TOL: f64 = 1e-8;

/// Condition number above which the expansion is not trusted.
pub const UNUSABLE_CONDITION: f64 = 1e12;

const MAX_ITERATIONS: usize = 10_000;

// nalgebra's own default; at bare machine epsilon its complex SVD can stop
// with left singular vectors that no longer match the singular values
const ITERATION_EPS: f64 = 5.0 * f64::EPSILON;

#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<C64>,
    right: DMatrix<C64>,
    left: DMatrix<C64>,
    coefficients: Vec<C64>,
    condition_number: f64,
    pairing_distance: f64,
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> &[C64] {
        &self.eigenvalues
    }

    /// Right eigenvectors as columns.
    pub fn right(&self) -> &DMatrix<C64> {
        &self.right
    }

    /// Left eigenvectors as rows.
    pub fn left(&self) -> &DMatrix<C64> {
        &self.left
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.coefficients
    }

    /// `max_k |l_k| |r_k| / |l_k r_k|`; infinite at a detected exceptional point.
    pub fn condition_number(&self) -> f64 {
        self.condition_number
    }

    /// Largest distance between a right eigenvalue and its paired left eigenvalue.
    pub fn pairing_distance(&self) -> f64 {
        self.pairing_distance
    }

    pub fn is_usable(&self) -> bool {
        self.condition_number <= UNUSABLE_CONDITION
    }

    /// Largest entry of `|L R - I|`.
    pub fn biorthogonality_error(&self) -> f64 {
        let n = self.eigenvalues.len();
        (&self.left * &self.right - DMatrix::<C64>::identity(n, n))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Largest imaginary part of the spectrum; non-positive for passive systems.
    pub fn max_growth_rate(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(|e| e.im)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `sum_k a_k exp(-i E_k t) r_k`, unnormalized.
    pub fn reconstruct(&self, t: f64) -> DVector<C64> {
        let weights = DVector::from_iterator(
            self.eigenvalues.len(),
            self.eigenvalues
                .iter()
                .zip(&self.coefficients)
                .map(|(e, a)| a * (C64::new(0.0, -t) * e).exp()),
        );
        &self.right * weights
    }
}

/// Spectral decomposition of `h` with overlaps against `psi0`.
pub fn decompose(h: &HamiltonianMatrix, psi0: &StateVector) -> Result<SpectralDecomposition> {
    if h.dim() != psi0.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: psi0.dim(),
        });
    }
    let m = h.matrix();
    let dim = m.nrows();

    let right_values = schur_eigenvalues(m.clone())?;
    let left_values = schur_eigenvalues(m.transpose())?;
    let pairing_distance = greedy_pairing_distance(&right_values, &left_values);

    let scale = right_values.iter().map(|e| e.norm()).fold(0.0, f64::max);
    let cluster_tol = if scale > 0.0 {
        CLUSTER_TOL * scale
    } else {
        CLUSTER_TOL
    };
    let clusters = cluster(&right_values, cluster_tol);

    let null_tol = f64::EPSILON.sqrt() * crate::expm::norm1(m).max(1.0);
    let mut eigenvalues = Vec::with_capacity(dim);
    let mut right = DMatrix::<C64>::zeros(dim, dim);
    let mut left = DMatrix::<C64>::zeros(dim, dim);
    let mut defective = false;
    let mut col = 0;

    for members in clusters {
        let size = members.len();
        let mean = members.iter().map(|&i| right_values[i]).sum::<C64>() / C64::new(size as f64, 0.0);
        let shifted = m - DMatrix::<C64>::identity(dim, dim) * mean;
        // left null rows of A are right null vectors of A^H; nalgebra's V is
        // reliable near a zero singular value where its U is not
        let (r_block, r_sigma) = right_null(shifted.clone(), size)?;
        let (l_null, l_sigma) = right_null(shifted.adjoint(), size)?;
        if r_sigma > null_tol || l_sigma > null_tol {
            defective = true;
        }
        let mut l_block = l_null.adjoint();
        let overlap = &l_block * &r_block;
        match overlap.clone().try_inverse() {
            Some(inv) if inv.iter().all(|z| z.re.is_finite() && z.im.is_finite()) => {
                l_block = inv * l_block;
            }
            _ => defective = true,
        }

        for (c, &i) in members.iter().enumerate() {
            eigenvalues.push(right_values[i]);
            right.set_column(col, &r_block.column(c));
            left.set_row(col, &l_block.row(c));
            col += 1;
        }
    }

    let condition_number = if defective {
        f64::INFINITY
    } else {
        (0..dim)
            .map(|k| {
                let num = left.row(k).norm() * right.column(k).norm();
                let den = (left.row(k) * right.column(k))[(0, 0)].norm();
                num / den
            })
            .fold(1.0, f64::max)
    };
    let condition_number = if condition_number.is_finite() {
        condition_number
    } else {
        f64::INFINITY
    };

    let coefficients = (left.clone() * psi0.amplitudes()).iter().copied().collect();

    Ok(SpectralDecomposition {
        eigenvalues,
        right,
        left,
        coefficients,
        condition_number,
        pairing_distance,
    })
}

/// The `size` right singular vectors of `a` with the smallest singular values,
/// as columns, and the largest of those singular values.
fn right_null(a: DMatrix<C64>, size: usize) -> Result<(DMatrix<C64>, f64)> {
    let dim = a.ncols();
    let svd = SVD::try_new(a, false, true, ITERATION_EPS, MAX_ITERATIONS)
        .ok_or_else(|| Error::EigenSolver("SVD did not converge".into()))?;
    let v_t = svd.v_t.as_ref().expect("v_t requested");
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    let mut null = DMatrix::<C64>::zeros(dim, size);
    for (c, &s) in order[..size].iter().enumerate() {
        null.set_column(c, &v_t.row(s).adjoint());
    }
    Ok((null, svd.singular_values[order[size - 1]]))
}

fn schur_eigenvalues(m: DMatrix<C64>) -> Result<Vec<C64>> {
    let schur = Schur::try_new(m, ITERATION_EPS, MAX_ITERATIONS)
        .ok_or_else(|| Error::EigenSolver("Schur iteration did not converge".into()))?;
    let (_, t) = schur.unpack();
    Ok(t.diagonal().iter().copied().collect())
}

/// Repeatedly pairs the globally closest unpaired (right, left) eigenvalues
/// and returns the largest distance used.
fn greedy_pairing_distance(right: &[C64], left: &[C64]) -> f64 {
    let mut candidates: Vec<(f64, usize, usize)> = right
        .iter()
        .enumerate()
        .flat_map(|(i, r)| left.iter().enumerate().map(move |(j, l)| ((r - l).norm(), i, j)))
        .collect();
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut right_used = vec![false; right.len()];
    let mut left_used = vec![false; left.len()];
    let mut worst: f64 = 0.0;
    for (d, i, j) in candidates {
        if !right_used[i] && !left_used[j] {
            right_used[i] = true;
            left_used[j] = true;
            worst = worst.max(d);
        }
    }
    worst
}

/// Groups indices whose eigenvalues are chained within `tol` of each other.
fn cluster(values: &[C64], tol: f64) -> Vec<Vec<usize>> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (values[i] - values[j]).norm() <= tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[b.max(a)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if root_slot[r] == usize::MAX {
            root_slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[root_slot[r]].push(i);
    }
    groups
}
