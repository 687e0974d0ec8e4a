//! Independent reference implementations and random generators shared by
//! the integration tests. Nothing here calls into the code under test except
//! for plain data types.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use nhe_core::dynamics::StateVector;
use nhe_core::hamiltonian::{CouplingGraph, QubitParams};
use nhe_core::C64;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn gaussian(r: &mut impl Rng) -> C64 {
    c(r.sample(StandardNormal), r.sample(StandardNormal))
}

pub fn random_vector(r: &mut impl Rng, dim: usize) -> DVector<C64> {
    DVector::from_fn(dim, |_, _| gaussian(r))
}

pub fn random_state(r: &mut impl Rng, n: usize) -> StateVector {
    let v = random_vector(r, 1 << n);
    let norm = v.norm();
    StateVector::new(n, (v / c(norm, 0.0)).iter().copied().collect()).unwrap()
}

/// Parameters drawn from the ranges the presets cover.
pub fn random_params(r: &mut impl Rng, n: usize, hermitian: bool) -> (Vec<QubitParams>, CouplingGraph) {
    let qubits = (0..n)
        .map(|_| QubitParams {
            delta: r.random_range(-0.1..0.1),
            gamma: if hermitian { 0.0 } else { r.random_range(0.0..6.0) },
            omega: r.random_range(0.0..3.0),
        })
        .collect();
    let mut g = CouplingGraph::uncoupled(n).unwrap();
    for j in 0..n {
        for k in j + 1..n {
            g = g.with_pair(j, k, r.random_range(0.0..0.1)).unwrap();
        }
    }
    (qubits, g)
}

pub fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a.kronecker(b)
}

/// `op` on qubit `q` of `n`, qubit 0 being the leftmost factor.
pub fn embed(op: &DMatrix<C64>, q: usize, n: usize) -> DMatrix<C64> {
    let id = DMatrix::<C64>::identity(2, 2);
    (0..n).fold(DMatrix::<C64>::identity(1, 1), |acc, j| {
        kron(&acc, if j == q { op } else { &id })
    })
}

/// Hamiltonian assembled from Kronecker products of single-qubit operators.
pub fn kron_hamiltonian(qubits: &[QubitParams], g: &CouplingGraph) -> DMatrix<C64> {
    let n = qubits.len();
    let dim = 1 << n;
    let proj_e = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
    let x = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
    // lowers |f> to |e>
    let lower = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
    let raise = lower.adjoint();
    let mut h = DMatrix::<C64>::zeros(dim, dim);
    for (j, q) in qubits.iter().enumerate() {
        h += embed(&proj_e, j, n) * c(q.delta, -q.gamma / 2.0);
        h += embed(&x, j, n) * c(q.omega, 0.0);
    }
    for j in 0..n {
        for k in j + 1..n {
            let jk = g.get(j, k);
            let hop = embed(&raise, j, n) * embed(&lower, k, n) + embed(&lower, j, n) * embed(&raise, k, n);
            h += hop * c(jk, 0.0);
        }
    }
    h
}

fn taylor_step(h: &DMatrix<C64>, v: &DVector<C64>, dt: f64, order: usize) -> DVector<C64> {
    let a = h * c(0.0, -dt);
    let mut term = v.clone();
    let mut sum = v.clone();
    for k in 1..=order {
        term = &a * term / c(k as f64, 0.0);
        sum += &term;
    }
    sum
}

/// `exp(-iHt) v` by a fixed-order Taylor integrator with step-doubling error control.
pub fn taylor_propagate(h: &DMatrix<C64>, v: &DVector<C64>, t: f64, tol: f64) -> DVector<C64> {
    const ORDER: usize = 12;
    let scale = h.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-3) * h.nrows() as f64;
    let mut dt = (0.5 / scale).min(t.max(1e-300));
    let mut y = v.clone();
    let mut done = 0.0;
    while done < t {
        let step = dt.min(t - done);
        let full = taylor_step(h, &y, step, ORDER);
        let half = taylor_step(h, &taylor_step(h, &y, step / 2.0, ORDER), step / 2.0, ORDER);
        let err = (&full - &half).norm() / half.norm().max(1e-300);
        if err <= tol || step < 1e-12 {
            y = half;
            done += step;
            if err < tol / 100.0 {
                dt = step * 1.5;
            }
        } else {
            dt = step / 2.0;
        }
    }
    y
}

/// Matrix square root of a Hermitian positive semidefinite matrix.
pub fn psd_sqrt(m: &DMatrix<C64>) -> DMatrix<C64> {
    let e = SymmetricEigen::new(m.clone());
    let d = DMatrix::from_diagonal(&e.eigenvalues.map(|x| c(x.max(0.0).sqrt(), 0.0)));
    &e.eigenvectors * d * e.eigenvectors.adjoint()
}

/// Concurrence from the eigenvalues of `sqrt(sqrt(rho) rho~ sqrt(rho))`.
pub fn literal_concurrence(rho: &DMatrix<C64>) -> f64 {
    let sy = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]);
    let yy = kron(&sy, &sy);
    let tilde = &yy * rho.conjugate() * &yy;
    let s = psd_sqrt(rho);
    let inner = &s * tilde * &s;
    let inner = (&inner + inner.adjoint()) * c(0.5, 0.0);
    let r = psd_sqrt(&inner);
    let mut l: Vec<f64> = SymmetricEigen::new(r).eigenvalues.iter().copied().collect();
    l.sort_by(|a, b| b.total_cmp(a));
    (l[0] - l[1] - l[2] - l[3]).max(0.0)
}

/// Reduced density matrix by explicit summation over the traced indices.
pub fn partial_trace_loop(psi: &DVector<C64>, n: usize, keep: &[usize]) -> DMatrix<C64> {
    let dk = 1 << keep.len();
    let mut rho = DMatrix::<C64>::zeros(dk, dk);
    let bit = |i: usize, q: usize| (i >> (n - 1 - q)) & 1;
    for a in 0..1usize << n {
        for b in 0..1usize << n {
            let traced_equal = (0..n).filter(|q| !keep.contains(q)).all(|q| bit(a, q) == bit(b, q));
            if !traced_equal {
                continue;
            }
            let ia = keep.iter().fold(0, |acc, &q| (acc << 1) | bit(a, q));
            let ib = keep.iter().fold(0, |acc, &q| (acc << 1) | bit(b, q));
            rho[(ia, ib)] += psi[a] * psi[b].conj();
        }
    }
    rho
}

/// Random full-rank-ish mixed two-qubit density matrix `G G^dagger / tr`.
pub fn random_mixed(r: &mut impl Rng, rank: usize) -> DMatrix<C64> {
    let g = DMatrix::from_fn(4, rank, |_, _| gaussian(r));
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    rho / tr
}

/// Haar-distributed single-qubit unitary from Euler angles.
pub fn random_unitary(r: &mut impl Rng) -> DMatrix<C64> {
    let u: f64 = r.random();
    let theta = u.sqrt().asin();
    let (a, b, g) = (
        r.random_range(0.0..std::f64::consts::TAU),
        r.random_range(0.0..std::f64::consts::TAU),
        r.random_range(0.0..std::f64::consts::TAU),
    );
    let ph = C64::from_polar(1.0, a);
    DMatrix::from_row_slice(
        2,
        2,
        &[
            ph * C64::from_polar(theta.cos(), b),
            ph * C64::from_polar(theta.sin(), g),
            -ph * C64::from_polar(theta.sin(), -g),
            ph * C64::from_polar(theta.cos(), -b),
        ],
    )
}

/// `(U_0 (x) ... (x) U_{n-1}) psi`.
pub fn apply_local(psi: &StateVector, us: &[DMatrix<C64>]) -> StateVector {
    let full = us
        .iter()
        .fold(DMatrix::<C64>::identity(1, 1), |acc, u| kron(&acc, u));
    StateVector::new(psi.n(), (full * psi.amplitudes()).iter().copied().collect()).unwrap()
}

/// Permutation matrix sending basis state `i` to `permute_index(i, perm)`.
pub fn permutation_matrix(perm: &[usize]) -> DMatrix<C64> {
    let n = perm.len();
    let dim = 1 << n;
    let mut p = DMatrix::<C64>::zeros(dim, dim);
    for i in 0..dim {
        let mut j = 0;
        for (q, &to) in perm.iter().enumerate() {
            let b = (i >> (n - 1 - q)) & 1;
            j |= b << (n - 1 - to);
        }
        p[(j, i)] = c(1.0, 0.0);
    }
    p
}

pub fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
