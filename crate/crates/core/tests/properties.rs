//! Randomized invariants of the Hamiltonian, the propagator and the measures.

mod common;

use common::*;
use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;

use nhe_core::basis::permute_index;
use nhe_core::dynamics::{decompose, propagate, Propagator, StateVector};
use nhe_core::entanglement::{concurrence, entropy, partial_trace, report, three_tangle};
use nhe_core::hamiltonian::{
    build_hamiltonian, classify_phase, CouplingGraph, HamiltonianMatrix, PtPhase, QubitParams,
};
use nhe_core::C64;

const LN2: f64 = std::f64::consts::LN_2;

fn qubit(hermitian: bool) -> impl Strategy<Value = QubitParams> {
    let gamma = if hermitian { 0.0..=0.0 } else { 0.0..=6.0 };
    (-0.1..0.1f64, gamma, 0.0..3.0f64).prop_map(|(delta, gamma, omega)| QubitParams {
        delta,
        gamma,
        omega,
    })
}

fn setup(n: usize, hermitian: bool) -> impl Strategy<Value = (Vec<QubitParams>, CouplingGraph)> {
    (
        prop::collection::vec(qubit(hermitian), n),
        prop::collection::vec(0.0..0.1f64, n * (n - 1) / 2),
    )
        .prop_map(move |(qs, js)| {
            let mut g = CouplingGraph::uncoupled(n).unwrap();
            let mut it = js.into_iter();
            for j in 0..n {
                for k in j + 1..n {
                    g = g.with_pair(j, k, it.next().unwrap()).unwrap();
                }
            }
            (qs, g)
        })
}

fn any_setup(hermitian: bool) -> impl Strategy<Value = (Vec<QubitParams>, CouplingGraph)> {
    (1usize..=3).prop_flat_map(move |n| setup(n, hermitian))
}

fn hamiltonian(qs: &[QubitParams], g: &CouplingGraph) -> HamiltonianMatrix {
    build_hamiltonian(qs, g).unwrap()
}

fn state(n: usize, seed: u64) -> StateVector {
    random_state(&mut rng(seed), n)
}

fn permuted(psi: &StateVector, perm: &[usize]) -> StateVector {
    let mut a = vec![C64::new(0.0, 0.0); psi.dim()];
    for (i, z) in psi.amplitudes().iter().enumerate() {
        a[permute_index(i, perm)] = *z;
    }
    StateVector::new(psi.n(), a).unwrap()
}

fn measures(psi: &StateVector) -> Vec<f64> {
    let r = report(psi, 0.0).unwrap();
    let mut v: Vec<f64> = r.concurrences.iter().map(|p| p.value).collect();
    v.extend(&r.entropies);
    v.extend(r.tangle);
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn hermitian_without_loss((qs, g) in any_setup(true)) {
        prop_assert!(hamiltonian(&qs, &g).hermiticity_defect() <= 1e-12);
    }

    #[test]
    fn swapping_qubits_conjugates_by_permutation(
        (qs, g) in setup(3, false),
        (a, b) in (0usize..3, 0usize..3).prop_filter("distinct", |(a, b)| a != b),
    ) {
        let mut perm = [0, 1, 2];
        perm.swap(a, b);
        let qs2: Vec<_> = (0..3).map(|q| qs[perm[q]]).collect();
        let mut g2 = CouplingGraph::uncoupled(3).unwrap();
        for j in 0..3 {
            for k in j + 1..3 {
                g2 = g2.with_pair(j, k, g.get(perm[j], perm[k])).unwrap();
            }
        }
        let p = permutation_matrix(&perm);
        let want = &p * hamiltonian(&qs, &g).matrix() * p.transpose();
        prop_assert!(max_abs(&(hamiltonian(&qs2, &g2).matrix() - want)) <= 1e-12);
    }

    #[test]
    fn trace_counts_each_projector_on_half_the_basis((qs, g) in any_setup(false)) {
        let n = qs.len();
        let half = (1usize << (n - 1)) as f64;
        let want: C64 = qs.iter().map(|q| C64::new(q.delta, -q.gamma / 2.0) * half).sum();
        prop_assert!((hamiltonian(&qs, &g).trace() - want).norm() <= 1e-12);
    }

    #[test]
    fn raising_the_drive_never_breaks_symmetry(
        gamma in 0.0..10.0f64,
        w1 in 0.0..5.0f64,
        dw in 0.0..5.0f64,
    ) {
        let phase = |w: f64| classify_phase(&QubitParams::resonant(gamma, w).unwrap(), 1e-9).unwrap().phase;
        if phase(w1) == PtPhase::PtSymmetric {
            prop_assert_eq!(phase(w1 + dw), PtPhase::PtSymmetric);
        }
        if phase(w1 + dw) == PtPhase::PtBroken {
            prop_assert_eq!(phase(w1), PtPhase::PtBroken);
        }
    }

    #[test]
    fn raw_norm_never_grows((qs, g) in any_setup(false), seed in any::<u64>()) {
        let qs: Vec<_> = qs.into_iter().map(|q| QubitParams { delta: 0.0, ..q }).collect();
        let h = hamiltonian(&qs, &g);
        let psi = state(qs.len(), seed);
        let mut last = psi.norm();
        for i in 1..=40 {
            let norm = propagate(&h, &psi, 0.2 * i as f64).unwrap().norm();
            prop_assert!(norm <= last + 1e-9, "t = {}: {} > {}", 0.2 * i as f64, norm, last);
            last = norm;
        }
    }

    #[test]
    fn trajectory_raw_norms_match_pointwise((qs, g) in any_setup(false), seed in any::<u64>()) {
        let h = hamiltonian(&qs, &g);
        let psi = state(qs.len(), seed);
        let times: Vec<f64> = (0..30).map(|i| 0.1 * i as f64).collect();
        let tr = Propagator::new(&h).trajectory(&psi, &times).unwrap();
        prop_assume!(tr.terminated.is_none());
        for s in &tr.samples {
            let raw = propagate(&h, &psi, s.t).unwrap();
            prop_assert!((s.raw_norm - raw.norm()).abs() <= 1e-9 * raw.norm().max(1e-300));
            let unit = raw.amplitudes() / C64::new(raw.norm(), 0.0);
            prop_assert!((s.state.amplitudes() - unit).norm() <= 1e-9);
        }
    }

    #[test]
    fn hermitian_limit_is_unitary(
        (qs, g) in any_setup(true),
        seed in any::<u64>(),
        t in 0.0..20.0f64,
    ) {
        let h = hamiltonian(&qs, &g);
        let psi = state(qs.len(), seed);
        let e = SymmetricEigen::new(h.matrix().clone());
        let phases = DMatrix::from_diagonal(&e.eigenvalues.map(|l| C64::from_polar(1.0, -l * t)));
        let want = &e.eigenvectors * phases * e.eigenvectors.adjoint() * psi.amplitudes();
        let got = propagate(&h, &psi, t).unwrap();
        prop_assert!((got.norm() - 1.0).abs() <= 1e-10);
        prop_assert!((got.amplitudes() - want).norm() <= 1e-10);
    }

    #[test]
    fn semigroup(
        (qs, g) in any_setup(false),
        seed in any::<u64>(),
        t1 in 0.0..5.0f64,
        t2 in 0.0..5.0f64,
    ) {
        let h = hamiltonian(&qs, &g);
        let psi = state(qs.len(), seed);
        let two_steps = propagate(&h, &propagate(&h, &psi, t1).unwrap(), t2).unwrap();
        let one_step = propagate(&h, &psi, t1 + t2).unwrap();
        let err = (two_steps.amplitudes() - one_step.amplitudes()).norm();
        prop_assert!(err <= 1e-9 * one_step.norm().max(1e-300), "{:e}", err);
    }

    #[test]
    fn spectral_reconstruction_matches_propagation(
        (qs, g) in any_setup(false),
        seed in any::<u64>(),
        t in 0.0..5.0f64,
    ) {
        let h = hamiltonian(&qs, &g);
        let psi = state(qs.len(), seed);
        let d = decompose(&h, &psi).unwrap();
        prop_assume!(d.condition_number() < 1e6);
        let want = propagate(&h, &psi, t).unwrap().into_vector();
        prop_assert!((d.reconstruct(t) - &want).norm() <= 1e-6 * want.norm());
    }

    #[test]
    fn measures_ignore_local_unitaries(seed in any::<u64>()) {
        let mut r = rng(seed);
        let psi = random_state(&mut r, 3);
        let us: Vec<_> = (0..3).map(|_| random_unitary(&mut r)).collect();
        let before = measures(&psi);
        let after = measures(&apply_local(&psi, &us));
        for (a, b) in before.iter().zip(&after) {
            prop_assert!((a - b).abs() <= 1e-8, "{} vs {}", a, b);
        }
    }

    #[test]
    fn tangle_vanishes_on_biseparable_states(seed in any::<u64>(), lone in 0usize..3) {
        let mut r = rng(seed);
        let single = random_state(&mut r, 1);
        let pair = random_state(&mut r, 2);
        let joint = kron(
            &DMatrix::from_column_slice(2, 1, single.amplitudes().as_slice()),
            &DMatrix::from_column_slice(4, 1, pair.amplitudes().as_slice()),
        );
        let psi = StateVector::new(3, joint.iter().copied().collect()).unwrap();
        // move qubit 0 into position `lone`
        let mut perm = [0, 1, 2];
        perm.swap(0, lone);
        let psi = permuted(&psi, &perm);
        prop_assert!(three_tangle(&psi).unwrap().abs() <= 1e-9);
    }

    #[test]
    fn entropies_stay_within_bounds(seed in any::<u64>(), n in 2usize..=4) {
        let psi = state(n, seed);
        for q in 0..n {
            let s = entropy(&partial_trace(&psi, &[q]).unwrap());
            prop_assert!((-1e-12..=LN2 + 1e-12).contains(&s), "S = {}", s);
        }
    }

    #[test]
    fn monogamy(seed in any::<u64>()) {
        let psi = state(3, seed);
        for (a, b, c) in [(0, 1, 2), (1, 0, 2), (2, 0, 1)] {
            let rho = partial_trace(&psi, &[a]).unwrap();
            let m = rho.matrix();
            let linear = 4.0 * (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re;
            let cab = concurrence(&partial_trace(&psi, &[a.min(b), a.max(b)]).unwrap()).unwrap();
            let cac = concurrence(&partial_trace(&psi, &[a.min(c), a.max(c)]).unwrap()).unwrap();
            prop_assert!(cab * cab + cac * cac <= linear + 1e-8);
        }
    }
}
