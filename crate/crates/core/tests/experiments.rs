//! Scenario-level checks of the presets.

mod common;

use common::*;

use nhe_core::dynamics::StateVector;
use nhe_core::entanglement::three_tangle;
use nhe_core::experiments::{
    find_optimal_drive, find_optimal_time, phase_sweep, preset, run_scenario, timescale_comparison,
    Axis, CouplingSpec, DriveSearch, Evaluator, HermitianDrive, Locator, Objective, PointStatus,
    Scenario, TimescaleOptions, Topology,
};
use nhe_core::hamiltonian::{build_hamiltonian, evolution_period, CouplingGraph, PtPhase, QubitParams};
use nhe_core::output::sweep_table;

const LN2: f64 = std::f64::consts::LN_2;

fn scenario(name: &str) -> Scenario {
    preset(name).unwrap()
}

fn w_entropy() -> f64 {
    3f64.ln() - 2.0 / 3.0 * LN2
}

fn mean_entropies(res: &nhe_core::experiments::SweepResult) -> Vec<(f64, f64)> {
    res.points
        .iter()
        .map(|p| (p.coords[0], p.report.as_ref().map_or(f64::NAN, |r| r.mean_entropy())))
        .collect()
}

#[test]
fn ghz_regime_pairwise_concurrences_dip_together() {
    let res = run_scenario(&scenario("fig1a")).unwrap();
    let dip = res
        .reports()
        .filter(|r| (3.0..=3.5).contains(&r.t))
        .map(|r| r.max_concurrence())
        .fold(f64::INFINITY, f64::min);
    assert!(dip < 0.05, "smallest max C_jk near 3.23 us: {dip}");
}

#[test]
fn chain_reaches_w_entropies() {
    let r = Evaluator::from_scenario(&scenario("fig1b")).unwrap().at(3.23).unwrap().unwrap();
    assert!(r.tangle.unwrap() < 0.05);
    for s in &r.entropies {
        assert!((s - w_entropy()).abs() < 0.05, "{:?}", r.entropies);
    }
}

#[test]
fn hermitian_member_of_hybrid_stays_separable() {
    let r = Evaluator::from_scenario(&scenario("fig3b")).unwrap().at(3.23).unwrap().unwrap();
    let s = &r.entropies;
    assert!(s[0] < 0.05, "{s:?}");
    assert!((s[1] - LN2).abs() < 0.05 && (s[2] - LN2).abs() < 0.05, "{s:?}");
}

#[test]
fn optimal_ghz_time_is_half_a_period() {
    let s = scenario("fig1a");
    let o = find_optimal_time(&s, (0.0, 6.5), Objective::MaxTau, 0.005).unwrap();
    assert!((o.t - 3.23).abs() <= 0.05, "{o:?}");
    let period = evolution_period(&s.qubits[0]).unwrap();
    assert!((o.t / period - 0.5).abs() <= 0.05 * 0.5, "t*/T = {}", o.t / period);
}

#[test]
fn decoupled_pair_is_maximally_entangled() {
    let o = find_optimal_time(&scenario("fig1a-inset"), (3.0, 3.5), Objective::MaxConcurrence(0, 1), 0.005)
        .unwrap();
    assert!(o.value > 0.95 && (o.t - 3.23).abs() < 0.05, "{o:?}");
}

#[test]
fn optimal_drive_for_the_quoted_couplings() {
    for (j, want) in [(1e-3, 1.576), (1e-4, 1.529)] {
        let d = find_optimal_drive(&DriveSearch::new(6.0, CouplingSpec::uniform(Topology::AllToAll, j))).unwrap();
        assert!((d.omega - want).abs() <= 0.01, "J = {j}: {d:?}");
    }
}

/// Best tangle over a coarse `(omega, t)` grid, stepping a Taylor integrator.
fn brute_force_drive(j: f64, omegas: &[f64], dt: f64) -> f64 {
    let mut best = (f64::NAN, f64::NEG_INFINITY);
    for &w in omegas {
        let q = QubitParams::resonant(6.0, w).unwrap();
        let h = build_hamiltonian(&[q; 3], &CouplingGraph::all_to_all(3, j).unwrap()).unwrap();
        let period = evolution_period(&q).unwrap();
        let mut v = StateVector::coherent_superposition(3).unwrap().into_vector();
        let mut t = 0.0;
        while t + dt <= period {
            v = taylor_propagate(h.matrix(), &v, dt, 1e-13);
            let norm = v.norm();
            v /= nhe_core::C64::new(norm, 0.0);
            t += dt;
            let tau = three_tangle(&StateVector::from_vector(3, v.clone()).unwrap()).unwrap();
            if tau > best.1 {
                best = (w, tau);
            }
        }
    }
    best.0
}

#[test]
fn optimal_drive_approaches_the_exceptional_point_as_coupling_vanishes() {
    let search = |j: f64| {
        find_optimal_drive(&DriveSearch::new(6.0, CouplingSpec::uniform(Topology::AllToAll, j)))
            .unwrap()
            .omega
    };
    let (w3, w4, w5) = (search(1e-3), search(1e-4), search(1e-5));
    assert!(1.5 < w5 && w5 < w4 && w4 < w3, "{w5} {w4} {w3}");
    assert!(w5 - 1.5 < 0.03, "{w5}");

    let omegas: Vec<f64> = (1..=30).map(|i| 1.5 + 0.005 * i as f64).collect();
    let coarse = brute_force_drive(1e-4, &omegas, 0.02);
    assert!((coarse - w4).abs() <= 0.01, "coarse scan {coarse}, search {w4}");
}

#[test]
fn broken_phase_stays_unentangled_and_symmetric_phase_entangles() {
    let axis = Axis::Linear {
        start: 0.02,
        end: 8.0,
        points: 400,
    };
    let res = phase_sweep(&axis, 6.0, 0.1, 1.08).unwrap();
    assert_eq!(res.phase_boundary, Some(1.5));
    let curve = mean_entropies(&res);
    for (p, &(w, s)) in res.points.iter().zip(&curve) {
        if w <= 1.2 {
            assert!(s < 0.05, "Omega = {w}: {s}");
            assert_eq!(p.phase, Some(PtPhase::PtBroken));
        }
        if w > 1.5 {
            assert_eq!(p.phase, Some(PtPhase::PtSymmetric));
        }
    }
    let rise = curve
        .iter()
        .filter(|(w, _)| (1.5..=2.5).contains(w))
        .map(|&(_, s)| s)
        .fold(0.0, f64::max);
    assert!(rise > 0.4, "{rise}");
}

#[test]
fn strong_drive_tracks_the_hermitian_curve_on_average() {
    // pointwise the lossy curve oscillates about the Hermitian one by up to ~0.2
    let lossy = mean_entropies(&run_scenario(&scenario("fig5d")).unwrap());
    let herm = mean_entropies(&run_scenario(&scenario("fig5d-hermitian")).unwrap());
    let strong: Vec<_> = lossy.iter().zip(&herm).filter(|((w, _), _)| *w >= 6.0).collect();
    assert!(strong.len() > 50);
    let n = strong.len() as f64;
    let a = strong.iter().map(|(l, _)| l.1).sum::<f64>() / n;
    let b = strong.iter().map(|(_, h)| h.1).sum::<f64>() / n;
    assert!((a - b).abs() < 0.1, "{a} vs {b}");
}

#[test]
fn hermitian_control_carries_no_phase_annotation() {
    let res = run_scenario(&scenario("fig5c-hermitian")).unwrap();
    assert_eq!(res.phase_boundary, None);
    assert!(res.points.iter().all(|p| p.phase.is_none() && p.status == PointStatus::Ok));
}

#[test]
fn lossy_register_entangles_an_order_of_magnitude_sooner() {
    let c = timescale_comparison(0.1, &TimescaleOptions::default()).unwrap();
    assert!((c.t_lossy - 1.08).abs() <= 0.15, "{c:?}");
    assert!((c.t_hermitian - 13.0).abs() <= 1.0, "{c:?}");
    assert!(c.ratio <= 0.1, "{c:?}");
}

#[test]
fn hermitian_time_scales_inversely_with_coupling() {
    let o = TimescaleOptions::default();
    let (a, b) = (timescale_comparison(0.1, &o).unwrap(), timescale_comparison(0.2, &o).unwrap());
    let halving = a.t_hermitian / b.t_hermitian;
    assert!((halving - 2.0).abs() < 0.2, "{a:?} {b:?}");
    assert!((b.ratio / a.ratio - 2.0).abs() < 0.3, "{a:?} {b:?}");
}

#[test]
fn comparison_ratio_tends_to_one_without_loss() {
    let opts = |gamma| TimescaleOptions {
        gamma,
        hermitian_drive: HermitianDrive::Driven,
        hermitian_locator: Locator::EntropyPeak,
        ..Default::default()
    };
    assert_eq!(timescale_comparison(0.1, &opts(0.0)).unwrap().ratio, 1.0);
    let near = timescale_comparison(0.1, &opts(1e-3)).unwrap();
    assert!((near.ratio - 1.0).abs() < 0.01, "{near:?}");
}

#[test]
fn tangle_is_bright_around_the_uniform_optimum() {
    let res = run_scenario(&scenario("fig2a")).unwrap();
    let (mut best, mut at) = (f64::NEG_INFINITY, (0.0, 0.0));
    for p in &res.points {
        let tau = p.report.as_ref().unwrap().tangle.unwrap();
        if tau > best {
            best = tau;
            at = (p.coords[0], p.coords[1]);
        }
        let near = |x: f64| (0.5e-3..=1.5e-3).contains(&x);
        if near(p.coords[0]) && near(p.coords[1]) {
            assert!(tau > 0.5, "{:?}: {tau}", p.coords);
        }
        if p.coords[0] >= 1e-2 || p.coords[1] >= 1e-2 {
            assert!(tau < 0.2, "{:?}: {tau}", p.coords);
        }
    }
    assert!((at.0 / 1e-3 - 1.0).abs() < 0.5 && (at.1 / 1e-3 - 1.0).abs() < 0.5, "{at:?}");
}

#[test]
fn small_detuning_changes_nothing_and_large_detuning_suppresses_the_tangle() {
    let res = run_scenario(&scenario("fig2b")).unwrap();
    let at = |delta: f64, t: f64| {
        res.points
            .iter()
            .find(|p| p.coords[0] == delta && (p.coords[1] - t).abs() < 1e-9)
            .and_then(|p| p.report.clone())
            .unwrap()
    };
    let resonant = res.points.iter().filter(|p| p.coords[0] == 0.0 && (3.0..=3.5).contains(&p.coords[1]));
    let t = resonant
        .max_by(|a, b| {
            let tau = |p: &&nhe_core::experiments::SweepPoint| p.report.as_ref().unwrap().tangle.unwrap();
            tau(a).total_cmp(&tau(b))
        })
        .unwrap()
        .coords[1];
    for (a, b) in at(0.0, t).entropies.iter().zip(&at(1e-3, t).entropies) {
        assert!((a - b).abs() < 0.05);
    }
    let peak = res
        .points
        .iter()
        .filter(|p| p.coords[0] == 0.1)
        .filter_map(|p| p.report.as_ref()?.tangle)
        .fold(0.0, f64::max);
    assert!(peak < 0.5, "{peak}");
}

#[test]
fn uniform_chain_optimum_is_where_entropies_meet() {
    // entropies also coincide trivially where the register is barely entangled
    let res = run_scenario(&scenario("fig2c")).unwrap();
    let closest = res
        .points
        .iter()
        .filter_map(|p| Some((p.coords[0], p.report.as_ref()?)))
        .filter(|(_, r)| r.mean_entropy() > 0.5)
        .map(|(j, r)| {
            let hi = r.entropies.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = r.entropies.iter().copied().fold(f64::INFINITY, f64::min);
            (j, hi - lo)
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    assert!((closest.0 / 1e-3 - 1.0).abs() <= 0.2, "{closest:?}");
}

#[test]
fn every_point_records_its_raw_norm() {
    let res = run_scenario(&scenario("fig5c")).unwrap();
    for p in &res.points {
        match p.status {
            PointStatus::Ok => assert!(p.raw_norm.is_some_and(|n| n > 0.0 && n <= 1.0 + 1e-12)),
            PointStatus::Vanished => assert!(p.report.is_none()),
        }
    }
}

#[test]
fn sweeps_are_deterministic() {
    for name in ["fig2c", "fig2b", "fig5c"] {
        let s = scenario(name);
        let (a, b) = (run_scenario(&s).unwrap(), run_scenario(&s).unwrap());
        assert_eq!(a, b, "{name}");
        assert_eq!(sweep_table(&a, 3).to_csv().unwrap(), sweep_table(&b, 3).to_csv().unwrap());
    }
}
