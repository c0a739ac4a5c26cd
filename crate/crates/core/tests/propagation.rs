mod common;

use std::f64::consts::PI;

use adiapower::propagator::{propagate_in_frame, Frame};
use adiapower::{propagate, propagate_cycles, CoilPair, LossModel, ReloadPolicy, Scenario, Schedule};
use approx::assert_relative_eq;
use num_complex::Complex64;
use proptest::prelude::*;

fn schedule_strategy() -> impl Strategy<Value = Schedule> {
    (0usize..4, 1e4..1e5f64, -2e5..2e5f64, 1e8..5e9f64, 0.0..2e-4f64, 5e-5..2e-4f64).prop_map(
        |(v, k, d, b, t0, period)| match v {
            0 => Schedule::constant(k, d),
            1 => Schedule::linear_chirp(k, d, b, t0),
            2 => Schedule::detuning_coupled(k, d, b, t0),
            _ => Schedule::cyclic(period, Schedule::linear_chirp(k, d, b, t0)),
        },
    )
}

fn initial_strategy() -> impl Strategy<Value = CoilPair> {
    (0.0..2.0 * PI, 0.0..2.0 * PI, 0.0..2.0 * PI).prop_map(|(mix, ps, pd)| {
        CoilPair::new(Complex64::from_polar(mix.cos(), ps), Complex64::from_polar(mix.sin(), pd))
    })
}

fn lossless(schedule: Schedule, initial: CoilPair) -> Scenario {
    Scenario::new(schedule, LossModel::lossless(), 0.0, 2e-4)
        .with_tolerances(1e-10, 1e-12)
        .with_initial(initial)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn lossless_norm_is_conserved(schedule in schedule_strategy(), initial in initial_strategy()) {
        let traj = propagate(&lossless(schedule, initial)).unwrap();
        let e0 = traj.states[0].total_energy();
        for s in &traj.states {
            prop_assert!((s.total_energy() - e0).abs() < 1e-9);
        }
    }

    #[test]
    fn lossy_energy_balance(
        schedule in schedule_strategy(),
        initial in initial_strategy(),
        gs in 0.0..2e4f64,
        gd in 0.0..2e4f64,
        gw in 0.0..2e4f64,
    ) {
        let losses = LossModel::new(gs, gd, gw).unwrap();
        let scenario = Scenario { losses, ..lossless(schedule, initial) };
        let traj = propagate(&scenario).unwrap();
        let e0 = traj.states[0].total_energy();
        for s in &traj.states {
            let total = s.total_energy() + 2.0 * gs * s.acc_s + 2.0 * losses.drain_total() * s.acc_d;
            prop_assert!(((total - e0) / e0).abs() < 1e-8, "balance {} vs {}", total, e0);
        }
    }

    #[test]
    fn energies_do_not_depend_on_frame(
        schedule in schedule_strategy(),
        initial in initial_strategy(),
        g in 0.0..1e4f64,
    ) {
        // Both runs carry their own solver error, so integrate well below the
        // comparison tolerance.
        let scenario = Scenario { losses: LossModel::new(g, g, g).unwrap(), ..lossless(schedule, initial) }
            .with_tolerances(1e-12, 1e-14);
        let a = propagate_in_frame(&scenario, Frame::Symmetric).unwrap();
        let b = propagate_in_frame(&scenario, Frame::SourceAnchored).unwrap();
        for (x, y) in a.states.iter().zip(&b.states) {
            prop_assert!((x.source_energy() - y.source_energy()).abs() < 1e-9);
            prop_assert!((x.drain_energy() - y.drain_energy()).abs() < 1e-9);
        }
    }

    #[test]
    fn tightening_tolerance_barely_moves_the_result(
        schedule in schedule_strategy(),
        g in 0.0..1e4f64,
        gw in 0.0..1e4f64,
    ) {
        let rel_tol = 1e-8;
        let base = Scenario::new(schedule, LossModel::new(g, g, gw).unwrap(), 0.0, 2e-4)
            .with_tolerances(rel_tol, 1e-12);
        let coarse = propagate(&base).unwrap().last().drain_energy();
        let fine = propagate(&base.clone().with_tolerances(rel_tol / 2.0, 1e-12)).unwrap().last().drain_energy();
        prop_assert!((coarse - fine).abs() <= 10.0 * rel_tol, "{} vs {}", coarse, fine);
    }

    #[test]
    fn static_resonant_runs_follow_rabi(kappa0 in 1e4..1e5f64) {
        let scenario = Scenario::new(Schedule::constant(kappa0, 0.0), LossModel::lossless(), 0.0, 2e-4);
        let traj = propagate(&scenario).unwrap();
        for (&t, s) in traj.times.iter().zip(&traj.states) {
            prop_assert!((s.drain_energy() - (kappa0 * t).sin().powi(2)).abs() < 1e-6);
        }
    }
}

#[test]
fn rabi_full_transfer_at_quarter_period() {
    let t_full = PI / (2.0 * 4e4);
    let scenario = Scenario::new(Schedule::constant(4e4, 0.0), LossModel::lossless(), 0.0, t_full);
    assert_relative_eq!(propagate(&scenario).unwrap().last().drain_energy(), 1.0, epsilon = 1e-9);
    assert_relative_eq!(t_full, 3.927e-5, max_relative = 1e-4);
}

#[test]
fn pure_source_decay() {
    let scenario = Scenario::new(Schedule::constant(0.0, 0.0), LossModel::new(2e3, 0.0, 0.0).unwrap(), 0.0, 1e-4);
    let traj = propagate(&scenario).unwrap();
    for (&t, s) in traj.times.iter().zip(&traj.states) {
        assert_relative_eq!(s.source_energy(), (-4e3 * t).exp(), max_relative = 1e-9);
    }
    assert_relative_eq!(traj.last().source_energy(), 0.6703, epsilon = 1e-4);
}

#[test]
fn main_solver_matches_reference_integrator() {
    let schedule = Schedule::linear_chirp(4e4, 2e5, 3e9, 1e-4);
    let drive = common::Drive::chirp(4e4, 2e5, 3e9, 1e-4);
    let losses = LossModel::new(2e3, 2e3, 1e4).unwrap();
    let got = propagate(&Scenario::new(schedule, losses, 0.0, 2e-4)).unwrap();
    let want = common::rk4_final(&drive, 2e3, 2e3, 1e4, 2e-4, 1e-9);
    let last = got.last();
    assert_relative_eq!(last.a_s.re, want[0], epsilon = 1e-7);
    assert_relative_eq!(last.a_s.im, want[1], epsilon = 1e-7);
    assert_relative_eq!(last.a_d.re, want[2], epsilon = 1e-7);
    assert_relative_eq!(last.a_d.im, want[3], epsilon = 1e-7);
    assert_relative_eq!(last.acc_s, want[4], max_relative = 1e-7);
    assert_relative_eq!(last.acc_d, want[5], max_relative = 1e-7);
}

#[test]
fn chirp_through_resonance_reports_landau_zener_scale_transfer() {
    // Finite window: E_D oscillates about the asymptotic value with
    // amplitude ≈ 2(κ₀/Δ_end)√(P(1−P)).
    let (kappa0, beta) = (4e4, 3e9);
    let span = 2e6 / beta;
    let scenario = Scenario::new(Schedule::linear_chirp(kappa0, 0.0, beta, span / 2.0), LossModel::lossless(), 0.0, span);
    let got = propagate(&scenario).unwrap().last().drain_energy();
    let reference = common::rk4_final(&common::Drive::chirp(kappa0, 0.0, beta, span / 2.0), 0.0, 0.0, 0.0, span, 1e-9);
    assert_relative_eq!(got, reference[2].powi(2) + reference[3].powi(2), max_relative = 1e-6);
    let p = (-2.0 * PI * kappa0 * kappa0 / beta).exp();
    assert!((got - (1.0 - p)).abs() < 2.0 * (kappa0 / 1e6) * (p * (1.0 - p)).sqrt());
}

#[test]
fn samples_span_the_window() {
    let scenario = Scenario::new(Schedule::linear_chirp(4e4, 2e5, 3e9, 1e-4), LossModel::lossless(), 1e-5, 2e-4)
        .with_samples(37);
    let traj = propagate(&scenario).unwrap();
    assert_eq!(traj.len(), 37);
    assert_eq!(traj.times[0], 1e-5);
    assert_eq!(traj.t_end(), 2e-4);
    assert_eq!(traj.times, scenario.sample_times());
    assert_eq!(traj.states[0], CoilPair::charged_source());
}

#[test]
fn one_cycle_is_a_plain_run() {
    let inner = Schedule::linear_chirp(4e4, 2e5, 3e9, 1e-4);
    let losses = LossModel::new(2e3, 2e3, 1e4).unwrap();
    let cyclic = Scenario::new(Schedule::cyclic(2e-4, inner.clone()), losses, 0.0, 2e-4);
    let run = propagate_cycles(&cyclic, 1, ReloadPolicy::PreserveDrain).unwrap();
    let plain = propagate(&Scenario::new(inner, losses, 0.0, 2e-4)).unwrap();
    assert_eq!(run.trajectory.states, plain.states);
    assert_eq!(run.cycles.len(), 1);
}

#[test]
fn lossless_two_cycle_bookkeeping() {
    let inner = Schedule::linear_chirp(4e4, 2e5, 3e9, 1e-4);
    let scenario = Scenario::new(Schedule::cyclic(2e-4, inner), LossModel::lossless(), 0.0, 2e-4);
    let run = propagate_cycles(&scenario, 2, ReloadPolicy::PreserveDrain).unwrap();
    let e_s_before = run.cycles[0].source_energy_end;
    assert_relative_eq!(run.injected_energy, 2.0 - e_s_before, epsilon = 1e-12);
    // With no losses, the final energy equals what was put in.
    assert_relative_eq!(run.trajectory.last().total_energy(), run.injected_energy, epsilon = 1e-8);
    // Post-reload state sits at the boundary.
    let boundary = run.trajectory.times.iter().position(|&t| t == 2e-4).unwrap();
    assert_eq!(run.trajectory.states[boundary].a_s, Complex64::new(1.0, 0.0));
}
