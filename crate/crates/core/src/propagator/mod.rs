//! Integration of the coupled-mode equations.
//!
//! The equations are solved in a rotating frame: only the detuning
//! Δ = ω_D − ω_S enters, split symmetrically as diag(−Δ/2, +Δ/2). The
//! augmented state carries the two complex amplitudes and the running
//! integrals ∫|a_S|² dt and ∫|a_D|² dt, so the efficiency integrals come out
//! of the solver at the same accuracy as the amplitudes.

mod dopri5;

pub use dopri5::{Dopri5, Stats, StepFailure};

use num_complex::Complex64;

use crate::adiabatic::SampleDiagnostics;
use crate::error::{Error, Result};
use crate::model::{uniform_grid, CoilPair, LossModel, Scenario};
use crate::schedules::{DriveValue, Schedule, SmoothPiece};

/// Fraction of the fastest rate in the problem used as the step-size cap.
const MAX_STEP_FRACTION: f64 = 0.05;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// How the detuning is split across the diagonal of the coupling matrix.
/// Energies do not depend on the choice; it only changes the phase reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Frame {
    /// diag(−Δ/2, +Δ/2).
    #[default]
    Symmetric,
    /// diag(0, Δ): rotating with the source frequency.
    SourceAnchored,
}

impl Frame {
    fn diagonal(self, delta: f64) -> (f64, f64) {
        match self {
            Frame::Symmetric => (-0.5 * delta, 0.5 * delta),
            Frame::SourceAnchored => (0.0, delta),
        }
    }
}

/// Time derivative of the augmented state under the drive `(κ, Δ)`.
pub fn rhs_with(drive: DriveValue, state: &CoilPair, losses: &LossModel, frame: Frame) -> CoilPair {
    let (w_s, w_d) = frame.diagonal(drive.delta);
    let a_s = state.a_s;
    let a_d = state.a_d;
    CoilPair {
        a_s: -I * w_s * a_s - losses.gamma_s * a_s - I * drive.kappa * a_d,
        a_d: -I * w_d * a_d - losses.drain_total() * a_d - I * drive.kappa * a_s,
        acc_s: a_s.norm_sqr(),
        acc_d: a_d.norm_sqr(),
    }
}

/// Time derivative of the augmented state at `t` in the symmetric frame.
pub fn rhs(t: f64, state: &CoilPair, schedule: &Schedule, losses: &LossModel) -> CoilPair {
    rhs_with(schedule.eval(t), state, losses, Frame::Symmetric)
}

/// Sampled solution of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<CoilPair>,
    /// (κ, Δ) at each sample.
    pub drive: Vec<DriveValue>,
    /// Adiabatic-basis diagnostics, filled by [`crate::adiabatic::annotate_trajectory`].
    pub diagnostics: Option<Vec<SampleDiagnostics>>,
}

impl Trajectory {
    /// Builds a trajectory from raw samples, checking ordering and lengths.
    pub fn from_samples(times: Vec<f64>, states: Vec<CoilPair>, drive: Vec<DriveValue>) -> Result<Self> {
        if times.len() != states.len() || times.len() != drive.len() {
            return Err(Error::domain("trajectory arrays must have equal length"));
        }
        if times.is_empty() {
            return Err(Error::domain("trajectory must have at least one sample"));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::domain("trajectory times must be strictly increasing"));
        }
        Ok(Self { times, states, drive, diagnostics: None })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn t_start(&self) -> f64 {
        self.times[0]
    }

    pub fn t_end(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    pub fn last(&self) -> &CoilPair {
        &self.states[self.states.len() - 1]
    }

    /// (E_S, E_D) per sample.
    pub fn energies(&self) -> Vec<(f64, f64)> {
        self.states.iter().map(|s| (s.source_energy(), s.drain_energy())).collect()
    }

    pub fn source_energies(&self) -> Vec<f64> {
        self.states.iter().map(CoilPair::source_energy).collect()
    }

    pub fn drain_energies(&self) -> Vec<f64> {
        self.states.iter().map(CoilPair::drain_energy).collect()
    }

    /// Accumulators (∫|a_S|², ∫|a_D|²) at time `t`, by cubic Hermite
    /// interpolation between samples with the energies as slopes. Exact at
    /// sample times.
    pub fn accumulators_at(&self, t: f64) -> Result<(f64, f64)> {
        if !(t >= self.t_start() && t <= self.t_end()) {
            return Err(Error::domain(format!(
                "time {t:e} outside trajectory span [{:e}, {:e}]",
                self.t_start(),
                self.t_end()
            )));
        }
        let idx = self.times.partition_point(|&x| x < t);
        if idx < self.len() && self.times[idx] == t {
            let s = &self.states[idx];
            return Ok((s.acc_s, s.acc_d));
        }
        let (i0, i1) = (idx - 1, idx);
        let (t0, t1) = (self.times[i0], self.times[i1]);
        let (s0, s1) = (&self.states[i0], &self.states[i1]);
        let h = t1 - t0;
        let u = (t - t0) / h;
        let (h00, h10, h01, h11) = (
            (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u),
            u * (1.0 - u) * (1.0 - u),
            u * u * (3.0 - 2.0 * u),
            u * u * (u - 1.0),
        );
        let interp = |y0: f64, y1: f64, f0: f64, f1: f64| h00 * y0 + h10 * h * f0 + h01 * y1 + h11 * h * f1;
        Ok((
            interp(s0.acc_s, s1.acc_s, s0.source_energy(), s1.source_energy()),
            interp(s0.acc_d, s1.acc_d, s0.drain_energy(), s1.drain_energy()),
        ))
    }

    fn append(&mut self, t: f64, state: CoilPair, drive: DriveValue) {
        self.times.push(t);
        self.states.push(state);
        self.drive.push(drive);
    }
}

/// Step-size cap 0.05 / max(κ₀, max|Δ|, 1) so the resonance crossing is never skipped.
pub fn max_step_for(schedule: &Schedule, t_start: f64, t_end: f64) -> f64 {
    let rate = schedule
        .kappa0()
        .max(schedule.max_abs_detuning(t_start, t_end))
        .max(1.0);
    MAX_STEP_FRACTION / rate
}

struct Integration<'a> {
    losses: &'a LossModel,
    solver: Dopri5,
    frame: Frame,
}

impl Integration<'_> {
    /// Integrates across `pieces`, recording states at `samples` (which must lie
    /// within the pieces' span, the first sample at its start). Returns the
    /// recorded states and the state at the end of the last piece.
    fn run(&self, pieces: &[SmoothPiece<'_>], initial: CoilPair, samples: &[f64]) -> Result<(Vec<CoilPair>, CoilPair)> {
        let mut recorded = Vec::with_capacity(samples.len());
        let mut next_sample = 0;
        while next_sample < samples.len() && samples[next_sample] <= pieces[0].start {
            recorded.push(initial);
            next_sample += 1;
        }
        let mut state = initial;
        for piece in pieces {
            let mut stops: Vec<(f64, bool)> = Vec::new();
            while next_sample < samples.len() && samples[next_sample] <= piece.end {
                stops.push((samples[next_sample], true));
                next_sample += 1;
            }
            if stops.last().map_or(true, |&(t, _)| t < piece.end) {
                stops.push((piece.end, false));
            }
            let times: Vec<f64> = stops.iter().map(|s| s.0).collect();
            let mut k = 0;
            let mut end = state.to_array();
            let losses = self.losses;
            let frame = self.frame;
            let deriv = |t: f64, y: &[f64; 6]| {
                let d = rhs_with(piece.eval(t), &CoilPair::from_array(y), losses, frame);
                d.to_array()
            };
            self.solver
                .integrate(deriv, piece.start, state.to_array(), &times, |_, y| {
                    if stops[k].1 {
                        recorded.push(CoilPair::from_array(y));
                    }
                    end = *y;
                    k += 1;
                })
                .map_err(|e| Error::Integration { t: e.t, reason: e.reason })?;
            state = CoilPair::from_array(&end);
        }
        Ok((recorded, state))
    }
}

/// Integrates `scenario` over its window in the symmetric frame.
pub fn propagate(scenario: &Scenario) -> Result<Trajectory> {
    propagate_in_frame(scenario, Frame::Symmetric)
}

/// As [`propagate`], with an explicit choice of rotating frame.
pub fn propagate_in_frame(scenario: &Scenario, frame: Frame) -> Result<Trajectory> {
    scenario.validate()?;
    let pieces = scenario.schedule.smooth_pieces(scenario.t_start, scenario.t_end);
    let integration = Integration {
        losses: &scenario.losses,
        solver: Dopri5 {
            rel_tol: scenario.rel_tol,
            abs_tol: scenario.abs_tol,
            max_step: max_step_for(&scenario.schedule, scenario.t_start, scenario.t_end),
        },
        frame,
    };
    let times = scenario.sample_times();
    let (states, _) = integration.run(&pieces, scenario.initial, &times)?;
    let drive = times.iter().map(|&t| scenario.schedule.eval(t)).collect();
    Ok(Trajectory { times, states, drive, diagnostics: None })
}

/// What happens to the coils when the source is recharged at a period boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReloadPolicy {
    /// a_S ← 1, drain untouched.
    #[default]
    PreserveDrain,
    /// a_S ← 1, a_D ← 0.
    ResetDrain,
}

/// Bookkeeping for one charge cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleSummary {
    pub index: usize,
    pub start: f64,
    pub end: f64,
    /// Source energy just before the reload that ends this cycle.
    pub source_energy_end: f64,
    pub drain_energy_end: f64,
    /// Accumulators at the start and end of the cycle.
    pub acc_start: (f64, f64),
    pub acc_end: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CycleRun {
    /// Concatenated samples. At interior period boundaries the post-reload state is kept.
    pub trajectory: Trajectory,
    pub cycles: Vec<CycleSummary>,
    /// Initial energy plus the net energy added at every reload.
    pub injected_energy: f64,
}

/// Integrates `n_cycles` periods of a cyclic schedule, recharging the source
/// instantly and without loss at every period boundary.
///
/// Each cycle is sampled with `scenario.sample_count` points; `t_end` of the
/// scenario is ignored in favour of `t_start + n_cycles · period`.
pub fn propagate_cycles(scenario: &Scenario, n_cycles: usize, reload: ReloadPolicy) -> Result<CycleRun> {
    let Schedule::Cyclic { period, .. } = scenario.schedule else {
        return Err(Error::domain("cycle propagation requires a Cyclic schedule"));
    };
    if n_cycles == 0 {
        return Err(Error::domain("n_cycles must be >= 1"));
    }
    let first = (scenario.t_start / period).round();
    if (first * period - scenario.t_start).abs() > 1e-12 * period.max(scenario.t_start.abs()) {
        return Err(Error::domain("cycles must start on a period boundary"));
    }
    let window = Scenario { t_end: scenario.t_start + period, ..scenario.clone() };
    window.validate()?;

    let integration = Integration {
        losses: &scenario.losses,
        solver: Dopri5 {
            rel_tol: scenario.rel_tol,
            abs_tol: scenario.abs_tol,
            max_step: max_step_for(&scenario.schedule, scenario.t_start, scenario.t_start + period),
        },
        frame: Frame::Symmetric,
    };

    let mut trajectory = Trajectory { times: vec![], states: vec![], drive: vec![], diagnostics: None };
    let mut cycles = Vec::with_capacity(n_cycles);
    let mut injected = scenario.initial.total_energy();
    let mut state = scenario.initial;
    for k in 0..n_cycles {
        let start = if k == 0 { scenario.t_start } else { (first + k as f64) * period };
        let end = (first + k as f64 + 1.0) * period;
        let samples = uniform_grid(start, end, scenario.sample_count);
        let pieces = scenario.schedule.smooth_pieces(start, end);
        let (states, end_state) = integration.run(&pieces, state, &samples)?;
        let last_cycle = k + 1 == n_cycles;
        let keep = if last_cycle { samples.len() } else { samples.len() - 1 };
        for (&t, s) in samples.iter().zip(&states).take(keep) {
            trajectory.append(t, *s, scenario.schedule.eval(t));
        }
        cycles.push(CycleSummary {
            index: k,
            start,
            end,
            source_energy_end: end_state.source_energy(),
            drain_energy_end: end_state.drain_energy(),
            acc_start: (state.acc_s, state.acc_d),
            acc_end: (end_state.acc_s, end_state.acc_d),
        });
        state = end_state;
        if !last_cycle {
            injected += 1.0 - state.source_energy();
            state.a_s = Complex64::new(1.0, 0.0);
            if reload == ReloadPolicy::ResetDrain {
                injected -= state.drain_energy();
                state.a_d = Complex64::new(0.0, 0.0);
            }
        }
    }
    Ok(CycleRun { trajectory, cycles, injected_energy: injected })
}
