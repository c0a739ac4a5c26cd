//! Adiabatic-basis analysis of the lossless coupling matrix
//! [[−Δ/2, κ], [κ, Δ/2]].
//!
//! The instantaneous eigenvectors define amplitudes b₋, b₊ related to the coil
//! amplitudes by a rotation through the mixing angle ϑ, tan 2ϑ = 2κ/Δ. With κ ≥ 0
//! the angle is taken as ½·atan2(2κ, Δ), which lies in [0, π/2], tends to π/2
//! for Δ → −∞ and to 0 for Δ → +∞.
//!
//! Loss terms are ignored here; diagnostics on lossy runs use the same
//! lossless formulas.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{CoilPair, LossModel};
use crate::propagator::Trajectory;
use crate::schedules::Schedule;

/// Ratio above which the cli reports a run as only marginally adiabatic.
pub const MARGINAL_RATIO: f64 = 0.5;

/// Instantaneous adiabatic frame together with the state expressed in it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticFrame {
    pub theta: f64,
    pub epsilon: f64,
    pub b_minus: Complex64,
    pub b_plus: Complex64,
}

impl AdiabaticFrame {
    pub fn new(state: &CoilPair, kappa: f64, delta: f64) -> Result<Self> {
        let theta = mixing_angle(kappa, delta)?;
        let (b_minus, b_plus) = to_adiabatic(state, theta);
        Ok(Self { theta, epsilon: quasienergy(kappa, delta), b_minus, b_plus })
    }
}

/// Per-sample diagnostics attached to a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleDiagnostics {
    pub theta: f64,
    pub epsilon: f64,
    /// Adiabaticity ratio r(t).
    pub ratio: f64,
    /// |b₋|².
    pub pop_minus: f64,
    /// |b₊|².
    pub pop_plus: f64,
}

pub fn mixing_angle(kappa: f64, delta: f64) -> Result<f64> {
    if kappa == 0.0 && delta == 0.0 {
        return Err(Error::UndefinedAngle);
    }
    Ok(0.5 * (2.0 * kappa.abs()).atan2(delta))
}

/// Half the gap between the adiabatic eigenvalues, ½√(4κ² + Δ²).
pub fn quasienergy(kappa: f64, delta: f64) -> f64 {
    0.5 * (2.0 * kappa).hypot(delta)
}

/// Rotates (a_S, a_D) into (b₋, b₊).
pub fn to_adiabatic(state: &CoilPair, theta: f64) -> (Complex64, Complex64) {
    let (s, c) = theta.sin_cos();
    (state.a_s * c - state.a_d * s, state.a_s * s + state.a_d * c)
}

/// Inverse of [`to_adiabatic`].
pub fn from_adiabatic(b_minus: Complex64, b_plus: Complex64, theta: f64) -> (Complex64, Complex64) {
    let (s, c) = theta.sin_cos();
    (b_minus * c + b_plus * s, -b_minus * s + b_plus * c)
}

/// r(t) = |κ̇Δ − κΔ̇| / (4κ² + Δ²)^{3/2}.
///
/// At Δ = 0 the κ̇Δ term is taken as zero, its limit for every protocol here,
/// including the detuning-coupled one whose κ̇ diverges like |Δ|^{-1/2}.
pub fn adiabaticity_ratio(schedule: &Schedule, t: f64) -> Result<f64> {
    let v = schedule.eval(t);
    let d = schedule.eval_derivatives(t);
    ratio_from(v.kappa, v.delta, d.kappa_dot, d.delta_dot).ok_or(Error::Singularity { t })
}

fn ratio_from(kappa: f64, delta: f64, kappa_dot: f64, delta_dot: f64) -> Option<f64> {
    let denom = (4.0 * kappa * kappa + delta * delta).powf(1.5);
    if denom == 0.0 {
        return None;
    }
    let kd = if delta == 0.0 { 0.0 } else { kappa_dot * delta };
    Some((kd - kappa * delta_dot).abs() / denom)
}

/// Outcome of checking Γ_S,D < κ₀ < |Δ| at the window endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HierarchyReport {
    pub gamma_max: f64,
    pub kappa0: f64,
    pub delta_min_abs: f64,
    /// Γ_S, Γ_D < κ₀.
    pub coupling_exceeds_losses: bool,
    /// κ₀ < |Δ| at both endpoints.
    pub detuning_exceeds_coupling: bool,
}

impl HierarchyReport {
    pub fn satisfied(&self) -> bool {
        self.coupling_exceeds_losses && self.detuning_exceeds_coupling
    }
}

/// Checks the rate hierarchy over `[t_start, t_end]`. For cyclic schedules
/// the end value is the left limit before any wrap at `t_end`.
pub fn hierarchy_check(losses: &LossModel, schedule: &Schedule, t_start: f64, t_end: f64) -> HierarchyReport {
    let gamma_max = losses.gamma_s.max(losses.gamma_d);
    let kappa0 = schedule.kappa0();
    let pieces = schedule.smooth_pieces(t_start, t_end);
    let delta_min_abs = match (pieces.first(), pieces.last()) {
        (Some(first), Some(last)) => first.eval(t_start).delta.abs().min(last.eval(t_end).delta.abs()),
        _ => schedule.eval(t_start).delta.abs(),
    };
    HierarchyReport {
        gamma_max,
        kappa0,
        delta_min_abs,
        coupling_exceeds_losses: gamma_max < kappa0,
        detuning_exceeds_coupling: kappa0 < delta_min_abs,
    }
}

/// Fills the diagnostics of every sample from `schedule`.
pub fn annotate_trajectory(trajectory: &Trajectory, schedule: &Schedule) -> Result<Trajectory> {
    let diagnostics = trajectory
        .times
        .iter()
        .zip(&trajectory.states)
        .map(|(&t, state)| {
            let v = schedule.eval(t);
            let frame = AdiabaticFrame::new(state, v.kappa, v.delta).map_err(|_| Error::Singularity { t })?;
            Ok(SampleDiagnostics {
                theta: frame.theta,
                epsilon: frame.epsilon,
                ratio: adiabaticity_ratio(schedule, t)?,
                pop_minus: frame.b_minus.norm_sqr(),
                pop_plus: frame.b_plus.norm_sqr(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory { diagnostics: Some(diagnostics), ..trajectory.clone() })
}

/// Largest sampled adiabaticity ratio and the time it occurs.
pub fn max_ratio(trajectory: &Trajectory) -> Option<(f64, f64)> {
    let diags = trajectory.diagnostics.as_ref()?;
    trajectory
        .times
        .iter()
        .zip(diags)
        .map(|(&t, d)| (t, d.ratio))
        .fold(None, |best: Option<(f64, f64)>, (t, r)| match best {
            Some((_, rb)) if rb >= r => best,
            _ => Some((t, r)),
        })
}
