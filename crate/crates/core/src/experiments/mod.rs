//! Batch drivers for the standard simulation studies: time traces of static
//! versus chirped transfer, efficiency sweeps over detuning and over
//! (coupling, loss), the detuning-coupled protocol, and repeated charge cycles.
//!
//! Sweep points are independent and run on the ambient rayon pool; results
//! are always returned in grid order.

pub mod peaks;

use rayon::prelude::*;
use serde::Serialize;

use crate::adiabatic::annotate_trajectory;
use crate::error::Result;
use crate::metrics::{efficiency_full, running_efficiency, EfficiencyReport};
use crate::model::{uniform_grid, LossModel, Scenario};
use crate::propagator::{propagate, propagate_cycles, CycleRun, ReloadPolicy, Trajectory};
use crate::schedules::Schedule;

/// Chirp reference time t₀ (s).
pub const CHIRP_T0: f64 = 1e-4;
/// Chirp rate β (s⁻²).
pub const CHIRP_RATE: f64 = 3e9;
/// Static detuning offset of the chirped protocol (s⁻¹).
pub const CHIRP_OFFSET: f64 = 2e5;
/// End of the default simulation window [0, 2t₀] (s).
pub const WINDOW_END: f64 = 2e-4;

pub const FIG2_KAPPA0: f64 = 4e4;
pub const FIG2_LOSS: f64 = 2e3;
pub const SWEEP_KAPPA0: f64 = 5e4;
pub const SWEEP_GAMMA_W: f64 = 1e4;
pub const FIG6_KAPPA0: f64 = 5e4;
pub const FIG6_LOSS: f64 = 3e3;

/// Solver and sampling settings shared by all studies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StudySettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub t_start: f64,
    pub t_end: f64,
    /// Samples per trajectory for time-trace studies.
    pub sample_count: usize,
}

impl Default for StudySettings {
    fn default() -> Self {
        Self {
            rel_tol: Scenario::DEFAULT_REL_TOL,
            abs_tol: Scenario::DEFAULT_ABS_TOL,
            t_start: 0.0,
            t_end: WINDOW_END,
            sample_count: 2001,
        }
    }
}

impl StudySettings {
    fn scenario(&self, schedule: Schedule, losses: LossModel) -> Scenario {
        Scenario::new(schedule, losses, self.t_start, self.t_end)
            .with_tolerances(self.rel_tol, self.abs_tol)
            .with_samples(self.sample_count)
    }

    /// Sweeps only need the end point.
    fn sweep_scenario(&self, schedule: Schedule, losses: LossModel) -> Scenario {
        self.scenario(schedule, losses).with_samples(2)
    }
}

pub fn fig2_static_schedule() -> Schedule {
    Schedule::constant(FIG2_KAPPA0, 0.0)
}

pub fn fig2_chirp_schedule() -> Schedule {
    Schedule::linear_chirp(FIG2_KAPPA0, CHIRP_OFFSET, CHIRP_RATE, CHIRP_T0)
}

pub fn fig6_schedule() -> Schedule {
    Schedule::detuning_coupled(FIG6_KAPPA0, CHIRP_OFFSET, CHIRP_RATE, CHIRP_T0)
}

pub fn fig6_losses() -> LossModel {
    LossModel { gamma_s: FIG6_LOSS, gamma_d: FIG6_LOSS, gamma_w: FIG6_LOSS }
}

pub fn fig2_lossy() -> LossModel {
    LossModel { gamma_s: FIG2_LOSS, gamma_d: FIG2_LOSS, gamma_w: 0.0 }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig2Study {
    pub static_lossless: Trajectory,
    pub static_lossy: Trajectory,
    pub ap_lossless: Trajectory,
    pub ap_lossy: Trajectory,
}

/// Static versus chirped transfer, each without losses and with Γ_S = Γ_D = 2e3 s⁻¹.
pub fn study_fig2(settings: &StudySettings) -> Result<Fig2Study> {
    let run = |schedule: Schedule, losses: LossModel| propagate(&settings.scenario(schedule, losses));
    Ok(Fig2Study {
        static_lossless: run(fig2_static_schedule(), LossModel::lossless())?,
        static_lossy: run(fig2_static_schedule(), fig2_lossy())?,
        ap_lossless: run(fig2_chirp_schedule(), LossModel::lossless())?,
        ap_lossy: run(fig2_chirp_schedule(), fig2_lossy())?,
    })
}

/// Coil separation encoded through the ratio κ₀/Γ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistancePreset {
    /// Γ_S = Γ_D = κ₀/30.
    Near,
    /// Γ_S = Γ_D = κ₀/17.
    Far,
}

impl DistancePreset {
    pub fn loss_rate(self, kappa0: f64) -> f64 {
        match self {
            DistancePreset::Near => kappa0 / 30.0,
            DistancePreset::Far => kappa0 / 17.0,
        }
    }

    pub fn losses(self) -> LossModel {
        let g = self.loss_rate(SWEEP_KAPPA0);
        LossModel { gamma_s: g, gamma_d: g, gamma_w: SWEEP_GAMMA_W }
    }

    pub fn name(self) -> &'static str {
        match self {
            DistancePreset::Near => "near",
            DistancePreset::Far => "far",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fig4Record {
    pub delta: f64,
    pub eta_ap: f64,
    pub eta_static: f64,
    pub useful_ap: f64,
    pub useful_static: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fig5Record {
    pub kappa0: f64,
    pub gamma: f64,
    pub eta_ap: f64,
    pub eta_static: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepMetadata {
    pub study: String,
    pub fixed: Vec<(String, f64)>,
    pub settings: StudySettings,
    pub timestamp_unix: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult<R> {
    pub records: Vec<R>,
    pub metadata: SweepMetadata,
}

fn metadata(study: &str, fixed: &[(&str, f64)], settings: &StudySettings) -> SweepMetadata {
    let timestamp_unix = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    SweepMetadata {
        study: study.to_string(),
        fixed: fixed.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        settings: *settings,
        timestamp_unix,
    }
}

/// Default detuning grid: 81 points on [−2e5, 2e5] s⁻¹.
pub fn default_delta_grid() -> Vec<f64> {
    linear_grid(-2e5, 2e5, 81)
}

/// Default coupling axis: 41 log-spaced points on [1e4, 1e5] s⁻¹.
pub fn default_kappa_grid() -> Vec<f64> {
    log_grid(1e4, 1e5, 41)
}

/// Default loss axis: 41 log-spaced points on [1e2, 2e4] s⁻¹.
pub fn default_gamma_grid() -> Vec<f64> {
    log_grid(1e2, 2e4, 41)
}

pub fn linear_grid(min: f64, max: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![min],
        _ => uniform_grid(min, max, n),
    }
}

pub fn log_grid(min: f64, max: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![min],
        _ => {
            let (a, b) = (min.ln(), max.ln());
            (0..n)
                .map(|i| match i {
                    0 => min,
                    i if i + 1 == n => max,
                    i => (a + (b - a) * i as f64 / (n - 1) as f64).exp(),
                })
                .collect()
        }
    }
}

fn efficiency_of(scenario: &Scenario) -> Result<EfficiencyReport> {
    let traj = propagate(scenario)?;
    efficiency_full(&traj, &scenario.losses)
}

/// η and useful energy versus the static detuning offset, chirped and static.
pub fn study_fig4(
    delta_grid: &[f64],
    preset: DistancePreset,
    settings: &StudySettings,
) -> Result<SweepResult<Fig4Record>> {
    let losses = preset.losses();
    let records = delta_grid
        .par_iter()
        .map(|&delta| {
            let ap = efficiency_of(&settings.sweep_scenario(
                Schedule::linear_chirp(SWEEP_KAPPA0, delta, CHIRP_RATE, CHIRP_T0),
                losses,
            ))?;
            let st = efficiency_of(&settings.sweep_scenario(Schedule::constant(SWEEP_KAPPA0, delta), losses))?;
            Ok(Fig4Record {
                delta,
                eta_ap: ap.eta,
                eta_static: st.eta,
                useful_ap: ap.useful_energy,
                useful_static: st.useful_energy,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        records,
        metadata: metadata(
            &format!("fig4-{}", preset.name()),
            &[
                ("kappa0", SWEEP_KAPPA0),
                ("beta", CHIRP_RATE),
                ("t0", CHIRP_T0),
                ("gamma_S", losses.gamma_s),
                ("gamma_D", losses.gamma_d),
                ("gamma_W", losses.gamma_w),
            ],
            settings,
        ),
    })
}

/// η over the (κ₀, Γ) plane with Γ_S = Γ_D = Γ, chirped and static. Records
/// are ordered with κ₀ as the outer and Γ as the inner axis.
pub fn study_fig5(kappa_grid: &[f64], gamma_grid: &[f64], settings: &StudySettings) -> Result<SweepResult<Fig5Record>> {
    let points: Vec<(f64, f64)> = kappa_grid
        .iter()
        .flat_map(|&k| gamma_grid.iter().map(move |&g| (k, g)))
        .collect();
    let records = points
        .par_iter()
        .map(|&(kappa0, gamma)| {
            let losses = LossModel { gamma_s: gamma, gamma_d: gamma, gamma_w: SWEEP_GAMMA_W };
            losses.validate()?;
            let ap = efficiency_of(&settings.sweep_scenario(
                Schedule::linear_chirp(kappa0, CHIRP_OFFSET, CHIRP_RATE, CHIRP_T0),
                losses,
            ))?;
            let st = efficiency_of(&settings.sweep_scenario(Schedule::constant(kappa0, CHIRP_OFFSET), losses))?;
            Ok(Fig5Record { kappa0, gamma, eta_ap: ap.eta, eta_static: st.eta })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        records,
        metadata: metadata(
            "fig5",
            &[
                ("delta", CHIRP_OFFSET),
                ("beta", CHIRP_RATE),
                ("t0", CHIRP_T0),
                ("gamma_W", SWEEP_GAMMA_W),
            ],
            settings,
        ),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig6Study {
    /// Annotated trajectory; its drive trace holds (κ(t), Δ(t)).
    pub trajectory: Trajectory,
    /// η(t) at every sample, `None` before anything is dissipated.
    pub running_eta: Vec<Option<f64>>,
    pub report: EfficiencyReport,
}

/// Chirp with detuning-dependent coupling κ = κ₀ − √|Δ|.
pub fn study_fig6(settings: &StudySettings) -> Result<Fig6Study> {
    let scenario = settings.scenario(fig6_schedule(), fig6_losses());
    let trajectory = annotate_trajectory(&propagate(&scenario)?, &scenario.schedule)?;
    let report = efficiency_full(&trajectory, &scenario.losses)?;
    let running_eta = running_efficiency(&trajectory, &scenario.losses);
    Ok(Fig6Study { trajectory, running_eta, report })
}

/// Default losses for the cyclic study: the lossy time-trace coils with the
/// sweep extraction rate, so every cycle delivers work.
pub fn cycles_default_losses() -> LossModel {
    LossModel { gamma_s: FIG2_LOSS, gamma_d: FIG2_LOSS, gamma_w: SWEEP_GAMMA_W }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CyclesStudy {
    pub run: CycleRun,
    /// Cumulative over all cycles.
    pub total: EfficiencyReport,
    pub per_cycle: Vec<EfficiencyReport>,
}

/// Repeats the chirped protocol every `t_rep`, recharging the source at each
/// period boundary.
pub fn study_cycles(n_cycles: usize, t_rep: f64, losses: LossModel, settings: &StudySettings) -> Result<CyclesStudy> {
    let schedule = Schedule::cyclic(t_rep, fig2_chirp_schedule());
    let scenario = Scenario::new(schedule, losses, 0.0, t_rep)
        .with_tolerances(settings.rel_tol, settings.abs_tol)
        .with_samples(settings.sample_count);
    cycle_study_for(&scenario, n_cycles, ReloadPolicy::PreserveDrain)
}

/// Cycle study for an arbitrary cyclic scenario.
pub fn cycle_study_for(scenario: &Scenario, n_cycles: usize, reload: ReloadPolicy) -> Result<CyclesStudy> {
    let run = propagate_cycles(scenario, n_cycles, reload)?;
    let total = efficiency_full(&run.trajectory, &scenario.losses)?;
    let per_cycle = run
        .cycles
        .iter()
        .map(|c| {
            EfficiencyReport::from_integrals(
                c.acc_end.0 - c.acc_start.0,
                c.acc_end.1 - c.acc_start.1,
                &scenario.losses,
                c.end,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CyclesStudy { run, total, per_cycle })
}
