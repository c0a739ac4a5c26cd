//! Efficiency and energy accounting.
//!
//! The transfer efficiency over `[t_start, T]` is
//!
//! ```text
//!            Γ_W ∫|a_D|² dt
//! η = ─────────────────────────────────────
//!     Γ_S ∫|a_S|² dt + (Γ_D + Γ_W) ∫|a_D|² dt
//! ```
//!
//! with the integrals read from the trajectory's accumulators. Energies are
//! normalised so that a fully charged source holds unit energy.

use crate::error::{Error, Result};
use crate::model::LossModel;
use crate::propagator::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfficiencyReport {
    pub eta: f64,
    /// Γ_W ∫|a_D|² dt, the work extracted at the drain.
    pub useful_energy: f64,
    /// Γ_S ∫|a_S|² dt.
    pub dissipated_source: f64,
    /// Γ_D ∫|a_D|² dt.
    pub dissipated_drain: f64,
    /// End of the interval (s).
    pub horizon: f64,
}

impl EfficiencyReport {
    /// Builds the report from the two energy integrals.
    pub fn from_integrals(int_source: f64, int_drain: f64, losses: &LossModel, horizon: f64) -> Result<Self> {
        let useful = losses.gamma_w * int_drain;
        let dissipated_source = losses.gamma_s * int_source;
        let dissipated_drain = losses.gamma_d * int_drain;
        let denom = dissipated_source + dissipated_drain + useful;
        if !(denom > 0.0) {
            return Err(Error::UndefinedEfficiency(format!(
                "nothing dissipated or extracted by t = {horizon:e} s"
            )));
        }
        Ok(Self {
            eta: useful / denom,
            useful_energy: useful,
            dissipated_source,
            dissipated_drain,
            horizon,
        })
    }
}

/// η over `[trajectory start, horizon]`.
pub fn efficiency(trajectory: &Trajectory, losses: &LossModel, horizon: f64) -> Result<EfficiencyReport> {
    let (int_s, int_d) = trajectory.accumulators_at(horizon)?;
    EfficiencyReport::from_integrals(int_s, int_d, losses, horizon)
}

/// η over the full trajectory span.
pub fn efficiency_full(trajectory: &Trajectory, losses: &LossModel) -> Result<EfficiencyReport> {
    efficiency(trajectory, losses, trajectory.t_end())
}

/// Work extracted at the drain up to `horizon`, Γ_W ∫|a_D|² dt.
pub fn useful_energy(trajectory: &Trajectory, gamma_w: f64, horizon: f64) -> Result<f64> {
    let (_, int_d) = trajectory.accumulators_at(horizon)?;
    Ok(gamma_w * int_d)
}

/// η(t) at every sample, `None` where nothing has been dissipated yet.
pub fn running_efficiency(trajectory: &Trajectory, losses: &LossModel) -> Vec<Option<f64>> {
    trajectory
        .states
        .iter()
        .zip(&trajectory.times)
        .map(|(s, &t)| EfficiencyReport::from_integrals(s.acc_s, s.acc_d, losses, t).ok().map(|r| r.eta))
        .collect()
}

/// Steady-state efficiency for constant fields with drain-to-source energy
/// ratio `energy_ratio` = |a_D|²/|a_S|².
pub fn static_steady_efficiency(energy_ratio: f64, losses: &LossModel) -> Result<f64> {
    if !(energy_ratio >= 0.0) {
        return Err(Error::domain(format!("energy ratio must be >= 0, got {energy_ratio}")));
    }
    if losses.gamma_s == 0.0 && losses.gamma_d == 0.0 && losses.gamma_w == 0.0 {
        return Err(Error::UndefinedEfficiency("all rates are zero".into()));
    }
    if energy_ratio.is_infinite() {
        return Ok(losses.gamma_w / losses.drain_total());
    }
    let denom = losses.gamma_s + losses.drain_total() * energy_ratio;
    if denom == 0.0 {
        return Err(Error::UndefinedEfficiency("zero denominator".into()));
    }
    Ok(losses.gamma_w * energy_ratio / denom)
}
