//! Domain types and circuit-parameter conversions.
//!
//! All rates and frequencies are SI angular quantities stored as `f64`
//! (rad/s or s⁻¹). Loss rates act on amplitudes, so the corresponding
//! energies decay at twice the rate.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schedules::Schedule;

/// Amplitude loss rates of the two coils plus the work-extraction rate at the drain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LossModel {
    #[serde(rename = "gamma_S")]
    pub gamma_s: f64,
    #[serde(rename = "gamma_D")]
    pub gamma_d: f64,
    #[serde(rename = "gamma_W")]
    pub gamma_w: f64,
}

impl LossModel {
    pub fn new(gamma_s: f64, gamma_d: f64, gamma_w: f64) -> Result<Self> {
        let losses = Self { gamma_s, gamma_d, gamma_w };
        losses.validate()?;
        Ok(losses)
    }

    pub const fn lossless() -> Self {
        Self { gamma_s: 0.0, gamma_d: 0.0, gamma_w: 0.0 }
    }

    /// Source and drain share the intrinsic loss rate `gamma`.
    pub fn symmetric(gamma: f64, gamma_w: f64) -> Result<Self> {
        Self::new(gamma, gamma, gamma_w)
    }

    /// Total amplitude decay rate of the drain, intrinsic plus extraction.
    pub fn drain_total(&self) -> f64 {
        self.gamma_d + self.gamma_w
    }

    pub fn is_lossless(&self) -> bool {
        self.gamma_s == 0.0 && self.gamma_d == 0.0 && self.gamma_w == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("gamma_S", self.gamma_s), ("gamma_D", self.gamma_d), ("gamma_W", self.gamma_w)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::domain(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        Ok(())
    }
}

impl Default for LossModel {
    fn default() -> Self {
        Self::lossless()
    }
}

/// Integrated state: coil amplitudes and the running integrals of their energies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoilPair {
    #[serde(rename = "a_S")]
    pub a_s: Complex64,
    #[serde(rename = "a_D")]
    pub a_d: Complex64,
    /// ∫|a_S|² dt accumulated so far (s).
    #[serde(rename = "acc_S", default)]
    pub acc_s: f64,
    /// ∫|a_D|² dt accumulated so far (s).
    #[serde(rename = "acc_D", default)]
    pub acc_d: f64,
}

impl CoilPair {
    pub fn new(a_s: Complex64, a_d: Complex64) -> Self {
        Self { a_s, a_d, acc_s: 0.0, acc_d: 0.0 }
    }

    /// Unit energy in the source, empty drain.
    pub fn charged_source() -> Self {
        Self::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
    }

    pub fn source_energy(&self) -> f64 {
        self.a_s.norm_sqr()
    }

    pub fn drain_energy(&self) -> f64 {
        self.a_d.norm_sqr()
    }

    pub fn total_energy(&self) -> f64 {
        self.source_energy() + self.drain_energy()
    }

    pub fn is_finite(&self) -> bool {
        self.a_s.is_finite() && self.a_d.is_finite() && self.acc_s.is_finite() && self.acc_d.is_finite()
    }

    pub(crate) fn to_array(self) -> [f64; 6] {
        [self.a_s.re, self.a_s.im, self.a_d.re, self.a_d.im, self.acc_s, self.acc_d]
    }

    pub(crate) fn from_array(y: &[f64; 6]) -> Self {
        Self {
            a_s: Complex64::new(y[0], y[1]),
            a_d: Complex64::new(y[2], y[3]),
            acc_s: y[4],
            acc_d: y[5],
        }
    }
}

impl Default for CoilPair {
    fn default() -> Self {
        Self::charged_source()
    }
}

/// Lumped inductance and capacitance of one coil.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoilPhysical {
    /// Inductance (H).
    #[serde(rename = "L")]
    pub inductance: f64,
    /// Capacitance (F).
    #[serde(rename = "C")]
    pub capacitance: f64,
}

impl CoilPhysical {
    pub fn new(inductance: f64, capacitance: f64) -> Result<Self> {
        let coil = Self { inductance, capacitance };
        coil.validate()?;
        Ok(coil)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.inductance.is_finite() && self.inductance > 0.0) {
            return Err(Error::domain(format!("inductance must be > 0, got {}", self.inductance)));
        }
        if !(self.capacitance.is_finite() && self.capacitance > 0.0) {
            return Err(Error::domain(format!("capacitance must be > 0, got {}", self.capacitance)));
        }
        Ok(())
    }
}

/// Resonant angular frequency 1/√(LC) in rad/s.
pub fn resonant_frequency(coil: &CoilPhysical) -> Result<f64> {
    coil.validate()?;
    Ok(1.0 / (coil.inductance * coil.capacitance).sqrt())
}

/// Coupling rate κ = M·√(ω_S ω_D / (L_S L_D)) from the mutual inductance `mutual`.
///
/// The mutual inductance must respect the passivity bound `0 ≤ M ≤ √(L_S L_D)`.
pub fn coupling_from_mutual(
    mutual: f64,
    l_source: f64,
    l_drain: f64,
    omega_source: f64,
    omega_drain: f64,
) -> Result<f64> {
    for (name, v) in [
        ("L_S", l_source),
        ("L_D", l_drain),
        ("omega_S", omega_source),
        ("omega_D", omega_drain),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::domain(format!("{name} must be > 0, got {v}")));
        }
    }
    let bound = (l_source * l_drain).sqrt();
    if !(mutual.is_finite() && (0.0..=bound).contains(&mutual)) {
        return Err(Error::domain(format!(
            "mutual inductance {mutual} outside passivity bound [0, {bound}]"
        )));
    }
    Ok(mutual * (omega_source * omega_drain / (l_source * l_drain)).sqrt())
}

/// Complete description of one simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub schedule: Schedule,
    pub losses: LossModel,
    pub t_start: f64,
    pub t_end: f64,
    pub initial: CoilPair,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub sample_count: usize,
}

impl Scenario {
    pub const DEFAULT_REL_TOL: f64 = 1e-9;
    pub const DEFAULT_ABS_TOL: f64 = 1e-12;
    pub const DEFAULT_SAMPLES: usize = 201;

    /// Scenario with default tolerances and sampling, starting from a charged source.
    pub fn new(schedule: Schedule, losses: LossModel, t_start: f64, t_end: f64) -> Self {
        Self {
            schedule,
            losses,
            t_start,
            t_end,
            initial: CoilPair::charged_source(),
            rel_tol: Self::DEFAULT_REL_TOL,
            abs_tol: Self::DEFAULT_ABS_TOL,
            sample_count: Self::DEFAULT_SAMPLES,
        }
    }

    pub fn with_tolerances(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_samples(mut self, sample_count: usize) -> Self {
        self.sample_count = sample_count;
        self
    }

    pub fn with_initial(mut self, initial: CoilPair) -> Self {
        self.initial = initial;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.schedule.validate()?;
        self.losses.validate()?;
        if !(self.t_start.is_finite() && self.t_end.is_finite() && self.t_end > self.t_start) {
            return Err(Error::domain(format!(
                "time window requires t_end > t_start, got [{}, {}]",
                self.t_start, self.t_end
            )));
        }
        if !(self.rel_tol.is_finite() && self.rel_tol > 0.0) {
            return Err(Error::domain(format!("rel_tol must be > 0, got {}", self.rel_tol)));
        }
        if !(self.abs_tol.is_finite() && self.abs_tol > 0.0) {
            return Err(Error::domain(format!("abs_tol must be > 0, got {}", self.abs_tol)));
        }
        if self.sample_count < 2 {
            return Err(Error::domain(format!("sample_count must be >= 2, got {}", self.sample_count)));
        }
        if !self.initial.is_finite() || self.initial.acc_s < 0.0 || self.initial.acc_d < 0.0 {
            return Err(Error::domain("initial state must be finite with nonnegative accumulators"));
        }
        Ok(())
    }

    /// Uniformly spaced output times spanning the window, endpoints included.
    pub fn sample_times(&self) -> Vec<f64> {
        uniform_grid(self.t_start, self.t_end, self.sample_count)
    }
}

pub(crate) fn uniform_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    let last = (n - 1) as f64;
    (0..n)
        .map(|i| if i + 1 == n { b } else { a + (b - a) * (i as f64) / last })
        .collect()
}
