//! Coupling and detuning protocols κ(t), Δ(t).
//!
//! Four protocols are supported:
//!
//! - `Static`: κ = κ₀, Δ = δ.
//! - `LinearChirp`: κ = κ₀, Δ = δ + β(t − t₀).
//! - `DetuningCoupled`: Δ as for the chirp, κ = max(0, κ₀ − √|Δ|). The square
//!   root is taken of the numeric value of Δ in s⁻¹.
//! - `Cyclic`: a non-cyclic protocol restarted every `period`, i.e. evaluated
//!   at `t mod period`, so the detuning jumps back at each period boundary.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", deny_unknown_fields)]
pub enum Schedule {
    Static {
        kappa0: f64,
        delta: f64,
    },
    LinearChirp {
        kappa0: f64,
        delta: f64,
        beta: f64,
        t0: f64,
    },
    DetuningCoupled {
        kappa0: f64,
        delta: f64,
        beta: f64,
        t0: f64,
    },
    Cyclic {
        period: f64,
        inner: Box<Schedule>,
    },
}

/// Instantaneous values of the drive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveValue {
    /// Coupling κ (s⁻¹).
    pub kappa: f64,
    /// Detuning Δ = ω_D − ω_S (s⁻¹).
    pub delta: f64,
}

/// Time derivatives of the drive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveRates {
    pub kappa_dot: f64,
    pub delta_dot: f64,
    /// Set when `t` is a non-differentiable instant and the right derivative was returned.
    pub one_sided: bool,
}

/// A time interval over which a schedule is smooth, with the time origin of
/// its non-cyclic protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothPiece<'a> {
    pub start: f64,
    pub end: f64,
    /// Absolute time at which the protocol's local clock reads zero.
    pub origin: f64,
    pub schedule: &'a Schedule,
}

impl SmoothPiece<'_> {
    /// Evaluates the protocol on the piece's local clock. At `end` this gives the
    /// left limit, which differs from [`Schedule::eval`] at a cyclic wrap.
    pub fn eval(&self, t: f64) -> DriveValue {
        self.schedule.eval(t - self.origin)
    }
}

impl Schedule {
    pub fn constant(kappa0: f64, delta: f64) -> Self {
        Schedule::Static { kappa0, delta }
    }

    pub fn linear_chirp(kappa0: f64, delta: f64, beta: f64, t0: f64) -> Self {
        Schedule::LinearChirp { kappa0, delta, beta, t0 }
    }

    pub fn detuning_coupled(kappa0: f64, delta: f64, beta: f64, t0: f64) -> Self {
        Schedule::DetuningCoupled { kappa0, delta, beta, t0 }
    }

    pub fn cyclic(period: f64, inner: Schedule) -> Self {
        Schedule::Cyclic { period, inner: Box::new(inner) }
    }

    pub fn variant_name(&self) -> &'static str {
        match self {
            Schedule::Static { .. } => "Static",
            Schedule::LinearChirp { .. } => "LinearChirp",
            Schedule::DetuningCoupled { .. } => "DetuningCoupled",
            Schedule::Cyclic { .. } => "Cyclic",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::domain(format!("schedule {name} must be finite, got {v}")))
            }
        };
        match self {
            Schedule::Static { kappa0, delta } => {
                finite("kappa0", *kappa0)?;
                finite("delta", *delta)?;
                check_kappa0(*kappa0)
            }
            Schedule::LinearChirp { kappa0, delta, beta, t0 }
            | Schedule::DetuningCoupled { kappa0, delta, beta, t0 } => {
                finite("kappa0", *kappa0)?;
                finite("delta", *delta)?;
                finite("beta", *beta)?;
                finite("t0", *t0)?;
                check_kappa0(*kappa0)
            }
            Schedule::Cyclic { period, inner } => {
                if !(period.is_finite() && *period > 0.0) {
                    return Err(Error::domain(format!("cyclic period must be > 0, got {period}")));
                }
                if matches!(**inner, Schedule::Cyclic { .. }) {
                    return Err(Error::domain("cyclic schedules cannot be nested"));
                }
                inner.validate()
            }
        }
    }

    /// Base coupling κ₀ of the (inner) protocol.
    pub fn kappa0(&self) -> f64 {
        match self {
            Schedule::Static { kappa0, .. }
            | Schedule::LinearChirp { kappa0, .. }
            | Schedule::DetuningCoupled { kappa0, .. } => *kappa0,
            Schedule::Cyclic { inner, .. } => inner.kappa0(),
        }
    }

    fn detuning(delta: f64, beta: f64, t0: f64, t: f64) -> f64 {
        delta + beta * (t - t0)
    }

    pub fn eval(&self, t: f64) -> DriveValue {
        match *self {
            Schedule::Static { kappa0, delta } => DriveValue { kappa: kappa0, delta },
            Schedule::LinearChirp { kappa0, delta, beta, t0 } => DriveValue {
                kappa: kappa0,
                delta: Self::detuning(delta, beta, t0, t),
            },
            Schedule::DetuningCoupled { kappa0, delta, beta, t0 } => {
                let d = Self::detuning(delta, beta, t0, t);
                DriveValue { kappa: (kappa0 - d.abs().sqrt()).max(0.0), delta: d }
            }
            Schedule::Cyclic { period, ref inner } => inner.eval(t.rem_euclid(period)),
        }
    }

    /// Analytic (κ̇, Δ̇). At kinks and cyclic wraps the right derivative is returned
    /// and `one_sided` is set.
    pub fn eval_derivatives(&self, t: f64) -> DriveRates {
        match *self {
            Schedule::Static { .. } => DriveRates { kappa_dot: 0.0, delta_dot: 0.0, one_sided: false },
            Schedule::LinearChirp { beta, .. } => DriveRates { kappa_dot: 0.0, delta_dot: beta, one_sided: false },
            Schedule::DetuningCoupled { kappa0, delta, beta, t0 } => {
                let d = Self::detuning(delta, beta, t0, t);
                if beta == 0.0 {
                    return DriveRates { kappa_dot: 0.0, delta_dot: 0.0, one_sided: false };
                }
                let root = d.abs().sqrt();
                // Direction in which |Δ| moves just after t.
                let sign = if d != 0.0 { d.signum() } else { beta.signum() };
                let root_dot = if d != 0.0 { sign * beta / (2.0 * root) } else { f64::INFINITY };
                let unclamped = -root_dot;
                if kappa0 > root {
                    DriveRates { kappa_dot: unclamped, delta_dot: beta, one_sided: d == 0.0 }
                } else if kappa0 < root {
                    DriveRates { kappa_dot: 0.0, delta_dot: beta, one_sided: false }
                } else {
                    let kappa_dot = if root_dot > 0.0 { 0.0 } else { unclamped };
                    DriveRates { kappa_dot, delta_dot: beta, one_sided: true }
                }
            }
            Schedule::Cyclic { period, ref inner } => {
                let local = t.rem_euclid(period);
                let mut rates = inner.eval_derivatives(local);
                rates.one_sided |= local == 0.0;
                rates
            }
        }
    }

    /// Time at which the detuning crosses zero, t₀ − δ/β.
    pub fn resonance_crossing(&self) -> Result<f64> {
        match *self {
            Schedule::LinearChirp { delta, beta, t0, .. } | Schedule::DetuningCoupled { delta, beta, t0, .. } => {
                if beta == 0.0 {
                    Err(Error::NotApplicable("zero chirp rate has no resonance crossing".into()))
                } else {
                    Ok(t0 - delta / beta)
                }
            }
            Schedule::Static { .. } => Err(Error::NotApplicable("static schedule has no resonance crossing".into())),
            Schedule::Cyclic { .. } => Err(Error::NotApplicable(
                "cyclic schedule may cross resonance once per period".into(),
            )),
        }
    }

    /// Splits `[t_start, t_end]` into intervals on which the drive is smooth:
    /// cyclic wraps and the Δ = 0 kink of the detuning-coupled protocol become
    /// piece boundaries.
    pub fn smooth_pieces(&self, t_start: f64, t_end: f64) -> Vec<SmoothPiece<'_>> {
        let mut out = Vec::new();
        match self {
            Schedule::Cyclic { period, inner } => {
                let period = *period;
                let mut k = (t_start / period).floor();
                loop {
                    let origin = k * period;
                    let next = (k + 1.0) * period;
                    let start = t_start.max(origin);
                    let end = t_end.min(next);
                    if end > start {
                        push_split(&mut out, inner, start, end, origin);
                    }
                    if next >= t_end {
                        break;
                    }
                    k += 1.0;
                }
            }
            _ => push_split(&mut out, self, t_start, t_end, 0.0),
        }
        out
    }

    /// Largest |Δ| reached on `[t_start, t_end]`.
    pub fn max_abs_detuning(&self, t_start: f64, t_end: f64) -> f64 {
        self.smooth_pieces(t_start, t_end)
            .iter()
            .map(|p| p.eval(p.start).delta.abs().max(p.eval(p.end).delta.abs()))
            .fold(0.0, f64::max)
    }
}

fn check_kappa0(kappa0: f64) -> Result<()> {
    if kappa0 < 0.0 {
        Err(Error::domain(format!("kappa0 must be >= 0, got {kappa0}")))
    } else {
        Ok(())
    }
}

fn push_split<'a>(out: &mut Vec<SmoothPiece<'a>>, schedule: &'a Schedule, start: f64, end: f64, origin: f64) {
    if let Schedule::DetuningCoupled { .. } = schedule {
        if let Ok(tc) = schedule.resonance_crossing() {
            let tc = tc + origin;
            if tc > start && tc < end {
                out.push(SmoothPiece { start, end: tc, origin, schedule });
                out.push(SmoothPiece { start: tc, end, origin, schedule });
                return;
            }
        }
    }
    out.push(SmoothPiece { start, end, origin, schedule });
}
