//! Dormand–Prince 5(4) with local extrapolation and FSAL, on a fixed-size
//! real state vector.

pub const DIM: usize = 6;
pub type State = [f64; DIM];

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Difference between the 5th- and 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const MAX_STEPS: usize = 50_000_000;

/// Why an integration stopped early.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFailure {
    pub t: f64,
    pub reason: String,
}

#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
}

/// Counters for one call to [`Dopri5::integrate`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

fn axpy(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        *o += h * acc;
    }
    out
}

impl Dopri5 {
    fn error_norm(&self, err: &State, y: &State, y_new: &State) -> f64 {
        let mut sum = 0.0;
        for i in 0..DIM {
            let scale = self.abs_tol + self.rel_tol * y[i].abs().max(y_new[i].abs());
            let e = err[i] / scale;
            sum += e * e;
        }
        (sum / DIM as f64).sqrt()
    }

    fn initial_step(&self, f: &impl Fn(f64, &State) -> State, t: f64, y: &State, f0: &State, span: f64) -> f64 {
        let scale = |i: usize, y: &State| self.abs_tol + self.rel_tol * y[i].abs();
        let norm = |v: &State, y: &State| {
            ((0..DIM).map(|i| (v[i] / scale(i, y)).powi(2)).sum::<f64>() / DIM as f64).sqrt()
        };
        let d0 = norm(y, y);
        let d1 = norm(f0, y);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 * span } else { 0.01 * d0 / d1 };
        let h0 = h0.min(self.max_step).min(span);
        let y1 = axpy(y, h0, &[(1.0, f0)]);
        let f1 = f(t + h0, &y1);
        let diff: State = std::array::from_fn(|i| f1[i] - f0[i]);
        let d2 = norm(&diff, y) / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6 * span)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(self.max_step).min(span)
    }

    /// Integrates `y' = f(t, y)` from `t0` to the last entry of `stops`, landing
    /// exactly on every stop and handing the state there to `on_stop`.
    ///
    /// `stops` must be sorted, lie in `(t0, ..]` and end at the final time.
    pub fn integrate(
        &self,
        f: impl Fn(f64, &State) -> State,
        t0: f64,
        y0: State,
        stops: &[f64],
        mut on_stop: impl FnMut(f64, &State),
    ) -> Result<Stats, StepFailure> {
        let mut stats = Stats::default();
        let Some(&t_end) = stops.last() else {
            return Ok(stats);
        };
        let mut t = t0;
        let mut y = y0;
        let mut k1 = f(t, &y);
        stats.evaluations += 1;
        let mut h = self.initial_step(&f, t, &y, &k1, t_end - t0);
        stats.evaluations += 1;
        let mut next_stop = 0;
        while next_stop < stops.len() && stops[next_stop] <= t {
            on_stop(stops[next_stop], &y);
            next_stop += 1;
        }

        while next_stop < stops.len() {
            if stats.accepted + stats.rejected > MAX_STEPS {
                return Err(StepFailure { t, reason: "maximum number of steps exceeded".into() });
            }
            let target = stops[next_stop];
            let remaining = target - t;
            let clipped = h >= remaining;
            let step = if clipped { remaining } else { h };
            if step <= 1e-15 * t.abs().max(t_end.abs()).max(f64::MIN_POSITIVE) && !clipped {
                return Err(StepFailure { t, reason: format!("step size underflow (h = {step:e})") });
            }

            let k2 = f(t + C2 * step, &axpy(&y, step, &[(A21, &k1)]));
            let k3 = f(t + C3 * step, &axpy(&y, step, &[(A31, &k1), (A32, &k2)]));
            let k4 = f(t + C4 * step, &axpy(&y, step, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
            let k5 = f(
                t + C5 * step,
                &axpy(&y, step, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
            );
            let t_new = if clipped { target } else { t + step };
            let k6 = f(
                t_new,
                &axpy(&y, step, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
            );
            let y_new = axpy(&y, step, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
            let k7 = f(t_new, &y_new);
            stats.evaluations += 6;

            let err: State = std::array::from_fn(|i| {
                step * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i])
            });
            let err_norm = self.error_norm(&err, &y, &y_new);
            if !err_norm.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
                if step <= 1e-15 * t.abs().max(f64::MIN_POSITIVE) {
                    return Err(StepFailure { t, reason: "non-finite state".into() });
                }
                stats.rejected += 1;
                h = step * FAC_MIN;
                continue;
            }

            let factor = if err_norm == 0.0 {
                FAC_MAX
            } else {
                (SAFETY * err_norm.powf(-0.2)).clamp(FAC_MIN, FAC_MAX)
            };
            if err_norm <= 1.0 {
                stats.accepted += 1;
                t = t_new;
                y = y_new;
                k1 = k7;
                // A step shortened to land on a stop says nothing about the
                // natural step size, so keep the previous proposal then.
                let proposed = (step * factor).min(self.max_step);
                h = if clipped { h.max(proposed) } else { proposed };
                h = h.min(self.max_step);
                while next_stop < stops.len() && stops[next_stop] <= t {
                    on_stop(stops[next_stop], &y);
                    next_stop += 1;
                }
            } else {
                stats.rejected += 1;
                h = step * factor.min(1.0);
            }
        }
        Ok(stats)
    }
}
