//! Test-only reference integrator and helpers, written independently of the
//! library's solver path.
#![allow(dead_code)]

/// Coupling and detuning as plain closures over time.
pub struct Drive {
    pub kappa: Box<dyn Fn(f64) -> f64>,
    pub delta: Box<dyn Fn(f64) -> f64>,
}

impl Drive {
    pub fn chirp(kappa0: f64, delta0: f64, beta: f64, t0: f64) -> Self {
        Drive {
            kappa: Box::new(move |_| kappa0),
            delta: Box::new(move |t| delta0 + beta * (t - t0)),
        }
    }

    pub fn detuning_coupled(kappa0: f64, delta0: f64, beta: f64, t0: f64) -> Self {
        Drive {
            kappa: Box::new(move |t: f64| {
                let d: f64 = delta0 + beta * (t - t0);
                (kappa0 - d.abs().sqrt()).max(0.0)
            }),
            delta: Box::new(move |t| delta0 + beta * (t - t0)),
        }
    }
}

/// Real state: [Re a_S, Im a_S, Re a_D, Im a_D, ∫|a_S|², ∫|a_D|²].
fn deriv(drive: &Drive, g_s: f64, g_d_total: f64, t: f64, y: &[f64; 6]) -> [f64; 6] {
    let k = (drive.kappa)(t);
    let d = (drive.delta)(t);
    let (sr, si, dr, di) = (y[0], y[1], y[2], y[3]);
    // da_S/dt = i(Δ/2)a_S − Γ_S a_S − iκ a_D
    // da_D/dt = −i(Δ/2)a_D − Γ_D' a_D − iκ a_S
    let half = 0.5 * d;
    [
        -half * si - g_s * sr + k * di,
        half * sr - g_s * si - k * dr,
        half * di - g_d_total * dr + k * si,
        -half * dr - g_d_total * di - k * sr,
        sr * sr + si * si,
        dr * dr + di * di,
    ]
}

/// Classic fixed-step fourth-order Runge–Kutta from t = 0, a_S = 1.
pub fn rk4_final(drive: &Drive, g_s: f64, g_d: f64, g_w: f64, t_end: f64, step: f64) -> [f64; 6] {
    *rk4_samples(drive, g_s, g_d, g_w, t_end, step, 2).last().unwrap()
}

/// As [`rk4_final`], recording `samples` equally spaced states including both
/// ends. The step count is rounded to a multiple of `samples − 1`.
pub fn rk4_samples(drive: &Drive, g_s: f64, g_d: f64, g_w: f64, t_end: f64, step: f64, samples: usize) -> Vec<[f64; 6]> {
    let every = ((t_end / step / (samples - 1) as f64).round() as usize).max(1);
    let n = every * (samples - 1);
    let h = t_end / n as f64;
    let mut y = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0];
    let mut out = vec![y];
    let gd = g_d + g_w;
    for i in 0..n {
        let t = i as f64 * h;
        let k1 = deriv(drive, g_s, gd, t, &y);
        let y2: [f64; 6] = std::array::from_fn(|j| y[j] + 0.5 * h * k1[j]);
        let k2 = deriv(drive, g_s, gd, t + 0.5 * h, &y2);
        let y3: [f64; 6] = std::array::from_fn(|j| y[j] + 0.5 * h * k2[j]);
        let k3 = deriv(drive, g_s, gd, t + 0.5 * h, &y3);
        let y4: [f64; 6] = std::array::from_fn(|j| y[j] + h * k3[j]);
        let k4 = deriv(drive, g_s, gd, t + h, &y4);
        for j in 0..6 {
            y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        if (i + 1) % every == 0 {
            out.push(y);
        }
    }
    out
}

/// Largest change of the lower adiabatic population over the samples of a
/// lossless run, with θ from tan 2θ = 2κ/Δ folded into [0, π/2].
pub fn lower_population_drift(drive: &Drive, t_end: f64, states: &[[f64; 6]]) -> f64 {
    let n = states.len() - 1;
    let pop = |i: usize| {
        let t = t_end * i as f64 / n as f64;
        let (k, d) = ((drive.kappa)(t), (drive.delta)(t));
        let mut two_theta = (2.0 * k / d).atan();
        if two_theta < 0.0 || (two_theta == 0.0 && d < 0.0) {
            two_theta += std::f64::consts::PI;
        }
        let (s, c) = (0.5 * two_theta).sin_cos();
        let y = &states[i];
        (c * y[0] - s * y[2]).powi(2) + (c * y[1] - s * y[3]).powi(2)
    };
    let p0 = pop(0);
    (0..=n).map(|i| (pop(i) - p0).abs()).fold(0.0, f64::max)
}

pub fn eta_from(y: &[f64; 6], g_s: f64, g_d: f64, g_w: f64) -> f64 {
    g_w * y[5] / (g_s * y[4] + (g_d + g_w) * y[5])
}

/// Detuning-coupled chirp with equal rates: η over [0, 2e-4 s].
pub fn oracle_fig6_eta() -> f64 {
    let y = rk4_final(&Drive::detuning_coupled(5e4, 2e5, 3e9, 1e-4), 3e3, 3e3, 3e3, 2e-4, 1e-9);
    eta_from(&y, 3e3, 3e3, 3e3)
}

/// Near-distance chirped run at δ = 0: Γ_W ∫|a_D|² over [0, 2e-4 s].
pub fn oracle_fig4_useful_at_zero() -> f64 {
    let g = 5e4 / 30.0;
    let y = rk4_final(&Drive::chirp(5e4, 0.0, 3e9, 1e-4), g, g, 1e4, 2e-4, 1e-9);
    1e4 * y[5]
}
