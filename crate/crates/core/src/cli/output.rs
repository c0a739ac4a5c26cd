//! CSV and SVG writers.
//!
//! Numbers are written in the shortest decimal form that parses back to the
//! same `f64`, with `.` as decimal separator.

use std::io::{self, Write};

use crate::experiments::{Fig4Record, Fig5Record};
use crate::propagator::Trajectory;

pub const TRAJECTORY_HEADER: &str = "t,re_aS,im_aS,re_aD,im_aD,E_S,E_D,kappa,delta,theta,epsilon,r,acc_S,acc_D";
pub const FIG4_HEADER: &str = "delta,eta_ap,eta_static,useful_ap,useful_static";
pub const FIG5_HEADER: &str = "kappa0,gamma,eta_ap,eta_static";

/// Shortest round-trip representation.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

fn row(out: &mut impl Write, fields: &[f64]) -> io::Result<()> {
    let line: Vec<String> = fields.iter().map(|&x| fmt_f64(x)).collect();
    writeln!(out, "{}", line.join(","))
}

/// Writes one row per sample. Diagnostic columns are left empty when the
/// trajectory carries no diagnostics.
pub fn write_trajectory_csv(out: &mut impl Write, trajectory: &Trajectory) -> io::Result<()> {
    writeln!(out, "{TRAJECTORY_HEADER}")?;
    for i in 0..trajectory.len() {
        let s = &trajectory.states[i];
        let d = &trajectory.drive[i];
        let head = [
            trajectory.times[i],
            s.a_s.re,
            s.a_s.im,
            s.a_d.re,
            s.a_d.im,
            s.source_energy(),
            s.drain_energy(),
            d.kappa,
            d.delta,
        ]
        .map(fmt_f64)
        .join(",");
        let diag = match &trajectory.diagnostics {
            Some(diags) => {
                let g = &diags[i];
                [g.theta, g.epsilon, g.ratio].map(fmt_f64).join(",")
            }
            None => ",,".to_string(),
        };
        writeln!(out, "{head},{diag},{},{}", fmt_f64(s.acc_s), fmt_f64(s.acc_d))?;
    }
    Ok(())
}

pub fn write_fig4_csv(out: &mut impl Write, records: &[Fig4Record]) -> io::Result<()> {
    writeln!(out, "{FIG4_HEADER}")?;
    for r in records {
        row(out, &[r.delta, r.eta_ap, r.eta_static, r.useful_ap, r.useful_static])?;
    }
    Ok(())
}

pub fn write_fig5_csv(out: &mut impl Write, records: &[Fig5Record]) -> io::Result<()> {
    writeln!(out, "{FIG5_HEADER}")?;
    for r in records {
        row(out, &[r.kappa0, r.gamma, r.eta_ap, r.eta_static])?;
    }
    Ok(())
}

/// Line plot of E_S (solid) and E_D (dashed) against time.
pub fn write_energy_svg(out: &mut impl Write, trajectory: &Trajectory) -> io::Result<()> {
    const W: f64 = 640.0;
    const H: f64 = 360.0;
    const PAD: f64 = 40.0;
    let (t0, t1) = (trajectory.t_start(), trajectory.t_end());
    let e_max = trajectory
        .states
        .iter()
        .map(|s| s.source_energy().max(s.drain_energy()))
        .fold(1.0f64, f64::max);
    let x = |t: f64| PAD + (W - 2.0 * PAD) * (t - t0) / (t1 - t0);
    let y = |e: f64| H - PAD - (H - 2.0 * PAD) * e / e_max;
    let polyline = |energy: &dyn Fn(usize) -> f64| {
        (0..trajectory.len())
            .map(|i| format!("{:.2},{:.2}", x(trajectory.times[i]), y(energy(i))))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let source = polyline(&|i| trajectory.states[i].source_energy());
    let drain = polyline(&|i| trajectory.states[i].drain_energy());
    writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#)?;
    writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#)?;
    writeln!(
        out,
        r#"<path d="M{PAD} {PAD} V{b} H{r}" fill="none" stroke="black"/>"#,
        b = H - PAD,
        r = W - PAD
    )?;
    writeln!(out, r##"<polyline points="{source}" fill="none" stroke="#1f77b4" stroke-width="1.5"/>"##)?;
    writeln!(out, r##"<polyline points="{drain}" fill="none" stroke="#d62728" stroke-dasharray="6 3" stroke-width="1.5"/>"##)?;
    writeln!(out, r#"<text x="{PAD}" y="{ty}" font-size="12">t: {t0:e} .. {t1:e} s</text>"#, ty = H - 10.0)?;
    writeln!(out, r#"<text x="{PAD}" y="24" font-size="12">E_S (solid), E_D (dashed)</text>"#)?;
    writeln!(out, "</svg>")
}
