//! Command-line front end.
//!
//! Exit codes are a stable contract: 0 success, 1 marginal diagnosis,
//! 2 configuration error, 3 solver failure.

pub mod config;
pub mod output;

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::adiabatic::{adiabaticity_ratio, annotate_trajectory, hierarchy_check, max_ratio, HierarchyReport, MARGINAL_RATIO};
use crate::error::{Error, Result};
use crate::experiments::{self, DistancePreset, StudySettings};
use crate::metrics::efficiency_full;
use crate::model::Scenario;
use crate::propagator::{propagate, ReloadPolicy};
use crate::schedules::Schedule;

pub use config::{ConfigDocument, OutputOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MARGINAL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

/// Environment variable capping the number of sweep worker threads.
pub const THREADS_ENV: &str = "ADIAPOWER_THREADS";

#[derive(Debug, Parser)]
#[command(name = "adiapower", version, about = "Static and adiabatic-passage wireless power transfer simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Study {
    #[value(name = "fig4-near")]
    Fig4Near,
    #[value(name = "fig4-far")]
    Fig4Far,
    #[value(name = "fig5")]
    Fig5,
}

impl Study {
    pub fn name(self) -> &'static str {
        match self {
            Study::Fig4Near => "fig4-near",
            Study::Fig4Far => "fig4-far",
            Study::Fig5 => "fig5",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate one scenario and write trajectory.csv.
    Simulate {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write trajectory.svg.
        #[arg(long)]
        svg: bool,
    },
    /// Run an efficiency sweep and write <study>.csv.
    Sweep {
        study: Study,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Lower end of the detuning axis (fig4) or coupling axis (fig5).
        #[arg(long, allow_hyphen_values = true)]
        grid_min: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        grid_max: Option<f64>,
        #[arg(long)]
        grid_n: Option<usize>,
        /// Loss-rate axis of fig5.
        #[arg(long)]
        gamma_min: Option<f64>,
        #[arg(long)]
        gamma_max: Option<f64>,
        #[arg(long)]
        gamma_n: Option<usize>,
    },
    /// Report the adiabaticity ratio and the rate hierarchy without integrating.
    Diagnose { config: PathBuf },
    /// Repeat the configured schedule with instant source recharge every period.
    Cycles {
        config: PathBuf,
        #[arg(long)]
        n: usize,
        /// Repetition period (s); required unless the config schedule is already cyclic.
        #[arg(long)]
        trep: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Empty the drain as well at each reload.
        #[arg(long)]
        reset_drain: bool,
    },
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    run(cli.command, &mut lock)
}

/// Runs a parsed command, writing the human-readable summary to `out`.
pub fn run(command: Command, out: &mut impl Write) -> i32 {
    let result = match command {
        Command::Simulate { config, out: dir, svg } => cmd_simulate(&config, dir.as_deref(), svg, out),
        Command::Sweep { study, out: dir, grid_min, grid_max, grid_n, gamma_min, gamma_max, gamma_n } => {
            let overrides = GridOverrides { grid_min, grid_max, grid_n, gamma_min, gamma_max, gamma_n };
            cmd_sweep(study, dir.as_deref(), &overrides, out)
        }
        Command::Diagnose { config } => cmd_diagnose(&config, out),
        Command::Cycles { config, n, trep, out: dir, reset_drain } => {
            let reload = if reset_drain { ReloadPolicy::ResetDrain } else { ReloadPolicy::PreserveDrain };
            cmd_cycles(&config, n, trep, reload, dir.as_deref(), out)
        }
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

pub fn exit_code_for(error: &Error) -> i32 {
    match error {
        Error::Integration { .. } => EXIT_SOLVER,
        _ => EXIT_CONFIG,
    }
}

fn output_dir(flag: Option<&Path>, doc: Option<&OutputOptions>) -> Result<PathBuf> {
    let dir = flag
        .map(Path::to_path_buf)
        .or_else(|| doc.and_then(|o| o.dir.clone()))
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn print_hierarchy(out: &mut impl Write, h: &HierarchyReport) -> Result<()> {
    writeln!(
        out,
        "hierarchy: gamma_max = {:e} < kappa0 = {:e}: {}; kappa0 < min|delta| = {:e}: {} => {}",
        h.gamma_max,
        h.kappa0,
        yes_no(h.coupling_exceeds_losses),
        h.delta_min_abs,
        yes_no(h.detuning_exceeds_coupling),
        if h.satisfied() { "satisfied" } else { "violated" }
    )?;
    Ok(())
}

fn print_crossing(out: &mut impl Write, schedule: &Schedule) -> Result<()> {
    match schedule.resonance_crossing() {
        Ok(t) => writeln!(out, "resonance crossing: t = {t:e} s")?,
        Err(_) => writeln!(out, "resonance crossing: n/a")?,
    }
    Ok(())
}

fn print_efficiency(out: &mut impl Write, trajectory: &crate::propagator::Trajectory, scenario: &Scenario) -> Result<()> {
    if scenario.losses.gamma_w == 0.0 {
        writeln!(out, "eta: undefined (gamma_W = 0, no work extracted)")?;
        return Ok(());
    }
    match efficiency_full(trajectory, &scenario.losses) {
        Ok(r) => {
            writeln!(out, "eta: {}", output::fmt_f64(r.eta))?;
            writeln!(out, "useful_energy: {}", output::fmt_f64(r.useful_energy))?;
        }
        Err(e) => writeln!(out, "eta: undefined ({e})")?,
    }
    Ok(())
}

pub fn cmd_simulate(config: &Path, dir: Option<&Path>, svg: bool, out: &mut impl Write) -> Result<i32> {
    let doc = ConfigDocument::load(config)?;
    let scenario = doc.scenario()?;
    let mut trajectory = propagate(&scenario)?;
    if doc.output.diagnostics {
        trajectory = annotate_trajectory(&trajectory, &scenario.schedule)?;
    }
    let dir = output_dir(dir, Some(&doc.output))?;
    let csv_path = dir.join("trajectory.csv");
    let mut csv = create(&csv_path)?;
    output::write_trajectory_csv(&mut csv, &trajectory)?;
    csv.flush()?;
    if svg || doc.output.svg {
        let mut f = create(&dir.join("trajectory.svg"))?;
        output::write_energy_svg(&mut f, &trajectory)?;
        f.flush()?;
    }

    let last = trajectory.last();
    writeln!(out, "samples: {}", trajectory.len())?;
    writeln!(
        out,
        "final: E_S = {} E_D = {}",
        output::fmt_f64(last.source_energy()),
        output::fmt_f64(last.drain_energy())
    )?;
    print_efficiency(out, &trajectory, &scenario)?;
    if let Some((t, r)) = max_ratio(&trajectory) {
        let flag = if r >= MARGINAL_RATIO { " (adiabaticity marginal)" } else { "" };
        writeln!(out, "r_max: {} at t = {t:e} s{flag}", output::fmt_f64(r))?;
    }
    print_hierarchy(out, &hierarchy_check(&scenario.losses, &scenario.schedule, scenario.t_start, scenario.t_end))?;
    writeln!(out, "wrote {}", csv_path.display())?;
    Ok(EXIT_OK)
}

/// Diagnostic summary of a scenario's drive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnosis {
    pub r_max: f64,
    pub t_at_max: f64,
    pub hierarchy: HierarchyReport,
}

impl Diagnosis {
    pub fn passes(&self) -> bool {
        self.hierarchy.satisfied() && self.r_max < MARGINAL_RATIO
    }
}

/// Scans the adiabaticity ratio over the scenario's sample times.
pub fn diagnose(scenario: &Scenario) -> Result<Diagnosis> {
    let mut best = (f64::NEG_INFINITY, scenario.t_start);
    for t in scenario.sample_times() {
        let r = adiabaticity_ratio(&scenario.schedule, t)?;
        if r > best.0 {
            best = (r, t);
        }
    }
    Ok(Diagnosis {
        r_max: best.0,
        t_at_max: best.1,
        hierarchy: hierarchy_check(&scenario.losses, &scenario.schedule, scenario.t_start, scenario.t_end),
    })
}

pub fn cmd_diagnose(config: &Path, out: &mut impl Write) -> Result<i32> {
    let doc = ConfigDocument::load(config)?;
    let scenario = doc.scenario()?;
    let d = diagnose(&scenario)?;
    let flag = if d.r_max >= MARGINAL_RATIO { " (adiabaticity marginal)" } else { "" };
    writeln!(out, "r_max: {} at t = {:e} s{flag}", output::fmt_f64(d.r_max), d.t_at_max)?;
    print_hierarchy(out, &d.hierarchy)?;
    print_crossing(out, &scenario.schedule)?;
    if d.passes() {
        writeln!(out, "diagnosis: ok")?;
        Ok(EXIT_OK)
    } else {
        writeln!(out, "diagnosis: marginal")?;
        Ok(EXIT_MARGINAL)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GridOverrides {
    pub grid_min: Option<f64>,
    pub grid_max: Option<f64>,
    pub grid_n: Option<usize>,
    pub gamma_min: Option<f64>,
    pub gamma_max: Option<f64>,
    pub gamma_n: Option<usize>,
}

fn axis(min: f64, max: f64, n: usize, log: bool) -> Result<Vec<f64>> {
    if n == 0 || !(min.is_finite() && max.is_finite()) || min > max {
        return Err(Error::Config(format!("invalid grid [{min}, {max}] with {n} points")));
    }
    if log {
        if min <= 0.0 {
            return Err(Error::Config(format!("log-spaced grid needs positive bounds, got {min}")));
        }
        Ok(experiments::log_grid(min, max, n))
    } else {
        Ok(experiments::linear_grid(min, max, n))
    }
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
        if n == 0 {
            return Err(Error::Config(format!("{THREADS_ENV} must be >= 1")));
        }
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| Error::Config(e.to_string()))
}

pub fn cmd_sweep(study: Study, dir: Option<&Path>, overrides: &GridOverrides, out: &mut impl Write) -> Result<i32> {
    let settings = StudySettings::default();
    let pool = thread_pool()?;
    let dir = output_dir(dir, None)?;
    let csv_path = dir.join(format!("{}.csv", study.name()));
    let meta_path = dir.join(format!("{}.meta.json", study.name()));
    let (rows, meta) = match study {
        Study::Fig4Near | Study::Fig4Far => {
            let preset = if study == Study::Fig4Near { DistancePreset::Near } else { DistancePreset::Far };
            let grid = axis(
                overrides.grid_min.unwrap_or(-2e5),
                overrides.grid_max.unwrap_or(2e5),
                overrides.grid_n.unwrap_or(81),
                false,
            )?;
            let sweep = pool.install(|| experiments::study_fig4(&grid, preset, &settings))?;
            let mut f = create(&csv_path)?;
            output::write_fig4_csv(&mut f, &sweep.records)?;
            f.flush()?;
            (sweep.records.len(), serde_json::to_string_pretty(&sweep.metadata))
        }
        Study::Fig5 => {
            let kappa = axis(
                overrides.grid_min.unwrap_or(1e4),
                overrides.grid_max.unwrap_or(1e5),
                overrides.grid_n.unwrap_or(41),
                true,
            )?;
            let gamma = axis(
                overrides.gamma_min.unwrap_or(1e2),
                overrides.gamma_max.unwrap_or(2e4),
                overrides.gamma_n.unwrap_or(41),
                true,
            )?;
            let sweep = pool.install(|| experiments::study_fig5(&kappa, &gamma, &settings))?;
            let mut f = create(&csv_path)?;
            output::write_fig5_csv(&mut f, &sweep.records)?;
            f.flush()?;
            (sweep.records.len(), serde_json::to_string_pretty(&sweep.metadata))
        }
    };
    std::fs::write(&meta_path, meta.map_err(|e| Error::Io(e.to_string()))?)?;
    writeln!(out, "wrote {rows} rows to {}", csv_path.display())?;
    Ok(EXIT_OK)
}

pub fn cmd_cycles(
    config: &Path,
    n_cycles: usize,
    t_rep: Option<f64>,
    reload: ReloadPolicy,
    dir: Option<&Path>,
    out: &mut impl Write,
) -> Result<i32> {
    let doc = ConfigDocument::load(config)?;
    let mut scenario = doc.scenario()?;
    scenario.schedule = match (scenario.schedule, t_rep) {
        (Schedule::Cyclic { inner, .. }, Some(period)) => Schedule::Cyclic { period, inner },
        (cyclic @ Schedule::Cyclic { .. }, None) => cyclic,
        (inner, Some(period)) => Schedule::cyclic(period, inner),
        (_, None) => return Err(Error::Config("--trep is required for a non-cyclic schedule".into())),
    };
    if n_cycles == 0 {
        return Err(Error::Config("--n must be >= 1".into()));
    }
    let Schedule::Cyclic { period, .. } = scenario.schedule else { unreachable!() };
    scenario.t_end = scenario.t_start + period;
    scenario.validate().map_err(|e| Error::Config(e.to_string()))?;

    let mut study = experiments::cycle_study_for(&scenario, n_cycles, reload)?;
    if doc.output.diagnostics {
        study.run.trajectory = annotate_trajectory(&study.run.trajectory, &scenario.schedule)?;
    }
    let dir = output_dir(dir, Some(&doc.output))?;
    let csv_path = dir.join("cycles.csv");
    let mut f = create(&csv_path)?;
    output::write_trajectory_csv(&mut f, &study.run.trajectory)?;
    f.flush()?;

    writeln!(out, "cycles: {n_cycles} x {period:e} s")?;
    writeln!(out, "injected_energy: {}", output::fmt_f64(study.run.injected_energy))?;
    for (c, r) in study.run.cycles.iter().zip(&study.per_cycle) {
        writeln!(
            out,
            "cycle {}: eta = {} useful = {} E_S(end) = {}",
            c.index,
            output::fmt_f64(r.eta),
            output::fmt_f64(r.useful_energy),
            output::fmt_f64(c.source_energy_end)
        )?;
    }
    writeln!(out, "total: eta = {} useful = {}", output::fmt_f64(study.total.eta), output::fmt_f64(study.total.useful_energy))?;
    writeln!(out, "wrote {}", csv_path.display())?;
    Ok(EXIT_OK)
}
