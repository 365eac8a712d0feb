//! `fpt` command-line front end.
//!
//! Every subcommand is a thin layer over the library: parse flags (and an
//! optional `--config` file), run, write CSV/JSON/SVG atomically, print a
//! one-line report. Exit codes are part of the interface, see [`exit`].

pub mod config;
pub mod output;
pub mod svg;

use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::dynamics::{
    first_interior_minimum, resolved_run, stroboscopic_run, validate_reduction_with, InitialState,
    Trajectory,
};
use crate::floquet::{self, classify, discriminant, floquet_spectrum, PhaseLabel};
use crate::models::{
    canonical_protocol, mhz_to_rad_per_s, square_wave_protocol, static_classify, us_to_s,
    ContinuousModel, DimensionlessPoint, PulseProtocol, PulseSegment, ThreeLevelModel,
};
use crate::sweeps::{
    boundary_curve, open_interval_samples, phase_diagram_with, Axis, GridSpec, Spacing,
};
use output::{atomic_write, sig12, Header};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Environment variable capping sweep parallelism.
pub const THREADS_ENV: &str = "FPT_THREADS";

pub mod exit {
    pub const PTSP: i32 = 0;
    pub const PTBP: i32 = 1;
    pub const EP: i32 = 2;
    pub const OK: i32 = 0;
    /// Bound exceeded in `validate-three-level`.
    pub const FAILED: i32 = 1;
    /// Reduction ratios below the adiabatic-elimination threshold.
    pub const VALIDITY_WARNING: i32 = 3;
    pub const USAGE: i32 = 64;
    pub const DATA: i32 = 65;
    pub const CANT_CREATE: i32 = 73;
}

pub fn phase_exit_code(label: PhaseLabel) -> i32 {
    match label {
        PhaseLabel::Ptsp => exit::PTSP,
        PhaseLabel::Ptbp => exit::PTBP,
        PhaseLabel::Ep => exit::EP,
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(String),
    Output(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Data(_) => exit::DATA,
            CliError::Output(_) => exit::CANT_CREATE,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Output(m) => m,
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        match e {
            crate::Error::InvalidParameter { .. }
            | crate::Error::InvalidGrid(_)
            | crate::Error::NonFinite(_) => CliError::Usage(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

type CliResult = Result<i32, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "fpt",
    version,
    about = "Floquet PT-symmetry of a two-level system under pulsed measurement"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify one (Ωt₀, γt₁) point. Exit code 0 = PTSP, 1 = PTBP, 2 = EP.
    #[command(args_override_self = true)]
    Classify(ClassifyArgs),
    /// Stroboscopic survival probability of the canonical protocol.
    #[command(args_override_self = true)]
    Simulate(SimulateArgs),
    /// Discriminant, phase and decay rate on a (Ωt₀, γt₁) grid.
    #[command(args_override_self = true)]
    PhaseDiagram(GridArgs),
    /// Exceptional-point curve γt₁*(Ωt₀).
    #[command(args_override_self = true)]
    Boundary(BoundaryArgs),
    /// Per-period decay rate on a (Ωt₀, γt₁) grid.
    #[command(args_override_self = true)]
    DecayMap(GridArgs),
    /// Compare the three-level model with its reduced two-level model.
    #[command(args_override_self = true)]
    ValidateThreeLevel(ThreeLevelArgs),
    /// Time-resolved run of the anti-phase square-wave protocol.
    #[command(args_override_self = true)]
    SquareWave(SquareWaveArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Normalization {
    Raw,
    Normalized,
    Both,
}

impl Normalization {
    fn as_str(&self) -> &'static str {
        match self {
            Normalization::Raw => "raw",
            Normalization::Normalized => "normalized",
            Normalization::Both => "both",
        }
    }
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Output format; inferred from the file extension, csv otherwise.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

impl OutputArgs {
    fn format(&self) -> Format {
        if let Some(f) = self.format {
            return f;
        }
        match self
            .output
            .as_deref()
            .and_then(Path::extension)
            .and_then(|e| e.to_str())
        {
            Some("json") => Format::Json,
            Some("svg") => Format::Svg,
            _ => Format::Csv,
        }
    }
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    /// Measurement interval Ωt₀.
    #[arg(long)]
    omega_t0: f64,
    /// Measurement strength γt₁.
    #[arg(long)]
    gamma_t1: f64,
    /// Relative width of the EP band around D = 1.
    #[arg(long, default_value_t = floquet::DEFAULT_TOLERANCE)]
    tol: f64,
    /// Also report the static (continuous-measurement) phase for γ/Ω.
    #[arg(long)]
    compare_static: bool,
    /// γ/Ω used by --compare-static.
    #[arg(long, default_value_t = 2.0)]
    gamma_ratio: f64,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Measurement interval Ωt₀ (dimensionless parameters).
    #[arg(long, conflicts_with_all = ["t0_us", "t1_us"])]
    omega_t0: Option<f64>,
    /// Measurement strength γt₁ (dimensionless parameters).
    #[arg(long, conflicts_with_all = ["t0_us", "t1_us"])]
    gamma_t1: Option<f64>,
    /// Drive duration in µs (physical parameters).
    #[arg(long)]
    t0_us: Option<f64>,
    /// Measurement duration in µs (physical parameters).
    #[arg(long)]
    t1_us: Option<f64>,
    /// Coupling Ω in MHz (converted with 2π).
    #[arg(long, default_value_t = 0.1)]
    omega_mhz: f64,
    /// Loss γ in MHz (converted with 2π).
    #[arg(long, conflicts_with = "gamma_ratio")]
    gamma_mhz: Option<f64>,
    /// Loss as a multiple of Ω [default: 1].
    #[arg(long)]
    gamma_ratio: Option<f64>,
    /// Number of periods.
    #[arg(long, default_value_t = 200)]
    periods: u64,
    /// Initial basis state.
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1))]
    initial: u8,
    /// Population channel used for plots and the oscillation report.
    #[arg(long, value_enum, default_value_t = Normalization::Raw)]
    normalization: Normalization,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct GridArgs {
    #[arg(long, default_value_t = 0.0)]
    omega_min: f64,
    #[arg(long, default_value_t = PI)]
    omega_max: f64,
    #[arg(long, default_value_t = 256)]
    omega_count: usize,
    #[arg(long, default_value_t = 0.0)]
    gamma_min: f64,
    #[arg(long, default_value_t = 2.0)]
    gamma_max: f64,
    #[arg(long, default_value_t = 256)]
    gamma_count: usize,
    #[arg(long, value_enum, default_value_t = SpacingArg::Linear)]
    spacing: SpacingArg,
    /// Relative EP tolerance for the phase labels.
    #[arg(long, default_value_t = floquet::DEFAULT_TOLERANCE)]
    tol: f64,
    /// Display-only band |D − 1| ≤ band drawn in the EP color.
    #[arg(long, default_value_t = 0.01)]
    band: f64,
    /// Worker threads (also capped by FPT_THREADS).
    #[arg(long)]
    threads: Option<usize>,
    /// Additionally write an SVG heatmap here.
    #[arg(long)]
    svg: Option<PathBuf>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SpacingArg {
    Linear,
    Log,
}

#[derive(Debug, Args)]
struct BoundaryArgs {
    /// Lower end of the open Ωt₀ interval.
    #[arg(long, default_value_t = 0.01)]
    min: f64,
    /// Upper end of the open Ωt₀ interval.
    #[arg(long, default_value_t = 3.0)]
    max: f64,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Explicit Ωt₀ values, comma separated (overrides the interval).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    at: Option<Vec<f64>>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct ThreeLevelArgs {
    #[arg(long, default_value_t = 0.1)]
    omega_mhz: f64,
    #[arg(long, default_value_t = 1.0)]
    omega_prime_mhz: f64,
    /// Natural linewidth Γ of |P⟩ in MHz (converted with 2π).
    #[arg(long, default_value_t = 22.0)]
    linewidth_mhz: f64,
    /// Comparison window in µs [default: one Rabi period 2π/Ω].
    #[arg(long)]
    t_max_us: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    steps: u64,
    /// Largest accepted sup error.
    #[arg(long, default_value_t = 0.05)]
    bound: f64,
}

#[derive(Debug, Args)]
struct SquareWaveArgs {
    #[arg(long, default_value_t = 0.1)]
    omega_mhz: f64,
    /// γ/Ω.
    #[arg(long, default_value_t = 2.0)]
    gamma_ratio: f64,
    /// Square-wave angular frequency in units of Ω.
    #[arg(long, default_value_t = 0.5)]
    freq_ratio: f64,
    #[arg(long, default_value_t = 50)]
    periods: u64,
    #[arg(long, default_value_t = 32)]
    samples_per_segment: usize,
    #[arg(long, value_enum, default_value_t = Normalization::Both)]
    normalization: Normalization,
    #[command(flatten)]
    out: OutputArgs,
}

/// Runs the CLI with explicit argument list and output streams; returns
/// the process exit code.
pub fn run(args: Vec<String>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let args = match config::expand(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit::USAGE;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp
                | clap::error::ErrorKind::DisplayVersion
                | clap::error::ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    let _ = write!(out, "{e}");
                    return if e.kind()
                        == clap::error::ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
                    {
                        exit::USAGE
                    } else {
                        exit::OK
                    };
                }
                _ => exit::USAGE,
            };
            let _ = write!(err, "{e}");
            return code;
        }
    };
    let result = match cli.command {
        Command::Classify(a) => cmd_classify(&a, out),
        Command::Simulate(a) => cmd_simulate(&a, out, err),
        Command::PhaseDiagram(a) => cmd_grid(&a, GridKind::Phase, out, err),
        Command::DecayMap(a) => cmd_grid(&a, GridKind::Decay, out, err),
        Command::Boundary(a) => cmd_boundary(&a, out, err),
        Command::ValidateThreeLevel(a) => cmd_validate_three_level(&a, out),
        Command::SquareWave(a) => cmd_square_wave(&a, out, err),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.code()
        }
    }
}

fn report(out: &mut dyn Write, line: &str) -> Result<(), CliError> {
    writeln!(out, "{line}").map_err(|e| CliError::Output(format!("stdout: {e}")))
}

/// Writes `contents` to `path`, or to `out` when there is no path.
fn deliver(path: Option<&Path>, contents: &str, out: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => atomic_write(p, contents)
            .map_err(|e| CliError::Output(format!("cannot write {}: {e}", p.display()))),
        None => out
            .write_all(contents.as_bytes())
            .map_err(|e| CliError::Output(format!("stdout: {e}"))),
    }
}

fn cmd_classify(a: &ClassifyArgs, out: &mut dyn Write) -> CliResult {
    let point = DimensionlessPoint::new(a.omega_t0, a.gamma_t1)?;
    if !(a.tol.is_finite() && a.tol >= 0.0) {
        return Err(CliError::Usage(format!("invalid tolerance {}", a.tol)));
    }
    let label = classify(point, a.tol);
    let mut line = format!(
        "{label} D={} omega_t0={:?} gamma_t1={:?}",
        sig12(discriminant(point)),
        a.omega_t0,
        a.gamma_t1
    );
    if a.compare_static {
        let model = ContinuousModel::new(1.0, a.gamma_ratio)?;
        let stat = static_classify(&model)?;
        line.push_str(&format!(
            " static(gamma/omega={:?})={stat} floquet={label} agree={}",
            a.gamma_ratio,
            if stat == label { "yes" } else { "no" }
        ));
    }
    report(out, &line)?;
    Ok(phase_exit_code(label))
}

fn finite_positive(name: &str, x: f64) -> Result<f64, CliError> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(CliError::Usage(format!(
            "--{name} must be positive, got {x}"
        )))
    }
}

fn build_simulation(a: &SimulateArgs) -> Result<(PulseProtocol, Header), CliError> {
    let omega = mhz_to_rad_per_s(finite_positive("omega-mhz", a.omega_mhz)?);
    let gamma = match (a.gamma_mhz, a.gamma_ratio) {
        (Some(g), _) => mhz_to_rad_per_s(finite_positive("gamma-mhz", g)?),
        (None, r) => finite_positive("gamma-ratio", r.unwrap_or(1.0))? * omega,
    };
    let mut header = Header::new("simulate");
    let protocol = match (a.omega_t0, a.gamma_t1, a.t0_us, a.t1_us) {
        (Some(ot), Some(gt), None, None) => {
            header = header.float("omega_t0", ot).float("gamma_t1", gt);
            canonical_protocol(DimensionlessPoint::new(ot, gt)?, omega, gamma)?
        }
        (None, None, Some(t0), Some(t1)) => {
            header = header.float("t0_us", t0).float("t1_us", t1);
            let mut segments = Vec::new();
            if t0 > 0.0 {
                segments.push(PulseSegment::new(omega, 0.0, us_to_s(t0))?);
            }
            if t1 > 0.0 {
                segments.push(PulseSegment::new(0.0, gamma, us_to_s(t1))?);
            }
            if t0 < 0.0 || t1 < 0.0 {
                return Err(CliError::Usage("durations must be non-negative".into()));
            }
            PulseProtocol::new(segments)?
        }
        _ => {
            return Err(CliError::Usage(
                "give either --omega-t0 and --gamma-t1, or --t0-us and --t1-us".into(),
            ))
        }
    };
    header = header
        .float("omega_rad_per_s", omega)
        .float("gamma_per_s", gamma)
        .text("periods", a.periods)
        .text("initial", a.initial)
        .text("normalization", a.normalization.as_str());
    Ok((protocol, header))
}

fn behaviour(values: &[f64]) -> &'static str {
    if first_interior_minimum(values, values.len()).is_some() {
        "oscillatory"
    } else {
        "monotone"
    }
}

fn trajectory_plot(title: &str, traj: &Trajectory, norm: Normalization) -> String {
    let x: Vec<f64> = traj.samples.iter().map(|s| s.t * 1e6).collect();
    let mut series = Vec::new();
    if norm != Normalization::Normalized {
        series.push(("raw", traj.p0_raw()));
    }
    if norm != Normalization::Raw {
        series.push(("normalized", traj.p0_norm()));
    }
    svg::line_plot(title, "t (µs)", &x, &series)
}

fn emit_trajectory(
    header: &Header,
    traj: &Trajectory,
    norm: Normalization,
    out_args: &OutputArgs,
    summary: serde_json::Value,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let contents = match out_args.format() {
        Format::Csv => output::trajectory_csv(header, traj),
        Format::Json => output::trajectory_json(header, traj, summary),
        Format::Svg => trajectory_plot(&header.command, traj, norm),
    };
    deliver(out_args.output.as_deref(), &contents, out)
}

fn cmd_simulate(a: &SimulateArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let (protocol, header) = build_simulation(a)?;
    let spectrum = floquet_spectrum(&protocol);
    let point = protocol.dimensionless();
    let label = classify(point, floquet::DEFAULT_TOLERANCE);
    let psi0 = InitialState::basis(a.initial as usize);
    let traj = stroboscopic_run(&protocol, &psi0, a.periods);

    let raw = behaviour(&traj.p0_raw());
    let normed = behaviour(&traj.p0_norm());
    let last = traj.samples.last().expect("n = 0 is always emitted");
    let mut line = format!(
        "{label} D={} kappa={} periods={} p0_final={}",
        sig12(discriminant(point)),
        sig12(spectrum.kappa()),
        traj.samples.len() - 1,
        sig12(match a.normalization {
            Normalization::Normalized => last.p0_norm,
            _ => last.p0_raw,
        })
    );
    match a.normalization {
        Normalization::Raw => line.push_str(&format!(" p0_raw={raw}")),
        Normalization::Normalized => line.push_str(&format!(" p0_norm={normed}")),
        Normalization::Both => line.push_str(&format!(" p0_raw={raw} p0_norm={normed}")),
    }
    if let Some(n) = traj.truncated_at {
        line.push_str(&format!(" truncated_at={n}"));
    }
    let summary = serde_json::json!({
        "phase": label,
        "discriminant": discriminant(point),
        "kappa_multiplier": spectrum.kappa(),
        "multipliers": spectrum.multipliers,
        "p0_raw_behaviour": raw,
        "p0_norm_behaviour": normed,
    });
    emit_trajectory(&header, &traj, a.normalization, &a.out, summary, out)?;
    if a.out.output.is_some() {
        report(out, &line)?;
    } else {
        report(err, &line)?;
    }
    Ok(exit::OK)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum GridKind {
    Phase,
    Decay,
}

/// Worker count from `--threads` and `FPT_THREADS`, whichever is smaller.
fn worker_count(flag: Option<usize>, err: &mut dyn Write) -> Option<usize> {
    let env = std::env::var(THREADS_ENV).ok().and_then(|v| {
        let parsed = v.trim().parse::<usize>().ok().filter(|&n| n > 0);
        if parsed.is_none() {
            let _ = writeln!(err, "warning: ignoring {THREADS_ENV}={v}");
        }
        parsed
    });
    match (flag, env) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}

fn cmd_grid(a: &GridArgs, kind: GridKind, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let spec = GridSpec {
        omega_t0: Axis::new(a.omega_min, a.omega_max, a.omega_count),
        gamma_t1: Axis::new(a.gamma_min, a.gamma_max, a.gamma_count),
        spacing: match a.spacing {
            SpacingArg::Linear => Spacing::Linear,
            SpacingArg::Log => Spacing::Log,
        },
    };
    let workers = worker_count(a.threads, err);
    let diagram = phase_diagram_with(&spec, a.tol, workers)?;
    let command = match kind {
        GridKind::Phase => "phase-diagram",
        GridKind::Decay => "decay-map",
    };
    let header = Header::new(command)
        .float("omega_min", a.omega_min)
        .float("omega_max", a.omega_max)
        .text("omega_count", a.omega_count)
        .float("gamma_min", a.gamma_min)
        .float("gamma_max", a.gamma_max)
        .text("gamma_count", a.gamma_count)
        .text("spacing", format!("{:?}", a.spacing).to_lowercase())
        .float("tol", a.tol);
    let channel = match kind {
        GridKind::Phase => svg::Channel::Phase { band: a.band },
        GridKind::Decay => svg::Channel::Kappa,
    };
    let title = match kind {
        GridKind::Phase => "PT phase diagram",
        GridKind::Decay => "per-period decay rate",
    };
    let contents = match a.out.format() {
        Format::Csv => output::grid_csv(&header, &diagram),
        Format::Json => output::grid_json(&header, &diagram),
        Format::Svg => svg::heatmap(&diagram, channel, title),
    };
    deliver(a.out.output.as_deref(), &contents, out)?;
    if let Some(path) = &a.svg {
        atomic_write(path, &svg::heatmap(&diagram, channel, title))
            .map_err(|e| CliError::Output(format!("cannot write {}: {e}", path.display())))?;
    }
    let count = |l: PhaseLabel| diagram.cells.iter().filter(|c| c.phase == l).count();
    let kappa_max = diagram.cells.iter().map(|c| c.kappa).fold(0.0, f64::max);
    let line = format!(
        "{command} cells={} PTSP={} PTBP={} EP={} kappa_max={}",
        diagram.cells.len(),
        count(PhaseLabel::Ptsp),
        count(PhaseLabel::Ptbp),
        count(PhaseLabel::Ep),
        sig12(kappa_max)
    );
    if a.out.output.is_some() {
        report(out, &line)?;
    } else {
        report(err, &line)?;
    }
    Ok(exit::OK)
}

fn cmd_boundary(a: &BoundaryArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let samples = match &a.at {
        Some(v) => v.clone(),
        None => {
            if a.min.is_nan() || a.max.is_nan() || a.min >= a.max || a.samples == 0 {
                return Err(CliError::Usage("need min < max and samples > 0".into()));
            }
            open_interval_samples(a.min, a.max, a.samples)
        }
    };
    let curve = boundary_curve(&samples);
    for s in &curve.skipped {
        let _ = writeln!(err, "skipped omega_t0={s:?}: outside (0, pi)");
    }
    if curve.points.is_empty() {
        return Err(CliError::Data("no sample lies in (0, pi)".into()));
    }
    let header = Header::new("boundary")
        .float("min", a.min)
        .float("max", a.max)
        .text("samples", samples.len());
    let contents = match a.out.format() {
        Format::Json => {
            let mut doc = header.to_json();
            doc["points"] = serde_json::to_value(&curve.points).unwrap();
            doc["skipped"] = serde_json::to_value(&curve.skipped).unwrap();
            serde_json::to_string_pretty(&doc).unwrap()
        }
        Format::Csv => output::boundary_csv(&header, &curve.points),
        Format::Svg => {
            return Err(CliError::Usage(
                "boundary has no svg output; use phase-diagram --svg".into(),
            ))
        }
    };
    deliver(a.out.output.as_deref(), &contents, out)?;
    Ok(exit::OK)
}

fn cmd_validate_three_level(a: &ThreeLevelArgs, out: &mut dyn Write) -> CliResult {
    let omega = mhz_to_rad_per_s(finite_positive("omega-mhz", a.omega_mhz)?);
    let model = ThreeLevelModel::new(
        omega,
        mhz_to_rad_per_s(a.omega_prime_mhz),
        mhz_to_rad_per_s(a.linewidth_mhz),
    )?;
    let t_max = match a.t_max_us {
        Some(t) => us_to_s(finite_positive("t-max-us", t)?),
        None => 2.0 * PI / omega,
    };
    let r = validate_reduction_with(&model, t_max, a.steps)?;
    report(
        out,
        &format!(
            "gamma_eff={} sup_error={} omega_prime/omega={} linewidth/omega={} valid={} bound={}",
            sig12(r.gamma_eff),
            sig12(r.sup_error),
            sig12(r.omega_prime_ratio),
            sig12(r.linewidth_ratio),
            if r.valid { "yes" } else { "no" },
            sig12(a.bound)
        ),
    )?;
    Ok(if !r.valid {
        exit::VALIDITY_WARNING
    } else if r.sup_error <= a.bound {
        exit::OK
    } else {
        exit::FAILED
    })
}

fn cmd_square_wave(a: &SquareWaveArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let omega = mhz_to_rad_per_s(finite_positive("omega-mhz", a.omega_mhz)?);
    let gamma = a.gamma_ratio * omega;
    let freq = finite_positive("freq-ratio", a.freq_ratio)? * omega;
    let protocol = square_wave_protocol(omega, gamma, freq)?;
    let traj = resolved_run(
        &protocol,
        &InitialState::ground(),
        a.periods,
        a.samples_per_segment,
    );
    let header = Header::new("square-wave")
        .float("omega_mhz", a.omega_mhz)
        .float("gamma_ratio", a.gamma_ratio)
        .float("freq_ratio", a.freq_ratio)
        .text("periods", a.periods)
        .text("samples_per_segment", a.samples_per_segment)
        .text("normalization", a.normalization.as_str());
    let spectrum = floquet_spectrum(&protocol);
    let last = traj.samples.last().expect("t = 0 is always emitted");
    let summary = serde_json::json!({
        "floquet_phase": spectrum.phase,
        "multipliers": spectrum.multipliers,
        "norm_final": last.norm,
    });
    emit_trajectory(&header, &traj, a.normalization, &a.out, summary, out)?;
    let line = format!(
        "square-wave samples={} period_us={} floquet={} norm_final={} p0_raw_final={} p0_norm_final={}",
        traj.samples.len(),
        sig12(protocol.period() * 1e6),
        spectrum.phase,
        sig12(last.norm),
        sig12(last.p0_raw),
        sig12(last.p0_norm)
    );
    if a.out.output.is_some() {
        report(out, &line)?;
    } else {
        report(err, &line)?;
    }
    Ok(exit::OK)
}
