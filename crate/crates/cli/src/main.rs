//! `reality`: figure sweeps, case verification, circuit certification and
//! tomography emulation for the monitoring-reality toolkit.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use reality_core::experiments::{
    certify_circuits, run_sweep, tomo_sim, verify_cases, GridKind, GridSpec, PathKind, Scenario,
    StatePreset, StateSpec, SweepConfig, SweepMetadata, TomoSimConfig, DEFAULT_SHOTS,
};
use reality_core::output::{to_csv, to_json, to_svg, write_file};
use reality_core::{Coupling, Error};

const EXIT_FAILURE: u8 = 1;
const EXIT_VIOLATION: u8 = 2;
const EXIT_CONFIG: u8 = 3;

#[derive(Parser)]
#[command(
    name = "reality",
    version,
    about = "Reality variations under weak non-revealed measurements"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep monitoring strength and record ΔR_X, ΔR_X' per grid point
    Sweep(SweepArgs),
    /// Check the case (i)-(v) properties on random instances
    VerifyCases(VerifyArgs),
    /// Compare dilation circuits against the analytic monitoring channels
    CertifyCircuits(CertifyArgs),
    /// Simulate finite-shot single-qubit tomography
    TomoSim(TomoArgs),
}

#[derive(Args)]
struct SweepArgs {
    /// JSON config; fields missing from it come from the scenario preset
    #[arg(long)]
    config: Option<PathBuf>,
    /// Preset: fig1, fig2, fig4a, fig4b, fig4c, custom [default: custom]
    #[arg(long)]
    scenario: Option<Scenario>,
    /// CSV output path [default: stdout]
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON output path (metadata + records)
    #[arg(long)]
    json: Option<PathBuf>,
    /// SVG chart output path
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Base seed; grid point i uses stream i [default: 0]
    #[arg(long)]
    seed: Option<u64>,
    /// Shots per Pauli axis, 0 for exact expectations [default: 8192]
    #[arg(long)]
    shots: Option<u64>,
    /// analytic, circuit or noisy [default: analytic]
    #[arg(long)]
    path: Option<PathKind>,
    /// cz (epsilon = 1 - cos theta_m) or cnot (epsilon = 1 - sin theta_m) [default: cz]
    #[arg(long)]
    coupling: Option<Coupling>,
    /// Initial state preset: zero, one, plus, minus, plus_i, minus_i, mixed
    #[arg(long, value_parser = parse_preset)]
    state: Option<StatePreset>,
    /// Evenly spaced grid size [default: 33]
    #[arg(long)]
    points: Option<usize>,
    /// Grid variable: theta_m or epsilon
    #[arg(long, value_parser = parse_grid_kind)]
    grid: Option<GridKind>,
    /// Explicit comma-separated grid values (replaces --points)
    #[arg(long, value_delimiter = ',')]
    values: Option<Vec<f64>>,
    /// Two-qubit depolarizing probability on the noisy path [default: 0.01]
    #[arg(long)]
    depolarizing: Option<f64>,
    /// Bootstrap replicates for shot-path standard errors, 0 disables [default: 100]
    #[arg(long)]
    bootstrap: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    /// Hilbert space dimension
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// JSON report path
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CertifyArgs {
    /// Strength grid points over [0, pi/2]
    #[arg(long, default_value_t = 17)]
    resolution: usize,
    /// JSON report path
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TomoArgs {
    /// State preset
    #[arg(long, value_parser = parse_preset, default_value = "plus")]
    state: StatePreset,
    /// Explicit Bloch vector x,y,z (overrides --state)
    #[arg(long, value_delimiter = ',', num_args = 3)]
    bloch: Option<Vec<f64>>,
    #[arg(long, default_value_t = DEFAULT_SHOTS)]
    shots: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Apply the device readout confusion
    #[arg(long)]
    noisy: bool,
    #[arg(long, default_value_t = 1)]
    repeats: usize,
    /// JSON report path [default: stdout]
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_preset(s: &str) -> Result<StatePreset, String> {
    serde_json::from_value(serde_json::Value::String(s.to_ascii_lowercase()))
        .map_err(|_| format!("unknown state `{s}`"))
}

fn parse_grid_kind(s: &str) -> Result<GridKind, String> {
    serde_json::from_value(serde_json::Value::String(s.to_ascii_lowercase()))
        .map_err(|_| format!("unknown grid `{s}`"))
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidConfig { .. }
        | Error::EpsilonOutOfRange(_)
        | Error::StrengthOutOfRange(_)
        | Error::Json(_) => EXIT_CONFIG,
        _ => EXIT_FAILURE,
    }
}

fn read_config(path: &Path) -> reality_core::Result<SweepConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    SweepConfig::from_json_str(&text)
}

fn build_config(args: &SweepArgs) -> reality_core::Result<SweepConfig> {
    let mut c = match &args.config {
        Some(path) => read_config(path)?,
        None => SweepConfig::preset(args.scenario.unwrap_or(Scenario::Custom)),
    };
    if let (Some(s), Some(_)) = (args.scenario, &args.config) {
        if s != c.scenario {
            return Err(Error::InvalidConfig {
                field: "scenario".into(),
                message: format!("--scenario {s:?} conflicts with the config file"),
            });
        }
    }
    if let Some(v) = args.seed {
        c.seed = v;
    }
    if let Some(v) = args.shots {
        c.shots = v;
    }
    if let Some(v) = args.path {
        c.path = v;
    }
    if let Some(v) = args.coupling {
        c.coupling = v;
    }
    if let Some(v) = args.state {
        c.state = StateSpec::Preset { preset: v };
    }
    if let Some(kind) = args.grid {
        c.grid.kind = kind;
    }
    if let Some(n) = args.points {
        c.grid = GridSpec::even(c.grid.kind, n);
    }
    if let Some(values) = &args.values {
        c.grid = GridSpec::values(c.grid.kind, values.clone());
    }
    if let Some(v) = args.depolarizing {
        c.depolarizing = v;
    }
    if let Some(v) = args.bootstrap {
        c.bootstrap = v;
    }
    if let Some(p) = &args.out {
        c.out = Some(p.display().to_string());
    }
    if let Some(p) = &args.svg {
        c.svg = Some(p.display().to_string());
    }
    c.validate()?;
    Ok(c)
}

fn sweep(args: &SweepArgs) -> reality_core::Result<u8> {
    let config = build_config(args)?;
    let records = run_sweep(&config)?;
    let csv = to_csv(&records)?;
    match &config.out {
        Some(p) => write_file(Path::new(p), &csv)?,
        None => print!("{csv}"),
    }
    if let Some(p) = &args.json {
        let json = to_json(&SweepMetadata::new(&config)?, &records)?;
        write_file(p, &(serde_json::to_string_pretty(&json)? + "\n"))?;
    }
    if let Some(p) = &config.svg {
        write_file(Path::new(p), &to_svg(&records, config.grid.kind)?)?;
    }
    if config.out.is_some() {
        eprintln!("wrote {} records", records.len());
    }
    Ok(0)
}

fn write_report<T: serde::Serialize>(
    out: &Option<PathBuf>,
    report: &T,
) -> reality_core::Result<()> {
    if let Some(p) = out {
        write_file(p, &(serde_json::to_string_pretty(report)? + "\n"))?;
    }
    Ok(())
}

fn verify(args: &VerifyArgs) -> reality_core::Result<u8> {
    let report = verify_cases(args.seed, args.trials, args.dim)?;
    println!(
        "verify-cases dim={} trials={} seed={}",
        report.dim, report.trials, report.seed
    );
    println!(
        "{:<36} {:>9} {:>10} {:>14}  status",
        "check", "instances", "violations", "worst margin"
    );
    for c in &report.checks {
        let status = match (c.violations, c.enforced) {
            (0, _) => "ok",
            (_, true) => "VIOLATED",
            (_, false) => "reported (not a theorem)",
        };
        println!(
            "{:<36} {:>9} {:>10} {:>14.3e}  {status}",
            c.name, c.instances, c.violations, c.worst_margin
        );
    }
    write_report(&args.out, &report)?;
    Ok(if report.passed() { 0 } else { EXIT_VIOLATION })
}

fn certify(args: &CertifyArgs) -> reality_core::Result<u8> {
    let report = certify_circuits(args.resolution)?;
    println!("certify-circuits resolution={}", report.resolution);
    for e in &report.entries {
        println!(
            "n={} {:<4} points={:<3} max deviation {:.3e} (tol {:.0e}) {}",
            e.n_qubits,
            e.coupling,
            e.points,
            e.max_deviation,
            e.tolerance,
            if e.passed() { "ok" } else { "FAILED" }
        );
    }
    let cnot = &report.cnot;
    println!(
        "cnot mapping: monotone={} smooth={} max |eps - (1 - sin)| = {:.3e}",
        cnot.monotone, cnot.smooth, cnot.max_error_vs_one_minus_sin
    );
    println!("note: {}", cnot.note);
    write_report(&args.out, &report)?;
    Ok(if report.passed() { 0 } else { EXIT_VIOLATION })
}

fn tomo(args: &TomoArgs) -> reality_core::Result<u8> {
    let state = match &args.bloch {
        Some(b) => StateSpec::Bloch {
            bloch: [b[0], b[1], b[2]],
        },
        None => StateSpec::Preset { preset: args.state },
    };
    let report = tomo_sim(&TomoSimConfig {
        state,
        shots: args.shots,
        seed: args.seed,
        noisy: args.noisy,
        repeats: args.repeats,
    })?;
    match &args.out {
        Some(_) => write_report(&args.out, &report)?,
        None => println!("{}", serde_json::to_string_pretty(&report)?),
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Sweep(a) => sweep(a),
        Command::VerifyCases(a) => verify(a),
        Command::CertifyCircuits(a) => certify(a),
        Command::TomoSim(a) => tomo(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
