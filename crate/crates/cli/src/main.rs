//! `qotto`: single cycles, sweeps and the self-check suite.
//!
//! Exit codes: 0 success, 1 I/O or internal error (or a failed validation
//! check), 2 configuration error.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qotto_core::config::{load_config, FileConfig};
use qotto_core::engine::CostFunctional;
use qotto_core::sweep::{threads_from_env, write_table, Format, SweepRow};
use qotto_core::validate::run_validation;
use qotto_core::{run_cycle, run_sweep, Error, Mode, TemperaturePreset};

#[derive(Parser)]
#[command(
    name = "qotto",
    version,
    about = "Landau-Zener quantum Otto engine simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one cycle and print its metrics as JSON.
    Run(RunArgs),
    /// Sweep drive time, hot temperature and mode; write a CSV or JSON table.
    Sweep(SweepArgs),
    /// Run the property suite; exits non-zero if any check fails.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct Common {
    /// INI configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output path (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Propagator steps per stroke.
    #[arg(long)]
    steps: Option<usize>,
    /// time-averaged-norm, time-integrated-norm or state-weighted.
    #[arg(long = "cost-functional")]
    cost_functional: Option<CostFunctional>,
    /// Temperature set: paper-sec4 (1.9; 6.45, 8.45 peV) or paper-fig4 (11.94; 40.54, 53.11 peV).
    #[arg(long)]
    preset: Option<TemperaturePreset>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    /// ideal, na or sta.
    #[arg(long)]
    mode: Option<Mode>,
    /// Drive time per unitary stroke, in microseconds.
    #[arg(long = "tau-us")]
    tau_us: Option<f64>,
    /// Hot-bath temperature in peV.
    #[arg(long = "kt-hot")]
    kt_hot: Option<f64>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// csv or json.
    #[arg(long)]
    format: Option<Format>,
    /// Comma-separated modes, overriding the config file.
    #[arg(long, value_delimiter = ',')]
    modes: Option<Vec<Mode>>,
    /// Write one file per hot temperature (requires --out).
    #[arg(long)]
    split: bool,
}

#[derive(Args)]
struct ValidateArgs {
    /// Print the report as JSON.
    #[arg(long)]
    json: bool,
}

enum Failure {
    Config(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Configuration(_) | Error::InvalidArgument(_) | Error::OutOfRange { .. } => {
                Failure::Config(e.to_string())
            }
            Error::NonConvergence { .. } | Error::Contract(_) => Failure::Internal(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Internal(e.to_string())
    }
}

fn load(common: &Common) -> Result<FileConfig, Failure> {
    let mut cfg = match &common.config {
        Some(path) => load_config(path)?,
        None => FileConfig::default(),
    };
    if let Some(preset) = common.preset {
        cfg.engine.kt_cold = preset.cold();
        cfg.engine.kt_hot = preset.hot()[0];
        cfg.sweep = cfg.sweep.with_preset(preset);
    }
    if let Some(n) = common.steps {
        cfg.engine.n_steps = n;
        cfg.sweep.base.n_steps = n;
    }
    if let Some(c) = common.cost_functional {
        cfg.engine.cost_functional = c;
        cfg.sweep.base.cost_functional = c;
    }
    Ok(cfg)
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::Internal(format!("cannot write {}: {e}", path.display())))
}

fn cmd_run(args: RunArgs) -> Result<(), Failure> {
    let cfg = load(&args.common)?;
    let mut engine = cfg.engine;
    if let Some(mode) = args.mode {
        engine.mode = mode;
    }
    if let Some(us) = args.tau_us {
        engine.tau = us / 1e6;
    }
    if let Some(kt) = args.kt_hot {
        engine.kt_hot = kt;
    }
    let metrics = run_cycle(&engine)?;
    let text =
        serde_json::to_string_pretty(&metrics).map_err(|e| Failure::Internal(e.to_string()))?;
    // The config file's `out` key belongs to sweeps.
    match &args.common.out {
        Some(path) => {
            let mut w = create(path)?;
            writeln!(w, "{text}")?;
            w.flush()?;
        }
        None => println!("{text}"),
    }
    Ok(())
}

/// `sweep.csv` → `sweep_kT6.45.csv`.
fn split_path(path: &Path, kt_hot: f64, format: Format) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("sweep");
    path.with_file_name(format!("{stem}_kT{kt_hot}.{}", format.extension()))
}

fn cmd_sweep(args: SweepArgs) -> Result<(), Failure> {
    let mut cfg = load(&args.common)?;
    if let Some(out) = &args.common.out {
        cfg.output.out = Some(out.clone());
    }
    if let Some(format) = args.format {
        cfg.output.format = format;
    }
    if let Some(modes) = args.modes {
        cfg.sweep.modes = modes;
    }
    let split = args.split || cfg.output.split_by_hot;
    if split && cfg.output.out.is_none() {
        return Err(Failure::Config("--split needs an output path".into()));
    }
    let rows = run_sweep(&cfg.sweep, threads_from_env())?;
    let format = cfg.output.format;
    match &cfg.output.out {
        Some(path) if split => {
            let mut temps: Vec<f64> = rows.iter().map(|r| r.kt_hot).collect();
            temps.dedup();
            for kt in temps {
                let part: Vec<SweepRow> = rows.iter().filter(|r| r.kt_hot == kt).cloned().collect();
                let target = split_path(path, kt, format);
                let mut w = create(&target)?;
                write_table(&part, format, &mut w)?;
                w.flush()?;
                eprintln!("{} rows -> {}", part.len(), target.display());
            }
        }
        Some(path) => {
            let mut w = create(path)?;
            write_table(&rows, format, &mut w)?;
            w.flush()?;
            eprintln!("{} rows -> {}", rows.len(), path.display());
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write_table(&rows, format, &mut lock)?;
            lock.flush()?;
        }
    }
    Ok(())
}

fn cmd_validate(args: ValidateArgs) -> Result<bool, Failure> {
    let report = run_validation(threads_from_env())?;
    if args.json {
        let text =
            serde_json::to_string_pretty(&report).map_err(|e| Failure::Internal(e.to_string()))?;
        println!("{text}");
    } else {
        println!("{report}");
    }
    Ok(report.all_passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args).map(|()| true),
        Command::Sweep(args) => cmd_sweep(args).map(|()| true),
        Command::Validate(args) => cmd_validate(args),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Config(msg)) => {
            eprintln!("qotto: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("qotto: error: {msg}");
            ExitCode::from(1)
        }
    }
}
