//! Config-driven experiment runner behind the `kakeya-lab` binary.
//!
//! `kakeya-lab run <config.toml | fixture>` writes `<stem>.json` (the full
//! report) and `<stem>.csv` (`grid,value,aux` rows), plus `<stem>_plot.py`
//! with `--plot`. `kakeya-lab fixtures` lists the bundled configs.
//!
//! The output directory is taken from `--out`, then `KAKEYA_LAB_OUT`, then
//! `output.dir` in the config, then the working directory.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid config, 3 numerical failure.

mod config;
mod experiments;
mod fixtures;
mod report;

use std::ffi::OsString;
use std::fmt;
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

pub use config::{
    BudgetConfig, ConfigError, ExperimentConfig, FamilyConfig, FamilyName, FamilyPlan, GridConfig, Kind,
    OutputConfig, OverlayConfig, Plan, TranslationConfig, TranslationKind,
};
pub use experiments::{execute, Outcome};
pub use fixtures::{fixture, Fixture, FIXTURES};
pub use report::{Columns, Flags, PlotHints, Prediction, Report, Row, CSV_HEADER, SCHEMA_VERSION};

/// Environment variable overriding the configured output directory.
pub const OUT_DIR_ENV: &str = "KAKEYA_LAB_OUT";

#[derive(Debug, Parser)]
#[command(name = "kakeya-lab", version, about = "Fourier decay experiments for restricted Kakeya-type sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one experiment from a config file or a bundled fixture name.
    Run(RunArgs),
    /// List the bundled fixture configs.
    Fixtures,
}

#[derive(Debug, clap::Args)]
struct RunArgs {
    /// Path to a TOML config, or the name of a bundled fixture.
    config: String,
    /// Also write a matplotlib script that plots the rows.
    #[arg(long)]
    plot: bool,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    threads: Option<NonZeroUsize>,
    /// Output directory, overriding the environment and the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Why a run stopped.
#[derive(Debug)]
pub enum RunError {
    Config { source: String, error: ConfigError },
    Numeric(crate::Error),
    Io(String),
}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Io(_) => 1,
            RunError::Config { .. } => 2,
            RunError::Numeric(_) => 3,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config { source, error } => write!(f, "invalid config {source}: {error}"),
            RunError::Numeric(e) => write!(f, "numerical failure: {e}"),
            RunError::Io(e) => write!(f, "i/o failure: {e}"),
        }
    }
}

impl std::error::Error for RunError {}

/// Options for [`run`] beyond the config itself.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub plot: bool,
    pub threads: Option<NonZeroUsize>,
    pub out: Option<PathBuf>,
}

/// Files written by a successful run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: Report,
    pub json_path: PathBuf,
    pub csv_path: PathBuf,
    pub plot_path: Option<PathBuf>,
}

/// Loads a config from a path, falling back to a fixture of that name.
pub fn load(source: &str) -> Result<(ExperimentConfig, String), RunError> {
    let path = Path::new(source);
    let (text, default_stem) = if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| RunError::Io(format!("{source}: {e}")))?;
        let stem = path.file_stem().map_or("report".into(), |s| s.to_string_lossy().into_owned());
        (text, stem)
    } else if let Some(f) = fixture(source) {
        (f.text.to_string(), f.name.to_string())
    } else {
        return Err(RunError::Config {
            source: source.into(),
            error: ConfigError {
                field: None,
                message: "no such file or bundled fixture".into(),
            },
        });
    };
    let config = ExperimentConfig::from_toml_str(&text).map_err(|error| RunError::Config {
        source: source.into(),
        error,
    })?;
    Ok((config, default_stem))
}

/// Runs a parsed config and writes its report files.
pub fn run(config: &ExperimentConfig, default_stem: &str, options: &RunOptions) -> Result<RunOutput, RunError> {
    let plan = config.plan().map_err(|error| RunError::Config {
        source: default_stem.into(),
        error,
    })?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.threads.map_or(0, NonZeroUsize::get))
        .build()
        .map_err(|e| RunError::Io(format!("thread pool: {e}")))?;
    let start = Instant::now();
    let outcome = pool.install(|| execute(&plan, config.seed)).map_err(RunError::Numeric)?;
    let wall_clock_seconds = start.elapsed().as_secs_f64();

    let name = config.output.stem.clone().unwrap_or_else(|| default_stem.to_string());
    let report = Report {
        schema_version: SCHEMA_VERSION,
        library_version: env!("CARGO_PKG_VERSION").into(),
        name: name.clone(),
        kind: config.kind.as_str().into(),
        config: config.clone(),
        columns: outcome.columns,
        rows: outcome.rows,
        results: outcome.results,
        predicted: outcome.predicted,
        flags: outcome.flags,
        plot: outcome.plot,
        wall_clock_seconds,
        threads: pool.current_num_threads(),
    };

    let dir = output_dir(config, options);
    std::fs::create_dir_all(&dir).map_err(|e| RunError::Io(format!("{}: {e}", dir.display())))?;
    let write = |path: &Path, text: &str| {
        std::fs::write(path, text).map_err(|e| RunError::Io(format!("{}: {e}", path.display())))
    };
    let json_path = dir.join(format!("{name}.json"));
    let csv_path = dir.join(format!("{name}.csv"));
    write(&json_path, &report.to_json())?;
    write(&csv_path, &report.to_csv())?;
    let plot_path = if options.plot {
        let p = dir.join(format!("{name}_plot.py"));
        write(&p, &report.plot_script())?;
        Some(p)
    } else {
        None
    };
    Ok(RunOutput {
        report,
        json_path,
        csv_path,
        plot_path,
    })
}

fn output_dir(config: &ExperimentConfig, options: &RunOptions) -> PathBuf {
    options
        .out
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
        .or_else(|| config.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("."))
}

/// Entry point of the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match cli.command {
        Command::Fixtures => {
            let width = FIXTURES.iter().map(|f| f.name.len()).max().unwrap_or(0);
            for f in FIXTURES {
                println!("{:width$}  {}", f.name, f.description());
            }
            ExitCode::SUCCESS
        }
        Command::Run(args) => {
            let options = RunOptions {
                plot: args.plot,
                threads: args.threads,
                out: args.out,
            };
            match load(&args.config).and_then(|(config, stem)| run(&config, &stem, &options)) {
                Ok(out) => {
                    println!("{}", out.json_path.display());
                    println!("{}", out.csv_path.display());
                    if let Some(p) = out.plot_path {
                        println!("{}", p.display());
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("kakeya-lab: {e}");
                    ExitCode::from(e.exit_code())
                }
            }
        }
    }
}
