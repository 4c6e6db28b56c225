//! `bearing`: rigidity analysis, localization and formation simulation for
//! bearing networks.

mod commands;
mod error;
mod files;
mod output;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bearing_core::sim::{Method, SimConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{CliError, EXIT_INPUT};
use crate::output::Format;
use crate::report::RunReport;

#[derive(Debug, Parser)]
#[command(name = "bearing", version, about = "Bearing rigidity, localization and formation control")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Directory for the report and any tables or graph files.
    #[arg(long, global = true, default_value = "out")]
    pub output_dir: PathBuf,
    /// Trajectory table format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Integration step.
    #[arg(long, global = true)]
    pub dt: Option<f64>,
    /// Simulation horizon.
    #[arg(long = "T", global = true, value_name = "T")]
    pub horizon: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub method: Option<MethodArg>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Keep every k-th step in the trajectory table.
    #[arg(long, global = true)]
    pub record_every: Option<usize>,
    /// Stop an autonomous run once the vector field norm falls below this.
    #[arg(long, global = true)]
    pub eps_conv: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Euler,
    Rk4,
}

impl Common {
    pub fn sim_config(&self) -> Result<SimConfig, CliError> {
        let mut cfg = SimConfig { seed: self.seed, ..SimConfig::default() };
        if let Some(dt) = self.dt {
            cfg.dt = dt;
        }
        if let Some(t) = self.horizon {
            cfg.horizon = t;
        }
        if let Some(m) = self.method {
            cfg.method = match m {
                MethodArg::Euler => Method::Euler,
                MethodArg::Rk4 => Method::Rk4,
            };
        }
        if let Some(k) = self.record_every {
            cfg.record_every = k;
        }
        if let Some(e) = self.eps_conv {
            cfg.eps_conv = e;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Rank-based rigidity verdicts for a network file.
    Analyze(commands::analyze::AnalyzeArgs),
    /// Estimate follower positions from anchors and bearings.
    Localize(commands::localize::LocalizeArgs),
    /// Simulate a formation control law toward target bearings.
    Formation(commands::formation::FormationArgs),
    /// Build Henneberg graphs or test the Laman condition.
    Construct(commands::construct::ConstructArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Analyze(_) => "analyze",
            Command::Localize(_) => "localize",
            Command::Formation(_) => "formation",
            Command::Construct(_) => "construct",
        }
    }
}

/// Shared state of one invocation.
pub struct Run {
    pub common: Common,
    pub report: RunReport,
}

impl Run {
    pub fn load(&mut self, path: &Path) -> Result<files::NetworkFile, CliError> {
        let (file, bytes) = files::NetworkFile::read(path)?;
        self.report.add_input(path, &bytes);
        Ok(file)
    }

    pub fn out(&self, name: &str) -> PathBuf {
        self.common.output_dir.join(name)
    }

    pub fn write(&mut self, name: &str, text: &str) -> Result<(), CliError> {
        let path = self.out(name);
        std::fs::write(&path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        self.report.add_output(&path);
        Ok(())
    }
}

fn execute(cmd: &Command, run: &mut Run) -> Result<(), CliError> {
    std::fs::create_dir_all(&run.common.output_dir).map_err(|e| {
        CliError::Io(format!("cannot create {}: {e}", run.common.output_dir.display()))
    })?;
    match cmd {
        Command::Analyze(a) => commands::analyze::run(a, run),
        Command::Localize(a) => commands::localize::run(a, run),
        Command::Formation(a) => commands::formation::run(a, run),
        Command::Construct(a) => commands::construct::run(a, run),
    }
}

/// Best-effort `--output-dir` lookup for arguments clap rejected.
fn raw_output_dir(args: &[String]) -> PathBuf {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--output-dir" {
            if let Some(v) = it.next() {
                return PathBuf::from(v);
            }
        } else if let Some(v) = a.strip_prefix("--output-dir=") {
            return PathBuf::from(v);
        }
    }
    PathBuf::from("out")
}

fn finish(report: &RunReport, dir: &Path) -> ExitCode {
    if std::fs::create_dir_all(dir).is_ok() {
        match report.write(dir) {
            Ok(path) => eprintln!("report: {}", path.display()),
            Err(e) => eprintln!("error: {e}"),
        }
    } else {
        eprintln!("error: cannot create {}", dir.display());
    }
    ExitCode::from(report.exit_code as u8)
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            let command = args.get(1).cloned().unwrap_or_default();
            let mut report = RunReport::new(&command, args[1..].to_vec());
            report.fail(&CliError::Usage(e.to_string().trim().to_string()));
            report.exit_code = EXIT_INPUT;
            return finish(&report, &raw_output_dir(&args));
        }
    };
    let report = RunReport::new(cli.command.name(), args[1..].to_vec());
    let mut run = Run { common: cli.common.clone(), report };
    if let Err(e) = execute(&cli.command, &mut run) {
        eprintln!("error: {e}");
        run.report.fail(&e);
    }
    finish(&run.report, &run.common.output_dir)
}
