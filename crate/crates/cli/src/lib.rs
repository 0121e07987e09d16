//! Figure and sweep data generation for the `ep-coupler` binary.
//!
//! Every subcommand produces a set of named [`CurveTable`]s; [`write_output`]
//! then stores them under the output directory together with a
//! `<command>.run.toml` sidecar holding the non-deterministic run details.

mod figures;
pub mod sweep;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use ep_coupler::table::CurveTable;

pub use figures::{fig2, fig3, fig4, fig5};

#[derive(Debug, Parser)]
#[command(
    name = "ep-coupler",
    version,
    about = "Lossy two-waveguide coupler: figure data and parameter sweeps"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Classical power decay for gamma/kappa in {0.5, 2, 10}
    Fig2(FigArgs),
    /// Two-photon survival of the indistinguishable input
    Fig3(FigArgs),
    /// Entangled-input survival versus z (panel a) and versus gamma (panel b)
    Fig4(FigArgs),
    /// Exact lattice survival against the Markovian law
    Fig5(FigArgs),
    /// Cartesian parameter sweep read from a TOML file
    Sweep(SweepArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Fig2(_) => "fig2",
            Command::Fig3(_) => "fig3",
            Command::Fig4(_) => "fig4",
            Command::Fig5(_) => "fig5",
            Command::Sweep(_) => "sweep",
        }
    }

    pub fn out_dir(&self) -> &Path {
        match self {
            Command::Fig2(a) | Command::Fig3(a) | Command::Fig4(a) | Command::Fig5(a) => &a.out,
            Command::Sweep(a) => &a.out,
        }
    }
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct FigArgs {
    /// Output directory
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Number of z samples
    #[arg(long)]
    pub points: Option<usize>,
    /// Largest propagation distance
    #[arg(long)]
    pub zmax: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub kappa: f64,
    /// Use this single loss rate instead of the default set
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub beta1: f64,
    #[arg(long, default_value_t = 0.0)]
    pub beta2: f64,
    /// Use this single entanglement phase instead of the default set
    #[arg(long)]
    pub phi: Option<f64>,
    /// Lattice hopping rate
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Use this single guide-lattice coupling instead of the default set
    #[arg(long)]
    pub rho: Option<f64>,
    /// Lattice size (default: enough to avoid recurrences up to zmax)
    #[arg(long)]
    pub nsites: Option<usize>,
}

impl Default for FigArgs {
    fn default() -> Self {
        Self {
            out: PathBuf::from("out"),
            points: None,
            zmax: None,
            kappa: 1.0,
            gamma: None,
            beta1: 0.0,
            beta2: 0.0,
            phi: None,
            sigma: None,
            rho: None,
            nsites: None,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Io { .. } => 2,
        }
    }

    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(msg) => write!(f, "{msg}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ep_coupler::Error> for CliError {
    fn from(e: ep_coupler::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

/// Tables produced by one command, keyed by file name.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub command: &'static str,
    pub files: Vec<(String, CurveTable)>,
}

pub fn run(command: &Command) -> Result<Output> {
    let files = match command {
        Command::Fig2(a) => fig2(a)?,
        Command::Fig3(a) => fig3(a)?,
        Command::Fig4(a) => fig4(a)?,
        Command::Fig5(a) => fig5(a)?,
        Command::Sweep(a) => {
            let text = fs::read_to_string(&a.config).map_err(|e| CliError::io(&a.config, e))?;
            let config = sweep::SweepConfig::from_toml(&text)?;
            vec![("sweep.csv".to_string(), sweep::run(&config)?)]
        }
    };
    Ok(Output {
        command: command.name(),
        files,
    })
}

/// Writes every table plus the run sidecar; returns the paths written.
pub fn write_output(
    dir: &Path,
    output: &Output,
    args: &[String],
    elapsed: Duration,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut written = Vec::new();
    for (name, table) in &output.files {
        let path = dir.join(name);
        fs::write(&path, table.to_csv_string()).map_err(|e| CliError::io(&path, e))?;
        written.push(path);
    }
    let sidecar = dir.join(format!("{}.run.toml", output.command));
    fs::write(&sidecar, run_metadata(output, args, elapsed))
        .map_err(|e| CliError::io(&sidecar, e))?;
    written.push(sidecar);
    Ok(written)
}

fn run_metadata(output: &Output, args: &[String], elapsed: Duration) -> String {
    let unix = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let mut table = toml::Table::new();
    table.insert("command".into(), output.command.into());
    table.insert("version".into(), env!("CARGO_PKG_VERSION").into());
    table.insert(
        "args".into(),
        toml::Value::Array(args.iter().map(|a| a.as_str().into()).collect()),
    );
    table.insert(
        "files".into(),
        toml::Value::Array(
            output
                .files
                .iter()
                .map(|(n, _)| n.as_str().into())
                .collect(),
        ),
    );
    table.insert("unix_time".into(), (unix as i64).into());
    table.insert("elapsed_seconds".into(), elapsed.as_secs_f64().into());
    table.to_string()
}

/// Shortest round-trip text for `x`, used in metadata and file names.
pub(crate) fn num(x: f64) -> String {
    format!("{x}")
}
