mod commands;
mod config;
mod output;
mod sumset;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::output::Format;

pub const THREADS_VAR: &str = "POLYDIST_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "polydist",
    version,
    about = "Distance sets of well-distributed point sets under polygonal norms",
    args_override_self = true
)]
pub struct Cli {
    /// TOML or JSON file naming a `command` and its options; flags on the command line win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output format of the primary result.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the primary result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Bits of working precision beyond which an undecided sign is an error.
    #[arg(long, global = true)]
    precision_cap: Option<u32>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Inspect and check polygonal norms.
    Norm(NormArgs),
    /// Enumerate and verify the model set T(C).
    Modelset(ModelsetArgs),
    /// Distance sets and growth scans.
    Distset(DistsetArgs),
    /// Staged polygon construction.
    Construct(ConstructArgs),
    /// Sumset cardinalities and decompositions.
    Sumset(SumsetArgs),
    /// Run the acceptance checks.
    Repro(ReproArgs),
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
pub struct NormArgs {
    #[arg(value_enum, default_value = "show")]
    pub action: NormAction,
    /// Preset name or polygon file.
    #[arg(long, default_value = "linf")]
    pub norm: String,
    /// First coordinate for `eval`, as comma-separated power-basis coordinates.
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
    /// Second coordinate for `eval`.
    #[arg(long, allow_hyphen_values = true)]
    pub y: Option<String>,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 2003)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum NormAction {
    List,
    Show,
    Eval,
    Check,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
pub struct ModelsetArgs {
    #[arg(value_enum, default_value = "verify")]
    pub action: ModelsetAction,
    /// Field preset name or field file.
    #[arg(long, default_value = "sqrt2")]
    pub field: String,
    /// Band constant; the smallest admissible integer when omitted.
    #[arg(long = "C")]
    pub c: Option<String>,
    /// Window radius.
    #[arg(long = "R", default_value = "100")]
    pub r: String,
    #[arg(long, default_value_t = polydist::modelset::DEFAULT_BUDGET)]
    pub budget: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModelsetAction {
    Enumerate,
    Verify,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
pub struct DistsetArgs {
    /// Preset name or polygon file.
    #[arg(long, default_value = "linf")]
    pub norm: String,
    /// `z2`, `modelset`, or a set file with planar points.
    #[arg(long, default_value = "z2")]
    pub set: String,
    /// Strictly increasing thresholds, comma-separated.
    #[arg(long)]
    pub schedule: Option<String>,
    #[arg(long, value_enum, default_value = "threshold")]
    pub mode: ModeArg,
    /// Band constant of the model set; the smallest admissible integer when omitted.
    #[arg(long = "C")]
    pub c: Option<String>,
    /// Fixed window radius of the model set; chosen per threshold when omitted.
    #[arg(long = "R")]
    pub r: Option<String>,
    /// Cap on the number of difference vectors examined.
    #[arg(long)]
    pub max_pairs: Option<u64>,
    /// Also check that every per-facet rescaled distance lies in T(C').
    #[arg(long)]
    pub closure: bool,
    /// Emit the distances at the last threshold instead of the counts.
    #[arg(long)]
    pub values: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    Threshold,
    Ball,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
pub struct ConstructArgs {
    /// Stage to build.
    #[arg(long, default_value_t = 1)]
    pub stages: usize,
    /// Increasing thresholds `N_1, N_2, ...`, at least one per stage (plus one to check the last stage).
    #[arg(long)]
    pub schedule: Option<String>,
    /// Write the build log here.
    #[arg(long)]
    pub log: Option<PathBuf>,
    /// Check the counting bound at this threshold.
    #[arg(long)]
    pub check: Option<u64>,
    /// Upper limit on primes tried per cut.
    #[arg(long)]
    pub max_primes: Option<usize>,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
pub struct SumsetArgs {
    #[arg(value_enum)]
    pub verb: SumsetVerb,
    /// JSON instance with `ring`, sets `a`, `b`, dilations, `k`, and `depth`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Sizes for `growth-scan`.
    #[arg(long, default_value = "4,8,16,32,64,128")]
    pub sizes: String,
    /// Smallest size from which the growth-scan minimum must not decrease.
    #[arg(long, default_value_t = 4)]
    pub monotone_from: usize,
    /// Seed for `suites`.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SumsetVerb {
    CheckRuzsa,
    Decompose,
    Iterate,
    DimCheck,
    GrowthScan,
    Suites,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
pub struct ReproArgs {
    /// Criteria to run, comma-separated; all of them when omitted.
    #[arg(long)]
    pub criterion: Option<String>,
}

/// Whether the command's own checks passed.
pub struct Outcome {
    pub pass: bool,
}

#[derive(Debug)]
pub enum CliError {
    Lib(polydist::Error),
    Config(String),
}

impl From<polydist::Error> for CliError {
    fn from(e: polydist::Error) -> Self {
        CliError::Lib(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Config(m) => write!(f, "{m}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use polydist::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Lib(e) => match e {
                E::Budget(_) | E::SearchExhausted(_) | E::PrecisionCap(_) => 3,
                E::Internal(_) | E::RootCertification => 1,
                _ => 2,
            },
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("{THREADS_VAR} must be a positive integer, got {v:?}")))?;
    polydist::exec::configure_threads(n);
    Ok(())
}

fn run(raw: Vec<OsString>) -> Result<Outcome, CliError> {
    let cli = config::resolve(raw)?;
    configure_threads()?;
    if let Some(bits) = cli.precision_cap {
        polydist::exactnum::set_precision_cap(bits)?;
    }
    let out = output::Sink::new(cli.out.clone(), cli.format.unwrap_or(Format::Csv));
    let Some(command) = cli.command else {
        return Err(CliError::Config("no command given; see --help".into()));
    };
    match command {
        Command::Norm(a) => commands::norm(&a, &out),
        Command::Modelset(a) => commands::modelset(&a, &out),
        Command::Distset(a) => commands::distset(&a, &out),
        Command::Construct(a) => commands::construct(&a, &out),
        Command::Sumset(a) => sumset::run(&a, &out),
        Command::Repro(a) => commands::repro(&a, &out),
    }
}

fn main() -> ExitCode {
    match run(std::env::args_os().collect()) {
        Ok(o) if o.pass => ExitCode::SUCCESS,
        Ok(_) => {
            eprintln!("polydist: FAIL");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("polydist: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
