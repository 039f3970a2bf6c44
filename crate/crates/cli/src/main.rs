//! `modwalk` command-line front end.

mod commands;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "modwalk", version, about = "Random walks of PSL(2,Z), Minkowski's ? function and their stationary laws")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate seeded trajectories of one of the chains.
    Simulate(SimulateArgs),
    /// Evaluate ?, its inverse, χ_{1/2}, λ or a continued fraction exactly.
    Eval(EvalArgs),
    /// Kolmogorov–Smirnov distance between simulated samples and a reference law.
    KsTest(KsArgs),
    /// Export the ball of the tiling graph around the identity.
    Graph(GraphArgs),
    /// Reduce a point of the upper half plane to the fundamental domain.
    Reduce(ReduceArgs),
    /// Fourier coefficients of stationary ?-samples.
    Fourier(FourierArgs),
    /// Exact law of X_n or W_n by enumeration.
    Enumerate(EnumerateArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Chain {
    #[value(name = "X")]
    X,
    #[value(name = "Y")]
    Y,
    #[value(name = "Z")]
    Z,
    #[value(name = "V")]
    V,
    #[value(name = "W")]
    W,
    #[value(name = "U")]
    U,
    #[value(name = "stationary-W")]
    StationaryW,
    #[value(name = "stationary-Y")]
    StationaryY,
    #[value(name = "stationary-X")]
    StationaryX,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeArg {
    Exact,
    Float,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphFormat {
    Dot,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum TextFormat {
    Text,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalFn {
    Qmark,
    QmarkInverse,
    Chi,
    Lambda,
    Cf,
    Bracket,
}

#[derive(Args, Debug)]
pub struct Output {
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub chain: Chain,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub steps: usize,
    #[arg(long, default_value_t = 1)]
    pub trajectories: usize,
    /// Defaults to exact for boundary chains and float for Z and V.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Start on the boundary or in [0, 1]: "p/q", an integer, or "inf".
    #[arg(long)]
    pub start: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub start_re: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub start_im: Option<String>,
    /// Continued-fraction depth of stationary samples.
    #[arg(long, default_value_t = 64)]
    pub depth: usize,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    pub format: TableFormat,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[arg(long = "fn", value_enum)]
    pub function: EvalFn,
    /// Argument: a rational, or a dyadic for qmark-inverse.
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
    /// Comma-separated partial quotients for bracket.
    #[arg(long)]
    pub prefix: Option<String>,
    #[arg(long, value_enum, default_value_t = TextFormat::Text)]
    pub format: TextFormat,
}

#[derive(Args, Debug)]
pub struct KsArgs {
    #[arg(long, value_enum, default_value_t = Chain::W)]
    pub chain: Chain,
    #[arg(long, default_value_t = 64)]
    pub steps: usize,
    #[arg(long, default_value_t = 100_000)]
    pub trajectories: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "qmark")]
    pub against: String,
    #[arg(long)]
    pub start: Option<String>,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 64)]
    pub depth: usize,
    #[arg(long, default_value_t = 0.01)]
    pub threshold: f64,
}

#[derive(Args, Debug)]
pub struct GraphArgs {
    #[arg(long)]
    pub radius: usize,
    #[arg(long, value_enum, default_value_t = GraphFormat::Dot)]
    pub format: GraphFormat,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct ReduceArgs {
    /// Real and imaginary parts, as rationals or decimals.
    #[arg(long, num_args = 2, value_names = ["RE", "IM"], allow_hyphen_values = true)]
    pub point: Vec<String>,
}

#[derive(Args, Debug)]
pub struct FourierArgs {
    #[arg(long, default_value_t = 64)]
    pub n_max: i64,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 64)]
    pub depth: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct EnumerateArgs {
    #[arg(long, value_enum)]
    pub chain: Chain,
    #[arg(long)]
    pub start: String,
    #[arg(long)]
    pub steps: usize,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    pub format: TableFormat,
}

/// Failure of a command, mapped to the process exit code.
#[derive(Debug)]
pub enum Failure {
    Invalid(String),
    Resource(String),
}

impl From<modwalk::Error> for Failure {
    fn from(e: modwalk::Error) -> Self {
        if e.is_resource() {
            Failure::Resource(e.to_string())
        } else {
            Failure::Invalid(e.to_string())
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Resource(e.to_string())
    }
}

fn emit(output: Option<&Output>, text: &str) -> Result<(), Failure> {
    match output.and_then(|o| o.out.as_ref()) {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn configure_threads() -> Result<(), Failure> {
    if let Ok(v) = std::env::var("MODWALK_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Failure::Invalid(format!("MODWALK_THREADS must be a positive integer, got {v:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Resource(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    match cli.command {
        Command::Simulate(a) => emit(Some(&a.output), &commands::simulate(&a)?),
        Command::Eval(a) => emit(None, &commands::eval(&a)?),
        Command::KsTest(a) => emit(None, &commands::ks_test(&a)?),
        Command::Graph(a) => emit(Some(&a.output), &commands::graph(&a)?),
        Command::Reduce(a) => emit(None, &commands::reduce(&a)?),
        Command::Fourier(a) => emit(Some(&a.output), &commands::fourier(&a)?),
        Command::Enumerate(a) => emit(None, &commands::enumerate(&a)?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Resource(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
