mod decode_one;
mod gates;
mod grid;
mod simulate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mpgrand_core::ReliabilitySequence;

/// Massively parallel GRAND decoding of 5G NR polar codes over M-QAM.
#[derive(Parser, Debug)]
#[command(name = "mpgrand", version)]
struct Cli {
    /// Reliability sequence file (1024 lines, one bit-channel index per line,
    /// least reliable first). Defaults to the bundled TS 38.212 table.
    #[arg(long, global = true, env = "MPGRAND_SEQUENCE_FILE", value_name = "PATH")]
    sequence_file: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Gate-cost report of the parallel syndrome multiplication per block length.
    Gates(GatesArgs),
    /// Monte Carlo BLER campaign over an Eb/N0 grid.
    Simulate(SimulateArgs),
    /// Encode, transmit and decode one block, printing every decoder stage.
    DecodeOne(DecodeOneArgs),
    /// Validate a reliability sequence file.
    CheckSequence,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct GatesSelection {
    /// Code exponent, N = 2^n.
    #[arg(long, value_parser = clap::value_parser!(u32).range(5..=10))]
    n: Option<u32>,
    /// All block lengths 32 … 1024.
    #[arg(long)]
    all: bool,
}

#[derive(Args, Debug)]
struct GatesArgs {
    #[command(flatten)]
    selection: GatesSelection,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    format: ReportFormat,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Code exponent, N = 2^n.
    #[arg(long, value_parser = clap::value_parser!(u32).range(5..=10))]
    n: u32,
    /// QAM order: 4, 16, 64, 256, 1024 or 4096.
    #[arg(long, value_parser = parse_order)]
    mqam: usize,
    /// Cut-off: number of least reliable symbols searched.
    #[arg(long = "s", default_value_t = mpgrand_core::grand::DEFAULT_CUTOFF)]
    cutoff: usize,
    /// Eb/N0 grid in dB: `start:step:stop` (inclusive) and/or comma-separated values.
    #[arg(long, value_parser = grid::parse_grid, allow_hyphen_values = true)]
    ebn0: grid::Grid,
    /// Trials per grid point.
    #[arg(long, default_value_t = mpgrand_core::sim::DEFAULT_TRIALS, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (0 = one per core). Does not affect results.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Output file; defaults to bler_N{N}_M{M}_S{S}.{csv,json}.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = DataFormat::Csv)]
    format: DataFormat,
}

#[derive(Args, Debug)]
struct DecodeOneArgs {
    /// Code exponent, N = 2^n.
    #[arg(long, value_parser = clap::value_parser!(u32).range(5..=10))]
    n: u32,
    /// QAM order: 4, 16, 64, 256, 1024 or 4096.
    #[arg(long, value_parser = parse_order)]
    mqam: usize,
    /// Cut-off: number of least reliable symbols searched.
    #[arg(long = "s", default_value_t = mpgrand_core::grand::DEFAULT_CUTOFF)]
    cutoff: usize,
    /// Eb/N0 in dB; omit for a noiseless channel.
    #[arg(long, allow_hyphen_values = true)]
    ebn0: Option<f64>,
    /// Transmitted codeword as hex, first bit = MSB of the first digit.
    /// Random when omitted.
    #[arg(long, value_name = "HEX")]
    codeword: Option<String>,
    /// Seed for the info bits and the channel noise.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum DataFormat {
    Csv,
    Json,
}

fn parse_order(s: &str) -> Result<usize, String> {
    let order: usize = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if mpgrand_core::qam::SUPPORTED_ORDERS.contains(&order) {
        Ok(order)
    } else {
        Err(format!("unsupported QAM order {order}; choose one of {:?}", mpgrand_core::qam::SUPPORTED_ORDERS))
    }
}

/// Failure of a subcommand, mapped to the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flag values or combinations (exit 2).
    Usage(String),
    /// Anything that went wrong while doing the work (exit 1).
    Runtime(String),
}

impl From<mpgrand_core::Error> for CliError {
    fn from(e: mpgrand_core::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

fn load_sequence(path: Option<&PathBuf>) -> Result<ReliabilitySequence, CliError> {
    match path {
        None => Ok(ReliabilitySequence::nr()),
        Some(p) if !p.exists() => Err(CliError::Runtime(format!(
            "reliability sequence file {} does not exist; fix --sequence-file / MPGRAND_SEQUENCE_FILE \
             or unset both to use the bundled table",
            p.display()
        ))),
        Some(p) => ReliabilitySequence::from_path(p).map_err(Into::into),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let seq = load_sequence(cli.sequence_file.as_ref())?;
    match cli.command {
        Command::Gates(args) => gates::run(&seq, &args),
        Command::Simulate(args) => simulate::run(&seq, &args),
        Command::DecodeOne(args) => decode_one::run(&seq, &args),
        Command::CheckSequence => {
            let s = seq.as_slice();
            println!(
                "ok: 1024 distinct indices, least reliable {} … most reliable {}",
                s[0],
                s[s.len() - 1]
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
