use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod report;

use report::Report;

#[derive(Parser)]
#[command(
    name = "quasishift",
    version,
    about = "Quasigroups, shifts and their automorphisms"
)]
struct Cli {
    /// Output representation.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Build and verify finite quasigroups.
    #[command(subcommand)]
    Latin(LatinCmd),
    /// Exhaustive certifiers.
    #[command(subcommand)]
    Oracle(OracleCmd),
    /// The rotor shift system and its canonical operation.
    #[command(subcommand)]
    Shift(ShiftCmd),
    /// Factorizations of N avoiding the factors 2 and 6.
    Factorize {
        n: u64,
        /// Only factorizations with at least two factors.
        #[arg(long)]
        nontrivial: bool,
    },
    /// Split a product-shift point into section members.
    Decompose(DecomposeArgs),
    /// The map x -> Mx mod 1 and its weak operation.
    #[command(subcommand)]
    Interval(IntervalCmd),
}

#[derive(Subcommand)]
pub enum LatinCmd {
    /// The quasigroup λ(x + y) mod n for odd n.
    BuildTranslation { n: usize },
    /// An idempotent quasigroup of order n.
    BuildIdempotent { n: usize },
    /// Validate a square in plain-text form (n lines of n integers).
    Verify { file: PathBuf },
}

#[derive(Subcommand)]
pub enum OracleCmd {
    /// Count operation tables with x -> x+1 as automorphism that are Latin.
    Automorphic {
        n: usize,
        /// Include the first rows of all Latin tables found.
        #[arg(long)]
        list: bool,
    },
    /// Count all Latin squares of order n (n <= 5).
    LatinCount { n: usize },
    /// Search for an idempotent Latin square (n <= 12).
    Idempotent { n: usize },
    /// Row and column sums of automorphic tables of even order.
    Sums {
        n: usize,
        /// Explicit first row, comma separated; distinct entries.
        #[arg(long, value_delimiter = ',')]
        a: Option<Vec<usize>>,
        /// Number of random distinct first rows when --a is absent.
        #[arg(long, default_value_t = 1)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Clone)]
pub struct SystemArgs {
    /// Alphabet size N of the shift factor.
    #[arg(long, default_value_t = 3)]
    pub alphabet: usize,
    /// Rotor size B (odd).
    #[arg(long = "rotor-size", default_value_t = 3)]
    pub rotor_size: usize,
    /// Base quasigroup in plain-text square form; defaults to the
    /// translation square (odd N) or the idempotent square (even N).
    #[arg(long = "base-op")]
    pub base_op: Option<PathBuf>,
}

#[derive(Subcommand)]
pub enum ShiftCmd {
    /// Entropy and ergodic period of the system.
    Info {
        #[command(flatten)]
        system: SystemArgs,
    },
    /// Multiply two rotor points.
    Op {
        #[command(flatten)]
        system: SystemArgs,
        /// Digits of u, e.g. "012" or "10,3".
        #[arg(long)]
        u: String,
        #[arg(long = "u-rotor", default_value_t = 0)]
        u_rotor: usize,
        #[arg(long)]
        v: String,
        #[arg(long = "v-rotor", default_value_t = 0)]
        v_rotor: usize,
    },
    /// Check S(u * v) = S(u) * S(v) on random or all small points.
    CheckAutomorphism {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "max-period", default_value_t = quasishift::symbolic::DEFAULT_MAX_PERIOD)]
        max_period: usize,
        /// Also check every pair with sequence period at most this bound.
        #[arg(long)]
        exhaustive: Option<usize>,
    },
}

#[derive(Args)]
pub struct DecomposeArgs {
    /// Factor alphabet sizes, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub factors: Vec<usize>,
    /// The point as a JSON array of digit arrays, one per factor.
    #[arg(long)]
    pub point: String,
    /// Section bases as JSON: for each coordinate k, the digit arrays of the
    /// base points z_{k,j}, j != k. Defaults to constant 0.
    #[arg(long)]
    pub bases: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum OpChoice {
    /// (x + y) mod M
    Sum,
    /// λ(x + y) mod M, odd M
    Translation,
    /// The idempotent square of order M
    Idempotent,
    /// Square read from --op-file
    File,
}

#[derive(Subcommand)]
pub enum IntervalCmd {
    /// Expand x and y in base M, multiply digitwise and check T(x•y) = T(x)•T(y).
    Demo {
        #[arg(long = "base", default_value_t = 10)]
        base: usize,
        /// Rational a/b in (0, 1).
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long, value_enum, default_value_t = OpChoice::Sum)]
        op: OpChoice,
        #[arg(long = "op-file")]
        op_file: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let result = match cli.command {
        Command::Latin(cmd) => commands::latin(cmd),
        Command::Oracle(cmd) => commands::oracle(cmd),
        Command::Shift(cmd) => commands::shift(cmd),
        Command::Factorize { n, nontrivial } => commands::factorize(n, nontrivial),
        Command::Decompose(args) => commands::decompose(args),
        Command::Interval(cmd) => commands::interval(cmd),
    };
    match result {
        Ok(mut report) => {
            report.elapsed_ms = start.elapsed().as_millis() as u64;
            emit(&report, cli.format);
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn emit(report: &Report, format: Format) {
    match format {
        Format::Json => println!("{}", report.to_json()),
        Format::Text => print!("{}", report.to_text()),
    }
}
