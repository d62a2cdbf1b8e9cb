use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod error;

#[derive(Parser)]
#[command(name = "protosel", version, about = "Prototype selection for process discovery")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Select prototypes, discover a model from them and report its quality.
    Discover(DiscoverArgs),
    /// Score an existing model against a log.
    Evaluate(EvaluateArgs),
    /// Compare prototype selection with frequency, random and no preprocessing.
    Compare(CompareArgs),
    /// Simulate a synthetic log from a base model.
    Gen(GenArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Xes,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MinerId {
    Inductive,
}

#[derive(Args)]
struct LogArgs {
    /// Event log to read.
    #[arg(long = "in", value_name = "PATH")]
    input: PathBuf,
    /// Input format; guessed from the file extension when omitted.
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long, default_value = "case_id", value_name = "COLUMN")]
    case_column: String,
    #[arg(long, default_value = "activity", value_name = "COLUMN")]
    activity_column: String,
    /// Orders events within a case; file order otherwise.
    #[arg(long, value_name = "COLUMN")]
    timestamp_column: Option<String>,
    #[arg(long, default_value_t = ',')]
    delimiter: char,
}

#[derive(Args)]
struct BudgetArgs {
    /// Search states per trace alignment.
    #[arg(long, default_value_t = protosel::petrinet::DEFAULT_STATE_BUDGET)]
    align_budget: usize,
    /// Markings per reachability query in the precision replay.
    #[arg(long, default_value_t = protosel::petrinet::DEFAULT_STATE_BUDGET)]
    lang_budget: usize,
    /// Run on a single thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct SelectArgs {
    /// Clusters per round.
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    beta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Extra randomly seeded K-Medoids runs per clustering.
    #[arg(long, default_value_t = 0)]
    restarts: usize,
    #[arg(long, value_enum, default_value_t = MinerId::Inductive)]
    miner: MinerId,
    #[arg(long, default_value_t = protosel::protoselect::DEFAULT_MAX_ITERATIONS)]
    max_iter: usize,
}

#[derive(Args)]
struct DiscoverArgs {
    #[command(flatten)]
    log: LogArgs,
    #[command(flatten)]
    select: SelectArgs,
    #[command(flatten)]
    budget: BudgetArgs,
    /// Output directory, created if missing.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    /// Also write the variant distance matrix as distance_matrix.csv.
    #[arg(long)]
    dump_matrix: bool,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    log: LogArgs,
    /// PNML file or built-in model name.
    #[arg(long, value_name = "MODEL")]
    model: String,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    beta: f64,
    /// XES file with the prototypes, to report log coverage.
    #[arg(long, value_name = "PATH")]
    prototypes: Option<PathBuf>,
    #[command(flatten)]
    budget: BudgetArgs,
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    log: LogArgs,
    #[command(flatten)]
    select: SelectArgs,
    #[command(flatten)]
    budget: BudgetArgs,
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

#[derive(Args)]
struct GenArgs {
    /// PNML file or built-in model name.
    #[arg(long, value_name = "MODEL")]
    model: String,
    /// Number of traces.
    #[arg(long)]
    n: usize,
    /// Probability that a trace gets insert/delete noise.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output XES file; standard output when omitted.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Discover(args) => commands::discover(&args),
        Command::Evaluate(args) => commands::evaluate(&args),
        Command::Compare(args) => commands::compare(&args),
        Command::Gen(args) => commands::gen(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
