use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use typ3::cli::{self, OutputFormat, RunConfig};
use typ3::engine::SsType;
use typ3::ingest::{parse_levels, IngestConfig};

#[derive(Parser)]
#[command(name = "typ3", version, about = "Type I/II/III sums of squares for factorial models")]
#[command(args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    analyze: AnalyzeArgs,
}

#[derive(Subcommand)]
enum Command {
    /// Run the randomized engine-versus-oracle suite.
    Verify {
        #[arg(long, default_value_t = 20240601)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        count: u64,
        #[arg(long, hide = true)]
        inject_perturbation: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TypeArg {
    #[value(name = "I")]
    One,
    #[value(name = "II")]
    Two,
    #[value(name = "III")]
    Three,
    #[value(name = "all")]
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// CSV file with a header row.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    response: Option<String>,
    /// Comma-separated factor columns.
    #[arg(long, value_delimiter = ',')]
    factors: Vec<String>,
    /// Comma-separated covariate columns.
    #[arg(long, value_delimiter = ',')]
    covariates: Vec<String>,
    /// Model formula, e.g. "y ~ A*B".
    #[arg(long)]
    model: Option<String>,
    #[arg(long = "type", value_enum, value_delimiter = ',', default_value = "III")]
    types: Vec<TypeArg>,
    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,
    /// Relative rank tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Print contrast coefficients as decimals.
    #[arg(long)]
    no_rationalize: bool,
    /// Level order for a factor, e.g. "dose=low,mid,high". Repeatable.
    #[arg(long = "levels")]
    levels: Vec<String>,
}

fn emit(outcome: cli::Outcome) -> ExitCode {
    let _ = std::io::stdout().write_all(outcome.stdout.as_bytes());
    let _ = std::io::stderr().write_all(outcome.stderr.as_bytes());
    ExitCode::from(outcome.code as u8)
}

fn input_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(cli::EXIT_INPUT as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(Command::Verify {
        seed,
        count,
        inject_perturbation,
    }) = cli.command
    {
        return emit(cli::verify(seed, count, inject_perturbation));
    }
    let a = cli.analyze;
    let (Some(data), Some(response), Some(model)) = (a.data, a.response, a.model) else {
        return input_error("--data, --response and --model are required");
    };
    let mut levels = Vec::new();
    for l in &a.levels {
        match parse_levels(l) {
            Ok(v) => levels.push(v),
            Err(e) => return input_error(&e.to_string()),
        }
    }
    let mut types: Vec<SsType> = Vec::new();
    for t in a.types {
        match t {
            TypeArg::One => types.push(SsType::I),
            TypeArg::Two => types.push(SsType::II),
            TypeArg::Three => types.push(SsType::III),
            TypeArg::All => types.extend(SsType::ALL),
        }
    }
    let ingest_cfg = IngestConfig {
        data,
        response,
        factors: a.factors,
        covariates: a.covariates,
        levels,
    };
    let run_cfg = RunConfig {
        formula: model,
        types,
        tol: a.tol,
        format: match a.format {
            FormatArg::Text => OutputFormat::Text,
            FormatArg::Json => OutputFormat::Json,
        },
        rationalize: !a.no_rationalize,
    };
    emit(cli::run(&ingest_cfg, &run_cfg))
}
