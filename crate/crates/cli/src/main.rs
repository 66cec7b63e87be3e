use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use finsler_cli::{emit_report, parse_config, run, to_json, ErrorReport, Format, Task};

#[derive(Parser)]
#[command(
    name = "finsler",
    version,
    about = "Invariant Finsler metrics on the classical Cartan domains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate F and the Carathéodory metric at random points and check invariance.
    Eval(#[command(flatten)] Args),
    /// Certify the origin norm and positivity of the fundamental tensor.
    Certify(#[command(flatten)] Args),
    /// Curvature bounds, the Lu constant and sampled curvature.
    Curvature(#[command(flatten)] Args),
    /// Two-sided comparison with the Carathéodory metric.
    Sandwich(#[command(flatten)] Args),
    /// Randomized Schwarz-lemma corpus.
    Schwarz(#[command(flatten)] Args),
}

#[derive(clap::Args)]
struct Args {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, value_enum, default_value_t = OutFormat::Json)]
    format: OutFormat,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy)]
enum OutFormat {
    #[value(alias = "structured")]
    Json,
    #[value(alias = "tabular")]
    Csv,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (task, args) = match cli.command {
        Command::Eval(a) => (Task::Eval, a),
        Command::Certify(a) => (Task::Certify, a),
        Command::Curvature(a) => (Task::Curvature, a),
        Command::Sandwich(a) => (Task::Sandwich, a),
        Command::Schwarz(a) => (Task::Schwarz, a),
    };
    ExitCode::from(execute(task, args) as u8)
}

fn fail(msg: impl std::fmt::Display) -> i32 {
    eprintln!("error: {msg}");
    2
}

fn execute(task: Task, args: Args) -> i32 {
    if let Some(n) = args.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            return fail(e);
        }
    }
    let path = args.config;
    let text = match std::fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) => return fail(format!("{}: {e}", path.display())),
    };
    let mut config = match parse_config(&text, Some(task)) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(samples) = args.samples {
        if samples == 0 {
            return fail("--samples must be positive");
        }
        config.samples = samples;
    }
    let format = match args.format {
        OutFormat::Json => Format::Json,
        OutFormat::Csv => Format::Csv,
    };
    match run(&config) {
        Ok(report) => {
            print!("{}", emit_report(&report, format));
            report.exit_code()
        }
        Err(e) => {
            if format == Format::Json {
                print!("{}", to_json(&ErrorReport::new(&config, &e)));
            }
            fail(e)
        }
    }
}
