//! `normbench` — measure how normalization choices affect a recurrent
//! forecaster on daily OHLC data.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use normbench_cli::checks;
use normbench_cli::csv_io;
use normbench_cli::experiment::{run_experiment, DatasetSource, ExperimentConfig};
use normbench_cli::report::{emit_report, ReportFormat};
use normbench_core::scale::Method;
use normbench_core::series::synth_ohlc;

#[derive(Parser)]
#[command(
    name = "normbench",
    about = "Benchmark data-normalization methods for recurrent time-series forecasting",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full sweep and write report files.
    Run(RunArgs),
    /// Generate a synthetic OHLC CSV.
    Synth(SynthArgs),
    /// Check backpropagation-through-time gradients against finite differences.
    Gradcheck(GradcheckArgs),
    /// Check the scalers against direct formula evaluation and round trips.
    Normcheck(NormcheckArgs),
}

#[derive(Args)]
struct RunArgs {
    /// OHLC CSV file; repeat for several datasets.
    #[arg(long = "data", value_name = "PATH")]
    data: Vec<PathBuf>,

    /// Use the synthetic generator instead of (or alongside) CSV files.
    #[arg(long)]
    synthetic: bool,

    /// Seed for the synthetic generator.
    #[arg(long, default_value_t = 7)]
    seed: u64,

    /// Length of a synthetic dataset; repeat for several.
    #[arg(long = "n", value_name = "ROWS")]
    lengths: Vec<usize>,

    /// Normalization methods to sweep (default: all six).
    #[arg(long, value_delimiter = ',', value_parser = parse_method)]
    methods: Vec<Method>,

    /// Hidden layer sizes, e.g. `20` or `16,8`.
    #[arg(long, value_delimiter = ',', default_values_t = vec![20usize])]
    hidden: Vec<usize>,

    /// Input window length in days.
    #[arg(long, default_value_t = 10)]
    window: usize,

    /// Forecast horizon: 0 predicts the window's last close, 1 the next day's.
    #[arg(long, default_value_t = 0)]
    horizon: usize,

    #[arg(long, default_value_t = 0.70)]
    train_frac: f64,

    #[arg(long, default_value_t = 0.15)]
    val_frac: f64,

    #[arg(long, default_value_t = 0.01)]
    learning_rate: f64,

    #[arg(long, default_value_t = 100)]
    epochs: usize,

    /// Early-stopping patience in epochs without validation improvement.
    #[arg(long, default_value_t = 10)]
    patience: usize,

    /// Keep the epoch sample order fixed instead of shuffling.
    #[arg(long)]
    no_shuffle: bool,

    /// Training seeds; one cell per (dataset, method, seed).
    #[arg(long, value_delimiter = ',', default_values_t = vec![1u64])]
    seeds: Vec<u64>,

    /// Output directory for report.json, tables.md, and prediction CSVs.
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 7)]
    seed: u64,

    /// Number of rows.
    #[arg(long, default_value_t = 493)]
    n: usize,

    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GradcheckArgs {
    /// Number of randomized models to test.
    #[arg(long, default_value_t = 20)]
    trials: usize,

    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
struct NormcheckArgs {
    /// Random inputs per method.
    #[arg(long, default_value_t = 1000)]
    cases: usize,

    #[arg(long, default_value_t = 42)]
    seed: u64,
}

fn parse_method(value: &str) -> Result<Method, String> {
    Method::from_id(value).ok_or_else(|| {
        let known: Vec<&str> = Method::ALL.iter().map(|m| m.id()).collect();
        format!("unknown method '{value}' (known: {})", known.join(", "))
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<(), String> {
    match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Synth(args) => cmd_synth(args),
        Command::Gradcheck(args) => {
            let report = checks::run_grad_checks(args.trials, args.seed);
            println!("{report}");
            if report.passed() {
                Ok(())
            } else {
                Err("gradient check failed".into())
            }
        }
        Command::Normcheck(args) => {
            let report = checks::run_norm_checks(args.cases, args.seed);
            println!("{report}");
            if report.passed() {
                Ok(())
            } else {
                Err("normalization check failed".into())
            }
        }
    }
}

fn cmd_run(args: RunArgs) -> Result<(), String> {
    let mut datasets: Vec<DatasetSource> = args
        .data
        .iter()
        .map(|p| DatasetSource::Csv { path: p.display().to_string() })
        .collect();
    if args.synthetic || datasets.is_empty() {
        let lengths = if args.lengths.is_empty() { vec![493] } else { args.lengths.clone() };
        for (i, length) in lengths.into_iter().enumerate() {
            datasets.push(DatasetSource::Synthetic { seed: args.seed + i as u64, length });
        }
    }

    let config = ExperimentConfig {
        datasets,
        methods: if args.methods.is_empty() { Method::ALL.to_vec() } else { args.methods },
        hidden_dims: args.hidden,
        window_len: args.window,
        horizon: args.horizon,
        train_frac: args.train_frac,
        val_frac: args.val_frac,
        learning_rate: args.learning_rate,
        epochs: args.epochs,
        early_stop_patience: args.patience,
        shuffle: !args.no_shuffle,
        seeds: args.seeds,
    };

    let report = run_experiment(&config).map_err(|e| e.to_string())?;
    for format in [ReportFormat::Json, ReportFormat::Markdown, ReportFormat::Csv] {
        emit_report(&report, format, &args.out).map_err(|e| e.to_string())?;
    }

    for summary in &report.summaries {
        match &summary.median_normalized {
            Some(errors) => println!(
                "{:<14} {:<15} mse {:.4e}  mae {:.4e}  ({}/{} seeds)",
                summary.dataset,
                summary.method.name(),
                errors.mse,
                errors.mae,
                summary.seeds_completed,
                summary.seeds_requested,
            ),
            None => println!(
                "{:<14} {:<15} failed on all {} seed(s)",
                summary.dataset,
                summary.method.name(),
                summary.seeds_requested,
            ),
        }
    }
    println!("report written to {}", args.out.display());
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> Result<(), String> {
    if args.n == 0 {
        return Err("--n must be at least 1".into());
    }
    let table = synth_ohlc(args.seed, args.n);
    let csv = csv_io::to_csv_string(&table);
    match args.out {
        Some(path) => {
            std::fs::write(&path, csv)
                .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            println!("wrote {} rows to {}", args.n, path.display());
        }
        None => print!("{csv}"),
    }
    Ok(())
}
