use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use classcoupler::config::{ModelConfig, PRESET_NAMES};
use classcoupler::driver::{run_and_summarize, BuiltModel, RunOptions, RunOutput};
use classcoupler::error::Result;

/// Exact posterior draws for point-null tests via backward-coupled
/// Metropolis-Hastings. Every draw is an independent sample from the exact
/// posterior: no burn-in, no convergence diagnostics, at the price of a
/// random amount of work per draw.
#[derive(Parser)]
#[command(name = "classcoupler", version, about, long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw samples and emit a summary (json) or per-draw table (csv).
    Run(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Built-in model: sim1, sim2, two-sample-case1/2/3, imh-demo.
    #[arg(long, value_name = "NAME", conflicts_with = "config")]
    preset: Option<String>,
    /// Path to a model configuration JSON.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Number of independent draws.
    #[arg(long, default_value_t = 10_000)]
    draws: u64,
    /// Master seed; per-draw seeds derive from it and the draw index.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Abandon a draw whose backward search passes this horizon.
    #[arg(long, default_value_t = 1 << 22)]
    max_horizon: u64,
    /// Worker threads. Never changes the results, only the wall clock.
    #[arg(long, default_value_t = default_workers())]
    workers: usize,
    /// Histogram bins in the json summary; 0 disables histograms.
    #[arg(long, default_value_t = 0)]
    bins: usize,
    /// Output path; stdout when omitted.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// json: summary document. csv: one row per draw.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run(args) => match run(&args) {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("error: {e}");
                1
            }
        },
    };
    std::process::exit(code);
}

fn run(args: &RunArgs) -> Result<()> {
    let config = match (&args.preset, &args.config) {
        (Some(name), None) => ModelConfig::preset(name)?,
        (None, Some(path)) => ModelConfig::from_path(path)?,
        _ => {
            return Err(classcoupler::Error::Config(format!(
                "pass exactly one of --preset or --config; presets: {}",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    let model = config.build()?;
    let opts = RunOptions {
        draws: args.draws,
        seed: args.seed,
        max_horizon: args.max_horizon,
        workers: args.workers,
        bins: args.bins,
    };
    let started = Instant::now();
    let (report, output) = run_and_summarize(&model, &opts)?;
    let elapsed = started.elapsed().as_secs_f64();
    eprintln!(
        "{}: {} draws in {elapsed:.2}s on {} workers",
        model.kind_name(),
        output.outcomes.len(),
        opts.workers
    );
    if !output.horizon_exceeded.is_empty() {
        eprintln!(
            "warning: {} draws hit the horizon cap {} and were dropped",
            output.horizon_exceeded.len(),
            opts.max_horizon
        );
    }

    let body = match args.format {
        Format::Json => {
            let document = serde_json::json!({
                "model": model.kind_name(),
                "model_config": config,
                "options": opts,
                "report": report,
            });
            let mut text =
                serde_json::to_string_pretty(&document).expect("report serializes");
            text.push('\n');
            text
        }
        Format::Csv => render_csv(&model, &output),
    };
    match &args.out {
        Some(path) => {
            std::fs::write(path, body).map_err(|e| {
                classcoupler::Error::Config(format!("write {}: {e}", path.display()))
            })?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(body.as_bytes())
                .and_then(|()| lock.flush())
                .map_err(|e| classcoupler::Error::Config(format!("write stdout: {e}")))?;
        }
    }
    Ok(())
}

fn render_csv(model: &BuiltModel, output: &RunOutput) -> String {
    let mut text = String::from("draw_index,bct,mh_steps");
    for name in model.column_names() {
        text.push(',');
        text.push_str(name);
    }
    text.push('\n');
    for o in &output.outcomes {
        text.push_str(&format!("{},{},{}", o.index, o.bct, o.mh_steps));
        for v in model.column_values(&o.state) {
            text.push_str(&format!(",{v}"));
        }
        text.push('\n');
    }
    text
}
