use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use experiment::{emit, read_records, run_experiment, validate, ExperimentConfig, OUT_DIR_ENV};

#[derive(Parser)]
#[command(name = "experiment", version, about = "TV deblurring: weight sweep vs continuation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweep and the continuation run, then write CSVs, images and a manifest.
    Run {
        /// JSON configuration; omitted fields take their defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory (overrides the config's `output_dir`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for the sweep.
        #[arg(long)]
        parallel: Option<usize>,
    },
    /// Check emitted records: monotonicity, convexity and subgradient inequality of the
    /// sweep endpoints, plus the tube deviation of the continuation path.
    Validate {
        #[arg(long)]
        records: PathBuf,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        #[arg(long, default_value_t = 0.05)]
        tube_tolerance: f64,
    },
}

fn output_dir(cli: Option<PathBuf>, cfg: &ExperimentConfig) -> PathBuf {
    cli.or_else(|| cfg.output_dir.clone())
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("experiment-out"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            config,
            out,
            parallel,
        } => {
            let result = (|| {
                let cfg = match &config {
                    Some(path) => ExperimentConfig::from_path(path)?,
                    None => ExperimentConfig::default(),
                };
                let dir = output_dir(out, &cfg);
                let output = run_experiment(&cfg, parallel)?;
                let manifest = emit(&cfg, &output, &dir)?;
                Ok::<_, experiment::ExperimentError>((dir, manifest))
            })();
            match result {
                Ok((dir, m)) => {
                    println!("wrote {} files to {}", m.files.len() + 1, dir.display());
                    println!(
                        "work: sweep {} runs / {} iterations, continuation {} iterations",
                        m.work.sweep_runs, m.work.sweep_iterations, m.work.continuation_iterations
                    );
                    if let Some(t) = m.tube {
                        println!(
                            "tube deviation: {:.4} (at n = {}, {} points)",
                            t.max_deviation, t.worst_n, t.points_checked
                        );
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
        Command::Validate {
            records,
            tol,
            tube_tolerance,
        } => match read_records(&records) {
            Ok(recs) => {
                let report = validate(
                    &recs.endpoints(),
                    recs.continuation.as_deref(),
                    tol,
                    Some(tube_tolerance),
                );
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report).expect("report serializes")
                );
                if report.passed() {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(2)
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        },
    }
}
