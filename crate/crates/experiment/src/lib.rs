//! Desk-scale TV deblurring experiment.
//!
//! A fixed-weight sweep over a log grid of `μ` values is compared with a single
//! continuation run that walks the same `μ` range. Both produce per-iteration records of
//! `(g, h(Au), f)`, which trace the Pareto frontier.

pub mod config;
pub mod frontier;
pub mod instance;
pub mod pgm;

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use pdcont::continuation::Schedule;
use pdcont::solver::{
    read_trajectory_csv, run, run_baseline, IterateState, IterationRecord, RunOptions,
    Trajectory,
};
use rayon::prelude::*;
use serde::Serialize;

pub use config::{ExperimentConfig, KernelConfig, MuGrid};
pub use frontier::{tube_deviation, validate, TubeDeviation, ValidationReport};
pub use instance::{make_instance, Instance, LAMBDA};

/// Output directory used when neither the CLI nor the config names one.
pub const OUT_DIR_ENV: &str = "EXPERIMENT_OUT_DIR";

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Core(#[from] pdcont::Error),
    #[error("{path}: {source}")]
    Path {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("PGM: {0}")]
    Pgm(String),
    #[error("records: {0}")]
    Records(String),
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl ExperimentError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        ExperimentError::Path {
            path: path.to_path_buf(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, ExperimentError>;

fn record_every_iteration(iters: usize, initial: Option<IterateState>) -> RunOptions {
    RunOptions {
        max_iters: iters,
        // fixed iteration budget
        tol: f64::MIN_POSITIVE,
        snapshot_every: 0,
        initial,
        ..Default::default()
    }
}

/// Fixed-weight runs from `(0, 0)`, one per grid value, in grid order.
///
/// `parallel` caps the worker threads; `None` uses rayon's default.
pub fn run_sweep(
    cfg: &ExperimentConfig,
    inst: &Instance,
    parallel: Option<usize>,
) -> Result<Vec<Trajectory>> {
    let steps = inst.step_sizes(cfg)?;
    let mus = cfg.mu_grid.values();
    let one = |mu: &f64| -> Result<Trajectory> {
        let p = inst.problem(*mu)?;
        Ok(run_baseline(&p, &steps, &record_every_iteration(cfg.iters_per_run, None))?)
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallel.unwrap_or(0))
        .build()?;
    pool.install(|| mus.par_iter().map(one).collect())
}

/// One continuation run warm-started from `warm_start` (the largest-`μ` sweep result).
pub fn run_continuation(
    cfg: &ExperimentConfig,
    inst: &Instance,
    warm_start: &IterateState,
) -> Result<Trajectory> {
    let mu_seq = cfg.continuation_schedule()?;
    let p = inst.problem(mu_seq.target())?;
    let schedule = Schedule::mu_only(LAMBDA, mu_seq)?;
    let steps = inst.step_sizes(cfg)?;
    Ok(run(
        &p,
        &schedule,
        &steps,
        &record_every_iteration(cfg.iters_per_run, Some(warm_start.clone())),
    )?)
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub instance: Instance,
    pub sweep: Vec<Trajectory>,
    pub continuation: Trajectory,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WorkAccounting {
    pub sweep_runs: usize,
    pub sweep_iterations: usize,
    /// Warm-start run plus the continuation run.
    pub continuation_iterations: usize,
}

impl ExperimentOutput {
    pub fn endpoints(&self) -> Vec<IterationRecord> {
        self.sweep
            .iter()
            .filter_map(|t| t.last_record().copied())
            .collect()
    }

    pub fn work(&self) -> WorkAccounting {
        WorkAccounting {
            sweep_runs: self.sweep.len(),
            sweep_iterations: self.sweep.iter().map(Trajectory::iterations).sum(),
            continuation_iterations: self.continuation.final_state.n,
        }
    }

    pub fn tube(&self) -> Option<TubeDeviation> {
        tube_deviation(&self.endpoints(), &self.continuation.records)
    }
}

/// Builds the instance, runs the sweep, then the continuation from the first sweep run.
pub fn run_experiment(cfg: &ExperimentConfig, parallel: Option<usize>) -> Result<ExperimentOutput> {
    let instance = make_instance(cfg)?;
    let sweep = run_sweep(cfg, &instance, parallel)?;
    let warm = sweep[0].final_state.clone();
    let continuation = run_continuation(cfg, &instance, &warm)?;
    Ok(ExperimentOutput {
        instance,
        sweep,
        continuation,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub software: &'static str,
    pub version: &'static str,
    pub noise_seed: u64,
    pub noise_generator: &'static str,
    pub config: ExperimentConfig,
    pub mu_grid: Vec<f64>,
    pub alpha: f64,
    pub beta: f64,
    pub lipschitz: f64,
    pub grad_norm_bound: f64,
    pub work: WorkAccounting,
    pub tube: Option<TubeDeviation>,
    pub files: Vec<String>,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).map_err(|e| ExperimentError::io(path, e))?,
    ))
}

/// Writes `sweep_k.csv`, `continuation.csv`, the PGM images and `manifest.json` into `dir`.
pub fn emit(cfg: &ExperimentConfig, out: &ExperimentOutput, dir: &Path) -> Result<Manifest> {
    std::fs::create_dir_all(dir).map_err(|e| ExperimentError::io(dir, e))?;
    let mut files = Vec::new();
    for (k, t) in out.sweep.iter().enumerate() {
        let name = format!("sweep_{k}.csv");
        t.write_csv(create(&dir.join(&name))?)?;
        files.push(name);
    }
    out.continuation
        .write_csv(create(&dir.join("continuation.csv"))?)?;
    files.push("continuation.csv".into());

    let inst = &out.instance;
    let final_image = &out.continuation.final_state.u;
    for (name, px) in [
        ("phantom.pgm", &inst.phantom),
        ("blurred.pgm", &inst.blurred),
        ("noisy.pgm", &inst.noisy),
        ("restored.pgm", final_image),
    ] {
        pgm::write_pgm(create(&dir.join(name))?, inst.width, inst.height, px)?;
        files.push(name.into());
    }

    let p = inst.problem(cfg.mu_grid.to)?;
    let steps = out.continuation.steps;
    let manifest = Manifest {
        software: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        noise_seed: cfg.noise_seed,
        noise_generator: "ChaCha8 (rand_chacha), seed_from_u64; standard normal via rand_distr",
        config: cfg.clone(),
        mu_grid: cfg.mu_grid.values(),
        alpha: steps.alpha,
        beta: steps.beta,
        lipschitz: p.f.lipschitz(),
        grad_norm_bound: p.a.default_norm_bound(),
        work: out.work(),
        tube: out.tube(),
        files,
    };
    let path = dir.join("manifest.json");
    serde_json::to_writer_pretty(create(&path)?, &manifest)?;
    Ok(manifest)
}

/// Records read back from an output directory.
#[derive(Debug, Clone)]
pub struct EmittedRecords {
    pub sweep: Vec<Vec<IterationRecord>>,
    pub continuation: Option<Vec<IterationRecord>>,
}

impl EmittedRecords {
    pub fn endpoints(&self) -> Vec<IterationRecord> {
        self.sweep.iter().filter_map(|r| r.last().copied()).collect()
    }
}

/// Reads `sweep_0.csv, sweep_1.csv, ...` (until the first gap) and `continuation.csv`.
pub fn read_records(dir: &Path) -> Result<EmittedRecords> {
    let open = |path: &Path| File::open(path).map_err(|e| ExperimentError::io(path, e));
    let mut sweep = Vec::new();
    loop {
        let path = dir.join(format!("sweep_{}.csv", sweep.len()));
        if !path.exists() {
            break;
        }
        let recs = read_trajectory_csv(open(&path)?)?;
        if recs.is_empty() {
            return Err(ExperimentError::Records(format!(
                "{} has no records",
                path.display()
            )));
        }
        sweep.push(recs);
    }
    if sweep.is_empty() {
        return Err(ExperimentError::Records(format!(
            "no sweep_0.csv in {}",
            dir.display()
        )));
    }
    let cont = dir.join("continuation.csv");
    let continuation = if cont.exists() {
        Some(read_trajectory_csv(open(&cont)?)?)
    } else {
        None
    };
    Ok(EmittedRecords {
        sweep,
        continuation,
    })
}
