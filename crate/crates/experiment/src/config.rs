use std::path::{Path, PathBuf};

use pdcont::continuation::Sequence;
use serde::{Deserialize, Serialize};

use crate::{ExperimentError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelConfig {
    /// Side length of the square kernel.
    pub size: usize,
    pub sigma: f64,
}

/// Log-spaced penalty weights `from, ..., to` (inclusive).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuGrid {
    pub from: f64,
    pub to: f64,
    pub count: usize,
}

impl MuGrid {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.from];
        }
        let seq = Sequence::LogSpacedThenConstant {
            from: self.from,
            to: self.to,
            count: self.count,
        };
        (0..self.count).map(|k| seq.at(k)).collect()
    }
}

/// Experiment configuration; every field has a desk-scale default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// `[height, width]`.
    pub image_size: [usize; 2],
    pub kernel: KernelConfig,
    pub noise_sigma: f64,
    pub noise_seed: u64,
    pub mu_grid: MuGrid,
    /// `μ` schedule of the continuation run. When absent: log-spaced from the grid's
    /// first to its last value over `iters_per_run` steps, then constant.
    pub continuation: Option<Sequence>,
    pub iters_per_run: usize,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub output_dir: Option<PathBuf>,
    /// Maximum allowed tube deviation of the continuation path (relative).
    pub tube_tolerance: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            image_size: [16, 16],
            kernel: KernelConfig {
                size: 5,
                sigma: 1.0,
            },
            noise_sigma: 0.05,
            noise_seed: 20_240_601,
            mu_grid: MuGrid {
                from: 1e2,
                to: 1e-2,
                count: 8,
            },
            continuation: None,
            iters_per_run: 2000,
            alpha: None,
            beta: None,
            output_dir: None,
            tube_tolerance: 0.05,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| ExperimentError::io(path, e))?;
        Self::from_json_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(ExperimentError::Config(msg));
        let [h, w] = self.image_size;
        if h == 0 || w == 0 {
            return bad(format!("image_size must be positive, got {h}x{w}"));
        }
        if self.kernel.size == 0 || !(self.kernel.sigma > 0.0) {
            return bad(format!(
                "kernel size and sigma must be positive, got {} and {}",
                self.kernel.size, self.kernel.sigma
            ));
        }
        if self.kernel.size > h || self.kernel.size > w {
            return bad(format!(
                "kernel size {} exceeds image {h}x{w}",
                self.kernel.size
            ));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return bad(format!("noise_sigma must be nonnegative, got {}", self.noise_sigma));
        }
        let g = &self.mu_grid;
        if !(g.from > 0.0 && g.to > 0.0 && g.from.is_finite() && g.to.is_finite()) || g.count == 0 {
            return bad(format!("mu_grid must be positive, got {g:?}"));
        }
        if self.iters_per_run == 0 {
            return bad("iters_per_run must be positive".into());
        }
        for (name, x) in [("alpha", self.alpha), ("beta", self.beta)] {
            if let Some(x) = x {
                if !(x > 0.0 && x.is_finite()) {
                    return bad(format!("{name} must be positive, got {x}"));
                }
            }
        }
        if !(self.tube_tolerance > 0.0) {
            return bad(format!("tube_tolerance must be positive, got {}", self.tube_tolerance));
        }
        if let Some(seq) = &self.continuation {
            seq.validate()?;
            if seq.target() != g.values()[g.count - 1] {
                return bad(format!(
                    "continuation target {} differs from the last grid value {}",
                    seq.target(),
                    g.to
                ));
            }
        }
        Ok(())
    }

    /// The continuation `μ` schedule (explicit or derived from the grid).
    pub fn continuation_schedule(&self) -> Result<Sequence> {
        match &self.continuation {
            Some(seq) => Ok(seq.clone()),
            None if self.mu_grid.count == 1 || self.mu_grid.from == self.mu_grid.to => {
                Ok(Sequence::constant(self.mu_grid.from)?)
            }
            None => Ok(Sequence::log_spaced_then_constant(
                self.mu_grid.from,
                self.mu_grid.to,
                self.iters_per_run.max(2),
            )?),
        }
    }
}
