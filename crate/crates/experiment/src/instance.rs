use std::sync::Arc;

use pdcont::linops::{Boundary, Conv2d, Grad2d, KernelSpec, LinearMap};
use pdcont::prox::ProxFunction;
use pdcont::solver::{LeastSquares, ProblemSpec, StepSizes};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::config::ExperimentConfig;
use crate::Result;

/// Box constraint weight; inert for an indicator, so fixed.
pub const LAMBDA: f64 = 1.0;

/// A deblurring instance `f(u) = ½‖Ku − y‖²`, `g = ind[0,1]`, `h = ‖·‖₁,₂`, `A = ∇`.
#[derive(Debug, Clone)]
pub struct Instance {
    pub height: usize,
    pub width: usize,
    pub kernel: KernelSpec,
    pub phantom: Vec<f64>,
    pub blurred: Vec<f64>,
    pub noisy: Vec<f64>,
    blur: LinearMap,
    fidelity: Arc<LeastSquares>,
}

impl Instance {
    /// The problem at penalty weight `mu`.
    pub fn problem(&self, mu: f64) -> Result<ProblemSpec> {
        let n = self.height * self.width;
        Ok(ProblemSpec::new(
            self.fidelity.clone(),
            ProxFunction::box_indicator(n, 0.0, 1.0)?,
            ProxFunction::group_l21(2 * n, 2)?,
            Arc::new(Grad2d::new(self.height, self.width)?.into()),
            LAMBDA,
            mu,
        )?)
    }

    pub fn blur(&self) -> &LinearMap {
        &self.blur
    }

    /// Configured steps, or the defaults for the instance's `L` and `‖∇‖` bound.
    pub fn step_sizes(&self, cfg: &ExperimentConfig) -> Result<StepSizes> {
        let p = self.problem(cfg.mu_grid.from)?;
        let defaults = StepSizes::for_problem(&p);
        let lip = p.f.lipschitz();
        let norm_a = p.a.default_norm_bound();
        match (cfg.alpha, cfg.beta) {
            (None, None) => Ok(defaults),
            (Some(alpha), None) => Ok(StepSizes::default_for_alpha(alpha, lip, norm_a)?),
            (alpha, Some(beta)) => {
                Ok(StepSizes::new(alpha.unwrap_or(defaults.alpha), beta, lip, norm_a)?)
            }
        }
    }
}

/// Truncated Gaussian, normalized to unit sum.
pub fn gaussian_kernel(size: usize, sigma: f64) -> KernelSpec {
    let c = (size as f64 - 1.0) / 2.0;
    let mut data = Vec::with_capacity(size * size);
    for i in 0..size {
        for j in 0..size {
            let (di, dj) = (i as f64 - c, j as f64 - c);
            data.push((-(di * di + dj * dj) / (2.0 * sigma * sigma)).exp());
        }
    }
    let total: f64 = data.iter().sum();
    data.iter_mut().for_each(|x| *x /= total);
    KernelSpec {
        shape: [size, size],
        data,
    }
}

/// Centered rectangle of intensity 1 and a disk of intensity 0.5 on a zero background.
pub fn phantom(height: usize, width: usize) -> Vec<f64> {
    let (h, w) = (height as f64, width as f64);
    let (cy, cx) = (0.7 * h, 0.7 * w);
    let r = 0.15 * h.min(w);
    let mut img = vec![0.0; height * width];
    for i in 0..height {
        for j in 0..width {
            let px = &mut img[i * width + j];
            if (height / 4..3 * height / 4).contains(&i) && (width / 4..3 * width / 4).contains(&j) {
                *px = 1.0;
            }
            let (dy, dx) = (i as f64 + 0.5 - cy, j as f64 + 0.5 - cx);
            if dy * dy + dx * dx <= r * r {
                *px = 0.5;
            }
        }
    }
    img
}

/// `y = K u_true + n` with i.i.d. `N(0, noise_sigma²)` noise from ChaCha8 seeded by `noise_seed`.
pub fn make_instance(cfg: &ExperimentConfig) -> Result<Instance> {
    cfg.validate()?;
    let [height, width] = cfg.image_size;
    let kernel = gaussian_kernel(cfg.kernel.size, cfg.kernel.sigma);
    let blur: LinearMap = Conv2d::new(height, width, &kernel, Boundary::Periodic)?.into();
    let phantom = phantom(height, width);
    let blurred = blur.apply(&phantom)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.noise_seed);
    let noisy: Vec<f64> = blurred
        .iter()
        .map(|b| {
            let z: f64 = StandardNormal.sample(&mut rng);
            b + cfg.noise_sigma * z
        })
        .collect();
    let fidelity = Arc::new(LeastSquares::new(blur.clone(), noisy.clone())?);
    Ok(Instance {
        height,
        width,
        kernel,
        phantom,
        blurred,
        noisy,
        blur,
        fidelity,
    })
}
