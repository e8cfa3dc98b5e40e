#![allow(dead_code)]

use std::sync::Arc;

use pdcont::linops::{DenseMatrix, Grad2d, LinearMap};
use pdcont::prox::ProxFunction;
use pdcont::solver::{LeastSquares, ProblemSpec, RunOptions};

/// Noisy 4×4 image: a 2×2 bright square on a dark background.
pub fn tv_data() -> Vec<f64> {
    let noise = [
        0.03, -0.02, 0.05, -0.04, 0.01, 0.06, -0.03, 0.02, -0.05, 0.04, 0.0, -0.01, 0.02, -0.06,
        0.03, 0.05,
    ];
    (0..16)
        .map(|i| {
            let (r, c) = (i / 4, i % 4);
            let clean = if (1..3).contains(&r) && (1..3).contains(&c) { 0.9 } else { 0.1 };
            clean + noise[i]
        })
        .collect()
}

/// TV denoising on 4×4: f = ½‖u − y‖², g = box[0, 1], h = group ℓ2,1, A = grad.
pub fn tv_problem(mu: f64) -> ProblemSpec {
    ProblemSpec::new(
        Arc::new(LeastSquares::denoising(tv_data())),
        ProxFunction::box_indicator(16, 0.0, 1.0).unwrap(),
        ProxFunction::group_l21(32, 2).unwrap(),
        Arc::new(Grad2d::new(4, 4).unwrap().into()),
        1.0,
        mu,
    )
    .unwrap()
}

/// f = ½‖u − (2, 1)‖², g = ‖·‖₁, h = |·|, A = [1, −1].
pub fn toy_problem(lambda: f64, mu: f64) -> ProblemSpec {
    ProblemSpec::new(
        Arc::new(LeastSquares::denoising(vec![2.0, 1.0])),
        ProxFunction::l1(2).unwrap(),
        ProxFunction::l1(1).unwrap(),
        Arc::new(LinearMap::Dense(
            DenseMatrix::from_rows(&[vec![1.0, -1.0]]).unwrap(),
        )),
        lambda,
        mu,
    )
    .unwrap()
}

pub fn converge_opts(max_iters: usize, tol: f64) -> RunOptions {
    RunOptions {
        max_iters,
        tol,
        snapshot_every: 0,
        ..Default::default()
    }
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}
