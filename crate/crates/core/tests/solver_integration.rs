mod common;

use std::sync::Arc;

use common::{converge_opts, rel_diff, tv_data, tv_problem};
use pdcont::continuation::{Schedule, Sequence};
use pdcont::linops::{DenseMatrix, LinearMap};
use pdcont::prox::ProxFunction;
use pdcont::solver::{
    fixed_point_residual, m_norm, prox_gradient_step, run, run_baseline, validate_steps,
    LeastSquares, ProblemSpec, RunOptions, StepSizes, StopReason, Variant,
    ZeroSmooth,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_dense_problem(seed: u64) -> ProblemSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (m, n) = (5, 6);
    let k: Vec<f64> = (0..m * n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let a: Vec<f64> = (0..4 * n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let y: Vec<f64> = (0..m).map(|_| rng.random_range(-2.0..2.0)).collect();
    let k = LinearMap::Dense(DenseMatrix::new(m, n, k).unwrap());
    ProblemSpec::new(
        Arc::new(LeastSquares::new(k, y).unwrap()),
        ProxFunction::l1(n).unwrap(),
        ProxFunction::group_l21(4, 2).unwrap(),
        Arc::new(LinearMap::Dense(DenseMatrix::new(4, n, a).unwrap())),
        rng.random_range(0.05..0.5),
        rng.random_range(0.05..0.5),
    )
    .unwrap()
}

fn dense_opts(iters: usize) -> RunOptions {
    RunOptions {
        max_iters: iters,
        tol: 1e-300,
        snapshot_every: 1,
        ..Default::default()
    }
}

#[test]
fn constant_schedule_matches_baseline_bitwise() {
    for seed in [1, 2, 3] {
        let p = random_dense_problem(seed);
        let s = StepSizes::for_problem(&p);
        let sched = Schedule::constant(p.lambda, p.mu).unwrap();
        let cont = run(&p, &sched, &s, &dense_opts(100)).unwrap();
        let base = run_baseline(&p, &s, &dense_opts(100)).unwrap();
        assert_eq!(cont.snapshots.len(), 101);
        for (a, b) in cont.snapshots.iter().zip(&base.snapshots) {
            let bits = |x: &[f64]| x.iter().map(|v| v.to_bits()).collect::<Vec<_>>();
            assert_eq!(bits(&a.u), bits(&b.u), "seed {seed} iterate {}", a.n);
            assert_eq!(bits(&a.v), bits(&b.v), "seed {seed} iterate {}", a.n);
        }
        assert_eq!(cont.records, base.records);
    }
}

#[test]
fn zero_coupling_reduces_to_proximal_gradient() {
    let y = tv_data();
    let f = Arc::new(LeastSquares::denoising(y));
    let g = ProxFunction::l1(16).unwrap();
    let p = ProblemSpec::new(
        f.clone(),
        g.clone(),
        ProxFunction::group_l21(32, 2).unwrap(),
        Arc::new(LinearMap::zero(16, 32)),
        0.3,
        0.7,
    )
    .unwrap();
    let s = StepSizes::for_problem(&p);
    let sched = Schedule::mu_only(0.3, Sequence::geometric(5.0, 0.7, 0.9).unwrap()).unwrap();
    let t = run(&p, &sched, &s, &dense_opts(60)).unwrap();
    let mut u = vec![0.0; 16];
    for snap in &t.snapshots[1..] {
        u = prox_gradient_step(&u, f.as_ref(), &g, s.alpha, 0.3).unwrap();
        assert_eq!(u, snap.u, "iterate {}", snap.n);
    }
}

/// Chambolle-Pock for `λ g(u) + μ h(Au)` written with the scaled dual `v`.
fn chambolle_pock(
    g: &ProxFunction,
    h: &ProxFunction,
    a: &LinearMap,
    lambda: f64,
    mu: f64,
    tau: f64,
    sigma: f64,
    iters: usize,
) -> Vec<(Vec<f64>, Vec<f64>)> {
    let mut x = vec![0.0; a.in_dim()];
    let mut y = vec![0.0; a.out_dim()];
    let mut out = Vec::new();
    for _ in 0..iters {
        let aty = a.adjoint(&y).unwrap();
        let tm = tau * mu;
        let arg: Vec<f64> = x.iter().zip(&aty).map(|(xi, ai)| xi - tm * ai).collect();
        let x_new = g.prox(tau * lambda, &arg).unwrap();
        let bar: Vec<f64> = x_new.iter().zip(&x).map(|(n, o)| 2.0 * n - o).collect();
        let abar = a.apply(&bar).unwrap();
        let sm = sigma / mu;
        let argy: Vec<f64> = y.iter().zip(&abar).map(|(yi, ai)| yi + sm * ai).collect();
        y = h.conjugate_prox(sm, &argy).unwrap();
        x = x_new;
        out.push((x.clone(), y.clone()));
    }
    out
}

#[test]
fn zero_smooth_term_reduces_to_chambolle_pock() {
    let base = tv_problem(0.2);
    let p = ProblemSpec::new(
        Arc::new(ZeroSmooth::new(16)),
        base.g.clone(),
        base.h.clone(),
        base.a.clone(),
        1.0,
        0.2,
    )
    .unwrap();
    let s = StepSizes::for_problem(&p);
    let t = run_baseline(&p, &s, &dense_opts(80)).unwrap();
    let cp = chambolle_pock(&p.g, &p.h, &p.a, 1.0, 0.2, s.alpha, s.beta, 80);
    for (snap, (x, y)) in t.snapshots[1..].iter().zip(&cp) {
        assert_eq!(&snap.u, x);
        assert_eq!(&snap.v, y);
    }
}

#[test]
fn three_solvers_reach_common_minimizer() {
    let p = tv_problem(0.1);
    let s = StepSizes::for_problem(&p);
    let opts = converge_opts(20_000, 1e-10);

    let base = run_baseline(&p, &s, &opts).unwrap();
    let geo = Schedule::mu_only(1.0, Sequence::geometric(2.0, 0.1, 0.99).unwrap()).unwrap();
    let cont = run(&p, &geo, &s, &opts).unwrap();
    let dual = run(
        &p,
        &geo,
        &s,
        &RunOptions {
            variant: Variant::DualFirst,
            ..opts.clone()
        },
    )
    .unwrap();

    let objs: Vec<f64> = [&base, &cont, &dual]
        .iter()
        .map(|t| {
            assert_eq!(t.stop, StopReason::Converged);
            assert!(fixed_point_residual(&t.final_state, &p, &s).unwrap() < 1e-8);
            p.objective(&t.final_state.u).unwrap().to_f64()
        })
        .collect();
    for o in &objs[1..] {
        assert!(rel_diff(objs[0], *o) <= 1e-6, "{objs:?}");
    }
}

#[test]
fn residual_decreases_in_trend() {
    let p = tv_problem(0.1);
    let s = StepSizes::for_problem(&p);
    let t = run_baseline(&p, &s, &converge_opts(4000, 1e-300)).unwrap();
    let r: Vec<f64> = t.records.iter().map(|r| r.residual).collect();
    // windowed maxima are non-increasing up to a small factor
    let maxima: Vec<f64> = r
        .chunks(500)
        .map(|c| c.iter().cloned().fold(0.0, f64::max))
        .collect();
    for w in maxima.windows(2) {
        assert!(w[1] <= 1.5 * w[0], "{maxima:?}");
    }
    assert!(maxima.last().unwrap() < &(1e-3 * maxima[0]));
}

#[test]
fn step_condition_boundary() {
    let p = tv_problem(0.1);
    let l = p.f.lipschitz();
    let b = p.a.default_norm_bound();
    let alpha = 0.8;
    let edge = (1.0 / alpha - l / 2.0) / (b * b);
    assert!(!validate_steps(alpha, edge, l, b).ok);
    assert!(validate_steps(alpha, 0.99 * edge, l, b).ok);
    assert!(StepSizes::new(alpha, edge, l, b).is_err());
}

#[test]
fn m_norm_positive_for_admissible_steps() {
    let p = tv_problem(0.1);
    let s = StepSizes::for_problem(&p);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let xu: Vec<f64> = (0..16).map(|_| rng.random_range(-1.0..1.0)).collect();
        let xv: Vec<f64> = (0..32).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mu = rng.random_range(0.01..10.0);
        assert!(m_norm(&xu, &xv, mu, &s, &p.a).unwrap() > 0.0);
    }
}

#[test]
fn warm_start_continues_counter() {
    let p = tv_problem(0.1);
    let s = StepSizes::for_problem(&p);
    let first = run_baseline(&p, &s, &converge_opts(30, 1e-300)).unwrap();
    let resumed = run_baseline(
        &p,
        &s,
        &RunOptions {
            initial: Some(first.final_state.clone()),
            ..converge_opts(10, 1e-300)
        },
    )
    .unwrap();
    assert_eq!(resumed.snapshots[0].n, 30);
    assert_eq!(resumed.records[0].n, 31);
    assert_eq!(resumed.iterations(), 10);
}
