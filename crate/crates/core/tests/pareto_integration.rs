mod common;

use common::{converge_opts, toy_problem, tv_problem};
use pdcont::pareto::{
    check_convex, check_monotone, dual_function_oracle, record, subgradient_check,
    value_function_oracle, GridSpec, ParetoRecord,
};
use pdcont::solver::{run_baseline, ProblemSpec, StepSizes, StopReason};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn converged_record(p: &ProblemSpec) -> (Vec<f64>, ParetoRecord) {
    let s = StepSizes::for_problem(p);
    let t = run_baseline(p, &s, &converge_opts(50_000, 1e-11)).unwrap();
    assert_eq!(t.stop, StopReason::Converged, "λ={} μ={}", p.lambda, p.mu);
    let u = t.final_state.u;
    let rec = record(&u, p, p.lambda, p.mu, t.final_state.n).unwrap();
    (u, rec)
}

fn tv_sweep() -> Vec<ParetoRecord> {
    let mus = [0.01, 0.02, 0.05, 0.1, 0.2, 0.3];
    mus.iter().map(|&mu| converged_record(&tv_problem(mu)).1).collect()
}

#[test]
fn tv_sweep_is_monotone_and_convex() {
    let recs = tv_sweep();
    // larger μ trades fidelity for a smaller TV value
    for w in recs.windows(2) {
        assert!(w[1].tau2 <= w[0].tau2 && w[1].sigma >= w[0].sigma, "{recs:#?}");
    }
    assert!(check_monotone(&recs, 1e-6).is_empty());
    assert!(check_convex(&recs, 1e-6).is_empty());
    for r in &recs {
        let c = subgradient_check(r, &recs, 1e-6);
        assert!(c.passed, "{c:?}");
    }
}

#[test]
fn perturbed_sweep_record_is_caught() {
    let mut recs = tv_sweep();
    recs[2].sigma -= 1.0;
    assert!(!subgradient_check(&recs[2], &recs, 1e-5).passed
        || recs.iter().any(|r| !subgradient_check(r, &recs, 1e-5).passed));
    assert!(!check_monotone(&recs, 1e-5).is_empty() || !check_convex(&recs, 1e-5).is_empty());
}

/// Largest `f` increase over one grid cell around `u`.
fn grid_resolution(p: &ProblemSpec, u: &[f64], step: f64) -> f64 {
    let grad = p.f.gradient(u);
    let d = u.len() as f64;
    step * grad.iter().map(|g| g.abs()).sum::<f64>() + 0.5 * d * step * step
}

#[test]
fn toy_frontier_matches_value_function_oracle() {
    let grid = GridSpec::new(-0.5, 2.5, 2e-3).unwrap();
    for (lambda, mu) in [(0.5, 0.5), (0.5, 0.2), (0.3, 0.1), (1.0, 0.4)] {
        let p = toy_problem(lambda, mu);
        let (u, rec) = converged_record(&p);
        let phi = value_function_oracle(&p, rec.tau1, rec.tau2, &grid)
            .unwrap()
            .finite()
            .expect("feasible grid point");
        let res = grid_resolution(&p, &u, grid.step);
        assert!(
            phi >= rec.sigma - 1e-6 && phi <= rec.sigma + res + 1e-6,
            "λ={lambda} μ={mu}: φ={phi} σ={} res={res}",
            rec.sigma
        );

        // strong duality at τ = (g(û), h(Aû))
        let dual = dual_function_oracle(&p, lambda, mu, rec.tau1, rec.tau2, &grid)
            .unwrap()
            .to_f64();
        let lip = (lambda + mu * 2.0) * grid.step + res;
        assert!(
            (dual - rec.sigma).abs() <= lip + 1e-6,
            "λ={lambda} μ={mu}: dual={dual} σ={}",
            rec.sigma
        );
    }
}

#[test]
fn toy_hand_solution() {
    // u1 > u2 > 0 branch: u = y − λ(1, 1) − μ(1, −1)
    let p = toy_problem(0.5, 0.2);
    let (u, rec) = converged_record(&p);
    assert!((u[0] - 1.3).abs() < 1e-8 && (u[1] - 0.7).abs() < 1e-8, "{u:?}");
    assert!((rec.sigma - 0.29).abs() < 1e-8);
}

#[test]
fn random_points_never_below_frontier() {
    let p = toy_problem(0.5, 0.5);
    let grid = GridSpec::new(-1.0, 3.0, 1e-2).unwrap();
    let side = ((grid.hi - grid.lo) / grid.step).round() as usize + 1;
    let mut table = Vec::with_capacity(side * side);
    for i in 0..side {
        for j in 0..side {
            let u = [grid.lo + i as f64 * grid.step, grid.lo + j as f64 * grid.step];
            let (f, g, h) = p.terms(&u).unwrap();
            table.push((g.to_f64(), h.to_f64(), f));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..1000 {
        let u = [rng.random_range(-1.0..3.0), rng.random_range(-1.0..3.0)];
        let (f, g, h) = p.terms(&u).unwrap();
        let (t1, t2) = (g.to_f64(), h.to_f64());
        let phi = table
            .iter()
            .filter(|(a, b, _)| *a <= t1 && *b <= t2)
            .map(|x| x.2)
            .fold(f64::INFINITY, f64::min);
        let res = 2.0 * grid_resolution(&p, &u, grid.step);
        assert!(f >= phi - res, "u={u:?} f={f} φ={phi}");
    }
}
