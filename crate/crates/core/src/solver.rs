//! Primal-dual iterations for `min_u f(u) + λ g(u) + μ h(Au)`.
//!
//! One continuation step with parameters `(λ_n, μ_n)` is
//!
//! ```text
//! u+ = prox_{α λ_n g}(u − α ∇f(u) − α μ_n Aᵀ v)
//! v+ = prox_{(β/μ_n) h*}(v + (β/μ_n) A (2u+ − u))
//! ```
//!
//! With constant parameters this is the fixed-parameter primal-dual method; with `A = 0`
//! it is proximal gradient, with `f = 0` it is Chambolle-Pock. Convergence requires
//! `β ||A||² < 1/α − L/2`.
//!
//! The arithmetic inside a step is fixed: the primal argument is computed per entry as
//! `(u_i − α ∇f(u)_i) − (α μ_n) (Aᵀv)_i`, and the dual argument as
//! `v_i + (β / μ_n) (A(2u+ − u))_i`. The baseline and the special-case solvers use the
//! same order, so trajectories can be compared bit for bit.

use std::fmt;
use std::sync::Arc;

use crate::continuation::Schedule;
use crate::error::{check_len, Error, Result};
use crate::linops::LinearMap;
use crate::prox::{ExtReal, ProxFunction};
use crate::vecops::{all_finite, dot, norm2_sq};

/// Differentiable convex term with `L`-Lipschitz gradient.
pub trait SmoothTerm: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;
    fn value(&self, u: &[f64]) -> f64;
    fn gradient(&self, u: &[f64]) -> Vec<f64>;
    fn lipschitz(&self) -> f64;
}

#[derive(Debug, Clone)]
pub struct ZeroSmooth {
    dim: usize,
}

impl ZeroSmooth {
    pub fn new(dim: usize) -> Self {
        Self { dim }
    }
}

impl SmoothTerm for ZeroSmooth {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, _u: &[f64]) -> f64 {
        0.0
    }

    fn gradient(&self, _u: &[f64]) -> Vec<f64> {
        vec![0.0; self.dim]
    }

    fn lipschitz(&self) -> f64 {
        0.0
    }
}

/// `f(u) = 1/2 ||K u − y||²`, `∇f(u) = Kᵀ(K u − y)`, `L = B(K)²`.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    op: LinearMap,
    data: Vec<f64>,
    lipschitz: f64,
}

impl LeastSquares {
    pub fn new(op: LinearMap, data: Vec<f64>) -> Result<Self> {
        check_len("least-squares data", op.out_dim(), data.len())?;
        let b = op.default_norm_bound();
        Ok(Self {
            op,
            data,
            lipschitz: b * b,
        })
    }

    /// `1/2 ||u − y||²`.
    pub fn denoising(data: Vec<f64>) -> Self {
        Self {
            op: LinearMap::identity(data.len()),
            data,
            lipschitz: 1.0,
        }
    }

    pub fn op(&self) -> &LinearMap {
        &self.op
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    fn residual(&self, u: &[f64]) -> Vec<f64> {
        let mut r = self.op.apply(u).expect("dimension checked by caller");
        for (ri, yi) in r.iter_mut().zip(&self.data) {
            *ri -= yi;
        }
        r
    }
}

impl SmoothTerm for LeastSquares {
    fn dim(&self) -> usize {
        self.op.in_dim()
    }

    fn value(&self, u: &[f64]) -> f64 {
        0.5 * norm2_sq(&self.residual(u))
    }

    fn gradient(&self, u: &[f64]) -> Vec<f64> {
        let r = self.residual(u);
        self.op.adjoint(&r).expect("dimension checked by caller")
    }

    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }
}

/// The composite problem `F_{λ,μ}(u) = f(u) + λ g(u) + μ h(Au)` at target weights.
#[derive(Clone)]
pub struct ProblemSpec {
    pub f: Arc<dyn SmoothTerm>,
    pub g: ProxFunction,
    pub h: ProxFunction,
    pub a: Arc<LinearMap>,
    pub lambda: f64,
    pub mu: f64,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("f", &self.f)
            .field("g", &self.g)
            .field("h", &self.h)
            .field("a", &self.a)
            .field("lambda", &self.lambda)
            .field("mu", &self.mu)
            .finish()
    }
}

impl ProblemSpec {
    pub fn new(
        f: Arc<dyn SmoothTerm>,
        g: ProxFunction,
        h: ProxFunction,
        a: Arc<LinearMap>,
        lambda: f64,
        mu: f64,
    ) -> Result<Self> {
        let d = a.in_dim();
        check_len("smooth term dimension", d, f.dim())?;
        check_len("g dimension", d, g.dim())?;
        check_len("h dimension", a.out_dim(), h.dim())?;
        let spec = Self {
            f,
            g,
            h,
            a,
            lambda,
            mu,
        };
        spec.check_weights()?;
        Ok(spec)
    }

    fn check_weights(&self) -> Result<()> {
        if self.lambda > 0.0 && self.mu > 0.0 && self.lambda.is_finite() && self.mu.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "lambda and mu must be positive, got ({}, {})",
                self.lambda, self.mu
            )))
        }
    }

    /// Same terms, different target weights.
    pub fn with_weights(&self, lambda: f64, mu: f64) -> Result<Self> {
        let spec = Self {
            lambda,
            mu,
            ..self.clone()
        };
        spec.check_weights()?;
        Ok(spec)
    }

    pub fn primal_dim(&self) -> usize {
        self.a.in_dim()
    }

    pub fn dual_dim(&self) -> usize {
        self.a.out_dim()
    }

    /// `(f(u), g(u), h(Au))`.
    pub fn terms(&self, u: &[f64]) -> Result<(f64, ExtReal, ExtReal)> {
        check_len("objective input", self.primal_dim(), u.len())?;
        let au = self.a.apply(u)?;
        Ok((self.f.value(u), self.g.eval(u)?, self.h.eval(&au)?))
    }

    pub fn objective_with(&self, u: &[f64], lambda: f64, mu: f64) -> Result<ExtReal> {
        let (f, g, h) = self.terms(u)?;
        Ok(ExtReal::Finite(f).add(g.scale(lambda)).add(h.scale(mu)))
    }

    /// `F_{λ,μ}(u)` at the target weights.
    pub fn objective(&self, u: &[f64]) -> Result<ExtReal> {
        self.objective_with(u, self.lambda, self.mu)
    }
}

/// Result of checking `β B² < 1/α − L/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepCheck {
    pub ok: bool,
    /// `1/α − L/2 − β B²`.
    pub slack: f64,
}

pub fn validate_steps(alpha: f64, beta: f64, lipschitz: f64, norm_a: f64) -> StepCheck {
    let slack = 1.0 / alpha - lipschitz / 2.0 - beta * norm_a * norm_a;
    StepCheck {
        ok: alpha > 0.0 && beta > 0.0 && slack > 0.0,
        slack,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepSizes {
    pub alpha: f64,
    pub beta: f64,
}

impl StepSizes {
    pub fn new(alpha: f64, beta: f64, lipschitz: f64, norm_a: f64) -> Result<Self> {
        let check = validate_steps(alpha, beta, lipschitz, norm_a);
        if !check.ok {
            return Err(Error::StepCondition { slack: check.slack });
        }
        Ok(Self { alpha, beta })
    }

    /// No validation; for probing inadmissible steps.
    pub fn new_unchecked(alpha: f64, beta: f64) -> Self {
        Self { alpha, beta }
    }

    /// `α = 1/L` (1 when `L = 0`) and `β` at 90% of its admissible bound
    /// (`β = 1` when `A = 0`).
    pub fn default_for(lipschitz: f64, norm_a: f64) -> Self {
        let alpha = if lipschitz > 0.0 { 1.0 / lipschitz } else { 1.0 };
        Self {
            alpha,
            beta: default_beta(alpha, lipschitz, norm_a),
        }
    }

    /// Given `alpha`, picks `beta` at 90% of the admissible bound.
    pub fn default_for_alpha(alpha: f64, lipschitz: f64, norm_a: f64) -> Result<Self> {
        Self::new(alpha, default_beta(alpha, lipschitz, norm_a), lipschitz, norm_a)
    }

    pub fn for_problem(p: &ProblemSpec) -> Self {
        Self::default_for(p.f.lipschitz(), p.a.default_norm_bound())
    }

    pub fn validate_for(&self, p: &ProblemSpec) -> Result<()> {
        Self::new(
            self.alpha,
            self.beta,
            p.f.lipschitz(),
            p.a.default_norm_bound(),
        )
        .map(|_| ())
    }
}

/// Primal-dual pair `(u_n, v_n)` after `n` steps.
#[derive(Debug, Clone, PartialEq)]
pub struct IterateState {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub n: usize,
}

impl IterateState {
    pub fn zeros(p: &ProblemSpec) -> Self {
        Self {
            u: vec![0.0; p.primal_dim()],
            v: vec![0.0; p.dual_dim()],
            n: 0,
        }
    }

    pub fn new(u: Vec<f64>, v: Vec<f64>) -> Self {
        Self { u, v, n: 0 }
    }

    fn check(&self, p: &ProblemSpec) -> Result<()> {
        check_len("primal iterate", p.primal_dim(), self.u.len())?;
        check_len("dual iterate", p.dual_dim(), self.v.len())
    }
}

fn primal_argument(u: &[f64], grad: &[f64], atv: &[f64], alpha: f64, mu_n: f64) -> Vec<f64> {
    let am = alpha * mu_n;
    u.iter()
        .zip(grad)
        .zip(atv)
        .map(|((ui, gi), ai)| (ui - alpha * gi) - am * ai)
        .collect()
}

fn dual_argument(v: &[f64], a_ext: &[f64], beta: f64, mu_n: f64) -> Vec<f64> {
    let bm = beta / mu_n;
    v.iter().zip(a_ext).map(|(vi, ai)| vi + bm * ai).collect()
}

fn extrapolate(new: &[f64], old: &[f64]) -> Vec<f64> {
    new.iter().zip(old).map(|(a, b)| 2.0 * a - b).collect()
}

fn check_params(lambda_n: f64, mu_n: f64) -> Result<()> {
    if lambda_n > 0.0 && mu_n > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "schedule values must be positive, got ({lambda_n}, {mu_n})"
        )))
    }
}

fn finite_or(values: &[f64], iteration: usize, line: &'static str) -> Result<()> {
    if all_finite(values) {
        Ok(())
    } else {
        Err(Error::NonFinite { iteration, line })
    }
}

fn default_beta(alpha: f64, lipschitz: f64, norm_a: f64) -> f64 {
    let room = 1.0 / alpha - lipschitz / 2.0;
    if norm_a > 0.0 {
        0.9 * room / (norm_a * norm_a)
    } else {
        1.0
    }
}

/// One continuation step with parameters `(λ_n, μ_n)`; primal update first.
pub fn pd_step(
    state: &IterateState,
    p: &ProblemSpec,
    s: &StepSizes,
    lambda_n: f64,
    mu_n: f64,
) -> Result<IterateState> {
    check_params(lambda_n, mu_n)?;
    state.check(p)?;
    let grad = p.f.gradient(&state.u);
    let atv = p.a.adjoint(&state.v)?;
    let arg = primal_argument(&state.u, &grad, &atv, s.alpha, mu_n);
    let u = p.g.prox(s.alpha * lambda_n, &arg)?;
    finite_or(&u, state.n, "primal")?;

    let ext = extrapolate(&u, &state.u);
    let a_ext = p.a.apply(&ext)?;
    let argv = dual_argument(&state.v, &a_ext, s.beta, mu_n);
    let v = p.h.conjugate_prox(s.beta / mu_n, &argv)?;
    finite_or(&v, state.n, "dual")?;

    Ok(IterateState {
        u,
        v,
        n: state.n + 1,
    })
}

/// Dual update first, primal update uses the extrapolated dual `2v+ − v`.
pub fn pd_step_dual_first(
    state: &IterateState,
    p: &ProblemSpec,
    s: &StepSizes,
    lambda_n: f64,
    mu_n: f64,
) -> Result<IterateState> {
    check_params(lambda_n, mu_n)?;
    state.check(p)?;
    let au = p.a.apply(&state.u)?;
    let argv = dual_argument(&state.v, &au, s.beta, mu_n);
    let v = p.h.conjugate_prox(s.beta / mu_n, &argv)?;
    finite_or(&v, state.n, "dual")?;

    let ext = extrapolate(&v, &state.v);
    let grad = p.f.gradient(&state.u);
    let atw = p.a.adjoint(&ext)?;
    let arg = primal_argument(&state.u, &grad, &atw, s.alpha, mu_n);
    let u = p.g.prox(s.alpha * lambda_n, &arg)?;
    finite_or(&u, state.n, "primal")?;

    Ok(IterateState {
        u,
        v,
        n: state.n + 1,
    })
}

/// Fixed-parameter primal-dual step at the problem's own `(λ, μ)`.
pub fn baseline_step(state: &IterateState, p: &ProblemSpec, s: &StepSizes) -> Result<IterateState> {
    state.check(p)?;
    let (lambda, mu) = (p.lambda, p.mu);

    let grad = p.f.gradient(&state.u);
    let atv = p.a.adjoint(&state.v)?;
    let am = s.alpha * mu;
    let mut arg = vec![0.0; state.u.len()];
    for i in 0..arg.len() {
        arg[i] = (state.u[i] - s.alpha * grad[i]) - am * atv[i];
    }
    let u = p.g.prox(s.alpha * lambda, &arg)?;
    finite_or(&u, state.n, "primal")?;

    let mut ext = vec![0.0; u.len()];
    for i in 0..ext.len() {
        ext[i] = 2.0 * u[i] - state.u[i];
    }
    let a_ext = p.a.apply(&ext)?;
    let bm = s.beta / mu;
    let mut argv = vec![0.0; state.v.len()];
    for i in 0..argv.len() {
        argv[i] = state.v[i] + bm * a_ext[i];
    }
    let v = p.h.conjugate_prox(bm, &argv)?;
    finite_or(&v, state.n, "dual")?;

    Ok(IterateState {
        u,
        v,
        n: state.n + 1,
    })
}

/// `u+ = prox_{α λ_n g}(u − α ∇f(u))`: the `A = 0` special case.
pub fn prox_gradient_step(
    u: &[f64],
    f: &dyn SmoothTerm,
    g: &ProxFunction,
    alpha: f64,
    lambda_n: f64,
) -> Result<Vec<f64>> {
    check_len("prox-gradient iterate", f.dim(), u.len())?;
    let grad = f.gradient(u);
    let arg: Vec<f64> = u.iter().zip(&grad).map(|(ui, gi)| ui - alpha * gi).collect();
    g.prox(alpha * lambda_n, &arg)
}

/// `||(u, v) − T(u, v)||₂` with `T` one primal-first step at the target `(λ, μ)`.
///
/// Zero exactly at solutions of the fixed-point equations.
pub fn fixed_point_residual(state: &IterateState, p: &ProblemSpec, s: &StepSizes) -> Result<f64> {
    let next = pd_step(state, p, s, p.lambda, p.mu)?;
    let du: f64 = state
        .u
        .iter()
        .zip(&next.u)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    let dv: f64 = state
        .v
        .iter()
        .zip(&next.v)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok((du + dv).sqrt())
}

/// Norm induced by `M = [[(μα)⁻¹ I, −Aᵀ], [−A, μβ⁻¹ I]]`.
pub fn m_norm(x_u: &[f64], x_v: &[f64], mu: f64, s: &StepSizes, a: &LinearMap) -> Result<f64> {
    let q = m_quadratic_form(x_u, x_v, mu, s, a)?;
    if q > 0.0 {
        return Ok(q.sqrt());
    }
    if x_u.iter().chain(x_v).all(|x| *x == 0.0) {
        return Ok(0.0);
    }
    Err(Error::IndefiniteMetric { value: q })
}

/// `<(x_u, x_v), M (x_u, x_v)>` without any sign check.
pub fn m_quadratic_form(
    x_u: &[f64],
    x_v: &[f64],
    mu: f64,
    s: &StepSizes,
    a: &LinearMap,
) -> Result<f64> {
    let ax = a.apply(x_u)?;
    check_len("m-norm dual part", a.out_dim(), x_v.len())?;
    Ok(norm2_sq(x_u) / (mu * s.alpha) + mu / s.beta * norm2_sq(x_v) - 2.0 * dot(&ax, x_v))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Variant {
    #[default]
    PrimalFirst,
    DualFirst,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub max_iters: usize,
    /// Stop once the fixed-point residual at the target drops below this.
    pub tol: f64,
    /// Keep a full `(u, v)` snapshot every k-th iteration (0 keeps none besides the
    /// initial and final states).
    pub snapshot_every: usize,
    pub variant: Variant,
    /// Warm start; `(0, 0)` when absent.
    pub initial: Option<IterateState>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            max_iters: 1000,
            tol: 1e-12,
            snapshot_every: 0,
            variant: Variant::PrimalFirst,
            initial: None,
        }
    }
}

/// Per-iteration trace entry for the iterate `u_n` produced with `(λ_{n−1}, μ_{n−1})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub n: usize,
    pub lambda_n: f64,
    pub mu_n: f64,
    pub f: f64,
    /// `g(u_n)`, `+inf` when infeasible.
    pub g: f64,
    /// `h(A u_n)`, `+inf` when infeasible.
    pub h_au: f64,
    /// `F_{λ,μ}(u_n)` at the target weights.
    pub objective_target: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Converged,
    MaxIters,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub records: Vec<IterationRecord>,
    /// Snapshots including the initial state (always) and the final state (always).
    pub snapshots: Vec<IterateState>,
    pub final_state: IterateState,
    pub stop: StopReason,
    pub steps: StepSizes,
    pub variant: Variant,
    pub lambda: f64,
    pub mu: f64,
}

impl Trajectory {
    pub fn iterations(&self) -> usize {
        self.final_state.n - self.snapshots.first().map_or(0, |s| s.n)
    }

    pub fn last_record(&self) -> Option<&IterationRecord> {
        self.records.last()
    }

    /// Snapshot of iterate `n`, if stored.
    pub fn snapshot(&self, n: usize) -> Option<&IterateState> {
        self.snapshots
            .binary_search_by_key(&n, |s| s.n)
            .ok()
            .map(|i| &self.snapshots[i])
    }

    /// Whether every iterate from the first to the last is stored.
    pub fn is_dense(&self) -> bool {
        self.snapshots
            .windows(2)
            .all(|w| w[1].n == w[0].n + 1)
    }

    /// Writes `n,lambda_n,mu_n,f,g,hAu,objective_target,residual`.
    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(TRAJECTORY_CSV_HEADER)?;
        for r in &self.records {
            wtr.write_record(&[
                r.n.to_string(),
                r.lambda_n.to_string(),
                r.mu_n.to_string(),
                r.f.to_string(),
                r.g.to_string(),
                r.h_au.to_string(),
                r.objective_target.to_string(),
                r.residual.to_string(),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

pub const TRAJECTORY_CSV_HEADER: [&str; 8] = [
    "n",
    "lambda_n",
    "mu_n",
    "f",
    "g",
    "hAu",
    "objective_target",
    "residual",
];

/// Reads records written by [`Trajectory::write_csv`].
pub fn read_trajectory_csv<R: std::io::Read>(reader: R) -> Result<Vec<IterationRecord>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.iter().ne(TRAJECTORY_CSV_HEADER) {
        return Err(Error::InvalidParameter(format!(
            "unexpected trajectory header {:?}",
            headers.iter().collect::<Vec<_>>()
        )));
    }
    let num = |field: &str| {
        field
            .parse::<f64>()
            .map_err(|e| Error::InvalidParameter(format!("bad number {field:?}: {e}")))
    };
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row?;
        out.push(IterationRecord {
            n: row[0]
                .parse()
                .map_err(|e| Error::InvalidParameter(format!("bad index {:?}: {e}", &row[0])))?,
            lambda_n: num(&row[1])?,
            mu_n: num(&row[2])?,
            f: num(&row[3])?,
            g: num(&row[4])?,
            h_au: num(&row[5])?,
            objective_target: num(&row[6])?,
            residual: num(&row[7])?,
        });
    }
    Ok(out)
}

type StepFn<'a> = dyn Fn(&IterateState, usize) -> Result<IterateState> + 'a;

fn drive(
    p: &ProblemSpec,
    s: &StepSizes,
    opts: &RunOptions,
    param_at: &dyn Fn(usize) -> (f64, f64),
    step: &StepFn<'_>,
) -> Result<Trajectory> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {}",
            opts.tol
        )));
    }
    s.validate_for(p)?;
    let mut state = match &opts.initial {
        Some(init) => {
            init.check(p)?;
            init.clone()
        }
        None => IterateState::zeros(p),
    };
    let start_n = state.n;
    let mut snapshots = vec![state.clone()];
    let mut records = Vec::with_capacity(opts.max_iters);
    let mut stop = StopReason::MaxIters;

    for k in 0..opts.max_iters {
        let (lambda_n, mu_n) = param_at(k);
        state = step(&state, k)?;
        let residual = fixed_point_residual(&state, p, s)?;
        let (f, g, h) = p.terms(&state.u)?;
        let objective_target = ExtReal::Finite(f)
            .add(g.scale(p.lambda))
            .add(h.scale(p.mu))
            .to_f64();
        records.push(IterationRecord {
            n: state.n,
            lambda_n,
            mu_n,
            f,
            g: g.to_f64(),
            h_au: h.to_f64(),
            objective_target,
            residual,
        });
        let converged = residual < opts.tol;
        let last = converged || k + 1 == opts.max_iters;
        if !last && opts.snapshot_every > 0 && (state.n - start_n) % opts.snapshot_every == 0 {
            snapshots.push(state.clone());
        }
        if converged {
            stop = StopReason::Converged;
            break;
        }
    }
    if snapshots.last().map(|s| s.n) != Some(state.n) {
        snapshots.push(state.clone());
    }
    Ok(Trajectory {
        records,
        snapshots,
        final_state: state,
        stop,
        steps: *s,
        variant: opts.variant,
        lambda: p.lambda,
        mu: p.mu,
    })
}

/// Runs the continuation iteration with `(λ_n, μ_n)` taken from `schedule`.
///
/// The `k`-th step of the run uses `schedule.at(k)`, whatever the warm start's counter.
/// `p.lambda`/`p.mu` must equal the schedule's targets.
pub fn run(
    p: &ProblemSpec,
    schedule: &Schedule,
    s: &StepSizes,
    opts: &RunOptions,
) -> Result<Trajectory> {
    if schedule.lambda_target() != p.lambda || schedule.mu_target() != p.mu {
        return Err(Error::InvalidParameter(format!(
            "schedule targets ({}, {}) differ from problem weights ({}, {})",
            schedule.lambda_target(),
            schedule.mu_target(),
            p.lambda,
            p.mu
        )));
    }
    let param_at = |k: usize| schedule.at(k);
    match opts.variant {
        Variant::PrimalFirst => drive(p, s, opts, &param_at, &|st, k| {
            let (l, m) = schedule.at(k);
            pd_step(st, p, s, l, m)
        }),
        Variant::DualFirst => drive(p, s, opts, &param_at, &|st, k| {
            let (l, m) = schedule.at(k);
            pd_step_dual_first(st, p, s, l, m)
        }),
    }
}

/// Runs the fixed-parameter method at the problem's `(λ, μ)` (primal-first only).
pub fn run_baseline(p: &ProblemSpec, s: &StepSizes, opts: &RunOptions) -> Result<Trajectory> {
    let param_at = |_k: usize| (p.lambda, p.mu);
    let opts = RunOptions {
        variant: Variant::PrimalFirst,
        ..opts.clone()
    };
    drive(p, s, &opts, &param_at, &|st, _| baseline_step(st, p, s))
}
