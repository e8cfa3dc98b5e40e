//! Inexactness accounting for a continuation run.
//!
//! A continuation step with `(λ_n, μ_n)` is an inexact fixed-parameter step at `(λ, μ)`:
//! the primal update carries the gradient error `e_{n+1} = (μ_n − μ) Aᵀ v_n` and is an
//! `ε_{n+1}`-approximate prox (type 1) with `ε_{n+1} = α M₁ |λ_n − λ|`; the dual update is
//! a `δ_{n+1}`-approximate prox (type 2) with `δ_{n+1} = β M₂ |μ_n⁻¹ − μ⁻¹|`.
//!
//! `M₁` and `M₂` are suprema over the run. They are estimated from the stored iterates
//! (and, for `M₂`, a deterministic sample of `dom(h*)`), so both are lower bounds on the
//! true constants. Nothing here feeds back into the solver.

use std::io::Write;

use serde::Serialize;

use crate::continuation::Schedule;
use crate::error::{Error, Result};
use crate::prox::{ExtReal, ProxFunction, ProxKind};
use crate::solver::{ProblemSpec, StepSizes, Trajectory, Variant};
use crate::vecops::{dist2, dot, norm2};

/// Low-discrepancy points of `dom(h*)` used when estimating `M₂`.
pub const DOMAIN_SAMPLES: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct M1Estimate {
    pub value: f64,
    /// Iterations skipped because `g` was `+∞` at one of the two points.
    pub excluded: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InexactRow {
    /// Index of the iterate the bounds refer to (`n + 1` for step `n`).
    pub n: usize,
    pub eps: f64,
    /// `None` when `dom(h*)` is unbounded.
    pub delta: Option<f64>,
    pub err_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportSummary {
    pub m1: f64,
    pub m1_excluded: usize,
    pub m2: Option<f64>,
    /// Sampled suprema are lower bounds on `M₁`, `M₂`.
    pub m_are_lower_bounds: bool,
    pub sum_err_norm: f64,
    pub sum_sqrt_eps: f64,
    pub sum_delta: Option<f64>,
    pub norm_a_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InexactnessReport {
    pub rows: Vec<InexactRow>,
    pub summary: ReportSummary,
}

impl InexactnessReport {
    pub fn eps_seq(&self) -> impl Iterator<Item = f64> + '_ {
        self.rows.iter().map(|r| r.eps)
    }

    pub fn delta_seq(&self) -> impl Iterator<Item = Option<f64>> + '_ {
        self.rows.iter().map(|r| r.delta)
    }

    pub fn err_norms(&self) -> impl Iterator<Item = f64> + '_ {
        self.rows.iter().map(|r| r.err_norm)
    }

    /// Writes `n,eps,delta,err_norm` (empty `delta` when unavailable).
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(["n", "eps", "delta", "err_norm"])?;
        for r in &self.rows {
            wtr.write_record(&[
                r.n.to_string(),
                r.eps.to_string(),
                r.delta.map(|d| d.to_string()).unwrap_or_default(),
                r.err_norm.to_string(),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// One primal-first step of the stored trajectory: `(u_n, v_n) -> (u_{n+1}, v_{n+1})`
/// with the schedule parameters of step `k`.
struct StepView<'a> {
    k: usize,
    u: &'a [f64],
    v: &'a [f64],
    u_next: &'a [f64],
    v_next: &'a [f64],
}

fn steps<'a>(traj: &'a Trajectory) -> Result<Vec<StepView<'a>>> {
    if traj.snapshots.len() < 2 {
        return Err(Error::EmptyTrajectory);
    }
    if !traj.is_dense() {
        return Err(Error::InvalidParameter(
            "trajectory must store every iterate (snapshot_every = 1)".into(),
        ));
    }
    if traj.variant != Variant::PrimalFirst {
        return Err(Error::Unsupported(
            "inexactness accounting for the dual-first variant".into(),
        ));
    }
    Ok(traj
        .snapshots
        .windows(2)
        .enumerate()
        .map(|(k, w)| StepView {
            k,
            u: &w[0].u,
            v: &w[0].v,
            u_next: &w[1].u,
            v_next: &w[1].v,
        })
        .collect())
}

/// `sup_n |g(u_{n+1}) − g(u^{(n)})|` with `u^{(n)} = prox_{αλg}(u_n − α∇f(u_n) − αμ_n Aᵀv_n)`.
pub fn estimate_m1(
    traj: &Trajectory,
    p: &ProblemSpec,
    s: &StepSizes,
    schedule: &Schedule,
) -> Result<M1Estimate> {
    let mut value: f64 = 0.0;
    let mut excluded = 0;
    for st in steps(traj)? {
        let (_, mu_n) = schedule.at(st.k);
        let grad = p.f.gradient(st.u);
        let atv = p.a.adjoint(st.v)?;
        let am = s.alpha * mu_n;
        let arg: Vec<f64> = st
            .u
            .iter()
            .zip(&grad)
            .zip(&atv)
            .map(|((ui, gi), ai)| (ui - s.alpha * gi) - am * ai)
            .collect();
        let u_target = p.g.prox(s.alpha * p.lambda, &arg)?;
        match (p.g.eval(st.u_next)?, p.g.eval(&u_target)?) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => value = value.max((a - b).abs()),
            _ => excluded += 1,
        }
    }
    if excluded > 0 {
        log_warning(&format!(
            "M1 estimate skipped {excluded} iterations with g = +inf"
        ));
    }
    Ok(M1Estimate { value, excluded })
}

fn log_warning(msg: &str) {
    eprintln!("warning: {msg}");
}

/// Generalized golden-ratio (R_d) sequence point `j` in `[-1, 1]^dim`.
fn kronecker_point(j: usize, dim: usize) -> Vec<f64> {
    // φ_d solves x^(d+1) = x + 1
    let mut phi: f64 = 2.0;
    for _ in 0..64 {
        phi = (1.0 + phi).powf(1.0 / (dim as f64 + 1.0));
    }
    let mut a = 1.0;
    (0..dim)
        .map(|_| {
            a /= phi;
            let x = (0.5 + a * (j + 1) as f64).fract();
            2.0 * x - 1.0
        })
        .collect()
}

/// Deterministic sample of `dom(h*)`, or `None` when the domain is unbounded.
///
/// `l1`: points of `[-1, 1]^d`; `group_l21`: points mapped radially into the product of
/// unit balls; zero function: the origin.
pub fn sample_conjugate_domain(h: &ProxFunction, count: usize, offset: usize) -> Option<Vec<Vec<f64>>> {
    let dim = h.dim();
    match h.kind() {
        ProxKind::Zero => Some(vec![vec![0.0; dim]]),
        ProxKind::L1 => Some(
            (0..count)
                .map(|j| kronecker_point(j + offset, dim))
                .collect(),
        ),
        ProxKind::GroupL21 { group_size } => Some(
            (0..count)
                .map(|j| {
                    let mut x = kronecker_point(j + offset, dim);
                    for block in x.chunks_mut(*group_size) {
                        crate::prox::project_unit_ball(block);
                    }
                    x
                })
                .collect(),
        ),
        ProxKind::BoxIndicator { .. } | ProxKind::SquaredL2 { .. } => None,
    }
}

/// Point of `dom(h*)` farthest from `v` (exact for l1 and group-l2,1 balls).
fn farthest_domain_point(h: &ProxFunction, v: &[f64]) -> Option<Vec<f64>> {
    match h.kind() {
        ProxKind::Zero => Some(vec![0.0; v.len()]),
        ProxKind::L1 => Some(
            v.iter()
                .map(|x| if *x > 0.0 { -1.0 } else { 1.0 })
                .collect(),
        ),
        ProxKind::GroupL21 { group_size } => {
            let mut out = vec![0.0; v.len()];
            for (ob, vb) in out.chunks_mut(*group_size).zip(v.chunks(*group_size)) {
                let n = norm2(vb);
                if n > 0.0 {
                    for (o, x) in ob.iter_mut().zip(vb) {
                        *o = -x / n;
                    }
                    crate::prox::project_unit_ball(ob);
                } else {
                    ob[0] = 1.0;
                }
            }
            Some(out)
        }
        _ => None,
    }
}

/// `sup |h*(v_{n+1}) − h*(v)| + B ||2u_{n+1} − u_n|| ||v − v_{n+1}||` over the stored
/// steps and a sample of `dom(h*)`; `None` when the domain is unbounded.
pub fn estimate_m2(traj: &Trajectory, p: &ProblemSpec, norm_a: f64) -> Result<Option<f64>> {
    let steps = steps(traj)?;
    let Some(mut sample) = sample_conjugate_domain(&p.h, DOMAIN_SAMPLES, 0) else {
        return Ok(None);
    };
    // a thinned set of the stored dual iterates
    let stride = steps.len().div_ceil(DOMAIN_SAMPLES).max(1);
    sample.extend(steps.iter().step_by(stride).map(|st| st.v_next.to_vec()));

    let mut sup: f64 = 0.0;
    for st in &steps {
        let h_next = p.h.conjugate_eval(st.v_next)?;
        let ext: Vec<f64> = st
            .u_next
            .iter()
            .zip(st.u)
            .map(|(a, b)| 2.0 * a - b)
            .collect();
        let lever = norm_a * norm2(&ext);
        let far = farthest_domain_point(&p.h, st.v_next);
        for v in sample.iter().chain(far.iter()) {
            let h_v = p.h.conjugate_eval(v)?;
            let (ExtReal::Finite(a), ExtReal::Finite(b)) = (h_next, h_v) else {
                continue;
            };
            sup = sup.max((a - b).abs() + lever * dist2(v, st.v_next));
        }
    }
    Ok(Some(sup))
}

pub fn compute_report(
    traj: &Trajectory,
    p: &ProblemSpec,
    s: &StepSizes,
    schedule: &Schedule,
) -> Result<InexactnessReport> {
    let m1 = estimate_m1(traj, p, s, schedule)?;
    let norm_a = p.a.default_norm_bound();
    let m2 = estimate_m2(traj, p, norm_a)?;
    let (lambda, mu) = (p.lambda, p.mu);

    let mut rows = Vec::new();
    for st in steps(traj)? {
        let (lambda_n, mu_n) = schedule.at(st.k);
        let eps = if lambda_n == lambda {
            0.0
        } else {
            s.alpha * m1.value * (lambda_n - lambda).abs()
        };
        let delta = m2.map(|m2| {
            if mu_n == mu {
                0.0
            } else {
                s.beta * m2 * (1.0 / mu_n - 1.0 / mu).abs()
            }
        });
        let err_norm = if mu_n == mu {
            0.0
        } else {
            (mu_n - mu).abs() * norm2(&p.a.adjoint(st.v)?)
        };
        rows.push(InexactRow {
            n: traj.snapshots[st.k + 1].n,
            eps,
            delta,
            err_norm,
        });
    }
    let summary = ReportSummary {
        m1: m1.value,
        m1_excluded: m1.excluded,
        m2,
        m_are_lower_bounds: true,
        sum_err_norm: rows.iter().map(|r| r.err_norm).sum(),
        sum_sqrt_eps: rows.iter().map(|r| r.eps.sqrt()).sum(),
        sum_delta: m2.map(|_| rows.iter().filter_map(|r| r.delta).sum()),
        norm_a_bound: norm_a,
    };
    Ok(InexactnessReport { rows, summary })
}

/// Slack of the type-2 dual inclusion at step `k` for a point `v ∈ dom(h*)`:
///
/// `(β/μ) h*(v) − (β/μ) h*(v_{k+1}) − <v_k + (β/μ) A(2u_{k+1} − u_k) − v_{k+1}, v − v_{k+1}> + δ_{k+1}`.
///
/// Nonnegative whenever `δ_{k+1}` is a valid bound; `+∞` for `v` outside the domain.
pub fn dual_inclusion_slack(
    traj: &Trajectory,
    p: &ProblemSpec,
    s: &StepSizes,
    report: &InexactnessReport,
    k: usize,
    v: &[f64],
) -> Result<f64> {
    let steps = steps(traj)?;
    let st = steps.get(k).ok_or_else(|| {
        Error::InvalidParameter(format!("step {k} outside trajectory of {} steps", steps.len()))
    })?;
    let delta = report.rows[k].delta.ok_or_else(|| {
        Error::Unsupported("dual inclusion check with unbounded dom(h*)".into())
    })?;
    let bm = s.beta / p.mu;
    let ExtReal::Finite(h_v) = p.h.conjugate_eval(v)? else {
        return Ok(f64::INFINITY);
    };
    let ExtReal::Finite(h_next) = p.h.conjugate_eval(st.v_next)? else {
        return Err(Error::InvalidParameter("dual iterate outside dom(h*)".into()));
    };
    let ext: Vec<f64> = st
        .u_next
        .iter()
        .zip(st.u)
        .map(|(a, b)| 2.0 * a - b)
        .collect();
    let a_ext = p.a.apply(&ext)?;
    let xi: Vec<f64> = (0..st.v.len())
        .map(|i| st.v[i] + bm * a_ext[i] - st.v_next[i])
        .collect();
    let diff: Vec<f64> = v.iter().zip(st.v_next).map(|(a, b)| a - b).collect();
    Ok(bm * h_v - bm * h_next - dot(&xi, &diff) + delta)
}
