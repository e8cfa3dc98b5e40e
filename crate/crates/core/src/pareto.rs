//! Pareto-frontier records and sampled checks of the value function
//! `φ(τ) = inf { f(u) : g(u) <= τ₁, h(Au) <= τ₂ }`.
//!
//! The frontier is the graph of `φ`, which is non-increasing and convex, and a minimizer
//! of `F_{λ,μ}` sits on it with `−(λ, μ) ∈ ∂φ(τ)`. The validators here test those
//! properties on finite record sets; the grid oracles brute-force `φ` and the Lagrange
//! dual function on problems with at most three unknowns.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::prox::ExtReal;
use crate::solver::{IterationRecord, ProblemSpec};

/// Default tolerance of the sampled-frontier checks.
pub const DEFAULT_TOL: f64 = 1e-5;

/// Frontier sample `(τ₁, τ₂, σ) = (g(u), h(Au), f(u))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParetoRecord {
    pub n: usize,
    pub lambda: f64,
    pub mu: f64,
    pub tau1: f64,
    pub tau2: f64,
    pub sigma: f64,
    pub feasible: bool,
}

impl ParetoRecord {
    pub fn new(n: usize, lambda: f64, mu: f64, tau1: f64, tau2: f64, sigma: f64) -> Self {
        Self {
            n,
            lambda,
            mu,
            tau1,
            tau2,
            sigma,
            feasible: tau1.is_finite() && tau2.is_finite(),
        }
    }
}

impl From<&IterationRecord> for ParetoRecord {
    fn from(r: &IterationRecord) -> Self {
        ParetoRecord::new(r.n, r.lambda_n, r.mu_n, r.g, r.h_au, r.f)
    }
}

pub fn record(
    u: &[f64],
    p: &ProblemSpec,
    lambda_n: f64,
    mu_n: f64,
    n: usize,
) -> Result<ParetoRecord> {
    let (f, g, h) = p.terms(u)?;
    Ok(ParetoRecord::new(n, lambda_n, mu_n, g.to_f64(), h.to_f64(), f))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairViolation {
    /// Record with the larger budgets.
    pub larger: usize,
    pub smaller: usize,
    /// `σ_larger − σ_smaller`, positive beyond `tol`.
    pub excess: f64,
}

/// Non-increase: for `τᵃ >= τᵇ` componentwise, `σᵃ <= σᵇ + tol`.
///
/// Incomparable pairs and infeasible records are skipped.
pub fn check_monotone(records: &[ParetoRecord], tol: f64) -> Vec<PairViolation> {
    let mut out = Vec::new();
    for (i, a) in records.iter().enumerate() {
        for (j, b) in records.iter().enumerate() {
            if i == j || !a.feasible || !b.feasible {
                continue;
            }
            if a.tau1 >= b.tau1 && a.tau2 >= b.tau2 {
                let excess = a.sigma - b.sigma;
                if excess > tol {
                    out.push(PairViolation {
                        larger: i,
                        smaller: j,
                        excess,
                    });
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexityViolation {
    /// The record lying above the chord / facet.
    pub point: usize,
    /// Records spanning the chord (2 entries) or facet (3 entries).
    pub support: Vec<usize>,
    /// Height above the interpolated value.
    pub excess: f64,
}

/// Convexity of the sampled frontier.
///
/// When every feasible record has the same `τ₁` the check runs on the `(τ₂, σ)` slice:
/// no point may lie above a chord between two others. Otherwise every point must lie on
/// the lower convex hull of the set, i.e. not above any segment or triangle spanned by
/// other records in the `τ` plane.
pub fn check_convex(records: &[ParetoRecord], tol: f64) -> Vec<ConvexityViolation> {
    let idx: Vec<usize> = (0..records.len())
        .filter(|&i| records[i].feasible)
        .collect();
    if idx.len() < 3 {
        return Vec::new();
    }
    let t1 = records[idx[0]].tau1;
    if idx.iter().all(|&i| records[i].tau1 == t1) {
        check_convex_slice(records, &idx, tol)
    } else {
        check_convex_hull(records, &idx, tol)
    }
}

fn check_convex_slice(records: &[ParetoRecord], idx: &[usize], tol: f64) -> Vec<ConvexityViolation> {
    let mut sorted = idx.to_vec();
    sorted.sort_by(|&a, &b| records[a].tau2.total_cmp(&records[b].tau2));
    let mut out = Vec::new();
    for (ia, &a) in sorted.iter().enumerate() {
        for (ic, &c) in sorted.iter().enumerate().skip(ia + 2) {
            let (ra, rc) = (&records[a], &records[c]);
            if !(ra.tau2 < rc.tau2) {
                continue;
            }
            for &b in &sorted[ia + 1..ic] {
                let rb = &records[b];
                if !(ra.tau2 < rb.tau2 && rb.tau2 < rc.tau2) {
                    continue;
                }
                let t = (rb.tau2 - ra.tau2) / (rc.tau2 - ra.tau2);
                let chord = ra.sigma + t * (rc.sigma - ra.sigma);
                let excess = rb.sigma - chord;
                if excess > tol {
                    out.push(ConvexityViolation {
                        point: b,
                        support: vec![a, c],
                        excess,
                    });
                }
            }
        }
    }
    out
}

fn check_convex_hull(records: &[ParetoRecord], idx: &[usize], tol: f64) -> Vec<ConvexityViolation> {
    let pt = |i: usize| (records[i].tau1, records[i].tau2, records[i].sigma);
    let mut out = Vec::new();
    for &p in idx {
        let (px, py, ps) = pt(p);
        let others: Vec<usize> = idx.iter().copied().filter(|&i| i != p).collect();
        let mut worst: Option<(f64, Vec<usize>)> = None;
        let mut consider = |excess: f64, support: Vec<usize>| {
            if excess > tol && worst.as_ref().is_none_or(|w| excess > w.0) {
                worst = Some((excess, support));
            }
        };
        for (ka, &a) in others.iter().enumerate() {
            let (ax, ay, as_) = pt(a);
            if ax == px && ay == py {
                consider(ps - as_, vec![a]);
            }
            for (kb, &b) in others.iter().enumerate().skip(ka + 1) {
                let (bx, by, bs) = pt(b);
                // p on segment [a, b] in the τ plane
                let (dx, dy) = (bx - ax, by - ay);
                let len2 = dx * dx + dy * dy;
                if len2 > 0.0 {
                    let t = ((px - ax) * dx + (py - ay) * dy) / len2;
                    let cross = (px - ax) * dy - (py - ay) * dx;
                    let scale = len2.sqrt() * (1.0 + px.abs().max(py.abs()));
                    if (0.0..=1.0).contains(&t) && cross.abs() <= 1e-12 * scale {
                        consider(ps - (as_ + t * (bs - as_)), vec![a, b]);
                    }
                }
                for &c in others.iter().skip(kb + 1) {
                    let (cx, cy, cs) = pt(c);
                    let det = (bx - ax) * (cy - ay) - (cx - ax) * (by - ay);
                    if det == 0.0 {
                        continue;
                    }
                    let wb = ((px - ax) * (cy - ay) - (cx - ax) * (py - ay)) / det;
                    let wc = ((bx - ax) * (py - ay) - (px - ax) * (by - ay)) / det;
                    let wa = 1.0 - wb - wc;
                    if wa >= 0.0 && wb >= 0.0 && wc >= 0.0 {
                        consider(ps - (wa * as_ + wb * bs + wc * cs), vec![a, b, c]);
                    }
                }
            }
        }
        if let Some((excess, support)) = worst {
            out.push(ConvexityViolation {
                point: p,
                support,
                excess,
            });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubgradientCheck {
    pub passed: bool,
    /// Smallest `σ̃ − (σ − λ(τ̃₁ − τ₁) − μ(τ̃₂ − τ₂))` over the other records.
    pub worst_slack: f64,
    pub failures: Vec<usize>,
}

/// Sampled subgradient inequality `φ(τ̃) >= φ(τ) − λ(τ̃₁ − τ₁) − μ(τ̃₂ − τ₂) − tol`,
/// with `(λ, μ)` and `τ` taken from `rec`.
pub fn subgradient_check(rec: &ParetoRecord, all: &[ParetoRecord], tol: f64) -> SubgradientCheck {
    let mut worst = f64::INFINITY;
    let mut failures = Vec::new();
    for (i, other) in all.iter().enumerate() {
        if !other.feasible {
            continue;
        }
        let bound = rec.sigma
            - rec.lambda * (other.tau1 - rec.tau1)
            - rec.mu * (other.tau2 - rec.tau2);
        let slack = other.sigma - bound;
        worst = worst.min(slack);
        if slack < -tol {
            failures.push(i);
        }
    }
    SubgradientCheck {
        passed: failures.is_empty(),
        worst_slack: worst,
        failures,
    }
}

/// Axis-aligned grid `lo + k step` (inclusive of `hi` up to rounding) in every coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl GridSpec {
    pub fn new(lo: f64, hi: f64, step: f64) -> Result<Self> {
        if !(step > 0.0 && lo <= hi && lo.is_finite() && hi.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "bad grid [{lo}, {hi}] with step {step}"
            )));
        }
        Ok(Self { lo, hi, step })
    }

    fn points_per_axis(&self) -> usize {
        ((self.hi - self.lo) / self.step + 1e-9).floor() as usize + 1
    }

    /// Calls `visit` with every grid point of dimension `dim`.
    fn for_each(&self, dim: usize, mut visit: impl FnMut(&[f64])) {
        let side = self.points_per_axis();
        let total = side.pow(dim as u32);
        let mut u = [0.0f64; 3];
        for idx in 0..total {
            let mut rest = idx;
            for uc in u.iter_mut().take(dim) {
                *uc = self.lo + (rest % side) as f64 * self.step;
                rest /= side;
            }
            visit(&u[..dim]);
        }
    }
}

fn check_small(p: &ProblemSpec) -> Result<()> {
    if p.primal_dim() > 3 {
        return Err(Error::Unsupported(format!(
            "grid oracle in dimension {}",
            p.primal_dim()
        )));
    }
    Ok(())
}

/// Brute-force `φ(τ₁, τ₂)` over the grid; `+∞` when no grid point is feasible.
pub fn value_function_oracle(
    p: &ProblemSpec,
    tau1: f64,
    tau2: f64,
    grid: &GridSpec,
) -> Result<ExtReal> {
    check_small(p)?;
    let mut best = ExtReal::PosInf;
    grid.for_each(p.primal_dim(), |u| {
        let (f, g, h) = p.terms(u).expect("grid point has problem dimension");
        if g <= ExtReal::Finite(tau1) && h <= ExtReal::Finite(tau2) && ExtReal::Finite(f) < best {
            best = ExtReal::Finite(f);
        }
    });
    Ok(best)
}

/// Brute-force Lagrange dual `inf_u f(u) + λ(g(u) − τ₁) + μ(h(Au) − τ₂)` over the grid.
pub fn dual_function_oracle(
    p: &ProblemSpec,
    lambda: f64,
    mu: f64,
    tau1: f64,
    tau2: f64,
    grid: &GridSpec,
) -> Result<ExtReal> {
    check_small(p)?;
    let mut best = ExtReal::PosInf;
    grid.for_each(p.primal_dim(), |u| {
        let (f, g, h) = p.terms(u).expect("grid point has problem dimension");
        let (Some(g), Some(h)) = (g.finite(), h.finite()) else {
            return;
        };
        let val = ExtReal::Finite(f + lambda * (g - tau1) + mu * (h - tau2));
        if val < best {
            best = val;
        }
    });
    Ok(best)
}

pub const PARETO_CSV_HEADER: [&str; 7] = ["n", "lambda", "mu", "tau1", "tau2", "sigma", "feasible"];

pub fn write_records_csv<W: Write>(records: &[ParetoRecord], writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(PARETO_CSV_HEADER)?;
    for r in records {
        wtr.write_record(&[
            r.n.to_string(),
            r.lambda.to_string(),
            r.mu.to_string(),
            r.tau1.to_string(),
            r.tau2.to_string(),
            r.sigma.to_string(),
            r.feasible.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_records_csv<R: Read>(reader: R) -> Result<Vec<ParetoRecord>> {
    let mut rdr = csv::Reader::from_reader(reader);
    if rdr.headers()?.iter().ne(PARETO_CSV_HEADER) {
        return Err(Error::InvalidParameter("unexpected Pareto record header".into()));
    }
    let bad = |what: &str, field: &str| Error::InvalidParameter(format!("bad {what} {field:?}"));
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let num = |k: usize| row[k].parse::<f64>().map_err(|_| bad("number", &row[k]));
        out.push(ParetoRecord {
            n: row[0].parse().map_err(|_| bad("index", &row[0]))?,
            lambda: num(1)?,
            mu: num(2)?,
            tau1: num(3)?,
            tau2: num(4)?,
            sigma: num(5)?,
            feasible: row[6].parse().map_err(|_| bad("flag", &row[6]))?,
        });
    }
    Ok(out)
}
