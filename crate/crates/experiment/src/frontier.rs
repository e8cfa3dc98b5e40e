//! Comparison of the continuation path with the sweep endpoints, and validation of
//! emitted records.

use serde::Serialize;

use pdcont::pareto::{check_convex, check_monotone, subgradient_check, ParetoRecord};
use pdcont::solver::IterationRecord;

/// Largest distance from a continuation point to the sweep polyline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TubeDeviation {
    /// In coordinates `(h / Δh, f / Δf)`, with `Δ` the spread of the sweep endpoints.
    pub max_deviation: f64,
    /// Iteration index of the worst point.
    pub worst_n: usize,
    pub points_checked: usize,
}

fn segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let (qx, qy) = (a.0 + t * dx, a.1 + t * dy);
    ((p.0 - qx).powi(2) + (p.1 - qy).powi(2)).sqrt()
}

/// Sweep endpoints as `(h, f)`, ordered by `h`.
pub fn endpoint_polyline(endpoints: &[IterationRecord]) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = endpoints.iter().map(|r| (r.h_au, r.f)).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)));
    pts
}

/// Maximum normalized distance of the continuation points with `μ_n` strictly inside the
/// sweep's `μ` range from the piecewise-linear interpolation of the sweep endpoints.
///
/// Returns `None` with fewer than two endpoints or a degenerate spread.
pub fn tube_deviation(
    endpoints: &[IterationRecord],
    path: &[IterationRecord],
) -> Option<TubeDeviation> {
    if endpoints.len() < 2 {
        return None;
    }
    let line = endpoint_polyline(endpoints);
    let spread = |sel: fn(&(f64, f64)) -> f64| {
        let (lo, hi) = line
            .iter()
            .map(sel)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
        hi - lo
    };
    let (dh, df) = (spread(|p| p.0), spread(|p| p.1));
    if !(dh > 0.0 && df > 0.0) {
        return None;
    }
    let scaled: Vec<(f64, f64)> = line.iter().map(|p| (p.0 / dh, p.1 / df)).collect();
    let (mu_lo, mu_hi) = endpoints
        .iter()
        .map(|r| r.mu_n)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), m| (lo.min(m), hi.max(m)));

    let mut out = TubeDeviation {
        max_deviation: 0.0,
        worst_n: 0,
        points_checked: 0,
    };
    for r in path.iter().filter(|r| r.mu_n > mu_lo && r.mu_n < mu_hi) {
        let p = (r.h_au / dh, r.f / df);
        let d = scaled
            .windows(2)
            .map(|w| segment_distance(p, w[0], w[1]))
            .fold(f64::INFINITY, f64::min);
        out.points_checked += 1;
        if d > out.max_deviation {
            out.max_deviation = d;
            out.worst_n = r.n;
        }
    }
    Some(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub endpoints: usize,
    pub tol: f64,
    pub monotone_violations: usize,
    pub convexity_violations: usize,
    pub subgradient_failures: usize,
    pub worst_subgradient_slack: f64,
    pub tube: Option<TubeDeviation>,
    pub tube_tolerance: Option<f64>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        let tube_ok = match (self.tube, self.tube_tolerance) {
            (Some(t), Some(tol)) => t.max_deviation <= tol,
            _ => true,
        };
        self.monotone_violations == 0
            && self.convexity_violations == 0
            && self.subgradient_failures == 0
            && tube_ok
    }
}

/// Runs the frontier checks on sweep endpoints and, if given, the tube check on the
/// continuation path.
pub fn validate(
    endpoints: &[IterationRecord],
    path: Option<&[IterationRecord]>,
    tol: f64,
    tube_tolerance: Option<f64>,
) -> ValidationReport {
    let recs: Vec<ParetoRecord> = endpoints.iter().map(ParetoRecord::from).collect();
    let mut failures = 0;
    let mut worst = f64::INFINITY;
    for r in &recs {
        let c = subgradient_check(r, &recs, tol);
        failures += c.failures.len();
        worst = worst.min(c.worst_slack);
    }
    ValidationReport {
        endpoints: recs.len(),
        tol,
        monotone_violations: check_monotone(&recs, tol).len(),
        convexity_violations: check_convex(&recs, tol).len(),
        subgradient_failures: failures,
        worst_subgradient_slack: worst,
        tube: path.and_then(|p| tube_deviation(endpoints, p)),
        tube_tolerance: path.and(tube_tolerance),
    }
}
