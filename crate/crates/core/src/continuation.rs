//! Penalty-parameter schedules `(λ_n)`, `(μ_n)` and their summability certificates.
//!
//! Convergence of the continuation iteration needs `Σ |λ_n − λ| < ∞` and
//! `Σ |μ_n − μ| < ∞`. Every constructor here yields a sequence with a closed-form bound
//! on that sum, so `certify` can always report a finite total.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A positive sequence converging to its target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Sequence {
    Constant {
        value: f64,
    },
    /// `x_n = target + (start − target) ρ^n`.
    Geometric {
        #[serde(alias = "from")]
        start: f64,
        #[serde(alias = "to")]
        target: f64,
        rho: f64,
    },
    /// `count` log-spaced values from `from` to `to`, then `to` forever.
    LogSpacedThenConstant { from: f64, to: f64, count: usize },
}

impl Sequence {
    pub fn constant(value: f64) -> Result<Self> {
        let s = Sequence::Constant { value };
        s.validate()?;
        Ok(s)
    }

    pub fn geometric(start: f64, target: f64, rho: f64) -> Result<Self> {
        let s = Sequence::Geometric { start, target, rho };
        s.validate()?;
        Ok(s)
    }

    pub fn log_spaced_then_constant(from: f64, to: f64, count: usize) -> Result<Self> {
        let s = Sequence::LogSpacedThenConstant { from, to, count };
        s.validate()?;
        Ok(s)
    }

    /// Checks constructor preconditions; needed after deserializing.
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, x: f64| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "{name} must be positive and finite, got {x}"
                )))
            }
        };
        match *self {
            Sequence::Constant { value } => positive("value", value),
            Sequence::Geometric { start, target, rho } => {
                positive("start", start)?;
                positive("target", target)?;
                if rho > 0.0 && rho < 1.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!(
                        "geometric ratio must lie in (0, 1), got {rho}"
                    )))
                }
            }
            Sequence::LogSpacedThenConstant { from, to, count } => {
                positive("from", from)?;
                positive("to", to)?;
                if count >= 2 {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!(
                        "log-spaced count must be at least 2, got {count}"
                    )))
                }
            }
        }
    }

    pub fn at(&self, n: usize) -> f64 {
        match *self {
            Sequence::Constant { value } => value,
            Sequence::Geometric { start, target, rho } => {
                if start == target {
                    target
                } else {
                    target + (start - target) * rho.powf(n as f64)
                }
            }
            Sequence::LogSpacedThenConstant { from, to, count } => {
                if n == 0 {
                    from
                } else if n >= count - 1 {
                    to
                } else {
                    from * (to / from).powf(n as f64 / (count - 1) as f64)
                }
            }
        }
    }

    pub fn target(&self) -> f64 {
        match *self {
            Sequence::Constant { value } => value,
            Sequence::Geometric { target, .. } => target,
            Sequence::LogSpacedThenConstant { to, .. } => to,
        }
    }

    pub fn is_constant(&self) -> bool {
        match *self {
            Sequence::Constant { .. } => true,
            Sequence::Geometric { start, target, .. } => start == target,
            Sequence::LogSpacedThenConstant { from, to, .. } => from == to,
        }
    }

    /// First index from which the sequence equals its target exactly, if any.
    pub fn settles_at(&self) -> Option<usize> {
        match *self {
            Sequence::Constant { .. } => Some(0),
            Sequence::Geometric { start, target, .. } => (start == target).then_some(0),
            Sequence::LogSpacedThenConstant { from, to, count } => {
                Some(if from == to { 0 } else { count - 1 })
            }
        }
    }

    /// Upper bound on `Σ_{n >= horizon} |x_n − target|`.
    pub fn tail_bound(&self, horizon: usize) -> f64 {
        match *self {
            Sequence::Constant { .. } => 0.0,
            Sequence::Geometric { start, target, rho } => {
                (start - target).abs() * rho.powf(horizon as f64) / (1.0 - rho)
            }
            Sequence::LogSpacedThenConstant { .. } => {
                if horizon >= self.settles_at().unwrap_or(0) {
                    0.0
                } else {
                    partial_sum(self, horizon, self.settles_at().unwrap_or(0), |d| d)
                }
            }
        }
    }

    /// Upper bound on `Σ_{n >= horizon} sqrt|x_n − target|`.
    pub fn sqrt_tail_bound(&self, horizon: usize) -> f64 {
        match *self {
            Sequence::Constant { .. } => 0.0,
            Sequence::Geometric { start, target, rho } => {
                let r = rho.sqrt();
                (start - target).abs().sqrt() * r.powf(horizon as f64) / (1.0 - r)
            }
            Sequence::LogSpacedThenConstant { .. } => {
                let settle = self.settles_at().unwrap_or(0);
                if horizon >= settle {
                    0.0
                } else {
                    partial_sum(self, horizon, settle, f64::sqrt)
                }
            }
        }
    }

    /// `Σ_{n >= 0} |x_n − target|` in closed form.
    pub fn total_deviation(&self) -> f64 {
        self.tail_bound(0)
    }
}

fn partial_sum(seq: &Sequence, from: usize, to: usize, map: impl Fn(f64) -> f64) -> f64 {
    let t = seq.target();
    (from..to).map(|n| map((seq.at(n) - t).abs())).sum()
}

/// The pair `(λ_n, μ_n)` driving one continuation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub lambda: Sequence,
    pub mu: Sequence,
}

impl Schedule {
    pub fn new(lambda: Sequence, mu: Sequence) -> Result<Self> {
        lambda.validate()?;
        mu.validate()?;
        Ok(Self { lambda, mu })
    }

    pub fn constant(lambda: f64, mu: f64) -> Result<Self> {
        Self::new(Sequence::constant(lambda)?, Sequence::constant(mu)?)
    }

    /// Constant `λ`, varying `μ`.
    pub fn mu_only(lambda: f64, mu: Sequence) -> Result<Self> {
        Self::new(Sequence::constant(lambda)?, mu)
    }

    #[inline]
    pub fn at(&self, n: usize) -> (f64, f64) {
        (self.lambda.at(n), self.mu.at(n))
    }

    pub fn lambda_target(&self) -> f64 {
        self.lambda.target()
    }

    pub fn mu_target(&self) -> f64 {
        self.mu.target()
    }

    pub fn is_constant(&self) -> bool {
        self.lambda.is_constant() && self.mu.is_constant()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SequenceCertificate {
    /// `Σ_{n < horizon} |x_n − x|`.
    pub partial_sum: f64,
    /// Bound on `Σ_{n >= horizon} |x_n − x|`.
    pub tail_bound: f64,
    /// `Σ_{n < horizon} sqrt|x_n − x|` (reported, not required).
    pub sqrt_partial_sum: f64,
    pub sqrt_tail_bound: f64,
}

impl SequenceCertificate {
    pub fn total_bound(&self) -> f64 {
        self.partial_sum + self.tail_bound
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub horizon: usize,
    pub lambda: SequenceCertificate,
    pub mu: SequenceCertificate,
    /// Both deviation sums have finite total bounds.
    pub summable: bool,
}

fn certify_sequence(seq: &Sequence, horizon: usize) -> SequenceCertificate {
    SequenceCertificate {
        partial_sum: partial_sum(seq, 0, horizon, |d| d),
        tail_bound: seq.tail_bound(horizon),
        sqrt_partial_sum: partial_sum(seq, 0, horizon, f64::sqrt),
        sqrt_tail_bound: seq.sqrt_tail_bound(horizon),
    }
}

pub fn certify(schedule: &Schedule, horizon: usize) -> Certificate {
    let lambda = certify_sequence(&schedule.lambda, horizon);
    let mu = certify_sequence(&schedule.mu, horizon);
    let summable = lambda.total_bound().is_finite() && mu.total_bound().is_finite();
    Certificate {
        horizon,
        lambda,
        mu,
        summable,
    }
}
