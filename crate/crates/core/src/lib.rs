//! Primal-dual optimization by continuation.
//!
//! Solves `min_u f(u) + λ g(u) + μ h(Au)` with a first-order primal-dual iteration whose
//! weights `(λ_n, μ_n)` may vary along a schedule converging to `(λ, μ)`. Along the way the
//! iterates trace points `(g(u), h(Au), f(u))` of the Pareto value function.
//!
//! - [`linops`]: linear maps with adjoints and norm bounds
//! - [`prox`]: prox operators of simple convex functions and their conjugates
//! - [`solver`]: problem specification, step sizes, iteration and runs
//! - [`continuation`]: weight schedules and summability certificates
//! - [`pareto`]: value-function records, monotonicity/convexity checks, grid oracles
//! - [`diagnostics`]: inexactness sequences of a continuation run

pub mod continuation;
pub mod diagnostics;
pub mod error;
pub mod linops;
pub mod pareto;
pub mod prox;
pub mod solver;
pub mod vecops;

pub use continuation::{certify, Certificate, Schedule, Sequence};
pub use diagnostics::{compute_report, InexactnessReport};
pub use error::{Error, Result};
pub use linops::{Boundary, Conv2d, DenseMatrix, Grad2d, KernelSpec, LinearMap, NormBound};
pub use pareto::ParetoRecord;
pub use prox::{ExtReal, ProxFunction, ProxKind};
pub use solver::{
    run, run_baseline, IterateState, LeastSquares, ProblemSpec, RunOptions, SmoothTerm,
    StepSizes, StopReason, Trajectory, Variant, ZeroSmooth,
};
