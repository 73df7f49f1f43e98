//! Majorization–minimization with Armijo backtracking.
//!
//! Each iteration minimizes the majorizer `F_τ(·, x^k)`, which reduces to one
//! half-thresholding step:
//!
//! ```text
//! x⁺ = H_{2λτ}(x^k − 2τ·g(x^k)),   τ = γ·β^j
//! ```
//!
//! taking the smallest `j ≥ 0` with `F(x^k) − F(x⁺) ≥ δ‖x⁺ − x^k‖²`. The run
//! stops once `‖x^{k+1} − x^k‖ ≤ ε·max{1, ‖x^k‖}`.

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::gradient::g_unchecked;
use crate::model::{MeasurementEnsemble, Signal};
use crate::objective::{objective_unchecked, ObjectiveParams};
use crate::prox::half_threshold_slice;
use crate::scalar::{dist, norm, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverConfig {
    pub lambda: f64,
    pub alpha: f64,
    /// Initial step `γ ∈ (0, 1]`.
    pub gamma: f64,
    /// Backtracking ratio `β ∈ (0, 1)`.
    pub beta: f64,
    /// Sufficient-decrease constant.
    pub delta: f64,
    /// Stopping tolerance.
    pub epsilon: f64,
    pub max_iter: usize,
    pub max_backtracks: usize,
}

impl SolverConfig {
    /// Defaults for everything except `λ`, which must always be chosen.
    pub fn new(lambda: f64) -> Self {
        Self {
            lambda,
            alpha: 1.345,
            gamma: 1.0,
            beta: 0.5,
            delta: 1e-4,
            epsilon: 1e-6,
            max_iter: 5000,
            max_backtracks: 60,
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn validate(&self) -> Result<()> {
        ObjectiveParams::new(self.alpha, self.lambda)?;
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return invalid(format!("gamma must lie in (0, 1], got {}", self.gamma));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return invalid(format!("beta must lie in (0, 1), got {}", self.beta));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return invalid(format!("delta must be positive, got {}", self.delta));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return invalid(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if self.max_iter == 0 {
            return invalid("max_iter must be at least 1");
        }
        if self.max_backtracks == 0 {
            return invalid("max_backtracks must be at least 1");
        }
        Ok(())
    }

    pub fn objective_params(&self) -> Result<ObjectiveParams> {
        ObjectiveParams::new(self.alpha, self.lambda)
    }
}

/// One accepted iteration. Record `k` describes the move from `x^{k-1}` to
/// `x^k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterationRecord {
    pub k: usize,
    /// `F(x^k)`.
    pub f_value: f64,
    pub tau: f64,
    /// Backtracks taken: `τ = γ·β^j`.
    pub j: usize,
    /// `‖x^k − x^{k-1}‖`.
    pub step_norm: f64,
    pub support_size: usize,
    /// [`fixed_point_residual`] of `x^k` at the accepted `τ`.
    pub fixed_point_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Termination {
    Converged,
    MaxIterations,
    LineSearchFailed,
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Termination::Converged => "converged",
            Termination::MaxIterations => "max-iterations",
            Termination::LineSearchFailed => "line-search-failed",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverResult<T> {
    pub estimate: Signal<T>,
    pub trace: Vec<IterationRecord>,
    pub termination: Termination,
    /// `F(x^0)`.
    pub initial_objective: f64,
    pub final_objective: f64,
}

impl<T> SolverResult<T> {
    pub fn iterations(&self) -> usize {
        self.trace.len()
    }

    /// Step size of the last accepted iteration.
    pub fn last_tau(&self) -> Option<f64> {
        self.trace.last().map(|r| r.tau)
    }

    /// Re-checks the sufficient-decrease inequality on every record and the
    /// bound `Σ‖Δx‖² ≤ 2F(x⁰)/δ` that follows from it.
    pub fn check_descent(&self, delta: f64) -> DescentCheck {
        let mut prev = self.initial_objective;
        let mut violations = 0;
        let mut step_sq_sum = 0.0;
        for r in &self.trace {
            let sq = r.step_norm * r.step_norm;
            if prev - r.f_value < delta * sq {
                violations += 1;
            }
            step_sq_sum += sq;
            prev = r.f_value;
        }
        let bound = 2.0 * self.initial_objective / delta;
        DescentCheck {
            violations,
            step_sq_sum,
            bound,
            holds: violations == 0 && step_sq_sum <= bound,
        }
    }
}

/// Outcome of [`SolverResult::check_descent`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DescentCheck {
    /// Records whose decrease fell short of `δ‖Δx‖²`.
    pub violations: usize,
    pub step_sq_sum: f64,
    /// `2F(x⁰)/δ`.
    pub bound: f64,
    pub holds: bool,
}

/// `‖x − H_{2λτ}(x − 2τ·g(x))‖ / max{1, ‖x‖}`; zero exactly at fixed points.
pub fn fixed_point_residual<T: Scalar>(
    x: &Signal<T>,
    e: &MeasurementEnsemble<T>,
    lambda: f64,
    alpha: f64,
    tau: f64,
) -> Result<f64> {
    e.check_signal(x)?;
    ObjectiveParams::new(alpha, lambda)?;
    if !(tau > 0.0 && tau.is_finite()) {
        return invalid(format!("tau must be positive, got {tau}"));
    }
    let gx = g_unchecked(x.as_slice(), e, alpha);
    Ok(residual_with_gradient(x.as_slice(), &gx, lambda, tau))
}

fn gradient_step<T: Scalar>(x: &[T], gx: &[T], tau: f64) -> Vec<T> {
    x.iter()
        .zip(gx)
        .map(|(&xi, &gi)| xi - gi.scale(2.0 * tau))
        .collect()
}

fn residual_with_gradient<T: Scalar>(x: &[T], gx: &[T], lambda: f64, tau: f64) -> f64 {
    let mapped = half_threshold_slice(&gradient_step(x, gx, tau), 2.0 * lambda * tau);
    dist(x, &mapped) / norm(x).max(1.0)
}

/// Runs the solver from `x0`.
pub fn solve<T: Scalar>(
    e: &MeasurementEnsemble<T>,
    x0: &Signal<T>,
    cfg: &SolverConfig,
) -> Result<SolverResult<T>> {
    solve_with_observer(e, x0, cfg, |_, _| {})
}

/// Like [`solve`], calling `observer(k, x^k)` for `x^0` and every accepted
/// iterate.
pub fn solve_with_observer<T: Scalar, F: FnMut(usize, &[T])>(
    e: &MeasurementEnsemble<T>,
    x0: &Signal<T>,
    cfg: &SolverConfig,
    mut observer: F,
) -> Result<SolverResult<T>> {
    cfg.validate()?;
    e.check_signal(x0)?;
    let params = cfg.objective_params()?;

    let mut x = x0.as_slice().to_vec();
    let mut fx = objective_unchecked(&x, e, &params);
    let initial_objective = fx;
    let mut gx = g_unchecked(&x, e, cfg.alpha);
    let mut trace = Vec::new();
    let mut termination = Termination::MaxIterations;
    observer(0, &x);

    for k in 1..=cfg.max_iter {
        let mut accepted = None;
        let mut tau = cfg.gamma;
        for j in 0..=cfg.max_backtracks {
            let candidate =
                half_threshold_slice(&gradient_step(&x, &gx, tau), 2.0 * cfg.lambda * tau);
            let f_candidate = objective_unchecked(&candidate, e, &params);
            let step_norm = dist(&candidate, &x);
            // The trace stores step_norm, so the test is phrased on exactly
            // that value.
            if fx - f_candidate >= cfg.delta * (step_norm * step_norm) {
                accepted = Some((candidate, f_candidate, step_norm, j, tau));
                break;
            }
            tau *= cfg.beta;
        }
        let Some((next, f_next, step_norm, j, tau)) = accepted else {
            termination = Termination::LineSearchFailed;
            break;
        };
        let x_norm = norm(&x);
        let g_next = g_unchecked(&next, e, cfg.alpha);
        let support_size = next.iter().filter(|v| v.norm_sqr() != 0.0).count();
        let fp = residual_with_gradient(&next, &g_next, cfg.lambda, tau);
        trace.push(IterationRecord {
            k,
            f_value: f_next,
            tau,
            j,
            step_norm,
            support_size,
            fixed_point_residual: fp,
        });
        x = next;
        fx = f_next;
        gx = g_next;
        observer(k, &x);
        if step_norm <= cfg.epsilon * x_norm.max(1.0) {
            termination = Termination::Converged;
            break;
        }
    }

    Ok(SolverResult {
        estimate: Signal::from_vec_unchecked(x),
        trace,
        termination,
        initial_objective,
        final_objective: fx,
    })
}

/// Returns `true` when the support stayed constant over the last `window`
/// records of a run. A changing support near the end usually means the run
/// stopped early.
pub fn support_settled(trace: &[IterationRecord], window: usize) -> bool {
    let tail = &trace[trace.len().saturating_sub(window)..];
    tail.windows(2).all(|w| w[0].support_size == w[1].support_size)
}

/// Writes a trace as CSV with header `k,F,tau,j,step_norm,support_size,fp_residual`.
pub fn trace_to_csv(trace: &[IterationRecord]) -> String {
    let mut out = String::from("k,F,tau,j,step_norm,support_size,fp_residual\n");
    for r in trace {
        out.push_str(&format!(
            "{},{:e},{:e},{},{:e},{},{:e}\n",
            r.k, r.f_value, r.tau, r.j, r.step_norm, r.support_size, r.fixed_point_residual
        ));
    }
    out
}
