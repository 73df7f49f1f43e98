//! Half-thresholding: the proximal map of the `ℓ_{1/2}` quasi-norm.
//!
//! For a weight `μ > 0`, `H_μ(ξ)` minimizes `‖v − ξ‖² + μ‖v‖_{1/2}^{1/2}`
//! coordinatewise. Each coordinate is
//!
//! ```text
//! χ_μ(t) = (2/3)·t·(1 + cos(2π/3 − (2/3)·arccos((μ/8)·(|t|/3)^{−3/2})))   if |t| > t̄(μ)
//!        = 0                                                              otherwise
//! ```
//!
//! with `t̄(μ) = (∛54/4)·μ^{2/3}`. At `|t| = t̄(μ)` both `0` and `(μ/2)^{2/3}`
//! are minimizers; this crate returns `0`. For complex `t` the output is a
//! nonnegative real multiple of `t`, so the phase is kept.
//!
//! Complex coordinates are shrunk through their modulus. Thresholding the
//! real and imaginary parts separately minimizes a different (larger)
//! penalty and gives a different answer; see [`split_half_threshold`].

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::model::Signal;
use crate::scalar::Scalar;

/// Prox weight `μ`, the literal coefficient of `‖v‖_{1/2}^{1/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfThresholdParams {
    mu: f64,
}

impl HalfThresholdParams {
    pub fn new(mu: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return invalid(format!("prox weight mu must be positive, got {mu}"));
        }
        Ok(Self { mu })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn threshold(&self) -> f64 {
        threshold(self.mu)
    }
}

/// `t̄(μ) = (∛54/4)·μ^{2/3} ≈ 0.9449·μ^{2/3}`.
#[inline]
pub fn threshold(mu: f64) -> f64 {
    54f64.cbrt() / 4.0 * mu.powf(2.0 / 3.0)
}

/// The nonnegative shrink factor `χ_μ(t)/t` as a function of `|t|`.
#[inline]
fn shrink_factor(modulus: f64, mu: f64) -> f64 {
    if modulus <= threshold(mu) {
        return 0.0;
    }
    // Rounding can push the argument just past 1 right above the threshold.
    let arg = (mu / 8.0 * (modulus / 3.0).powf(-1.5)).clamp(0.0, 1.0);
    2.0 / 3.0 * (1.0 + (2.0 * PI / 3.0 - 2.0 / 3.0 * arg.acos()).cos())
}

/// Scalar half-thresholding `χ_μ(t)`.
#[inline]
pub fn chi<T: Scalar>(t: T, mu: f64) -> T {
    let k = shrink_factor(t.abs(), mu);
    if k == 0.0 {
        T::zero()
    } else {
        t.scale(k)
    }
}

/// `H_μ(ξ)`, applied coordinatewise.
pub fn half_threshold<T: Scalar>(xi: &Signal<T>, params: HalfThresholdParams) -> Signal<T> {
    Signal::from_vec_unchecked(half_threshold_slice(xi.as_slice(), params.mu))
}

pub(crate) fn half_threshold_slice<T: Scalar>(xi: &[T], mu: f64) -> Vec<T> {
    xi.iter().map(|&t| chi(t, mu)).collect()
}

/// Thresholds the real and imaginary parts of a complex vector as if they
/// were independent real coordinates. This is the prox of
/// `Σ (|Re v_j|^{1/2} + |Im v_j|^{1/2})`, not of the modulus penalty.
pub fn split_half_threshold(xi: &[Complex64], mu: f64) -> Vec<Complex64> {
    xi.iter()
        .map(|z| Complex64::new(chi(z.re, mu), chi(z.im, mu)))
        .collect()
}

/// `|v − t|² + μ|v|^{1/2}`, the scalar prox objective.
#[inline]
pub fn prox_objective<T: Scalar>(v: T, t: T, mu: f64) -> f64 {
    (v - t).norm_sqr() + mu * v.abs().sqrt()
}

/// Brute-force minimizer of `|v − t|² + μ|v|^{1/2}` by grid search.
///
/// The search runs over `v = r·t/|t|`, `r ∈ [0, 2|t|]`: the objective only
/// depends on `|v|` and `Re(v̄t)`, and for fixed `|v|` the second is largest
/// when `v` is aligned with `t`. The grid is scanned coarse to fine: a coarse
/// pass locates every local minimum (including the endpoint `r = 0`), then
/// each is rescanned at spacing `grid_step` within one coarse cell either
/// side. The objective in `r` has at most two local minima, so this visits
/// the same winner as a full scan at spacing `grid_step`.
///
/// Ties resolve toward `r = 0`.
pub fn chi_oracle<T: Scalar>(t: T, mu: f64, grid_step: f64) -> Result<T> {
    if !(grid_step > 0.0 && grid_step.is_finite()) {
        return invalid(format!("grid_step must be positive, got {grid_step}"));
    }
    if !(mu > 0.0) {
        return invalid(format!("mu must be positive, got {mu}"));
    }
    let m = t.abs();
    if m == 0.0 {
        return Ok(T::zero());
    }
    let hi = 2.0 * m;
    let obj = |r: f64| (r - m) * (r - m) + mu * r.sqrt();

    // Coarse pass.
    let coarse_cells = 4096usize;
    let coarse = (hi / coarse_cells as f64).max(grid_step);
    let count = (hi / coarse).floor() as usize;
    let values: Vec<f64> = (0..=count).map(|k| obj(k as f64 * coarse)).collect();
    let mut candidates = Vec::new();
    for k in 0..values.len() {
        let left = if k == 0 { f64::INFINITY } else { values[k - 1] };
        let right = values.get(k + 1).copied().unwrap_or(f64::INFINITY);
        if values[k] <= left && values[k] <= right {
            candidates.push(k as f64 * coarse);
        }
    }

    // Fine pass at `grid_step` around each coarse local minimum.
    let mut best_r = 0.0;
    let mut best = obj(0.0);
    for c in candidates {
        let lo = (c - coarse).max(0.0);
        let up = (c + coarse).min(hi);
        let steps = ((up - lo) / grid_step).ceil() as usize;
        for k in 0..=steps {
            let r = (lo + k as f64 * grid_step).min(up);
            let v = obj(r);
            if v < best {
                best = v;
                best_r = r;
            }
        }
    }
    Ok(t.scale(best_r / m))
}
