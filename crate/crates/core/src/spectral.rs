//! Spectral initialization.
//!
//! The direction is the leading eigenvector of `Y = (1/n) Σ b_i a_i a_iᴴ`, found
//! by power iteration with `Y` applied matrix-free. The output is scaled to
//! `sqrt(mean b)`, which estimates `‖x‖` for standardized sampling vectors.

use rand::Rng;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::model::{MeasurementEnsemble, Signal};
use crate::rng::{self, Stream};
use crate::scalar::{inner, norm, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralConfig {
    pub power_iterations: usize,
    /// Stop once the angle between successive iterates drops below this.
    pub power_tol: f64,
    /// Keep only this many largest-modulus entries of the direction.
    pub truncation: Option<usize>,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        Self {
            power_iterations: 200,
            power_tol: 1e-8,
            truncation: None,
        }
    }
}

impl SpectralConfig {
    /// Default configuration with truncation to `2s` entries.
    pub fn truncated(s: usize) -> Self {
        Self {
            truncation: Some(2 * s),
            ..Self::default()
        }
    }

    pub fn validate(&self, p: usize) -> Result<()> {
        if self.power_iterations == 0 {
            return invalid("power_iterations must be at least 1");
        }
        if !(self.power_tol > 0.0 && self.power_tol.is_finite()) {
            return invalid(format!("power_tol must be positive, got {}", self.power_tol));
        }
        match self.truncation {
            Some(0) => invalid("truncation must keep at least one entry"),
            Some(m) if m > p => invalid(format!("truncation {m} exceeds p = {p}")),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralInit<T> {
    pub signal: Signal<T>,
    /// Set when every observation is zero and the zero signal was returned.
    pub degenerate: bool,
    pub iterations: usize,
    /// Rayleigh quotient `vᴴYv` of each power iterate, starting with the
    /// random start vector.
    pub rayleigh: Vec<f64>,
}

/// `Y v` without forming `Y`.
fn apply_y<T: Scalar>(e: &MeasurementEnsemble<T>, v: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); e.p()];
    for (a, &b) in e.rows().zip(e.observations()) {
        let c = inner(a, v).scale(b);
        for (o, &aj) in out.iter_mut().zip(a) {
            *o += aj * c;
        }
    }
    let inv_n = 1.0 / e.n() as f64;
    out.iter_mut().for_each(|o| *o = o.scale(inv_n));
    out
}

fn normalize<T: Scalar>(v: &mut [T]) -> f64 {
    let nv = norm(v);
    if nv > 0.0 {
        v.iter_mut().for_each(|x| *x = x.scale(1.0 / nv));
    }
    nv
}

/// Zeroes all but the `m` largest-modulus entries. Ties keep the lower index.
fn keep_largest<T: Scalar>(v: &mut [T], m: usize) {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&i, &j| v[j].norm_sqr().total_cmp(&v[i].norm_sqr()).then(i.cmp(&j)));
    for &j in &order[m.min(v.len())..] {
        v[j] = T::zero();
    }
}

pub fn spectral_init<T: Scalar>(
    e: &MeasurementEnsemble<T>,
    cfg: &SpectralConfig,
    seed: u64,
) -> Result<SpectralInit<T>> {
    cfg.validate(e.p())?;
    let p = e.p();
    let mean_b = e.observations().iter().sum::<f64>() / e.n() as f64;
    if e.observations().iter().all(|&b| b == 0.0) {
        return Ok(SpectralInit {
            signal: Signal::zeros(p),
            degenerate: true,
            iterations: 0,
            rayleigh: Vec::new(),
        });
    }

    let mut r = rng::stream(seed, Stream::Spectral);
    let mut v: Vec<T> = (0..p).map(|_| T::standard_normal(&mut r)).collect();
    if normalize(&mut v) == 0.0 {
        v[r.random_range(0..p)] = T::from_real(1.0);
    }
    let mut yv = apply_y(e, &v);
    let mut rayleigh = vec![inner(&v, &yv).re()];
    let mut iterations = 0;
    for _ in 0..cfg.power_iterations {
        iterations += 1;
        let mut next = yv;
        if normalize(&mut next) == 0.0 {
            // v lies in the null space of Y; nothing more to learn.
            next = v.clone();
        }
        let overlap = inner(&v, &next).abs().min(1.0);
        let angle = (1.0 - overlap * overlap).max(0.0).sqrt();
        v = next;
        yv = apply_y(e, &v);
        rayleigh.push(inner(&v, &yv).re());
        if angle < cfg.power_tol {
            break;
        }
    }

    if let Some(m) = cfg.truncation {
        keep_largest(&mut v, m);
        normalize(&mut v);
    }
    let scale = mean_b.max(0.0).sqrt();
    let signal = v.into_iter().map(|x| x.scale(scale)).collect();
    Ok(SpectralInit {
        signal: Signal::from_vec_unchecked(signal),
        degenerate: false,
        iterations,
        rayleigh,
    })
}
