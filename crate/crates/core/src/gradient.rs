//! The gradient map
//!
//! ```text
//! g(x) = (1/n) Σ_i h'_α(|⟨a_i, x⟩|² − b_i) · ⟨a_i, x⟩ · a_i
//! ```
//!
//! With `⟨a, x⟩ = aᴴx` this is `∂f/∂x̄`, so `∇f = 2g` for real signals and
//! `∇_x f = g` (the Wirtinger gradient) for complex ones. For complex signals
//! the crate also exposes the realification `x̃ = [Re x; Im x] ∈ ℝ^{2p}` in
//! which `|⟨a_i, x⟩|² = x̃ᵀ A_i x̃` and `∇f̃(x̃) = 2 [Re g(x); Im g(x)]`.

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::model::{MeasurementEnsemble, Signal};
use crate::objective::{huber, huber_deriv, HuberParams};
use crate::scalar::{inner, FieldTag, Scalar};

/// Computes `g(x)`.
pub fn g<T: Scalar>(x: &Signal<T>, e: &MeasurementEnsemble<T>, alpha: f64) -> Result<Signal<T>> {
    e.check_signal(x)?;
    HuberParams::new(alpha)?;
    Ok(Signal::from_vec_unchecked(g_unchecked(x.as_slice(), e, alpha)))
}

pub(crate) fn g_unchecked<T: Scalar>(x: &[T], e: &MeasurementEnsemble<T>, alpha: f64) -> Vec<T> {
    let mut out = vec![T::zero(); e.p()];
    for (a, &b) in e.rows().zip(e.observations()) {
        let z = inner(a, x);
        let w = huber_deriv(z.norm_sqr() - b, alpha);
        if w == 0.0 {
            continue;
        }
        let coef = z.scale(w);
        for (o, &aj) in out.iter_mut().zip(a) {
            *o += coef * aj;
        }
    }
    let inv_n = 1.0 / e.n() as f64;
    for o in &mut out {
        *o = o.scale(inv_n);
    }
    out
}

/// The real gradient `∇f(x) = 2 g(x)` of a real signal.
pub fn real_gradient(x: &Signal<f64>, e: &MeasurementEnsemble<f64>, alpha: f64) -> Result<Vec<f64>> {
    Ok(g(x, e, alpha)?.into_vec().into_iter().map(|v| 2.0 * v).collect())
}

/// A complex `p`-vector laid out as `[Re x; Im x]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealifiedVector(Vec<f64>);

impl RealifiedVector {
    pub fn from_complex(x: &[Complex64]) -> Self {
        let mut v: Vec<f64> = x.iter().map(|z| z.re).collect();
        v.extend(x.iter().map(|z| z.im));
        Self(v)
    }

    pub fn from_vec(v: Vec<f64>) -> Result<Self> {
        if v.is_empty() || v.len() % 2 != 0 {
            return invalid(format!(
                "realified vector needs a positive even length, got {}",
                v.len()
            ));
        }
        Ok(Self(v))
    }

    /// Half the length: the complex dimension.
    pub fn p(&self) -> usize {
        self.0.len() / 2
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        let p = self.p();
        (0..p).map(|j| Complex64::new(self.0[j], self.0[p + j])).collect()
    }
}

/// A dense symmetric `2p × 2p` matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RealQuadratic {
    dim: usize,
    entries: Vec<f64>,
}

impl RealQuadratic {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.entries[r * self.dim + c]
    }

    /// `vᵀ A v`.
    pub fn quad_form(&self, v: &[f64]) -> f64 {
        assert_eq!(v.len(), self.dim);
        let mut acc = 0.0;
        for r in 0..self.dim {
            let row = &self.entries[r * self.dim..(r + 1) * self.dim];
            acc += v[r] * row.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
        }
        acc
    }

    /// `A v`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.dim);
        self.entries
            .chunks_exact(self.dim)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// The principal submatrix on `idx`.
    pub fn restrict(&self, idx: &[usize]) -> Vec<f64> {
        let mut out = Vec::with_capacity(idx.len() * idx.len());
        for &r in idx {
            for &c in idx {
                out.push(self.get(r, c));
            }
        }
        out
    }
}

/// The two real vectors spanning `A_i`: `u = [Re a; Im a]`, `w = [−Im a; Re a]`,
/// with `Re⟨a, x⟩ = uᵀx̃` and `Im⟨a, x⟩ = wᵀx̃`.
pub(crate) fn realified_pair(a: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
    let p = a.len();
    let mut u = vec![0.0; 2 * p];
    let mut w = vec![0.0; 2 * p];
    for (j, z) in a.iter().enumerate() {
        u[j] = z.re;
        u[p + j] = z.im;
        w[j] = -z.im;
        w[p + j] = z.re;
    }
    (u, w)
}

/// `A_i = u uᵀ + w wᵀ`, so that `x̃ᵀ A_i x̃ = |⟨a_i, x⟩|²`.
///
/// In block form with `R = Re a`, `I = Im a`:
///
/// ```text
/// [ RRᵀ + IIᵀ    RIᵀ − IRᵀ ]
/// [ IRᵀ − RIᵀ    RRᵀ + IIᵀ ]
/// ```
pub fn realify_quadratic(a: &[Complex64]) -> RealQuadratic {
    let (u, w) = realified_pair(a);
    let dim = u.len();
    let mut entries = vec![0.0; dim * dim];
    for r in 0..dim {
        for c in r..dim {
            let v = u[r] * u[c] + w[r] * w[c];
            entries[r * dim + c] = v;
            entries[c * dim + r] = v;
        }
    }
    RealQuadratic { dim, entries }
}

/// `f̃(x̃) = (1/n) Σ h_α(x̃ᵀ A_i x̃ − b_i)`, evaluated through the realified
/// quadratic forms rather than complex arithmetic.
pub fn realified_loss(
    x: &RealifiedVector,
    e: &MeasurementEnsemble<Complex64>,
    alpha: f64,
) -> Result<f64> {
    if x.p() != e.p() {
        return Err(Error::DimensionMismatch(format!(
            "realified vector has p = {}, ensemble has p = {}",
            x.p(),
            e.p()
        )));
    }
    HuberParams::new(alpha)?;
    let v = x.as_slice();
    let total: f64 = e
        .rows()
        .zip(e.observations())
        .map(|(a, &b)| {
            let (u, w) = realified_pair(a);
            let re: f64 = u.iter().zip(v).map(|(p, q)| p * q).sum();
            let im: f64 = w.iter().zip(v).map(|(p, q)| p * q).sum();
            huber(re * re + im * im - b, alpha)
        })
        .sum();
    Ok(total / e.n() as f64)
}

/// `∇f̃(x̃) = 2 [Re g(x); Im g(x)]`.
pub fn realify_gradient<T: Scalar>(
    x: &Signal<T>,
    e: &MeasurementEnsemble<T>,
    alpha: f64,
) -> Result<RealifiedVector> {
    if T::FIELD != FieldTag::Complex {
        return Err(Error::FieldMismatch {
            expected: FieldTag::Complex,
            found: T::FIELD,
        });
    }
    let gx = g(x, e, alpha)?;
    let p = gx.len();
    let mut v = vec![0.0; 2 * p];
    for (j, z) in gx.as_slice().iter().enumerate() {
        v[j] = 2.0 * z.re();
        v[p + j] = 2.0 * z.im();
    }
    Ok(RealifiedVector(v))
}
