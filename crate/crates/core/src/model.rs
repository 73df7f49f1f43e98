//! Signals, measurement ensembles and the synthetic instance generator.
//!
//! The measurement model is `b_i = |⟨a_i, x⟩|² + ε_i` with `a_i` the rows of an
//! `n × p` sampling matrix.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::rng::{self, Stream};
use crate::scalar::{inner, norm_sqr, FieldTag, Scalar};

/// A length-`p` vector over the field of `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal<T> {
    entries: Vec<T>,
}

impl<T: Scalar> Signal<T> {
    /// Rejects empty or non-finite vectors.
    pub fn new(entries: Vec<T>) -> Result<Self> {
        if entries.is_empty() {
            return invalid("signal length must be at least 1");
        }
        if let Some(j) = entries.iter().position(|v| !v.is_finite()) {
            return invalid(format!("signal entry {j} is not finite"));
        }
        Ok(Self { entries })
    }

    pub fn zeros(p: usize) -> Self {
        Self {
            entries: vec![T::zero(); p.max(1)],
        }
    }

    pub(crate) fn from_vec_unchecked(entries: Vec<T>) -> Self {
        Self { entries }
    }

    pub fn field(&self) -> FieldTag {
        T::FIELD
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.entries
    }

    pub fn into_vec(self) -> Vec<T> {
        self.entries
    }

    pub fn norm(&self) -> f64 {
        norm_sqr(&self.entries).sqrt()
    }

    /// Indices of nonzero entries, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, v)| v.norm_sqr() != 0.0)
            .map(|(j, _)| j)
            .collect()
    }

    /// `‖x‖₀`.
    pub fn nnz(&self) -> usize {
        self.entries.iter().filter(|v| v.norm_sqr() != 0.0).count()
    }
}

impl Signal<f64> {
    /// Embeds a real signal into the complex field.
    pub fn to_complex(&self) -> Signal<Complex64> {
        Signal {
            entries: self.entries.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }
}

impl<T> std::ops::Index<usize> for Signal<T> {
    type Output = T;
    fn index(&self, j: usize) -> &T {
        &self.entries[j]
    }
}

/// Sampling vectors, observations and optional ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementEnsemble<T> {
    p: usize,
    n: usize,
    /// Row-major `n × p`.
    sampling: Vec<T>,
    observations: Vec<f64>,
    ground_truth: Option<Signal<T>>,
    noise_record: Option<Vec<f64>>,
    seed: u64,
}

impl<T: Scalar> MeasurementEnsemble<T> {
    /// Validates shapes and finiteness. When both ground truth and a noise
    /// record are supplied the model identity is checked as well.
    pub fn new(
        p: usize,
        sampling: Vec<T>,
        observations: Vec<f64>,
        ground_truth: Option<Signal<T>>,
        noise_record: Option<Vec<f64>>,
        seed: u64,
    ) -> Result<Self> {
        let n = observations.len();
        if p == 0 || n == 0 {
            return invalid(format!("ensemble needs n >= 1 and p >= 1 (got n={n}, p={p})"));
        }
        if sampling.len() != n * p {
            return Err(Error::DimensionMismatch(format!(
                "sampling matrix has {} entries, expected n*p = {}",
                sampling.len(),
                n * p
            )));
        }
        if let Some(i) = observations.iter().position(|b| !b.is_finite()) {
            return invalid(format!("observation {i} is not finite"));
        }
        if sampling.iter().any(|v| !v.is_finite()) {
            return invalid("sampling matrix has non-finite entries");
        }
        if let Some(x) = &ground_truth {
            if x.len() != p {
                return Err(Error::DimensionMismatch(format!(
                    "ground truth has length {}, expected {p}",
                    x.len()
                )));
            }
        }
        if let Some(eps) = &noise_record {
            if eps.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "noise record has length {}, expected {n}",
                    eps.len()
                )));
            }
        }
        let e = Self {
            p,
            n,
            sampling,
            observations,
            ground_truth,
            noise_record,
            seed,
        };
        if e.ground_truth.is_some() && e.noise_record.is_some() {
            let gap = e.model_residual().unwrap_or(0.0);
            let max_b = e.observations.iter().fold(0.0f64, |m, &b| m.max(b.abs()));
            if gap > 1e-12 * (1.0 + max_b) {
                return invalid(format!(
                    "observations disagree with ground truth and noise record by {gap:e}"
                ));
            }
        }
        Ok(e)
    }

    pub fn field(&self) -> FieldTag {
        T::FIELD
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The `i`-th sampling vector `a_i`.
    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.sampling[i * self.p..(i + 1) * self.p]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> + '_ {
        self.sampling.chunks_exact(self.p)
    }

    pub fn sampling(&self) -> &[T] {
        &self.sampling
    }

    pub fn observations(&self) -> &[f64] {
        &self.observations
    }

    pub fn ground_truth(&self) -> Option<&Signal<T>> {
        self.ground_truth.as_ref()
    }

    pub fn noise_record(&self) -> Option<&[f64]> {
        self.noise_record.as_deref()
    }

    /// `max_i |b_i − |⟨a_i, x_true⟩|² − ε_i|`, when both are recorded.
    pub fn model_residual(&self) -> Option<f64> {
        let x = self.ground_truth.as_ref()?;
        let eps = self.noise_record.as_ref()?;
        Some(
            self.rows()
                .zip(&self.observations)
                .zip(eps)
                .map(|((a, &b), &e)| (b - inner(a, x.as_slice()).norm_sqr() - e).abs())
                .fold(0.0, f64::max),
        )
    }

    /// A copy restricted to the given measurement indices. Ground truth is
    /// kept; the noise record is restricted alongside.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let mut sampling = Vec::with_capacity(indices.len() * self.p);
        let mut obs = Vec::with_capacity(indices.len());
        for &i in indices {
            sampling.extend_from_slice(self.row(i));
            obs.push(self.observations[i]);
        }
        let noise = self
            .noise_record
            .as_ref()
            .map(|eps| indices.iter().map(|&i| eps[i]).collect());
        Self::new(
            self.p,
            sampling,
            obs,
            self.ground_truth.clone(),
            noise,
            self.seed,
        )
    }

    /// Checks that `x` lives in this ensemble's ambient space.
    pub fn check_signal(&self, x: &Signal<T>) -> Result<()> {
        if x.len() != self.p {
            return Err(Error::DimensionMismatch(format!(
                "signal has length {}, ensemble has p = {}",
                x.len(),
                self.p
            )));
        }
        Ok(())
    }
}

/// One of the corruption models, with its intensity `η`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseSpec {
    None,
    /// Dense bounded: `ε_i ~ U(0, η‖x‖²)`.
    TypeI(f64),
    /// Laplace: `ε_i ~ Laplace(0, μ/√2)`, `μ = η·sqrt(Σ b_i²/n)`.
    TypeII(f64),
    /// Outliers: each `b_i` is replaced by a draw from `U(0, ‖x‖²)` with
    /// probability `η`.
    TypeIII(f64),
    /// `ε_i = η‖b‖/√n · w_i`, `w_i` standard normal.
    Gaussian(f64),
}

impl NoiseSpec {
    pub fn eta(&self) -> f64 {
        match *self {
            NoiseSpec::None => 0.0,
            NoiseSpec::TypeI(e)
            | NoiseSpec::TypeII(e)
            | NoiseSpec::TypeIII(e)
            | NoiseSpec::Gaussian(e) => e,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let eta = self.eta();
        if !(eta >= 0.0 && eta.is_finite()) {
            return invalid(format!("noise intensity must be finite and >= 0, got {eta}"));
        }
        if let NoiseSpec::TypeIII(p) = self {
            if *p > 1.0 {
                return invalid(format!("outlier probability must be <= 1, got {p}"));
            }
        }
        Ok(())
    }

    /// True for the outlier model, where a small Huber threshold is appropriate.
    pub fn is_outlier_model(&self) -> bool {
        matches!(self, NoiseSpec::TypeIII(_))
    }
}

impl serde::Serialize for NoiseSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl fmt::Display for NoiseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseSpec::None => f.write_str("none"),
            NoiseSpec::TypeI(e) => write!(f, "type1:{e}"),
            NoiseSpec::TypeII(e) => write!(f, "type2:{e}"),
            NoiseSpec::TypeIII(e) => write!(f, "type3:{e}"),
            NoiseSpec::Gaussian(e) => write!(f, "gaussian:{e}"),
        }
    }
}

impl FromStr for NoiseSpec {
    type Err = String;

    /// Parses `none`, `type1:η`, `type2:η`, `type3:η` or `gaussian:η`.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim().to_ascii_lowercase();
        if s == "none" {
            return Ok(NoiseSpec::None);
        }
        let (kind, eta) = s
            .split_once(':')
            .ok_or_else(|| format!("noise `{s}` must be `none` or `<kind>:<eta>`"))?;
        let eta: f64 = eta
            .parse()
            .map_err(|_| format!("noise intensity `{eta}` is not a number"))?;
        let spec = match kind {
            "type1" | "typei" | "i" => NoiseSpec::TypeI(eta),
            "type2" | "typeii" | "ii" | "laplace" => NoiseSpec::TypeII(eta),
            "type3" | "typeiii" | "iii" | "outliers" => NoiseSpec::TypeIII(eta),
            "gaussian" | "gauss" => NoiseSpec::Gaussian(eta),
            other => return Err(format!("unknown noise kind `{other}`")),
        };
        spec.validate().map_err(|e| e.to_string())?;
        Ok(spec)
    }
}

/// An `s`-sparse signal with a uniformly random support and standard normal
/// nonzeros.
pub fn generate_signal<T: Scalar>(p: usize, s: usize, seed: u64) -> Result<Signal<T>> {
    if p == 0 {
        return invalid("p must be at least 1");
    }
    if s == 0 || s > p {
        return invalid(format!("sparsity s must satisfy 1 <= s <= p (got s={s}, p={p})"));
    }
    let mut rng = rng::stream(seed, Stream::Signal);
    let mut support = rand::seq::index::sample(&mut rng, p, s).into_vec();
    support.sort_unstable();
    let mut x = vec![T::zero(); p];
    for j in support {
        // Redraw the (measure-zero) exact zero so the support size is exact.
        let mut v = T::standard_normal(&mut rng);
        while v.norm_sqr() == 0.0 {
            v = T::standard_normal(&mut rng);
        }
        x[j] = v;
    }
    Ok(Signal::from_vec_unchecked(x))
}

/// An `n × p` row-major matrix of i.i.d. standard normal entries.
pub fn generate_sampling<T: Scalar>(p: usize, n: usize, seed: u64) -> Result<Vec<T>> {
    if p == 0 || n == 0 {
        return invalid(format!("sampling needs n >= 1 and p >= 1 (got n={n}, p={p})"));
    }
    let mut rng = rng::stream(seed, Stream::Sampling);
    Ok((0..n * p).map(|_| T::standard_normal(&mut rng)).collect())
}

/// `|⟨a_i, x⟩|²` for every row.
pub fn clean_measurements<T: Scalar>(p: usize, sampling: &[T], x: &Signal<T>) -> Vec<f64> {
    sampling
        .chunks_exact(p)
        .map(|a| inner(a, x.as_slice()).norm_sqr())
        .collect()
}

fn laplace<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> f64 {
    // Inverse CDF on u ∈ (−1/2, 1/2).
    let u: f64 = rng.random::<f64>() - 0.5;
    -scale * u.signum() * (1.0 - 2.0 * u.abs()).ln()
}

/// Corrupts clean measurements. Returns `(b, ε)` with `b_i = clean_i + ε_i`.
pub fn apply_noise<T: Scalar>(
    clean: &[f64],
    x_true: &Signal<T>,
    spec: NoiseSpec,
    seed: u64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    spec.validate()?;
    let n = clean.len();
    let mut rng = rng::stream(seed, Stream::Noise);
    let x_norm_sqr = norm_sqr(x_true.as_slice());
    let eps: Vec<f64> = match spec {
        NoiseSpec::None => vec![0.0; n],
        NoiseSpec::TypeI(eta) => {
            let mu = eta * x_norm_sqr;
            (0..n).map(|_| mu * rng.random::<f64>()).collect()
        }
        NoiseSpec::TypeII(eta) => {
            let rms = (clean.iter().map(|b| b * b).sum::<f64>() / n as f64).sqrt();
            let scale = eta * rms / std::f64::consts::SQRT_2;
            (0..n).map(|_| laplace(&mut rng, scale)).collect()
        }
        NoiseSpec::TypeIII(prob) => clean
            .iter()
            .map(|&b| {
                // Both draws are taken for every i so the stream layout does
                // not depend on which measurements get corrupted.
                let flag = rng.random::<f64>() < prob;
                let replacement = x_norm_sqr * rng.random::<f64>();
                if flag {
                    replacement - b
                } else {
                    0.0
                }
            })
            .collect(),
        NoiseSpec::Gaussian(eta) => {
            let b_norm = clean.iter().map(|b| b * b).sum::<f64>().sqrt();
            let scale = eta * b_norm / (n as f64).sqrt();
            (0..n)
                .map(|_| scale * rng.sample::<f64, _>(rand_distr::StandardNormal))
                .collect()
        }
    };
    let b = clean.iter().zip(&eps).map(|(c, e)| c + e).collect();
    Ok((b, eps))
}

/// Draws a full instance: signal, sampling matrix, clean measurements, noise.
pub fn synthesize_instance<T: Scalar>(
    p: usize,
    s: usize,
    n: usize,
    spec: NoiseSpec,
    seed: u64,
) -> Result<MeasurementEnsemble<T>> {
    spec.validate()?;
    let x = generate_signal::<T>(p, s, seed)?;
    let sampling = generate_sampling::<T>(p, n, seed)?;
    let clean = clean_measurements(p, &sampling, &x);
    let (b, eps) = apply_noise(&clean, &x, spec, seed)?;
    MeasurementEnsemble::new(p, sampling, b, Some(x), Some(eps), seed)
}

/// A signal over either field.
#[derive(Debug, Clone, PartialEq)]
pub enum AnySignal {
    Real(Signal<f64>),
    Complex(Signal<Complex64>),
}

impl AnySignal {
    pub fn field(&self) -> FieldTag {
        match self {
            AnySignal::Real(_) => FieldTag::Real,
            AnySignal::Complex(_) => FieldTag::Complex,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            AnySignal::Real(x) => x.len(),
            AnySignal::Complex(x) => x.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// An ensemble over either field, as read from an instance file.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyEnsemble {
    Real(MeasurementEnsemble<f64>),
    Complex(MeasurementEnsemble<Complex64>),
}

impl AnyEnsemble {
    pub fn field(&self) -> FieldTag {
        match self {
            AnyEnsemble::Real(_) => FieldTag::Real,
            AnyEnsemble::Complex(_) => FieldTag::Complex,
        }
    }

    pub fn p(&self) -> usize {
        match self {
            AnyEnsemble::Real(e) => e.p(),
            AnyEnsemble::Complex(e) => e.p(),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            AnyEnsemble::Real(e) => e.n(),
            AnyEnsemble::Complex(e) => e.n(),
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            AnyEnsemble::Real(e) => e.seed(),
            AnyEnsemble::Complex(e) => e.seed(),
        }
    }

    pub fn synthesize(
        field: FieldTag,
        p: usize,
        s: usize,
        n: usize,
        spec: NoiseSpec,
        seed: u64,
    ) -> Result<Self> {
        Ok(match field {
            FieldTag::Real => AnyEnsemble::Real(synthesize_instance(p, s, n, spec, seed)?),
            FieldTag::Complex => AnyEnsemble::Complex(synthesize_instance(p, s, n, spec, seed)?),
        })
    }
}
