//! Scalar fields.
//!
//! Everything numeric in the crate is generic over [`Scalar`], implemented for
//! `f64` (real phase retrieval) and [`Complex64`] (complex phase retrieval).
//! Real-valued code paths therefore pay no complex-arithmetic cost.
//!
//! The inner product is `⟨a, x⟩ = aᴴx = Σ conj(a_j)·x_j` everywhere in the crate.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Which field a signal or ensemble lives over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldTag {
    Real,
    Complex,
}

impl fmt::Display for FieldTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FieldTag::Real => "real",
            FieldTag::Complex => "complex",
        })
    }
}

impl std::str::FromStr for FieldTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "real" | "r" => Ok(FieldTag::Real),
            "complex" | "c" => Ok(FieldTag::Complex),
            other => Err(format!("unknown field `{other}` (expected real or complex)")),
        }
    }
}

/// A real or complex scalar.
pub trait Scalar:
    Copy
    + Default
    + PartialEq
    + fmt::Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + Sum
{
    const FIELD: FieldTag;

    fn zero() -> Self {
        Self::default()
    }
    fn from_real(re: f64) -> Self;
    /// Builds a scalar from real and imaginary parts. For `f64` the imaginary
    /// part is discarded, callers check it beforehand when it matters.
    fn from_parts(re: f64, im: f64) -> Self;
    fn re(self) -> f64;
    fn im(self) -> f64;
    fn conj(self) -> Self;
    fn norm_sqr(self) -> f64;
    fn abs(self) -> f64;
    fn scale(self, k: f64) -> Self;
    fn is_finite(self) -> bool;
    /// Draws one standard normal scalar. Complex draws use `(g₁ + i·g₂)/√2`
    /// so that `E|z|² = 1`.
    fn standard_normal<R: rand::Rng + ?Sized>(rng: &mut R) -> Self;
}

impl Scalar for f64 {
    const FIELD: FieldTag = FieldTag::Real;

    fn from_real(re: f64) -> Self {
        re
    }
    fn from_parts(re: f64, _im: f64) -> Self {
        re
    }
    fn re(self) -> f64 {
        self
    }
    fn im(self) -> f64 {
        0.0
    }
    fn conj(self) -> Self {
        self
    }
    fn norm_sqr(self) -> f64 {
        self * self
    }
    fn abs(self) -> f64 {
        f64::abs(self)
    }
    fn scale(self, k: f64) -> Self {
        self * k
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    fn standard_normal<R: rand::Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(rand_distr::StandardNormal)
    }
}

impl Scalar for Complex64 {
    const FIELD: FieldTag = FieldTag::Complex;

    fn from_real(re: f64) -> Self {
        Complex64::new(re, 0.0)
    }
    fn from_parts(re: f64, im: f64) -> Self {
        Complex64::new(re, im)
    }
    fn re(self) -> f64 {
        self.re
    }
    fn im(self) -> f64 {
        self.im
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn norm_sqr(self) -> f64 {
        Complex64::norm_sqr(&self)
    }
    fn abs(self) -> f64 {
        self.norm()
    }
    fn scale(self, k: f64) -> Self {
        Complex64::new(self.re * k, self.im * k)
    }
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
    fn standard_normal<R: rand::Rng + ?Sized>(rng: &mut R) -> Self {
        let re: f64 = rng.sample(rand_distr::StandardNormal);
        let im: f64 = rng.sample(rand_distr::StandardNormal);
        Complex64::new(re, im).scale(std::f64::consts::FRAC_1_SQRT_2)
    }
}

/// `⟨a, x⟩ = Σ conj(a_j)·x_j`.
#[inline]
pub fn inner<T: Scalar>(a: &[T], x: &[T]) -> T {
    debug_assert_eq!(a.len(), x.len());
    let mut acc = T::zero();
    for (&aj, &xj) in a.iter().zip(x) {
        acc += aj.conj() * xj;
    }
    acc
}

/// Squared Euclidean norm.
#[inline]
pub fn norm_sqr<T: Scalar>(x: &[T]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum()
}

#[inline]
pub fn norm<T: Scalar>(x: &[T]) -> f64 {
    norm_sqr(x).sqrt()
}

/// `‖x − y‖`.
#[inline]
pub fn dist<T: Scalar>(x: &[T], y: &[T]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(&a, &b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inner_conjugates_first_argument() {
        let a = [Complex64::new(0.0, 1.0)];
        let x = [Complex64::new(1.0, 0.0)];
        assert_eq!(inner(&a, &x), Complex64::new(0.0, -1.0));
        assert_eq!(inner(&x, &a), Complex64::new(0.0, 1.0));
    }

    #[test]
    fn field_tag_parses() {
        assert_eq!("Real".parse::<FieldTag>().unwrap(), FieldTag::Real);
        assert_eq!("complex".parse::<FieldTag>().unwrap(), FieldTag::Complex);
        assert!("quaternion".parse::<FieldTag>().is_err());
    }
}
