//! Distance to the truth up to the trivial ambiguity of phase retrieval.

use crate::error::{invalid, Error, Result};
use crate::model::Signal;
use crate::scalar::{dist, inner, Scalar};

/// `min_θ ‖x̂ − e^{iθ}x‖ / ‖x‖`, with `θ ∈ {0, π}` for real signals.
///
/// ```
/// use robustpr::{relative_error, Signal};
/// let x = Signal::new(vec![1.0, -2.0, 0.0]).unwrap();
/// let minus_x = Signal::new(vec![-1.0, 2.0, 0.0]).unwrap();
/// assert_eq!(relative_error(&minus_x, &x).unwrap(), 0.0);
/// assert_eq!(relative_error(&Signal::zeros(3), &x).unwrap(), 1.0);
/// ```
pub fn relative_error<T: Scalar>(x_hat: &Signal<T>, x_true: &Signal<T>) -> Result<f64> {
    if x_hat.len() != x_true.len() {
        return Err(Error::DimensionMismatch(format!(
            "estimate has length {}, truth has length {}",
            x_hat.len(),
            x_true.len()
        )));
    }
    let nx = x_true.norm();
    if nx == 0.0 {
        return invalid("relative error is undefined for a zero true signal");
    }
    Ok(aligned_distance(x_hat.as_slice(), x_true.as_slice()) / nx)
}

/// `min_θ ‖x̂ − e^{iθ}x‖`. The optimal rotation is
/// `e^{iθ*} = conj(⟨x̂, x⟩)/|⟨x̂, x⟩|`, or `±1` in the real case.
pub(crate) fn aligned_distance<T: Scalar>(x_hat: &[T], x: &[T]) -> f64 {
    let c = inner(x_hat, x);
    let mag = c.abs();
    if mag == 0.0 {
        return (crate::scalar::norm_sqr(x_hat) + crate::scalar::norm_sqr(x)).sqrt();
    }
    let phase = T::from_parts(c.re() / mag, -c.im() / mag);
    let rotated: Vec<T> = x.iter().map(|&v| phase * v).collect();
    dist(x_hat, &rotated)
}

/// Rotates `x_hat` onto `x`: returns `e^{-iθ*}x̂`, the representative of the
/// estimate closest to the truth.
pub fn align_to<T: Scalar>(x_hat: &Signal<T>, x_true: &Signal<T>) -> Result<Signal<T>> {
    if x_hat.len() != x_true.len() {
        return Err(Error::DimensionMismatch("estimate and truth lengths differ".into()));
    }
    let c = inner(x_hat.as_slice(), x_true.as_slice());
    let mag = c.abs();
    if mag == 0.0 {
        return Ok(x_hat.clone());
    }
    let phase = T::from_parts(c.re() / mag, c.im() / mag);
    Signal::new(x_hat.as_slice().iter().map(|&v| phase * v).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::generate_signal;
    use crate::scalar::norm;
    use num_complex::Complex64;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    /// `‖x̂ − e^{iθ}x‖` for a fixed angle.
    fn rotated_distance(x_hat: &[Complex64], x: &[Complex64], theta: f64) -> f64 {
        let rot = Complex64::from_polar(1.0, theta);
        let rotated: Vec<Complex64> = x.iter().map(|&v| rot * v).collect();
        dist(x_hat, &rotated)
    }

    fn triangle_bound<T: Scalar>(x_hat: &[T], x: &[T]) -> f64 {
        (norm(x_hat) + norm(x)) / norm(x)
    }

    /// Brute-force phase search: 3600-point grid, then golden-section search
    /// in the best cell.
    fn grid_oracle(x_hat: &[Complex64], x: &[Complex64]) -> f64 {
        let steps = 3600;
        let h = 2.0 * PI / steps as f64;
        let (best_k, _) = (0..steps)
            .map(|k| (k, rotated_distance(x_hat, x, k as f64 * h)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        let (mut lo, mut hi) = ((best_k as f64 - 1.0) * h, (best_k as f64 + 1.0) * h);
        let r = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let m1 = hi - r * (hi - lo);
            let m2 = lo + r * (hi - lo);
            if rotated_distance(x_hat, x, m1) <= rotated_distance(x_hat, x, m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        rotated_distance(x_hat, x, 0.5 * (lo + hi)) / norm(x)
    }

    #[test]
    fn exact_zeros() {
        let x = generate_signal::<f64>(10, 4, 1).unwrap();
        assert_eq!(relative_error(&x, &x).unwrap(), 0.0);
        let neg = Signal::new(x.as_slice().iter().map(|v| -v).collect()).unwrap();
        assert_eq!(relative_error(&neg, &x).unwrap(), 0.0);

        let z = generate_signal::<Complex64>(10, 4, 2).unwrap();
        assert_eq!(relative_error(&z, &z).unwrap(), 0.0);
        let negz = Signal::new(z.as_slice().iter().map(|v| -v).collect()).unwrap();
        assert_eq!(relative_error(&negz, &z).unwrap(), 0.0);
        let rot = Complex64::from_polar(1.0, PI / 4.0);
        let zr = Signal::new(z.as_slice().iter().map(|&v| rot * v).collect()).unwrap();
        assert!(relative_error(&zr, &z).unwrap() <= 1e-12);
    }

    #[test]
    fn zero_estimate_has_unit_error() {
        let z = generate_signal::<Complex64>(6, 3, 3).unwrap();
        assert_eq!(relative_error(&Signal::zeros(6), &z).unwrap(), 1.0);
    }

    #[test]
    fn orthogonal_pair_uses_free_phase_value() {
        let a = Signal::new(vec![1.0, 0.0]).unwrap();
        let b = Signal::new(vec![0.0, 2.0]).unwrap();
        assert!((relative_error(&a, &b).unwrap() - 5f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn zero_truth_rejected() {
        let z = Signal::<f64>::zeros(3);
        assert!(relative_error(&z, &z).is_err());
        assert!(relative_error(&Signal::<f64>::zeros(2), &Signal::new(vec![1.0; 3]).unwrap()).is_err());
    }

    #[test]
    fn closed_form_matches_grid_oracle() {
        for seed in 0..100u64 {
            let x = generate_signal::<Complex64>(8, 8, 2 * seed).unwrap();
            let y = generate_signal::<Complex64>(8, 8, 2 * seed + 1).unwrap();
            let cf = relative_error(&y, &x).unwrap();
            let oracle = grid_oracle(y.as_slice(), x.as_slice());
            assert!((cf - oracle).abs() <= 1e-9, "seed {seed}: {cf} vs {oracle}");
        }
    }

    #[test]
    fn align_to_rotates_onto_truth() {
        let x = generate_signal::<Complex64>(6, 6, 4).unwrap();
        let rot = Complex64::from_polar(1.0, 2.1);
        let y = Signal::new(x.as_slice().iter().map(|&v| rot * v).collect()).unwrap();
        let aligned = align_to(&y, &x).unwrap();
        assert!(dist(aligned.as_slice(), x.as_slice()) < 1e-12);
    }

    proptest! {
        #[test]
        fn global_phase_invariance(theta in 0.0..(2.0 * PI), seed in 0u64..1000) {
            let x = generate_signal::<Complex64>(6, 6, seed).unwrap();
            let y = generate_signal::<Complex64>(6, 3, seed + 7).unwrap();
            let rot = Complex64::from_polar(1.0, theta);
            let yr = Signal::new(y.as_slice().iter().map(|&v| rot * v).collect()).unwrap();
            let (a, b) = (relative_error(&y, &x).unwrap(), relative_error(&yr, &x).unwrap());
            prop_assert!((a - b).abs() <= 1e-12);
        }

        #[test]
        fn sign_invariance_real(seed in 0u64..1000) {
            let x = generate_signal::<f64>(6, 6, seed).unwrap();
            let y = generate_signal::<f64>(6, 4, seed + 3).unwrap();
            let neg = Signal::new(y.as_slice().iter().map(|v| -v).collect()).unwrap();
            prop_assert_eq!(relative_error(&y, &x).unwrap(), relative_error(&neg, &x).unwrap());
        }

        #[test]
        fn bounded_by_triangle(seed in 0u64..1000) {
            let x = generate_signal::<Complex64>(5, 5, seed).unwrap();
            let y = generate_signal::<Complex64>(5, 5, seed + 1).unwrap();
            prop_assert!(relative_error(&y, &x).unwrap() <= triangle_bound(y.as_slice(), x.as_slice()) + 1e-12);
        }
    }
}
