//! The Huber data-fit term, the `ℓ_{1/2}` quasi-norm and the regularized
//! objective `F(x) = f(x) + λ‖x‖_{1/2}^{1/2}`, with
//! `f(x) = (1/n) Σ h_α(|⟨a_i, x⟩|² − b_i)`.

use crate::error::{invalid, Result};
use crate::gradient::g;
use crate::model::{MeasurementEnsemble, Signal};
use crate::scalar::{dist, inner, Scalar};

/// Huber transition threshold `α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HuberParams {
    alpha: f64,
}

impl HuberParams {
    /// The classical choice for dense noise.
    pub const NOISE: f64 = 1.345;
    /// The choice for outlier corruption.
    pub const OUTLIERS: f64 = 0.1345;

    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return invalid(format!("Huber alpha must be positive, got {alpha}"));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveParams {
    pub huber: HuberParams,
    lambda: f64,
}

impl ObjectiveParams {
    pub fn new(alpha: f64, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return invalid(format!("lambda must be positive, got {lambda}"));
        }
        Ok(Self {
            huber: HuberParams::new(alpha)?,
            lambda,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.huber.alpha
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

/// `h_α(u)`: quadratic for `|u| ≤ α`, linear beyond.
#[inline]
pub fn huber(u: f64, alpha: f64) -> f64 {
    let a = u.abs();
    if a <= alpha {
        0.5 * u * u
    } else {
        alpha * a - 0.5 * alpha * alpha
    }
}

/// `h'_α(u) = min{max{u, −α}, α}`.
#[inline]
pub fn huber_deriv(u: f64, alpha: f64) -> f64 {
    u.clamp(-alpha, alpha)
}

/// `Σ_j |x_j|^{1/2}`, with the complex modulus for complex entries.
pub fn half_norm<T: Scalar>(x: &[T]) -> f64 {
    x.iter().map(|v| v.abs().sqrt()).sum()
}

/// `f(x)`, summed in measurement order.
pub fn loss<T: Scalar>(x: &Signal<T>, e: &MeasurementEnsemble<T>, alpha: f64) -> Result<f64> {
    e.check_signal(x)?;
    HuberParams::new(alpha)?;
    Ok(loss_unchecked(x.as_slice(), e, alpha))
}

pub(crate) fn loss_unchecked<T: Scalar>(x: &[T], e: &MeasurementEnsemble<T>, alpha: f64) -> f64 {
    let total: f64 = e
        .rows()
        .zip(e.observations())
        .map(|(a, &b)| huber(inner(a, x).norm_sqr() - b, alpha))
        .sum();
    total / e.n() as f64
}

/// `F(x) = f(x) + λ‖x‖_{1/2}^{1/2}`.
pub fn objective<T: Scalar>(
    x: &Signal<T>,
    e: &MeasurementEnsemble<T>,
    params: &ObjectiveParams,
) -> Result<f64> {
    e.check_signal(x)?;
    Ok(objective_unchecked(x.as_slice(), e, params))
}

pub(crate) fn objective_unchecked<T: Scalar>(
    x: &[T],
    e: &MeasurementEnsemble<T>,
    params: &ObjectiveParams,
) -> f64 {
    loss_unchecked(x, e, params.alpha()) + params.lambda() * half_norm(x)
}

/// The majorizer `F_τ(x, y) = f(y) + 2·Re⟨g(y), x − y⟩ + ‖x − y‖²/(2τ) + λ‖x‖_{1/2}^{1/2}`.
pub fn surrogate<T: Scalar>(
    x: &Signal<T>,
    y: &Signal<T>,
    e: &MeasurementEnsemble<T>,
    params: &ObjectiveParams,
    tau: f64,
) -> Result<f64> {
    if !(tau > 0.0 && tau.is_finite()) {
        return invalid(format!("tau must be positive, got {tau}"));
    }
    e.check_signal(x)?;
    e.check_signal(y)?;
    let gy = g(y, e, params.alpha())?;
    let diff: Vec<T> = x
        .as_slice()
        .iter()
        .zip(y.as_slice())
        .map(|(&a, &b)| a - b)
        .collect();
    let linear = 2.0 * inner(gy.as_slice(), &diff).re();
    let d = dist(x.as_slice(), y.as_slice());
    Ok(loss_unchecked(y.as_slice(), e, params.alpha())
        + linear
        + d * d / (2.0 * tau)
        + params.lambda() * half_norm(x.as_slice()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{synthesize_instance, NoiseSpec};
    use num_complex::Complex64;
    use proptest::prelude::*;

    const A: f64 = 1.345;

    #[test]
    fn huber_values() {
        assert_eq!(huber(0.0, A), 0.0);
        assert_eq!(huber(1.0, A), 0.5);
        assert!((huber(2.0, A) - 1.785_487_5).abs() < 1e-12);
        assert!((huber(2.0, A) - (A * 2.0 - A * A / 2.0)).abs() < 1e-15);
    }

    #[test]
    fn huber_deriv_clamps() {
        assert_eq!(huber_deriv(0.5, A), 0.5);
        assert_eq!(huber_deriv(10.0, A), A);
        assert_eq!(huber_deriv(-2.0, A), -A);
        assert_eq!(huber_deriv(A, A), A);
        assert_eq!(huber_deriv(-A, A), -A);
    }

    #[test]
    fn half_norm_values() {
        assert_eq!(half_norm(&[4.0, 0.0, 9.0]), 5.0);
        assert!((half_norm(&[Complex64::new(3.0, 4.0)]) - 5f64.sqrt()).abs() < 1e-15);
        assert_eq!(half_norm(&[0.0f64; 3]), 0.0);
    }

    #[test]
    fn loss_vanishes_at_truth_without_noise() {
        let e = synthesize_instance::<f64>(16, 3, 64, NoiseSpec::None, 2).unwrap();
        let x = e.ground_truth().unwrap().clone();
        assert_eq!(loss(&x, &e, A).unwrap(), 0.0);
        let params = ObjectiveParams::new(A, 0.3).unwrap();
        let f = objective(&x, &e, &params).unwrap();
        assert!((f - 0.3 * half_norm(x.as_slice())).abs() < 1e-15);
    }

    #[test]
    fn loss_at_zero_with_unit_observations() {
        let e = MeasurementEnsemble::new(2, vec![1.0, 0.5, -2.0, 1.0], vec![1.0, 1.0], None, None, 0)
            .unwrap();
        let l = loss(&Signal::zeros(2), &e, A).unwrap();
        assert_eq!(l, 0.5);
    }

    #[test]
    fn zero_instance_has_zero_objective() {
        let e = MeasurementEnsemble::new(2, vec![1.0, 0.5, -2.0, 1.0], vec![0.0, 0.0], None, None, 0)
            .unwrap();
        let params = ObjectiveParams::new(A, 1.0).unwrap();
        assert_eq!(objective(&Signal::zeros(2), &e, &params).unwrap(), 0.0);
    }

    #[test]
    fn loss_matches_direct_summation() {
        let e = synthesize_instance::<Complex64>(6, 2, 20, NoiseSpec::TypeII(0.2), 4).unwrap();
        let x = crate::model::generate_signal::<Complex64>(6, 4, 99).unwrap();
        // Independent recomputation with explicit real arithmetic.
        let mut acc = 0.0;
        for i in 0..e.n() {
            let (mut re, mut im) = (0.0, 0.0);
            for j in 0..6 {
                let a = e.row(i)[j];
                let v = x[j];
                re += a.re * v.re + a.im * v.im;
                im += a.re * v.im - a.im * v.re;
            }
            let r = re * re + im * im - e.observations()[i];
            acc += if r.abs() <= A { r * r / 2.0 } else { A * r.abs() - A * A / 2.0 };
        }
        acc /= e.n() as f64;
        let l = loss(&x, &e, A).unwrap();
        assert!((l - acc).abs() <= 1e-14 * acc.abs().max(1.0), "{l} vs {acc}");
    }

    #[test]
    fn mismatched_dimensions_rejected() {
        let e = synthesize_instance::<f64>(4, 1, 8, NoiseSpec::None, 1).unwrap();
        assert!(loss(&Signal::zeros(5), &e, A).is_err());
    }

    #[test]
    fn surrogate_touches_objective_on_diagonal() {
        let e = synthesize_instance::<Complex64>(8, 2, 40, NoiseSpec::TypeI(0.1), 3).unwrap();
        let y = crate::model::generate_signal::<Complex64>(8, 5, 17).unwrap();
        let params = ObjectiveParams::new(A, 0.05).unwrap();
        let fy = objective(&y, &e, &params).unwrap();
        let s = surrogate(&y, &y, &e, &params, 0.3).unwrap();
        assert!((s - fy).abs() <= 1e-13 * fy.abs().max(1.0));
        assert!(surrogate(&y, &y, &e, &params, 0.0).is_err());
    }

    #[test]
    fn surrogate_collapses_without_gradient_and_regularizer() {
        // b chosen so y is an exact fit: g(y) = 0.
        let a = vec![1.0, 2.0, -1.0, 0.5];
        let y = Signal::new(vec![0.5, -1.0]).unwrap();
        let b = crate::model::clean_measurements(2, &a, &y);
        let e = MeasurementEnsemble::new(2, a, b, None, None, 0).unwrap();
        let params = ObjectiveParams::new(A, f64::MIN_POSITIVE).unwrap();
        let x = Signal::new(vec![2.0, 1.0]).unwrap();
        let s = surrogate(&x, &y, &e, &params, 1.0).unwrap();
        let d2 = 1.5f64.powi(2) + 2.0f64.powi(2);
        assert!((s - d2 / 2.0).abs() < 1e-12, "{s}");
    }

    #[test]
    fn objective_is_coercive_along_rays() {
        let e = synthesize_instance::<f64>(8, 2, 32, NoiseSpec::TypeI(0.1), 8).unwrap();
        let x = crate::model::generate_signal::<f64>(8, 8, 5).unwrap();
        let params = ObjectiveParams::new(A, 0.1).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for c in [2.0, 4.0, 8.0, 16.0, 32.0, 64.0] {
            let xs = Signal::new(x.as_slice().iter().map(|v| v * c).collect()).unwrap();
            let f = objective(&xs, &e, &params).unwrap();
            assert!(f > prev);
            prev = f;
        }
    }

    proptest! {
        #[test]
        fn huber_deriv_is_one_lipschitz_and_bounded(u in -50.0..50.0f64, v in -50.0..50.0f64, alpha in 0.01..5.0f64) {
            let (du, dv) = (huber_deriv(u, alpha), huber_deriv(v, alpha));
            prop_assert!((du - dv).abs() <= (u - v).abs());
            prop_assert!(du.abs() <= alpha);
        }

        #[test]
        fn huber_is_even_and_sandwiched(u in -50.0..50.0f64, alpha in 0.01..5.0f64) {
            let h = huber(u, alpha);
            prop_assert_eq!(h, huber(-u, alpha));
            prop_assert!(alpha * u.abs() - alpha * alpha / 2.0 <= h + 1e-12);
            prop_assert!(h <= alpha * u.abs() + 1e-12);
        }

        #[test]
        fn modulus_beats_split_half_norm(re in -10.0..10.0f64, im in -10.0..10.0f64) {
            prop_assume!(re * im != 0.0);
            let split = re.abs().sqrt() + im.abs().sqrt();
            let joint = Complex64::new(re, im).norm().sqrt();
            prop_assert!(split > joint);
        }
    }
}
