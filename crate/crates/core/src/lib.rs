//! Robust sparse phase retrieval.
//!
//! Recovers a sparse real or complex signal `x` from corrupted quadratic
//! measurements `b_i = |⟨a_i, x⟩|² + ε_i` by minimizing
//!
//! ```text
//! F(x) = (1/n) Σ h_α(|⟨a_i, x⟩|² − b_i) + λ Σ_j |x_j|^{1/2}
//! ```
//!
//! where `h_α` is the Huber function. Inner products are `⟨a, x⟩ = aᴴx`.
//!
//! ```
//! use robustpr::{synthesize_instance, solve, spectral_init, relative_error};
//! use robustpr::{NoiseSpec, SolverConfig, SpectralConfig};
//!
//! let e = synthesize_instance::<f64>(32, 3, 192, NoiseSpec::None, 1).unwrap();
//! let x0 = spectral_init(&e, &SpectralConfig::default(), 1).unwrap().signal;
//! let res = solve(&e, &x0, &SolverConfig::new(1e-3)).unwrap();
//! let err = relative_error(&res.estimate, e.ground_truth().unwrap()).unwrap();
//! assert!(err < 1e-2);
//! ```

pub mod bench;
pub mod diagnostics;
pub mod error;
pub mod gradient;
pub mod io;
pub mod linalg;
pub mod metrics;
pub mod model;
pub mod objective;
pub mod prox;
pub mod rng;
pub mod scalar;
pub mod solver;
pub mod spectral;

pub use diagnostics::{
    estimate_stability, linear_rate_certificate, remark5_quantities, CertificateReport,
    Remark5Report, StabilityEstimate,
};
pub use error::{Error, ParseError, Result};
pub use gradient::{g, real_gradient, realify_gradient, RealQuadratic, RealifiedVector};
pub use metrics::relative_error;
pub use model::{
    apply_noise, clean_measurements, generate_sampling, generate_signal, synthesize_instance,
    AnyEnsemble, AnySignal, MeasurementEnsemble, NoiseSpec, Signal,
};
pub use objective::{half_norm, huber, huber_deriv, loss, objective, surrogate, HuberParams, ObjectiveParams};
pub use prox::{chi, half_threshold, split_half_threshold, threshold, HalfThresholdParams};
pub use scalar::{FieldTag, Scalar};
pub use solver::{
    fixed_point_residual, solve, solve_with_observer, IterationRecord, SolverConfig, SolverResult,
    Termination,
};
pub use spectral::{spectral_init, SpectralConfig, SpectralInit};

/// The guide's chapters, compiled so their snippets run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/model.md")]
    mod model {}
    #[doc = include_str!("../../../book/src/objective.md")]
    mod objective {}
    #[doc = include_str!("../../../book/src/half-thresholding.md")]
    mod half_thresholding {}
    #[doc = include_str!("../../../book/src/initialization.md")]
    mod initialization {}
    #[doc = include_str!("../../../book/src/solver.md")]
    mod solver {}
    #[doc = include_str!("../../../book/src/metrics.md")]
    mod metrics {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
    #[doc = include_str!("../../../book/src/diagnostics.md")]
    mod diagnostics {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
