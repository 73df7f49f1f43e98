//! Numerical checks of the conditions behind the consistency and linear-rate
//! results, evaluated on concrete ensembles and solutions.
//!
//! All of these are heuristics or certificates for a single instance. None
//! proves anything about the random ensemble as a whole.

use rand::Rng;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::linalg::SymMatrix;
use crate::model::{MeasurementEnsemble, Signal};
use crate::objective::HuberParams;
use crate::rng::{self, Stream};
use crate::scalar::{inner, FieldTag, Scalar};

/// Sampled estimates of the stability constants of a real ensemble.
///
/// Both values are minima over the directions that were tried, so they are
/// upper bounds on the true infima.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityEstimate {
    /// `min (1/n) Σ |uᵀa_i a_iᵀv|` over the sampled unit pairs.
    pub mu_hat: f64,
    /// `min (1/n) Σ_{i∈I₀} (uᵀa_i a_iᵀv)²` over the sampled unit pairs.
    pub c2_hat: f64,
    pub samples: usize,
    /// `ρ₀α`; measurements with `|ε_i|` at most this form `I₀`.
    pub inlier_threshold: f64,
    pub inlier_count: usize,
    /// False when no noise record was available and `I₀` is every measurement.
    pub inliers_from_noise_record: bool,
}

fn check_rho0(rho0: f64) -> Result<()> {
    if !(rho0 > 0.0 && rho0 < 1.0) {
        return invalid(format!("rho0 must lie in (0, 1), got {rho0}"));
    }
    Ok(())
}

fn require_real<T: Scalar>() -> Result<()> {
    if T::FIELD != FieldTag::Real {
        return Err(Error::UnsupportedField(
            "this diagnostic is defined for real ensembles only".into(),
        ));
    }
    Ok(())
}

fn unit_rows<T: Scalar>(e: &MeasurementEnsemble<T>) -> Vec<Vec<f64>> {
    e.rows()
        .map(|a| {
            let nr = a.iter().map(|v| v.re() * v.re()).sum::<f64>().sqrt();
            let k = if nr > 0.0 { 1.0 / nr } else { 0.0 };
            a.iter().map(|v| v.re() * k).collect()
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn unit_vector<R: Rng>(p: usize, r: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..p).map(|_| f64::standard_normal(r)).collect();
        let nv = dot(&v, &v).sqrt();
        if nv > 0.0 {
            return v.into_iter().map(|x| x / nv).collect();
        }
    }
}

/// `(1/n) Σ |s_i t_i| / (‖u‖‖v‖)` from the projections `s_i = uᵀa_i`,
/// `t_i = a_iᵀv`.
fn mu_value(s: &[f64], t: &[f64], n: usize) -> f64 {
    s.iter().zip(t).map(|(a, b)| (a * b).abs()).sum::<f64>() / n as f64
}

/// Coordinate descent on `u` for the homogeneous objective
/// `Σ w_i |uᵀa_i| / ‖u‖` with `w_i = |t_i|`. Candidate moves for a coordinate
/// are the breakpoints that zero one term (largest weights first) and a few
/// scaled steps.
fn refine_mu_side(rows: &[Vec<f64>], u: &mut [f64], weights: &[f64], n: usize) {
    let p = u.len();
    let mut s: Vec<f64> = rows.iter().map(|a| dot(a, u)).collect();
    let mut nu2 = dot(u, u);
    let objective = |s: &[f64], nu2: f64| {
        s.iter().zip(weights).map(|(a, w)| a.abs() * w).sum::<f64>() / (n as f64 * nu2.sqrt())
    };
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&i, &j| weights[j].total_cmp(&weights[i]).then(i.cmp(&j)));
    order.truncate(64);
    let mut best = objective(&s, nu2);
    let mut step = 0.5;
    for _sweep in 0..30 {
        let mut improved = false;
        for j in 0..p {
            let mut candidates: Vec<f64> = order
                .iter()
                .filter(|&&i| rows[i][j] != 0.0)
                .map(|&i| -s[i] / rows[i][j])
                .collect();
            candidates.extend([-u[j], step, -step]);
            let mut best_d = 0.0;
            for d in candidates {
                let new_u = u[j] + d;
                let nu2_new = nu2 - u[j] * u[j] + new_u * new_u;
                if nu2_new <= 1e-24 {
                    continue;
                }
                let num: f64 = s
                    .iter()
                    .zip(rows)
                    .zip(weights)
                    .map(|((si, a), w)| (si + d * a[j]).abs() * w)
                    .sum();
                let val = num / (n as f64 * nu2_new.sqrt());
                if val < best {
                    best = val;
                    best_d = d;
                }
            }
            if best_d != 0.0 {
                improved = true;
                for (si, a) in s.iter_mut().zip(rows) {
                    *si += best_d * a[j];
                }
                nu2 = nu2 - u[j] * u[j] + (u[j] + best_d) * (u[j] + best_d);
                u[j] += best_d;
                // A breakpoint move zeroes s_i only up to rounding.
                for &i in &order {
                    if s[i].abs() <= 1e-15 * nu2.sqrt() {
                        s[i] = 0.0;
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
            if step < 1e-6 {
                break;
            }
        }
    }
    let nu = nu2.sqrt();
    u.iter_mut().for_each(|x| *x /= nu);
}

/// Minimizes `Σ_{i∈I} (uᵀa_i)² t_i²` over unit `u` exactly: the minimizer is
/// the bottom eigenvector of `Σ t_i² a_i a_iᵀ`.
fn refine_c2_side(rows: &[Vec<f64>], inliers: &[bool], t: &[f64], p: usize) -> (f64, Vec<f64>) {
    let mut m = SymMatrix::zeros(p);
    for ((a, &keep), &ti) in rows.iter().zip(inliers).zip(t) {
        if keep {
            m.add_outer(a, ti * ti);
        }
    }
    m.min_eigen()
}

fn c2_value(s: &[f64], t: &[f64], inliers: &[bool], n: usize) -> f64 {
    s.iter()
        .zip(t)
        .zip(inliers)
        .filter(|(_, &k)| k)
        .map(|((a, b), _)| (a * b).powi(2))
        .sum::<f64>()
        / n as f64
}

/// Estimates the stability constants of a real ensemble from `samples` random
/// unit pairs, then refines from the worst pair. Rows are normalized to unit
/// length first.
pub fn estimate_stability<T: Scalar>(
    e: &MeasurementEnsemble<T>,
    samples: usize,
    rho0: f64,
    alpha: f64,
    seed: u64,
) -> Result<StabilityEstimate> {
    require_real::<T>()?;
    if samples == 0 {
        return invalid("samples must be at least 1");
    }
    check_rho0(rho0)?;
    HuberParams::new(alpha)?;
    let (p, n) = (e.p(), e.n());
    let rows = unit_rows(e);
    let threshold = rho0 * alpha;
    let (inliers, from_record) = match e.noise_record() {
        Some(eps) => (eps.iter().map(|x| x.abs() <= threshold).collect(), true),
        None => (vec![true; n], false),
    };

    let mut r = rng::stream(seed, Stream::Diagnostics);
    let project = |v: &[f64]| -> Vec<f64> { rows.iter().map(|a| dot(a, v)).collect() };
    let mut best_mu = (f64::INFINITY, Vec::new(), Vec::new());
    let mut best_c2 = (f64::INFINITY, Vec::new(), Vec::new());
    for _ in 0..samples {
        let u = unit_vector(p, &mut r);
        let v = unit_vector(p, &mut r);
        let (s, t) = (project(&u), project(&v));
        let mu = mu_value(&s, &t, n);
        if mu < best_mu.0 {
            best_mu = (mu, u.clone(), v.clone());
        }
        let c2 = c2_value(&s, &t, &inliers, n);
        if c2 < best_c2.0 {
            best_c2 = (c2, u, v);
        }
    }

    let (_, mut u, mut v) = best_mu;
    for _ in 0..4 {
        let t: Vec<f64> = project(&v).iter().map(|x| x.abs()).collect();
        refine_mu_side(&rows, &mut u, &t, n);
        let s: Vec<f64> = project(&u).iter().map(|x| x.abs()).collect();
        refine_mu_side(&rows, &mut v, &s, n);
    }
    let mu_hat = best_mu.0.min(mu_value(&project(&u), &project(&v), n));

    let (_, mut u, mut v) = best_c2;
    let mut c2_hat = best_c2.0;
    for _ in 0..10 {
        let (_, nu) = refine_c2_side(&rows, &inliers, &project(&v), p);
        u = nu;
        let (val, nv) = refine_c2_side(&rows, &inliers, &project(&u), p);
        v = nv;
        c2_hat = c2_hat.min(val.max(0.0) / n as f64);
    }
    c2_hat = c2_hat.min(c2_value(&project(&u), &project(&v), &inliers, n));

    Ok(StabilityEstimate {
        mu_hat: mu_hat.max(0.0),
        c2_hat: c2_hat.max(0.0),
        samples,
        inlier_threshold: threshold,
        inlier_count: inliers.iter().filter(|&&k| k).count(),
        inliers_from_noise_record: from_record,
    })
}

/// The spectral quantities of the linear-rate condition at a candidate
/// solution, and whether the condition holds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateReport {
    pub field: FieldTag,
    /// Support of `x*`.
    pub support: Vec<usize>,
    /// Support of the realified `x̃*` (complex only): `Γ ∪ {p + j : j ∈ Γ}`.
    pub realified_support: Option<Vec<usize>>,
    pub eps1: f64,
    pub inlier_count: usize,
    pub boundary_count: usize,
    pub lhs_min_eig: f64,
    pub rhs_boundary_norms: f64,
    pub rhs_reg_term: f64,
    pub passed: bool,
}

impl CertificateReport {
    /// Recomputes the verdict from the numeric fields.
    pub fn verdict(&self) -> bool {
        self.lhs_min_eig >= self.rhs_boundary_norms + self.rhs_reg_term
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

/// `ε₁ = (1 − ρ₀)·α` with `ρ₀ = 1/2`.
pub fn default_eps1(alpha: f64) -> f64 {
    0.5 * alpha
}

/// Largest eigenvalue modulus of the rank-two matrix `U M Uᵀ` with
/// `U = [u w]` and `M` symmetric 2×2, from the 2×2 product `M·UᵀU`.
fn low_rank_norm(u: &[f64], w: &[f64], m: [[f64; 2]; 2]) -> f64 {
    let g = [[dot(u, u), dot(u, w)], [dot(w, u), dot(w, w)]];
    let mg = [
        [m[0][0] * g[0][0] + m[0][1] * g[1][0], m[0][0] * g[0][1] + m[0][1] * g[1][1]],
        [m[1][0] * g[0][0] + m[1][1] * g[1][0], m[1][0] * g[0][1] + m[1][1] * g[1][1]],
    ];
    let tr = mg[0][0] + mg[1][1];
    let det = mg[0][0] * mg[1][1] - mg[0][1] * mg[1][0];
    let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
    ((tr + disc) / 2.0).abs().max(((tr - disc) / 2.0).abs())
}

/// Evaluates the linear-rate condition at `x_star`.
///
/// Real case: with `H_i = (1/n)(3⟨a_i,x*⟩² − b_i) a_{iΓ} a_{iΓ}ᵀ`, the
/// condition is
/// `λ_min(Σ_{inliers} H_i) ≥ 3 Σ_{boundary} ‖H_i‖ + (3λ/4) max_{j∈Γ} |x*_j|^{−3/2}`.
/// Inliers have `|residual| ≤ α − ε₁`; boundary measurements have
/// `||residual| − α| < ε₁`.
///
/// Complex case: the same with the realified
/// `H̃_i = (1/n)(2 A_i x̃ x̃ᵀ A_i + (x̃ᵀA_i x̃ − b_i) A_i)` restricted to the
/// realified support, and `(3λ/2)` in the regularizer term.
pub fn linear_rate_certificate<T: Scalar>(
    x_star: &Signal<T>,
    e: &MeasurementEnsemble<T>,
    lambda: f64,
    alpha: f64,
    eps1: f64,
) -> Result<CertificateReport> {
    e.check_signal(x_star)?;
    HuberParams::new(alpha)?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return invalid(format!("lambda must be positive, got {lambda}"));
    }
    if !(eps1 > 0.0 && eps1 < alpha) {
        return invalid(format!("eps1 must lie in (0, alpha) = (0, {alpha}), got {eps1}"));
    }
    let support = x_star.support();
    if support.is_empty() {
        return invalid("certificate needs a solution with nonempty support");
    }
    let n = e.n() as f64;
    let p = e.p();
    let x = x_star.as_slice();
    let min_mod = support.iter().map(|&j| x[j].abs()).fold(f64::INFINITY, f64::min);
    let reg_max = min_mod.powf(-1.5);

    let (dim, realified_support) = match T::FIELD {
        FieldTag::Real => (support.len(), None),
        FieldTag::Complex => {
            let mut idx = support.clone();
            idx.extend(support.iter().map(|&j| p + j));
            (idx.len(), Some(idx))
        }
    };
    let mut lhs = SymMatrix::zeros(dim);
    let mut boundary_sum = 0.0;
    let (mut inlier_count, mut boundary_count) = (0, 0);

    for (a, &b) in e.rows().zip(e.observations()) {
        let c = inner(a, x);
        let residual = c.norm_sqr() - b;
        let inlier = residual.abs() <= alpha - eps1;
        let boundary = (residual.abs() - alpha).abs() < eps1;
        if !inlier && !boundary {
            continue;
        }
        // Restricted realified pair: u_Γ = [Re a_Γ; Im a_Γ], w_Γ = [−Im a_Γ; Re a_Γ].
        // In the real case only u_Γ = a_Γ is used.
        let (u, w): (Vec<f64>, Vec<f64>) = match T::FIELD {
            FieldTag::Real => (support.iter().map(|&j| a[j].re()).collect(), Vec::new()),
            FieldTag::Complex => {
                let mut u: Vec<f64> = support.iter().map(|&j| a[j].re()).collect();
                u.extend(support.iter().map(|&j| a[j].im()));
                let mut w: Vec<f64> = support.iter().map(|&j| -a[j].im()).collect();
                w.extend(support.iter().map(|&j| a[j].re()));
                (u, w)
            }
        };
        // H = (1/n) U M Uᵀ with M = 2ccᵀ + r·I, c = (Re⟨a,x⟩, Im⟨a,x⟩).
        let (cr, ci) = (c.re(), c.im());
        let m = [
            [2.0 * cr * cr + residual, 2.0 * cr * ci],
            [2.0 * ci * cr, 2.0 * ci * ci + residual],
        ];
        if inlier {
            inlier_count += 1;
            match T::FIELD {
                FieldTag::Real => lhs.add_outer(&u, (3.0 * c.norm_sqr() - b) / n),
                FieldTag::Complex => {
                    let mut h = SymMatrix::zeros(dim);
                    for r in 0..dim {
                        for q in r..dim {
                            let v = u[r] * (m[0][0] * u[q] + m[0][1] * w[q])
                                + w[r] * (m[1][0] * u[q] + m[1][1] * w[q]);
                            h.set(r, q, v / n);
                        }
                    }
                    lhs.add_scaled(&h, 1.0);
                }
            }
        }
        if boundary {
            boundary_count += 1;
            boundary_sum += match T::FIELD {
                FieldTag::Real => (3.0 * c.norm_sqr() - b).abs() * dot(&u, &u) / n,
                FieldTag::Complex => low_rank_norm(&u, &w, m) / n,
            };
        }
    }

    let lhs_min_eig = lhs.min_eigen().0;
    let rhs_reg_term = match T::FIELD {
        FieldTag::Real => 0.75 * lambda * reg_max,
        FieldTag::Complex => 1.5 * lambda * reg_max,
    };
    let mut report = CertificateReport {
        field: T::FIELD,
        support,
        realified_support,
        eps1,
        inlier_count,
        boundary_count,
        lhs_min_eig,
        rhs_boundary_norms: 3.0 * boundary_sum,
        rhs_reg_term,
        passed: false,
    };
    report.passed = report.verdict();
    Ok(report)
}

/// Noise-weighted spectral norms that show whether the linear-rate condition is
/// plausible for a given noise realization.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Remark5Report {
    pub support: Vec<usize>,
    pub eps1: f64,
    /// `‖(1/n) Σ_{|ε_i| ≤ α−ε₁} ε_i a_{iΓ} a_{iΓ}ᵀ‖₂`.
    pub inlier_noise_norm: f64,
    /// `‖(1/n) Σ_{||ε_i|−α| < ε₁} ε_i a_{iΓ} a_{iΓ}ᵀ‖₂`.
    pub boundary_noise_norm: f64,
    /// `λ_min((2/n) Σ_{|ε_i| ≤ α−ε₁} ⟨a_i,x⟩² a_{iΓ} a_{iΓ}ᵀ)`.
    pub quadratic_min_eig: f64,
    pub inlier_count: usize,
    pub boundary_count: usize,
}

impl Remark5Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

/// Evaluates the noise-weighted norms with `ε₁ = (1 − ρ₀)α` on the support of
/// `x`.
pub fn remark5_quantities<T: Scalar>(
    x: &Signal<T>,
    e: &MeasurementEnsemble<T>,
    alpha: f64,
    rho0: f64,
) -> Result<Remark5Report> {
    require_real::<T>()?;
    e.check_signal(x)?;
    HuberParams::new(alpha)?;
    check_rho0(rho0)?;
    let eps = e
        .noise_record()
        .ok_or_else(|| Error::MissingData("remark5 needs an instance with a noise record".into()))?;
    let support = x.support();
    if support.is_empty() {
        return invalid("remark5 needs a signal with nonempty support");
    }
    let eps1 = (1.0 - rho0) * alpha;
    let k = support.len();
    let n = e.n() as f64;
    let (mut inlier, mut boundary, mut quad) =
        (SymMatrix::zeros(k), SymMatrix::zeros(k), SymMatrix::zeros(k));
    let (mut inlier_count, mut boundary_count) = (0, 0);
    for (a, &ei) in e.rows().zip(eps) {
        let a_g: Vec<f64> = support.iter().map(|&j| a[j].re()).collect();
        if ei.abs() <= alpha - eps1 {
            inlier_count += 1;
            inlier.add_outer(&a_g, ei / n);
            quad.add_outer(&a_g, 2.0 * inner(a, x.as_slice()).norm_sqr() / n);
        }
        if (ei.abs() - alpha).abs() < eps1 {
            boundary_count += 1;
            boundary.add_outer(&a_g, ei / n);
        }
    }
    Ok(Remark5Report {
        support,
        eps1,
        inlier_noise_norm: inlier.spectral_norm(),
        boundary_noise_norm: boundary.spectral_norm(),
        quadratic_min_eig: quad.min_eigen().0,
        inlier_count,
        boundary_count,
    })
}

/// Inputs to the consistency-condition check. The stability constants and
/// `E|ε₁|` are usually estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsistencyInputs {
    pub n: usize,
    pub p: usize,
    pub alpha: f64,
    pub lambda: f64,
    pub rho0: f64,
    pub c1: f64,
    pub c2: f64,
    pub mean_abs_noise: f64,
}

/// Which of the consistency conditions hold for a given truth and parameter
/// choice. Report only: nothing downstream depends on it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyAdvice {
    /// `sqrt(2(2p+1) log(1+2n) / n)`.
    pub t_n: f64,
    pub c1_above_half: bool,
    pub rho0_ok: bool,
    /// `6 E|ε₁| / (2(1−ρ₀)C₁ − 1)`, infinite when the denominator is not positive.
    pub alpha_lower_bound: f64,
    pub alpha_ok: bool,
    /// `|x|_min ≥ 2 t_n^{1/6}`.
    pub min_entry_ok: bool,
    pub lambda_upper_bound: f64,
    pub lambda_lower_bound: f64,
    pub lambda_ok: bool,
    /// The rate `√2 λ ‖x‖₀^{1/2} / (C₂ |x|_min^{1/2} ‖x‖²)`.
    pub r_n: f64,
}

pub fn consistency_advice<T: Scalar>(
    x_true: &Signal<T>,
    inp: &ConsistencyInputs,
) -> Result<ConsistencyAdvice> {
    let support = x_true.support();
    if support.is_empty() {
        return invalid("consistency advice needs a nonzero truth");
    }
    if inp.n == 0 || inp.p == 0 {
        return invalid("n and p must be positive");
    }
    let x = x_true.as_slice();
    let (n, p) = (inp.n as f64, inp.p as f64);
    let t_n = (2.0 * (2.0 * p + 1.0) * (1.0 + 2.0 * n).ln() / n).sqrt();
    let denom = 2.0 * (1.0 - inp.rho0) * inp.c1 - 1.0;
    let alpha_lower_bound = if denom > 0.0 {
        6.0 * inp.mean_abs_noise / denom
    } else {
        f64::INFINITY
    };
    let x_min = support.iter().map(|&j| x[j].abs()).fold(f64::INFINITY, f64::min);
    let s_half = (support.len() as f64).sqrt();
    let half = crate::objective::half_norm(x);
    let norm2 = x_true.norm().powi(2);
    let lambda_upper_bound = 0.25 * inp.c2 * t_n.powf(2.0 / 3.0) / (s_half + half);
    let lambda_lower_bound = std::f64::consts::FRAC_1_SQRT_2 * inp.c2 * x_min.sqrt() * norm2 * t_n / s_half;
    Ok(ConsistencyAdvice {
        t_n,
        c1_above_half: inp.c1 > 0.5,
        rho0_ok: inp.rho0 > 0.0 && inp.c1 > 0.0 && inp.rho0 < 1.0 - 1.0 / (2.0 * inp.c1),
        alpha_lower_bound,
        alpha_ok: inp.alpha >= alpha_lower_bound,
        min_entry_ok: x_min >= 2.0 * t_n.powf(1.0 / 6.0),
        lambda_upper_bound,
        lambda_lower_bound,
        lambda_ok: inp.lambda <= lambda_upper_bound && inp.lambda >= lambda_lower_bound,
        r_n: std::f64::consts::SQRT_2 * inp.lambda * s_half / (inp.c2 * x_min.sqrt() * norm2),
    })
}
