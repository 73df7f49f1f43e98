//! Monte Carlo experiments: success rates over a grid of sample sizes,
//! error-versus-iteration curves, λ selection and error-versus-n sweeps.
//!
//! Every trial draws its instance from `mix_seed(master_seed, [n, trial])`, so
//! reports are reproducible bit for bit and adding a grid point leaves the
//! other trials untouched. Trials run on the current rayon pool and are
//! collected in `(n, trial)` order.

use std::time::Instant;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::metrics::relative_error;
use crate::model::{synthesize_instance, MeasurementEnsemble, NoiseSpec, Signal};
use crate::objective::loss;
use crate::rng::{self, mix_seed, Stream};
use crate::scalar::{FieldTag, Scalar};
use crate::solver::{
    fixed_point_residual, solve, solve_with_observer, SolverConfig, SolverResult, Termination,
};
use crate::spectral::{spectral_init, SpectralConfig};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSpec {
    pub field: FieldTag,
    pub p: usize,
    pub s: usize,
    /// Ascending sample sizes.
    pub n_grid: Vec<usize>,
    pub noise: NoiseSpec,
    pub trials: usize,
    pub solver: SolverConfig,
    pub spectral: SpectralConfig,
    pub master_seed: u64,
    /// A trial succeeds when its relative error is below this.
    pub success_threshold: f64,
    /// Record wall-clock time per trial. Off by default so that reports are
    /// reproducible byte for byte.
    pub record_timing: bool,
}

impl ExperimentSpec {
    /// 50 trials, success below `5e-3`, spectral truncation to `2s` for
    /// complex fields and none for real ones.
    pub fn new(
        field: FieldTag,
        p: usize,
        s: usize,
        n_grid: Vec<usize>,
        noise: NoiseSpec,
        solver: SolverConfig,
    ) -> Self {
        let spectral = match field {
            FieldTag::Real => SpectralConfig::default(),
            FieldTag::Complex => SpectralConfig {
                truncation: Some((2 * s).min(p)),
                ..SpectralConfig::default()
            },
        };
        Self {
            field,
            p,
            s,
            n_grid,
            noise,
            trials: 50,
            solver,
            spectral,
            master_seed: 0,
            success_threshold: 5e-3,
            record_timing: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p == 0 || self.s == 0 || self.s > self.p {
            return invalid(format!("need 1 <= s <= p, got p = {}, s = {}", self.p, self.s));
        }
        if self.trials == 0 {
            return invalid("trials must be at least 1");
        }
        if self.n_grid.is_empty() {
            return invalid("n grid must not be empty");
        }
        if self.n_grid.contains(&0) {
            return invalid("every n in the grid must be positive");
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return invalid("n grid must be strictly ascending");
        }
        if !(self.success_threshold > 0.0) {
            return invalid("success threshold must be positive");
        }
        self.noise.validate()?;
        self.solver.validate()?;
        self.spectral.validate(self.p)
    }

    /// Seed of trial `trial` at sample size `n`.
    pub fn trial_seed(&self, n: usize, trial: usize) -> u64 {
        mix_seed(self.master_seed, &[n as u64, trial as u64])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub n: usize,
    pub trial: usize,
    pub seed: u64,
    pub relative_error: f64,
    pub iterations: usize,
    pub termination: Termination,
    pub final_objective: f64,
    /// Fixed-point residual of the estimate at the last accepted step size.
    pub fp_residual: f64,
    /// Whether the trace passed [`SolverResult::check_descent`].
    pub descent_ok: bool,
    pub success: bool,
    pub wall_time: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregate {
    pub n: usize,
    /// `n / p`.
    pub ratio: f64,
    pub success_rate: f64,
    pub median_error: f64,
    pub mean_error: f64,
    pub mean_iterations: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub spec: ExperimentSpec,
    pub records: Vec<TrialRecord>,
    pub aggregates: Vec<Aggregate>,
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

fn run_trial<T: Scalar>(spec: &ExperimentSpec, n: usize, trial: usize) -> Result<TrialRecord> {
    let seed = spec.trial_seed(n, trial);
    let start = spec.record_timing.then(Instant::now);
    let e = synthesize_instance::<T>(spec.p, spec.s, n, spec.noise, seed)?;
    let x0 = spectral_init(&e, &spec.spectral, seed)?.signal;
    let res = solve(&e, &x0, &spec.solver)?;
    let wall_time = start.map(|t| t.elapsed().as_secs_f64());
    let err = relative_error(&res.estimate, e.ground_truth().expect("synthesized"))?;
    let fp = match res.last_tau() {
        Some(tau) => fixed_point_residual(&res.estimate, &e, spec.solver.lambda, spec.solver.alpha, tau)?,
        None => f64::NAN,
    };
    Ok(TrialRecord {
        n,
        trial,
        seed,
        relative_error: err,
        iterations: res.iterations(),
        termination: res.termination,
        final_objective: res.final_objective,
        fp_residual: fp,
        descent_ok: res.check_descent(spec.solver.delta).holds,
        success: err < spec.success_threshold && res.termination != Termination::LineSearchFailed,
        wall_time,
    })
}

fn aggregate(spec: &ExperimentSpec, records: &[TrialRecord]) -> Vec<Aggregate> {
    spec.n_grid
        .iter()
        .map(|&n| {
            let rows: Vec<&TrialRecord> = records.iter().filter(|r| r.n == n).collect();
            let errs: Vec<f64> = rows.iter().map(|r| r.relative_error).collect();
            let k = rows.len() as f64;
            Aggregate {
                n,
                ratio: n as f64 / spec.p as f64,
                success_rate: rows.iter().filter(|r| r.success).count() as f64 / k,
                median_error: median(&errs),
                mean_error: errs.iter().sum::<f64>() / k,
                mean_iterations: rows.iter().map(|r| r.iterations as f64).sum::<f64>() / k,
            }
        })
        .collect()
}

/// Runs every `(n, trial)` pair of the spec. A trial whose line search fails
/// still produces a record and counts as a failure.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    spec.validate()?;
    let jobs: Vec<(usize, usize)> = spec
        .n_grid
        .iter()
        .flat_map(|&n| (0..spec.trials).map(move |t| (n, t)))
        .collect();
    let records: Vec<TrialRecord> = jobs
        .par_iter()
        .map(|&(n, t)| match spec.field {
            FieldTag::Real => run_trial::<f64>(spec, n, t),
            FieldTag::Complex => run_trial::<num_complex::Complex64>(spec, n, t),
        })
        .collect::<Result<_>>()?;
    let aggregates = aggregate(spec, &records);
    Ok(ExperimentReport {
        spec: spec.clone(),
        records,
        aggregates,
    })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|t| format!("{t:e}")).unwrap_or_default()
}

impl ExperimentReport {
    /// One row per trial.
    pub fn records_csv(&self) -> String {
        let timing = self.spec.record_timing;
        let mut out = String::from(
            "n,trial,seed,relative_error,iterations,termination,final_objective,fp_residual,descent_ok,success",
        );
        out.push_str(if timing { ",wall_time\n" } else { "\n" });
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{:e},{},{},{:e},{:e},{},{}",
                r.n,
                r.trial,
                r.seed,
                r.relative_error,
                r.iterations,
                r.termination,
                r.final_objective,
                r.fp_residual,
                r.descent_ok,
                r.success
            ));
            if timing {
                out.push(',');
                out.push_str(&fmt_opt(r.wall_time));
            }
            out.push('\n');
        }
        out
    }

    /// One row per sample size.
    pub fn aggregates_csv(&self) -> String {
        let mut out =
            String::from("n,ratio,success_rate,median_error,mean_error,mean_iterations\n");
        for a in &self.aggregates {
            out.push_str(&format!(
                "{},{},{},{:e},{:e},{}\n",
                a.n, a.ratio, a.success_rate, a.median_error, a.mean_error, a.mean_iterations
            ));
        }
        out
    }

    /// Configuration echo and aggregates.
    pub fn summary_json(&self) -> String {
        let v = serde_json::json!({
            "spec": self.spec,
            "aggregates": self.aggregates,
        });
        serde_json::to_string_pretty(&v).expect("report serializes") + "\n"
    }
}

/// Relative error of every iterate, `x⁰` included.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorCurve<T> {
    /// `(k, relative error of x^k)`.
    pub points: Vec<(usize, f64)>,
    pub result: SolverResult<T>,
}

impl<T> ErrorCurve<T> {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,rel_error\n");
        for (k, e) in &self.points {
            out.push_str(&format!("{k},{e:e}\n"));
        }
        out
    }
}

/// Solves from `x0` and records the relative error of every iterate.
pub fn error_vs_iteration<T: Scalar>(
    e: &MeasurementEnsemble<T>,
    x0: &Signal<T>,
    cfg: &SolverConfig,
) -> Result<ErrorCurve<T>> {
    let truth = e
        .ground_truth()
        .ok_or_else(|| Error::MissingData("error curve needs an instance with ground truth".into()))?;
    if truth.norm() == 0.0 {
        return invalid("error curve needs a nonzero ground truth");
    }
    let mut points = Vec::new();
    let result = solve_with_observer(e, x0, cfg, |k, x| {
        let err = relative_error(&Signal::from_vec_unchecked(x.to_vec()), truth)
            .expect("lengths checked by the solver");
        points.push((k, err));
    })?;
    Ok(ErrorCurve { points, result })
}

/// How candidate values of `λ` are scored. Lower is better.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ValidationRule {
    /// Relative error against the ground truth.
    Oracle,
    /// Fit on a random 80% of the measurements and score by the Huber loss on
    /// the remaining 20%.
    Holdout { seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaScore {
    pub lambda: f64,
    pub score: f64,
    pub relative_error: Option<f64>,
    pub iterations: usize,
    pub termination: Termination,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaSearch {
    pub chosen: f64,
    pub table: Vec<LambdaScore>,
}

impl LambdaSearch {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda,score,relative_error,iterations,termination\n");
        for r in &self.table {
            out.push_str(&format!(
                "{:e},{:e},{},{},{}\n",
                r.lambda,
                r.score,
                fmt_opt(r.relative_error),
                r.iterations,
                r.termination
            ));
        }
        out
    }
}

/// 80/20 split of `0..n`, both halves nonempty when `n ≥ 2`.
fn holdout_split(n: usize, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng::stream(seed, Stream::Holdout));
    let test = ((n as f64 * 0.2).round() as usize).clamp(1, n - 1);
    let mut train = idx[test..].to_vec();
    let mut held = idx[..test].to_vec();
    train.sort_unstable();
    held.sort_unstable();
    (train, held)
}

/// Solves once per candidate `λ`, each time from the spectral initializer of
/// the fitting set, and picks the best score. Ties go to the larger `λ`.
pub fn lambda_grid_search<T: Scalar>(
    e: &MeasurementEnsemble<T>,
    cfg_base: &SolverConfig,
    grid: &[f64],
    rule: ValidationRule,
    spectral: &SpectralConfig,
    init_seed: u64,
) -> Result<LambdaSearch> {
    if grid.is_empty() {
        return invalid("lambda grid must not be empty");
    }
    let truth = e.ground_truth();
    let (fit, held) = match rule {
        ValidationRule::Oracle => {
            if truth.is_none() {
                return Err(Error::MissingData(
                    "oracle validation needs an instance with ground truth".into(),
                ));
            }
            (e.clone(), None)
        }
        ValidationRule::Holdout { seed } => {
            if e.n() < 2 {
                return invalid("holdout validation needs at least two measurements");
            }
            let (train, test) = holdout_split(e.n(), seed);
            (e.subset(&train)?, Some(e.subset(&test)?))
        }
    };
    let x0 = spectral_init(&fit, spectral, init_seed)?.signal;
    let table: Vec<LambdaScore> = grid
        .par_iter()
        .map(|&lambda| {
            let cfg = SolverConfig { lambda, ..*cfg_base };
            let res = solve(&fit, &x0, &cfg)?;
            let rel = truth.map(|t| relative_error(&res.estimate, t)).transpose()?;
            let score = match &held {
                None => rel.expect("oracle rule has truth"),
                Some(h) => loss(&res.estimate, h, cfg.alpha)?,
            };
            Ok(LambdaScore {
                lambda,
                score,
                relative_error: rel,
                iterations: res.iterations(),
                termination: res.termination,
            })
        })
        .collect::<Result<_>>()?;
    let best = table
        .iter()
        .min_by(|a, b| a.score.total_cmp(&b.score).then(b.lambda.total_cmp(&a.lambda)))
        .expect("nonempty grid");
    Ok(LambdaSearch {
        chosen: best.lambda,
        table,
    })
}

/// An error-versus-n sweep. With `lambda_exponent = Some(ϱ)` the weight at
/// sample size `n` is `λ·(p ln n / n)^ϱ`, otherwise `λ` is held fixed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencySpec {
    pub base: ExperimentSpec,
    pub lambda_exponent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyRow {
    pub n: usize,
    pub ratio: f64,
    pub lambda: f64,
    pub median_error: f64,
    pub mean_error: f64,
    pub success_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub rows: Vec<ConsistencyRow>,
    pub records: Vec<TrialRecord>,
}

impl ConsistencyReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,ratio,lambda,median_error,mean_error,success_rate\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{:e},{:e},{:e},{}\n",
                r.n, r.ratio, r.lambda, r.median_error, r.mean_error, r.success_rate
            ));
        }
        out
    }
}

pub fn consistency_experiment(spec: &ConsistencySpec) -> Result<ConsistencyReport> {
    spec.base.validate()?;
    let mut rows = Vec::new();
    let mut records = Vec::new();
    for &n in &spec.base.n_grid {
        let lambda = match spec.lambda_exponent {
            Some(rho) => {
                let p = spec.base.p as f64;
                spec.base.solver.lambda * (p * (n as f64).ln() / n as f64).powf(rho)
            }
            None => spec.base.solver.lambda,
        };
        let sub = ExperimentSpec {
            n_grid: vec![n],
            solver: SolverConfig { lambda, ..spec.base.solver },
            ..spec.base.clone()
        };
        let rep = run_experiment(&sub)?;
        let a = &rep.aggregates[0];
        rows.push(ConsistencyRow {
            n,
            ratio: a.ratio,
            lambda,
            median_error: a.median_error,
            mean_error: a.mean_error,
            success_rate: a.success_rate,
        });
        records.extend(rep.records);
    }
    Ok(ConsistencyReport { rows, records })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn easy_spec() -> ExperimentSpec {
        let mut spec = ExperimentSpec::new(
            FieldTag::Real,
            16,
            2,
            vec![160],
            NoiseSpec::None,
            SolverConfig::new(1e-4),
        );
        spec.trials = 1;
        spec.master_seed = 3;
        spec
    }

    #[test]
    fn median_values() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!(median(&[]).is_nan());
    }

    #[test]
    fn single_easy_trial_succeeds() {
        let rep = run_experiment(&easy_spec()).unwrap();
        assert_eq!(rep.records.len(), 1);
        assert_eq!(rep.aggregates[0].success_rate, 1.0);
        assert!(rep.records[0].descent_ok);
    }

    #[test]
    fn underdetermined_noisy_grid_mostly_fails() {
        let mut spec = ExperimentSpec::new(
            FieldTag::Real,
            16,
            2,
            vec![16],
            NoiseSpec::TypeI(0.1),
            SolverConfig::new(1e-3),
        );
        spec.trials = 10;
        let rep = run_experiment(&spec).unwrap();
        assert!(rep.aggregates[0].success_rate <= 0.2, "{:?}", rep.aggregates);
    }

    #[test]
    fn reports_are_reproducible() {
        let mut spec = easy_spec();
        spec.n_grid = vec![48, 96];
        spec.trials = 3;
        let a = run_experiment(&spec).unwrap();
        let b = run_experiment(&spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.records_csv(), b.records_csv());
        assert_eq!(a.records.len(), 6);
        let order: Vec<(usize, usize)> = a.records.iter().map(|r| (r.n, r.trial)).collect();
        assert_eq!(order, vec![(48, 0), (48, 1), (48, 2), (96, 0), (96, 1), (96, 2)]);
    }

    #[test]
    fn adding_grid_points_keeps_other_trials() {
        let mut spec = easy_spec();
        spec.n_grid = vec![96];
        let a = run_experiment(&spec).unwrap();
        spec.n_grid = vec![48, 96];
        let b = run_experiment(&spec).unwrap();
        assert_eq!(a.records[0], b.records[1]);
    }

    #[test]
    fn spec_validation() {
        let mut spec = easy_spec();
        spec.n_grid = vec![];
        assert!(run_experiment(&spec).is_err());
        spec.n_grid = vec![64, 32];
        assert!(spec.validate().is_err());
        spec = easy_spec();
        spec.trials = 0;
        assert!(spec.validate().is_err());
    }

    #[test]
    fn curve_from_truth_starts_small() {
        let e = synthesize_instance::<f64>(16, 2, 160, NoiseSpec::None, 5).unwrap();
        let x0 = e.ground_truth().unwrap().clone();
        let curve = error_vs_iteration(&e, &x0, &SolverConfig::new(1e-6)).unwrap();
        assert!(curve.points[0].1 <= 5e-3);
        assert_eq!(curve.points.len(), curve.result.iterations() + 1);
    }

    #[test]
    fn curve_from_spectral_start_ends_small() {
        let e = synthesize_instance::<Complex64>(16, 2, 160, NoiseSpec::None, 6).unwrap();
        let x0 = spectral_init(&e, &SpectralConfig::truncated(2), 6).unwrap().signal;
        let curve = error_vs_iteration(&e, &x0, &SolverConfig::new(1e-4)).unwrap();
        assert!(curve.points.last().unwrap().1 < 5e-3, "{:?}", curve.points.last());
        assert!(curve.to_csv().starts_with("k,rel_error\n0,"));
    }

    #[test]
    fn curve_needs_truth() {
        let e = MeasurementEnsemble::new(1, vec![1.0], vec![1.0], None, None, 0).unwrap();
        assert!(error_vs_iteration(&e, &Signal::zeros(1), &SolverConfig::new(0.1)).is_err());
    }

    #[test]
    fn lambda_search_rules() {
        let e = synthesize_instance::<f64>(16, 2, 160, NoiseSpec::None, 7).unwrap();
        let spectral = SpectralConfig::default();
        let base = SolverConfig::new(1.0);
        let one = lambda_grid_search(&e, &base, &[0.3], ValidationRule::Oracle, &spectral, 1).unwrap();
        assert_eq!(one.chosen, 0.3);

        let grid = [1e-6, 1e-4, 1e-2, 1.0];
        let s = lambda_grid_search(&e, &base, &grid, ValidationRule::Oracle, &spectral, 1).unwrap();
        let best = s.table.iter().find(|r| r.lambda == s.chosen).unwrap();
        assert!(s.chosen < 1.0);
        assert!(best.relative_error.unwrap() < 5e-3);

        let h = lambda_grid_search(&e, &base, &grid, ValidationRule::Holdout { seed: 2 }, &spectral, 1)
            .unwrap();
        assert_eq!(h.table.len(), 4);
        assert!(grid.contains(&h.chosen));

        let no_truth =
            MeasurementEnsemble::new(16, e.sampling().to_vec(), e.observations().to_vec(), None, None, 0)
                .unwrap();
        assert!(lambda_grid_search(&no_truth, &base, &grid, ValidationRule::Oracle, &spectral, 1).is_err());
        assert!(lambda_grid_search(&e, &base, &[], ValidationRule::Oracle, &spectral, 1).is_err());
    }

    #[test]
    fn ties_go_to_the_larger_lambda() {
        // b = 0: every λ returns the zero estimate with identical holdout loss.
        let e = MeasurementEnsemble::new(2, vec![1.0, 0.5, -0.2, 1.0, 0.3, 0.3, 2.0, -1.0, 0.1, 0.9], vec![0.0; 5], None, None, 0)
            .unwrap();
        let s = lambda_grid_search(
            &e,
            &SolverConfig::new(1.0),
            &[0.1, 0.5, 0.2],
            ValidationRule::Holdout { seed: 0 },
            &SpectralConfig::default(),
            0,
        )
        .unwrap();
        assert_eq!(s.chosen, 0.5);
    }

    #[test]
    fn holdout_split_is_eighty_twenty() {
        let (train, test) = holdout_split(100, 4);
        assert_eq!((train.len(), test.len()), (80, 20));
        let mut all: Vec<usize> = train.iter().chain(&test).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..100).collect::<Vec<_>>());
    }

    #[test]
    fn consistency_error_shrinks_with_n() {
        let mut base = ExperimentSpec::new(
            FieldTag::Real,
            16,
            2,
            vec![64, 512],
            NoiseSpec::Gaussian(0.05),
            SolverConfig::new(1e-3),
        );
        base.trials = 6;
        let rep = consistency_experiment(&ConsistencySpec { base, lambda_exponent: None }).unwrap();
        assert_eq!(rep.rows.len(), 2);
        assert!(rep.rows[1].median_error < rep.rows[0].median_error, "{:?}", rep.rows);
    }
}
