use std::path::{Path, PathBuf};

use robustpr::bench::{
    consistency_experiment, error_vs_iteration, lambda_grid_search, run_experiment, ConsistencySpec,
    ExperimentReport, ExperimentSpec, ValidationRule,
};
use robustpr::io::{deserialize_instance, scalars_to_json, serialize_any, signal_from_json, JsonScalar};
use robustpr::metrics::align_to;
use robustpr::solver::{support_settled, trace_to_csv};
use robustpr::{
    apply_noise, clean_measurements, estimate_stability, fixed_point_residual, generate_sampling,
    linear_rate_certificate, relative_error, remark5_quantities, solve, spectral_init, AnyEnsemble,
    AnySignal, FieldTag, MeasurementEnsemble, Signal, SolverConfig, SpectralConfig, Termination,
};
use serde_json::{json, Value};

use crate::args::*;
use crate::error::{CliError, CliResult};
use crate::pgm::GrayImage;
use crate::plot::{Axis, Plot};

/// Iterations over which the support must stay fixed before a run counts as settled.
const SETTLE_WINDOW: usize = 10;

fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn write_file(path: &Path, data: impl AsRef<[u8]>) -> CliResult<()> {
    std::fs::write(path, data).map_err(|e| CliError::io(path, e))
}

fn read_instance(path: &Path) -> CliResult<AnyEnsemble> {
    let text = read_text(path)?;
    deserialize_instance(&text).map_err(|e| CliError::io(path, e))
}

fn read_json(path: &Path) -> CliResult<Value> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::io(path, e))
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialize") + "\n"
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn require_lambda(lambda: Option<f64>) -> CliResult<f64> {
    lambda.ok_or_else(|| {
        CliError::Usage(
            "--lambda is required; there is no universal default (try `robustpr bench lambda-grid`)"
                .into(),
        )
    })
}

fn solver_config(lambda: f64, a: &SolverArgs) -> CliResult<SolverConfig> {
    let cfg = SolverConfig {
        lambda,
        alpha: a.alpha,
        gamma: a.gamma,
        beta: a.beta,
        delta: a.delta,
        epsilon: a.epsilon,
        max_iter: a.max_iter,
        max_backtracks: a.max_backtracks,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn spectral_config(a: &SpectralArgs, field: FieldTag, s: Option<usize>, p: usize) -> CliResult<SpectralConfig> {
    let truncation = match (a.truncation, field, s) {
        (Some(m), _, _) => Some(m),
        (None, FieldTag::Complex, Some(s)) => Some((2 * s).min(p)),
        _ => None,
    };
    let cfg = SpectralConfig {
        power_iterations: a.power_iterations,
        power_tol: a.power_tol,
        truncation,
    };
    cfg.validate(p)?;
    Ok(cfg)
}

fn check_sparsity(s: usize, p: usize) -> CliResult<()> {
    if s > p {
        return Err(CliError::Usage(format!("--s ({s}) must not exceed --p ({p})")));
    }
    Ok(())
}

/// Rounds `ratio·p` for each ratio and checks the result is a usable grid.
fn n_grid(ratios: &[f64], p: usize) -> CliResult<Vec<usize>> {
    let grid: Vec<usize> = ratios.iter().map(|r| (r * p as f64).round() as usize).collect();
    if grid.contains(&0) {
        return Err(CliError::Usage(format!("--grid ratios give n = 0 for p = {p}")));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::Usage(format!(
            "--grid must give strictly ascending n, got {grid:?}"
        )));
    }
    Ok(grid)
}

fn ratio_n(ratio: f64, p: usize) -> CliResult<usize> {
    let n = (ratio * p as f64).round() as usize;
    if n == 0 {
        return Err(CliError::Usage(format!("--ratio {ratio} gives n = 0")));
    }
    Ok(n)
}

/// Reads `--instance` if given, otherwise synthesizes from the flags.
fn load_or_synthesize(
    instance: Option<&Path>,
    synth: &SynthArgs,
    ratio: f64,
) -> CliResult<(AnyEnsemble, Option<usize>)> {
    match instance {
        Some(path) => Ok((read_instance(path)?, None)),
        None => {
            check_sparsity(synth.s, synth.p)?;
            let n = ratio_n(ratio, synth.p)?;
            let e = AnyEnsemble::synthesize(synth.field, synth.p, synth.s, n, synth.noise, synth.seed)?;
            Ok((e, Some(synth.s)))
        }
    }
}

fn warn(msg: &str) {
    eprintln!("warning: {msg}");
}

pub fn gen(a: GenArgs) -> CliResult<()> {
    check_sparsity(a.s, a.p)?;
    let e = AnyEnsemble::synthesize(a.field, a.p, a.s, a.n, a.noise, a.seed)?;
    write_file(&a.out, serialize_any(&e))?;
    println!(
        "p={} n={} s={} field={} noise={} seed={}",
        a.p, a.n, a.s, a.field, a.noise, a.seed
    );
    Ok(())
}

struct SolveOutput {
    json: Value,
    trace_csv: String,
    summary: String,
    warnings: Vec<String>,
}

fn solve_typed<T: JsonScalar>(
    e: &MeasurementEnsemble<T>,
    cfg: &SolverConfig,
    spectral: &SpectralConfig,
    init_seed: u64,
) -> CliResult<SolveOutput> {
    let init = spectral_init(e, spectral, init_seed)?;
    let res = solve(e, &init.signal, cfg)?;
    let tau = res.last_tau().unwrap_or(cfg.gamma);
    let fp = fixed_point_residual(&res.estimate, e, cfg.lambda, cfg.alpha, tau)?;
    let rel = e
        .ground_truth()
        .map(|t| relative_error(&res.estimate, t))
        .transpose()?;
    let mut warnings = Vec::new();
    if init.degenerate {
        warnings.push("all observations are zero; the initializer is the zero vector".to_string());
    }
    match res.termination {
        Termination::Converged => {}
        Termination::MaxIterations => {
            warnings.push(format!("stopped at the iteration limit ({})", cfg.max_iter))
        }
        Termination::LineSearchFailed => warnings.push(format!(
            "line search found no acceptable step within {} backtracks",
            cfg.max_backtracks
        )),
    }
    if !support_settled(&res.trace, SETTLE_WINDOW) {
        warnings.push(format!(
            "support size changed within the last {SETTLE_WINDOW} iterations"
        ));
    }
    let support = res.estimate.support();
    let json = json!({
        "field": T::FIELD,
        "p": e.p(),
        "n": e.n(),
        "lambda": cfg.lambda,
        "alpha": cfg.alpha,
        "solver": cfg,
        "spectral": spectral,
        "init_seed": init_seed,
        "spectral_degenerate": init.degenerate,
        "termination": res.termination.to_string(),
        "iterations": res.iterations(),
        "initial_objective": res.initial_objective,
        "final_objective": res.final_objective,
        "fp_residual": fp,
        "relative_error": rel,
        "support_size": support.len(),
        "support": support,
        "warnings": warnings,
        "estimate": scalars_to_json(res.estimate.as_slice()),
    });
    let mut summary = format!(
        "termination={} iterations={} objective={:e} support={}",
        res.termination,
        res.iterations(),
        res.final_objective,
        support.len()
    );
    if let Some(r) = rel {
        summary.push_str(&format!(" rel_error={r:e}"));
    }
    Ok(SolveOutput {
        json,
        trace_csv: trace_to_csv(&res.trace),
        summary,
        warnings,
    })
}

pub fn solve_cmd(a: SolveArgs) -> CliResult<()> {
    let lambda = require_lambda(a.lambda)?;
    let cfg = solver_config(lambda, &a.solver)?;
    let inst = read_instance(&a.instance)?;
    let spectral = spectral_config(&a.spectral, inst.field(), a.s, inst.p())?;
    let out = match &inst {
        AnyEnsemble::Real(e) => solve_typed(e, &cfg, &spectral, a.init_seed)?,
        AnyEnsemble::Complex(e) => solve_typed(e, &cfg, &spectral, a.init_seed)?,
    };
    write_file(&a.out, pretty(&out.json))?;
    write_file(&a.trace, out.trace_csv)?;
    for w in &out.warnings {
        warn(w);
    }
    println!("{}", out.summary);
    Ok(())
}

fn experiment_spec(
    synth: &SynthArgs,
    grid: &[f64],
    trials: usize,
    lambda: Option<f64>,
    solver: &SolverArgs,
    spectral: &SpectralArgs,
) -> CliResult<ExperimentSpec> {
    check_sparsity(synth.s, synth.p)?;
    let lambda = require_lambda(lambda)?;
    let cfg = solver_config(lambda, solver)?;
    let n_grid = n_grid(grid, synth.p)?;
    let mut spec = ExperimentSpec::new(synth.field, synth.p, synth.s, n_grid, synth.noise, cfg);
    spec.spectral = spectral_config(spectral, synth.field, Some(synth.s), synth.p)?;
    spec.trials = trials;
    spec.master_seed = synth.seed;
    spec.validate()?;
    Ok(spec)
}

pub fn success_rate(a: SuccessRateArgs) -> CliResult<()> {
    let mut spec = experiment_spec(&a.synth, &a.grid, a.trials, a.lambda, &a.solver, &a.spectral)?;
    spec.success_threshold = a.threshold;
    spec.record_timing = a.timing;
    let report = run_experiment(&spec)?;
    let csv = with_suffix(&a.out_prefix, ".csv");
    write_file(&csv, report.aggregates_csv())?;
    write_file(&with_suffix(&a.out_prefix, "_trials.csv"), report.records_csv())?;
    write_file(&with_suffix(&a.out_prefix, ".json"), report.summary_json())?;
    let plot = Plot {
        title: "Success rate",
        csv: &file_name(&csv),
        xlabel: "n/p",
        ylabel: "success rate",
        xcol: 2,
        ycol: 3,
        xaxis: Axis::Linear,
        yaxis: Axis::Linear,
    };
    write_file(&with_suffix(&a.out_prefix, ".gp"), plot.script())?;
    for agg in &report.aggregates {
        println!(
            "n={} ratio={} success_rate={} median_error={:e}",
            agg.n, agg.ratio, agg.success_rate, agg.median_error
        );
    }
    Ok(())
}

fn error_iter_typed<T: JsonScalar>(
    e: &MeasurementEnsemble<T>,
    cfg: &SolverConfig,
    spectral: &SpectralConfig,
    seed: u64,
) -> CliResult<(String, String)> {
    let x0 = spectral_init(e, spectral, seed)?.signal;
    let curve = error_vs_iteration(e, &x0, cfg)?;
    let last = curve.points.last().map(|p| p.1).unwrap_or(f64::NAN);
    let summary = format!(
        "termination={} iterations={} rel_error={last:e}",
        curve.result.termination,
        curve.result.iterations()
    );
    Ok((curve.to_csv(), summary))
}

pub fn error_iter(a: ErrorIterArgs) -> CliResult<()> {
    let lambda = require_lambda(a.lambda)?;
    let cfg = solver_config(lambda, &a.solver)?;
    let (inst, s) = load_or_synthesize(a.instance.as_deref(), &a.synth, a.ratio)?;
    let spectral = spectral_config(&a.spectral, inst.field(), s, inst.p())?;
    let seed = a.synth.seed;
    let (csv_text, summary) = match &inst {
        AnyEnsemble::Real(e) => error_iter_typed(e, &cfg, &spectral, seed)?,
        AnyEnsemble::Complex(e) => error_iter_typed(e, &cfg, &spectral, seed)?,
    };
    let csv = with_suffix(&a.out_prefix, ".csv");
    write_file(&csv, csv_text)?;
    let plot = Plot {
        title: "Relative error by iteration",
        csv: &file_name(&csv),
        xlabel: "iteration",
        ylabel: "relative error",
        xcol: 1,
        ycol: 2,
        xaxis: Axis::Linear,
        yaxis: Axis::Log,
    };
    write_file(&with_suffix(&a.out_prefix, ".gp"), plot.script())?;
    println!("{summary}");
    Ok(())
}

pub fn lambda_grid(a: LambdaGridArgs) -> CliResult<()> {
    let cfg = solver_config(a.lambdas[0], &a.solver)?;
    let (inst, s) = load_or_synthesize(a.instance.as_deref(), &a.synth, a.ratio)?;
    let spectral = spectral_config(&a.spectral, inst.field(), s, inst.p())?;
    let rule = match a.rule {
        RuleArg::Oracle => ValidationRule::Oracle,
        RuleArg::Holdout => ValidationRule::Holdout { seed: a.holdout_seed },
    };
    let seed = a.synth.seed;
    let search = match &inst {
        AnyEnsemble::Real(e) => lambda_grid_search(e, &cfg, &a.lambdas, rule, &spectral, seed)?,
        AnyEnsemble::Complex(e) => lambda_grid_search(e, &cfg, &a.lambdas, rule, &spectral, seed)?,
    };
    let csv = with_suffix(&a.out_prefix, ".csv");
    write_file(&csv, search.to_csv())?;
    let summary = json!({
        "rule": rule,
        "chosen": search.chosen,
        "solver": cfg,
        "spectral": spectral,
        "table": search.table,
    });
    write_file(&with_suffix(&a.out_prefix, ".json"), pretty(&summary))?;
    let plot = Plot {
        title: "Validation score by lambda",
        csv: &file_name(&csv),
        xlabel: "lambda",
        ylabel: "score",
        xcol: 1,
        ycol: 2,
        xaxis: Axis::Log,
        yaxis: Axis::Log,
    };
    write_file(&with_suffix(&a.out_prefix, ".gp"), plot.script())?;
    println!("chosen lambda={:e}", search.chosen);
    Ok(())
}

pub fn consistency(a: ConsistencyArgs) -> CliResult<()> {
    let base = experiment_spec(&a.synth, &a.grid, a.trials, a.lambda, &a.solver, &a.spectral)?;
    let spec = ConsistencySpec {
        base,
        lambda_exponent: a.lambda_exponent,
    };
    let report = consistency_experiment(&spec)?;
    let csv = with_suffix(&a.out_prefix, ".csv");
    write_file(&csv, report.to_csv())?;
    let trials = ExperimentReport {
        spec: spec.base.clone(),
        records: report.records.clone(),
        aggregates: Vec::new(),
    };
    write_file(&with_suffix(&a.out_prefix, "_trials.csv"), trials.records_csv())?;
    let plot = Plot {
        title: "Median relative error against n",
        csv: &file_name(&csv),
        xlabel: "n",
        ylabel: "median relative error",
        xcol: 1,
        ycol: 4,
        xaxis: Axis::Log,
        yaxis: Axis::Log,
    };
    write_file(&with_suffix(&a.out_prefix, ".gp"), plot.script())?;
    for r in &report.rows {
        println!(
            "n={} lambda={:e} median_error={:e} success_rate={}",
            r.n, r.lambda, r.median_error, r.success_rate
        );
    }
    Ok(())
}

pub fn image(a: ImageArgs) -> CliResult<()> {
    let bytes = std::fs::read(&a.input).map_err(|e| CliError::io(&a.input, e))?;
    let img = GrayImage::decode(&bytes).map_err(|e| CliError::io(&a.input, e))?;
    if a.passthrough {
        write_file(&a.out, img.encode())?;
        println!("width={} height={} passthrough", img.width, img.height);
        return Ok(());
    }
    let p = img.pixel_count();
    if p > a.max_pixels {
        return Err(CliError::Usage(format!(
            "image has {p} pixels, more than --max-pixels {}; downsample it or raise the cap",
            a.max_pixels
        )));
    }
    let lambda = require_lambda(a.lambda)?;
    let cfg = solver_config(lambda, &a.solver)?;
    let spectral = spectral_config(&a.spectral, FieldTag::Real, None, p)?;
    if let Some(t) = a.threshold {
        if !(0.0..=1.0).contains(&t) {
            return Err(CliError::Usage(format!("--threshold must lie in [0, 1], got {t}")));
        }
    }
    let n = ratio_n(a.ratio, p)?;
    let mib = (n as f64) * (p as f64) * 8.0 / (1024.0 * 1024.0);
    if mib > a.max_matrix_mib as f64 {
        return Err(CliError::Usage(format!(
            "the {n} x {p} sampling matrix needs {mib:.0} MiB, more than --max-matrix-mib {}; \
             lower --ratio, downsample the image or raise the cap",
            a.max_matrix_mib
        )));
    }

    let mut values = img.to_unit();
    if let Some(t) = a.threshold {
        for v in &mut values {
            if *v < t {
                *v = 0.0;
            }
        }
    }
    let x = Signal::new(values)?;
    if x.nnz() == 0 {
        return Err(CliError::Domain(
            "image is entirely zero after thresholding; nothing to recover".into(),
        ));
    }
    let sampling = generate_sampling::<f64>(p, n, a.seed)?;
    let clean = clean_measurements(p, &sampling, &x);
    let (b, eps) = apply_noise(&clean, &x, a.noise, a.seed)?;
    let e = MeasurementEnsemble::new(p, sampling, b, Some(x.clone()), Some(eps), a.seed)?;

    let init = spectral_init(&e, &spectral, a.seed)?;
    let res = solve(&e, &init.signal, &cfg)?;
    let rel = relative_error(&res.estimate, &x)?;
    let aligned = align_to(&res.estimate, &x)?;
    let out = GrayImage::from_unit(img.width, img.height, aligned.as_slice(), img.maxval, img.format);
    write_file(&a.out, out.encode())?;

    let metrics = json!({
        "width": img.width,
        "height": img.height,
        "p": p,
        "n": n,
        "ratio": a.ratio,
        "noise": a.noise,
        "seed": a.seed,
        "maxval": img.maxval,
        "pixel_scale": "sample / maxval, in [0, 1]",
        "threshold": a.threshold,
        "lambda": cfg.lambda,
        "alpha": cfg.alpha,
        "relative_error": rel,
        "termination": res.termination.to_string(),
        "iterations": res.iterations(),
        "final_objective": res.final_objective,
        "support_size": res.estimate.nnz(),
        "true_support_size": x.nnz(),
    });
    write_file(&a.metrics, pretty(&metrics))?;
    if res.termination != Termination::Converged {
        warn(&format!("solver stopped with {}", res.termination));
    }
    println!(
        "width={} height={} n={} termination={} rel_error={rel:e}",
        img.width, img.height, n, res.termination
    );
    Ok(())
}

fn check_rho0(rho0: f64) -> CliResult<()> {
    if !(rho0 > 0.0 && rho0 < 1.0) {
        return Err(CliError::Usage(format!("--rho0 must lie in (0, 1), got {rho0}")));
    }
    Ok(())
}

pub fn stability(a: StabilityArgs) -> CliResult<()> {
    check_rho0(a.rho0)?;
    let inst = read_instance(&a.instance)?;
    let est = match &inst {
        AnyEnsemble::Real(e) => estimate_stability(e, a.samples, a.rho0, a.alpha, a.seed)?,
        AnyEnsemble::Complex(e) => estimate_stability(e, a.samples, a.rho0, a.alpha, a.seed)?,
    };
    write_file(&a.out, pretty(&json!(est)))?;
    println!(
        "mu_hat={:e} c2_hat={:e} inliers={}",
        est.mu_hat, est.c2_hat, est.inlier_count
    );
    Ok(())
}

/// A solution document from `solve`, checked against the instance.
struct Solution {
    estimate: AnySignal,
    lambda: Option<f64>,
    alpha: Option<f64>,
}

fn read_solution(path: &Path, inst: &AnyEnsemble) -> CliResult<Solution> {
    let v = read_json(path)?;
    if let Some(f) = v.get("field").and_then(Value::as_str) {
        let found: FieldTag = f
            .parse()
            .map_err(|e: String| CliError::io(path, format!("field: {e}")))?;
        if found != inst.field() {
            return Err(CliError::Domain(format!(
                "solution is {found} but the instance is {}",
                inst.field()
            )));
        }
    }
    let est = v
        .get("estimate")
        .ok_or_else(|| CliError::io(path, "missing field: estimate"))?;
    let estimate = signal_from_json(est, inst.field(), "estimate").map_err(|e| CliError::io(path, e))?;
    if estimate.len() != inst.p() {
        return Err(CliError::Domain(format!(
            "solution has length {} but the instance has p = {}",
            estimate.len(),
            inst.p()
        )));
    }
    Ok(Solution {
        estimate,
        lambda: v.get("lambda").and_then(Value::as_f64),
        alpha: v.get("alpha").and_then(Value::as_f64),
    })
}

pub fn certificate(a: CertificateArgs) -> CliResult<()> {
    check_rho0(a.rho0)?;
    let inst = read_instance(&a.instance)?;
    let sol = a.solution.as_deref().map(|p| read_solution(p, &inst)).transpose()?;
    let lambda = a
        .lambda
        .or_else(|| sol.as_ref().and_then(|s| s.lambda))
        .ok_or_else(|| {
            CliError::Usage("--lambda is required when the solution does not record one".into())
        })?;
    let alpha = a
        .alpha
        .or_else(|| sol.as_ref().and_then(|s| s.alpha))
        .unwrap_or(1.345);
    let eps1 = a.eps1.unwrap_or((1.0 - a.rho0) * alpha);
    let x = match sol {
        Some(s) => s.estimate,
        None => {
            let cfg = SolverConfig::new(lambda).with_alpha(alpha);
            cfg.validate()?;
            let spectral = SpectralConfig::default();
            match &inst {
                AnyEnsemble::Real(e) => {
                    let x0 = spectral_init(e, &spectral, a.init_seed)?.signal;
                    AnySignal::Real(solve(e, &x0, &cfg)?.estimate)
                }
                AnyEnsemble::Complex(e) => {
                    let x0 = spectral_init(e, &spectral, a.init_seed)?.signal;
                    AnySignal::Complex(solve(e, &x0, &cfg)?.estimate)
                }
            }
        }
    };
    let report = match (&inst, &x) {
        (AnyEnsemble::Real(e), AnySignal::Real(x)) => linear_rate_certificate(x, e, lambda, alpha, eps1)?,
        (AnyEnsemble::Complex(e), AnySignal::Complex(x)) => {
            linear_rate_certificate(x, e, lambda, alpha, eps1)?
        }
        _ => unreachable!("solution field checked against the instance"),
    };
    write_file(&a.out, report.to_json())?;
    println!(
        "passed={} lhs_min_eig={:e} rhs={:e}",
        report.passed,
        report.lhs_min_eig,
        report.rhs_boundary_norms + report.rhs_reg_term
    );
    Ok(())
}

pub fn remark5(a: Remark5Args) -> CliResult<()> {
    check_rho0(a.rho0)?;
    let inst = read_instance(&a.instance)?;
    let sol = a.solution.as_deref().map(|p| read_solution(p, &inst)).transpose()?;
    let report = match (&inst, sol.map(|s| s.estimate)) {
        (AnyEnsemble::Real(e), Some(AnySignal::Real(x))) => remark5_quantities(&x, e, a.alpha, a.rho0)?,
        (AnyEnsemble::Real(e), None) => {
            let x = e.ground_truth().ok_or_else(|| {
                CliError::Domain("instance has no ground truth; pass --solution".into())
            })?;
            remark5_quantities(x, e, a.alpha, a.rho0)?
        }
        (AnyEnsemble::Complex(e), _) => {
            // Fails with the library's unsupported-field error.
            let x = Signal::<num_complex::Complex64>::zeros(e.p());
            remark5_quantities(&x, e, a.alpha, a.rho0)?
        }
        _ => unreachable!("solution field checked against the instance"),
    };
    write_file(&a.out, report.to_json())?;
    println!(
        "inlier_noise_norm={:e} boundary_noise_norm={:e} quadratic_min_eig={:e}",
        report.inlier_noise_norm, report.boundary_noise_norm, report.quadratic_min_eig
    );
    Ok(())
}
