//! The command implementations behind the CLI. Every command returns an
//! exit code: 0 on success, 1 on validation, suite or run failure, 2 on
//! usage errors (unreadable or malformed config, missing arguments).

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{self, BlowupReport, BoundConstants, ReportInput, VerdictStatus};
use crate::error::{Error, Result};
use crate::functionals::{hardy_constant, Functionals};
use crate::harness::config::{ExperimentConfig, SweepParameter};
use crate::model::{validate_exponent, validate_modulation, LimitCheck, ValidationReport};
use crate::solver::{self, IdentityOptions, SolverConfig, Termination, TrajectoryRecord};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// A command failure carrying its exit code.
#[derive(Debug)]
pub struct CommandError {
    pub code: i32,
    pub message: String,
}

impl CommandError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn failure(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_FAILURE,
            message: message.into(),
        }
    }
}

impl From<Error> for CommandError {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Io(_) => Self::usage(e.to_string()),
            other => Self::failure(other.to_string()),
        }
    }
}

pub type CommandResult = std::result::Result<i32, CommandError>;

/// Common command-line options.
#[derive(Debug, Clone, Default)]
pub struct CommandArgs {
    pub config: PathBuf,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub trajectory: Option<PathBuf>,
}

impl CommandArgs {
    pub fn new(config: impl Into<PathBuf>) -> Self {
        Self {
            config: config.into(),
            ..Default::default()
        }
    }

    pub fn out(mut self, out: impl Into<PathBuf>) -> Self {
        self.out = Some(out.into());
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn trajectory(mut self, path: impl Into<PathBuf>) -> Self {
        self.trajectory = Some(path.into());
        self
    }

    fn load(&self) -> std::result::Result<ExperimentConfig, CommandError> {
        let mut cfg = ExperimentConfig::load(&self.config).map_err(|e| {
            CommandError::usage(format!("cannot load {}: {e}", self.config.display()))
        })?;
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        Ok(cfg)
    }
}

fn write_json<T: Serialize>(value: &T, out: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(path) => std::fs::write(path, format!("{text}\n"))?,
        None => writeln!(stdout, "{text}")?,
    }
    Ok(())
}

/// Time samples used for validating the model over `[0, t_end]`.
pub fn validation_grid(t_end: f64) -> Vec<f64> {
    let n = 64;
    (0..=n).map(|i| t_end * i as f64 / n as f64).collect()
}

/// Full precondition check of a configuration.
pub fn validate_config(cfg: &ExperimentConfig) -> Result<ValidationReport> {
    let mut report = ValidationReport {
        passed: true,
        ..Default::default()
    };
    let mut setup = |constraint: &str, result: Result<()>| {
        if let Err(e) = result {
            report.violations.push(crate::model::Violation {
                constraint: constraint.into(),
                message: e.to_string(),
                r: None,
                t: None,
                value: f64::NAN,
                count: 1,
            });
            report.passed = false;
        }
    };
    let mesh = cfg.mesh();
    setup("mesh", mesh.as_ref().map(|_| ()).map_err(clone_err));
    let model = cfg.model();
    setup(
        "modulation_model",
        model.as_ref().map(|_| ()).map_err(clone_err),
    );
    setup("solver", cfg.solver.validate());
    setup("dictionary", cfg.dictionary().map(|_| ()));
    if !(cfg.bounds.t0 >= 0.0 && cfg.bounds.t0.is_finite()) {
        setup(
            "t0",
            Err(Error::Invalid(format!(
                "t0 = {} must be ≥ 0",
                cfg.bounds.t0
            ))),
        );
    }
    if !(cfg.bounds.delta > 0.0) {
        setup("delta", Err(Error::Delta(cfg.bounds.delta)));
    }
    let (Ok(mesh), Ok(model)) = (mesh, model) else {
        return Ok(report);
    };
    setup("initial", cfg.initial_datum(&mesh).map(|_| ()));
    let t_end = if cfg.solver.t_end.is_finite() && cfg.solver.t_end > 0.0 {
        cfg.solver.t_end
    } else {
        1.0
    };
    let grid = validation_grid(t_end);
    let limit = LimitCheck {
        horizon: LimitCheck::default().horizon.max(10.0 * t_end),
        ..LimitCheck::default()
    };
    let report = report
        .merge(validate_exponent(&model.exponent, &mesh, &grid)?)
        .merge(validate_modulation(&model.modulation, &grid, limit)?);
    Ok(report)
}

fn clone_err(e: &Error) -> Error {
    Error::Invalid(e.to_string())
}

fn require_valid(
    cfg: &ExperimentConfig,
    stdout: &mut dyn Write,
) -> std::result::Result<(), CommandError> {
    let report = validate_config(cfg)?;
    if report.passed {
        return Ok(());
    }
    for v in &report.violations {
        let _ = writeln!(stdout, "invalid: {} ({})", v.message, v.constraint);
    }
    Err(CommandError::failure("configuration failed validation"))
}

pub fn cmd_validate(args: &CommandArgs, stdout: &mut dyn Write) -> CommandResult {
    let cfg = args.load()?;
    let report = validate_config(&cfg)?;
    if report.passed {
        writeln!(stdout, "ok: {} samples checked", report.samples).map_err(Error::from)?;
    }
    for v in &report.violations {
        let place = match (v.r, v.t) {
            (Some(r), Some(t)) => format!(" at r = {r}, t = {t}"),
            (None, Some(t)) => format!(" at t = {t}"),
            _ => String::new(),
        };
        writeln!(
            stdout,
            "violation [{}]: {}{place} (value {}, {} sample(s))",
            v.constraint, v.message, v.value, v.count
        )
        .map_err(Error::from)?;
    }
    write_json(&report, args.out.as_deref(), stdout)?;
    Ok(if report.passed { EXIT_OK } else { EXIT_FAILURE })
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationSummary {
    pub termination: Termination,
    pub steps: usize,
    pub t_last: f64,
    pub l0: f64,
    pub e0: f64,
    pub threshold: f64,
    pub t_num: Option<f64>,
    pub t_num_bracket: Option<(f64, f64)>,
    pub gamma_hat: Option<f64>,
}

pub fn summarize(record: &TrajectoryRecord) -> SimulationSummary {
    let estimate = solver::detect_blowup_time(record).ok();
    SimulationSummary {
        termination: record.termination,
        steps: record.len() - 1,
        t_last: record.last().t,
        l0: record.initial().lyapunov,
        e0: record.initial().modified_energy,
        threshold: record.threshold,
        t_num: estimate.map(|e| e.t_num),
        t_num_bracket: estimate.map(|e| e.bracket),
        gamma_hat: estimate.map(|e| e.gamma_hat),
    }
}

/// Runs the configured simulation.
pub fn simulate(cfg: &ExperimentConfig) -> Result<TrajectoryRecord> {
    let mesh = cfg.mesh()?;
    let model = cfg.model()?;
    let u0 = cfg.initial_datum(&mesh)?;
    solver::run(&mesh, &model, &u0, &cfg.solver)
}

/// Path of the summary written next to a trajectory CSV.
pub fn summary_path(csv: &Path) -> PathBuf {
    csv.with_extension("summary.json")
}

pub fn cmd_simulate(args: &CommandArgs, stdout: &mut dyn Write) -> CommandResult {
    let Some(out) = args.out.as_deref() else {
        return Err(CommandError::usage("simulate needs --out <path>"));
    };
    let cfg = args.load()?;
    require_valid(&cfg, stdout)?;
    let model = cfg.model()?;
    let record = simulate(&cfg)?;
    let file = File::create(out)
        .map_err(|e| CommandError::usage(format!("cannot write {}: {e}", out.display())))?;
    solver::write_csv(&record, &model, BufWriter::new(file))?;
    let summary = summarize(&record);
    write_json(&summary, Some(&summary_path(out)), stdout)?;
    write_json(&summary, None, stdout)?;
    Ok(EXIT_OK)
}

/// Builds the report from a configuration and an optional `(t, L)` trajectory.
pub fn bounds_report(
    cfg: &ExperimentConfig,
    trajectory: Option<&[solver::CsvRow]>,
) -> Result<BlowupReport> {
    let mesh = cfg.mesh()?;
    let model = cfg.model()?;
    let u0 = cfg.initial_datum(&mesh)?;
    let dictionary = cfg.dictionary()?;
    let (times, lyapunov, blew_up, t_end) = match trajectory {
        Some(rows) => {
            if rows.is_empty() {
                return Err(Error::Invalid("trajectory is empty".into()));
            }
            let times: Vec<f64> = rows.iter().map(|r| r.t).collect();
            let lyapunov: Vec<f64> = rows.iter().map(|r| r.lyapunov).collect();
            let t_last = times[times.len() - 1];
            let blew_up = t_last < cfg.solver.t_end * (1.0 - 1e-9);
            (times, lyapunov, blew_up, Some(cfg.solver.t_end))
        }
        None => {
            if cfg.bounds.t0 > 0.0 {
                return Err(Error::Config("t0 > 0 needs --trajectory".into()));
            }
            let l0 = Functionals::new(&mesh, &model).lyapunov(u0.values())?;
            (vec![0.0], vec![l0], false, None)
        }
    };
    bounds::build_report(&ReportInput {
        mesh: &mesh,
        model: &model,
        u0: u0.values(),
        times: &times,
        lyapunov: &lyapunov,
        blew_up,
        t_end,
        t0: cfg.bounds.t0,
        dictionary: &dictionary,
        seed: cfg.seed,
    })
}

pub fn cmd_bounds(args: &CommandArgs, stdout: &mut dyn Write) -> CommandResult {
    let cfg = args.load()?;
    require_valid(&cfg, stdout)?;
    let rows = match &args.trajectory {
        Some(path) => {
            let file = File::open(path)
                .map_err(|e| CommandError::usage(format!("cannot read {}: {e}", path.display())))?;
            Some(solver::read_csv(file)?)
        }
        None => None,
    };
    let report = bounds_report(&cfg, rows.as_deref())?;
    write_json(&report, args.out.as_deref(), stdout)?;
    if report.t_upper_1.is_none() && report.t_upper_2.is_none() {
        let reasons: Vec<&str> = report
            .verdicts
            .iter()
            .filter(|v| v.bound.starts_with("upper"))
            .map(|v| v.detail.as_str())
            .collect();
        writeln!(stdout, "no upper bound applies: {}", reasons.join("; ")).map_err(Error::from)?;
        return Ok(EXIT_FAILURE);
    }
    if report.any_violated() {
        return Ok(EXIT_FAILURE);
    }
    Ok(EXIT_OK)
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub measured: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub suites: Vec<SuiteResult>,
}

/// Acceptable range of the residual ratio under step halving for a first-order scheme.
pub const FIRST_ORDER_RATIO: (f64, f64) = (1.7, 2.3);

fn max_abs(series: &[(f64, f64)]) -> f64 {
    series.iter().map(|x| x.1.abs()).fold(0.0, f64::max)
}

/// Largest per-step drop of `K`, normalized by `1 + |K|`.
pub fn worst_k_drop(record: &TrajectoryRecord) -> f64 {
    record
        .entries
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0].snapshot.neg_energy, w[1].snapshot.neg_energy);
            (a - b) / (1.0 + a.abs())
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Identity, monotonicity and Hardy suites at meshes `nodes/2` and `nodes`,
/// each with steps `τ₀` and `τ₀/2`.
pub fn run_verification(cfg: &ExperimentConfig) -> Result<VerifyReport> {
    let model = cfg.model()?;
    let options = IdentityOptions {
        include_p_term: !cfg.verify.disable_p_term,
    };
    let u_profile = cfg.initial;
    let mut suites = Vec::new();
    let resolutions = [cfg.mesh.nodes / 2, cfg.mesh.nodes];
    let runs: Vec<Result<(usize, [TrajectoryRecord; 2])>> = resolutions
        .par_iter()
        .map(|&nodes| {
            let mesh = crate::mesh::RadialMesh::new(cfg.mesh.dimension, nodes, cfg.mesh.grading)?;
            let u0 = crate::model::InitialDatum::from_profile(&mesh, &u_profile)?;
            let coarse = solver::run(&mesh, &model, &u0, &cfg.solver)?;
            let fine_cfg = SolverConfig {
                tau0: 0.5 * cfg.solver.tau0,
                tau_min: cfg.solver.tau_min.min(0.5 * cfg.solver.tau0),
                ..cfg.solver
            };
            let fine = solver::run(&mesh, &model, &u0, &fine_cfg)?;
            Ok((nodes, [coarse, fine]))
        })
        .collect();
    for run in runs {
        let (nodes, [coarse, fine]) = run?;
        let j0 = coarse.initial().energy.abs();
        let rc = max_abs(&solver::verify_energy_identity(&coarse, &model, options));
        let rf = max_abs(&solver::verify_energy_identity(&fine, &model, options));
        let ratio = rc / rf;
        let passed =
            ratio >= FIRST_ORDER_RATIO.0 && ratio <= FIRST_ORDER_RATIO.1 && rf <= 1e-3 * j0;
        suites.push(SuiteResult {
            name: format!("energy_identity[M={nodes}]"),
            passed,
            detail: format!("max|R| {rc:.3e} -> {rf:.3e} (ratio {ratio:.3}), |J0| = {j0:.4e}"),
            measured: BTreeMap::from([
                ("max_residual_coarse".to_string(), rc),
                ("max_residual_fine".to_string(), rf),
                ("ratio".to_string(), ratio),
                ("abs_j0".to_string(), j0),
            ]),
        });

        let dc = max_abs(&solver::verify_l_derivative(&coarse));
        let df = max_abs(&solver::verify_l_derivative(&fine));
        let max_i = fine
            .entries
            .iter()
            .map(|e| e.snapshot.nehari.abs())
            .fold(0.0, f64::max);
        suites.push(SuiteResult {
            name: format!("l_derivative[M={nodes}]"),
            passed: df <= 1e-2 * max_i && df < dc,
            detail: format!("max|dL/dt + I| {dc:.3e} -> {df:.3e}, max|I| = {max_i:.4e}"),
            measured: BTreeMap::from([
                ("max_residual_coarse".to_string(), dc),
                ("max_residual_fine".to_string(), df),
                ("max_abs_i".to_string(), max_i),
            ]),
        });

        let drop = worst_k_drop(&coarse).max(worst_k_drop(&fine));
        suites.push(SuiteResult {
            name: format!("k_monotone[M={nodes}]"),
            passed: drop <= 1e-8,
            detail: format!("largest normalized drop of K per step {drop:.3e}"),
            measured: BTreeMap::from([("worst_drop".to_string(), drop)]),
        });

        let mesh = crate::mesh::RadialMesh::new(cfg.mesh.dimension, nodes, cfg.mesh.grading)?;
        let h = hardy_constant(cfg.mesh.dimension);
        let worst = bounds::hardy_check(&mesh, 300, cfg.seed)?;
        suites.push(SuiteResult {
            name: format!("hardy[M={nodes}]"),
            passed: worst <= h * 1.01,
            detail: format!("worst ratio {worst:.6} against H_n = {h}"),
            measured: BTreeMap::from([("worst_ratio".to_string(), worst), ("h_n".to_string(), h)]),
        });
    }
    Ok(VerifyReport {
        passed: suites.iter().all(|s| s.passed),
        suites,
    })
}

pub fn cmd_verify(args: &CommandArgs, stdout: &mut dyn Write) -> CommandResult {
    let cfg = args.load()?;
    require_valid(&cfg, stdout)?;
    let report = run_verification(&cfg)?;
    for s in &report.suites {
        let tag = if s.passed { "PASS" } else { "FAIL" };
        writeln!(stdout, "{tag} {}: {}", s.name, s.detail).map_err(Error::from)?;
    }
    if let Some(out) = args.out.as_deref() {
        write_json(&report, Some(out), stdout)?;
    }
    Ok(if report.passed { EXIT_OK } else { EXIT_FAILURE })
}

/// One sweep point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub parameter: String,
    pub value: f64,
    pub termination: Option<String>,
    pub t_num: Option<f64>,
    pub t_upper_1: Option<f64>,
    pub t_upper_2: Option<f64>,
    pub t_lower: Option<f64>,
    pub flagged: bool,
    pub error: Option<String>,
}

fn sweep_point(cfg: &ExperimentConfig, parameter: SweepParameter, value: f64) -> SweepRow {
    let mut row = SweepRow {
        parameter: parameter.as_str().to_string(),
        value,
        termination: None,
        t_num: None,
        t_upper_1: None,
        t_upper_2: None,
        t_lower: None,
        flagged: true,
        error: None,
    };
    let result = (|| -> Result<()> {
        let point = cfg.with_parameter(parameter, value)?;
        let report = validate_config(&point)?;
        if !report.passed {
            let msgs: Vec<&str> = report
                .violations
                .iter()
                .map(|v| v.message.as_str())
                .collect();
            return Err(Error::Invalid(msgs.join("; ")));
        }
        let model = point.model()?;
        let record = simulate(&point)?;
        row.termination = Some(record.termination.as_str().to_string());
        let rows = solver::csv_rows(&record, &model);
        let rep = bounds_report(&point, Some(&rows))?;
        row.t_num = rep.t_num;
        row.t_upper_1 = rep.t_upper_1;
        row.t_upper_2 = rep.t_upper_2;
        row.t_lower = rep.t_lower;
        row.flagged = record.termination == Termination::StepUnderflow
            || rep
                .verdicts
                .iter()
                .any(|v| v.status == VerdictStatus::Violated);
        Ok(())
    })();
    if let Err(e) = result {
        row.flagged = true;
        row.error = Some(e.to_string());
    }
    row
}

/// Runs every sweep point concurrently; rows keep the input order.
pub fn run_sweep(
    cfg: &ExperimentConfig,
    parameter: SweepParameter,
    values: &[f64],
) -> Vec<SweepRow> {
    values
        .par_iter()
        .map(|&v| sweep_point(cfg, parameter, v))
        .collect()
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "parameter",
        "value",
        "termination",
        "t_num",
        "t_upper_1",
        "t_upper_2",
        "t_lower",
        "flagged",
        "error",
    ])?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in rows {
        w.write_record([
            r.parameter.clone(),
            r.value.to_string(),
            r.termination.clone().unwrap_or_default(),
            opt(r.t_num),
            opt(r.t_upper_1),
            opt(r.t_upper_2),
            opt(r.t_lower),
            r.flagged.to_string(),
            r.error.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn cmd_sweep(args: &CommandArgs, stdout: &mut dyn Write) -> CommandResult {
    let cfg = args.load()?;
    let Some(sweep) = cfg.sweep.clone() else {
        return Err(CommandError::usage("config has no [sweep] section"));
    };
    if sweep.values.is_empty() {
        return Err(CommandError::usage("sweep range is empty"));
    }
    if sweep.values.iter().any(|v| !v.is_finite()) {
        return Err(CommandError::usage("sweep values must be finite"));
    }
    let rows = run_sweep(&cfg, sweep.parameter, &sweep.values);
    match args.out.as_deref() {
        Some(path) => {
            let file = File::create(path).map_err(|e| {
                CommandError::usage(format!("cannot write {}: {e}", path.display()))
            })?;
            write_sweep_csv(&rows, BufWriter::new(file))?;
        }
        None => write_sweep_csv(&rows, &mut *stdout)?,
    }
    let all_failed = rows.iter().all(|r| r.error.is_some());
    Ok(if all_failed { EXIT_FAILURE } else { EXIT_OK })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstantsReport {
    pub constants: Option<BoundConstants>,
    pub constants_error: Option<String>,
    pub sobolev_plus: Option<f64>,
    pub sobolev_minus: Option<f64>,
    pub hardy_constant: f64,
    pub hardy_worst_ratio: f64,
    pub well_depth: f64,
    pub well_depth_star: f64,
}

pub fn constants_report(cfg: &ExperimentConfig) -> Result<ConstantsReport> {
    let mesh = cfg.mesh()?;
    let model = cfg.model()?;
    let dict = cfg.dictionary()?;
    let (pm, pp) = (model.exponent.p_minus(), model.exponent.p_plus());
    let constants = BoundConstants::compute(&mesh, &model, |q| {
        bounds::gn_constant_estimate(&mesh, q, &dict, cfg.seed)
    });
    let f = Functionals::new(&mesh, &model);
    let delta = cfg.bounds.delta;
    Ok(ConstantsReport {
        constants_error: constants.as_ref().err().map(|e| e.to_string()),
        constants: constants.ok(),
        sobolev_plus: bounds::sobolev_constant_estimate(&mesh, pp, &dict, cfg.seed).ok(),
        sobolev_minus: bounds::sobolev_constant_estimate(&mesh, pm, &dict, cfg.seed).ok(),
        hardy_constant: hardy_constant(mesh.dim()),
        hardy_worst_ratio: bounds::hardy_check(&mesh, 300, cfg.seed)?,
        well_depth: f.well_depth_estimate(&dict, 0.0, delta)?,
        well_depth_star: f.well_depth_star(&dict, &validation_grid(cfg.solver.t_end), delta)?,
    })
}

pub fn cmd_constants(args: &CommandArgs, stdout: &mut dyn Write) -> CommandResult {
    let cfg = args.load()?;
    require_valid(&cfg, stdout)?;
    let report = constants_report(&cfg)?;
    write_json(&report, args.out.as_deref(), stdout)?;
    Ok(EXIT_OK)
}
