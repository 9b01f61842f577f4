//! Acceptance suite: twelve criteria, one PASS/FAIL line each. Runs as a
//! plain binary so the lines are always printed.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hardy_blowup::bounds::{
    self, gn_ratio, interpolation_alpha, lower_bound, lower_bound_integral, sobolev_ratio,
    upper_bound_negative_energy, upper_bound_positive_energy, BoundConstants,
};
use hardy_blowup::functionals::{c1_constant, hardy_constant, Functionals};
use hardy_blowup::harness::commands::{cmd_bounds, cmd_simulate, summary_path, CommandArgs};
use hardy_blowup::model::{ExponentField, InitialDatum, Model, ModulationCurve, SourceModulation};
use hardy_blowup::profiles::standard_dictionary;
use hardy_blowup::solver::{
    detect_blowup_time, run, verify_energy_identity, verify_l_derivative, IdentityOptions,
    SolverConfig, Termination, TrajectoryRecord,
};
use hardy_blowup::varexp::{luxemburg_norm, luxemburg_norm_weighted};
use hardy_blowup::RadialMesh;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_time(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed <= limit, || {
        format!("took {elapsed:?}, limit {limit:?}")
    })
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn cubic_model() -> Model {
    Model::new(
        ExponentField::Constant { p: 3.0 },
        SourceModulation::from_curve(ModulationCurve::Constant { k: 1.0 }),
    )
}

/// Smooth run below blow-up with `p_t > 0` and `k' > 0`.
fn smooth_model() -> Model {
    Model::new(
        ExponentField::Separable {
            a: 3.0,
            b: 0.0,
            c: 0.5,
        },
        SourceModulation::from_curve(ModulationCurve::Saturating {
            k0: 1.0,
            k_limit: 2.0,
        }),
    )
}

fn parabola(mesh: &RadialMesh, a: f64) -> InitialDatum {
    InitialDatum::new(mesh, mesh.sample(|r| a * (1.0 - r * r))).unwrap()
}

fn max_abs(series: &[(f64, f64)]) -> f64 {
    series.iter().map(|x| x.1.abs()).fold(0.0, f64::max)
}

fn worst_k_drop(record: &TrajectoryRecord) -> f64 {
    record
        .entries
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0].snapshot.neg_energy, w[1].snapshot.neg_energy);
            (a - b) / (1.0 + a.abs())
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

fn random_state(rng: &mut ChaCha8Rng, mesh: &RadialMesh) -> Vec<f64> {
    if rng.gen_bool(0.5) {
        let mut u: Vec<f64> = (0..mesh.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let scale = 10f64.powf(rng.gen_range(-1.0..1.5));
        u.iter_mut().for_each(|v| *v *= scale);
        u
    } else {
        let c: Vec<f64> = (0..6).map(|_| rng.gen_range(-3.0..3.0)).collect();
        mesh.sample(|r| {
            c.iter()
                .enumerate()
                .map(|(m, a)| a * ((m as f64 + 0.5) * PI * r).cos())
                .sum()
        })
    }
}

fn c01_hardy() -> Outcome {
    let start = Instant::now();
    let mut worst_rel = 0.0f64;
    for (i, dim) in [3usize, 4, 5].into_iter().enumerate() {
        let mesh = RadialMesh::new(dim, 2048, 1.0).unwrap();
        let worst = bounds::hardy_check(&mesh, 1000, 100 + i as u64).unwrap();
        let h = hardy_constant(dim);
        ensure(worst <= h * 1.01, || {
            format!("n = {dim}: ratio {worst} exceeds 1.01·{h}")
        })?;
        worst_rel = worst_rel.max(worst / h);
    }
    within_time(start.elapsed(), Duration::from_secs(10))?;
    Ok(format!(
        "max ratio/H_n = {worst_rel:.4} in {:?}",
        start.elapsed()
    ))
}

fn c02_nehari() -> Outcome {
    let start = Instant::now();
    let mesh = RadialMesh::new(3, 256, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst_closed = 0.0f64;
    for i in 0..1000 {
        let p = [2.5, 3.0, 3.5][i % 3];
        let k = rng.gen_range(0.2..3.0);
        let delta = rng.gen_range(0.2..3.0);
        let model = Model::new(
            ExponentField::Constant { p },
            SourceModulation::from_curve(ModulationCurve::Constant { k }),
        );
        let f = Functionals::new(&mesh, &model);
        let u = random_state(&mut rng, &mesh);
        let lam = f
            .nehari_scaling(&u, 0.0, delta)
            .map_err(|e| e.to_string())?;
        let g = mesh.grad_l2_sq(&u).unwrap();
        let power: f64 = mesh
            .weights()
            .iter()
            .zip(&u)
            .map(|(w, v)| w * v.abs().powf(p))
            .sum();
        let closed = (delta * g / (k * power)).powf(1.0 / (p - 2.0));
        let e = rel_err(lam, closed);
        ensure(e <= 1e-8, || {
            format!("p = {p}: λ₀ = {lam}, closed form {closed}")
        })?;
        worst_closed = worst_closed.max(e);
    }
    let mut worst_resid = 0.0f64;
    for _ in 0..1000 {
        let model = Model::new(
            ExponentField::Separable {
                a: rng.gen_range(2.2..2.8),
                b: rng.gen_range(-0.1..0.5),
                c: rng.gen_range(0.0..0.6),
            },
            SourceModulation::from_curve(ModulationCurve::Saturating {
                k0: rng.gen_range(0.5..1.0),
                k_limit: rng.gen_range(1.0..2.0),
            }),
        );
        let f = Functionals::new(&mesh, &model);
        let t = rng.gen_range(0.0..3.0);
        let delta = rng.gen_range(0.2..3.0);
        let u = random_state(&mut rng, &mesh);
        let lam = f.nehari_scaling(&u, t, delta).map_err(|e| e.to_string())?;
        let v: Vec<f64> = u.iter().map(|x| lam * x).collect();
        let resid = f.nehari(&v, t, delta).unwrap().abs();
        let scale = delta * lam * lam * mesh.grad_l2_sq(&u).unwrap();
        ensure(resid <= 1e-10 * scale, || {
            format!("residual {resid} vs scale {scale}")
        })?;
        worst_resid = worst_resid.max(resid / scale);
    }
    within_time(start.elapsed(), Duration::from_secs(10))?;
    Ok(format!(
        "closed-form rel err ≤ {worst_closed:.2e}, variable-p residual ≤ {worst_resid:.2e}"
    ))
}

fn c03_quadrature() -> Outcome {
    let mesh = RadialMesh::new(3, 4096, 1.0).unwrap();
    let model = cubic_model();
    let f = Functionals::new(&mesh, &model);
    let u = mesh.sample(|r| 1.0 - r * r);
    let cubic: Vec<f64> = u.iter().map(|v| v.powi(3)).collect();
    let r2 = mesh.sample(|r| r * r);
    let alpha = 0.5;
    let mut checks: Vec<(&str, f64, f64)> = vec![
        ("|B|", mesh.volume(), 4.0 * PI / 3.0),
        ("∫r²", mesh.integrate(&r2).unwrap(), 4.0 * PI / 5.0),
        (
            "‖u/|x|‖²",
            mesh.weighted_l2_sq(&u).unwrap(),
            32.0 * PI / 15.0,
        ),
        ("‖∇u‖²", mesh.grad_l2_sq(&u).unwrap(), 16.0 * PI / 5.0),
        (
            "∫u³",
            mesh.integrate_dirichlet(&cubic).unwrap(),
            64.0 * PI / 315.0,
        ),
        ("‖u‖²", mesh.l2_sq(&u).unwrap(), 32.0 * PI / 105.0),
        (
            "J(u)",
            f.energy(&u, 0.0, 1.0).unwrap(),
            8.0 * PI / 5.0 - 64.0 * PI / 945.0,
        ),
        (
            "I(u)",
            f.nehari(&u, 0.0, 1.0).unwrap(),
            16.0 * PI / 5.0 - 64.0 * PI / 315.0,
        ),
        ("L(u)", f.lyapunov(&u).unwrap(), 8.0 * PI / 3.0),
        (
            "E(0)",
            f.modified_energy(&vec![0.0; mesh.len()], 0.0, 1.0).unwrap(),
            4.0 * PI / 9.0,
        ),
        ("λ₀(u)", f.nehari_scaling(&u, 0.0, 1.0).unwrap(), 15.75),
        (
            "Sobolev ratio",
            sobolev_ratio(&mesh, &u, 3.0).unwrap().unwrap(),
            (64.0 * PI / 315.0).powf(1.0 / 3.0) / (16.0 * PI / 5.0).sqrt(),
        ),
        (
            "GN ratio",
            gn_ratio(&mesh, &u, 3.0).unwrap().unwrap(),
            (64.0 * PI / 315.0)
                / ((16.0 * PI / 5.0).powf(1.5 * alpha)
                    * (32.0 * PI / 105.0).powf(1.5 * (1.0 - alpha))),
        ),
    ];
    let u30 = mesh.sample(|r| 30.0 * (1.0 - r * r));
    checks.push((
        "T̄₁(30(1−r²))",
        upper_bound_negative_energy(&mesh, &model, &u30).unwrap(),
        4800.0 / (3.0 * (27000.0 * 64.0 / 945.0 - 1440.0)),
    ));
    let mesh4 = RadialMesh::new(4, 4096, 1.0).unwrap();
    let u4 = mesh4.sample(|r| 1.0 - r * r);
    checks.push(("n=4 |B|", mesh4.volume(), PI * PI / 2.0));
    checks.push((
        "n=4 ‖∇u‖²",
        mesh4.grad_l2_sq(&u4).unwrap(),
        4.0 * PI * PI / 3.0,
    ));
    checks.push((
        "n=4 ‖u/|x|‖²",
        mesh4.weighted_l2_sq(&u4).unwrap(),
        PI * PI / 3.0,
    ));
    let mut worst = 0.0f64;
    for (name, got, want) in &checks {
        let e = rel_err(*got, *want);
        ensure(e <= 1e-6, || {
            format!("{name}: {got} vs {want} (rel {e:.2e})")
        })?;
        worst = worst.max(e);
    }
    Ok(format!(
        "{} oracles, worst rel err {worst:.2e}",
        checks.len()
    ))
}

struct SmoothRuns {
    coarse: TrajectoryRecord,
    fine: TrajectoryRecord,
    elapsed: Duration,
}

fn smooth_runs() -> SmoothRuns {
    let start = Instant::now();
    let mesh = RadialMesh::new(3, 1024, 1.0).unwrap();
    let model = smooth_model();
    let u0 = parabola(&mesh, 5.0);
    let cfg = SolverConfig {
        tau0: 2e-3,
        t_end: 1.0,
        ..Default::default()
    };
    let coarse = run(&mesh, &model, &u0, &cfg).unwrap();
    let fine = run(&mesh, &model, &u0, &SolverConfig { tau0: 1e-3, ..cfg }).unwrap();
    SmoothRuns {
        coarse,
        fine,
        elapsed: start.elapsed(),
    }
}

fn c04_energy_identity(runs: &SmoothRuns) -> Outcome {
    let model = smooth_model();
    ensure(runs.fine.termination == Termination::Horizon, || {
        "smooth run blew up".into()
    })?;
    let rc = max_abs(&verify_energy_identity(
        &runs.coarse,
        &model,
        IdentityOptions::default(),
    ));
    let rf = max_abs(&verify_energy_identity(
        &runs.fine,
        &model,
        IdentityOptions::default(),
    ));
    let ratio = rc / rf;
    let j0 = runs.fine.initial().energy.abs();
    ensure((1.7..=2.3).contains(&ratio), || format!("ratio {ratio}"))?;
    ensure(rf <= 1e-3 * j0, || {
        format!("residual {rf} exceeds 1e-3·|J0| = {}", 1e-3 * j0)
    })?;
    within_time(runs.elapsed, Duration::from_secs(60))?;
    Ok(format!(
        "max|R| {rc:.3e} -> {rf:.3e}, ratio {ratio:.3}, |R|/|J0| = {:.2e}",
        rf / j0
    ))
}

fn c05_l_derivative(runs: &SmoothRuns) -> Outcome {
    let dc = max_abs(&verify_l_derivative(&runs.coarse));
    let df = max_abs(&verify_l_derivative(&runs.fine));
    let max_i = runs
        .fine
        .entries
        .iter()
        .map(|e| e.snapshot.nehari.abs())
        .fold(0.0, f64::max);
    ensure(df <= 1e-2 * max_i, || {
        format!("residual {df} vs 1e-2·max|I| = {}", 1e-2 * max_i)
    })?;
    ensure(df < dc, || format!("no improvement: {dc} -> {df}"))?;
    Ok(format!(
        "max|dL/dt + I| {dc:.3e} -> {df:.3e}, max|I| = {max_i:.3e}"
    ))
}

struct BlowupRun {
    amplitude: f64,
    record: TrajectoryRecord,
    upper: f64,
    t_num: Option<f64>,
}

fn blowup_runs(amplitudes: &[f64], positive: bool) -> Vec<BlowupRun> {
    let mesh = RadialMesh::new(3, 1024, 1.0).unwrap();
    let model = cubic_model();
    amplitudes
        .iter()
        .map(|&a| {
            let u0 = parabola(&mesh, a);
            let upper = if positive {
                upper_bound_positive_energy(&mesh, &model, u0.values()).unwrap()
            } else {
                upper_bound_negative_energy(&mesh, &model, u0.values()).unwrap()
            };
            let cfg = SolverConfig {
                tau0: 1e-2,
                t_end: 1.1 * upper,
                ..Default::default()
            };
            let record = run(&mesh, &model, &u0, &cfg).unwrap();
            let t_num = detect_blowup_time(&record).ok().map(|e| e.t_num);
            BlowupRun {
                amplitude: a,
                record,
                upper,
                t_num,
            }
        })
        .collect()
}

fn constants_cubic() -> BoundConstants {
    let mesh = RadialMesh::new(3, 1024, 1.0).unwrap();
    let dict = standard_dictionary();
    BoundConstants::compute(&mesh, &cubic_model(), |q| {
        bounds::gn_constant_estimate(&mesh, q, &dict, 0)
    })
    .unwrap()
}

fn c07_negative_energy(
    runs: &[BlowupRun],
    constants: &BoundConstants,
    elapsed: Duration,
) -> Outcome {
    let mut parts = Vec::new();
    let mut previous = f64::INFINITY;
    for r in runs {
        let t_num = r
            .t_num
            .ok_or_else(|| format!("A = {}: no blow-up detected", r.amplitude))?;
        ensure(r.record.termination.blew_up(), || {
            format!("A = {}: horizon", r.amplitude)
        })?;
        let t_lower = lower_bound(&r.record.times(), &r.record.lyapunov(), constants, 0.0)
            .map_err(|e| e.to_string())?;
        ensure(t_lower <= t_num && t_num <= 1.05 * r.upper, || {
            format!(
                "A = {}: {t_lower} ≤ {t_num} ≤ 1.05·{} fails",
                r.amplitude, r.upper
            )
        })?;
        ensure(t_num < previous, || {
            format!("T_num not decreasing at A = {}", r.amplitude)
        })?;
        previous = t_num;
        parts.push(format!(
            "A={}: T_num {t_num:.4} ≤ T̄₁ {:.4}",
            r.amplitude, r.upper
        ));
    }
    let a30 = runs.iter().find(|r| r.amplitude == 30.0).unwrap();
    ensure((a30.upper - 4.118).abs() < 5e-3, || {
        format!("T̄₁(30) = {}", a30.upper)
    })?;
    within_time(elapsed, Duration::from_secs(300))?;
    Ok(parts.join(", "))
}

fn c08_positive_energy(run22: &BlowupRun) -> Outcome {
    let mesh = RadialMesh::new(3, 1024, 1.0).unwrap();
    let model = cubic_model();
    let f = Functionals::new(&mesh, &model);
    let s = f.snapshot(parabola(&mesh, 22.0).values(), 0.0).unwrap();
    let c1 = c1_constant(3.0, 3);
    ensure(
        0.0 <= c1 * s.modified_energy && c1 * s.modified_energy < s.lyapunov,
        || {
            format!(
                "gate fails: C1·E = {}, L0 = {}",
                c1 * s.modified_energy,
                s.lyapunov
            )
        },
    )?;
    let e = 484.0 * 8.0 * PI / 5.0 - 22f64.powi(3) * 64.0 * PI / 945.0 + 4.0 * PI / 9.0;
    let l0 = 484.0 * 8.0 * PI / 3.0;
    let closed = 48.0 * l0 / (l0 - 12.0 * e);
    ensure(rel_err(run22.upper, closed) < 1e-3, || {
        format!("T̄₂ = {} vs {closed}", run22.upper)
    })?;
    ensure((run22.upper - 95.8).abs() < 0.1, || {
        format!("T̄₂ = {}", run22.upper)
    })?;
    let t_num = run22.t_num.ok_or("no blow-up for A = 22")?;
    ensure(t_num <= run22.upper, || {
        format!("T_num {t_num} > T̄₂ {}", run22.upper)
    })?;
    Ok(format!(
        "C1·E/L0 = {:.3}, T_num {t_num:.4} ≤ T̄₂ {:.3} (closed form {closed:.3})",
        c1 * s.modified_energy / s.lyapunov,
        run22.upper
    ))
}

fn c09_lower_bound(runs: &[&BlowupRun], constants: &BoundConstants) -> Outcome {
    let alpha = interpolation_alpha(3.0, 3).unwrap();
    ensure((alpha - 0.5).abs() < 1e-15, || format!("α = {alpha}"))?;
    ensure((constants.gamma_plus - 3.0).abs() < 1e-12, || {
        format!("γ = {}", constants.gamma_plus)
    })?;
    let tail = lower_bound_integral(2.0, 3.0, 3.0).unwrap();
    ensure(rel_err(tail, 0.0625) <= 1e-8, || {
        format!("tail integral {tail}")
    })?;
    let mut checked = 0;
    for r in runs {
        let t_num = r.t_num.ok_or("run without blow-up")?;
        let times = r.record.times();
        for t0 in [0.0, 0.5 * t_num, 0.9 * times[times.len() - 1]] {
            let t_lower = lower_bound(&times, &r.record.lyapunov(), constants, t0)
                .map_err(|e| e.to_string())?;
            let snapped = times[times.partition_point(|&t| t <= t0) - 1];
            ensure(t_lower > snapped && t_lower <= t_num, || {
                format!(
                    "A = {}, t0 = {t0}: T̲ = {t_lower}, T_num = {t_num}",
                    r.amplitude
                )
            })?;
            checked += 1;
        }
    }
    Ok(format!(
        "α = {alpha}, γ = {}, tail = {tail}, {checked} lower bounds ordered",
        constants.gamma_plus
    ))
}

fn c06_k_monotone(records: &[&TrajectoryRecord]) -> Outcome {
    let worst = records
        .iter()
        .map(|r| worst_k_drop(r))
        .fold(f64::NEG_INFINITY, f64::max);
    ensure(worst <= 1e-8, || {
        format!("K dropped by {worst:.3e}·(1+|K|)")
    })?;
    let steps: usize = records.iter().map(|r| r.len() - 1).sum();
    Ok(format!(
        "{} trajectories, {steps} steps, worst normalized drop {worst:.3e}",
        records.len()
    ))
}

fn c10_concavity() -> Outcome {
    let ts: Vec<f64> = (0..=90).map(|i| 0.01 * i as f64).collect();
    let psi: Vec<f64> = ts.iter().map(|t| 1.0 / (1.0 - t)).collect();
    let v = bounds::concavity_check(&ts, &psi, 1.0, 1e-10).map_err(|e| e.to_string())?;
    ensure(v.passed, || {
        format!("(1−t)⁻¹ failed, violation {}", v.worst_violation)
    })?;
    ensure((v.bound - 1.0).abs() <= 1e-12, || {
        format!("bound {}", v.bound)
    })?;
    let exp: Vec<f64> = ts.iter().map(|t| t.exp()).collect();
    let w = bounds::concavity_check(&ts, &exp, 1.0, 1e-10).map_err(|e| e.to_string())?;
    ensure(!w.passed, || "e^t passed".into())?;
    Ok(format!("(1−t)⁻¹ passes with bound {}, e^t fails", v.bound))
}

fn c11_luxemburg() -> Outcome {
    let two = luxemburg_norm_weighted(&[0.5, 0.5], &[2.0, 2.0], &[2.0, 4.0])
        .map_err(|e| e.to_string())?;
    ensure((two - 2.0).abs() <= 1e-10, || {
        format!("two-exponent case {two}")
    })?;
    let mesh = RadialMesh::new(3, 256, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let s = rng.gen_range(1.0..6.0);
        let u = random_state(&mut rng, &mesh);
        let norm = luxemburg_norm(&mesh, &u, &vec![s; mesh.len()]).map_err(|e| e.to_string())?;
        let direct: f64 = mesh
            .weights()
            .iter()
            .zip(&u)
            .map(|(w, v)| w * v.abs().powf(s))
            .sum::<f64>()
            .powf(1.0 / s);
        let e = rel_err(norm, direct);
        ensure(e <= 1e-8, || format!("s = {s}: {norm} vs {direct}"))?;
        worst = worst.max(e);
    }
    Ok(format!(
        "two-exponent case {two}, constant-exponent rel err ≤ {worst:.2e}"
    ))
}

fn c12_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = dir.path().join("run.toml");
    std::fs::write(
        &config,
        "seed = 5\n[mesh]\nnodes = 256\n[initial]\nfamily = \"parabola\"\namplitude = 30.0\n[solver]\ntau0 = 0.01\nt_end = 5.0\n",
    )
    .map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for i in 0..2 {
        let csv = dir.path().join(format!("traj{i}.csv"));
        let report = dir.path().join(format!("report{i}.json"));
        let mut sink = Vec::new();
        let code =
            cmd_simulate(&CommandArgs::new(&config).out(&csv), &mut sink).map_err(|e| e.message)?;
        ensure(code == 0, || format!("simulate exit {code}"))?;
        let args = CommandArgs::new(&config).out(&report).trajectory(&csv);
        let code = cmd_bounds(&args, &mut sink).map_err(|e| e.message)?;
        ensure(code == 0, || format!("bounds exit {code}"))?;
        let read = |p: &std::path::Path| std::fs::read(p).map_err(|e| e.to_string());
        outputs.push((read(&csv)?, read(&summary_path(&csv))?, read(&report)?));
    }
    ensure(outputs[0] == outputs[1], || {
        "outputs differ between identical runs".into()
    })?;
    let summary: serde_json::Value =
        serde_json::from_slice(&outputs[0].1).map_err(|e| e.to_string())?;
    let report: serde_json::Value =
        serde_json::from_slice(&outputs[0].2).map_err(|e| e.to_string())?;
    ensure(summary["t_num"] == report["t_num"], || {
        "T_num differs after round trip".into()
    })?;
    Ok(format!(
        "CSV ({} bytes), summary and report bit-identical; T_num {} round-trips",
        outputs[0].0.len(),
        report["t_num"]
    ))
}

fn guarded(f: impl FnOnce() -> Outcome) -> Outcome {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(r) => r,
        Err(p) => Err(p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into())),
    }
}

fn main() {
    let mut results: Vec<(&str, Outcome)> = Vec::new();
    results.push(("01 Hardy inequality", guarded(c01_hardy)));
    results.push(("02 Nehari scaling", guarded(c02_nehari)));
    results.push(("03 quadrature oracles", guarded(c03_quadrature)));

    let smooth = smooth_runs();
    results.push((
        "04 energy identity",
        guarded(|| c04_energy_identity(&smooth)),
    ));
    results.push(("05 dL/dt = -I", guarded(|| c05_l_derivative(&smooth))));

    let start = Instant::now();
    let neg = blowup_runs(&[24.0, 27.0, 30.0], false);
    let negative_runs_time = start.elapsed();
    let pos = blowup_runs(&[22.0], true);
    let constants = constants_cubic();

    let mut records: Vec<&TrajectoryRecord> = vec![&smooth.coarse, &smooth.fine];
    records.extend(neg.iter().map(|r| &r.record));
    records.extend(pos.iter().map(|r| &r.record));
    results.push(("06 K monotone", guarded(|| c06_k_monotone(&records))));
    results.push((
        "07 negative-energy ordering",
        guarded(|| c07_negative_energy(&neg, &constants, negative_runs_time)),
    ));
    results.push((
        "08 positive-energy ordering",
        guarded(|| c08_positive_energy(&pos[0])),
    ));
    let blowups: Vec<&BlowupRun> = neg.iter().chain(pos.iter()).collect();
    results.push((
        "09 lower-bound machinery",
        guarded(|| c09_lower_bound(&blowups, &constants)),
    ));
    results.push(("10 concavity checker", guarded(c10_concavity)));
    results.push(("11 Luxemburg norm", guarded(c11_luxemburg)));
    results.push(("12 determinism", guarded(c12_determinism)));

    let mut failed = 0;
    for (name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("PASS [{name}] {detail}"),
            Err(reason) => {
                failed += 1;
                println!("FAIL [{name}] {reason}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
