//! Upper and lower blow-up time bounds, the constants they depend on, and
//! numerical checks of the Hardy inequality and concavity-based bounds.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{c1_constant, hardy_constant, Functionals};
use crate::mesh::RadialMesh;
use crate::model::Model;
use crate::numeric::adaptive_simpson;
use crate::profiles::Profile;

/// Safety factor applied to empirical embedding constants.
pub const CONSTANT_INFLATION: f64 = 2.0;

/// Gagliardo–Nirenberg exponent `α = (1/2 − 1/q)/(1/2 + 1/n − 1/r)` with `r = 2`.
pub fn interpolation_alpha(q: f64, dim: usize) -> Result<f64> {
    let upper = critical_exponent(dim);
    if !(q > 2.0 && q < upper) {
        return Err(Error::ExponentRange { q, upper });
    }
    Ok((0.5 - 1.0 / q) * dim as f64)
}

/// `2* = 2n/(n − 2)`.
pub fn critical_exponent(dim: usize) -> f64 {
    2.0 * dim as f64 / (dim as f64 - 2.0)
}

/// `γ = (1 − α)p/(2 − αp)`; needs `αp < 2`.
pub fn growth_exponent(alpha: f64, p: f64) -> Result<f64> {
    let ap = alpha * p;
    if !(ap < 2.0) {
        return Err(Error::InterpolationRange(format!("α·p = {ap} for p = {p}")));
    }
    Ok((1.0 - alpha) * p / (2.0 - ap))
}

/// One branch of `C*`:
/// `(2 − αp)/2 · (2/(k_∞ N αp))^{−αp/(2−αp)} · diam^{4γ}`.
pub fn young_coefficient(
    alpha: f64,
    p: f64,
    k_inf: f64,
    gn: f64,
    diameter: f64,
    gamma: f64,
) -> f64 {
    let ap = alpha * p;
    (2.0 - ap) / 2.0 * (2.0 / (k_inf * gn * ap)).powf(-ap / (2.0 - ap)) * diameter.powf(4.0 * gamma)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundConstants {
    pub h_n: f64,
    pub c1: f64,
    pub alpha_plus: f64,
    pub alpha_minus: f64,
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    pub n_plus: f64,
    pub n_minus: f64,
    pub c_star: f64,
    #[serde(skip)]
    pub diameter: f64,
}

impl BoundConstants {
    /// Computes every constant; `gn` maps `q` to an estimate of `N_q`.
    pub fn compute(
        mesh: &RadialMesh,
        model: &Model,
        gn: impl Fn(f64) -> Result<f64>,
    ) -> Result<Self> {
        let dim = mesh.dim();
        let (pm, pp) = (model.exponent.p_minus(), model.exponent.p_plus());
        let alpha_plus = interpolation_alpha(pp, dim)?;
        let alpha_minus = interpolation_alpha(pm, dim)?;
        let gamma_plus = growth_exponent(alpha_plus, pp)?;
        let gamma_minus = growth_exponent(alpha_minus, pm)?;
        let n_plus = gn(pp)?;
        let n_minus = if pm == pp { n_plus } else { gn(pm)? };
        let diameter = mesh.diameter();
        let k_inf = model.modulation.k_inf;
        let c_star = young_coefficient(alpha_plus, pp, k_inf, n_plus, diameter, gamma_plus).max(
            young_coefficient(alpha_minus, pm, k_inf, n_minus, diameter, gamma_minus),
        );
        Ok(Self {
            h_n: hardy_constant(dim),
            c1: c1_constant(pm, dim),
            alpha_plus,
            alpha_minus,
            gamma_plus,
            gamma_minus,
            n_plus,
            n_minus,
            c_star,
            diameter,
        })
    }
}

/// Upper bound for negative initial energy:
/// `(‖u₀/|x|‖² + ‖∇u₀‖²)/(p⁻(2 − p⁻)J(u₀,0))`.
pub fn upper_bound_negative_energy(mesh: &RadialMesh, model: &Model, u0: &[f64]) -> Result<f64> {
    let f = Functionals::new(mesh, model);
    let s = f.snapshot(u0, 0.0)?;
    if !(s.modified_energy < 0.0) {
        return Err(Error::NotApplicable(format!(
            "E(u0,0) = {} is not negative",
            s.modified_energy
        )));
    }
    let pm = model.exponent.p_minus();
    Ok(2.0 * s.lyapunov / (pm * (2.0 - pm) * s.energy))
}

/// Upper bound for small nonnegative initial energy:
/// `4p⁺C₁L(0)/((p⁺ − 2)²p⁺M(0))` with `M(0) = L(0) − C₁E(u₀,0)`.
pub fn upper_bound_positive_energy(mesh: &RadialMesh, model: &Model, u0: &[f64]) -> Result<f64> {
    let f = Functionals::new(mesh, model);
    let s = f.snapshot(u0, 0.0)?;
    let c1 = f.c1();
    let ce = c1 * s.modified_energy;
    if !(ce >= 0.0 && ce < s.lyapunov) {
        return Err(Error::NotApplicable(format!(
            "need 0 ≤ C1·E(u0,0) < L(0), got C1·E = {ce}, L(0) = {}",
            s.lyapunov
        )));
    }
    let pp = model.exponent.p_plus();
    let m0 = s.lyapunov - ce;
    Ok(4.0 * pp * c1 * s.lyapunov / ((pp - 2.0).powi(2) * pp * m0))
}

/// `∫_{from}^∞ ds/(s^{γ⁺} + s^{γ⁻})`, evaluated as adaptive Simpson in `ln s`
/// up to `S = 10⁶·max(1, from)` plus the lower tail estimate
/// `S^{1−γmax}/(2(γmax − 1))`. Never exceeds the true value by more than the
/// quadrature tolerance.
pub fn lower_bound_integral(from: f64, gamma_plus: f64, gamma_minus: f64) -> Result<f64> {
    if !(from > 0.0 && from.is_finite()) {
        return Err(Error::Invalid(format!(
            "integral start must be positive (got {from})"
        )));
    }
    let g_max = gamma_plus.max(gamma_minus);
    if !(gamma_plus > 1.0 && gamma_minus > 1.0) {
        return Err(Error::InterpolationRange(format!(
            "growth exponents {gamma_plus}, {gamma_minus} must exceed 1"
        )));
    }
    let s_big = 1e6 * from.max(1.0);
    let integrand = |x: f64| {
        let s = x.exp();
        s / (s.powf(gamma_plus) + s.powf(gamma_minus))
    };
    let (a, b) = (from.ln(), s_big.ln());
    let coarse = adaptive_simpson(&integrand, a, b, 1e-6 * integrand(a) * (b - a));
    let fine = adaptive_simpson(&integrand, a, b, 1e-13 * coarse.abs());
    Ok(fine + s_big.powf(1.0 - g_max) / (2.0 * (g_max - 1.0)))
}

/// `T̲ = t₀ + (1/C*)∫_{L(t₀)}^∞ ds/(s^{γ⁺} + s^{γ⁻})`; `t0` snaps to the
/// latest record time not after it.
pub fn lower_bound(
    times: &[f64],
    lyapunov: &[f64],
    constants: &BoundConstants,
    t0: f64,
) -> Result<f64> {
    if times.is_empty() || times.len() != lyapunov.len() {
        return Err(Error::TimeOutsideRecord(t0));
    }
    let last = times[times.len() - 1];
    if !(t0 >= times[0] && t0 <= last) {
        return Err(Error::TimeOutsideRecord(t0));
    }
    let idx = times.partition_point(|&t| t <= t0) - 1;
    let integral =
        lower_bound_integral(lyapunov[idx], constants.gamma_plus, constants.gamma_minus)?;
    Ok(times[idx] + integral / constants.c_star)
}

/// `‖u‖_q^q/(‖∇u‖^{αq}‖u‖₂^{(1−α)q})` with lumped `L^q` and `L²` norms.
pub fn gn_ratio(mesh: &RadialMesh, u: &[f64], q: f64) -> Result<Option<f64>> {
    let alpha = interpolation_alpha(q, mesh.dim())?;
    let grad = mesh.grad_l2_sq(u)?;
    let l2 = mesh.l2_sq(u)?;
    if !(grad > 0.0 && l2 > 0.0) {
        return Ok(None);
    }
    let lq = lumped_power(mesh, u, q);
    Ok(Some(
        lq / (grad.powf(0.5 * alpha * q) * l2.powf(0.5 * (1.0 - alpha) * q)),
    ))
}

/// `‖u‖_q/‖∇u‖₂` with the lumped `L^q` norm.
pub fn sobolev_ratio(mesh: &RadialMesh, u: &[f64], q: f64) -> Result<Option<f64>> {
    interpolation_alpha(q, mesh.dim())?;
    let grad = mesh.grad_l2_sq(u)?;
    if !(grad > 0.0) {
        return Ok(None);
    }
    Ok(Some(lumped_power(mesh, u, q).powf(1.0 / q) / grad.sqrt()))
}

fn lumped_power(mesh: &RadialMesh, u: &[f64], q: f64) -> f64 {
    mesh.weights()
        .iter()
        .zip(u)
        .map(|(w, v)| w * v.abs().powf(q))
        .sum()
}

/// Empirical `N_q`: the largest GN ratio found over `dictionary`, times
/// [`CONSTANT_INFLATION`].
pub fn gn_constant_estimate(
    mesh: &RadialMesh,
    q: f64,
    dictionary: &[Profile],
    seed: u64,
) -> Result<f64> {
    interpolation_alpha(q, mesh.dim())?;
    let best = maximize_ratio(mesh, dictionary, seed, |u| {
        gn_ratio(mesh, u, q).ok().flatten()
    })?;
    Ok(CONSTANT_INFLATION * best)
}

/// Empirical `S_q`: the largest Sobolev ratio found over `dictionary`, times
/// [`CONSTANT_INFLATION`].
pub fn sobolev_constant_estimate(
    mesh: &RadialMesh,
    q: f64,
    dictionary: &[Profile],
    seed: u64,
) -> Result<f64> {
    interpolation_alpha(q, mesh.dim())?;
    let best = maximize_ratio(mesh, dictionary, seed, |u| {
        sobolev_ratio(mesh, u, q).ok().flatten()
    })?;
    Ok(CONSTANT_INFLATION * best)
}

const PERTURBATIONS: usize = 24;
const MODES: usize = 4;

/// Maximizes a scale-invariant ratio: coordinate ascent on each profile's
/// shape parameters, then random smooth multiplicative perturbations. Each
/// profile draws from its own seeded stream so results do not depend on
/// the rest of the dictionary.
fn maximize_ratio<F>(mesh: &RadialMesh, dictionary: &[Profile], seed: u64, ratio: F) -> Result<f64>
where
    F: Fn(&[f64]) -> Option<f64> + Sync,
{
    if dictionary.is_empty() {
        return Err(Error::EmptyDictionary);
    }
    let per_profile: Vec<f64> = dictionary
        .par_iter()
        .enumerate()
        .map(|(i, profile)| {
            let eval = |p: &Profile| ratio(&p.sample(mesh)).unwrap_or(f64::NEG_INFINITY);
            let mut best_profile = *profile;
            let mut best = eval(profile);
            let mut params = profile.shape_params();
            for j in 0..params.len() {
                let mut factor = 1.5f64;
                while factor > 1.001 {
                    let mut improved = false;
                    for cand in [params[j] * factor, params[j] / factor] {
                        let mut trial = params.clone();
                        trial[j] = cand;
                        let p = profile.with_shape_params(&trial);
                        let v = eval(&p);
                        if v > best {
                            best = v;
                            best_profile = p;
                            params = p.shape_params();
                            improved = true;
                            break;
                        }
                    }
                    if !improved {
                        factor = factor.sqrt();
                    }
                }
            }
            let mut rng =
                ChaCha8Rng::seed_from_u64(seed ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let base = best_profile.sample(mesh);
            for _ in 0..PERTURBATIONS {
                let coeffs: [f64; MODES] = std::array::from_fn(|_| rng.gen_range(-0.4..0.4));
                let v: Vec<f64> = base
                    .iter()
                    .zip(mesh.radii())
                    .map(|(&b, &r)| {
                        let bump: f64 = coeffs
                            .iter()
                            .enumerate()
                            .map(|(m, c)| c * ((m + 1) as f64 * std::f64::consts::PI * r).cos())
                            .sum();
                        b * (1.0 + bump)
                    })
                    .collect();
                if let Some(x) = ratio(&v) {
                    best = best.max(x);
                }
            }
            best
        })
        .collect();
    let best = per_profile.into_iter().fold(f64::NEG_INFINITY, f64::max);
    if !best.is_finite() {
        return Err(Error::ZeroProfile);
    }
    Ok(best)
}

/// Largest `‖u/|x|‖²/‖∇u‖²` over `trials` seeded random Dirichlet nodal
/// functions: rough vectors, smooth mode sums, and near-extremal singular
/// profiles.
pub fn hardy_check(mesh: &RadialMesh, trials: usize, seed: u64) -> Result<f64> {
    if trials == 0 {
        return Err(Error::Invalid(
            "hardy_check needs at least one trial".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let beta_extremal = 0.5 * (mesh.dim() as f64 - 2.0);
    let mut worst = 0.0f64;
    for trial in 0..trials {
        let u: Vec<f64> = match trial % 3 {
            0 => (0..mesh.len()).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            1 => {
                let coeffs: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
                mesh.sample(|r| {
                    coeffs
                        .iter()
                        .enumerate()
                        .map(|(m, c)| c * ((m as f64 + 0.5) * std::f64::consts::PI * r).cos())
                        .sum()
                })
            }
            _ => {
                let exponent = beta_extremal * rng.gen_range(0.5..1.2);
                let core = 10f64.powf(rng.gen_range(-4.0..-0.5));
                Profile::Singular {
                    amplitude: 1.0,
                    exponent,
                    core,
                }
                .sample(mesh)
            }
        };
        let grad = mesh.grad_l2_sq(&u)?;
        if grad > 0.0 {
            worst = worst.max(mesh.weighted_l2_sq(&u)? / grad);
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcavityVerdict {
    pub passed: bool,
    /// `ψ(0)/(θψ'(0))`
    pub bound: f64,
    /// Largest normalized violation found (≤ 0 when the inequality holds).
    pub worst_violation: f64,
}

/// Checks `ψψ'' − (1 + θ)ψ'² ≥ 0` on samples of `ψ > 0`.
///
/// The inequality is equivalent to concavity of `φ = ψ^{−θ}`, so the check
/// runs on central second differences of `φ`, which are exact when the
/// inequality is an equality. `ψ'(0)` comes from a three-point one-sided
/// difference of `φ`. `tolerance` is relative to the local size of `φ`.
pub fn concavity_check(
    times: &[f64],
    psi: &[f64],
    theta: f64,
    tolerance: f64,
) -> Result<ConcavityVerdict> {
    const MIN_SAMPLES: usize = 5;
    if times.len() != psi.len() {
        return Err(Error::LengthMismatch {
            expected: times.len(),
            got: psi.len(),
        });
    }
    if times.len() < MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            needed: MIN_SAMPLES,
            got: times.len(),
        });
    }
    if !(theta > 0.0) {
        return Err(Error::Invalid(format!(
            "theta must be positive (got {theta})"
        )));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Invalid("sample times must increase strictly".into()));
    }
    if psi.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::Invalid("psi must stay positive".into()));
    }
    let phi: Vec<f64> = psi.iter().map(|v| v.powf(-theta)).collect();
    let mut worst = f64::NEG_INFINITY;
    for i in 1..phi.len() - 1 {
        let (h0, h1) = (times[i] - times[i - 1], times[i + 1] - times[i]);
        let second = 2.0 * ((phi[i + 1] - phi[i]) / h1 - (phi[i] - phi[i - 1]) / h0) / (h0 + h1);
        let scale = phi[i - 1].abs().max(phi[i].abs()).max(phi[i + 1].abs());
        worst = worst.max(second * h0 * h1 / scale);
    }
    let (h0, h1) = (times[1] - times[0], times[2] - times[1]);
    let dphi0 = -(2.0 * h0 + h1) / (h0 * (h0 + h1)) * phi[0] + (h0 + h1) / (h0 * h1) * phi[1]
        - h0 / (h1 * (h0 + h1)) * phi[2];
    // ψ'(0) = −ψ(0)^{1+θ} φ'(0)/θ
    let dpsi0 = -psi[0].powf(1.0 + theta) * dphi0 / theta;
    if !(dpsi0 > 0.0) {
        return Err(Error::Invalid(format!(
            "psi'(0) = {dpsi0} must be positive"
        )));
    }
    Ok(ConcavityVerdict {
        passed: worst <= tolerance,
        bound: psi[0] / (theta * dpsi0),
        worst_violation: worst,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictStatus {
    Satisfied,
    Violated,
    NotApplicable,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub bound: String,
    pub status: VerdictStatus,
    pub detail: String,
    pub evidence: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupReport {
    pub t_num: Option<f64>,
    pub t_num_bracket: Option<(f64, f64)>,
    pub t_upper_1: Option<f64>,
    pub t_upper_2: Option<f64>,
    pub t_lower: Option<f64>,
    pub constants: Option<BoundConstants>,
    pub verdicts: Vec<Verdict>,
}

impl BlowupReport {
    pub fn verdict(&self, bound: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.bound == bound)
    }

    pub fn any_violated(&self) -> bool {
        self.verdicts
            .iter()
            .any(|v| v.status == VerdictStatus::Violated)
    }
}

/// Inputs for [`build_report`]: the model, the initial datum, and the `(t, L)`
/// series of a trajectory with its termination.
pub struct ReportInput<'a> {
    pub mesh: &'a RadialMesh,
    pub model: &'a Model,
    pub u0: &'a [f64],
    pub times: &'a [f64],
    pub lyapunov: &'a [f64],
    pub blew_up: bool,
    /// Horizon of the supplied trajectory; `None` when no trajectory was run.
    pub t_end: Option<f64>,
    pub t0: f64,
    pub dictionary: &'a [Profile],
    pub seed: u64,
}

/// Relative slack granted to the numerical blow-up time against the upper bounds.
pub const UPPER_SLACK: f64 = 0.05;

pub fn build_report(input: &ReportInput) -> Result<BlowupReport> {
    let f = Functionals::new(input.mesh, input.model);
    let s0 = f.snapshot(input.u0, 0.0)?;
    let estimate = if input.blew_up {
        Some(crate::solver::detect_blowup_time_from_series(
            input.times,
            input.lyapunov,
        )?)
    } else {
        None
    };
    let mut verdicts = Vec::new();
    let mut base_evidence = BTreeMap::new();
    base_evidence.insert("E0".to_string(), s0.modified_energy);
    base_evidence.insert("J0".to_string(), s0.energy);
    base_evidence.insert("L0".to_string(), s0.lyapunov);
    base_evidence.insert("C1".to_string(), f.c1());

    let mut upper = |name: &str, result: Result<f64>, note: &str| -> Result<Option<f64>> {
        let mut evidence = base_evidence.clone();
        let (status, detail, value) = match result {
            Ok(bound) => {
                evidence.insert("bound".into(), bound);
                let (status, detail) = match estimate {
                    Some(est) => {
                        evidence.insert("t_num_lower".into(), est.bracket.0);
                        if est.bracket.0 <= bound * (1.0 + UPPER_SLACK) {
                            (
                                VerdictStatus::Satisfied,
                                format!("blow-up before {bound:.6}"),
                            )
                        } else {
                            (
                                VerdictStatus::Violated,
                                format!("blow-up observed after the bound {bound:.6}"),
                            )
                        }
                    }
                    None => match input.t_end {
                        Some(t_end) if t_end > bound * (1.0 + UPPER_SLACK) => (
                            VerdictStatus::Violated,
                            format!("no blow-up up to t_end = {t_end} beyond the bound {bound:.6}"),
                        ),
                        Some(t_end) => (
                            VerdictStatus::Inconclusive,
                            format!("horizon t_end = {t_end} ends before the bound {bound:.6}"),
                        ),
                        None => (
                            VerdictStatus::Inconclusive,
                            "no trajectory supplied".to_string(),
                        ),
                    },
                };
                (status, format!("{detail}{note}"), Some(bound))
            }
            Err(Error::NotApplicable(reason)) => (VerdictStatus::NotApplicable, reason, None),
            Err(e) => return Err(e),
        };
        verdicts.push(Verdict {
            bound: name.to_string(),
            status,
            detail,
            evidence,
        });
        Ok(value)
    };
    let t_upper_1 = upper(
        "upper_negative_energy",
        upper_bound_negative_energy(input.mesh, input.model, input.u0),
        "",
    )?;
    let t_upper_2 = upper(
        "upper_positive_energy",
        upper_bound_positive_energy(input.mesh, input.model, input.u0),
        "; the undefined constant C2 is taken as 0",
    )?;

    let constants = BoundConstants::compute(input.mesh, input.model, |q| {
        gn_constant_estimate(input.mesh, q, input.dictionary, input.seed)
    });
    let (constants, t_lower) = match constants {
        Ok(c) => {
            let t_lower = lower_bound(input.times, input.lyapunov, &c, input.t0)?;
            let mut evidence = BTreeMap::new();
            evidence.insert("t0".into(), input.t0);
            evidence.insert("bound".into(), t_lower);
            evidence.insert("c_star".into(), c.c_star);
            let note = "; gamma uses m- = 2 and inflated empirical GN constants";
            let (status, detail) = match estimate {
                Some(est) => {
                    evidence.insert("t_num".into(), est.t_num);
                    if t_lower <= est.t_num {
                        (
                            VerdictStatus::Satisfied,
                            format!("lower bound {t_lower:.6e} ≤ T_num{note}"),
                        )
                    } else {
                        (
                            VerdictStatus::Violated,
                            format!("lower bound {t_lower:.6e} exceeds T_num{note}"),
                        )
                    }
                }
                None => (
                    VerdictStatus::Inconclusive,
                    format!("no blow-up observed; lower bound {t_lower:.6e}{note}"),
                ),
            };
            verdicts.push(Verdict {
                bound: "lower".into(),
                status,
                detail,
                evidence,
            });
            (Some(c), Some(t_lower))
        }
        Err(e @ (Error::InterpolationRange(_) | Error::ExponentRange { .. })) => {
            verdicts.push(Verdict {
                bound: "lower".into(),
                status: VerdictStatus::NotApplicable,
                detail: e.to_string(),
                evidence: BTreeMap::new(),
            });
            (None, None)
        }
        Err(e) => return Err(e),
    };

    Ok(BlowupReport {
        t_num: estimate.map(|e| e.t_num),
        t_num_bracket: estimate.map(|e| e.bracket),
        t_upper_1,
        t_upper_2,
        t_lower,
        constants,
        verdicts,
    })
}
