//! Problem data: the exponent `p(x,t)`, the modulation `k(t)` and the
//! initial datum, together with sampling-based validation of the
//! structural hypotheses (`2 < p⁻ ≤ p ≤ p⁺ < 2(n−1)/(n−2)`, `p_t ≥ 0`,
//! `k(0) > 0`, `k' ≥ 0`, `k → k_∞`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::RadialMesh;
use crate::profiles::Profile;

/// Radial exponent field `p(r, t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExponentField {
    /// `p ≡ p`.
    Constant { p: f64 },
    /// `p(r, t) = a + b·r + c·t/(1+t)`.
    Separable { a: f64, b: f64, c: f64 },
}

impl ExponentField {
    pub fn value(&self, r: f64, t: f64) -> f64 {
        match *self {
            ExponentField::Constant { p } => p,
            ExponentField::Separable { a, b, c } => a + b * r + c * t / (1.0 + t),
        }
    }

    pub fn time_derivative(&self, _r: f64, t: f64) -> f64 {
        match *self {
            ExponentField::Constant { .. } => 0.0,
            ExponentField::Separable { c, .. } => c / ((1.0 + t) * (1.0 + t)),
        }
    }

    /// Declared lower bound over `r ∈ [0,1]`, `t ≥ 0`.
    pub fn p_minus(&self) -> f64 {
        match *self {
            ExponentField::Constant { p } => p,
            ExponentField::Separable { a, b, c } => a + b.min(0.0) + c.min(0.0),
        }
    }

    /// Declared upper bound over `r ∈ [0,1]`, `t ≥ 0`.
    pub fn p_plus(&self) -> f64 {
        match *self {
            ExponentField::Constant { p } => p,
            ExponentField::Separable { a, b, c } => a + b.max(0.0) + c.max(0.0),
        }
    }

    pub fn is_time_independent(&self) -> bool {
        match *self {
            ExponentField::Constant { .. } => true,
            ExponentField::Separable { c, .. } => c == 0.0,
        }
    }

    /// Nodal values `p(r_i, t)`.
    pub fn nodal(&self, mesh: &RadialMesh, t: f64) -> Vec<f64> {
        mesh.radii().iter().map(|&r| self.value(r, t)).collect()
    }

    /// Nodal values `p_t(r_i, t)`.
    pub fn nodal_time_derivative(&self, mesh: &RadialMesh, t: f64) -> Vec<f64> {
        mesh.radii()
            .iter()
            .map(|&r| self.time_derivative(r, t))
            .collect()
    }
}

/// Modulation curve `k(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModulationCurve {
    Constant {
        k: f64,
    },
    /// `k(t) = k_limit − (k_limit − k0)·e^{−t}`.
    Saturating {
        k0: f64,
        k_limit: f64,
    },
}

impl ModulationCurve {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            ModulationCurve::Constant { k } => k,
            ModulationCurve::Saturating { k0, k_limit } => k_limit - (k_limit - k0) * (-t).exp(),
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match *self {
            ModulationCurve::Constant { .. } => 0.0,
            ModulationCurve::Saturating { k0, k_limit } => (k_limit - k0) * (-t).exp(),
        }
    }

    pub fn natural_limit(&self) -> f64 {
        match *self {
            ModulationCurve::Constant { k } => k,
            ModulationCurve::Saturating { k_limit, .. } => k_limit,
        }
    }
}

/// `k(t)` together with its user-declared limit `k_∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceModulation {
    pub curve: ModulationCurve,
    pub k_inf: f64,
}

impl SourceModulation {
    pub fn new(curve: ModulationCurve, k_inf: f64) -> Self {
        Self { curve, k_inf }
    }

    /// Uses the curve's own limit as `k_∞`.
    pub fn from_curve(curve: ModulationCurve) -> Self {
        Self {
            curve,
            k_inf: curve.natural_limit(),
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        self.curve.value(t)
    }

    pub fn derivative(&self, t: f64) -> f64 {
        self.curve.derivative(t)
    }
}

/// The data `(p, k)` of the evolution problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Model {
    pub exponent: ExponentField,
    pub modulation: SourceModulation,
}

impl Model {
    pub fn new(exponent: ExponentField, modulation: SourceModulation) -> Self {
        Self {
            exponent,
            modulation,
        }
    }
}

/// Nonzero nodal initial datum; the Dirichlet value at `r = 1` is implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialDatum {
    values: Vec<f64>,
}

impl InitialDatum {
    pub fn new(mesh: &RadialMesh, values: Vec<f64>) -> Result<Self> {
        mesh.check_len(values.len())?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid(
                "initial datum has non-finite entries".into(),
            ));
        }
        if values.iter().all(|&v| v == 0.0) {
            return Err(Error::ZeroProfile);
        }
        Ok(Self { values })
    }

    pub fn from_profile(mesh: &RadialMesh, profile: &Profile) -> Result<Self> {
        Self::new(mesh, profile.sample(mesh))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// One violated constraint: the first offending sample plus how many samples failed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub constraint: String,
    pub message: String,
    pub r: Option<f64>,
    pub t: Option<f64>,
    pub value: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub samples: usize,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    fn finish(mut self) -> Self {
        self.passed = self.violations.is_empty();
        self
    }

    fn record(
        &mut self,
        constraint: &str,
        message: String,
        r: Option<f64>,
        t: Option<f64>,
        value: f64,
    ) {
        if let Some(v) = self
            .violations
            .iter_mut()
            .find(|v| v.constraint == constraint)
        {
            v.count += 1;
            return;
        }
        self.violations.push(Violation {
            constraint: constraint.to_string(),
            message,
            r,
            t,
            value,
            count: 1,
        });
    }

    pub fn merge(mut self, other: ValidationReport) -> Self {
        self.samples += other.samples;
        self.violations.extend(other.violations);
        self.finish()
    }
}

fn check_time_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::Invalid("time grid is empty".into()));
    }
    if t_grid.iter().any(|t| !t.is_finite() || *t < 0.0) || t_grid.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(Error::Invalid(
            "time grid must be finite, nonnegative and strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Upper limit `2(n−1)/(n−2)` for the exponent.
pub fn exponent_ceiling(dim: usize) -> f64 {
    2.0 * (dim as f64 - 1.0) / (dim as f64 - 2.0)
}

/// Checks the exponent hypotheses on the sample set `mesh radii ∪ {0, 1}` × `t_grid`.
pub fn validate_exponent(
    field: &ExponentField,
    mesh: &RadialMesh,
    t_grid: &[f64],
) -> Result<ValidationReport> {
    check_time_grid(t_grid)?;
    let mut report = ValidationReport::default();
    let ceiling = exponent_ceiling(mesh.dim());
    let (lo, hi) = (field.p_minus(), field.p_plus());
    if !(lo > 2.0) {
        report.record("p_minus", "p⁻ must exceed 2".into(), None, None, lo);
    }
    if !(hi < ceiling) {
        report.record(
            "p_plus",
            format!("p⁺ must be below 2(n−1)/(n−2) = {ceiling}"),
            None,
            None,
            hi,
        );
    }
    if lo > hi {
        report.record(
            "bounds_order",
            "p⁻ must not exceed p⁺".into(),
            None,
            None,
            lo - hi,
        );
    }

    let tol = 1e-12 * hi.abs().max(1.0);
    let mut radii = Vec::with_capacity(mesh.len() + 2);
    radii.push(0.0);
    radii.extend_from_slice(mesh.radii());
    radii.push(1.0);
    for &t in t_grid {
        for &r in &radii {
            report.samples += 1;
            let p = field.value(r, t);
            let pt = field.time_derivative(r, t);
            if !p.is_finite() || !pt.is_finite() {
                report.record(
                    "finite",
                    "p and p_t must be finite".into(),
                    Some(r),
                    Some(t),
                    p,
                );
                continue;
            }
            if p < lo - tol || p > hi + tol {
                report.record(
                    "declared_range",
                    "sampled p leaves the declared range [p⁻, p⁺]".into(),
                    Some(r),
                    Some(t),
                    p,
                );
            }
            if pt < 0.0 {
                report.record("p_t", "p_t ≥ 0 violated".into(), Some(r), Some(t), pt);
            }
        }
    }
    Ok(report.finish())
}

/// Cross-check of `k_∞` at a user-chosen horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitCheck {
    pub horizon: f64,
    pub tolerance: f64,
}

impl Default for LimitCheck {
    fn default() -> Self {
        Self {
            horizon: 50.0,
            tolerance: 1e-6,
        }
    }
}

pub fn validate_modulation(
    modulation: &SourceModulation,
    t_grid: &[f64],
    limit: LimitCheck,
) -> Result<ValidationReport> {
    check_time_grid(t_grid)?;
    let mut report = ValidationReport::default();
    let k0 = modulation.value(0.0);
    if !(k0 > 0.0) {
        report.record("k0", "k(0) > 0 violated".into(), None, Some(0.0), k0);
    }
    let k_inf = modulation.k_inf;
    if !k_inf.is_finite() {
        report.record("k_inf", "k_∞ must be finite".into(), None, None, k_inf);
    }
    let tol = limit.tolerance;
    for &t in t_grid {
        report.samples += 1;
        let k = modulation.value(t);
        let dk = modulation.derivative(t);
        if !k.is_finite() || !dk.is_finite() {
            report.record("finite", "k and k' must be finite".into(), None, Some(t), k);
            continue;
        }
        if k < 0.0 {
            report.record(
                "k_nonnegative",
                "k(t) ≥ 0 violated".into(),
                None,
                Some(t),
                k,
            );
        }
        if dk < 0.0 {
            report.record("k_prime", "k' ≥ 0 violated".into(), None, Some(t), dk);
        }
        if k > k_inf + tol {
            report.record(
                "k_below_limit",
                "k(t) ≤ k_∞ violated".into(),
                None,
                Some(t),
                k,
            );
        }
    }
    let k_far = modulation.value(limit.horizon);
    if k_far < k_inf - tol {
        report.record(
            "k_limit",
            format!(
                "k(T) at horizon T = {} stays below k_∞ − tol",
                limit.horizon
            ),
            None,
            Some(limit.horizon),
            k_far,
        );
    }
    Ok(report.finish())
}

/// Empirical local log-Hölder constant
/// `sup |p(ξ) − p(η)|·log(e + 1/|ξ − η|)` over sampled space-time points.
/// At most 128 radii are used; distances are measured along a ray, which is
/// the closest two points with the given radii can be.
pub fn log_holder_constant(field: &ExponentField, mesh: &RadialMesh, t_grid: &[f64]) -> f64 {
    let stride = mesh.len().div_ceil(128).max(1);
    let radii: Vec<f64> = mesh.radii().iter().step_by(stride).copied().collect();
    let samples: Vec<(f64, f64)> = t_grid
        .iter()
        .flat_map(|&t| radii.iter().map(move |&r| (r, t)))
        .collect();
    log_holder_over(field, &samples)
}

/// Same supremum over explicit `(r, t)` samples.
pub fn log_holder_over(field: &ExponentField, samples: &[(f64, f64)]) -> f64 {
    let points: Vec<(f64, f64, f64)> = samples
        .iter()
        .map(|&(r, t)| (r, t, field.value(r, t)))
        .collect();
    let mut best = 0.0f64;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            let dist = ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();
            if dist == 0.0 {
                continue;
            }
            let v = (a.2 - b.2).abs() * (std::f64::consts::E + 1.0 / dist).ln();
            best = best.max(v);
        }
    }
    best
}
