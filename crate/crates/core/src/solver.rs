//! Semi-implicit time stepping on the radial mesh, adaptive step control
//! near blow-up, blow-up time extrapolation and a-posteriori identity checks.
//!
//! One step solves
//!
//! ```text
//! (W + A + τA) u^{m+1} = (W + A) u^m + τ k(t_m) F(u^m, t_m)
//! ```
//!
//! where `F` is the lumped load `wᵢ|uᵢ|^{p(rᵢ,t_m)−2}uᵢ`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{FunctionalSnapshot, Functionals};
use crate::mesh::RadialMesh;
use crate::model::{InitialDatum, Model};
use crate::numeric::SymTridiagonal;

/// Nodal solution at one time level; the Dirichlet value at `r = 1` is implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub t: f64,
    pub u: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub tau0: f64,
    pub tau_min: f64,
    /// Largest accepted ratio `L(t_{m+1})/L(t_m)`.
    pub growth_cap: f64,
    /// Absolute blow-up threshold Λ; when absent, `blowup_factor · L(0)` is used.
    pub blowup_threshold: Option<f64>,
    pub blowup_factor: f64,
    pub t_end: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tau0: 1e-3,
            tau_min: 1e-12,
            growth_cap: 1.5,
            blowup_threshold: None,
            blowup_factor: 1e8,
            t_end: 1.0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::SolverConfig(msg.to_string()));
        if !(self.tau0.is_finite() && self.tau0 > 0.0) {
            return bad("tau0 must be positive and finite");
        }
        if !(self.tau_min > 0.0 && self.tau_min <= self.tau0) {
            return bad("need 0 < tau_min ≤ tau0");
        }
        if !(self.growth_cap > 1.0 && self.growth_cap.is_finite()) {
            return bad("growth_cap must exceed 1");
        }
        if let Some(l) = self.blowup_threshold {
            if !(l > 0.0 && l.is_finite()) {
                return bad("blowup_threshold must be positive");
            }
        }
        if !(self.blowup_factor > 1.0 && self.blowup_factor.is_finite()) {
            return bad("blowup_factor must exceed 1");
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return bad("t_end must be positive and finite");
        }
        Ok(())
    }

    /// Λ for a run starting at `l0 = L(0)`.
    pub fn threshold(&self, l0: f64) -> f64 {
        self.blowup_threshold.unwrap_or(self.blowup_factor * l0)
    }
}

/// The discrete operators: `W` realizes `∫vφ/|x|²`, `A` realizes `∫∇v·∇φ`.
#[derive(Debug, Clone)]
pub struct Operators {
    pub weighted_mass: SymTridiagonal,
    pub stiffness: SymTridiagonal,
    /// `W + A`
    pub combined: SymTridiagonal,
}

pub fn assemble_operators(mesh: &RadialMesh) -> Operators {
    let weighted_mass = mesh.weighted_mass().clone();
    let stiffness = mesh.stiffness().clone();
    let combined = weighted_mass.combine(1.0, &stiffness, 1.0);
    Operators {
        weighted_mass,
        stiffness,
        combined,
    }
}

/// Advances `state` by `tau`.
pub fn step(
    state: &State,
    tau: f64,
    mesh: &RadialMesh,
    model: &Model,
    ops: &Operators,
) -> Result<State> {
    if !(tau > 0.0) {
        return Err(Error::SolverConfig(format!(
            "step size must be positive (got {tau})"
        )));
    }
    let f = Functionals::new(mesh, model);
    let load = f.load(&state.u, state.t)?;
    let k = model.modulation.value(state.t);
    let mut rhs = ops.combined.apply(&state.u);
    for (r, l) in rhs.iter_mut().zip(&load) {
        *r += tau * k * l;
    }
    let lhs = ops.combined.combine(1.0, &ops.stiffness, tau);
    let u = lhs.solve(&rhs)?;
    let t = state.t + tau;
    if u.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite(t));
    }
    Ok(State { t, u })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    Horizon,
    Blowup,
    StepUnderflow,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::Horizon => "horizon",
            Termination::Blowup => "blowup",
            Termination::StepUnderflow => "step-underflow",
        }
    }

    pub fn blew_up(&self) -> bool {
        !matches!(self, Termination::Horizon)
    }
}

/// One accepted time level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecordEntry {
    pub snapshot: FunctionalSnapshot,
    /// Step that produced this level (0 for the initial level).
    pub tau: f64,
    /// `δᵀ(W + A)δ/τ` with `δ = u^{m+1} − u^m`, i.e. the step's share of
    /// `∫(‖u_t/|x|‖² + ‖∇u_t‖²) ds` (0 for the initial level).
    pub dissipation: f64,
}

#[derive(Debug, Clone)]
pub struct TrajectoryRecord {
    pub entries: Vec<RecordEntry>,
    pub termination: Termination,
    pub threshold: f64,
    pub t_end: f64,
    /// Last accepted state.
    pub final_state: State,
}

impl TrajectoryRecord {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.snapshot.t).collect()
    }

    pub fn lyapunov(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.snapshot.lyapunov).collect()
    }

    pub fn initial(&self) -> &FunctionalSnapshot {
        &self.entries[0].snapshot
    }

    pub fn last(&self) -> &FunctionalSnapshot {
        &self.entries[self.entries.len() - 1].snapshot
    }

    /// Smallest step taken, or `None` for a single-level record.
    pub fn min_tau(&self) -> Option<f64> {
        self.entries.iter().skip(1).map(|e| e.tau).reduce(f64::min)
    }
}

/// Integrates from `u0` at `t = 0` with adaptive steps.
pub fn run(
    mesh: &RadialMesh,
    model: &Model,
    u0: &InitialDatum,
    config: &SolverConfig,
) -> Result<TrajectoryRecord> {
    config.validate()?;
    let ops = assemble_operators(mesh);
    let f = Functionals::new(mesh, model);
    let mut state = State {
        t: 0.0,
        u: u0.values().to_vec(),
    };
    let first = f.snapshot(&state.u, 0.0)?;
    let threshold = config.threshold(first.lyapunov);
    let calm = 1.0 + 0.5 * (config.growth_cap - 1.0);
    let mut entries = vec![RecordEntry {
        snapshot: first,
        tau: 0.0,
        dissipation: 0.0,
    }];
    let mut tau = config.tau0;
    let termination = loop {
        let remaining = config.t_end - state.t;
        if remaining <= 1e-12 * config.t_end.max(1.0) {
            break Termination::Horizon;
        }
        let h = if remaining < tau * (1.0 + 1e-6) {
            remaining
        } else {
            tau
        };
        let l_old = entries[entries.len() - 1].snapshot.lyapunov;
        let attempt = match step(&state, h, mesh, model, &ops) {
            Ok(next) => {
                let snap = f.snapshot(&next.u, next.t)?;
                let ratio = snap.lyapunov / l_old;
                if snap.lyapunov.is_finite() && ratio <= config.growth_cap {
                    Some((next, snap, ratio))
                } else {
                    None
                }
            }
            Err(Error::NonFinite(_)) => None,
            Err(e) => return Err(e),
        };
        let Some((next, snap, ratio)) = attempt else {
            tau = 0.5 * h.min(tau);
            if tau < config.tau_min {
                break Termination::StepUnderflow;
            }
            continue;
        };
        let delta: Vec<f64> = next.u.iter().zip(&state.u).map(|(a, b)| a - b).collect();
        let dissipation =
            (ops.weighted_mass.quadratic_form(&delta) + ops.stiffness.difference_form(&delta)) / h;
        entries.push(RecordEntry {
            snapshot: snap,
            tau: h,
            dissipation,
        });
        state = next;
        if snap.lyapunov > threshold {
            break Termination::Blowup;
        }
        if ratio <= calm {
            tau = (tau * 1.2).min(config.tau0);
        }
    };
    Ok(TrajectoryRecord {
        entries,
        termination,
        threshold,
        t_end: config.t_end,
        final_state: state,
    })
}

/// Extrapolated blow-up time and the bracket `[t_last, t_num]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlowupEstimate {
    pub t_num: f64,
    pub bracket: (f64, f64),
    /// Fitted growth exponent in `L' ≈ c L^γ`.
    pub gamma_hat: f64,
}

pub fn detect_blowup_time(record: &TrajectoryRecord) -> Result<BlowupEstimate> {
    if !record.termination.blew_up() {
        return Err(Error::NoBlowup);
    }
    detect_blowup_time_from_series(&record.times(), &record.lyapunov())
}

/// Tail fit on raw `(t, L)` samples, for records read back from CSV and
/// synthetic series.
///
/// The growth exponent `γ̂` is the slope of `ln ΔL/Δt` against `ln L` over the
/// last decade of growth; then `L^{−(γ̂−1)}`, which is affine in `t` for
/// `L ∝ (T − t)^{−1/(γ̂−1)}`, is fitted by least squares and its root returned.
pub fn detect_blowup_time_from_series(times: &[f64], values: &[f64]) -> Result<BlowupEstimate> {
    const MIN_TAIL: usize = 5;
    if times.len() != values.len() {
        return Err(Error::LengthMismatch {
            expected: times.len(),
            got: values.len(),
        });
    }
    let n = times.len();
    if n < MIN_TAIL {
        return Err(Error::TooFewSamples {
            needed: MIN_TAIL,
            got: n,
        });
    }
    let l_last = values[n - 1];
    let mut start = n - 1;
    while start > 0 && values[start - 1] >= 0.1 * l_last {
        start -= 1;
    }
    start = start.min(n - MIN_TAIL);
    let (ts, ls) = (&times[start..], &values[start..]);

    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for i in 0..ts.len() - 1 {
        let (dt, dl) = (ts[i + 1] - ts[i], ls[i + 1] - ls[i]);
        if dt > 0.0 && dl > 0.0 && ls[i] > 0.0 {
            xs.push(0.5 * (ls[i].ln() + ls[i + 1].ln()));
            ys.push((dl / dt).ln());
        }
    }
    if xs.len() < 2 {
        return Err(Error::NoBlowup);
    }
    let (gamma_hat, _) = least_squares(&xs, &ys);
    if !(gamma_hat > 1.0) || !gamma_hat.is_finite() {
        return Err(Error::NoBlowup);
    }
    let transformed: Vec<f64> = ls.iter().map(|l| l.powf(-(gamma_hat - 1.0))).collect();
    let (slope, intercept) = least_squares(ts, &transformed);
    if !(slope < 0.0) {
        return Err(Error::NoBlowup);
    }
    let t_last = times[n - 1];
    let t_num = (-intercept / slope).max(t_last);
    Ok(BlowupEstimate {
        t_num,
        bracket: (t_last, t_num),
        gamma_hat,
    })
}

/// Slope and intercept of the least-squares line through `(x, y)`.
fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IdentityOptions {
    /// Include the `k𝔓` term; turning it off must break the identity for
    /// time-dependent exponents.
    pub include_p_term: bool,
}

impl Default for IdentityOptions {
    fn default() -> Self {
        Self {
            include_p_term: true,
        }
    }
}

/// Residuals `R(t_m)` of the energy identity at every record time after the first.
///
/// ```text
/// R = J(u(t),t) − J(u₀,0) + ∫₀ᵗ (‖u_t/|x|‖² + ‖∇u_t‖² + k'∫|u|^p/p + k𝔓) ds
/// ```
///
/// with backward difference quotients for `u_t` and the trapezoidal rule for
/// the source terms.
pub fn verify_energy_identity(
    record: &TrajectoryRecord,
    model: &Model,
    options: IdentityOptions,
) -> Vec<(f64, f64)> {
    let source = |s: &FunctionalSnapshot| {
        let mut v = model.modulation.derivative(s.t) * s.potential;
        if options.include_p_term {
            v += model.modulation.value(s.t) * s.p_term;
        }
        v
    };
    let mut out = Vec::with_capacity(record.len().saturating_sub(1));
    let Some(first) = record.entries.first() else {
        return out;
    };
    let j0 = first.snapshot.energy;
    let mut integral = 0.0;
    for pair in record.entries.windows(2) {
        let (a, b) = (&pair[0].snapshot, &pair[1].snapshot);
        integral += pair[1].dissipation + 0.5 * (b.t - a.t) * (source(a) + source(b));
        out.push((b.t, b.energy - j0 + integral));
    }
    out
}

/// Residuals `dL/dt + I` at interior record times, with the second-order
/// three-point derivative on the nonuniform time grid.
pub fn verify_l_derivative(record: &TrajectoryRecord) -> Vec<(f64, f64)> {
    record
        .entries
        .windows(3)
        .map(|w| {
            let (a, b, c) = (&w[0].snapshot, &w[1].snapshot, &w[2].snapshot);
            let (h0, h1) = (b.t - a.t, c.t - b.t);
            let dl = -h1 / (h0 * (h0 + h1)) * a.lyapunov
                + (h1 - h0) / (h0 * h1) * b.lyapunov
                + h0 / (h1 * (h0 + h1)) * c.lyapunov;
            (b.t, dl + b.nehari)
        })
        .collect()
}

/// CSV column names of an exported trajectory.
pub const CSV_HEADER: [&str; 10] = [
    "t",
    "tau",
    "J",
    "I",
    "E",
    "L",
    "K",
    "M",
    "P_term",
    "energy_residual",
];

/// One exported trajectory row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub t: f64,
    pub tau: f64,
    #[serde(rename = "J")]
    pub energy: f64,
    #[serde(rename = "I")]
    pub nehari: f64,
    #[serde(rename = "E")]
    pub modified_energy: f64,
    #[serde(rename = "L")]
    pub lyapunov: f64,
    #[serde(rename = "K")]
    pub neg_energy: f64,
    #[serde(rename = "M")]
    pub combined: f64,
    #[serde(rename = "P_term")]
    pub p_term: f64,
    pub energy_residual: f64,
}

pub fn csv_rows(record: &TrajectoryRecord, model: &Model) -> Vec<CsvRow> {
    let residuals = verify_energy_identity(record, model, IdentityOptions::default());
    record
        .entries
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let s = &e.snapshot;
            CsvRow {
                t: s.t,
                tau: e.tau,
                energy: s.energy,
                nehari: s.nehari,
                modified_energy: s.modified_energy,
                lyapunov: s.lyapunov,
                neg_energy: s.neg_energy,
                combined: s.combined,
                p_term: s.p_term,
                energy_residual: if i == 0 { 0.0 } else { residuals[i - 1].1 },
            }
        })
        .collect()
}

pub fn write_csv<W: Write>(record: &TrajectoryRecord, model: &Model, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in csv_rows(record, model) {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<CsvRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(Error::Invalid(format!(
            "unexpected trajectory header {header:?}"
        )));
    }
    let rows = r
        .deserialize()
        .collect::<std::result::Result<Vec<CsvRow>, _>>()?;
    Ok(rows)
}
