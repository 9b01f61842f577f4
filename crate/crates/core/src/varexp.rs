//! Modular `ϱ(u) = ∫ |u|^{s(x)} dx` and Luxemburg norm
//! `‖u‖ = inf{λ > 0 : ϱ(u/λ) ≤ 1}` of variable-exponent Lebesgue spaces,
//! on the mesh or on any finite measure given by positive weights.

use crate::error::{Error, Result};
use crate::mesh::RadialMesh;

const MAX_BISECTIONS: usize = 200;
const MAX_EXPANSIONS: usize = 200;

fn check(weights: &[f64], u: &[f64], s: &[f64]) -> Result<()> {
    if u.len() != weights.len() {
        return Err(Error::LengthMismatch {
            expected: weights.len(),
            got: u.len(),
        });
    }
    if s.len() != weights.len() {
        return Err(Error::LengthMismatch {
            expected: weights.len(),
            got: s.len(),
        });
    }
    if let Some((node, &value)) = s.iter().enumerate().find(|(_, v)| !(**v >= 1.0)) {
        return Err(Error::ExponentBelowOne { node, value });
    }
    Ok(())
}

// Σ w |u|^s λ^{-s}, evaluated in log space.
fn scaled_modular(weights: &[f64], u: &[f64], s: &[f64], log_lambda: f64) -> f64 {
    weights
        .iter()
        .zip(u)
        .zip(s)
        .filter(|((_, u), _)| **u != 0.0)
        .map(|((w, u), s)| w * (s * (u.abs().ln() - log_lambda)).exp())
        .sum()
}

/// Modular with respect to the measure `Σ weights[i] δ_{x_i}`.
pub fn modular_weighted(weights: &[f64], u: &[f64], s: &[f64]) -> Result<f64> {
    check(weights, u, s)?;
    Ok(scaled_modular(weights, u, s, 0.0))
}

/// `∫_Ω |u|^{s(x)} dx` with the lumped mesh weights.
pub fn modular(mesh: &RadialMesh, u: &[f64], s: &[f64]) -> Result<f64> {
    mesh.check_len(u.len())?;
    modular_weighted(mesh.weights(), u, s)
}

/// Luxemburg norm with respect to `Σ weights[i] δ_{x_i}`.
///
/// `λ ↦ ϱ(u/λ)` is strictly decreasing for `u ≠ 0`, so the norm is the
/// unique root of `ϱ(u/λ) = 1`. The bracket starts from the modular bounds
/// `ϱ^{1/s⁺}`, `ϱ^{1/s⁻}` and is widened geometrically if rounding
/// requires it; the root is then bisected in `log λ`.
pub fn luxemburg_norm_weighted(weights: &[f64], u: &[f64], s: &[f64]) -> Result<f64> {
    check(weights, u, s)?;
    let active: Vec<usize> = (0..u.len())
        .filter(|&i| u[i] != 0.0 && weights[i] > 0.0)
        .collect();
    if active.is_empty() {
        return Ok(0.0);
    }
    let s_lo = active.iter().map(|&i| s[i]).fold(f64::INFINITY, f64::min);
    let s_hi = active
        .iter()
        .map(|&i| s[i])
        .fold(f64::NEG_INFINITY, f64::max);
    let f = |ll: f64| scaled_modular(weights, u, s, ll) - 1.0;

    let rho = scaled_modular(weights, u, s, 0.0);
    if !rho.is_finite() || rho <= 0.0 {
        return Err(Error::Bracket(format!("modular is {rho}")));
    }
    let (a, b) = (rho.ln() / s_hi, rho.ln() / s_lo);
    let (mut lo, mut hi) = (a.min(b) - 1e-9, a.max(b) + 1e-9);
    let mut expansions = 0;
    while f(lo) < 0.0 || f(hi) > 0.0 {
        let width = (hi - lo).max(1e-3);
        if f(lo) < 0.0 {
            lo -= width;
        }
        if f(hi) > 0.0 {
            hi += width;
        }
        expansions += 1;
        if expansions > MAX_EXPANSIONS || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Bracket("sign change not found".into()));
        }
    }
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..MAX_BISECTIONS {
        mid = 0.5 * (lo + hi);
        let v = f(mid);
        if v == 0.0 || mid <= lo || mid >= hi {
            break;
        }
        if v > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lambda = mid.exp();
    let residual = f(mid).abs();
    if residual > 1e-10 {
        return Err(Error::Bracket(format!(
            "residual {residual} after bisection"
        )));
    }
    Ok(lambda)
}

/// `‖u‖_{L^{s(·)}(Ω)}` with the lumped mesh weights.
pub fn luxemburg_norm(mesh: &RadialMesh, u: &[f64], s: &[f64]) -> Result<f64> {
    mesh.check_len(u.len())?;
    luxemburg_norm_weighted(mesh.weights(), u, s)
}
