//! Energy `J_δ`, Nehari functional `I_δ`, modified energy `E_δ`, the
//! Lyapunov quantity `L`, `K = −E`, `M = L + C₁K`, the exponent-rate term
//! `𝔓`, Nehari scaling and potential-well estimates.
//!
//! Quadratic terms use the exact mesh forms; the power terms use the lumped
//! weights, so `∫|u|^p/p` is a convex function of the nodal values whose
//! gradient is exactly the solver's load vector.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::RadialMesh;
use crate::model::Model;
use crate::profiles::Profile;

/// Hardy constant `H_n = 4/(n−2)²`.
pub fn hardy_constant(dim: usize) -> f64 {
    let d = dim as f64 - 2.0;
    4.0 / (d * d)
}

/// `C₁ = p⁻ H_n/(p⁻ − 2)`.
pub fn c1_constant(p_minus: f64, dim: usize) -> f64 {
    p_minus * hardy_constant(dim) / (p_minus - 2.0)
}

/// All functionals at one time level (δ = 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalSnapshot {
    pub t: f64,
    /// J
    pub energy: f64,
    /// I
    pub nehari: f64,
    /// E
    pub modified_energy: f64,
    /// L
    pub lyapunov: f64,
    /// K = −E
    pub neg_energy: f64,
    /// M = L + C₁K
    pub combined: f64,
    /// 𝔓
    pub p_term: f64,
    /// `‖∇u‖²`
    pub grad_sq: f64,
    /// `‖u/|x|‖²`
    pub weighted_sq: f64,
    /// `∫ |u|^p/p dx`
    pub potential: f64,
}

/// Power-type integrals sharing one pass over the nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerIntegrals {
    /// `∫ |u|^p dx`
    pub power: f64,
    /// `∫ |u|^p/p dx`
    pub potential: f64,
    /// `∫ (p_t/p²)(p ln|u| − 1)|u|^p dx`
    pub p_term: f64,
}

/// Evaluates functionals of nodal profiles for a fixed mesh and model.
#[derive(Debug, Clone, Copy)]
pub struct Functionals<'a> {
    mesh: &'a RadialMesh,
    model: &'a Model,
}

impl<'a> Functionals<'a> {
    pub fn new(mesh: &'a RadialMesh, model: &'a Model) -> Self {
        Self { mesh, model }
    }

    pub fn mesh(&self) -> &RadialMesh {
        self.mesh
    }

    pub fn model(&self) -> &Model {
        self.model
    }

    pub fn c1(&self) -> f64 {
        c1_constant(self.model.exponent.p_minus(), self.mesh.dim())
    }

    pub fn power_integrals(&self, u: &[f64], t: f64) -> Result<PowerIntegrals> {
        self.mesh.check_len(u.len())?;
        let exponent = &self.model.exponent;
        let mut out = PowerIntegrals {
            power: 0.0,
            potential: 0.0,
            p_term: 0.0,
        };
        for ((&r, &w), &v) in self.mesh.radii().iter().zip(self.mesh.weights()).zip(u) {
            if v == 0.0 {
                continue;
            }
            let p = exponent.value(r, t);
            let ln_abs = v.abs().ln();
            let pow = (p * ln_abs).exp();
            out.power += w * pow;
            out.potential += w * pow / p;
            let pt = exponent.time_derivative(r, t);
            if pt != 0.0 {
                out.p_term += w * pt / (p * p) * (p * ln_abs - 1.0) * pow;
            }
        }
        Ok(out)
    }

    /// Load vector `F_i = w_i |u_i|^{p_i−2} u_i`, the gradient of `∫|u|^p/p`.
    pub fn load(&self, u: &[f64], t: f64) -> Result<Vec<f64>> {
        self.mesh.check_len(u.len())?;
        let exponent = &self.model.exponent;
        Ok(self
            .mesh
            .radii()
            .iter()
            .zip(self.mesh.weights())
            .zip(u)
            .map(|((&r, &w), &v)| {
                if v == 0.0 {
                    0.0
                } else {
                    let p = exponent.value(r, t);
                    w * v.signum() * ((p - 1.0) * v.abs().ln()).exp()
                }
            })
            .collect())
    }

    fn check_delta(delta: f64) -> Result<()> {
        if !(delta > 0.0) {
            return Err(Error::Delta(delta));
        }
        Ok(())
    }

    /// `J_δ(u,t) = δ/2 ‖∇u‖² − k(t) ∫ |u|^p/p dx`.
    pub fn energy(&self, u: &[f64], t: f64, delta: f64) -> Result<f64> {
        Self::check_delta(delta)?;
        let g = self.mesh.grad_l2_sq(u)?;
        let pi = self.power_integrals(u, t)?;
        Ok(0.5 * delta * g - self.model.modulation.value(t) * pi.potential)
    }

    /// `I_δ(u,t) = δ ‖∇u‖² − k(t) ∫ |u|^p dx`.
    pub fn nehari(&self, u: &[f64], t: f64, delta: f64) -> Result<f64> {
        Self::check_delta(delta)?;
        let g = self.mesh.grad_l2_sq(u)?;
        let pi = self.power_integrals(u, t)?;
        Ok(delta * g - self.model.modulation.value(t) * pi.power)
    }

    /// `∫_Ω 1/p(x,t) dx`.
    pub fn inverse_exponent_integral(&self, t: f64) -> f64 {
        let e = &self.model.exponent;
        let nodal: f64 = self
            .mesh
            .radii()
            .iter()
            .zip(self.mesh.weights())
            .map(|(&r, &w)| w / e.value(r, t))
            .sum();
        nodal + self.mesh.boundary_weight() / e.value(1.0, t)
    }

    /// `∫_Ω p_t/p² dx`, the bound on `−𝔓`.
    pub fn p_term_bound(&self, t: f64) -> f64 {
        let e = &self.model.exponent;
        let nodal: f64 = self
            .mesh
            .radii()
            .iter()
            .zip(self.mesh.weights())
            .map(|(&r, &w)| {
                let p = e.value(r, t);
                w * e.time_derivative(r, t) / (p * p)
            })
            .sum();
        let pb = e.value(1.0, t);
        nodal + self.mesh.boundary_weight() * e.time_derivative(1.0, t) / (pb * pb)
    }

    /// `E_δ(u,t) = J_δ(u,t) + k_∞ ∫ 1/p dx`.
    pub fn modified_energy(&self, u: &[f64], t: f64, delta: f64) -> Result<f64> {
        Ok(self.energy(u, t, delta)?
            + self.model.modulation.k_inf * self.inverse_exponent_integral(t))
    }

    /// `L = ½(‖u/|x|‖² + ‖∇u‖²)`.
    pub fn lyapunov(&self, u: &[f64]) -> Result<f64> {
        Ok(0.5 * (self.mesh.weighted_l2_sq(u)? + self.mesh.grad_l2_sq(u)?))
    }

    pub fn p_term(&self, u: &[f64], t: f64) -> Result<f64> {
        Ok(self.power_integrals(u, t)?.p_term)
    }

    pub fn snapshot(&self, u: &[f64], t: f64) -> Result<FunctionalSnapshot> {
        let grad_sq = self.mesh.grad_l2_sq(u)?;
        let weighted_sq = self.mesh.weighted_l2_sq(u)?;
        let pi = self.power_integrals(u, t)?;
        let k = self.model.modulation.value(t);
        let energy = 0.5 * grad_sq - k * pi.potential;
        let nehari = grad_sq - k * pi.power;
        let modified_energy =
            energy + self.model.modulation.k_inf * self.inverse_exponent_integral(t);
        let lyapunov = 0.5 * (weighted_sq + grad_sq);
        let neg_energy = -modified_energy;
        Ok(FunctionalSnapshot {
            t,
            energy,
            nehari,
            modified_energy,
            lyapunov,
            neg_energy,
            combined: lyapunov + self.c1() * neg_energy,
            p_term: pi.p_term,
            grad_sq,
            weighted_sq,
            potential: pi.potential,
        })
    }

    /// The unique `λ₀ > 0` with `I_δ(λ₀u, t) = 0`.
    ///
    /// Solves `g(s) = δ‖∇u‖² − k Σ wᵢ |uᵢ|^{pᵢ} e^{(pᵢ−2)s} = 0` for `s = ln λ`;
    /// `g` is strictly decreasing and concave, so a Newton step safeguarded
    /// by bisection converges from any bracket.
    pub fn nehari_scaling(&self, u: &[f64], t: f64, delta: f64) -> Result<f64> {
        Self::check_delta(delta)?;
        let k = self.model.modulation.value(t);
        if !(k > 0.0) {
            return Err(Error::NonPositiveModulation(k));
        }
        let grad = self.mesh.grad_l2_sq(u)?;
        // (ln a_i, p_i − 2) for the active nodes
        let terms: Vec<(f64, f64)> = self
            .mesh
            .radii()
            .iter()
            .zip(self.mesh.weights())
            .zip(u)
            .filter(|(_, v)| **v != 0.0)
            .map(|((&r, &w), &v)| {
                let p = self.model.exponent.value(r, t);
                (w.ln() + p * v.abs().ln() + k.ln(), p - 2.0)
            })
            .collect();
        if terms.is_empty() || !(grad > 0.0) {
            return Err(Error::ZeroProfile);
        }
        let target = delta * grad;
        let g = |s: f64| -> (f64, f64) {
            let mut sum = 0.0;
            let mut dsum = 0.0;
            for &(la, q) in &terms {
                let e = (la + q * s).exp();
                sum += e;
                dsum += q * e;
            }
            (target - sum, -dsum)
        };
        // constant-exponent guess with the mean exponent
        let q_mean = terms.iter().map(|t| t.1).sum::<f64>() / terms.len() as f64;
        let total: f64 = terms.iter().map(|t| t.0.exp()).sum();
        let guess = if total > 0.0 && total.is_finite() {
            (target / total).ln() / q_mean
        } else {
            0.0
        };
        let (mut lo, mut hi) = (guess - 1.0, guess + 1.0);
        let mut n = 0;
        while g(lo).0 < 0.0 {
            lo -= (hi - lo).max(1.0);
            n += 1;
            if n > 200 {
                return Err(Error::RootFind(
                    "no lower bracket for Nehari scaling".into(),
                ));
            }
        }
        while g(hi).0 > 0.0 {
            hi += (hi - lo).max(1.0);
            n += 1;
            if n > 400 {
                return Err(Error::RootFind(
                    "no upper bracket for Nehari scaling".into(),
                ));
            }
        }
        let mut s = guess.clamp(lo, hi);
        for _ in 0..200 {
            let (v, dv) = g(s);
            if v.abs() <= 1e-15 * target {
                break;
            }
            if v > 0.0 {
                lo = s;
            } else {
                hi = s;
            }
            let newton = s - v / dv;
            s = if newton > lo && newton < hi && dv < 0.0 {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo <= 1e-15 * (1.0 + s.abs()) {
                break;
            }
        }
        let residual = g(s).0.abs();
        if residual > 1e-10 * target {
            return Err(Error::RootFind(format!(
                "Nehari scaling residual {residual:e} exceeds tolerance"
            )));
        }
        Ok(s.exp())
    }

    /// `min_{u ∈ dictionary} J_δ(λ₀(u)·u, t)`, an upper estimate of the well depth `d_δ(t)`.
    pub fn well_depth_estimate(&self, dictionary: &[Profile], t: f64, delta: f64) -> Result<f64> {
        if dictionary.is_empty() {
            return Err(Error::EmptyDictionary);
        }
        let mut best = f64::INFINITY;
        for profile in dictionary {
            let u = profile.sample(self.mesh);
            let lambda = self.nehari_scaling(&u, t, delta)?;
            let scaled: Vec<f64> = u.iter().map(|v| lambda * v).collect();
            best = best.min(self.energy(&scaled, t, delta)?);
        }
        Ok(best)
    }

    /// `d_{δ,*}` estimated as the minimum of the well-depth estimate over a time grid.
    pub fn well_depth_star(
        &self,
        dictionary: &[Profile],
        t_grid: &[f64],
        delta: f64,
    ) -> Result<f64> {
        if t_grid.is_empty() {
            return Err(Error::Invalid("empty time grid".into()));
        }
        let mut best = f64::INFINITY;
        for &t in t_grid {
            best = best.min(self.well_depth_estimate(dictionary, t, delta)?);
        }
        Ok(best)
    }

    /// Membership in `Σ_{1,δ}`: `J_δ(u,t) < d_star` and `I_δ(u,t) > 0`.
    pub fn stable_set_member(&self, u: &[f64], t: f64, delta: f64, d_star: f64) -> Result<bool> {
        Ok(self.energy(u, t, delta)? < d_star && self.nehari(u, t, delta)? > 0.0)
    }
}
