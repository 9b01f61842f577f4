//! Radial discretization of the unit ball B(0,1) ⊂ Rⁿ.
//!
//! Nodal functions live on `M` interior radii `0 < r[0] < … < r[M-1] < 1`
//! and vanish at `r = 1`. Between nodes they are piecewise linear in `r`;
//! on the inner cell `[0, r[0]]` they are extended by the constant `u[0]`,
//! which keeps them radially smooth at the origin. Every quadratic form on
//! this space (`∫ u²/|x|² dx`, `∫ |∇u|² dx`) is integrated exactly with
//! Gauss–Legendre rules on each cell, so the discrete norms are the true
//! norms of a `W^{1,2}_0(Ω)` function. Non-polynomial integrands use the
//! lumped (product trapezoid) weights `∫ φ_i dx`, which are all positive.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numeric::{gauss_legendre, SymTridiagonal};

#[derive(Debug, Clone)]
pub struct RadialMesh {
    dim: usize,
    grading: f64,
    radii: Vec<f64>,
    weights: Vec<f64>,
    boundary_weight: f64,
    sphere_area: f64,
    weighted_mass: SymTridiagonal,
    stiffness: SymTridiagonal,
}

/// Surface area ω_{n-1} of the unit sphere S^{n-1} ⊂ Rⁿ.
pub fn unit_sphere_area(dim: usize) -> f64 {
    2.0 * PI.powf(dim as f64 / 2.0) / gamma_half_integer(dim)
}

/// Volume ω_{n-1}/n of the unit ball in Rⁿ.
pub fn unit_ball_volume(dim: usize) -> f64 {
    unit_sphere_area(dim) / dim as f64
}

// Γ(n/2) for a positive integer n.
fn gamma_half_integer(n: usize) -> f64 {
    if n.is_multiple_of(2) {
        (1..n / 2).map(|k| k as f64).product()
    } else {
        // Γ(1/2) = √π, Γ(x + 1) = x Γ(x)
        let mut g = PI.sqrt();
        let mut x = 0.5;
        while x < n as f64 / 2.0 - 0.25 {
            g *= x;
            x += 1.0;
        }
        g
    }
}

impl RadialMesh {
    /// Builds a mesh with `nodes` interior radii `r_i = ξ_i^grading`,
    /// `ξ_i = (i + ½)/(nodes + ½)`. Grading above one clusters nodes near
    /// the origin, where the weight `1/|x|²` is singular.
    pub fn new(dim: usize, nodes: usize, grading: f64) -> Result<Self> {
        if dim < 3 {
            return Err(Error::Dimension(dim));
        }
        if nodes < 8 {
            return Err(Error::TooFewNodes(nodes));
        }
        if !grading.is_finite() || grading < 1.0 {
            return Err(Error::Grading(grading));
        }
        let m = nodes;
        let denom = m as f64 + 0.5;
        // r[m] = 1 is the Dirichlet node.
        let mut r: Vec<f64> = (0..=m)
            .map(|i| ((i as f64 + 0.5) / denom).powf(grading))
            .collect();
        r[m] = 1.0;

        let omega = unit_sphere_area(dim);
        let n = dim as i32;
        let (gx, gw) = gauss_legendre(dim / 2 + 2);

        let mut weights = vec![0.0; m];
        let mut boundary_weight = 0.0;
        let mut wmass = SymTridiagonal::zeros(m);
        let mut stiff = SymTridiagonal::zeros(m);

        // Inner cell [0, r0]: u ≡ u[0], no gradient.
        let r0 = r[0];
        wmass.diag[0] += omega * r0.powi(n - 2) / (n - 2) as f64;
        weights[0] += omega * r0.powi(n) / n as f64;

        for c in 0..m {
            let (a, b) = (r[c], r[c + 1]);
            let h = b - a;
            let (mut mll, mut mlr, mut mrr) = (0.0, 0.0, 0.0);
            let (mut wl, mut wr, mut vol) = (0.0, 0.0, 0.0);
            for (x, w) in gx.iter().zip(&gw) {
                let rr = 0.5 * (a + b) + 0.5 * h * x;
                let jw = 0.5 * h * w;
                let pl = (b - rr) / h;
                let pr = (rr - a) / h;
                let sing = rr.powi(n - 3) * jw;
                let reg = rr.powi(n - 1) * jw;
                mll += pl * pl * sing;
                mlr += pl * pr * sing;
                mrr += pr * pr * sing;
                wl += pl * reg;
                wr += pr * reg;
                vol += reg;
            }
            let s = omega * vol / (h * h);
            wmass.diag[c] += omega * mll;
            stiff.diag[c] += s;
            weights[c] += omega * wl;
            if c + 1 < m {
                wmass.diag[c + 1] += omega * mrr;
                wmass.off[c] += omega * mlr;
                stiff.diag[c + 1] += s;
                stiff.off[c] -= s;
                weights[c + 1] += omega * wr;
            } else {
                boundary_weight = omega * wr;
            }
        }
        r.truncate(m);

        Ok(Self {
            dim,
            grading,
            radii: r,
            weights,
            boundary_weight,
            sphere_area: omega,
            weighted_mass: wmass,
            stiffness: stiff,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of interior nodes `M`.
    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn grading(&self) -> f64 {
        self.grading
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn r_min(&self) -> f64 {
        self.radii[0]
    }

    /// Lumped weights `∫_Ω φ_i dx` of the interior nodes.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weight of the Dirichlet node at `r = 1`.
    pub fn boundary_weight(&self) -> f64 {
        self.boundary_weight
    }

    pub fn sphere_area(&self) -> f64 {
        self.sphere_area
    }

    pub fn volume(&self) -> f64 {
        unit_ball_volume(self.dim)
    }

    /// Diameter of Ω = B(0,1).
    pub fn diameter(&self) -> f64 {
        2.0
    }

    /// Tridiagonal matrix of `(v, φ) ↦ ∫ vφ/|x|² dx`.
    pub fn weighted_mass(&self) -> &SymTridiagonal {
        &self.weighted_mass
    }

    /// Tridiagonal matrix of `(v, φ) ↦ ∫ ∇v·∇φ dx`.
    pub fn stiffness(&self) -> &SymTridiagonal {
        &self.stiffness
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got: len,
            });
        }
        Ok(())
    }

    /// `∫_Ω f dx` for nodal values `f`; the value at `r = 1` is extrapolated
    /// linearly from the last two nodes.
    pub fn integrate(&self, f: &[f64]) -> Result<f64> {
        self.check_len(f.len())?;
        let m = self.len();
        let (ra, rb) = (self.radii[m - 2], self.radii[m - 1]);
        let boundary = f[m - 1] + (f[m - 1] - f[m - 2]) * (1.0 - rb) / (rb - ra);
        Ok(self.dot_weights(f) + self.boundary_weight * boundary)
    }

    /// `∫_Ω f dx` when the value of `f` at `r = 1` is known.
    pub fn integrate_with_boundary(&self, f: &[f64], at_boundary: f64) -> Result<f64> {
        self.check_len(f.len())?;
        Ok(self.dot_weights(f) + self.boundary_weight * at_boundary)
    }

    /// `∫_Ω f dx` for integrands vanishing at `r = 1`.
    pub fn integrate_dirichlet(&self, f: &[f64]) -> Result<f64> {
        self.integrate_with_boundary(f, 0.0)
    }

    pub(crate) fn dot_weights(&self, f: &[f64]) -> f64 {
        self.weights.iter().zip(f).map(|(w, v)| w * v).sum()
    }

    /// `‖u/|x|‖²_{L²(Ω)}`.
    pub fn weighted_l2_sq(&self, u: &[f64]) -> Result<f64> {
        self.check_len(u.len())?;
        Ok(self.weighted_mass.quadratic_form(u).max(0.0))
    }

    /// `‖∇u‖²_{L²(Ω)}` with `u(1) = 0`.
    pub fn grad_l2_sq(&self, u: &[f64]) -> Result<f64> {
        self.check_len(u.len())?;
        Ok(self.stiffness.difference_form(u).max(0.0))
    }

    /// `‖u‖²_{L²(Ω)}` with lumped weights.
    pub fn l2_sq(&self, u: &[f64]) -> Result<f64> {
        self.check_len(u.len())?;
        Ok(self.weights.iter().zip(u).map(|(w, v)| w * v * v).sum())
    }

    /// Samples `f(r)` at the interior nodes.
    pub fn sample<F: Fn(f64) -> f64>(&self, f: F) -> Vec<f64> {
        self.radii.iter().map(|&r| f(r)).collect()
    }
}
