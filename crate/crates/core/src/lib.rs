//! Numerical laboratory for finite-time blow-up of the pseudo-parabolic
//! problem
//!
//! ```text
//! u_t/|x|² − Δu_t − Δu = k(t)|u|^{p(x,t)−2}u   in B(0,1) × (0,T),
//! u = 0 on the boundary,   u(·,0) = u₀,
//! ```
//!
//! for radial data on the unit ball of Rⁿ (n ≥ 3). The crate discretizes
//! the problem, tracks the energy-type functionals along trajectories,
//! estimates blow-up times and evaluates the analytic upper and lower
//! bounds for them.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod functionals;
pub mod harness;
pub mod mesh;
pub mod model;
pub mod numeric;
pub mod profiles;
pub mod solver;
pub mod varexp;

pub use error::{Error, Result};
pub use functionals::{FunctionalSnapshot, Functionals};
pub use mesh::RadialMesh;
pub use model::{ExponentField, InitialDatum, Model, ModulationCurve, SourceModulation};
pub use solver::{SolverConfig, State, Termination, TrajectoryRecord};
