//! Numerical laboratory for the noise excitability of stochastic heat
//! equations on an interval.
//!
//! The crate covers four layers, bottom up:
//!
//! - [`kernels`]: whole-line, Dirichlet and Neumann heat kernels by the
//!   method of images with certified truncation, their comparison bounds,
//!   masses and the heat semigroup applied to initial data.
//! - [`renewal`]: the weakly singular renewal equation
//!   `f = a + c∫f(s)(t − s)^{−1/2}ds`, solved by product integration and in
//!   closed form, plus the exact second moment of the flat parabolic
//!   Anderson model.
//! - [`sim`]: finite-difference Euler–Maruyama paths of
//!   `∂ₜu = νΔu + λσ(u)ẇ` with Dirichlet or Neumann walls.
//! - [`estimators`]: Monte Carlo second moments, energies, extrema and the
//!   excitation index `lim log log E_t(λ) / log λ` fitted over a λ-sweep.
//!
//! [`cli`] wires these into the `spde-excite` experiment harness.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod estimators;
pub mod kernels;
pub mod quadrature;
pub mod renewal;
pub mod sim;
pub mod special;
pub mod stats;

pub use estimators::{
    energy_from_field, energy_sweep, field_extrema, fit_excitation_index, second_moment_field, EstimateError,
    FieldMoment, SweepPlan, SweepResult,
};
pub use kernels::{
    dirichlet_kernel, dirichlet_lower_factor, gaussian_kernel, image_truncation_error, kernel_mass, neumann_kernel,
    semigroup_apply, InitialCondition, KernelError, KernelKind, KernelParams, Truncation,
};
pub use renewal::{
    growth_exponent, pam_second_moment, renewal_closed_form, solve_renewal, GridFunction, RenewalError, RenewalSpec,
};
pub use sim::{
    derive_replica_seed, noise_increments, simulate_path, step, BoundaryCondition, FieldSnapshot, NoiseCoefficient,
    SimConfig, SimError,
};
