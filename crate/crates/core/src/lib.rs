//! Equilibrium theory of the mean-field spin model with pair coupling `J`
//! and three-body coupling `K`, at zero external field.
//!
//! The Gibbs weight of a configuration depends on its magnetization `m`
//! only, through `exp(N (K m^3 / 3 + J m^2 / 2))`. Everything in this crate
//! follows from that fact:
//!
//! - [`landscape`]: the variational pressure `phi(m) = u(m) - I(m)`, its
//!   derivatives and the spinodal threshold `Psi(K)`.
//! - [`stationary_points`]: roots of `m = tanh(K m^2 + J m)` and their
//!   classification.
//! - [`phase_diagram`]: the coexistence curve `gamma(K)`, the global
//!   maximizer `m*(K, J)` and phase-diagram sweeps.
//! - [`finite_volume`]: exact finite-`N` partition functions and laws of the
//!   magnetization, restricted and tilted variants, Laplace expansions.
//! - [`fluctuations`]: exact rescaled laws against their Gaussian, mixture
//!   and quartic limits.
//! - [`exponents`]: `m*` along lines through the critical point and
//!   log-log power-law fits.
//!
//! All public functions are pure; the only parallelism is data parallelism
//! inside spectrum construction and sweeps, with reductions in a fixed
//! order so results never depend on the thread count.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exponents;
pub mod finite_volume;
pub mod fluctuations;
pub mod landscape;
pub mod numeric;
pub mod phase_diagram;
pub mod special;
pub mod stationary_points;

pub use error::{Error, Result};
pub use landscape::CouplingPair;
