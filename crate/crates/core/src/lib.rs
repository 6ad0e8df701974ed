//! Random discrete copulas on equidistant meshes.
//!
//! A discrete copula lives on the grid `{0, 1/k, ..., 1}²` and is grounded,
//! has uniform marginals, and is 2-increasing. Permutations of `{1..k}`
//! induce the extreme points of that set; mixing them with Dirichlet
//! weights gives a random discrete copula. This crate provides:
//!
//! * exact (big-rational) grid types, validation, C-volumes, and the
//!   bijection with bistochastic matrices, including Birkhoff–von Neumann
//!   decomposition ([`copula`], [`permutation`], [`bistochastic`]);
//! * closed-form laws, moments, covariances, and conditional tables for the
//!   permutation-induced field and the Dirichlet-mixture field, on the mesh
//!   and under checkerboard extension ([`analytic`]);
//! * the piecewise-bilinear (checkerboard) extension itself, with exact and
//!   double-precision evaluation paths ([`checkerboard`]);
//! * deterministic seeded samplers for permutations, copula realizations,
//!   Dirichlet weights, point values, and synthetic data pairs
//!   ([`sampling`]);
//! * brute-force oracles that re-derive every closed form by exhaustive
//!   enumeration over all `k!` permutations at small `k`, plus Monte-Carlo
//!   estimators with standard errors ([`oracle`]);
//! * stable JSON/CSV encodings of grids, laws, and sample files
//!   ([`formats`]).
//!
//! All closed-form results are exact rationals; every formula is
//! cross-checked against an independent enumeration or Dirichlet-moment
//! route in the test suite.

pub mod analytic;
pub mod bistochastic;
pub mod checkerboard;
pub mod copula;
mod error;
pub mod formats;
pub mod oracle;
pub mod permutation;
pub mod rational;
pub mod sampling;

pub use error::{Error, Result};
pub use rational::Rat;

pub use copula::{DiscreteCopula, GridF64, GridPoint, Mesh, Rect, ValidationReport, Violation};
pub use permutation::Permutation;
