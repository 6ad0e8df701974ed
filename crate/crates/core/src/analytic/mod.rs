//! Exact closed-form distributions and moments for the random copula fields.
//!
//! Two random fields are covered, each with its checkerboard extension:
//!
//! * the *permutation field*: the value of a uniformly random permutation
//!   copula at a point ([`perm_field`]);
//! * the *mixture field*: the value of a Dirichlet-uniform convex mixture of
//!   all permutation copulas ([`mixture_field`]).
//!
//! Everything here is closed-form and exact; the [`crate::oracle`] module
//! re-derives the same quantities by brute force for verification.

mod counts;
mod dirichlet;
mod law;
pub mod mixture_field;
pub mod perm_field;

pub use counts::{factorial, value_count};
pub use dirichlet::DirichletMoments;
pub use law::FieldLaw;
pub use mixture_field::{AggregatedDirichlet, CdfEstimate};
pub use perm_field::{ConditionalTable, Direction};
