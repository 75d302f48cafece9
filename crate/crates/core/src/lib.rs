//! Minimal and maximal extensions of resource-theory monotones along functors
//! between resource theories.
//!
//! A resource theory here is a collection of resource objects together with a
//! reachability oracle deciding which objects can be converted into which by
//! free transformations. Monotones assign values in `[0, ∞]` that respect this
//! order (or reverse it). Given a functor `K` from one theory into another, a
//! monotone on the source extends to the target in two optimal ways, computed
//! pointwise as an infimum or supremum over admissible source objects.

pub mod bf_oracle;
pub mod error;
pub mod kan;
pub mod pcat;
pub mod lp;
pub mod prob;
pub mod quantum;
pub mod sample;
pub mod theories;
pub mod value;

pub use error::{Error, Result};
pub use value::ExtValue;
