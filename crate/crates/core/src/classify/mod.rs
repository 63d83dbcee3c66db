//! Classification predicates: hypothesis checks, lower and upper bounds for
//! `q`, the exact leading-coefficient identity, and a patch classifier.
//!
//! Two normalizations of the constant `a` appear: `a4 = H^2 + tau^2` in the
//! lower-bound analysis and `a6 = 4(H^2 + tau^2)` in the sphere analysis.
//! No function takes a bare `a`.

mod bounds;
mod rational;
mod verdict;

pub use bounds::*;
pub use rational::*;
pub use verdict::*;
