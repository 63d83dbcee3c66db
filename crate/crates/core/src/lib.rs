//! Constant mean curvature surfaces in the homogeneous spaces E(kappa, tau).
//!
//! Surfaces are handled through their fundamental data in isothermal
//! coordinates: conformal factor `lambda`, Hopf coefficient `p`,
//! `A = <xi, d_z>` and angle function `nu = <N, xi>`. Generators produce
//! slices, vertical cylinders and rotational spheres; the structure
//! equations, the holomorphic quadratic differential and the classification
//! predicates are evaluated on gridded data.

// Negated float comparisons are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ar;
pub mod canonical;
pub mod classify;
pub mod compatibility;
pub mod convergence;
pub mod error;
pub mod grid;
pub mod numerics;
pub mod par;
pub mod patch;
pub mod pde_tools;
pub mod space;
pub mod tolerances;

pub use error::{CmcError, Result};
pub use grid::{ComplexField, Field, Grid, ScalarField};
pub use patch::{DataPatch, ImmersedPatch};
pub use space::{make_space, SpaceParams};
