//! Pseudospectral solver for N-component systems
//!
//! ```text
//! (1/2) ln(-d^2/dx^2) u_m - b_m u_m' - a_m u_m = f_m + epsilon_m (K_m * g_m(u)),
//! ```
//!
//! on the real line, together with the constants and numerical checks of the
//! contraction argument that produces its solutions.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod experiments;
pub mod fixed_point;
pub mod grid;
pub mod io;
pub mod linear;
pub mod model;
pub mod symbol;

pub use error::{Error, Result};
pub use grid::{Grid, RealField, SpectralField, VectorField};
pub use model::{ContractionConstants, Problem, ProblemSpec};
