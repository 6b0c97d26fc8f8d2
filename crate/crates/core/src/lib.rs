//! Planar channel flow with a dynamic Navier slip wall.
//!
//! The crate provides a staggered-grid IMEX projection solver on truncated channels
//! `(−n, n) × (0, 1)`, evaluators for the functional-inequality constants of the slip
//! energy spaces, and attractor diagnostics (energy identity, absorbing ball, tangent
//! dynamics, N-trace and the dimension bound). All computation is nondimensional
//! (ν = 1, L = 1); see [`params::nondimensionalize`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod attractor;
pub mod constants;
pub mod constitutive;
pub mod error;
pub mod field;
pub mod forcing;
pub mod grid;
pub mod harness;
pub mod linalg;
pub mod norms;
pub mod params;
pub mod samples;
pub mod solver;

pub use constitutive::{Laws, SlipLaw, StressLaw};
pub use error::{Error, Result};
pub use field::{Field2, FlowState, VelocityField};
pub use forcing::{Forcing, ForcingSpec};
pub use grid::{build_grid, Grid, XMode};
pub use harness::{ExhaustionReport, RunConfig, VerificationReport};
pub use norms::{compute_norms, NormReport};
pub use params::{nondimensionalize, redimensionalize, PhysicalParams, Scaling};
pub use solver::{ConvectionScheme, Solver, SolverConfig, TangentState};
