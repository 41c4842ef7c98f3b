//! All-at-once space-time solvers for one-dimensional hyperbolic systems.
//!
//! The linear path treats heterogeneous acoustics with a Godunov scheme and
//! solves the block-bidiagonal space-time system by a characteristic-variable
//! block preconditioned iteration, optionally with MGRIT inner solves. The
//! nonlinear path (shallow water, Euler) wraps the same machinery in a
//! residual-correction loop around a frozen-dissipation linearization of the
//! Roe scheme.

pub mod acoustics;
pub mod blockprec;
pub mod conslaw;
pub mod error;
pub mod gmres;
pub mod grid;
pub mod mgrit;
pub mod nonlinear;
pub mod problems;
pub mod report;
pub mod small;
pub mod stencil;
pub mod transform;

pub use error::{PintError, Result};
pub use grid::{Boundary, CfSplitting, SpaceTimeGrid, SpaceTimeVector, StepOperator};
pub use report::{SolveStatus, SolverReport};
