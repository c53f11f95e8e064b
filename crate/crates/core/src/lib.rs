//! Classical and boundary-corrected operator splitting for diffusion-reaction
//! equations `u' = D u + f(u)` with inhomogeneous, time-dependent Dirichlet
//! data, discretised by finite differences on the unit interval or square.
//!
//! Modules build on one another: [`grid`] holds fields and norms,
//! [`operators`] the Laplacian and its propagators, [`lifting`] the harmonic
//! continuation of the boundary data, [`flows`] the partial flows,
//! [`splitting`] the one-step maps, and [`harness`] the convergence studies.

pub mod error;
pub mod flows;
pub mod grid;
pub mod harness;
pub mod lifting;
pub mod operators;
mod sine;
pub mod splitting;
mod tridiag;

pub use error::{Error, Result};
pub use flows::{LinearFlowConfig, LinearMethod, ReactionTerm};
pub use grid::{eval_on_grid, make_grid, norm, Field, Grid, Norm};
pub use lifting::{lifting_time_derivative, modified_nonlinearity, solve_lifting, BoundaryData, Lifting};
pub use operators::{phi1, BoundaryTrace, CnSolver, DirichletLaplacian};
pub use sine::SineTransform;
pub use splitting::{integrate, step, Problem, Scheme, SchemeConfig, Splitting, Variant};
pub use tridiag::{thomas_solve, thomas_solve_constant};
