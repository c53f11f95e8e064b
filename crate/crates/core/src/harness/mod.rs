//! Test problems, convergence studies and table output.

pub mod config;
pub mod problems;
pub mod study;
pub mod table;

pub use config::{Expr, ProblemConfig};
pub use problems::{builtin_problem, ProblemId};
pub use study::{parse_steps, run_convergence, run_local_error, ExperimentSpec, ReferencePolicy};
pub use table::{emit, emit_table, observed_order, parse_csv, Format, ResultTable, Row};
