//! The built-in test problems.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::flows::ReactionTerm;
use crate::grid::{eval_on_grid, make_grid};
use crate::lifting::BoundaryData;
use crate::splitting::Problem;

use super::study::ReferencePolicy;

pub const DEFAULT_N_1D: usize = 499;
pub const DEFAULT_N_2D: usize = 99;
pub const T_FINAL: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProblemId {
    P1,
    P2,
    P3,
    P4,
    P5,
}

impl ProblemId {
    pub const ALL: [ProblemId; 5] = [
        ProblemId::P1,
        ProblemId::P2,
        ProblemId::P3,
        ProblemId::P4,
        ProblemId::P5,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ProblemId::P1 => "P1",
            ProblemId::P2 => "P2",
            ProblemId::P3 => "P3",
            ProblemId::P4 => "P4",
            ProblemId::P5 => "P5",
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            ProblemId::P1 => "1D, u0 = 1 + sin^2(pi x), b0 = b1 = 1",
            ProblemId::P2 => "1D, u0 = 1 + sin^2(pi x), b0 = b1 = 1 + sin(5t)",
            ProblemId::P3 => "1D, u0 = 0.5 + 0.5x, b0 = 0.5, b1 = 1 + sin(20 pi t)",
            ProblemId::P4 => "2D, u0 = 1 + sin^2(pi x) sin^2(pi y), b = 1",
            ProblemId::P5 => "2D, three Gaussian ridges, b = u0 on the boundary",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ProblemId::P4 | ProblemId::P5 => 2,
            _ => 1,
        }
    }

    pub fn default_n(&self) -> usize {
        if self.dim() == 2 {
            DEFAULT_N_2D
        } else {
            DEFAULT_N_1D
        }
    }

    /// Reference used by `--reference auto`.
    pub fn default_reference(&self) -> ReferencePolicy {
        match self {
            ProblemId::P3 => ReferencePolicy::PerScheme { tau: 5e-5 },
            _ => ReferencePolicy::ModifiedStrang { tau: None },
        }
    }
}

impl std::str::FromStr for ProblemId {
    type Err = Error;

    fn from_str(s: &str) -> Result<ProblemId> {
        ProblemId::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownProblem(s.to_string()))
    }
}

/// Two curved Gaussian ridges minus a central bump.
pub fn ridge_bumps(x: f64, y: f64) -> f64 {
    let a = (-40.0 * (x - 0.5 - 0.1 * (PI * y).cos()).powi(2)).exp();
    let b = (-35.0 * (y - 0.5 - 0.1 * (2.0 * PI * x).sin()).powi(2)).exp();
    let c = (-35.0 * ((x - 0.5).powi(2) + (y - 0.5).powi(2))).exp();
    a + b - c
}

/// Initial value of P5.
pub fn ridges(x: f64, y: f64) -> f64 {
    0.5 + 2.0 * ridge_bumps(x, y)
}

/// Builds a built-in problem; `n` overrides the default grid size.
pub fn builtin_problem(id: ProblemId, n: Option<usize>) -> Result<Problem> {
    let grid = make_grid(id.dim(), n.unwrap_or(id.default_n()))?;
    let f = ReactionTerm::quadratic();
    let (u0, bd) = match id {
        ProblemId::P1 => (
            eval_on_grid(|p| 1.0 + (PI * p[0]).sin().powi(2), &grid),
            BoundaryData::constant(1, 1.0),
        ),
        ProblemId::P2 => (
            eval_on_grid(|p| 1.0 + (PI * p[0]).sin().powi(2), &grid),
            BoundaryData::ends(
                |t| 1.0 + (5.0 * t).sin(),
                |t| 5.0 * (5.0 * t).cos(),
                |t| 1.0 + (5.0 * t).sin(),
                |t| 5.0 * (5.0 * t).cos(),
            ),
        ),
        ProblemId::P3 => (
            eval_on_grid(|p| 0.5 + 0.5 * p[0], &grid),
            BoundaryData::ends(
                |_| 0.5,
                |_| 0.0,
                |t| 1.0 + (20.0 * PI * t).sin(),
                |t| 20.0 * PI * (20.0 * PI * t).cos(),
            ),
        ),
        ProblemId::P4 => (
            eval_on_grid(|p| 1.0 + ((PI * p[0]).sin() * (PI * p[1]).sin()).powi(2), &grid),
            BoundaryData::constant(2, 1.0),
        ),
        ProblemId::P5 => (
            eval_on_grid(|p| ridges(p[0], p[1]), &grid),
            BoundaryData::time_independent(2, |p| ridges(p[0], p[1])),
        ),
    };
    Problem::new(id.name(), &grid, f, bd, u0, T_FINAL)
}
