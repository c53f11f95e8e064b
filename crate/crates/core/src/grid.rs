//! Uniform interior-node grids on the unit interval and unit square.
//!
//! Only interior nodes carry unknowns; boundary values are data and live in
//! [`BoundaryTrace`](crate::lifting::BoundaryTrace). A grid with `n` interior
//! nodes per axis has spacing `h = 1/(n+1)`. Two-dimensional fields are stored
//! row-major with `x` running fastest: node `(ix, iy)` has index `iy * n + ix`.

use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: usize,
    n: usize,
    h: f64,
}

impl Grid {
    pub fn new(dim: usize, n: usize) -> Result<Grid> {
        if dim != 1 && dim != 2 {
            return Err(Error::UnsupportedDimension(dim));
        }
        if n == 0 {
            return Err(Error::EmptyGrid);
        }
        Ok(Grid {
            dim,
            n,
            h: 1.0 / (n + 1) as f64,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Interior nodes per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Total number of interior nodes, `n^dim`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinate of interior index `k` along one axis.
    pub fn axis_coord(&self, k: usize) -> f64 {
        (k + 1) as f64 * self.h
    }

    /// Physical coordinates of node `i`; the second entry is unused in 1D.
    pub fn coords(&self, i: usize) -> [f64; 2] {
        match self.dim {
            1 => [self.axis_coord(i), 0.0],
            _ => [self.axis_coord(i % self.n), self.axis_coord(i / self.n)],
        }
    }

    pub(crate) fn check(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch {
                expected: self.to_string(),
                found: other.to_string(),
            })
        }
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.dim {
            1 => write!(f, "1D n={} (h={})", self.n, self.h),
            _ => write!(f, "2D {}x{} (h={})", self.n, self.n, self.h),
        }
    }
}

pub fn make_grid(dim: usize, n: usize) -> Result<Grid> {
    Grid::new(dim, n)
}

/// Samples `func` at every interior node. `func` receives `[x]` in 1D and
/// `[x, y]` in 2D.
pub fn eval_on_grid<F>(func: F, grid: &Grid) -> Field
where
    F: Fn(&[f64]) -> f64,
{
    let values = (0..grid.len())
        .map(|i| func(&grid.coords(i)[..grid.dim]))
        .collect();
    Field {
        grid: *grid,
        values,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Norm {
    Inf,
    One,
    Two,
}

impl Norm {
    pub const ALL: [Norm; 3] = [Norm::Inf, Norm::One, Norm::Two];

    /// Short tag used in CSV column names and on the command line.
    pub fn tag(&self) -> &'static str {
        match self {
            Norm::Inf => "inf",
            Norm::One => "one",
            Norm::Two => "two",
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Norm::Inf => "l∞",
            Norm::One => "l¹",
            Norm::Two => "l²",
        }
    }
}

impl FromStr for Norm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Norm> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "linf" | "max" => Ok(Norm::Inf),
            "one" | "l1" | "1" => Ok(Norm::One),
            "two" | "l2" | "2" => Ok(Norm::Two),
            other => Err(Error::InvalidArgument(format!("unknown norm `{other}`"))),
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Real values on the interior nodes of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
}

impl Field {
    pub fn zeros(grid: &Grid) -> Field {
        Field::constant(grid, 0.0)
    }

    pub fn constant(grid: &Grid, value: f64) -> Field {
        Field {
            grid: *grid,
            values: vec![value; grid.len()],
        }
    }

    pub fn from_values(grid: &Grid, values: Vec<f64>) -> Result<Field> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        Ok(Field {
            grid: *grid,
            values,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn norm(&self, kind: Norm) -> f64 {
        norm(self, kind)
    }

    /// `self += alpha * other`.
    pub fn axpy(&mut self, alpha: f64, other: &Field) {
        debug_assert_eq!(self.grid, other.grid);
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += alpha * b;
        }
    }

    pub fn map<F: Fn(f64) -> f64>(&self, func: F) -> Field {
        Field {
            grid: self.grid,
            values: self.values.iter().map(|&v| func(v)).collect(),
        }
    }

    pub fn zip_map<F: Fn(f64, f64) -> f64>(&self, other: &Field, func: F) -> Field {
        debug_assert_eq!(self.grid, other.grid);
        Field {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| func(a, b))
                .collect(),
        }
    }

    /// Index of the first non-finite entry, if any.
    pub fn first_non_finite(&self) -> Option<usize> {
        self.values.iter().position(|v| !v.is_finite())
    }

    pub fn max_abs_diff(&self, other: &Field) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Euclidean inner product without quadrature weight.
    pub fn dot(&self, other: &Field) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum()
    }
}

impl Add for &Field {
    type Output = Field;

    fn add(self, rhs: &Field) -> Field {
        self.zip_map(rhs, |a, b| a + b)
    }
}

impl Sub for &Field {
    type Output = Field;

    fn sub(self, rhs: &Field) -> Field {
        self.zip_map(rhs, |a, b| a - b)
    }
}

impl Mul<&Field> for f64 {
    type Output = Field;

    fn mul(self, rhs: &Field) -> Field {
        rhs.map(|v| self * v)
    }
}

/// Discrete norms; `one` and `two` carry the `h^dim` quadrature weight.
pub fn norm(field: &Field, kind: Norm) -> f64 {
    let weight = field.grid.h.powi(field.grid.dim as i32);
    match kind {
        Norm::Inf => field.values.iter().fold(0.0, |m, v| f64::max(m, v.abs())),
        Norm::One => weight * field.values.iter().map(|v| v.abs()).sum::<f64>(),
        Norm::Two => (weight * field.values.iter().map(|v| v * v).sum::<f64>()).sqrt(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn default_resolution_has_spacing_one_over_500() {
        let g = make_grid(1, 499).unwrap();
        assert_eq!(g.len(), 499);
        assert!((g.h() - 1.0 / 500.0).abs() < 1e-17);
        assert!((g.h() * 500.0 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_node_sits_at_midpoint() {
        let g = make_grid(1, 1).unwrap();
        assert_eq!(g.coords(0)[0], 0.5);
    }

    #[test]
    fn square_grid_layout() {
        let g = make_grid(2, 3).unwrap();
        assert_eq!(g.len(), 9);
        assert_eq!(g.h(), 0.25);
        assert_eq!(g.coords(0), [0.25, 0.25]);
        // x runs fastest
        assert_eq!(g.coords(1), [0.5, 0.25]);
        assert_eq!(g.coords(3), [0.25, 0.5]);
        assert_eq!(g.coords(8), [0.75, 0.75]);
    }

    #[test]
    fn zero_nodes_rejected() {
        assert_eq!(make_grid(1, 0), Err(Error::EmptyGrid));
        assert_eq!(make_grid(3, 4), Err(Error::UnsupportedDimension(3)));
    }

    #[test]
    fn sampling() {
        let g = make_grid(1, 1).unwrap();
        let f = eval_on_grid(|p| 1.0 + (PI * p[0]).sin().powi(2), &g);
        assert!((f.values()[0] - 2.0).abs() < 1e-15);

        let g = make_grid(1, 3).unwrap();
        let f = eval_on_grid(|p| p[0], &g);
        assert_eq!(f.values(), &[0.25, 0.5, 0.75]);
    }

    #[test]
    fn norm_examples() {
        let g = make_grid(1, 3).unwrap();
        let f = Field::from_values(&g, vec![1.0, -2.0, 3.0]).unwrap();
        assert_eq!(norm(&f, Norm::Inf), 3.0);
        assert!((norm(&f, Norm::One) - 1.5).abs() < 1e-15);
        // sqrt(h * 14) = sqrt(3.5)
        assert!((norm(&f, Norm::Two) - 1.870_828_693_386_970_7).abs() < 1e-14);

        let g2 = make_grid(2, 5).unwrap();
        assert_eq!(Field::constant(&g2, 1.0).norm(Norm::Inf), 1.0);
    }

    #[test]
    fn length_checked() {
        let g = make_grid(1, 3).unwrap();
        assert!(matches!(
            Field::from_values(&g, vec![0.0; 4]),
            Err(Error::LengthMismatch { expected: 3, found: 4 })
        ));
    }

    #[test]
    fn refinement_keeps_shared_nodes() {
        // n = 3 (h = 1/4) nodes are every other node of n = 7 (h = 1/8)
        let f = |p: &[f64]| (3.0 * p[0]).exp() * (PI * p[0]).cos();
        let coarse = eval_on_grid(f, &make_grid(1, 3).unwrap());
        let fine = eval_on_grid(f, &make_grid(1, 7).unwrap());
        for k in 0..3 {
            assert_eq!(coarse.values()[k], fine.values()[2 * k + 1]);
        }
    }

    proptest! {
        #[test]
        fn norms_are_homogeneous(
            values in prop::collection::vec(-10.0f64..10.0, 1..40),
            alpha in -5.0f64..5.0,
        ) {
            let g = make_grid(1, values.len()).unwrap();
            let f = Field::from_values(&g, values).unwrap();
            let scaled = alpha * &f;
            for kind in Norm::ALL {
                let lhs = norm(&scaled, kind);
                let rhs = alpha.abs() * norm(&f, kind);
                prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs));
            }
            prop_assert!(norm(&f, Norm::One) <= norm(&f, Norm::Inf) + 1e-15);
        }
    }
}
