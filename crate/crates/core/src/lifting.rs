//! Dirichlet data and its discrete harmonic continuation.
//!
//! The lifting `z(t)` solves `D z = 0` in the interior with `z = b(t)` on the
//! boundary. Subtracting it turns the inhomogeneous problem into one with
//! homogeneous boundary values, and `g(t, w) = f(w + z) - f(z)` is the
//! reaction term compatible with them.

use std::borrow::Cow;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::flows::ReactionTerm;
use crate::grid::{Field, Grid};
use crate::operators::{BoundaryTrace, DirichletLaplacian};

/// Step of the centred difference used when no analytic `db/dt` is supplied.
pub const RATE_FD_STEP: f64 = 1e-6;

pub type BoundaryFn = Arc<dyn Fn(f64, &[f64]) -> f64 + Send + Sync>;

/// Time-dependent Dirichlet data `b(t, x)` on the boundary of the unit
/// interval or square.
#[derive(Clone)]
pub struct BoundaryData {
    dim: usize,
    value: BoundaryFn,
    rate: Option<BoundaryFn>,
    time_dependent: bool,
}

impl fmt::Debug for BoundaryData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundaryData")
            .field("dim", &self.dim)
            .field("time_dependent", &self.time_dependent)
            .field("analytic_rate", &self.rate.is_some())
            .finish()
    }
}

impl BoundaryData {
    /// `rate = None` falls back to a centred difference in time.
    pub fn new(
        dim: usize,
        value: BoundaryFn,
        rate: Option<BoundaryFn>,
        time_dependent: bool,
    ) -> BoundaryData {
        BoundaryData {
            dim,
            value,
            rate,
            time_dependent,
        }
    }

    pub fn constant(dim: usize, c: f64) -> BoundaryData {
        BoundaryData::time_independent(dim, move |_| c)
    }

    pub fn zero(dim: usize) -> BoundaryData {
        BoundaryData::constant(dim, 0.0)
    }

    pub fn time_independent<F>(dim: usize, b: F) -> BoundaryData
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        BoundaryData {
            dim,
            value: Arc::new(move |_, p| b(p)),
            rate: Some(Arc::new(|_, _| 0.0)),
            time_dependent: false,
        }
    }

    /// 1D data given separately at `x = 0` and `x = 1`, each with its time
    /// derivative.
    pub fn ends<L, DL, R, DR>(left: L, d_left: DL, right: R, d_right: DR) -> BoundaryData
    where
        L: Fn(f64) -> f64 + Send + Sync + 'static,
        DL: Fn(f64) -> f64 + Send + Sync + 'static,
        R: Fn(f64) -> f64 + Send + Sync + 'static,
        DR: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        BoundaryData {
            dim: 1,
            value: Arc::new(move |t, p| if p[0] < 0.5 { left(t) } else { right(t) }),
            rate: Some(Arc::new(move |t, p| if p[0] < 0.5 { d_left(t) } else { d_right(t) })),
            time_dependent: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_time_dependent(&self) -> bool {
        self.time_dependent
    }

    /// True when `db/dt` is approximated by finite differences.
    pub fn has_numeric_rate(&self) -> bool {
        self.time_dependent && self.rate.is_none()
    }

    pub fn value(&self, t: f64, point: &[f64]) -> f64 {
        (self.value)(t, point)
    }

    pub fn rate(&self, t: f64, point: &[f64]) -> f64 {
        if !self.time_dependent {
            return 0.0;
        }
        match &self.rate {
            Some(rate) => rate(t, point),
            None => {
                let d = RATE_FD_STEP;
                ((self.value)(t + d, point) - (self.value)(t - d, point)) / (2.0 * d)
            }
        }
    }

    pub fn trace(&self, grid: &Grid, t: f64) -> BoundaryTrace {
        BoundaryTrace::sample(grid, |p| self.value(t, p))
    }

    pub fn rate_trace(&self, grid: &Grid, t: f64) -> BoundaryTrace {
        BoundaryTrace::sample(grid, |p| self.rate(t, p))
    }

    fn check(&self, grid: &Grid) -> Result<()> {
        if self.dim == grid.dim() {
            Ok(())
        } else {
            Err(Error::GridMismatch {
                expected: format!("{}D boundary data", self.dim),
                found: grid.to_string(),
            })
        }
    }
}

/// `(b0 (n - i) + b1 (i + 1)) / (n + 1)`, the solution of the 1D tridiagonal
/// system `z[i-1] - 2 z[i] + z[i+1] = 0` with `z[-1] = b0`, `z[n] = b1`.
///
/// Evaluated in double-double arithmetic so the result is the rounded exact
/// value: second differences of a rounded linear sequence are at most one
/// unit in the last place, which keeps `D z` near `eps / h^2` even at
/// `n = 499`. Elimination accumulates several units there.
fn linear_interpolant(b0: f64, b1: f64, i: usize, n: usize) -> f64 {
    let (wl, wr, m) = ((n - i) as f64, (i + 1) as f64, (n + 1) as f64);
    let p1 = b0 * wl;
    let e1 = b0.mul_add(wl, -p1);
    let p2 = b1 * wr;
    let e2 = b1.mul_add(wr, -p2);
    // two-sum of the leading parts
    let s = p1 + p2;
    let bp = s - p1;
    let es = (p1 - (s - bp)) + (p2 - bp);
    let lo = es + e1 + e2;
    let q = s / m;
    let r = (-q).mul_add(m, s);
    q + (r + lo) / m
}

/// Solves `L z = -(boundary contribution)`, i.e. `D z = 0` with `z = trace`.
fn harmonic_extension(grid: &Grid, trace: &BoundaryTrace, op: Option<&DirichletLaplacian>) -> Field {
    if trace.is_zero() {
        return Field::zeros(grid);
    }
    match op {
        None => {
            let values = (0..grid.n())
                .map(|i| linear_interpolant(trace.sides()[0][0], trace.sides()[1][0], i, grid.n()))
                .collect();
            Field::from_values(grid, values).expect("grid length")
        }
        Some(op) => {
            let rhs = -1.0 * &trace.contribution();
            let mut z = op.solve_poisson(&rhs);
            // one refinement sweep brings the stencil residual to rounding level
            let residual = op
                .apply_d_with_boundary(&z, trace)
                .expect("lifting grids agree");
            z.axpy(-1.0, &op.solve_poisson(&residual));
            z
        }
    }
}

/// Computes `z(t)` with `D z = 0` and `z = b(t)` on the boundary.
pub fn solve_lifting(grid: &Grid, bd: &BoundaryData, t: f64) -> Result<Field> {
    bd.check(grid)?;
    let op = (grid.dim() == 2).then(|| DirichletLaplacian::new(grid));
    Ok(harmonic_extension(grid, &bd.trace(grid, t), op.as_ref()))
}

/// `dz/dt`, obtained as the harmonic extension of `db/dt`.
pub fn lifting_time_derivative(grid: &Grid, bd: &BoundaryData, t: f64) -> Result<Field> {
    bd.check(grid)?;
    if !bd.is_time_dependent() {
        return Ok(Field::zeros(grid));
    }
    let op = (grid.dim() == 2).then(|| DirichletLaplacian::new(grid));
    Ok(harmonic_extension(grid, &bd.rate_trace(grid, t), op.as_ref()))
}

/// The harmonic lifting of a [`BoundaryData`] on a fixed grid. For
/// time-independent data `z` is computed once at construction.
#[derive(Debug, Clone)]
pub struct Lifting {
    grid: Grid,
    bd: BoundaryData,
    op: Option<DirichletLaplacian>,
    fixed: Option<Field>,
    zero: Field,
}

impl Lifting {
    pub fn new(grid: &Grid, bd: &BoundaryData) -> Result<Lifting> {
        bd.check(grid)?;
        let op = (grid.dim() == 2).then(|| DirichletLaplacian::new(grid));
        let fixed = (!bd.is_time_dependent())
            .then(|| harmonic_extension(grid, &bd.trace(grid, 0.0), op.as_ref()));
        Ok(Lifting {
            grid: *grid,
            bd: bd.clone(),
            op,
            fixed,
            zero: Field::zeros(grid),
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn boundary(&self) -> &BoundaryData {
        &self.bd
    }

    pub fn is_time_dependent(&self) -> bool {
        self.fixed.is_none()
    }

    pub fn z_at(&self, t: f64) -> Cow<'_, Field> {
        match &self.fixed {
            Some(z) => Cow::Borrowed(z),
            None => Cow::Owned(harmonic_extension(
                &self.grid,
                &self.bd.trace(&self.grid, t),
                self.op.as_ref(),
            )),
        }
    }

    pub fn dz_at(&self, t: f64) -> Cow<'_, Field> {
        match &self.fixed {
            Some(_) => Cow::Borrowed(&self.zero),
            None => Cow::Owned(harmonic_extension(
                &self.grid,
                &self.bd.rate_trace(&self.grid, t),
                self.op.as_ref(),
            )),
        }
    }
}

/// `g(t, w) = f(w + z(t)) - f(z(t))` pointwise.
pub fn modified_nonlinearity(f: &ReactionTerm, lifting: &Lifting, t: f64, w: &Field) -> Field {
    let z = lifting.z_at(t);
    modified_with(f, &z, w)
}

pub(crate) fn modified_with(f: &ReactionTerm, z: &Field, w: &Field) -> Field {
    w.zip_map(z, |wi, zi| f.eval(wi + zi) - f.eval(zi))
}
