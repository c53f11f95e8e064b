//! The discrete Dirichlet Laplacian and its matrix-free propagators.
//!
//! `L` is the centred second difference (3-point in 1D, 5-point in 2D) acting
//! on interior nodes with zero extension past the boundary. Its eigenvectors
//! are sampled sine modes, so `e^{tL}` and `phi_1(tL)` are applied by a sine
//! transform, a diagonal scaling and the inverse transform.

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::sine::SineTransform;
use crate::tridiag::thomas_solve_constant;

/// Below this magnitude of `t * lambda` the series for `phi_1` is used.
pub const PHI1_SERIES_THRESHOLD: f64 = 1e-6;

/// Relative residual at which the conjugate gradient path stops.
pub const CG_TOLERANCE: f64 = 1e-12;

/// `phi_1(x) = (e^x - 1) / x` with `phi_1(0) = 1`.
pub fn phi1(x: f64) -> f64 {
    if x.abs() < PHI1_SERIES_THRESHOLD {
        1.0 + x / 2.0 + x * x / 6.0 + x * x * x / 24.0
    } else {
        x.exp_m1() / x
    }
}

/// Values at the boundary nodes of the extended grid at one instant.
///
/// Sides are ordered `x = 0`, `x = 1`, then (2D only) `y = 0`, `y = 1`. In 1D
/// each side holds one value; in 2D each holds `n` values indexed by the
/// interior index of the coordinate running along the side. Corners are never
/// read by the 5-point stencil and are not stored.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryTrace {
    grid: Grid,
    sides: Vec<Vec<f64>>,
}

impl BoundaryTrace {
    pub fn new(grid: &Grid, sides: Vec<Vec<f64>>) -> Result<BoundaryTrace> {
        let expected_len = if grid.dim() == 1 { 1 } else { grid.n() };
        if sides.len() != 2 * grid.dim() || sides.iter().any(|s| s.len() != expected_len) {
            return Err(Error::InvalidArgument(format!(
                "boundary trace for {grid} needs {} sides of {expected_len} values",
                2 * grid.dim()
            )));
        }
        Ok(BoundaryTrace { grid: *grid, sides })
    }

    /// 1D trace from the two end values.
    pub fn ends(grid: &Grid, left: f64, right: f64) -> Result<BoundaryTrace> {
        BoundaryTrace::new(grid, vec![vec![left], vec![right]])
    }

    pub fn zero(grid: &Grid) -> BoundaryTrace {
        let len = if grid.dim() == 1 { 1 } else { grid.n() };
        BoundaryTrace {
            grid: *grid,
            sides: vec![vec![0.0; len]; 2 * grid.dim()],
        }
    }

    /// Samples `b(point)` at every boundary node adjacent to the interior.
    pub fn sample<F: Fn(&[f64]) -> f64>(grid: &Grid, b: F) -> BoundaryTrace {
        let sides = if grid.dim() == 1 {
            vec![vec![b(&[0.0])], vec![b(&[1.0])]]
        } else {
            let along: Vec<f64> = (0..grid.n()).map(|k| grid.axis_coord(k)).collect();
            vec![
                along.iter().map(|&y| b(&[0.0, y])).collect(),
                along.iter().map(|&y| b(&[1.0, y])).collect(),
                along.iter().map(|&x| b(&[x, 0.0])).collect(),
                along.iter().map(|&x| b(&[x, 1.0])).collect(),
            ]
        };
        BoundaryTrace { grid: *grid, sides }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn sides(&self) -> &[Vec<f64>] {
        &self.sides
    }

    pub fn is_zero(&self) -> bool {
        self.sides.iter().flatten().all(|&v| v == 0.0)
    }

    /// The `b / h^2` terms that the stencil picks up at boundary-adjacent
    /// nodes, i.e. `D v - L v`.
    pub fn contribution(&self) -> Field {
        let g = &self.grid;
        let inv_h2 = 1.0 / (g.h() * g.h());
        let mut out = Field::zeros(g);
        let v = out.values_mut();
        let n = g.n();
        if g.dim() == 1 {
            v[0] += self.sides[0][0] * inv_h2;
            v[n - 1] += self.sides[1][0] * inv_h2;
        } else {
            for k in 0..n {
                v[k * n] += self.sides[0][k] * inv_h2;
                v[k * n + n - 1] += self.sides[1][k] * inv_h2;
                v[k] += self.sides[2][k] * inv_h2;
                v[(n - 1) * n + k] += self.sides[3][k] * inv_h2;
            }
        }
        out
    }

    /// Neighbour value just outside the interior along one side.
    fn side(&self, side: usize, k: usize) -> f64 {
        if self.grid.dim() == 1 {
            self.sides[side][0]
        } else {
            self.sides[side][k]
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    Stencil,
    /// `L = c I`; used by tests that need a trivially commuting operator.
    Scalar(f64),
}

/// How the Crank–Nicolson implicit systems are solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CnSolver {
    /// Thomas elimination in 1D, sine diagonalisation in 2D.
    #[default]
    Direct,
    /// Jacobi-preconditioned conjugate gradients.
    ConjugateGradient,
}

#[derive(Debug, Clone)]
pub struct DirichletLaplacian {
    grid: Grid,
    kind: Kind,
    transform: SineTransform,
    /// Eigenvalues laid out like a field in sine-mode space.
    spectrum: Vec<f64>,
}

/// `lambda_k = -(4/h^2) sin^2(k pi h / 2)`, `k = 1..=n`.
pub fn axis_eigenvalues(grid: &Grid) -> Vec<f64> {
    let h = grid.h();
    (1..=grid.n())
        .map(|k| {
            let s = (k as f64 * std::f64::consts::PI * h / 2.0).sin();
            -4.0 / (h * h) * s * s
        })
        .collect()
}

impl DirichletLaplacian {
    pub fn new(grid: &Grid) -> DirichletLaplacian {
        let axis = axis_eigenvalues(grid);
        let spectrum = if grid.dim() == 1 {
            axis
        } else {
            let n = grid.n();
            (0..n * n).map(|i| axis[i % n] + axis[i / n]).collect()
        };
        DirichletLaplacian {
            grid: *grid,
            kind: Kind::Stencil,
            transform: SineTransform::new(grid.n()),
            spectrum,
        }
    }

    /// Replaces `L` by `c I`. `c = 0` gives the zero operator.
    pub fn scalar_test_hook(grid: &Grid, c: f64) -> DirichletLaplacian {
        DirichletLaplacian {
            grid: *grid,
            kind: Kind::Scalar(c),
            transform: SineTransform::new(grid.n()),
            spectrum: vec![c; grid.len()],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Eigenvalues in sine-mode order (`kx` fastest in 2D).
    pub fn spectrum(&self) -> &[f64] {
        &self.spectrum
    }

    pub fn is_test_hook(&self) -> bool {
        matches!(self.kind, Kind::Scalar(_))
    }

    pub fn apply_l(&self, v: &Field) -> Result<Field> {
        self.grid.check(v.grid())?;
        Ok(self.stencil(v, None))
    }

    /// Full discrete `D` acting on `v` extended by the boundary values.
    pub fn apply_d_with_boundary(&self, v: &Field, bd: &BoundaryTrace) -> Result<Field> {
        self.grid.check(v.grid())?;
        self.grid.check(bd.grid())?;
        Ok(self.stencil(v, Some(bd)))
    }

    fn stencil(&self, v: &Field, bd: Option<&BoundaryTrace>) -> Field {
        if let Kind::Scalar(c) = self.kind {
            let mut out = c * v;
            if let Some(bd) = bd {
                out.axpy(1.0, &bd.contribution());
            }
            return out;
        }
        let g = &self.grid;
        let n = g.n();
        let inv_h2 = 1.0 / (g.h() * g.h());
        let x = v.values();
        let outside = |side: usize, k: usize| bd.map_or(0.0, |b| b.side(side, k));
        let mut out = Field::zeros(g);
        let y = out.values_mut();
        // Differences against the centre value first: neighbouring values are
        // close, so these subtractions are exact and the residual of a
        // discrete-harmonic field stays at rounding level.
        if g.dim() == 1 {
            for i in 0..n {
                let left = if i == 0 { outside(0, 0) } else { x[i - 1] };
                let right = if i + 1 == n { outside(1, 0) } else { x[i + 1] };
                y[i] = ((left - x[i]) + (right - x[i])) * inv_h2;
            }
        } else {
            for iy in 0..n {
                for ix in 0..n {
                    let i = iy * n + ix;
                    let c = x[i];
                    let west = if ix == 0 { outside(0, iy) } else { x[i - 1] };
                    let east = if ix + 1 == n { outside(1, iy) } else { x[i + 1] };
                    let south = if iy == 0 { outside(2, ix) } else { x[i - n] };
                    let north = if iy + 1 == n { outside(3, ix) } else { x[i + n] };
                    y[i] = (((west - c) + (east - c)) + ((south - c) + (north - c))) * inv_h2;
                }
            }
        }
        out
    }

    fn to_modes(&self, v: &Field) -> Vec<f64> {
        let mut data = v.values().to_vec();
        match self.kind {
            Kind::Scalar(_) => {}
            Kind::Stencil if self.grid.dim() == 1 => self.transform.forward_in_place(&mut data),
            Kind::Stencil => self.transform.forward_2d(&mut data),
        }
        data
    }

    fn field_of_modes(&self, mut data: Vec<f64>) -> Field {
        match self.kind {
            Kind::Scalar(_) => {}
            Kind::Stencil if self.grid.dim() == 1 => self.transform.inverse_in_place(&mut data),
            Kind::Stencil => self.transform.inverse_2d(&mut data),
        }
        Field::from_values(&self.grid, data).expect("mode vector has grid length")
    }

    /// `e^{tL} v0` by sine-mode diagonalisation.
    pub fn propagate(&self, v0: &Field, t: f64) -> Result<Field> {
        self.grid.check(v0.grid())?;
        if t < 0.0 {
            return Err(Error::InvalidArgument(format!("negative propagation time {t}")));
        }
        if t == 0.0 {
            return Ok(v0.clone());
        }
        let mut modes = self.to_modes(v0);
        for (m, lambda) in modes.iter_mut().zip(&self.spectrum) {
            *m *= (t * lambda).exp();
        }
        Ok(self.field_of_modes(modes))
    }

    /// `t phi_1(tL) w`, the Duhamel integral of a constant source over `[0, t]`.
    pub fn phi1_apply(&self, w: &Field, t: f64) -> Result<Field> {
        self.grid.check(w.grid())?;
        if t <= 0.0 {
            return Err(Error::InvalidArgument(format!("phi_1 needs t > 0, got {t}")));
        }
        let mut modes = self.to_modes(w);
        for (m, lambda) in modes.iter_mut().zip(&self.spectrum) {
            *m *= t * phi1(t * lambda);
        }
        Ok(self.field_of_modes(modes))
    }

    /// Exponential Euler step `e^{tL} v0 + t phi_1(tL) source`, exact for a
    /// constant source.
    pub fn exp_euler(&self, v0: &Field, source: &Field, t: f64) -> Result<Field> {
        self.grid.check(v0.grid())?;
        self.grid.check(source.grid())?;
        if t <= 0.0 {
            return Err(Error::InvalidArgument(format!("step size must be positive, got {t}")));
        }
        let mut modes = self.to_modes(v0);
        let source_modes = self.to_modes(source);
        for ((m, s), lambda) in modes.iter_mut().zip(&source_modes).zip(&self.spectrum) {
            let z = t * lambda;
            *m = z.exp() * *m + t * phi1(z) * s;
        }
        Ok(self.field_of_modes(modes))
    }

    /// `m` trapezoidal steps of size `tau/m` for `v' = L v + source(t)`,
    /// starting from `v0` at `t0`.
    pub fn crank_nicolson<S>(
        &self,
        v0: &Field,
        source: S,
        t0: f64,
        tau: f64,
        m: usize,
        solver: CnSolver,
    ) -> Result<Field>
    where
        S: Fn(f64) -> Field,
    {
        self.grid.check(v0.grid())?;
        if m == 0 || tau <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "Crank-Nicolson needs m >= 1 and tau > 0 (m = {m}, tau = {tau})"
            )));
        }
        let dt = tau / m as f64;
        let mut v = v0.clone();
        let mut s_prev = source(t0);
        for k in 0..m {
            let t_next = t0 + (k + 1) as f64 * dt;
            let s_next = source(t_next);
            let mut rhs = self.stencil(&v, None);
            rhs.values_mut().iter_mut().for_each(|r| *r *= 0.5 * dt);
            rhs.axpy(1.0, &v);
            rhs.axpy(0.5 * dt, &s_prev);
            rhs.axpy(0.5 * dt, &s_next);
            v = self.solve_shifted(&rhs, 0.5 * dt, solver)?;
            s_prev = s_next;
        }
        Ok(v)
    }

    /// Solves `L x = rhs` in sine-mode space (fast Poisson solve).
    pub fn solve_poisson(&self, rhs: &Field) -> Field {
        let mut modes = self.to_modes(rhs);
        for (m, lambda) in modes.iter_mut().zip(&self.spectrum) {
            *m /= lambda;
        }
        self.field_of_modes(modes)
    }

    /// Solves `(I - a L) x = rhs`.
    pub fn solve_shifted(&self, rhs: &Field, a: f64, solver: CnSolver) -> Result<Field> {
        self.grid.check(rhs.grid())?;
        if let Kind::Scalar(c) = self.kind {
            return Ok(rhs.map(|r| r / (1.0 - a * c)));
        }
        match solver {
            CnSolver::Direct if self.grid.dim() == 1 => {
                let inv_h2 = 1.0 / (self.grid.h() * self.grid.h());
                let x = thomas_solve_constant(-a * inv_h2, 1.0 + 2.0 * a * inv_h2, rhs.values());
                Field::from_values(&self.grid, x)
            }
            CnSolver::Direct => {
                let mut modes = self.to_modes(rhs);
                for (m, lambda) in modes.iter_mut().zip(&self.spectrum) {
                    *m /= 1.0 - a * lambda;
                }
                Ok(self.field_of_modes(modes))
            }
            CnSolver::ConjugateGradient => self.conjugate_gradient(rhs, a),
        }
    }

    fn conjugate_gradient(&self, rhs: &Field, a: f64) -> Result<Field> {
        let apply = |x: &Field| {
            let mut y = self.stencil(x, None);
            y.values_mut().iter_mut().for_each(|v| *v *= -a);
            y.axpy(1.0, x);
            y
        };
        let inv_h2 = 1.0 / (self.grid.h() * self.grid.h());
        let inv_diag = 1.0 / (1.0 + 2.0 * self.grid.dim() as f64 * a * inv_h2);

        let rhs_norm = rhs.dot(rhs).sqrt();
        let mut x = Field::zeros(&self.grid);
        if rhs_norm == 0.0 {
            return Ok(x);
        }
        let mut r = rhs.clone();
        let mut z = inv_diag * &r;
        let mut p = z.clone();
        let mut rz = r.dot(&z);
        let max_iter = 10 * self.grid.len() + 100;
        for _ in 0..max_iter {
            let ap = apply(&p);
            let alpha = rz / p.dot(&ap);
            x.axpy(alpha, &p);
            r.axpy(-alpha, &ap);
            if r.dot(&r).sqrt() <= CG_TOLERANCE * rhs_norm {
                return Ok(x);
            }
            z = inv_diag * &r;
            let rz_next = r.dot(&z);
            let beta = rz_next / rz;
            rz = rz_next;
            p = p.zip_map(&z, |pi, zi| zi + beta * pi);
        }
        Err(Error::NoConvergence {
            iterations: max_iter,
            residual: r.dot(&r).sqrt() / rhs_norm,
        })
    }
}
