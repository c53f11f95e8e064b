//! Independent oracles: dense matrices, quadrature, hand-rolled orders.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use splitpde::{Field, Grid};

/// The five-point (three-point in 1D) Dirichlet Laplacian as a dense matrix,
/// assembled entry by entry from the stencil.
pub fn dense_laplacian(grid: &Grid) -> DMatrix<f64> {
    let n = grid.n();
    let len = grid.len();
    let inv_h2 = 1.0 / (grid.h() * grid.h());
    let mut a = DMatrix::zeros(len, len);
    for i in 0..len {
        let (ix, iy) = (i % n, i / n);
        a[(i, i)] = -2.0 * grid.dim() as f64 * inv_h2;
        if ix > 0 {
            a[(i, i - 1)] = inv_h2;
        }
        if ix + 1 < n {
            a[(i, i + 1)] = inv_h2;
        }
        if grid.dim() == 2 {
            if iy > 0 {
                a[(i, i - n)] = inv_h2;
            }
            if iy + 1 < n {
                a[(i, i + n)] = inv_h2;
            }
        }
    }
    a
}

/// `exp(A)` by scaling and squaring with a 30-term Taylor polynomial.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let norm = a.abs().column_sum().max();
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let scaled = a / 2f64.powi(squarings);
    let dim = a.nrows();
    let mut term = DMatrix::identity(dim, dim);
    let mut sum = DMatrix::identity(dim, dim);
    for k in 1..=30 {
        term = &term * &scaled / k as f64;
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// `t phi_1(t A) v` from the exponential of the augmented matrix
/// `[[tA, t v], [0, 0]]`.
pub fn dense_phi1_apply(a: &DMatrix<f64>, t: f64, v: &DVector<f64>) -> DVector<f64> {
    let len = a.nrows();
    let mut aug = DMatrix::zeros(len + 1, len + 1);
    aug.view_mut((0, 0), (len, len)).copy_from(&(a * t));
    aug.view_mut((0, len), (len, 1)).copy_from(&(v * t));
    let e = expm(&aug);
    e.view((0, len), (len, 1)).into_owned().column(0).into_owned()
}

/// `phi_1(x) = int_0^1 e^{x s} ds` by composite Gauss-Legendre (5 points,
/// 200 panels). For strongly negative `x` only `[0, 40/|x|]` is integrated;
/// the rest is below `e^{-40}/|x|`.
pub fn phi1_quadrature(x: f64) -> f64 {
    const NODES: [f64; 5] = [
        0.0,
        -0.538_469_310_105_683_1,
        0.538_469_310_105_683_1,
        -0.906_179_845_938_664,
        0.906_179_845_938_664,
    ];
    const WEIGHTS: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
        0.236_926_885_056_189_1,
    ];
    let panels = 200;
    let end = if x < -40.0 { 40.0 / -x } else { 1.0 };
    let w = end / panels as f64;
    let mut sum = 0.0;
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * w;
        for (node, weight) in NODES.iter().zip(WEIGHTS) {
            sum += weight * 0.5 * w * (x * (mid + 0.5 * w * node)).exp();
        }
    }
    sum
}

pub fn to_vector(f: &Field) -> DVector<f64> {
    DVector::from_column_slice(f.values())
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// `log(e_{i-1}/e_i) / log(tau_{i-1}/tau_i)`, written out again so the
/// harness' own routine is not its own oracle.
pub fn orders(errors: &[f64], steps: &[f64]) -> Vec<f64> {
    (1..errors.len())
        .map(|i| (errors[i - 1] / errors[i]).ln() / (steps[i - 1] / steps[i]).ln())
        .collect()
}

/// The boundary contribution of the stencil: `b / h^2` summed over the
/// boundary neighbours of each node.
pub fn dense_boundary_term<B: Fn(&[f64]) -> f64>(grid: &Grid, b: B) -> DVector<f64> {
    let n = grid.n();
    let h = grid.h();
    let inv_h2 = 1.0 / (h * h);
    let s = |k: usize| (k + 1) as f64 * h;
    let mut c = DVector::zeros(grid.len());
    for i in 0..grid.len() {
        let (ix, iy) = (i % n, i / n);
        if grid.dim() == 1 {
            if ix == 0 {
                c[i] += b(&[0.0]) * inv_h2;
            }
            if ix == n - 1 {
                c[i] += b(&[1.0]) * inv_h2;
            }
            continue;
        }
        if ix == 0 {
            c[i] += b(&[0.0, s(iy)]) * inv_h2;
        }
        if ix == n - 1 {
            c[i] += b(&[1.0, s(iy)]) * inv_h2;
        }
        if iy == 0 {
            c[i] += b(&[s(ix), 0.0]) * inv_h2;
        }
        if iy == n - 1 {
            c[i] += b(&[s(ix), 1.0]) * inv_h2;
        }
    }
    c
}

/// Discrete harmonic extension by a dense LU solve of `A z = -c`.
pub fn dense_lifting<B: Fn(&[f64]) -> f64>(grid: &Grid, b: B) -> DVector<f64> {
    let c = dense_boundary_term(grid, b);
    dense_laplacian(grid).lu().solve(&(-c)).expect("Laplacian is regular")
}

/// `w' = w^2 + 2 z w` from `w0` over `t`, the Bernoulli solution written
/// with plain exponentials.
pub fn bernoulli(w0: f64, z: f64, t: f64) -> f64 {
    if z == 0.0 {
        return w0 / (1.0 - w0 * t);
    }
    let e = (2.0 * z * t).exp();
    2.0 * z * w0 * e / (2.0 * z + w0 - w0 * e)
}
