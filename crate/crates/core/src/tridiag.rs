//! Thomas elimination for tridiagonal systems.

/// Solves `A x = rhs` for tridiagonal `A` with sub-diagonal `lower`, diagonal
/// `diag` and super-diagonal `upper` (`lower[0]` and `upper[n-1]` unused).
///
/// No pivoting; the systems solved here are diagonally dominant.
pub fn thomas_solve(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    assert!(n > 0, "empty system");
    assert!(
        lower.len() == n && upper.len() == n && rhs.len() == n,
        "inconsistent band lengths"
    );

    let mut c = vec![0.0; n];
    let mut x = vec![0.0; n];
    c[0] = upper[0] / diag[0];
    x[0] = rhs[0] / diag[0];
    for i in 1..n {
        let denom = diag[i] - lower[i] * c[i - 1];
        c[i] = upper[i] / denom;
        x[i] = (rhs[i] - lower[i] * x[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    x
}

/// Constant-coefficient variant: `off` on both off-diagonals, `diag` on the
/// diagonal.
pub fn thomas_solve_constant(off: f64, diag: f64, rhs: &[f64]) -> Vec<f64> {
    let n = rhs.len();
    let lower = vec![off; n];
    let diag = vec![diag; n];
    thomas_solve(&lower, &diag, &lower, rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_by_three() {
        let x = thomas_solve(
            &[0.0, -1.0, -1.0],
            &[2.0, 2.0, 2.0],
            &[-1.0, -1.0, 0.0],
            &[1.0, 0.0, 1.0],
        );
        for v in x {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn single_equation() {
        assert_eq!(thomas_solve_constant(1.0, 4.0, &[2.0]), vec![0.5]);
    }

    #[test]
    fn residual_of_random_dominant_system() {
        let n = 50;
        let lower: Vec<f64> = (0..n).map(|i| ((i * 7 % 11) as f64) / 11.0 - 0.5).collect();
        let upper: Vec<f64> = (0..n).map(|i| ((i * 5 % 13) as f64) / 13.0 - 0.5).collect();
        let diag: Vec<f64> = (0..n).map(|i| 3.0 + (i % 3) as f64).collect();
        let rhs: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let x = thomas_solve(&lower, &diag, &upper, &rhs);
        for i in 0..n {
            let mut r = diag[i] * x[i] - rhs[i];
            if i > 0 {
                r += lower[i] * x[i - 1];
            }
            if i + 1 < n {
                r += upper[i] * x[i + 1];
            }
            assert!(r.abs() < 1e-13);
        }
    }
}
