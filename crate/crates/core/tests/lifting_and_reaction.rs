mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use proptest::prelude::*;
use splitpde::flows::{reaction_flow_classical, reaction_flow_exact, reaction_flow_modified, reaction_flow_modified_exact};
use splitpde::harness::{builtin_problem, ProblemId};
use splitpde::lifting::BoundaryFn;
use splitpde::{
    eval_on_grid, lifting_time_derivative, make_grid, modified_nonlinearity, solve_lifting, BoundaryData,
    DirichletLaplacian, Field, Lifting, Norm, ReactionTerm,
};

fn harmonic_residual(lifting: &Lifting, t: f64) -> f64 {
    let grid = lifting.grid();
    let op = DirichletLaplacian::new(grid);
    let z = lifting.z_at(t);
    op.apply_d_with_boundary(&z, &lifting.boundary().trace(grid, t))
        .unwrap()
        .norm(Norm::Inf)
}

#[test]
fn builtin_liftings_are_discrete_harmonic() {
    for id in ProblemId::ALL {
        let p = builtin_problem(id, None).unwrap();
        for t in [0.0, 0.0123, 0.05, 0.1] {
            let r = harmonic_residual(&p.lifting, t);
            assert!(r <= 1e-10, "{} t={t}: {r:e}", id.name());
        }
    }
}

#[test]
fn lifting_rate_is_harmonic_extension_of_boundary_rate() {
    let p = builtin_problem(ProblemId::P3, None).unwrap();
    let op = DirichletLaplacian::new(&p.grid);
    for t in [0.0, 0.01, 0.037] {
        let dz = p.lifting.dz_at(t);
        let r = op.apply_d_with_boundary(&dz, &p.bd.rate_trace(&p.grid, t)).unwrap();
        assert!(r.norm(Norm::Inf) <= 1e-10 * 20.0 * PI);
        // against a centred difference of z itself
        let d = 1e-6;
        let fd = (1.0 / (2.0 * d)) * &(&*p.lifting.z_at(t + d) - &*p.lifting.z_at(t - d));
        assert!(dz.max_abs_diff(&fd) < 1e-6);
    }
}

#[test]
fn p3_lifting_is_the_linear_interpolant() {
    let p = builtin_problem(ProblemId::P3, Some(99)).unwrap();
    let t = 0.0135;
    let right = 1.0 + (20.0 * PI * t).sin();
    let expect = eval_on_grid(|x| 0.5 + (right - 0.5) * x[0], &p.grid);
    assert!(p.lifting.z_at(t).max_abs_diff(&expect) < 1e-15);
}

#[test]
fn modified_nonlinearity_vanishes_at_zero_exactly() {
    for id in ProblemId::ALL {
        let p = builtin_problem(id, Some(31)).unwrap();
        let zero = Field::zeros(&p.grid);
        for t in [0.0, 0.004, 0.0731] {
            let g = modified_nonlinearity(&p.f, &p.lifting, t, &zero);
            assert!(g.values().iter().all(|&v| v == 0.0), "{}", id.name());
        }
    }
}

#[test]
fn closed_form_reaction_matches_fine_rk4() {
    let g = make_grid(1, 40).unwrap();
    let f = ReactionTerm::quadratic();
    let w0 = eval_on_grid(|p| -1.0 + 3.0 * p[0], &g);
    let exact = reaction_flow_exact(&f, &w0, 0.2).unwrap();
    let rk4 = reaction_flow_classical(&f, &w0, 0.2, 10_000).unwrap();
    assert!(exact.max_abs_diff(&rk4) <= 1e-10);

    let bd = BoundaryData::time_independent(1, |p| 1.0 + p[0]);
    let lifting = Lifting::new(&g, &bd).unwrap();
    let exact = reaction_flow_modified_exact(&f, &lifting, &w0, 0.0, 0.2).unwrap();
    let rk4 = reaction_flow_modified(&f, &lifting, &w0, 0.0, 0.2, 10_000).unwrap();
    assert!(exact.max_abs_diff(&rk4) <= 1e-10);
}

#[test]
fn rk4_self_convergence_is_fourth_order() {
    let g = make_grid(1, 12).unwrap();
    let f = ReactionTerm::quadratic();
    let w0 = eval_on_grid(|p| 0.5 + p[0], &g);
    let tau = 0.4;
    let at = |m| reaction_flow_classical(&f, &w0, tau, m).unwrap();
    let reference = reaction_flow_exact(&f, &w0, tau).unwrap();
    let subs = [8usize, 16, 32, 64];
    let errs: Vec<f64> = subs.iter().map(|&m| at(m).max_abs_diff(&reference)).collect();
    let steps: Vec<f64> = subs.iter().map(|&m| tau / m as f64).collect();
    for order in common::orders(&errs, &steps) {
        assert!((order - 4.0).abs() <= 0.1, "{errs:?}");
    }
}

#[test]
fn rk4_self_convergence_with_moving_lifting() {
    // no closed form here: compare with 10x the substeps
    let g = make_grid(1, 9).unwrap();
    let value: BoundaryFn = Arc::new(|t, p| if p[0] < 0.5 { 1.0 + (5.0 * t).sin() } else { 2.0 });
    let bd = BoundaryData::new(1, value, None, true);
    let lifting = Lifting::new(&g, &bd).unwrap();
    let f = ReactionTerm::quadratic();
    let w0 = eval_on_grid(|p| (PI * p[0]).sin(), &g);
    let run = |m| reaction_flow_modified(&f, &lifting, &w0, 0.1, 0.2, m).unwrap();
    let subs = [4usize, 8, 16];
    let errs: Vec<f64> = subs.iter().map(|&m| run(m).max_abs_diff(&run(10 * m))).collect();
    let steps: Vec<f64> = subs.iter().map(|&m| 0.2 / m as f64).collect();
    for order in common::orders(&errs, &steps) {
        assert!((order - 4.0).abs() <= 0.15, "{errs:?}");
    }
}

#[test]
fn pointwise_lifting_agrees_with_two_dimensional_solver_on_affine_data() {
    let g = make_grid(2, 23).unwrap();
    let bd = BoundaryData::time_independent(2, |p| 0.3 + 2.0 * p[0] - p[1]);
    let z = solve_lifting(&g, &bd, 0.0).unwrap();
    let expect = eval_on_grid(|p| 0.3 + 2.0 * p[0] - p[1], &g);
    assert!(z.max_abs_diff(&expect) < 1e-13);
    assert_eq!(lifting_time_derivative(&g, &bd, 0.5).unwrap(), Field::zeros(&g));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_one_dimensional_data_is_lifted_harmonically(n in 1usize..=499, left in -1.0..1.0f64, right in -1.0..1.0f64) {
        let g = make_grid(1, n).unwrap();
        let bd = BoundaryData::time_independent(1, move |p| if p[0] < 0.5 { left } else { right });
        let lifting = Lifting::new(&g, &bd).unwrap();
        prop_assert!(harmonic_residual(&lifting, 0.0) <= 1e-10);
    }

    #[test]
    fn large_data_residual_stays_at_rounding_level(n in 1usize..2000, left in -1e3..1e3f64, right in -1e3..1e3f64) {
        // each node is correctly rounded, so the second difference is off by
        // at most four half-ulps of the largest value
        let g = make_grid(1, n).unwrap();
        let bd = BoundaryData::time_independent(1, move |p| if p[0] < 0.5 { left } else { right });
        let lifting = Lifting::new(&g, &bd).unwrap();
        let ulp = f64::EPSILON * left.abs().max(right.abs());
        prop_assert!(harmonic_residual(&lifting, 0.0) <= 2.0 * ulp / (g.h() * g.h()));
    }

    #[test]
    fn random_two_dimensional_data_is_lifted_harmonically(
        n in 1usize..=99,
        a in -2.0..2.0f64, b in -2.0..2.0f64, c in -2.0..2.0f64, k in 1.0..6.0f64,
    ) {
        let g = make_grid(2, n).unwrap();
        let bd = BoundaryData::time_independent(2, move |p| a + b * (k * p[0]).sin() * p[1] + c * (p[0] - p[1]).powi(2));
        let lifting = Lifting::new(&g, &bd).unwrap();
        prop_assert!(harmonic_residual(&lifting, 0.0) <= 1e-10);
    }

    #[test]
    fn g_fixes_the_origin_for_any_lifting(n in 1usize..50, t in 0.0..1.0f64, amp in -3.0..3.0f64, c in -2.0..2.0f64) {
        let g = make_grid(1, n).unwrap();
        let value: BoundaryFn = Arc::new(move |t, p| if p[0] < 0.5 { amp * (7.0 * t).cos() } else { c });
        let lifting = Lifting::new(&g, &BoundaryData::new(1, value, None, true)).unwrap();
        for f in [ReactionTerm::quadratic(), ReactionTerm::linear(c), ReactionTerm::new("cubic", |u| u * u * u - u)] {
            let g0 = modified_nonlinearity(&f, &lifting, t, &Field::zeros(&g));
            prop_assert!(g0.values().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn modified_reaction_keeps_zero_nodes(n in 2usize..40, zeros in prop::collection::vec(any::<bool>(), 40), tau in 1e-3..0.2f64) {
        let g = make_grid(1, n).unwrap();
        let bd = BoundaryData::time_independent(1, |p| 1.0 + p[0]);
        let lifting = Lifting::new(&g, &bd).unwrap();
        let w0 = Field::from_values(&g, (0..n).map(|i| if zeros[i] { 0.0 } else { 0.3 }).collect()).unwrap();
        let w = reaction_flow_modified(&ReactionTerm::quadratic(), &lifting, &w0, 0.0, tau, 10).unwrap();
        for (&zero, &v) in zeros.iter().zip(w.values()) {
            if zero {
                prop_assert!(v.abs() <= 1e-14);
            }
        }
    }
}
