use nalgebra::DMatrix;
use proptest::prelude::*;

use lfsm_core::decomposition::{
    equation_residuals, newton_solve_offdiag, scan_existence_frontier, solve_coefficients, Direction,
    SolverRegistry, DEFAULT_TOL,
};
use lfsm_core::model::{kernel_constant_pow, lfsm_codifference, LfsmParams};

#[test]
fn levy_coefficients_are_ones() {
    let (c, report) = solve_coefficients(1.5, 2.0 / 3.0, 1, 4, DEFAULT_TOL).unwrap();
    assert_eq!(report.solver, "closed_form");
    for i in 0..4 {
        for j in 0..=i {
            assert_eq!(c.get(i, j), 1.0);
        }
    }
    let (c, _) = solve_coefficients(2.0, 0.5, 1, 2, DEFAULT_TOL).unwrap();
    assert_eq!(c.to_rows(), vec![vec![1.0, 0.0], vec![1.0, 1.0]]);
}

#[test]
fn cholesky_of_codifference_matrix() {
    let d = 6;
    let p = LfsmParams::standard(2.0, 0.7).unwrap();
    let (c, _) = solve_coefficients(2.0, 0.7, 1, d, DEFAULT_TOL).unwrap();
    let cd = DMatrix::from_fn(d, d, |i, j| {
        lfsm_codifference(&p, (i + 1) as f64, (j + 1) as f64).unwrap() / 2.0
    });
    let l = cd.cholesky().unwrap().l();
    for i in 0..d {
        for j in 0..=i {
            assert!((c.get(i, j) - l[(i, j)]).abs() < 1e-8, "({i},{j})");
        }
    }
}

#[test]
fn first_offdiagonal_lies_in_existence_bracket() {
    for &(alpha, hurst) in &[(1.5, 0.8), (1.2, 0.95), (1.1, 0.95), (1.9, 0.7)] {
        for t in 1..=3usize {
            let (c, _) = solve_coefficients(alpha, hurst, t, 2, DEFAULT_TOL).unwrap();
            let k = kernel_constant_pow(alpha, hurst).unwrap().powf(1.0 / alpha);
            let upper = k * ((t + 1) as f64).powf(hurst);
            assert!(c.get(1, 0) >= c.diag(0) && c.get(1, 0) <= upper, "({alpha},{hurst},{t})");
        }
    }
}

#[test]
fn generic_offdiagonal_substitutes_back() {
    let kpow = kernel_constant_pow(1.5, 0.8).unwrap();
    let a00 = kpow.powf(1.0 / 1.5);
    let target = kpow * (2f64.powf(1.2) - 1.0);
    let out = newton_solve_offdiag(target, a00, 1.5, Direction::Up, DEFAULT_TOL).unwrap();
    let f = out.z.powf(1.5) - (out.z - a00).abs().powf(1.5);
    assert!((f - target).abs() <= 1e-10);
    assert!(out.z > a00);
}

#[test]
fn frontier_examples() {
    let rows = scan_existence_frontier(&[1.5, 0.7], &[0.8], 1, 7);
    assert!(rows.iter().all(|r| r.exists), "{rows:?}");
    let alphas = [1.1, 1.25, 1.5, 1.75, 2.0];
    for &a in &alphas {
        let row = &scan_existence_frontier(&[a], &[1.0 / a], 1, 7)[0];
        assert!(row.exists);
    }
    let bad = &scan_existence_frontier(&[0.5], &[0.3], 1, 7)[0];
    assert!(!bad.exists);
    assert!(bad.failing_equation.is_some());
}

#[test]
fn registry_selection_by_name() {
    let reg = SolverRegistry::default();
    let newton = reg.select("newton", 2.0, 0.7).unwrap();
    let gauss = reg.select("gaussian", 2.0, 0.7).unwrap();
    let (a, _) = newton.solve(2.0, 0.7, 1, 5, DEFAULT_TOL).unwrap();
    let (b, _) = gauss.solve(2.0, 0.7, 1, 5, DEFAULT_TOL).unwrap();
    for i in 0..5 {
        for j in 0..=i {
            assert!((a.get(i, j) - b.get(i, j)).abs() < 1e-9);
        }
    }
    assert!(reg.select("gaussian", 1.5, 0.7).is_err());
    assert!(reg.select("nope", 1.5, 0.7).is_err());
}

fn solvable() -> impl Strategy<Value = (f64, f64, usize, usize)> {
    (1.0f64..2.0, 0.05f64..0.95, 1usize..4, 2usize..9)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn codifference_is_reproduced((alpha, hurst, t, d) in solvable()) {
        let (c, report) = solve_coefficients(alpha, hurst, t, d, DEFAULT_TOL).unwrap();
        let kpow = kernel_constant_pow(alpha, hurst).unwrap();
        let e = alpha * hurst;
        let scale = kpow * ((t + d) as f64).powf(e);
        let norm = |i: usize, k: Option<usize>| -> f64 {
            (0..d)
                .map(|j| (c.get(i, j) - k.map_or(0.0, |k| c.get(k, j))).abs().powf(alpha))
                .sum()
        };
        for i in 0..d {
            let own = norm(i, None) - kpow * ((t + i) as f64).powf(e);
            prop_assert!(own.abs() <= 10.0 * DEFAULT_TOL * scale, "row {} {}", i, own);
            for k in 0..i {
                let gap = norm(i, Some(k)) - kpow * ((i - k) as f64).powf(e);
                prop_assert!(gap.abs() <= 10.0 * DEFAULT_TOL * scale, "({},{}) {}", i, k, gap);
            }
        }
        prop_assert!(report.max_residual <= DEFAULT_TOL * scale);
        let own = equation_residuals(&c, kpow).iter().fold(0.0f64, |m, r| m.max(r.2.abs()));
        prop_assert!(own <= DEFAULT_TOL * scale);
    }

    #[test]
    fn positivity_monotonicity_and_anchor((alpha, hurst, t, d) in solvable()) {
        let (c, _) = solve_coefficients(alpha, hurst, t, d, DEFAULT_TOL).unwrap();
        let k = kernel_constant_pow(alpha, hurst).unwrap().powf(1.0 / alpha);
        prop_assert!((c.diag(0) - k * (t as f64).powf(hurst)).abs() <= 1e-12 * c.diag(0));
        let up = hurst > 1.0 / alpha;
        for j in 0..d {
            for i in j..d {
                prop_assert!(c.get(i, j) > 0.0);
                if i > j {
                    let (prev, cur) = (c.get(i - 1, j), c.get(i, j));
                    if up { prop_assert!(cur > prev) } else { prop_assert!(cur < prev) }
                }
            }
        }
    }

    #[test]
    fn newton_restarts_agree(alpha in 1.05f64..1.95, a_ii in 0.3f64..3.0, frac in 0.05f64..0.95) {
        // target taken from a point inside the domain, so a solution exists
        let z_true = a_ii * (1.0 + 2.0 * frac);
        let target = z_true.powf(alpha) - (z_true - a_ii).powf(alpha);
        let out = newton_solve_offdiag(target, a_ii, alpha, Direction::Up, 1e-12).unwrap();
        prop_assert!((out.z - z_true).abs() <= 1e-8 * z_true);
    }
}
