mod common;

use nalgebra::DMatrix;
use proptest::prelude::*;
use ttc_stress::{
    build_m_p, project_zero_stress, propagate_step, solve_ttc_direct, solve_ttc_iterative,
    solve_ttc_iterative_from, verify_perron_structure, IterationOptions,
};

fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

fn linf(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Eigenvalue moduli of `M_p` from a general (Schur) eigensolver, largest first.
fn moduli(mp: &ttc_stress::Matrix) -> Vec<f64> {
    let m = mp.rows();
    let dm = DMatrix::from_fn(m, m, |i, j| mp[(i, j)]);
    let mut v: Vec<f64> = dm.complex_eigenvalues().iter().map(|c| c.norm()).collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn iterative_agrees_with_direct(seed in any::<u64>()) {
        let (t, o) = common::random_primitive_system(seed, 8);
        let it = solve_ttc_iterative(&t, &o, 1e-13, 1_000_000).unwrap();
        let d = solve_ttc_direct(&t, &o).unwrap();
        prop_assert!(linf(it.portfolio.weights(), d.weights()) <= 1e-8);
        let (next, _) = propagate_step(&d, &t, &o).unwrap();
        prop_assert!(l1(next.weights(), d.weights()) <= 1e-10);
    }

    #[test]
    fn solution_does_not_depend_on_the_start(seed in any::<u64>()) {
        let (t, o) = common::random_primitive_system(seed, 8);
        let mut r = common::rng(seed ^ 0x5eed);
        let opts = IterationOptions { tol: 1e-13, max_iter: 1_000_000, check_conditions: true };
        let a = solve_ttc_iterative_from(&t, &o, &common::random_portfolio(&mut r, t.n()), opts).unwrap();
        let b = solve_ttc_iterative_from(&t, &o, &common::random_portfolio(&mut r, t.n()), opts).unwrap();
        prop_assert!(linf(a.portfolio.weights(), b.portfolio.weights()) <= 1e-8);
    }

    #[test]
    fn perron_report_matches_eigensolver(seed in any::<u64>()) {
        let (t, o) = common::random_primitive_system(seed, 8);
        let mp = build_m_p(&t, &o).unwrap();
        let rep = verify_perron_structure(&t, &o).unwrap();
        prop_assert!(rep.passed());
        prop_assert!(rep.column_sums_ok);
        prop_assert!(rep.residual.unwrap() <= 1e-10);
        let mods = moduli(&mp);
        prop_assert!((mods[0] - 1.0).abs() <= 1e-10);
        prop_assert!((rep.perron_root.unwrap() - 1.0).abs() <= 1e-12);
        let second = mods.get(1).copied().unwrap_or(0.0);
        prop_assert!(
            (rep.second_eigenvalue_modulus - second).abs() <= 1e-3 * second.max(1e-3),
            "power {} vs eigensolver {}", rep.second_eigenvalue_modulus, second
        );
    }

    #[test]
    fn deltas_decay_at_the_subdominant_rate(seed in any::<u64>()) {
        let (t, o) = common::random_primitive_system(seed, 8);
        let rep = verify_perron_structure(&t, &o).unwrap();
        let it = solve_ttc_iterative(&t, &o, 1e-12, 1_000_000).unwrap();
        prop_assert!(it.contraction_ratio <= rep.second_eigenvalue_modulus + 0.05,
            "ratio {} vs |lambda2| {}", it.contraction_ratio, rep.second_eigenvalue_modulus);
    }

    #[test]
    fn projection_approaches_the_ttc_portfolio(seed in any::<u64>()) {
        let (t, o) = common::random_primitive_system(seed, 8);
        let mut r = common::rng(seed ^ 0xbeef);
        let w0 = common::random_portfolio(&mut r, t.n());
        let ttc = solve_ttc_direct(&t, &o).unwrap();
        let lambda2 = verify_perron_structure(&t, &o).unwrap().second_eigenvalue_modulus;
        // 200 periods when the gap allows it, otherwise long enough for |λ₂|^h < 1e-12
        let horizon = if lambda2 <= 0.85 { 200 } else { ((1e-12f64).ln() / lambda2.ln()).ceil() as usize + 50 };
        let path = project_zero_stress(&w0, &t, &o, horizon).unwrap();
        let start = l1(w0.weights(), ttc.weights());
        let mut prev = start;
        for p in &path.points {
            let d = l1(&p.weights, ttc.weights());
            prop_assert!(d <= prev + 1e-12);
            prev = d;
        }
        prop_assert!(prev <= 1e-8, "distance {} after {} periods", prev, horizon);
    }
}
