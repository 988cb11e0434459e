mod common;

use proptest::prelude::*;
use ttc_stress::{
    average_pd, project_path, project_zero_stress, propagate_step, sample,
    stress_transition_matrix, AssetCorrelation, EconomyState, Portfolio,
};

fn step_raw(
    w: &[f64],
    t: &ttc_stress::TransitionMatrix,
    o: &ttc_stress::OriginationVector,
) -> Vec<f64> {
    // W'T with the default column re-originated, computed without the library
    let n = w.len();
    let mut next = vec![0.0; n];
    for (i, wi) in w.iter().enumerate() {
        for (j, x) in next.iter_mut().enumerate() {
            *x += wi * t.get(i, j);
        }
    }
    let d = next[n - 1];
    next[n - 1] = 0.0;
    next.iter()
        .zip(o.weights())
        .map(|(x, oj)| x + d * oj)
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn step_conserves_balance_and_matches_formula(seed in any::<u64>(), n in 2usize..=9) {
        let mut r = common::rng(seed);
        let t = common::random_matrix(&mut r, n, 0.4);
        let o = common::random_origination(&mut r, n);
        let w = common::random_portfolio(&mut r, n);
        let (next, d) = propagate_step(&w, &t, &o).unwrap();
        prop_assert!((next.weights().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert_eq!(next.weights()[n - 1], 0.0);
        prop_assert!((d.value() - average_pd(&w, &t).unwrap().value()).abs() <= 1e-15);
        let raw = step_raw(w.weights(), &t, &o);
        for (a, b) in next.weights().iter().zip(&raw) {
            prop_assert!((a - b).abs() <= 1e-14);
        }
    }

    #[test]
    fn step_is_linear_in_the_portfolio(seed in any::<u64>(), n in 2usize..=9, alpha in 0.0f64..1.0) {
        let mut r = common::rng(seed);
        let t = common::random_matrix(&mut r, n, 0.4);
        let o = common::random_origination(&mut r, n);
        let (a, b) = (common::random_portfolio(&mut r, n), common::random_portfolio(&mut r, n));
        let mix: Vec<f64> = a.weights().iter().zip(b.weights()).map(|(x, y)| alpha * x + (1.0 - alpha) * y).collect();
        let mixed = propagate_step(&Portfolio::new(mix).unwrap(), &t, &o).unwrap().0;
        let (sa, sb) = (propagate_step(&a, &t, &o).unwrap().0, propagate_step(&b, &t, &o).unwrap().0);
        for k in 0..n {
            let expect = alpha * sa.weights()[k] + (1.0 - alpha) * sb.weights()[k];
            prop_assert!((mixed.weights()[k] - expect).abs() <= 1e-14);
        }
    }

    #[test]
    fn neutral_step_equals_unstressed(seed in any::<u64>(), n in 2usize..=9, rho in 0.0f64..0.9) {
        let mut r = common::rng(seed);
        let t = common::random_matrix(&mut r, n, 0.4);
        let o = common::random_origination(&mut r, n);
        let w = common::random_portfolio(&mut r, n);
        let t0 = stress_transition_matrix(&t, AssetCorrelation::new(rho).unwrap(), EconomyState::NEUTRAL);
        prop_assert_eq!(propagate_step(&w, &t0, &o).unwrap(), propagate_step(&w, &t, &o).unwrap());
    }

    #[test]
    fn path_agrees_with_repeated_steps(seed in any::<u64>(), n in 2usize..=6, rho in 0.0f64..0.5) {
        let mut r = common::rng(seed);
        let t = common::random_matrix(&mut r, n, 0.4);
        let o = common::random_origination(&mut r, n);
        let w0 = common::random_portfolio(&mut r, n);
        let zs: Vec<EconomyState> = [-1.5, 0.3, 2.0, -0.2].iter().map(|&z| EconomyState::new(z).unwrap()).collect();
        let rho = AssetCorrelation::new(rho).unwrap();
        let path = project_path(&w0, &t, &o, rho, &zs).unwrap();
        let mut w = w0;
        for (k, z) in zs.iter().enumerate() {
            let (next, d) = propagate_step(&w, &t.stressed(rho, *z), &o).unwrap();
            prop_assert_eq!(&path.points[k + 1].weights, &next.weights().to_vec());
            prop_assert!((path.points[k + 1].default_flow - d.value()).abs() <= 1e-15);
            w = next;
        }
    }
}

#[test]
fn rounded_rows_keep_the_book_size() {
    let t = sample::agency_matrix();
    let o = sample::agency_origination();
    let path = project_zero_stress(&sample::portfolio_barbell(), &t, &o, 200).unwrap();
    for p in &path.points {
        assert!((p.weights.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn mid_grade_book_overshoots_then_settles() {
    let t = sample::agency_matrix();
    let o = sample::agency_origination();
    let pds = project_zero_stress(&sample::portfolio_mid_grades(), &t, &o, 500)
        .unwrap()
        .avg_pds();
    let peak = pds[..=50].iter().copied().fold(0.0, f64::max);
    assert!(pds.windows(2).any(|w| w[1] < w[0]));
    assert!(peak > 0.0165 && peak > pds[50]);
    // still 0.35pp above the TTC level after 50 periods; |λ₂| ≈ 0.94 needs a few hundred
    assert!((pds[50] - 0.012331).abs() < 1e-5);
    assert!((pds[500] - 0.01198).abs() < 5e-5);
}

#[test]
fn ttc_book_stays_put() {
    let t = sample::agency_matrix();
    let o = sample::agency_origination();
    let w = ttc_stress::solve_ttc_direct(&t, &o).unwrap();
    let pds = project_zero_stress(&w, &t, &o, 120).unwrap().avg_pds();
    for &a in &pds {
        assert!((a - 0.01198).abs() < 1e-4);
        assert!((a - pds[0]).abs() < 1e-14);
    }
}
