// Recovers the correlation under which one mildly benign period (z = 1)
// moves the TTC portfolio to the seasoned sample book.
//
// Grid search brackets the best fit; bisection on the slope refines it
// and bisection on the residual finds the range that stays within 5e-4.
//
// `cargo run --example reconstruct_seasoned`

use ttc_stress::{
    propagate_step, sample, solve_ttc_iterative, AssetCorrelation, EconomyState, Result,
};

#[derive(Debug, Clone, Copy)]
pub struct RhoFit {
    pub rho: f64,
    pub residual: f64,
    pub lower: f64,
    pub upper: f64,
}

fn residual(rho: f64) -> Result<f64> {
    let t = sample::agency_matrix();
    let o = sample::agency_origination();
    let target = sample::portfolio_seasoned();
    let ttc = solve_ttc_iterative(&t, &o, 1e-13, 100_000)?.portfolio;
    let stressed = t.stressed(AssetCorrelation::new(rho)?, EconomyState::new(1.0)?);
    let (next, _) = propagate_step(&ttc, &stressed, &o)?;
    Ok(next
        .weights()
        .iter()
        .zip(target.weights())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> Result<bool>) -> Result<f64> {
    // f(lo) is false, f(hi) is true
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

pub fn fit_rho(tolerance: f64) -> Result<RhoFit> {
    let grid: Vec<f64> = (1..100).map(|k| k as f64 / 100.0).collect();
    let mut best = (grid[0], f64::INFINITY);
    for &r in &grid {
        let e = residual(r)?;
        if e < best.1 {
            best = (r, e);
        }
    }
    let h = 1e-7;
    let rho = bisect(best.0 - 0.01, best.0 + 0.01, |r| {
        Ok(residual(r + h)? > residual(r - h)?)
    })?;
    let res = residual(rho)?;
    let lower = bisect(1e-6, rho, |r| Ok(residual(r)? <= tolerance))?;
    let upper = bisect(0.999, rho, |r| Ok(residual(r)? <= tolerance))?;
    Ok(RhoFit {
        rho,
        residual: res,
        lower,
        upper,
    })
}

pub fn run_example() -> Result<RhoFit> {
    let fit = fit_rho(5e-4)?;
    println!(
        "best rho {:.4}, max abs weight error {:.2e}",
        fit.rho, fit.residual
    );
    println!(
        "rho within 5e-4 of the seasoned book: [{:.4}, {:.4}]",
        fit.lower, fit.upper
    );
    Ok(fit)
}

fn main() -> Result<()> {
    run_example().map(|_| ())
}
