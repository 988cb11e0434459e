// Calibrates the one-factor model to a credit index, links it to macro
// variables and runs the implied scenario.
//
// `cargo run --example macro_calibration`

use ttc_stress::io::parse_scenario_csv;
use ttc_stress::{
    economy_path, estimate_p_rho, fit_macro_model, project_path, sample, MacroModel, Result,
};

const HISTORY: &str = include_str!("../data/macro_history.csv");

pub fn run_example() -> Result<MacroModel> {
    let sc = parse_scenario_csv(HISTORY)?;
    let series = sc.credit_index.expect("credit_index column");
    let macros = sc.macro_scenario.expect("macro columns");

    let (p, rho) = estimate_p_rho(&series)?;
    println!(
        "method of moments: p = {:.3}%, rho = {:.4}",
        100.0 * p.value(),
        rho.value()
    );

    let model = fit_macro_model(&series, &macros, 1)?;
    println!(
        "probit(C_t) = {:.4} {:+.4}*gdp(t-1) {:+.4}*unemp(t-1)   R2 {:.3}",
        model.betas[0], model.betas[1], model.betas[2], model.r_squared
    );

    let zs = economy_path(&model, &macros)?;
    let worst = zs
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.value().total_cmp(&b.1.value()))
        .expect("rows");
    println!(
        "worst implied state z = {:.3} after {}",
        worst.1.value(),
        sc.labels[worst.0]
    );

    let t = sample::agency_matrix();
    let o = sample::agency_origination();
    let path = project_path(&sample::portfolio_seasoned(), &t, &o, model.rho, &zs)?;
    let peak = path
        .points
        .iter()
        .max_by(|a, b| a.avg_pd.total_cmp(&b.avg_pd))
        .expect("points");
    println!(
        "projected over {} periods; peak average PD {:.3}% in period {}",
        path.periods(),
        100.0 * peak.avg_pd,
        peak.period
    );
    Ok(model)
}

fn main() -> Result<()> {
    run_example().map(|_| ())
}
