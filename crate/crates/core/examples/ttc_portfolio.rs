// TTC portfolio of the agency parameterisation, by iteration and directly.
//
// `cargo run --example ttc_portfolio`

use ttc_stress::{
    sample, solve_ttc_direct, solve_ttc_iterative, verify_perron_structure, Result, TtcResult,
};

pub fn run_example() -> Result<TtcResult> {
    let t = sample::agency_matrix();
    let o = sample::agency_origination();

    let iter = solve_ttc_iterative(&t, &o, 1e-12, 100_000)?;
    let direct = solve_ttc_direct(&t, &o)?;
    println!("grade  iterative   direct");
    for (i, (a, b)) in iter
        .portfolio
        .weights()
        .iter()
        .zip(direct.weights())
        .enumerate()
    {
        println!("{:>5}  {a:.6}    {b:.6}", i + 1);
    }
    println!("TTC PD {:.3}%", 100.0 * iter.ttc_pd.value());
    println!(
        "{} iterations, observed contraction {:.4}",
        iter.iterations, iter.contraction_ratio
    );

    let perron = verify_perron_structure(&t, &o)?;
    println!(
        "Perron root {:.7}, |lambda2| {:.4}, residual {:.1e}",
        perron.perron_root.unwrap_or(f64::NAN),
        perron.second_eigenvalue_modulus,
        perron.residual.unwrap_or(f64::NAN)
    );
    // about ln(1e-12)/ln(|lambda2|) periods to forget the start
    let periods = (1e-12f64).ln() / perron.second_eigenvalue_modulus.ln();
    println!("periods to reach 1e-12: about {periods:.0}");
    Ok(iter)
}

fn main() -> Result<()> {
    run_example().map(|_| ())
}
