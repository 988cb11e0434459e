// A parameterisation with no TTC portfolio: two performing grades that
// swap every period, no defaults.
//
// `cargo run --example counterexample`

use ttc_stress::ttc::{primitivity, IterationOptions};
use ttc_stress::{sample, solve_ttc_iterative_from, Error, Result};

pub fn run_example() -> Result<Error> {
    let t = sample::periodic_matrix();
    let o = sample::periodic_origination();
    let w0 = sample::periodic_portfolio();

    let prim = primitivity(&t.performing_block())?;
    println!(
        "primitive: {} (zero at {:?} of power {})",
        prim.is_primitive(),
        prim.first_zero,
        prim.exponent
    );

    let forced = IterationOptions {
        tol: 1e-12,
        max_iter: 1_000,
        check_conditions: false,
    };
    let err = solve_ttc_iterative_from(&t, &o, &w0, forced).expect_err("no fixed point");
    println!("{err}");
    Ok(err)
}

fn main() -> Result<()> {
    run_example().map(|_| ())
}
