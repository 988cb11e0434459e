// Full validation of a current book against a parameterisation, as JSON.
//
// `cargo run --example validation_report`

use ttc_stress::{run_validation, sample, Result, ValidationReport};

pub fn run_example() -> Result<ValidationReport> {
    let t = sample::agency_matrix();
    let o = sample::agency_origination();
    let report = run_validation(&sample::portfolio_mid_grades(), &t, &o, 50)?;

    let mut summary = serde_json::to_value(&report).expect("serializable");
    // the path is long; keep the summary readable
    summary.as_object_mut().expect("object").remove("path");
    println!("{}", serde_json::to_string_pretty(&summary).expect("json"));
    println!("verdict: {}", report.verdict);
    Ok(report)
}

fn main() -> Result<()> {
    run_example().map(|_| ())
}
