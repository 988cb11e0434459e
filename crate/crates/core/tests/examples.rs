//! Runs every example in `examples/` as a test.

macro_rules! example {
    ($name:ident, $file:literal) => {
        #[allow(dead_code)]
        mod $name {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }
    };
}

example!(stress_matrix, "stress_matrix.rs");
example!(ttc_portfolio, "ttc_portfolio.rs");
example!(spurious_projections, "spurious_projections.rs");
example!(macro_calibration, "macro_calibration.rs");
example!(counterexample, "counterexample.rs");
example!(validation_report, "validation_report.rs");
example!(reconstruct_seasoned, "reconstruct_seasoned.rs");

use ttc_stress::{Classification, Error, Verdict};

#[test]
fn stress_matrix_runs() {
    let bbb = stress_matrix::run_example().unwrap();
    assert!(bbb.windows(2).all(|w| w[0] >= w[1]));
}

#[test]
fn ttc_portfolio_runs() {
    let r = ttc_portfolio::run_example().unwrap();
    assert!((r.ttc_pd.value() - 0.01198).abs() < 5e-5);
}

#[test]
fn spurious_projections_run() {
    let r = spurious_projections::run_example().unwrap();
    let classes: Vec<_> = r.iter().map(|(_, s)| s.classification).collect();
    assert_eq!(
        classes,
        [
            Classification::SpuriousRecession,
            Classification::SpuriousBoom,
            Classification::SpuriousRecession,
            Classification::MonotoneConvergent
        ]
    );
}

#[test]
fn macro_calibration_runs() {
    let m = macro_calibration::run_example().unwrap();
    assert_eq!(m.betas.len(), 3);
    assert!(m.r_squared > 0.5);
}

#[test]
fn counterexample_runs() {
    let e = counterexample::run_example().unwrap();
    assert!(matches!(
        e,
        Error::MaxIterations {
            period_two: true,
            ..
        }
    ));
}

#[test]
fn validation_report_runs() {
    let r = validation_report::run_example().unwrap();
    assert_eq!(r.verdict, Verdict::Warn("spurious-recession".into()));
}

#[test]
fn reconstruct_seasoned_runs() {
    let fit = reconstruct_seasoned::run_example().unwrap();
    assert!(fit.residual < 5e-4);
    assert!(fit.lower < fit.rho && fit.rho < fit.upper);
}
