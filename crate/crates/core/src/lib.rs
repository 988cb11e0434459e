//! Stress-testing engine for rating-migration credit portfolios.
//!
//! Through-the-cycle transition matrices are shifted to point-in-time
//! matrices with the one-factor model, portfolios are propagated with
//! write-off and replacement origination, and the unique TTC portfolio
//! implied by a parameterisation is computed and compared with the current
//! book to expose PD dynamics that come from the parameters rather than
//! from the scenario.
//!
//! The `io` module reads and writes the CSV, JSON and SVG formats and `cli`
//! drives everything from the `ttc-stress` binary. `sample` bundles the
//! eight-grade agency data used throughout the examples.

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod io;
pub mod linalg;
pub mod macro_link;
pub mod normal;
pub mod propagation;
pub mod sample;
pub mod transition;
pub mod ttc;

pub use diagnostics::{
    compare_portfolios, detect_spurious_dynamics, run_validation, run_validation_with,
    Classification, DivergenceReport, SpuriousReport, ValidationOptions, ValidationReport, Verdict,
};
pub use error::{Error, Result};
pub use linalg::Matrix;
pub use macro_link::{
    economy_path, economy_state, estimate_p_rho, fit_macro_model, CreditIndexSeries, MacroModel,
    MacroScenario,
};
pub use normal::{norm_cdf, norm_inv_cdf, std_normal_cdf, std_normal_inv_cdf, Probability};
pub use propagation::{
    average_pd, project_path, project_zero_stress, propagate_step, OriginationVector, PathPoint,
    Portfolio, ProjectionPath,
};
pub use transition::{
    pit_pd, stress_transition_matrix, validate_transition_matrix, AssetCorrelation, EconomyState,
    RowSums, TransitionMatrix,
};
pub use ttc::{
    build_m_p, is_primitive, solve_ttc_direct, solve_ttc_iterative, solve_ttc_iterative_from,
    verify_perron_structure, IterationOptions, PerronReport, TtcResult,
};
