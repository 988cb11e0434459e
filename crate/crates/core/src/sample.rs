//! Bundled sample inputs: an eight-grade agency-style migration matrix, the
//! matching origination mix, four starting portfolios with very different
//! consistency with that matrix, and a three-grade periodic system for
//! which no TTC portfolio exists.
//!
//! The same values ship as CSV files under `data/`.

use crate::linalg::Matrix;
use crate::propagation::{OriginationVector, Portfolio};
use crate::transition::{RowSums, TransitionMatrix, DEFAULT_ROW_TOL};

pub fn agency_matrix_rows() -> Vec<Vec<f64>> {
    vec![
        vec![
            0.9276, 0.0662, 0.0050, 0.0009, 0.0003, 0.0000, 0.0000, 0.0000,
        ],
        vec![
            0.0064, 0.9152, 0.0700, 0.0062, 0.0008, 0.0011, 0.0002, 0.0001,
        ],
        vec![
            0.0007, 0.0221, 0.9137, 0.0546, 0.0058, 0.0024, 0.0003, 0.0005,
        ],
        vec![
            0.0005, 0.0029, 0.0550, 0.8753, 0.0506, 0.0108, 0.0021, 0.0029,
        ],
        vec![
            0.0002, 0.0011, 0.0052, 0.0712, 0.8229, 0.0741, 0.0111, 0.0141,
        ],
        vec![
            0.0000, 0.0010, 0.0035, 0.0047, 0.0588, 0.8323, 0.0385, 0.0612,
        ],
        vec![
            0.0012, 0.0000, 0.0029, 0.0053, 0.0157, 0.1121, 0.6238, 0.2389,
        ],
        vec![
            0.0000, 0.0000, 0.0000, 0.0000, 0.0000, 0.0000, 0.0000, 1.0000,
        ],
    ]
}

/// The agency matrix with its four-decimal entries kept as published.
pub fn agency_matrix() -> TransitionMatrix {
    let raw = Matrix::from_rows(&agency_matrix_rows()).expect("rectangular");
    TransitionMatrix::validate(&raw, DEFAULT_ROW_TOL, RowSums::Preserve).expect("valid sample")
}

pub fn agency_origination() -> OriginationVector {
    OriginationVector::new(vec![0.0, 0.20, 0.30, 0.30, 0.20, 0.0, 0.0, 0.0]).expect("valid sample")
}

/// Mid-grade book with nothing in the two best grades.
pub fn portfolio_mid_grades() -> Portfolio {
    Portfolio::new(vec![0.0, 0.0, 0.20, 0.40, 0.30, 0.10, 0.0, 0.0]).expect("valid sample")
}

/// Barbell book: mostly top grade plus a weak tail.
pub fn portfolio_barbell() -> Portfolio {
    Portfolio::new(vec![0.70, 0.0, 0.0, 0.0, 0.0, 0.25, 0.05, 0.0]).expect("valid sample")
}

/// Book concentrated around grade five.
pub fn portfolio_sub_investment() -> Portfolio {
    Portfolio::new(vec![0.01, 0.02, 0.10, 0.30, 0.41, 0.15, 0.01, 0.0]).expect("valid sample")
}

/// One mildly benign period away from the TTC portfolio.
pub fn portfolio_seasoned() -> Portfolio {
    Portfolio::new(vec![
        0.0199, 0.1516, 0.3472, 0.2568, 0.1263, 0.0857, 0.0125, 0.0,
    ])
    .expect("valid sample")
}

/// Performing grades swap every period; no defaults.
pub fn periodic_matrix() -> TransitionMatrix {
    TransitionMatrix::from_rows(&[
        vec![0.0, 1.0, 0.0],
        vec![1.0, 0.0, 0.0],
        vec![0.0, 0.0, 1.0],
    ])
    .expect("valid sample")
}

pub fn periodic_origination() -> OriginationVector {
    OriginationVector::new(vec![0.5, 0.5, 0.0]).expect("valid sample")
}

pub fn periodic_portfolio() -> Portfolio {
    Portfolio::new(vec![1.0, 0.0, 0.0]).expect("valid sample")
}
