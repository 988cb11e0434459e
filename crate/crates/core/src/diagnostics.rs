//! Consistency checks between a stress-test parameterisation and a book.
//!
//! The TTC portfolio is compared with the current one, and an unstressed
//! projection is classified: any PD excursion beyond both endpoints is a
//! boom or recession that the parameters create on their own.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{l1, linf};
use crate::propagation::{
    average_pd, project_zero_stress, OriginationVector, Portfolio, ProjectionPath,
};
use crate::transition::TransitionMatrix;
use crate::ttc::{
    primitivity, solve_ttc_iterative, verify_perron_structure, PerronReport, Primitivity,
    TtcResult, DEFAULT_MAX_ITER, DEFAULT_TOL,
};

pub const DEFAULT_BAND: f64 = 0.05;
pub const DEFAULT_HORIZON: usize = 50;

const MONOTONE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceReport {
    /// `w_current,i − w_ttc,i` per grade.
    pub differences: Vec<f64>,
    pub l1: f64,
    pub linf: f64,
    pub current_pd: f64,
    pub ttc_pd: f64,
}

pub fn compare_portfolios(
    current: &Portfolio,
    ttc: &Portfolio,
    t: &TransitionMatrix,
) -> Result<DivergenceReport> {
    if current.n() != ttc.n() {
        return Err(Error::DimensionMismatch {
            expected: ttc.n(),
            found: current.n(),
        });
    }
    let differences = current
        .weights()
        .iter()
        .zip(ttc.weights())
        .map(|(a, b)| a - b)
        .collect();
    Ok(DivergenceReport {
        differences,
        l1: l1(current.weights(), ttc.weights()),
        linf: linf(current.weights(), ttc.weights()),
        current_pd: average_pd(current, t)?.value(),
        ttc_pd: average_pd(ttc, t)?.value(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    /// `|a_t − a_m|` never increases.
    MonotoneConvergent,
    /// Non-monotone, but every excursion stays inside the band.
    WithinBand,
    SpuriousRecession,
    SpuriousBoom,
    Mixed,
}

impl Classification {
    pub fn is_spurious(self) -> bool {
        matches!(
            self,
            Self::SpuriousRecession | Self::SpuriousBoom | Self::Mixed
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::MonotoneConvergent => "monotone-convergent",
            Self::WithinBand => "within-band",
            Self::SpuriousRecession => "spurious-recession",
            Self::SpuriousBoom => "spurious-boom",
            Self::Mixed => "mixed",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpuriousReport {
    pub pds: Vec<f64>,
    pub min_pd: f64,
    pub min_period: usize,
    pub max_pd: f64,
    pub max_period: usize,
    pub terminal_pd: f64,
    pub band: f64,
    pub classification: Classification,
    /// First period with `|a_t − a_m| ≤ band·a_m`.
    pub first_within_band: Option<usize>,
}

/// Classifies the average-PD profile of a projection.
///
/// The terminal PD `a_m` stands in for the converged level. A maximum above
/// both endpoints by more than `band·a_m` marks a spurious recession, a
/// minimum below both by the same margin a spurious boom.
pub fn detect_spurious_dynamics(path: &ProjectionPath, band: f64) -> Result<SpuriousReport> {
    if path.points.len() < 2 {
        return Err(Error::PathTooShort(path.points.len()));
    }
    if !(band > 0.0 && band.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "band must be positive, got {band}"
        )));
    }
    let pds = path.avg_pds();
    let periods: Vec<usize> = path.points.iter().map(|p| p.period).collect();
    let first = pds[0];
    let terminal = *pds.last().expect("len >= 2");

    let (mut min_i, mut max_i) = (0, 0);
    for (i, &a) in pds.iter().enumerate() {
        if a < pds[min_i] {
            min_i = i;
        }
        if a > pds[max_i] {
            max_i = i;
        }
    }
    let (min_pd, max_pd) = (pds[min_i], pds[max_i]);
    let margin = band * terminal;

    let recession = max_pd > first && max_pd - first.max(terminal) > margin;
    let boom = first.min(terminal) - min_pd > margin;
    let classification = match (recession, boom) {
        (true, true) => Classification::Mixed,
        (true, false) => Classification::SpuriousRecession,
        (false, true) => Classification::SpuriousBoom,
        (false, false) => {
            let dist: Vec<f64> = pds.iter().map(|a| (a - terminal).abs()).collect();
            if dist.windows(2).all(|w| w[1] <= w[0] + MONOTONE_SLACK) {
                Classification::MonotoneConvergent
            } else {
                Classification::WithinBand
            }
        }
    };
    let first_within_band = pds
        .iter()
        .position(|a| (a - terminal).abs() <= margin)
        .map(|i| periods[i]);
    Ok(SpuriousReport {
        min_pd,
        min_period: periods[min_i],
        max_pd,
        max_period: periods[max_i],
        terminal_pd: terminal,
        band,
        classification,
        first_within_band,
        pds,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "reason", rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Warn(String),
    Fail(String),
}

impl Verdict {
    /// Process exit code: 0 pass, 1 warn, 2 fail.
    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Warn(_) => 1,
            Verdict::Fail(_) => 2,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Pass => f.write_str("pass"),
            Verdict::Warn(r) => write!(f, "warn: {r}"),
            Verdict::Fail(r) => write!(f, "fail: {r}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationOptions {
    pub horizon: usize,
    pub band: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        ValidationOptions {
            horizon: DEFAULT_HORIZON,
            band: DEFAULT_BAND,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub primitivity: Primitivity,
    pub ttc: Option<TtcResult>,
    pub divergence: Option<DivergenceReport>,
    pub perron: PerronReport,
    pub path: ProjectionPath,
    pub spurious: SpuriousReport,
    pub verdict: Verdict,
}

pub fn run_validation(
    current: &Portfolio,
    t: &TransitionMatrix,
    o: &OriginationVector,
    horizon: usize,
) -> Result<ValidationReport> {
    run_validation_with(
        current,
        t,
        o,
        ValidationOptions {
            horizon,
            ..Default::default()
        },
    )
}

/// Full parameter validation: existence conditions, TTC portfolio,
/// divergence from the current book, Perron structure and an unstressed
/// projection over `opts.horizon` periods.
pub fn run_validation_with(
    current: &Portfolio,
    t: &TransitionMatrix,
    o: &OriginationVector,
    opts: ValidationOptions,
) -> Result<ValidationReport> {
    if opts.horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    let prim = primitivity(&t.performing_block())?;
    let perron = verify_perron_structure(t, o)?;
    let path = project_zero_stress(current, t, o, opts.horizon)?;
    let spurious = detect_spurious_dynamics(&path, opts.band)?;

    let (ttc, divergence, verdict) = if !prim.is_primitive() {
        (None, None, Verdict::Fail("not primitive".into()))
    } else {
        match solve_ttc_iterative(t, o, opts.tol, opts.max_iter) {
            Ok(r) => {
                let div = compare_portfolios(current, &r.portfolio, t)?;
                let verdict = if spurious.classification.is_spurious() {
                    Verdict::Warn(spurious.classification.to_string())
                } else {
                    Verdict::Pass
                };
                (Some(r), Some(div), verdict)
            }
            Err(e @ Error::MaxIterations { .. }) => (None, None, Verdict::Fail(e.to_string())),
            Err(e) => return Err(e),
        }
    };
    Ok(ValidationReport {
        primitivity: prim,
        ttc,
        divergence,
        perron,
        path,
        spurious,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagation::PathPoint;
    use crate::sample;

    fn path_of(pds: &[f64]) -> ProjectionPath {
        ProjectionPath {
            points: pds
                .iter()
                .enumerate()
                .map(|(i, &a)| PathPoint {
                    period: i,
                    z: 0.0,
                    avg_pd: a,
                    default_flow: 0.0,
                    weights: vec![1.0, 0.0],
                })
                .collect(),
        }
    }

    #[test]
    fn classification_rules() {
        let c = |pds: &[f64]| {
            detect_spurious_dynamics(&path_of(pds), 0.05)
                .unwrap()
                .classification
        };
        assert_eq!(
            c(&[0.010, 0.011, 0.0115, 0.012]),
            Classification::MonotoneConvergent
        );
        assert_eq!(
            c(&[0.010, 0.020, 0.013, 0.012]),
            Classification::SpuriousRecession
        );
        assert_eq!(
            c(&[0.020, 0.005, 0.010, 0.012]),
            Classification::SpuriousBoom
        );
        assert_eq!(c(&[0.012, 0.020, 0.004, 0.012]), Classification::Mixed);
        assert_eq!(
            c(&[0.010, 0.0119, 0.0117, 0.012]),
            Classification::WithinBand
        );
    }

    #[test]
    fn extrema_and_crossing() {
        let r = detect_spurious_dynamics(&path_of(&[0.02, 0.01, 0.005, 0.009, 0.0101, 0.01]), 0.05)
            .unwrap();
        assert_eq!((r.min_pd, r.min_period), (0.005, 2));
        assert_eq!((r.max_pd, r.max_period), (0.02, 0));
        assert_eq!(r.first_within_band, Some(1));
        assert_eq!(r.classification, Classification::SpuriousBoom);
    }

    #[test]
    fn short_path_and_bad_band() {
        assert!(matches!(
            detect_spurious_dynamics(&path_of(&[0.01]), 0.05),
            Err(Error::PathTooShort(1))
        ));
        assert!(detect_spurious_dynamics(&path_of(&[0.01, 0.02]), 0.0).is_err());
    }

    #[test]
    fn identical_portfolios_have_zero_divergence() {
        let t = sample::agency_matrix();
        let w = sample::portfolio_seasoned();
        let d = compare_portfolios(&w, &w, &t).unwrap();
        assert!(d.differences.iter().all(|&x| x == 0.0));
        assert_eq!((d.l1, d.linf), (0.0, 0.0));
        assert_eq!(d.current_pd, d.ttc_pd);
    }

    #[test]
    fn validation_verdicts() {
        let t = sample::agency_matrix();
        let o = sample::agency_origination();
        let r = run_validation(&sample::portfolio_mid_grades(), &t, &o, 50).unwrap();
        assert_eq!(r.verdict, Verdict::Warn("spurious-recession".into()));
        assert_eq!(r.verdict.to_string(), "warn: spurious-recession");

        let ttc = r.ttc.as_ref().unwrap().portfolio.clone();
        let r = run_validation(&ttc, &t, &o, 50).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);

        let r = run_validation(
            &sample::periodic_portfolio(),
            &sample::periodic_matrix(),
            &sample::periodic_origination(),
            10,
        )
        .unwrap();
        assert_eq!(r.verdict.to_string(), "fail: not primitive");
        assert_eq!(r.verdict.exit_code(), 2);
        assert!(r.ttc.is_none());
    }
}
