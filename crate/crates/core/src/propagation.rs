//! Portfolio propagation with immediate write-off and replacement origination.
//!
//! One period maps `W' ↦ W'·T·I_w + (W'·T·V_w)·O'`: balances migrate, the
//! defaulted balance is written off, and the same amount is originated
//! again according to `O`. Total balance stays at one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::normal::Probability;
use crate::transition::{
    stress_transition_matrix, AssetCorrelation, EconomyState, TransitionMatrix,
};

/// Tolerance on the total weight of an input vector before it is rescaled.
pub const DEFAULT_SUM_TOL: f64 = 1e-6;

fn check_weights(w: &[f64], tol: f64) -> Result<f64> {
    if w.is_empty() {
        return Err(Error::InvalidArgument("empty weight vector".into()));
    }
    for (i, &v) in w.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "weight {v} at grade {} is not finite",
                i + 1
            )));
        }
        if v < 0.0 {
            return Err(Error::NegativeWeight {
                grade: i + 1,
                value: v,
            });
        }
    }
    let sum: f64 = w.iter().sum();
    if (sum - 1.0).abs() > tol {
        return Err(Error::VectorSum { sum, tol });
    }
    Ok(sum)
}

/// Share of total balance per rating grade; the last grade is default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Portfolio {
    weights: Vec<f64>,
}

impl Portfolio {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(weights, DEFAULT_SUM_TOL)
    }

    /// Accepts weights summing to one within `tol`, then rescales them.
    pub fn with_tolerance(mut weights: Vec<f64>, tol: f64) -> Result<Self> {
        let sum = check_weights(&weights, tol)?;
        weights.iter_mut().for_each(|v| *v /= sum);
        Ok(Portfolio { weights })
    }

    /// Embeds performing-grade weights, appending a zero default bucket.
    pub fn from_performing(performing: &[f64]) -> Result<Self> {
        let mut w = performing.to_vec();
        w.push(0.0);
        Self::new(w)
    }

    /// Uniform over the performing grades of an `n`-grade system.
    pub fn uniform_performing(n: usize) -> Self {
        let mut weights = vec![1.0 / (n - 1) as f64; n];
        weights[n - 1] = 0.0;
        Portfolio { weights }
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn performing(&self) -> &[f64] {
        &self.weights[..self.weights.len() - 1]
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.weights
    }
}

/// Mix of newly originated balance across grades; nothing goes into default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OriginationVector {
    weights: Vec<f64>,
}

impl OriginationVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(weights, DEFAULT_SUM_TOL)
    }

    pub fn with_tolerance(mut weights: Vec<f64>, tol: f64) -> Result<Self> {
        let sum = check_weights(&weights, tol)?;
        let last = *weights.last().expect("non-empty");
        if last != 0.0 {
            return Err(Error::OriginationIntoDefault(last));
        }
        weights.iter_mut().for_each(|v| *v /= sum);
        Ok(OriginationVector { weights })
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

fn check_dims(n: usize, found: usize) -> Result<()> {
    if n == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected: n, found })
    }
}

/// Raw propagation map on plain slices: returns the next weights and the
/// defaulted balance after migration.
pub(crate) fn step_weights(w: &[f64], t: &TransitionMatrix, o: &[f64]) -> (Vec<f64>, f64) {
    let n = t.n();
    let mut next = t.as_matrix().vec_mul(w);
    let defaulted = next[n - 1];
    next[n - 1] = 0.0;
    for (x, oj) in next.iter_mut().zip(o) {
        *x += defaulted * oj;
    }
    // Rows rounded by the publisher leak or create a little balance; the
    // model keeps the book at its original size.
    let mass: f64 = w.iter().sum();
    let total: f64 = next.iter().sum();
    if total > 0.0 && total != mass {
        let k = mass / total;
        next.iter_mut().for_each(|x| *x *= k);
    }
    (next, defaulted)
}

/// One period of migration, write-off and replacement origination.
pub fn propagate_step(
    w: &Portfolio,
    t_z: &TransitionMatrix,
    o: &OriginationVector,
) -> Result<(Portfolio, Probability)> {
    check_dims(t_z.n(), w.n())?;
    check_dims(t_z.n(), o.n())?;
    let (next, defaulted) = step_weights(&w.weights, t_z, &o.weights);
    Ok((
        Portfolio { weights: next },
        Probability::new(defaulted.clamp(0.0, 1.0))?,
    ))
}

/// Balance-weighted one-period PD, `Σ_i w_i·p_{i,n}`.
pub fn average_pd(w: &Portfolio, t: &TransitionMatrix) -> Result<Probability> {
    check_dims(t.n(), w.n())?;
    let pd = dot(&w.weights, &t.default_column());
    Probability::new(pd.clamp(0.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathPoint {
    pub period: usize,
    pub z: f64,
    /// Average PD of the portfolio at the end of the period, against the unstressed matrix.
    pub avg_pd: f64,
    /// Balance that defaulted during the period under `T(z)`.
    pub default_flow: f64,
    pub weights: Vec<f64>,
}

/// Initial state (period 0) followed by one point per projected period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionPath {
    pub points: Vec<PathPoint>,
}

impl ProjectionPath {
    /// Number of projected periods, excluding the initial state.
    pub fn periods(&self) -> usize {
        self.points.len().saturating_sub(1)
    }

    pub fn avg_pds(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.avg_pd).collect()
    }

    pub fn initial(&self) -> &PathPoint {
        &self.points[0]
    }

    pub fn terminal(&self) -> &PathPoint {
        self.points.last().expect("path has an initial point")
    }

    pub fn grades(&self) -> usize {
        self.points.first().map_or(0, |p| p.weights.len())
    }
}

/// Projects `w0` through the economy states in `z_path`.
///
/// Each period stresses `t` with the period's state and propagates; the
/// reported average PD is measured against the unstressed `t`.
pub fn project_path(
    w0: &Portfolio,
    t: &TransitionMatrix,
    o: &OriginationVector,
    rho: AssetCorrelation,
    z_path: &[EconomyState],
) -> Result<ProjectionPath> {
    if z_path.is_empty() {
        return Err(Error::InvalidArgument("empty economy path".into()));
    }
    check_dims(t.n(), w0.n())?;
    check_dims(t.n(), o.n())?;
    let pd_col = t.default_column();
    let mut points = Vec::with_capacity(z_path.len() + 1);
    points.push(PathPoint {
        period: 0,
        z: 0.0,
        avg_pd: dot(&w0.weights, &pd_col),
        default_flow: 0.0,
        weights: w0.weights.clone(),
    });
    let mut w = w0.weights.clone();
    for (k, &z) in z_path.iter().enumerate() {
        let t_z = stress_transition_matrix(t, rho, z);
        let (next, defaulted) = step_weights(&w, &t_z, &o.weights);
        w = next;
        points.push(PathPoint {
            period: k + 1,
            z: z.value(),
            avg_pd: dot(&w, &pd_col),
            default_flow: defaulted.clamp(0.0, 1.0),
            weights: w.clone(),
        });
    }
    Ok(ProjectionPath { points })
}

/// Unstressed projection over `horizon` periods.
pub fn project_zero_stress(
    w0: &Portfolio,
    t: &TransitionMatrix,
    o: &OriginationVector,
    horizon: usize,
) -> Result<ProjectionPath> {
    let rho = AssetCorrelation::new(0.0)?;
    project_path(w0, t, o, rho, &vec![EconomyState::NEUTRAL; horizon])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;

    fn three_grade() -> (TransitionMatrix, OriginationVector) {
        let t = TransitionMatrix::from_rows(&[
            vec![0.8, 0.1, 0.1],
            vec![0.0, 0.9, 0.1],
            vec![0.0, 0.0, 1.0],
        ])
        .unwrap();
        (t, OriginationVector::new(vec![0.5, 0.5, 0.0]).unwrap())
    }

    #[test]
    fn hand_computed_step() {
        let (t, o) = three_grade();
        let w = Portfolio::new(vec![1.0, 0.0, 0.0]).unwrap();
        let (w1, d) = propagate_step(&w, &t, &o).unwrap();
        // (0.8, 0.1, 0.1) -> write off 0.1 -> (0.8 + 0.05, 0.1 + 0.05, 0)
        assert!((w1.weights()[0] - 0.85).abs() < 1e-15);
        assert!((w1.weights()[1] - 0.15).abs() < 1e-15);
        assert_eq!(w1.weights()[2], 0.0);
        assert!((d.value() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn identity_migration_leaves_portfolio() {
        let t = TransitionMatrix::from_rows(&[
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ])
        .unwrap();
        let o = OriginationVector::new(vec![0.3, 0.7, 0.0]).unwrap();
        let w = Portfolio::new(vec![0.4, 0.6, 0.0]).unwrap();
        let (w1, d) = propagate_step(&w, &t, &o).unwrap();
        assert_eq!(w1, w);
        assert_eq!(d.value(), 0.0);
    }

    #[test]
    fn defaulted_start_is_reoriginated() {
        let (t, o) = three_grade();
        let w = Portfolio::new(vec![0.5, 0.0, 0.5]).unwrap();
        let (w1, d) = propagate_step(&w, &t, &o).unwrap();
        assert!((d.value() - 0.55).abs() < 1e-15);
        assert_eq!(w1.weights()[2], 0.0);
        assert!((w1.weights().iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch() {
        let (t, o) = three_grade();
        let w = Portfolio::new(vec![0.5, 0.5]).unwrap();
        assert!(matches!(
            propagate_step(&w, &t, &o),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(average_pd(&w, &t).is_err());
    }

    #[test]
    fn agency_average_pds() {
        let t = sample::agency_matrix();
        let cases = [
            (sample::portfolio_mid_grades(), 0.01161),
            (sample::portfolio_barbell(), 0.02725),
            (sample::portfolio_sub_investment(), 0.0183),
            (sample::portfolio_seasoned(), 0.01093),
        ];
        for (w, expected) in cases {
            let pd = average_pd(&w, &t).unwrap().value();
            assert!((pd - expected).abs() < 5e-5, "{pd} vs {expected}");
        }
    }

    #[test]
    fn vector_validation() {
        assert!(matches!(
            Portfolio::new(vec![0.5, 0.4, 0.0]),
            Err(Error::VectorSum { .. })
        ));
        assert!(matches!(
            Portfolio::new(vec![1.2, -0.2, 0.0]),
            Err(Error::NegativeWeight { grade: 2, .. })
        ));
        assert!(matches!(
            OriginationVector::new(vec![0.5, 0.4, 0.1]),
            Err(Error::OriginationIntoDefault(_))
        ));
    }

    #[test]
    fn path_records_initial_state() {
        let t = sample::agency_matrix();
        let o = sample::agency_origination();
        let path = project_zero_stress(&sample::portfolio_mid_grades(), &t, &o, 5).unwrap();
        assert_eq!(path.periods(), 5);
        assert_eq!(path.points[0].period, 0);
        assert!((path.points[0].avg_pd - 0.01161).abs() < 1e-12);
        assert!(project_path(
            &sample::portfolio_mid_grades(),
            &t,
            &o,
            AssetCorrelation::new(0.1).unwrap(),
            &[]
        )
        .is_err());
    }
}
