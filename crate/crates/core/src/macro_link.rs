//! Link between macroeconomic scenarios and the systematic factor.
//!
//! A credit index `C_t` is read as a realised PIT default rate, so its
//! probit `Φ⁻¹(C_t) = (Φ⁻¹(p) − √ρ·z_t)/√(1−ρ)`. The moments of the
//! probit series give `(p, ρ)`; a linear regression of the probit on lagged
//! macro variables gives the predictor, and inverting the relation above
//! maps a scenario row to an economy state.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{solve, Matrix};
use crate::normal::{norm_cdf, norm_inv_cdf, Probability};
use crate::transition::{AssetCorrelation, EconomyState};

const RANK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CreditIndexSeries {
    pub labels: Vec<String>,
    pub values: Vec<f64>,
}

impl CreditIndexSeries {
    pub fn new(labels: Vec<String>, values: Vec<f64>) -> Result<Self> {
        if labels.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: labels.len(),
                found: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "credit index value at {} is not finite",
                i + 1
            )));
        }
        Ok(CreditIndexSeries { labels, values })
    }

    /// Series with labels `1..=N`.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        let labels = (1..=values.len()).map(|i| i.to_string()).collect();
        Self::new(labels, values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn probits(&self) -> Result<Vec<f64>> {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                if c > 0.0 && c < 1.0 {
                    Ok(norm_inv_cdf(c))
                } else {
                    Err(Error::BoundaryValue {
                        index: i + 1,
                        value: c,
                    })
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MacroScenario {
    pub labels: Vec<String>,
    pub variables: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl MacroScenario {
    pub fn new(labels: Vec<String>, variables: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        if labels.len() != rows.len() {
            return Err(Error::DimensionMismatch {
                expected: labels.len(),
                found: rows.len(),
            });
        }
        if variables.is_empty() {
            return Err(Error::InvalidArgument(
                "scenario has no macro variables".into(),
            ));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != variables.len() {
                return Err(Error::Ragged {
                    line: i + 1,
                    expected: variables.len(),
                    found: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "missing or non-finite value in row {}",
                    i + 1
                )));
            }
        }
        Ok(MacroScenario {
            labels,
            variables,
            rows,
        })
    }

    pub fn k(&self) -> usize {
        self.variables.len()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MacroModel {
    /// Intercept followed by one coefficient per macro variable.
    pub betas: Vec<f64>,
    pub lag: usize,
    pub p: Probability,
    pub rho: AssetCorrelation,
    pub r_squared: f64,
    pub residual_variance: f64,
    pub observations: usize,
}

/// Method-of-moments `(p, ρ)` from the probit of the index.
///
/// With `m` and `v` the mean and sample variance (divisor `N − 1`) of
/// `Φ⁻¹(C_t)`: `ρ = v/(1+v)` and `p = Φ(m·√(1−ρ))`.
pub fn estimate_p_rho(series: &CreditIndexSeries) -> Result<(Probability, AssetCorrelation)> {
    if series.len() < 2 {
        return Err(Error::InsufficientObservations {
            needed: 2,
            have: series.len(),
        });
    }
    let y = series.probits()?;
    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    let var = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let rho = var / (1.0 + var);
    let p = norm_cdf(mean * (1.0 - rho).sqrt());
    Ok((Probability::new(p)?, AssetCorrelation::new(rho)?))
}

/// Least squares of `Φ⁻¹(C_t)` on `(1, X_{·,t−lag})` through the normal equations.
///
/// Series and scenario are aligned by row; row `t` of the index pairs with
/// row `t − lag` of the scenario.
pub fn fit_macro_model(
    series: &CreditIndexSeries,
    scenario: &MacroScenario,
    lag: usize,
) -> Result<MacroModel> {
    if series.len() != scenario.len() {
        return Err(Error::DimensionMismatch {
            expected: series.len(),
            found: scenario.len(),
        });
    }
    let k = scenario.k();
    let obs = series.len().saturating_sub(lag);
    if obs < k + 2 {
        return Err(Error::InsufficientObservations {
            needed: k + 2 + lag,
            have: series.len(),
        });
    }
    let y_all = series.probits()?;
    let y = &y_all[lag..];
    let design: Vec<Vec<f64>> = (lag..series.len())
        .map(|t| {
            let mut row = Vec::with_capacity(k + 1);
            row.push(1.0);
            row.extend_from_slice(&scenario.rows[t - lag]);
            row
        })
        .collect();

    let dim = k + 1;
    let mut xtx = Matrix::zeros(dim, dim);
    let mut xty = vec![0.0; dim];
    for (x, &yt) in design.iter().zip(y) {
        for a in 0..dim {
            xty[a] += x[a] * yt;
            for b in 0..dim {
                xtx[(a, b)] += x[a] * x[b];
            }
        }
    }
    let betas = solve(&xtx, &xty, RANK_TOL).map_err(|e| match e {
        Error::Singular(_) => Error::RankDeficient,
        other => other,
    })?;

    let mean_y = y.iter().sum::<f64>() / obs as f64;
    let (mut ssr, mut sst) = (0.0, 0.0);
    for (x, &yt) in design.iter().zip(y) {
        let fitted: f64 = x.iter().zip(&betas).map(|(a, b)| a * b).sum();
        ssr += (yt - fitted).powi(2);
        sst += (yt - mean_y).powi(2);
    }
    let r_squared = if sst > 0.0 { 1.0 - ssr / sst } else { 1.0 };
    let (p, rho) = estimate_p_rho(series)?;
    Ok(MacroModel {
        betas,
        lag,
        p,
        rho,
        r_squared,
        residual_variance: ssr / (obs - dim) as f64,
        observations: obs,
    })
}

impl MacroModel {
    /// `β₀ + Σ β_i·x_i`.
    pub fn predictor(&self, macro_row: &[f64]) -> Result<f64> {
        if macro_row.len() + 1 != self.betas.len() {
            return Err(Error::DimensionMismatch {
                expected: self.betas.len() - 1,
                found: macro_row.len(),
            });
        }
        Ok(self.betas[0]
            + self.betas[1..]
                .iter()
                .zip(macro_row)
                .map(|(b, x)| b * x)
                .sum::<f64>())
    }

    /// State whose PIT default probability has probit `y`.
    pub fn state_for_probit(&self, y: f64) -> Result<EconomyState> {
        let rho = self.rho.value();
        if rho == 0.0 {
            return Err(Error::NoSystematicRisk);
        }
        EconomyState::new((norm_inv_cdf(self.p.value()) - (1.0 - rho).sqrt() * y) / rho.sqrt())
    }
}

/// Economy state implied by one scenario row.
pub fn economy_state(model: &MacroModel, macro_row: &[f64]) -> Result<EconomyState> {
    model.state_for_probit(model.predictor(macro_row)?)
}

/// One state per scenario row; row `r` drives period `r + lag`.
pub fn economy_path(model: &MacroModel, scenario: &MacroScenario) -> Result<Vec<EconomyState>> {
    scenario
        .rows
        .iter()
        .map(|row| economy_state(model, row))
        .collect()
}
