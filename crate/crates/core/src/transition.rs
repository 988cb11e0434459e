//! Rating transition matrices and the one-factor PIT transform.
//!
//! A borrower's asset return is `√ρ·Z + √(1−ρ)·ε`. Conditioning on the
//! systematic factor `Z = z` shifts every migration threshold, which turns a
//! through-the-cycle probability `p` into
//! `Φ((Φ⁻¹(p) − √ρ·z) / √(1−ρ))`. Applying the same shift to the cumulative
//! tails of each matrix row gives the stressed matrix `T(z)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::normal::{norm_cdf, norm_inv_cdf, Probability};

/// Default absolute tolerance on row sums accepted by validation.
///
/// Published matrices are usually rounded to four decimals, so row sums can
/// be off by a few `1e-4`.
pub const DEFAULT_ROW_TOL: f64 = 1e-3;

/// Entries this close below zero after stressing are treated as rounding noise.
const CLAMP_TOL: f64 = 1e-12;

/// Asset correlation `ρ ∈ [0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct AssetCorrelation(f64);

impl AssetCorrelation {
    pub fn new(rho: f64) -> Result<Self> {
        if (0.0..1.0).contains(&rho) {
            Ok(AssetCorrelation(rho))
        } else {
            Err(Error::InvalidArgument(format!(
                "asset correlation {rho} outside [0, 1)"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for AssetCorrelation {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        AssetCorrelation::new(v)
    }
}

impl From<AssetCorrelation> for f64 {
    fn from(r: AssetCorrelation) -> f64 {
        r.0
    }
}

/// Realisation of the systematic factor; negative values are recessions.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct EconomyState(f64);

impl EconomyState {
    pub const NEUTRAL: EconomyState = EconomyState(0.0);

    pub fn new(z: f64) -> Result<Self> {
        if z.is_finite() {
            Ok(EconomyState(z))
        } else {
            Err(Error::InvalidArgument(format!(
                "economy state {z} is not finite"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for EconomyState {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        EconomyState::new(v)
    }
}

impl From<EconomyState> for f64 {
    fn from(z: EconomyState) -> f64 {
        z.0
    }
}

/// What validation does with a row whose sum is within tolerance of one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowSums {
    /// Divide the row by its sum.
    #[default]
    Renormalize,
    /// Keep the entries as given. Propagation still conserves total balance.
    Preserve,
}

/// Row-stochastic matrix whose last grade is an absorbing default state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransitionMatrix {
    m: Matrix,
}

impl TransitionMatrix {
    /// Validates with [`DEFAULT_ROW_TOL`] and renormalises rows.
    pub fn new(raw: &Matrix) -> Result<Self> {
        Self::validate(raw, DEFAULT_ROW_TOL, RowSums::Renormalize)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(&Matrix::from_rows(rows)?)
    }

    pub fn validate(raw: &Matrix, tol: f64, policy: RowSums) -> Result<Self> {
        let n = raw.rows();
        if raw.cols() != n {
            return Err(Error::NotSquare {
                rows: n,
                row: 1,
                cols: raw.cols(),
            });
        }
        if n < 2 {
            return Err(Error::TooFewGrades(n));
        }
        for i in 0..n {
            for j in 0..n {
                let v = raw[(i, j)];
                if !v.is_finite() {
                    return Err(Error::NonFiniteEntry {
                        row: i + 1,
                        col: j + 1,
                    });
                }
                if v < 0.0 {
                    return Err(Error::NegativeEntry {
                        row: i + 1,
                        col: j + 1,
                        value: v,
                    });
                }
            }
        }
        let last = raw.row(n - 1);
        for (j, &v) in last.iter().enumerate() {
            let expected = if j == n - 1 { 1.0 } else { 0.0 };
            if v != expected {
                return Err(Error::DefaultNotAbsorbing {
                    col: j + 1,
                    value: v,
                });
            }
        }
        let mut m = raw.clone();
        for i in 0..n - 1 {
            let sum: f64 = m.row(i).iter().sum();
            if (sum - 1.0).abs() > tol {
                return Err(Error::RowSum {
                    row: i + 1,
                    sum,
                    tol,
                });
            }
            if policy == RowSums::Renormalize {
                m.row_mut(i).iter_mut().for_each(|v| *v /= sum);
            }
        }
        Ok(TransitionMatrix { m })
    }

    /// Number of grades including default.
    pub fn n(&self) -> usize {
        self.m.rows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[(i, j)]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.m.row(i)
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.m
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.m.to_rows()
    }

    /// One-period default probability per grade (last column).
    pub fn default_column(&self) -> Vec<f64> {
        self.m.column(self.n() - 1)
    }

    /// Transitions among performing grades, `(n−1)×(n−1)`.
    pub fn performing_block(&self) -> Matrix {
        let m = self.n() - 1;
        let mut out = Matrix::zeros(m, m);
        for i in 0..m {
            out.row_mut(i).copy_from_slice(&self.m.row(i)[..m]);
        }
        out
    }

    /// Stressed matrix `T(z)`, see [`stress_transition_matrix`].
    pub fn stressed(&self, rho: AssetCorrelation, z: EconomyState) -> TransitionMatrix {
        stress_transition_matrix(self, rho, z)
    }
}

/// Validates a raw matrix with the given row-sum tolerance, renormalising rows.
pub fn validate_transition_matrix(raw: &Matrix, tol: f64) -> Result<TransitionMatrix> {
    TransitionMatrix::validate(raw, tol, RowSums::Renormalize)
}

#[inline]
fn shift(p: f64, sqrt_rho: f64, sqrt_idio: f64, z: f64) -> f64 {
    if p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }
    norm_cdf((norm_inv_cdf(p) - sqrt_rho * z) / sqrt_idio)
}

/// PIT default probability conditional on the economy state.
pub fn pit_pd(p_ttc: Probability, rho: AssetCorrelation, z: EconomyState) -> Probability {
    let (p, r, z) = (p_ttc.value(), rho.value(), z.value());
    if r == 0.0 || z == 0.0 {
        return p_ttc;
    }
    // shift() stays in [0, 1]
    Probability::new(shift(p, r.sqrt(), (1.0 - r).sqrt(), z)).unwrap_or(p_ttc)
}

/// Stresses every row through its cumulative tails.
///
/// With `S_j = Σ_{l≥j} p_{i,l}`, each tail `j ≥ 2` is moved by the PIT
/// transform while `S_1 ≡ 1` and `S_{n+1} ≡ 0`, so the stressed entries
/// `S_j(z) − S_{j+1}(z)` telescope to a unit row sum.
pub fn stress_transition_matrix(
    t: &TransitionMatrix,
    rho: AssetCorrelation,
    z: EconomyState,
) -> TransitionMatrix {
    let (r, z) = (rho.value(), z.value());
    if r == 0.0 || z == 0.0 {
        return t.clone();
    }
    let n = t.n();
    let sqrt_rho = r.sqrt();
    let sqrt_idio = (1.0 - r).sqrt();
    let mut out = Matrix::zeros(n, n);
    let mut tails = vec![0.0; n + 1];
    for i in 0..n - 1 {
        let row = t.row(i);
        // raw cumulative tails, right to left
        let mut acc = 0.0;
        for j in (1..n).rev() {
            acc += row[j];
            tails[j] = shift(acc.min(1.0), sqrt_rho, sqrt_idio, z);
        }
        tails[0] = 1.0;
        tails[n] = 0.0;
        let dst = out.row_mut(i);
        let mut clamped = false;
        for j in 0..n {
            let v = tails[j] - tails[j + 1];
            dst[j] = if v < 0.0 {
                debug_assert!(v > -CLAMP_TOL, "stressed entry {v}");
                clamped = true;
                0.0
            } else {
                v
            };
        }
        if clamped {
            let s: f64 = dst.iter().sum();
            dst.iter_mut().for_each(|v| *v /= s);
        }
    }
    out[(n - 1, n - 1)] = 1.0;
    TransitionMatrix { m: out }
}
