//! The through-the-cycle portfolio implied by a matrix and an origination mix.
//!
//! Restricted to performing grades, one unstressed propagation step is the
//! linear map `M_p` with `m_{j,i} = p_{i,j} + o_j·p_{i,n}`. Its columns are
//! the rows of `T` with the default mass redistributed by `O`, so they sum
//! to one and the Perron root is one. When the performing block `T_p` is
//! primitive, so is `M_p`, its Perron vector is the unique TTC portfolio,
//! and iterating the propagation from any start converges to it
//! geometrically at rate `|λ₂|`.
//!
//! Matrices kept with published (rounded) row sums give column sums that
//! are only close to one. Propagation rescales to unit balance, so the
//! fixed point is still the Perron vector of `M_p`, now for a root `λ_pf`
//! close to one. The direct solver handles both cases.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, l1, linf, solve, Matrix};
use crate::normal::Probability;
use crate::propagation::{average_pd, step_weights, OriginationVector, Portfolio};
use crate::transition::TransitionMatrix;

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 100_000;
// deltas below this carry mostly rounding noise
const RATIO_FLOOR: f64 = 1e-11;
const RATIO_WINDOW: usize = 40;

const PIVOT_TOL: f64 = 1e-13;
const COLUMN_SUM_TOL: f64 = 1e-12;
const RESIDUAL_TOL: f64 = 1e-10;
const NEGATIVE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TtcResult {
    pub portfolio: Portfolio,
    pub iterations: usize,
    /// L1 distance between the last two iterates.
    pub final_step_delta: f64,
    pub ttc_pd: Probability,
    /// Geometric decay rate of the last L1 deltas; estimates `|λ₂|`.
    pub contraction_ratio: f64,
}

/// Where the Wielandt power of the sign pattern has a zero, if anywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Primitivity {
    pub exponent: usize,
    /// 1-based `(row, col)`.
    pub first_zero: Option<(usize, usize)>,
}

impl Primitivity {
    pub fn is_primitive(&self) -> bool {
        self.first_zero.is_none()
    }
}

fn bool_mul(a: &[bool], b: &[bool], m: usize) -> Vec<bool> {
    let mut out = vec![false; m * m];
    for i in 0..m {
        for k in 0..m {
            if !a[i * m + k] {
                continue;
            }
            for j in 0..m {
                out[i * m + j] |= b[k * m + j];
            }
        }
    }
    out
}

/// Raises the positivity pattern of `tp` to the Wielandt bound `m² − 2m + 2`.
pub fn primitivity(tp: &Matrix) -> Result<Primitivity> {
    let m = tp.rows();
    if tp.cols() != m {
        return Err(Error::NotSquare {
            rows: m,
            row: 1,
            cols: tp.cols(),
        });
    }
    if m == 0 {
        return Err(Error::InvalidArgument("empty performing block".into()));
    }
    let mut pattern = vec![false; m * m];
    for i in 0..m {
        for j in 0..m {
            let v = tp[(i, j)];
            if v < 0.0 || v.is_nan() {
                return Err(Error::NegativeEntry {
                    row: i + 1,
                    col: j + 1,
                    value: v,
                });
            }
            pattern[i * m + j] = v > 0.0;
        }
    }
    let exponent = m * m + 2 - 2 * m;
    // square-and-multiply on the boolean pattern
    let mut result: Option<Vec<bool>> = None;
    let mut base = pattern;
    let mut e = exponent;
    while e > 0 {
        if e & 1 == 1 {
            result = Some(match result {
                None => base.clone(),
                Some(r) => bool_mul(&r, &base, m),
            });
        }
        e >>= 1;
        if e > 0 {
            base = bool_mul(&base, &base, m);
        }
    }
    let power = result.expect("exponent >= 1");
    let first_zero = power
        .iter()
        .position(|&b| !b)
        .map(|k| (k / m + 1, k % m + 1));
    Ok(Primitivity {
        exponent,
        first_zero,
    })
}

pub fn is_primitive(tp: &Matrix) -> Result<bool> {
    Ok(primitivity(tp)?.is_primitive())
}

fn check_inputs(t: &TransitionMatrix, o: &OriginationVector) -> Result<()> {
    if o.n() != t.n() {
        return Err(Error::DimensionMismatch {
            expected: t.n(),
            found: o.n(),
        });
    }
    let on = o.weights()[o.n() - 1];
    if on != 0.0 {
        return Err(Error::OriginationIntoDefault(on));
    }
    Ok(())
}

fn require_primitive(t: &TransitionMatrix) -> Result<()> {
    let p = primitivity(&t.performing_block())?;
    match p.first_zero {
        None => Ok(()),
        Some((row, col)) => Err(Error::NotPrimitive {
            exponent: p.exponent,
            row,
            col,
        }),
    }
}

/// Performing-grade propagation matrix, `m_{j,i} = p_{i,j} + o_j·p_{i,n}`.
pub fn build_m_p(t: &TransitionMatrix, o: &OriginationVector) -> Result<Matrix> {
    check_inputs(t, o)?;
    let n = t.n();
    let m = n - 1;
    let ow = o.weights();
    let mut mp = Matrix::zeros(m, m);
    for i in 0..m {
        let pd = t.get(i, n - 1);
        for j in 0..m {
            mp[(j, i)] = t.get(i, j) + ow[j] * pd;
        }
    }
    Ok(mp)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Reject inputs that violate the existence conditions before iterating.
    pub check_conditions: bool,
}

impl Default for IterationOptions {
    fn default() -> Self {
        IterationOptions {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            check_conditions: true,
        }
    }
}

/// Iterates unstressed propagation from the uniform performing portfolio.
pub fn solve_ttc_iterative(
    t: &TransitionMatrix,
    o: &OriginationVector,
    tol: f64,
    max_iter: usize,
) -> Result<TtcResult> {
    let opts = IterationOptions {
        tol,
        max_iter,
        check_conditions: true,
    };
    solve_ttc_iterative_from(t, o, &Portfolio::uniform_performing(t.n()), opts)
}

pub fn solve_ttc_iterative_from(
    t: &TransitionMatrix,
    o: &OriginationVector,
    start: &Portfolio,
    opts: IterationOptions,
) -> Result<TtcResult> {
    check_inputs(t, o)?;
    if start.n() != t.n() {
        return Err(Error::DimensionMismatch {
            expected: t.n(),
            found: start.n(),
        });
    }
    if opts.check_conditions {
        require_primitive(t)?;
    }
    let mut older: Option<Vec<f64>> = None;
    let mut prev = start.weights().to_vec();
    let mut last_delta = f64::INFINITY;
    let mut two_step_delta = f64::INFINITY;
    let mut recent: VecDeque<f64> = VecDeque::with_capacity(RATIO_WINDOW);
    for iter in 1..=opts.max_iter {
        let (next, _) = step_weights(&prev, t, o.weights());
        let delta = l1(&next, &prev);
        if let Some(w) = &older {
            two_step_delta = l1(&next, w);
        }
        if delta > RATIO_FLOOR {
            if recent.len() == RATIO_WINDOW {
                recent.pop_front();
            }
            recent.push_back(delta);
        }
        if delta < opts.tol {
            let portfolio = Portfolio::new(next)?;
            let ttc_pd = average_pd(&portfolio, t)?;
            return Ok(TtcResult {
                portfolio,
                iterations: iter,
                final_step_delta: delta,
                ttc_pd,
                contraction_ratio: log_slope_ratio(&recent),
            });
        }
        last_delta = delta;
        older = Some(std::mem::replace(&mut prev, next));
    }
    Err(Error::MaxIterations {
        iterations: opts.max_iter,
        last_delta,
        two_step_delta,
        period_two: two_step_delta < opts.tol.max(1e-9) && last_delta >= opts.tol,
    })
}

/// `exp` of the least-squares slope of `ln δ_k`; robust to the wobble a
/// complex subdominant pair puts on single ratios.
fn log_slope_ratio(deltas: &VecDeque<f64>) -> f64 {
    let k = deltas.len();
    if k < 2 {
        return 0.0;
    }
    let xm = (k - 1) as f64 / 2.0;
    let ym = deltas.iter().map(|d| d.ln()).sum::<f64>() / k as f64;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, d) in deltas.iter().enumerate() {
        let x = i as f64 - xm;
        sxy += x * (d.ln() - ym);
        sxx += x * x;
    }
    (sxy / sxx).exp()
}

/// Perron root and right eigenvector (entries summing to one), by Newton's
/// method on the bordered system `(M − λI)w = 0`, `Σw = 1`, from `λ = 1`.
fn perron_pair(mp: &Matrix) -> Result<(Vec<f64>, f64)> {
    let m = mp.rows();
    // bordered linear solve at λ = 1: replace the last equation by Σw = 1
    let mut a = mp.clone();
    for i in 0..m {
        a[(i, i)] -= 1.0;
    }
    for j in 0..m {
        a[(m - 1, j)] = 1.0;
    }
    let mut rhs = vec![0.0; m];
    rhs[m - 1] = 1.0;
    let mut w = solve(&a, &rhs, PIVOT_TOL)?;
    let mut lambda = 1.0;
    for _ in 0..50 {
        let mw = mp.mul_vec(&w);
        let resid: Vec<f64> = mw.iter().zip(&w).map(|(a, b)| a - lambda * b).collect();
        let sum_resid = w.iter().sum::<f64>() - 1.0;
        let scale = mw.iter().fold(1.0f64, |s, v| s.max(v.abs()));
        if resid.iter().all(|r| r.abs() <= 1e-15 * scale) && sum_resid.abs() <= 1e-15 {
            break;
        }
        // Jacobian [[M − λI, −w], [1', 0]]
        let mut jac = Matrix::zeros(m + 1, m + 1);
        for i in 0..m {
            for j in 0..m {
                jac[(i, j)] = mp[(i, j)] - if i == j { lambda } else { 0.0 };
            }
            jac[(i, m)] = -w[i];
            jac[(m, i)] = 1.0;
        }
        let mut f: Vec<f64> = resid.iter().map(|r| -r).collect();
        f.push(-sum_resid);
        let step = solve(&jac, &f, PIVOT_TOL)?;
        let change = step.iter().fold(0.0f64, |s, v| s.max(v.abs()));
        for (wi, d) in w.iter_mut().zip(&step) {
            *wi += d;
        }
        lambda += step[m];
        if change <= 1e-16 {
            break;
        }
    }
    Ok((w, lambda))
}

fn embed_positive(w: Vec<f64>) -> Result<Portfolio> {
    for (i, &v) in w.iter().enumerate() {
        if v < -NEGATIVE_TOL || v.is_nan() {
            return Err(Error::NonPositiveComponent {
                index: i + 1,
                value: v,
            });
        }
    }
    let clamped: Vec<f64> = w.into_iter().map(|v| v.max(0.0)).collect();
    let total: f64 = clamped.iter().sum();
    Portfolio::from_performing(&clamped.iter().map(|v| v / total).collect::<Vec<_>>())
}

/// Solves for the TTC portfolio as the Perron vector of `M_p`.
pub fn solve_ttc_direct(t: &TransitionMatrix, o: &OriginationVector) -> Result<Portfolio> {
    check_inputs(t, o)?;
    require_primitive(t)?;
    let mp = build_m_p(t, o)?;
    let (w, _) = perron_pair(&mp)?;
    embed_positive(w)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerronReport {
    pub primitive: bool,
    pub column_sums: Vec<f64>,
    pub column_sums_ok: bool,
    pub perron_root: Option<f64>,
    /// `‖M_p·w − λ_pf·w‖∞` at the direct solution.
    pub residual: Option<f64>,
    pub residual_ok: bool,
    pub second_eigenvalue_modulus: f64,
    pub spectral_gap_ok: bool,
}

impl PerronReport {
    pub fn passed(&self) -> bool {
        self.primitive && self.residual_ok && self.spectral_gap_ok
    }
}

/// Estimates `|λ₂|` by power iteration on the complement of the Perron
/// direction: each iterate is projected with `v ← v − (u·v)·w`, where
/// `u` is the left Perron vector scaled so that `u·w = 1`.
fn second_modulus(mp: &Matrix, w: &[f64], u: &[f64]) -> f64 {
    let m = mp.rows();
    if m < 2 {
        return 0.0;
    }
    let deflate = |v: &mut Vec<f64>| {
        let c = dot(u, v);
        for (vi, wi) in v.iter_mut().zip(w) {
            *vi -= c * wi;
        }
    };
    let mut v: Vec<f64> = (0..m)
        .map(|i| ((i as f64) * 1.618_033_988_75 + 0.3).sin())
        .collect();
    deflate(&mut v);
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let n0 = norm(&v);
    if n0 == 0.0 {
        return 0.0;
    }
    v.iter_mut().for_each(|x| *x /= n0);
    const STEPS: usize = 4000;
    let mut log_growth = 0.0;
    let mut counted = 0usize;
    for k in 0..STEPS {
        let mut next = mp.mul_vec(&v);
        deflate(&mut next);
        let nrm = norm(&next);
        if nrm < 1e-300 {
            return 0.0;
        }
        if k >= STEPS / 2 {
            log_growth += nrm.ln();
            counted += 1;
        }
        v = next.into_iter().map(|x| x / nrm).collect();
    }
    (log_growth / counted as f64).exp()
}

/// Checks the structure behind the TTC portfolio: column sums of `M_p`,
/// the eigen-residual at the direct solution and the modulus of the
/// subdominant eigenvalue.
pub fn verify_perron_structure(
    t: &TransitionMatrix,
    o: &OriginationVector,
) -> Result<PerronReport> {
    let mp = build_m_p(t, o)?;
    let m = mp.rows();
    let primitive = is_primitive(&t.performing_block())?;
    let column_sums: Vec<f64> = (0..m).map(|j| mp.column(j).iter().sum()).collect();
    let column_sums_ok = column_sums
        .iter()
        .all(|c| (c - 1.0).abs() <= COLUMN_SUM_TOL);

    let right = perron_pair(&mp).ok();
    let left = perron_pair(&mp.transpose()).ok();
    let (perron_root, residual) = match &right {
        Some((w, lambda)) => {
            let mw = mp.mul_vec(w);
            let lw: Vec<f64> = w.iter().map(|x| lambda * x).collect();
            (Some(*lambda), Some(linf(&mw, &lw)))
        }
        None => (None, None),
    };
    let residual_ok = residual.is_some_and(|r| r <= RESIDUAL_TOL);
    let second = match (&right, &left) {
        (Some((w, _)), Some((u, _))) => {
            let s = dot(u, w);
            let u: Vec<f64> = u.iter().map(|x| x / s).collect();
            second_modulus(&mp, w, &u)
        }
        _ => f64::NAN,
    };
    let root = perron_root.unwrap_or(1.0);
    let spectral_gap_ok = second.is_finite() && second < root * (1.0 - 1e-6);
    Ok(PerronReport {
        primitive,
        column_sums,
        column_sums_ok,
        perron_root,
        residual,
        residual_ok,
        second_eigenvalue_modulus: second,
        spectral_gap_ok,
    })
}
