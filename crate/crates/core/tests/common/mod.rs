#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ttc_stress::{is_primitive, OriginationVector, Portfolio, TransitionMatrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random row-stochastic matrix with absorbing default; roughly `sparsity`
/// of the off-diagonal performing entries are zero.
pub fn random_matrix(r: &mut ChaCha8Rng, n: usize, sparsity: f64) -> TransitionMatrix {
    let mut rows = Vec::with_capacity(n);
    for i in 0..n - 1 {
        let mut row: Vec<f64> = (0..n)
            .map(|j| {
                if j != i && r.random::<f64>() < sparsity {
                    0.0
                } else {
                    r.random::<f64>()
                }
            })
            .collect();
        row[i] += 2.0 * r.random::<f64>();
        let s: f64 = row.iter().sum();
        row.iter_mut().for_each(|x| *x /= s);
        rows.push(row);
    }
    let mut last = vec![0.0; n];
    last[n - 1] = 1.0;
    rows.push(last);
    TransitionMatrix::from_rows(&rows).expect("stochastic by construction")
}

pub fn random_weights(r: &mut ChaCha8Rng, n: usize, sparsity: f64) -> Vec<f64> {
    loop {
        let mut w: Vec<f64> = (0..n)
            .map(|_| {
                if r.random::<f64>() < sparsity {
                    0.0
                } else {
                    r.random::<f64>()
                }
            })
            .collect();
        w[n - 1] = 0.0;
        let s: f64 = w.iter().sum();
        if s > 0.0 {
            w.iter_mut().for_each(|x| *x /= s);
            return w;
        }
    }
}

pub fn random_portfolio(r: &mut ChaCha8Rng, n: usize) -> Portfolio {
    Portfolio::new(random_weights(r, n, 0.3)).expect("normalised")
}

pub fn random_origination(r: &mut ChaCha8Rng, n: usize) -> OriginationVector {
    OriginationVector::new(random_weights(r, n, 0.3)).expect("normalised")
}

/// Random system satisfying both existence conditions, `2 ≤ n ≤ max_n`.
pub fn random_primitive_system(seed: u64, max_n: usize) -> (TransitionMatrix, OriginationVector) {
    let mut r = rng(seed);
    let n = r.random_range(2..=max_n);
    loop {
        let t = random_matrix(&mut r, n, 0.5);
        if is_primitive(&t.performing_block()).expect("square") {
            return (t, random_origination(&mut r, n));
        }
    }
}
