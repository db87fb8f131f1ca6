//! Transient distributions by uniformisation.

use super::ConcreteCtmc;

/// Truncated, normalised Poisson weights `w[k - left]` for `k in left..=right`.
#[derive(Clone, Debug)]
pub struct PoissonWeights {
    pub left: usize,
    pub right: usize,
    pub weights: Vec<f64>,
}

/// Poisson(`lambda`) weights truncated so that the discarded tail mass is
/// below `epsilon`. Weights are generated outward from the mode, which keeps
/// them representable for large `lambda`.
pub fn poisson_weights(lambda: f64, epsilon: f64) -> PoissonWeights {
    if lambda <= 0.0 {
        return PoissonWeights { left: 0, right: 0, weights: vec![1.0] };
    }
    let mode = lambda.floor() as usize;
    let cutoff = epsilon * 1e-3;

    let mut down = vec![1.0];
    let mut k = mode;
    let mut w = 1.0;
    let mut total = 1.0;
    while k > 0 {
        w *= k as f64 / lambda;
        k -= 1;
        down.push(w);
        total += w;
        if w < cutoff * total {
            break;
        }
    }
    let left = k;

    let mut up = Vec::new();
    let mut k = mode;
    let mut w = 1.0;
    loop {
        k += 1;
        w *= lambda / k as f64;
        up.push(w);
        total += w;
        if w < cutoff * total && k as f64 > lambda {
            break;
        }
    }
    let right = k;

    let mut weights: Vec<f64> = down.into_iter().rev().chain(up).collect();
    let sum: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= sum;
    }
    PoissonWeights { left, right, weights }
}

/// Distribution over states at time `t`, with truncation error below
/// `epsilon`.
pub fn transient_distribution(ctmc: &ConcreteCtmc, t: f64, epsilon: f64) -> Vec<f64> {
    let n = ctmc.len();
    let max_exit = (0..n).map(|s| ctmc.exit_rate(s)).fold(0.0, f64::max);
    if t <= 0.0 || max_exit == 0.0 {
        return ctmc.initial.clone();
    }
    let q = max_exit * 1.02;
    let fg = poisson_weights(q * t, epsilon);
    let exits: Vec<f64> = (0..n).map(|s| ctmc.exit_rate(s)).collect();

    let mut v = ctmc.initial.clone();
    let mut acc = vec![0.0; n];
    for k in 0..=fg.right {
        if k >= fg.left {
            let w = fg.weights[k - fg.left];
            for (a, x) in acc.iter_mut().zip(&v) {
                *a += w * x;
            }
        }
        if k == fg.right {
            break;
        }
        let mut next = vec![0.0; n];
        for s in 0..n {
            if v[s] == 0.0 {
                continue;
            }
            next[s] += v[s] * (1.0 - exits[s] / q);
            for &(t, r) in &ctmc.rows[s] {
                next[t] += v[s] * r / q;
            }
        }
        v = next;
    }
    acc
}
