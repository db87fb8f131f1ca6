//! Linear systems of the oracle: first-passage times and stationary vectors.
//!
//! First-passage times use subtraction-free state elimination, which stays
//! accurate when the answer spans hundreds of orders of magnitude. If the
//! elimination fills in too much, dense LU (small systems) or Gauss-Seidel
//! sweeps take over. Stationary vectors use LU or power iteration.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap};

use nalgebra::{DMatrix, DVector};

use super::ConcreteCtmc;

const DENSE_LIMIT: usize = 3_000;
const SWEEP_TOLERANCE: f64 = 1e-13;
const MAX_SWEEPS: usize = 1_000_000;
const FILL_BUDGET: usize = 4_000_000;

/// Eliminates the unknowns one by one (fewest fill-in candidates first),
/// keeping each equation in the form
/// `(absorb + sum row) h = cost + sum row[j] h[j]`, then back-substitutes.
/// Every update adds or scales positive numbers. `None` if the fill-in
/// exceeds the budget.
fn eliminate_hitting(ctmc: &ConcreteCtmc, unknowns: &[usize], pos: &HashMap<usize, usize>) -> Option<Vec<f64>> {
    let n = unknowns.len();
    let mut rows: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
    let mut cols: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    let mut absorb = vec![0.0; n];
    let mut cost = vec![1.0; n];
    for (i, &s) in unknowns.iter().enumerate() {
        for &(t, r) in &ctmc.rows[s] {
            match pos.get(&t) {
                Some(&j) if j != i => {
                    *rows[i].entry(j).or_insert(0.0) += r;
                    cols[j].insert(i);
                }
                Some(_) => {}
                None => absorb[i] += r,
            }
        }
    }
    let mut entries: usize = rows.iter().map(BTreeMap::len).sum();
    let degree = |rows: &[BTreeMap<usize, f64>], cols: &[BTreeSet<usize>], k: usize| rows[k].len() * cols[k].len();
    let mut heap: BinaryHeap<Reverse<(usize, usize)>> = (0..n).map(|k| Reverse((degree(&rows, &cols, k), k))).collect();
    let mut done = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut saved: Vec<(BTreeMap<usize, f64>, f64)> = vec![(BTreeMap::new(), 0.0); n];

    while let Some(Reverse((d, k))) = heap.pop() {
        if done[k] {
            continue;
        }
        let now = degree(&rows, &cols, k);
        if now != d {
            heap.push(Reverse((now, k)));
            continue;
        }
        done[k] = true;
        order.push(k);
        let row = std::mem::take(&mut rows[k]);
        let total = absorb[k] + row.values().sum::<f64>();
        if total <= 0.0 {
            return None;
        }
        for &j in row.keys() {
            cols[j].remove(&k);
        }
        let preds = std::mem::take(&mut cols[k]);
        for &i in &preds {
            let w = rows[i].remove(&k).expect("column entry has a row entry");
            entries -= 1;
            let f = w / total;
            cost[i] += f * cost[k];
            absorb[i] += f * absorb[k];
            for (&j, &r) in &row {
                if j == i {
                    continue;
                }
                let e = rows[i].entry(j).or_insert_with(|| {
                    entries += 1;
                    0.0
                });
                *e += f * r;
                cols[j].insert(i);
            }
            heap.push(Reverse((degree(&rows, &cols, i), i)));
        }
        if entries > FILL_BUDGET {
            return None;
        }
        entries -= row.len();
        saved[k] = (row, total);
    }

    let mut h = vec![0.0; n];
    for &k in order.iter().rev() {
        let (row, total) = &saved[k];
        let acc: f64 = cost[k] + row.iter().map(|(&j, &r)| r * h[j]).sum::<f64>();
        h[k] = acc / total;
    }
    Some(h)
}

/// Solves `E(s) h(s) - sum_{s' in U} R(s,s') h(s') = 1` over the unknown
/// states `U` (targets have `h = 0`).
pub(super) fn solve_hitting(ctmc: &ConcreteCtmc, unknowns: &[usize]) -> Vec<f64> {
    let n = unknowns.len();
    if n == 0 {
        return Vec::new();
    }
    let pos: HashMap<usize, usize> = unknowns.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    if let Some(h) = eliminate_hitting(ctmc, unknowns, &pos) {
        return h;
    }
    if n <= DENSE_LIMIT {
        let mut a = DMatrix::<f64>::zeros(n, n);
        let b = DVector::<f64>::from_element(n, 1.0);
        for (i, &s) in unknowns.iter().enumerate() {
            a[(i, i)] = ctmc.exit_rate(s);
            for &(t, r) in &ctmc.rows[s] {
                if let Some(&j) = pos.get(&t) {
                    a[(i, j)] -= r;
                }
            }
        }
        if let Some(x) = a.lu().solve(&b) {
            return x.iter().copied().collect();
        }
    }
    let mut h = vec![0.0; n];
    for _ in 0..MAX_SWEEPS {
        let mut delta: f64 = 0.0;
        for (i, &s) in unknowns.iter().enumerate() {
            let e = ctmc.exit_rate(s);
            let mut acc = 1.0;
            for &(t, r) in &ctmc.rows[s] {
                if let Some(&j) = pos.get(&t) {
                    acc += r * h[j];
                }
            }
            let v = acc / e;
            delta = delta.max(((v - h[i]) / v.max(1e-300)).abs());
            h[i] = v;
        }
        if delta < SWEEP_TOLERANCE {
            break;
        }
    }
    h
}

/// Stationary distribution of the chain restricted to `set` (assumed to be
/// a bottom SCC), in the order of `set`.
pub(super) fn solve_stationary(ctmc: &ConcreteCtmc, set: &[usize]) -> Vec<f64> {
    let n = set.len();
    if n == 1 {
        return vec![1.0];
    }
    let pos: HashMap<usize, usize> = set.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    if n <= DENSE_LIMIT {
        // pi Q = 0 transposed, last balance equation replaced by sum(pi) = 1
        let mut a = DMatrix::<f64>::zeros(n, n);
        for (i, &s) in set.iter().enumerate() {
            a[(i, i)] -= ctmc.exit_rate(s);
            for &(t, r) in &ctmc.rows[s] {
                a[(pos[&t], i)] += r;
            }
        }
        for j in 0..n {
            a[(n - 1, j)] = 1.0;
        }
        let mut b = DVector::<f64>::zeros(n);
        b[n - 1] = 1.0;
        if let Some(x) = a.lu().solve(&b) {
            return x.iter().copied().collect();
        }
    }
    // power iteration on the uniformised chain
    let q = set.iter().map(|&s| ctmc.exit_rate(s)).fold(0.0, f64::max) * 1.02;
    let mut pi = vec![1.0 / n as f64; n];
    for _ in 0..MAX_SWEEPS {
        let mut next = vec![0.0; n];
        for (i, &s) in set.iter().enumerate() {
            let e = ctmc.exit_rate(s);
            next[i] += pi[i] * (1.0 - e / q);
            for &(t, r) in &ctmc.rows[s] {
                next[pos[&t]] += pi[i] * r / q;
            }
        }
        let delta = next.iter().zip(&pi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        pi = next;
        if delta < SWEEP_TOLERANCE {
            break;
        }
    }
    pi
}
