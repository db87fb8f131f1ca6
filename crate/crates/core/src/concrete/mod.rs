//! Explicit bounded CTMC of a CRN, used as the exact oracle at desk scale.

mod linear;
mod ssa;
mod transient;

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

pub use ssa::{ctmc_state_at, ssa_sample, SsaStep, TimedRun};
pub use transient::{poisson_weights, transient_distribution, PoissonWeights};

use crate::crn::{ConcreteState, Crn};
use crate::error::{Error, Result};

/// Default hard limit on the number of explicit states.
pub const DEFAULT_STATE_LIMIT: usize = 200_000;

#[derive(Clone, Debug)]
pub struct ConcreteCtmc {
    pub states: Vec<ConcreteState>,
    index: HashMap<ConcreteState, usize>,
    /// Initial distribution over `states`.
    pub initial: Vec<f64>,
    /// Sparse rows `(target, rate)`, sorted by target, no diagonal entries.
    pub rows: Vec<Vec<(usize, f64)>>,
    pub caps: Vec<u64>,
    /// Total propensity of transitions dropped because they exceed the caps,
    /// summed over all states.
    pub dropped_rate: f64,
}

/// Alternating sequence `s_0 I_0 s_1 I_1 ... s_{n+1}` of states and
/// sojourn-time intervals.
#[derive(Clone, Debug)]
pub struct CylinderTemplate {
    pub states: Vec<usize>,
    pub intervals: Vec<(f64, f64)>,
}

pub fn build_bounded_ctmc(crn: &Crn, caps: &[u64]) -> Result<ConcreteCtmc> {
    build_bounded_ctmc_with_limit(crn, caps, DEFAULT_STATE_LIMIT)
}

/// Breadth-first closure of the initial state under enabled reactions,
/// dropping successors that exceed `caps`.
pub fn build_bounded_ctmc_with_limit(crn: &Crn, caps: &[u64], limit: usize) -> Result<ConcreteCtmc> {
    if caps.len() != crn.num_species() {
        return Err(Error::Invalid(format!("expected {} caps, got {}", crn.num_species(), caps.len())));
    }
    if let Some(i) = (0..caps.len()).find(|&i| crn.initial[i] > caps[i]) {
        return Err(Error::Invalid(format!(
            "initial population of `{}` exceeds its cap {}",
            crn.species[i].name, caps[i]
        )));
    }
    let mut states = vec![crn.initial.clone()];
    let mut index = HashMap::from([(crn.initial.clone(), 0usize)]);
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut dropped_rate = 0.0;
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let state = states[i].clone();
        let mut row: Vec<(usize, f64)> = Vec::new();
        for r in &crn.reactions {
            if r.is_identity() || !r.enabled(&state) {
                continue;
            }
            let next = r.apply(&state)?;
            let a = r.propensity(&state);
            if next.iter().zip(caps).any(|(x, c)| x > c) {
                dropped_rate += a;
                continue;
            }
            let j = match index.get(&next) {
                Some(&j) => j,
                None => {
                    if states.len() >= limit {
                        return Err(Error::StateLimit { limit });
                    }
                    let j = states.len();
                    index.insert(next.clone(), j);
                    states.push(next);
                    queue.push_back(j);
                    j
                }
            };
            match row.iter_mut().find(|(t, _)| *t == j) {
                Some(entry) => entry.1 += a,
                None => row.push((j, a)),
            }
        }
        row.sort_by_key(|&(t, _)| t);
        if rows.len() <= i {
            rows.resize(i + 1, Vec::new());
        }
        rows[i] = row;
    }
    rows.resize(states.len(), Vec::new());
    let mut initial = vec![0.0; states.len()];
    initial[0] = 1.0;
    Ok(ConcreteCtmc { states, index, initial, rows, caps: caps.to_vec(), dropped_rate })
}

impl ConcreteCtmc {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, state: &[u64]) -> Option<usize> {
        self.index.get(state).copied()
    }

    pub fn rate(&self, from: usize, to: usize) -> f64 {
        self.rows[from].binary_search_by_key(&to, |&(t, _)| t).map(|k| self.rows[from][k].1).unwrap_or(0.0)
    }

    /// `E(s)`, the sum of outgoing rates.
    pub fn exit_rate(&self, s: usize) -> f64 {
        self.rows[s].iter().map(|&(_, r)| r).sum()
    }

    /// `P(s, s') = R(s, s') / E(s)`; undefined for absorbing `s`.
    pub fn embedded_probability(&self, s: usize, to: usize) -> Result<f64> {
        let e = self.exit_rate(s);
        if e == 0.0 {
            return Err(Error::Absorbing(s));
        }
        Ok(self.rate(s, to) / e)
    }

    /// Probability of the cylinder set of runs following `template`.
    pub fn cylinder_probability(&self, template: &CylinderTemplate) -> f64 {
        let Some(&s0) = template.states.first() else {
            return 0.0;
        };
        let mut p = self.initial.get(s0).copied().unwrap_or(0.0);
        for (w, &(lo, hi)) in template.states.windows(2).zip(&template.intervals) {
            let (s, t) = (w[0], w[1]);
            let Ok(step) = self.embedded_probability(s, t) else {
                return 0.0;
            };
            let e = self.exit_rate(s);
            let upper = if hi.is_infinite() { 0.0 } else { (-e * hi).exp() };
            p *= step * ((-e * lo).exp() - upper);
        }
        p
    }

    fn predecessors(&self) -> Vec<Vec<usize>> {
        let mut pred = vec![Vec::new(); self.len()];
        for (s, row) in self.rows.iter().enumerate() {
            for &(t, _) in row {
                pred[t].push(s);
            }
        }
        pred
    }

    /// Expected time to reach a state satisfying `target`, per start state.
    ///
    /// States from which the target is not reached with probability one get
    /// `f64::INFINITY`.
    pub fn mean_hitting_time(&self, target: impl Fn(&[u64]) -> bool) -> Vec<f64> {
        let n = self.len();
        let is_target: Vec<bool> = self.states.iter().map(|s| target(s)).collect();
        let pred = self.predecessors();

        let mut reaches = is_target.clone();
        let mut queue: VecDeque<usize> = (0..n).filter(|&s| is_target[s]).collect();
        while let Some(s) = queue.pop_front() {
            for &p in &pred[s] {
                if !reaches[p] {
                    reaches[p] = true;
                    queue.push_back(p);
                }
            }
        }
        // anything that can stray into a region never reaching the target
        let mut infinite: Vec<bool> = reaches.iter().map(|r| !r).collect();
        let mut queue: VecDeque<usize> = (0..n).filter(|&s| infinite[s]).collect();
        while let Some(s) = queue.pop_front() {
            for &p in &pred[s] {
                if !infinite[p] && !is_target[p] {
                    infinite[p] = true;
                    queue.push_back(p);
                }
            }
        }

        let unknowns: Vec<usize> = (0..n).filter(|&s| !is_target[s] && !infinite[s]).collect();
        let mut h = vec![0.0; n];
        for s in 0..n {
            if infinite[s] {
                h[s] = f64::INFINITY;
            }
        }
        let solved = linear::solve_hitting(self, &unknowns);
        for (&s, v) in unknowns.iter().zip(solved) {
            h[s] = v;
        }
        h
    }

    fn is_strongly_connected_closed(&self, set: &[usize]) -> bool {
        let member: HashMap<usize, usize> = set.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        if set.is_empty() {
            return false;
        }
        for &s in set {
            if self.rows[s].iter().any(|(t, _)| !member.contains_key(t)) {
                return false;
            }
        }
        let pred = self.predecessors();
        let sweep = |forward: bool| {
            let mut seen = vec![false; set.len()];
            seen[0] = true;
            let mut stack = vec![set[0]];
            while let Some(s) = stack.pop() {
                let next: Vec<usize> = if forward {
                    self.rows[s].iter().map(|&(t, _)| t).collect()
                } else {
                    pred[s].iter().copied().filter(|p| member.contains_key(p)).collect()
                };
                for t in next {
                    let k = member[&t];
                    if !seen[k] {
                        seen[k] = true;
                        stack.push(t);
                    }
                }
            }
            seen.iter().all(|&b| b)
        };
        sweep(true) && sweep(false)
    }

    /// Stationary distribution of the chain restricted to a bottom SCC,
    /// in the order of `set`.
    pub fn bscc_steady_state(&self, set: &[usize]) -> Result<Vec<f64>> {
        if !self.is_strongly_connected_closed(set) {
            return Err(Error::NotBottom(format!("{set:?}")));
        }
        Ok(linear::solve_stationary(self, set))
    }

    /// Sparse-triplet dump: header `states transitions`, then `from to rate`.
    pub fn to_triplets(&self) -> String {
        let nnz: usize = self.rows.iter().map(Vec::len).sum();
        let mut out = format!("{} {}\n", self.len(), nnz);
        for (s, row) in self.rows.iter().enumerate() {
            for &(t, r) in row {
                let _ = writeln!(out, "{s} {t} {r:e}");
            }
        }
        out
    }
}
