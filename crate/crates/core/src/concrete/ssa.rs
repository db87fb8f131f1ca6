//! Gillespie direct-method sampling of CRN trajectories.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::crn::{ConcreteState, Crn};

use super::ConcreteCtmc;

#[derive(Clone, Debug, PartialEq)]
pub struct SsaStep {
    pub state: ConcreteState,
    pub sojourn: f64,
}

/// A sampled run: completed sojourns followed by the state at the horizon.
#[derive(Clone, Debug, PartialEq)]
pub struct TimedRun {
    pub steps: Vec<SsaStep>,
    pub final_state: ConcreteState,
}

impl TimedRun {
    /// Time of the last jump.
    pub fn jump_time(&self) -> f64 {
        self.steps.iter().map(|s| s.sojourn).sum()
    }
}

/// One trajectory up to `horizon`, deterministic for a fixed `seed`.
pub fn ssa_sample(crn: &Crn, horizon: f64, seed: u64) -> TimedRun {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = crn.initial.clone();
    let mut steps = Vec::new();
    let mut now = 0.0;
    let mut props = vec![0.0; crn.reactions.len()];
    loop {
        for (p, r) in props.iter_mut().zip(&crn.reactions) {
            *p = if r.is_identity() { 0.0 } else { r.propensity(&state) };
        }
        let total: f64 = props.iter().sum();
        if total <= 0.0 {
            break;
        }
        let u: f64 = rng.random();
        let dt = -(1.0 - u).ln() / total;
        if now + dt > horizon {
            break;
        }
        now += dt;
        let mut pick = rng.random::<f64>() * total;
        let mut chosen = props.len() - 1;
        for (i, &p) in props.iter().enumerate() {
            if p > 0.0 {
                chosen = i;
                if pick < p {
                    break;
                }
                pick -= p;
            }
        }
        let next = crn.reactions[chosen].apply(&state).expect("propensity positive implies enabled");
        steps.push(SsaStep { state: std::mem::replace(&mut state, next), sojourn: dt });
    }
    TimedRun { steps, final_state: state }
}

/// Index of the state occupied at `horizon` by a run of the bounded chain
/// started in its initial state (index 0).
pub fn ctmc_state_at(ctmc: &ConcreteCtmc, horizon: f64, seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = 0;
    let mut now = 0.0;
    loop {
        let row = &ctmc.rows[s];
        let total: f64 = row.iter().map(|&(_, r)| r).sum();
        if total <= 0.0 {
            return s;
        }
        let u: f64 = rng.random();
        now += -(1.0 - u).ln() / total;
        if now > horizon {
            return s;
        }
        let mut pick = rng.random::<f64>() * total;
        let mut next = row[row.len() - 1].0;
        for &(t, r) in row {
            if pick < r {
                next = t;
                break;
            }
            pick -= r;
        }
        s = next;
    }
}
