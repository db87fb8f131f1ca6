use std::collections::{HashMap, VecDeque};

use num::{BigInt, One};

use crate::crn::{ConcreteState, Crn};
use crate::error::{Error, Result};
use crate::graph::{Edge, RateGraph};
use crate::magnitude::{magnitude, Exact};

use super::partition::{AbstractState, LevelPartition};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbstractTransition {
    pub source: usize,
    pub target: usize,
    /// Index into `crn.reactions`.
    pub reaction: usize,
    /// Propensity at the source representative.
    pub representative_rate: Exact,
    /// `representative_rate / steps`.
    pub rate: Exact,
    pub magnitude: i32,
    pub accelerated: bool,
    pub steps: u64,
}

/// The abstract CTMC of a CRN under a level partition. States are sorted by
/// level vector; transitions by source state, then reaction order.
#[derive(Clone, Debug)]
pub struct AbstractCtmc {
    pub crn: Crn,
    pub partition: LevelPartition,
    pub states: Vec<AbstractState>,
    pub transitions: Vec<AbstractTransition>,
    pub initial: usize,
    pub diagnostics: Vec<String>,
    pub graph: RateGraph,
}

impl AbstractCtmc {
    pub fn label(&self, state: usize) -> String {
        self.partition.label(&self.crn, &self.states[state])
    }

    pub fn index_of(&self, state: &AbstractState) -> Option<usize> {
        self.states.binary_search(state).ok()
    }

    pub fn outgoing(&self, state: usize) -> impl Iterator<Item = &AbstractTransition> {
        self.graph.outgoing(state).iter().map(move |&e| &self.transitions[e])
    }
}

/// Number of firings of `change` from `c` until some species leaves its
/// level of `a`, if that ever happens.
fn steps_to_leave(partition: &LevelPartition, a: &AbstractState, c: &[u64], change: &[i64]) -> Option<u64> {
    let mut best: Option<u64> = None;
    for (l, &d) in change.iter().enumerate() {
        let iv = partition.interval(l, a.0[l]);
        let n = match d {
            0 => continue,
            d if d > 0 => match iv.hi {
                Some(h) => (h - c[l]) / d as u64 + 1,
                None => continue,
            },
            d => (c[l] - iv.lo) / d.unsigned_abs() + 1,
        };
        best = Some(best.map_or(n, |b| b.min(n)));
    }
    best
}

/// Builds the abstract CTMC reachable from the abstraction of the initial
/// state, evaluating rates at level representatives and accelerating
/// self-loops.
pub fn build_abstraction(crn: &Crn, partition: &LevelPartition) -> Result<AbstractCtmc> {
    let violations = partition.validate(crn);
    if !violations.is_empty() {
        return Err(Error::InvalidPartition(violations));
    }
    let init = partition.abstract_state(&crn.initial);
    let mut index: HashMap<AbstractState, usize> = HashMap::from([(init.clone(), 0)]);
    let mut found = vec![init];
    let mut queue = VecDeque::from([0usize]);
    // (source, target, reaction, representative rate, steps, accelerated), BFS numbering
    let mut raw: Vec<(usize, usize, usize, Exact, u64, bool)> = Vec::new();
    let mut diagnostics = Vec::new();

    while let Some(s) = queue.pop_front() {
        let a = found[s].clone();
        let c = partition.concretise(&a);
        for (ri, reaction) in crn.reactions.iter().enumerate() {
            if !reaction.enabled(&c) {
                continue;
            }
            let rate = reaction.propensity_exact(&c);
            let next = reaction.apply(&c)?;
            let mut target = partition.abstract_state(&next);
            let mut steps = 1;
            let accelerated = target == a;
            if accelerated {
                let Some(n) = steps_to_leave(partition, &a, &c, &reaction.change) else {
                    diagnostics.push(format!(
                        "reaction {} never leaves {}; dropped",
                        reaction.label,
                        partition.label(crn, &a)
                    ));
                    continue;
                };
                let Some(moved) = reaction.apply_n(&c, n) else {
                    diagnostics.push(format!(
                        "reaction {} would drive a population negative from {}; dropped",
                        reaction.label,
                        partition.label(crn, &a)
                    ));
                    continue;
                };
                target = partition.abstract_state(&moved);
                steps = n;
            }
            let t = *index.entry(target.clone()).or_insert_with(|| {
                found.push(target);
                queue.push_back(found.len() - 1);
                found.len() - 1
            });
            raw.push((s, t, ri, rate, steps, accelerated));
        }
    }

    let mut order: Vec<usize> = (0..found.len()).collect();
    order.sort_by(|&x, &y| found[x].cmp(&found[y]));
    let mut rank = vec![0; found.len()];
    for (new, &old) in order.iter().enumerate() {
        rank[old] = new;
    }
    let states: Vec<AbstractState> = order.iter().map(|&o| found[o].clone()).collect();

    let mut transitions = raw
        .into_iter()
        .map(|(s, t, reaction, representative_rate, steps, accelerated)| {
            let rate = &representative_rate / Exact::from_integer(BigInt::from(steps));
            Ok(AbstractTransition {
                source: rank[s],
                target: rank[t],
                reaction,
                magnitude: magnitude(&rate)?,
                representative_rate,
                rate,
                accelerated,
                steps,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    transitions.sort_by_key(|t| (t.source, t.reaction));

    let labels = states.iter().map(|a| partition.label(crn, a)).collect();
    let edges = transitions
        .iter()
        .map(|t| Edge {
            source: t.source,
            target: t.target,
            rate: t.rate.clone(),
            magnitude: t.magnitude,
            label: crn.reactions[t.reaction].label.clone(),
        })
        .collect();
    let initial = rank[0];
    Ok(AbstractCtmc {
        crn: crn.clone(),
        partition: partition.clone(),
        graph: RateGraph::new(labels, initial, edges),
        states,
        transitions,
        initial,
        diagnostics,
    })
}

/// Propensity range of `reaction` over the populations of `a`, from the
/// lower and upper corners of every level (the bound for top levels).
/// `None` if the reaction is disabled at the representative.
pub fn interval_rate_bounds(
    crn: &Crn,
    partition: &LevelPartition,
    a: &AbstractState,
    reaction: usize,
) -> Option<(Exact, Exact)> {
    let r = &crn.reactions[reaction];
    if !r.enabled(&partition.concretise(a)) {
        return None;
    }
    let lows: ConcreteState = a.0.iter().enumerate().map(|(l, &lv)| partition.interval(l, lv).lo).collect();
    let highs: ConcreteState = a.0.iter().enumerate().map(|(l, &lv)| partition.species[l].upper(lv)).collect();
    Some((r.propensity_exact(&lows), r.propensity_exact(&highs)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RefinementHint {
    /// The rate of `reaction` varies over more than the threshold number of
    /// magnitudes within `state`.
    WideRate { state: usize, reaction: usize, low: i32, high: i32 },
    /// A top level whose bound is only assumed is reachable.
    BoundReached { state: usize, species: usize },
}

impl RefinementHint {
    pub fn describe(&self, actmc: &AbstractCtmc) -> String {
        match self {
            RefinementHint::WideRate { state, reaction, low, high } => format!(
                "rate of {} in {} spans 10^{low}..10^{high}; consider refining the levels",
                actmc.crn.reactions[*reaction].label,
                actmc.label(*state)
            ),
            RefinementHint::BoundReached { state, species } => {
                let sl = &actmc.partition.species[*species];
                format!(
                    "top level {} of {} is reachable ({}); check that the bound {} is not exceeded",
                    sl.levels.last().expect("non-empty"),
                    actmc.crn.species[*species].name,
                    actmc.label(*state),
                    sl.bound
                )
            }
        }
    }
}

/// Transitions whose rate range over their source level spans more than
/// `k` magnitudes, plus one flag per species whose bounded top level is
/// reachable.
pub fn suggest_refinement(actmc: &AbstractCtmc, k: u32) -> Vec<RefinementHint> {
    let mut hints = Vec::new();
    for t in &actmc.transitions {
        let a = &actmc.states[t.source];
        if let Some((lo, hi)) = interval_rate_bounds(&actmc.crn, &actmc.partition, a, t.reaction) {
            let (Ok(low), Ok(high)) = (magnitude(&lo), magnitude(&hi)) else { continue };
            if (high - low) as i64 > k as i64 {
                hints.push(RefinementHint::WideRate { state: t.source, reaction: t.reaction, low, high });
            }
        }
    }
    for (l, sl) in actmc.partition.species.iter().enumerate() {
        let top = sl.levels.len() - 1;
        if sl.bound <= sl.levels[top].lo {
            continue;
        }
        if let Some(state) = actmc.states.iter().position(|a| a.0[l] == top) {
            hints.push(RefinementHint::BoundReached { state, species: l });
        }
    }
    hints
}

/// Expected time of an accelerated transition, `steps / representative rate`.
pub fn traversal_time(t: &AbstractTransition) -> Exact {
    Exact::one() / &t.rate
}
