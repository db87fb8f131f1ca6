//! The iterated steady-state / transient analysis over a pruned graph.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, VecDeque};

use num::{One, Zero};

use crate::magnitude::{to_f64, Exact, Quantity};
use crate::pruning::PrunedGraph;

use super::formulas::{component_steady_state, exit_distribution, select_exit_states, time_to_exit, transient_time};
use super::report::*;
use super::scc::{scc_decompose, Sccs};

/// Upper limit on created components; reaching it ends the analysis early.
pub const MAX_COMPONENTS: usize = 20_000;

#[derive(Clone, Debug)]
struct Work {
    iteration: u32,
    kind: ComponentKind,
    origin: Origin,
    parent: Option<usize>,
    members: BTreeSet<usize>,
    /// Precomputed weights for extended and merged components.
    weights: Option<BTreeMap<usize, Exact>>,
    absorbed: BTreeSet<usize>,
    entry_path: Vec<usize>,
    reach: Exact,
    arrival: Exact,
    // filled in when processed
    probabilities: BTreeMap<usize, Exact>,
    exit_time: Option<Exact>,
    processed_exits: Vec<usize>,
}

struct Path {
    states: Vec<usize>,
    edges: Vec<usize>,
    probability: Exact,
}

struct Analysis<'p, 'g> {
    pruned: &'p PrunedGraph<'g>,
    sccs: Sccs,
    staying: Vec<Exact>,
    work: Vec<Work>,
    records: Vec<Option<ComponentRecord>>,
    owner: Vec<Option<usize>>,
    edge_iteration: Vec<Option<u32>>,
    queue: VecDeque<usize>,
    order: Vec<usize>,
    diagnostics: Vec<String>,
}

fn int(n: usize) -> Exact {
    Exact::from_integer(n.into())
}

/// Runs the analysis from the initial state of the pruned graph.
pub fn analyze(pruned: &PrunedGraph<'_>) -> AnalysisReport {
    let g = pruned.graph;
    let n = g.num_states();
    let sccs = scc_decompose(n, |s| pruned.kept_out(s).map(|e| g.edge(e).target).collect::<Vec<_>>());
    let staying = (0..n).map(|s| pruned.staying_rate(s)).collect();
    let mut a = Analysis {
        pruned,
        sccs,
        staying,
        work: Vec::new(),
        records: Vec::new(),
        owner: vec![None; n],
        edge_iteration: vec![None; g.edges.len()],
        queue: VecDeque::new(),
        order: Vec::new(),
        diagnostics: Vec::new(),
    };
    a.push(Work {
        iteration: 0,
        kind: ComponentKind::Initial,
        origin: Origin::Initial,
        parent: None,
        members: BTreeSet::from([g.initial]),
        weights: None,
        absorbed: BTreeSet::new(),
        entry_path: Vec::new(),
        reach: Exact::one(),
        arrival: Exact::zero(),
        probabilities: BTreeMap::new(),
        exit_time: None,
        processed_exits: Vec::new(),
    });
    while let Some(id) = a.queue.pop_front() {
        a.process(id);
        a.order.push(id);
    }
    a.finish()
}

impl<'p, 'g> Analysis<'p, 'g> {
    fn label(&self, s: usize) -> String {
        self.pruned.graph.state_labels[s].clone()
    }

    fn push(&mut self, w: Work) -> usize {
        let id = self.work.len();
        for &s in &w.members {
            self.owner[s] = Some(id);
        }
        self.work.push(w);
        self.records.push(None);
        if id < MAX_COMPONENTS {
            self.queue.push_back(id);
        } else if id == MAX_COMPONENTS {
            self.diagnostics.push(format!("component limit {MAX_COMPONENTS} reached; analysis truncated"));
        }
        id
    }

    fn ancestors(&self, id: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut cur = self.work[id].parent;
        while let Some(p) = cur {
            out.push(p);
            cur = self.work[p].parent;
        }
        out
    }

    fn is_fresh(&self, id: usize) -> bool {
        self.work[id].weights.is_none()
    }

    fn make_path(&self, states: &[usize], edges: &[usize]) -> TransientPath {
        let g = self.pruned.graph;
        let rates: Vec<Exact> = edges.iter().map(|&e| g.edge(e).rate.clone()).collect();
        let min = super::formulas::min_with_count(&rates);
        TransientPath {
            states: states.to_vec(),
            labels: states.iter().map(|&s| self.label(s)).collect(),
            min_rate: min.as_ref().map(|(r, _)| Quantity::rate(r.clone())),
            occurrences: min.map_or(0, |(_, m)| m),
            time: Quantity::time(transient_time(&rates)),
        }
    }

    /// BSCCs of the pruned graph reachable from `t`, each with the most
    /// probable path into it. Traversed edges get iteration `iteration`.
    fn explore(&mut self, t: usize, iteration: u32) -> Vec<(Vec<usize>, Path)> {
        let g = self.pruned.graph;
        let mut seen = BTreeSet::from([t]);
        let mut queue = VecDeque::from([t]);
        while let Some(s) = queue.pop_front() {
            for e in self.pruned.kept_out(s) {
                if self.edge_iteration[e].is_none() {
                    self.edge_iteration[e] = Some(iteration);
                }
                let v = g.edge(e).target;
                if seen.insert(v) {
                    queue.push_back(v);
                }
            }
        }
        // most probable paths: Dijkstra on -ln(rate / staying)
        let mut dist: BTreeMap<usize, f64> = BTreeMap::from([(t, 0.0)]);
        let mut pred: BTreeMap<usize, usize> = BTreeMap::new();
        let mut heap = BinaryHeap::from([Reverse((OrdF64(0.0), t))]);
        while let Some(Reverse((OrdF64(d), s))) = heap.pop() {
            if dist.get(&s).is_some_and(|&best| d > best) {
                continue;
            }
            let stay = to_f64(&self.staying[s]);
            for e in self.pruned.kept_out(s) {
                let v = g.edge(e).target;
                let nd = d - (to_f64(&g.edge(e).rate) / stay).ln();
                if dist.get(&v).is_none_or(|&old| nd < old) {
                    dist.insert(v, nd);
                    pred.insert(v, e);
                    heap.push(Reverse((OrdF64(nd), v)));
                }
            }
        }
        let mut bottoms: Vec<usize> = seen
            .iter()
            .map(|&s| self.sccs.component_of[s])
            .filter(|&c| self.sccs.bottom[c])
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        bottoms.sort_by_key(|&c| self.sccs.components[c][0]);
        bottoms
            .into_iter()
            .map(|c| {
                let members = self.sccs.components[c].clone();
                let entry = *members
                    .iter()
                    .min_by(|a, b| dist[a].total_cmp(&dist[b]).then(a.cmp(b)))
                    .expect("non-empty component");
                let mut states = vec![entry];
                let mut edges = Vec::new();
                let mut cur = entry;
                while cur != t {
                    let e = pred[&cur];
                    edges.push(e);
                    cur = g.edge(e).source;
                    states.push(cur);
                }
                states.reverse();
                edges.reverse();
                let probability = edges
                    .iter()
                    .map(|&e| &g.edge(e).rate / &self.staying[g.edge(e).source])
                    .fold(Exact::one(), |acc, p| acc * p);
                (members, Path { states, edges, probability })
            })
            .collect()
    }

    fn weights_of(&self, id: usize) -> BTreeMap<usize, Exact> {
        let w = &self.work[id];
        if let Some(ws) = &w.weights {
            return ws.clone();
        }
        if w.kind == ComponentKind::Initial {
            return w.members.iter().map(|&s| (s, Exact::one())).collect();
        }
        let members: Vec<usize> = w.members.iter().copied().collect();
        let stay: Vec<Exact> = members.iter().map(|&s| self.staying[s].clone()).collect();
        members.into_iter().zip(component_steady_state(&stay)).collect()
    }

    fn process(&mut self, id: usize) {
        let g = self.pruned.graph;
        let weights = self.weights_of(id);
        let total: Exact = weights.values().sum();
        let probabilities: BTreeMap<usize, Exact> =
            if total.is_one() { weights.clone() } else { weights.iter().map(|(&s, w)| (s, w / &total)).collect() };
        self.work[id].probabilities = probabilities.clone();
        let steady_state = weights
            .iter()
            .map(|(&s, w)| StateWeight {
                state: s,
                label: self.label(s),
                weight: Quantity::rate(w.clone()),
                probability: Quantity::rate(probabilities[&s].clone()),
            })
            .collect();
        let iteration = self.work[id].iteration;
        let mut record = ComponentRecord {
            id,
            iteration,
            kind: self.work[id].kind,
            origin: self.work[id].origin.clone(),
            parent: self.work[id].parent,
            steady_state,
            exit_time: None,
            exits: Vec::new(),
            branches: Vec::new(),
            reach_probability: Quantity::rate(self.work[id].reach.clone()),
            arrival_time: Quantity::time(self.work[id].arrival.clone()),
        };

        if self.work[id].kind == ComponentKind::Initial {
            self.process_initial(id, &mut record);
            self.records[id] = Some(record);
            return;
        }

        let members = self.work[id].members.clone();
        // (state, edge, rate) candidates
        let kept_leaving: Vec<(usize, usize)> = members
            .iter()
            .flat_map(|&s| self.pruned.kept_out(s).map(move |e| (s, e)))
            .filter(|&(_, e)| !members.contains(&g.edge(e).target))
            .collect();
        let exits: Vec<(usize, usize, Exact)> = if !kept_leaving.is_empty() {
            // kept edges leave the component: they dominate the timescale
            let flux: Vec<Exact> = kept_leaving.iter().map(|&(s, e)| &weights[&s] * &g.edge(e).rate).collect();
            let sum: Exact = flux.iter().sum();
            kept_leaving.iter().zip(flux).map(|(&(s, e), f)| (s, e, f / &sum)).collect()
        } else {
            let absorbed = &self.work[id].absorbed;
            let fresh = self.is_fresh(id);
            let mut states = Vec::new();
            let mut staying_like = Vec::new();
            let mut exiting = Vec::new();
            let mut chosen = Vec::new();
            for &s in &members {
                let best = self.pruned.pruned_out(s).filter(|e| !absorbed.contains(e)).fold(
                    None::<usize>,
                    |best, e| match best {
                        Some(b) if g.edge(b).rate >= g.edge(e).rate => Some(b),
                        _ => Some(e),
                    },
                );
                states.push(s);
                staying_like.push(if fresh { self.staying[s].clone() } else { Exact::one() / &weights[&s] });
                exiting.push(best.map(|e| g.edge(e).rate.clone()));
                chosen.push(best);
            }
            let selected = select_exit_states(&staying_like, &exiting);
            let sel_w: Vec<Exact> = selected.iter().map(|&i| weights[&states[i]].clone()).collect();
            let sel_e: Vec<Exact> = selected.iter().map(|&i| exiting[i].clone().expect("selected")).collect();
            let shares = exit_distribution(&sel_w, &sel_e);
            selected.iter().zip(shares).map(|(&i, share)| (states[i], chosen[i].expect("selected"), share)).collect()
        };

        if exits.is_empty() {
            record.kind = ComponentKind::ConfirmedBottom;
            self.records[id] = Some(record);
            return;
        }
        let kept = !kept_leaving.is_empty();
        let flux_sum: Exact = exits.iter().map(|(s, e, _)| &weights[s] * &g.edge(*e).rate).sum();
        let exit_time = Exact::one() / flux_sum;
        self.work[id].exit_time = Some(exit_time.clone());
        record.exit_time = Some(Quantity::time(exit_time.clone()));

        let mut exits = exits;
        exits.sort_by(|a, b| b.2.cmp(&a.2).then(a.0.cmp(&b.0)).then(a.1.cmp(&b.1)));
        let k = exits.len();
        let ancestors = self.ancestors(id);
        let mut back_paths: Vec<Vec<usize>> = Vec::new();
        let mut merge_from: Vec<usize> = Vec::new();
        let mut all_back = true;
        let next_iteration = iteration + 1;
        let reach = self.work[id].reach.clone();
        let arrival = &self.work[id].arrival + &exit_time;

        for (s, e, share) in exits {
            if self.edge_iteration[e].is_none() {
                self.edge_iteration[e] = Some(next_iteration);
            }
            self.work[id].processed_exits.push(e);
            let t = g.edge(e).target;
            let exit_reach = &reach * &share;
            let mut branches = Vec::new();
            let direct = if members.contains(&t) {
                Some(Event::BackToCurrent)
            } else {
                self.owner[t].map(|x| {
                    if ancestors.contains(&x) {
                        Event::MergeRange { from: x, merged: usize::MAX }
                    } else {
                        Event::Revisit { component: x }
                    }
                })
            };
            if let Some(event) = direct {
                match &event {
                    Event::BackToCurrent => {}
                    Event::MergeRange { from, .. } => {
                        all_back = false;
                        merge_from.push(*from);
                    }
                    Event::Revisit { component } => {
                        all_back = false;
                        self.work[*component].reach += &exit_reach;
                    }
                    Event::New { .. } => unreachable!(),
                }
                branches.push(Branch {
                    event,
                    path: self.make_path(&[t], &[]),
                    probability: Quantity::rate(Exact::one()),
                    reach: Quantity::rate(exit_reach.clone()),
                });
            } else {
                let found = self.explore(t, next_iteration);
                let total: Exact = found.iter().map(|(_, p)| p.probability.clone()).sum();
                for (members_d, path) in found {
                    let prob = &path.probability / &total;
                    let branch_reach = &exit_reach * &prob;
                    let tp = self.make_path(&path.states, &path.edges);
                    let owner = self.owner[members_d[0]];
                    let event = if members_d.iter().any(|s| members.contains(s)) {
                        back_paths.push(path.states.clone());
                        Event::BackToCurrent
                    } else if let Some(x) = owner.filter(|x| ancestors.contains(x)) {
                        all_back = false;
                        merge_from.push(x);
                        back_paths.push(path.states.clone());
                        Event::MergeRange { from: x, merged: usize::MAX }
                    } else if let Some(x) = owner {
                        all_back = false;
                        self.work[x].reach += &branch_reach;
                        Event::Revisit { component: x }
                    } else {
                        all_back = false;
                        let entry: Vec<usize> =
                            path.states.iter().copied().filter(|s| !members_d.contains(s)).collect();
                        let new = self.push(Work {
                            iteration: next_iteration,
                            kind: ComponentKind::CandidateBottom,
                            origin: Origin::New { from: id },
                            parent: Some(id),
                            members: members_d.iter().copied().collect(),
                            weights: None,
                            absorbed: BTreeSet::new(),
                            entry_path: entry,
                            reach: branch_reach.clone(),
                            arrival: &arrival
                                + &transient_time(
                                    &path.edges.iter().map(|&e| g.edge(e).rate.clone()).collect::<Vec<_>>(),
                                ),
                            probabilities: BTreeMap::new(),
                            exit_time: None,
                            processed_exits: Vec::new(),
                        });
                        Event::New { component: new }
                    };
                    branches.push(Branch {
                        event,
                        path: tp,
                        probability: Quantity::rate(prob),
                        reach: Quantity::rate(branch_reach),
                    });
                }
            }
            record.exits.push(ExitRecord {
                state: s,
                state_label: self.label(s),
                edge: e,
                reaction: g.edge(e).label.clone(),
                target: t,
                target_label: self.label(t),
                kept,
                staying_rate: Quantity::rate(self.staying[s].clone()),
                exiting_rate: Quantity::rate(g.edge(e).rate.clone()),
                time_to_exit: Quantity::time(time_to_exit(&weights[&s], k, &g.edge(e).rate)),
                share: Quantity::rate(share),
                branches,
            });
        }

        if !merge_from.is_empty() {
            let oldest = *ancestors.iter().rev().find(|a| merge_from.contains(a)).expect("ancestor");
            let merged = self.merge(id, oldest, &ancestors, &back_paths);
            for exit in &mut record.exits {
                for b in &mut exit.branches {
                    if let Event::MergeRange { merged: m, .. } = &mut b.event {
                        *m = merged;
                    }
                }
            }
        } else if all_back {
            self.extend(id, &back_paths);
        }
        if !self.is_fresh(id) {
            record.kind = ComponentKind::TransientMerged;
        }
        self.records[id] = Some(record);
    }

    fn process_initial(&mut self, id: usize, record: &mut ComponentRecord) {
        let g = self.pruned.graph;
        let init = g.initial;
        if self.pruned.kept_out(init).next().is_none() {
            record.kind = ComponentKind::ConfirmedBottom;
            return;
        }
        self.work[id].exit_time = Some(Exact::one() / &self.staying[init]);
        let found = self.explore(init, 1);
        let total: Exact = found.iter().map(|(_, p)| p.probability.clone()).sum();
        for (members_d, path) in found {
            let prob = &path.probability / &total;
            let rates: Vec<Exact> = path.edges.iter().map(|&e| g.edge(e).rate.clone()).collect();
            let entry: Vec<usize> = path.states.iter().copied().filter(|s| !members_d.contains(s)).collect();
            let new = self.push(Work {
                iteration: 1,
                kind: ComponentKind::CandidateBottom,
                origin: Origin::New { from: id },
                parent: Some(id),
                members: members_d.iter().copied().collect(),
                weights: None,
                absorbed: BTreeSet::new(),
                entry_path: entry,
                reach: prob.clone(),
                arrival: transient_time(&rates),
                probabilities: BTreeMap::new(),
                exit_time: None,
                processed_exits: Vec::new(),
            });
            record.branches.push(Branch {
                event: Event::New { component: new },
                path: self.make_path(&path.states, &path.edges),
                probability: Quantity::rate(prob.clone()),
                reach: Quantity::rate(prob),
            });
        }
    }

    /// Sojourn of a state on a transient path.
    fn path_time(&self, s: usize) -> Exact {
        if self.staying[s].is_zero() {
            Exact::zero()
        } else {
            Exact::one() / &self.staying[s]
        }
    }

    fn add_time(acc: &mut BTreeMap<usize, Exact>, s: usize, t: Exact) {
        *acc.entry(s).or_insert_with(Exact::zero) += t;
    }

    fn normalised(times: BTreeMap<usize, Exact>) -> BTreeMap<usize, Exact> {
        let total: Exact = times.values().sum();
        if total.is_zero() {
            let n = int(times.len());
            return times.into_keys().map(|s| (s, Exact::one() / &n)).collect();
        }
        times.into_iter().map(|(s, t)| (s, t / &total)).collect()
    }

    fn component_times(&self, x: usize, acc: &mut BTreeMap<usize, Exact>) {
        let w = &self.work[x];
        let time = w.exit_time.clone().unwrap_or_else(Exact::one);
        for (&s, p) in &w.probabilities {
            Self::add_time(acc, s, &time * p);
        }
    }

    fn extend(&mut self, id: usize, back_paths: &[Vec<usize>]) {
        let mut times = BTreeMap::new();
        self.component_times(id, &mut times);
        for path in back_paths {
            for &s in path.iter().filter(|s| !self.work[id].members.contains(s)) {
                Self::add_time(&mut times, s, self.path_time(s));
            }
        }
        let w = &self.work[id];
        let mut absorbed = w.absorbed.clone();
        absorbed.extend(w.processed_exits.iter().copied());
        let weights = Self::normalised(times);
        let work = Work {
            iteration: w.iteration + 1,
            kind: ComponentKind::TransientMerged,
            origin: Origin::Extended { of: id },
            parent: w.parent,
            members: weights.keys().copied().collect(),
            weights: Some(weights),
            absorbed,
            entry_path: w.entry_path.clone(),
            reach: w.reach.clone(),
            arrival: w.arrival.clone(),
            probabilities: BTreeMap::new(),
            exit_time: None,
            processed_exits: Vec::new(),
        };
        self.push(work);
    }

    fn merge(&mut self, id: usize, oldest: usize, ancestors: &[usize], back_paths: &[Vec<usize>]) -> usize {
        let pos = ancestors.iter().position(|&a| a == oldest).expect("ancestor");
        let mut range: Vec<usize> = ancestors[..=pos].iter().rev().copied().collect();
        range.push(id);
        let mut times = BTreeMap::new();
        for (i, &x) in range.iter().enumerate() {
            self.component_times(x, &mut times);
            if i > 0 {
                for &s in &self.work[x].entry_path {
                    Self::add_time(&mut times, s, self.path_time(s));
                }
            }
        }
        for path in back_paths {
            for &s in path {
                if !times.contains_key(&s) {
                    Self::add_time(&mut times, s, self.path_time(s));
                }
            }
        }
        let weights = Self::normalised(times);
        let members: BTreeSet<usize> = weights.keys().copied().collect();
        let g = self.pruned.graph;
        let mut absorbed = BTreeSet::new();
        for &x in &range {
            absorbed.extend(self.work[x].absorbed.iter().copied());
            absorbed.extend(
                self.work[x]
                    .processed_exits
                    .iter()
                    .copied()
                    .filter(|&e| members.contains(&g.edge(e).target) && !self.pruned.is_kept(e)),
            );
        }
        let first = &self.work[oldest];
        let work = Work {
            iteration: self.work[id].iteration + 1,
            kind: ComponentKind::TransientMerged,
            origin: Origin::Merged { range: range.clone() },
            parent: first.parent,
            members,
            weights: Some(weights),
            absorbed,
            entry_path: first.entry_path.clone(),
            reach: first.reach.clone(),
            arrival: first.arrival.clone(),
            probabilities: BTreeMap::new(),
            exit_time: None,
            processed_exits: Vec::new(),
        };
        self.push(work)
    }

    fn finish(self) -> AnalysisReport {
        let g = self.pruned.graph;
        let mut components: Vec<ComponentRecord> = Vec::new();
        for (id, rec) in self.records.into_iter().enumerate() {
            match rec {
                Some(mut r) => {
                    // revisits may have added probability after processing
                    r.reach_probability = Quantity::rate(self.work[id].reach.clone());
                    components.push(r);
                }
                None => {
                    let w = &self.work[id];
                    components.push(ComponentRecord {
                        id,
                        iteration: w.iteration,
                        kind: w.kind,
                        origin: w.origin.clone(),
                        parent: w.parent,
                        steady_state: Vec::new(),
                        exit_time: None,
                        exits: Vec::new(),
                        branches: Vec::new(),
                        reach_probability: Quantity::rate(w.reach.clone()),
                        arrival_time: Quantity::time(w.arrival.clone()),
                    })
                }
            }
        }
        let mut iterations: Vec<IterationRecord> = Vec::new();
        for &id in &self.order {
            let it = components[id].iteration;
            match iterations.iter_mut().find(|r| r.index == it) {
                Some(r) => r.components.push(id),
                None => iterations.push(IterationRecord { index: it, components: vec![id] }),
            }
        }
        iterations.sort_by_key(|r| r.index);
        let bottom = components.iter().filter(|c| c.kind == ComponentKind::ConfirmedBottom).map(|c| c.id).collect();
        AnalysisReport {
            pruning: self.pruned.level,
            initial: g.initial,
            num_states: g.num_states(),
            num_edges: g.edges.len(),
            num_kept: self.pruned.num_kept(),
            iterations,
            components,
            bottom,
            edge_iterations: self.edge_iteration,
            diagnostics: self.diagnostics,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct OrdF64(f64);

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}
