//! n-pruning: per state, keep the outgoing edges within `n` orders of
//! magnitude of the fastest one.

use crate::graph::RateGraph;
use crate::magnitude::Exact;

#[derive(Clone, Debug)]
pub struct PrunedGraph<'a> {
    pub graph: &'a RateGraph,
    pub level: u32,
    kept: Vec<bool>,
}

pub fn prune(graph: &RateGraph, n: u32) -> PrunedGraph<'_> {
    let mut kept = vec![false; graph.edges.len()];
    for s in 0..graph.num_states() {
        let out = graph.outgoing(s);
        let Some(top) = out.iter().map(|&e| graph.edge(e).magnitude).max() else { continue };
        for &e in out {
            kept[e] = i64::from(graph.edge(e).magnitude) >= i64::from(top) - i64::from(n);
        }
    }
    PrunedGraph { graph, level: n, kept }
}

impl<'a> PrunedGraph<'a> {
    pub fn is_kept(&self, edge: usize) -> bool {
        self.kept[edge]
    }

    pub fn kept_edges(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.kept.len()).filter(|&e| self.kept[e])
    }

    pub fn kept_out(&self, state: usize) -> impl Iterator<Item = usize> + '_ {
        self.graph.outgoing(state).iter().copied().filter(|&e| self.kept[e])
    }

    pub fn pruned_out(&self, state: usize) -> impl Iterator<Item = usize> + '_ {
        self.graph.outgoing(state).iter().copied().filter(|&e| !self.kept[e])
    }

    /// Sum of kept rates leaving `state`.
    pub fn staying_rate(&self, state: usize) -> Exact {
        self.kept_out(state).map(|e| self.graph.edge(e).rate.clone()).sum()
    }

    pub fn num_kept(&self) -> usize {
        self.kept.iter().filter(|&&k| k).count()
    }
}
