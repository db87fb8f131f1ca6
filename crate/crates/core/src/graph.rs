//! Labelled rate graphs: the transition structure shared by abstraction,
//! pruning and analysis.

use crate::error::Result;
use crate::magnitude::{magnitude, Exact};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub rate: Exact,
    /// `floor(log10(rate))`.
    pub magnitude: i32,
    pub label: String,
}

/// A finite CTMC-like graph with exact rates. Edges are stored grouped by
/// source state in a fixed order, which is the tie-break order everywhere.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RateGraph {
    pub state_labels: Vec<String>,
    pub initial: usize,
    pub edges: Vec<Edge>,
    out: Vec<Vec<usize>>,
}

impl RateGraph {
    pub fn new(state_labels: Vec<String>, initial: usize, edges: Vec<Edge>) -> Self {
        let mut edges = edges;
        edges.sort_by_key(|e| e.source);
        let mut out = vec![Vec::new(); state_labels.len()];
        for (i, e) in edges.iter().enumerate() {
            out[e.source].push(i);
        }
        RateGraph { state_labels, initial, edges, out }
    }

    /// Builds a graph from `(source, target, rate, label)` tuples.
    pub fn from_rates(
        state_labels: Vec<String>,
        initial: usize,
        edges: impl IntoIterator<Item = (usize, usize, Exact, String)>,
    ) -> Result<Self> {
        let edges = edges
            .into_iter()
            .map(|(source, target, rate, label)| Ok(Edge { source, target, magnitude: magnitude(&rate)?, rate, label }))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(state_labels, initial, edges))
    }

    pub fn num_states(&self) -> usize {
        self.state_labels.len()
    }

    /// Indices of the edges leaving `state`.
    pub fn outgoing(&self, state: usize) -> &[usize] {
        &self.out[state]
    }

    pub fn edge(&self, id: usize) -> &Edge {
        &self.edges[id]
    }

    /// Same graph with every rate multiplied by `factor`.
    pub fn scaled(&self, factor: &Exact) -> Result<Self> {
        Self::from_rates(
            self.state_labels.clone(),
            self.initial,
            self.edges.iter().map(|e| (e.source, e.target, &e.rate * factor, e.label.clone())),
        )
    }
}
