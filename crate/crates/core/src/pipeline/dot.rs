//! Graphviz export of abstractions and analysed pruned graphs.

use std::fmt::Write as _;

use crate::analysis::AnalysisReport;
use crate::graph::RateGraph;
use crate::pruning::PrunedGraph;

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];

fn quote(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for ch in text.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn header(out: &mut String, name: &str) {
    let _ = writeln!(out, "digraph {} {{", quote(name));
    let _ = writeln!(out, "  rankdir=LR;");
    let _ = writeln!(out, "  node [shape=box, fontname=\"Helvetica\"];");
    let _ = writeln!(out, "  edge [fontname=\"Helvetica\", fontsize=10];");
}

fn node(out: &mut String, graph: &RateGraph, s: usize) {
    let extra = if s == graph.initial { ", style=bold, peripheries=2" } else { "" };
    let _ = writeln!(out, "  s{s} [label={}{extra}];", quote(&graph.state_labels[s]));
}

/// Every state and transition; edges removed by `pruned` are dashed.
pub fn abstraction_dot(graph: &RateGraph, pruned: Option<&PrunedGraph<'_>>) -> String {
    let mut out = String::new();
    header(&mut out, "abstraction");
    for s in 0..graph.num_states() {
        node(&mut out, graph, s);
    }
    for (id, e) in graph.edges.iter().enumerate() {
        let dashed = pruned.is_some_and(|p| !p.is_kept(id));
        let style = if dashed { ", style=dashed" } else { "" };
        let _ = writeln!(
            out,
            "  s{} -> s{} [label={}{style}];",
            e.source,
            e.target,
            quote(&format!("{}, 10^{}", e.label, e.magnitude))
        );
    }
    out.push_str("}\n");
    out
}

/// Kept edges plus the exits the analysis followed, coloured by the
/// iteration in which they were first reached. Unreached edges are grey.
pub fn pruned_dot(pruned: &PrunedGraph<'_>, report: &AnalysisReport) -> String {
    let graph = pruned.graph;
    let mut out = String::new();
    header(&mut out, &format!("pruned_{}", pruned.level));
    let shown: Vec<usize> =
        (0..graph.edges.len()).filter(|&e| pruned.is_kept(e) || report.edge_iterations[e].is_some()).collect();
    let mut visible = vec![false; graph.num_states()];
    visible[graph.initial] = true;
    for &e in &shown {
        visible[graph.edge(e).source] = true;
        visible[graph.edge(e).target] = true;
    }
    for s in (0..graph.num_states()).filter(|&s| visible[s]) {
        node(&mut out, graph, s);
    }
    for e in shown {
        let edge = graph.edge(e);
        let mut label = format!("{}, 10^{}", edge.label, edge.magnitude);
        let mut attrs = Vec::new();
        match report.edge_iterations[e] {
            Some(i) => {
                let _ = write!(label, ", i{i}");
                attrs.push(format!("color={}", quote(PALETTE[i as usize % PALETTE.len()])));
                attrs.push(format!("class={}", quote(&format!("iteration-{i}"))));
            }
            None => attrs.push("color=\"#bbbbbb\"".into()),
        }
        if !pruned.is_kept(e) {
            attrs.push("style=dashed".into());
        }
        let _ =
            writeln!(out, "  s{} -> s{} [label={}, {}];", edge.source, edge.target, quote(&label), attrs.join(", "));
    }
    out.push_str("}\n");
    out
}
