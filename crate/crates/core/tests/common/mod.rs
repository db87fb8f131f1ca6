#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use sqcrn_core::analysis::{AnalysisReport, ComponentRecord, Event, Origin};
use sqcrn_core::pipeline::{analyse_model, load_config, load_model};
use sqcrn_core::AbstractCtmc;

pub fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus").join(name)
}

pub fn analyse(model: &str, config: &str, level: u32) -> (AbstractCtmc, AnalysisReport) {
    let crn = load_model(&corpus(model)).expect("model parses");
    let cfg = load_config(&corpus(config)).expect("config parses");
    analyse_model(&crn, &cfg, level).expect("analysis runs")
}

/// Level index of `species` in abstract state `state`.
pub fn level(actmc: &AbstractCtmc, state: usize, species: &str) -> usize {
    let i = actmc.crn.species_index(species).expect("species exists");
    actmc.states[state].0[i]
}

/// Components entered from `c`: branch targets, merges and extensions.
pub fn successors(report: &AnalysisReport, c: &ComponentRecord) -> Vec<usize> {
    let mut out: Vec<usize> = c
        .all_branches()
        .filter_map(|b| match b.event {
            Event::New { component } | Event::Revisit { component } => Some(component),
            Event::MergeRange { merged, .. } => Some(merged),
            Event::BackToCurrent => None,
        })
        .collect();
    out.extend(
        report.components.iter().filter(|d| matches!(d.origin, Origin::Extended { of } if of == c.id)).map(|d| d.id),
    );
    out
}

/// Components reachable from `start` (inclusive) in the component graph.
pub fn descendants(report: &AnalysisReport, start: usize) -> BTreeSet<usize> {
    let mut seen = BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(c) = stack.pop() {
        for d in successors(report, report.component(c)) {
            if seen.insert(d) {
                stack.push(d);
            }
        }
    }
    seen
}
