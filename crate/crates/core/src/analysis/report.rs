use std::fmt::Write as _;

use serde::Serialize;

use crate::magnitude::Quantity;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComponentKind {
    /// The artificial component holding only the initial state.
    Initial,
    /// A bottom SCC of the pruned graph that turned out to have exits.
    CandidateBottom,
    /// No exits left: final long-run behaviour.
    ConfirmedBottom,
    /// Grown by transient paths or merged from several components.
    TransientMerged,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Origin {
    Initial,
    New { from: usize },
    Extended { of: usize },
    Merged { range: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "event", rename_all = "kebab-case")]
pub enum Event {
    /// The exit leads back into the component being analysed.
    BackToCurrent,
    /// The exit leads into ancestor `from`; components `from..=current`
    /// are merged into `merged`.
    MergeRange { from: usize, merged: usize },
    /// A bottom SCC not seen before, queued as `component`.
    New { component: usize },
    /// A component created earlier that is not an ancestor.
    Revisit { component: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransientPath {
    pub states: Vec<usize>,
    pub labels: Vec<String>,
    pub min_rate: Option<Quantity>,
    pub occurrences: usize,
    pub time: Quantity,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Branch {
    #[serde(flatten)]
    pub event: Event,
    pub path: TransientPath,
    /// Probability of this branch given the exit was taken.
    pub probability: Quantity,
    /// Probability of the whole history leading here.
    pub reach: Quantity,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExitRecord {
    pub state: usize,
    pub state_label: String,
    pub edge: usize,
    pub reaction: String,
    pub target: usize,
    pub target_label: String,
    /// The exit is a kept edge leaving a merged component.
    pub kept: bool,
    pub staying_rate: Quantity,
    pub exiting_rate: Quantity,
    pub time_to_exit: Quantity,
    pub share: Quantity,
    pub branches: Vec<Branch>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StateWeight {
    pub state: usize,
    pub label: String,
    /// Unnormalised estimate as computed for the component.
    pub weight: Quantity,
    pub probability: Quantity,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentRecord {
    pub id: usize,
    pub iteration: u32,
    pub kind: ComponentKind,
    pub origin: Origin,
    pub parent: Option<usize>,
    pub steady_state: Vec<StateWeight>,
    /// Expected time until one of the selected exits is taken.
    pub exit_time: Option<Quantity>,
    pub exits: Vec<ExitRecord>,
    /// Exploration from the initial state (initial component only).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub branches: Vec<Branch>,
    pub reach_probability: Quantity,
    pub arrival_time: Quantity,
}

impl ComponentRecord {
    pub fn members(&self) -> Vec<usize> {
        self.steady_state.iter().map(|w| w.state).collect()
    }

    pub fn all_branches(&self) -> impl Iterator<Item = &Branch> {
        self.branches.iter().chain(self.exits.iter().flat_map(|e| e.branches.iter()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IterationRecord {
    pub index: u32,
    pub components: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AnalysisReport {
    pub pruning: u32,
    pub initial: usize,
    pub num_states: usize,
    pub num_edges: usize,
    pub num_kept: usize,
    pub iterations: Vec<IterationRecord>,
    pub components: Vec<ComponentRecord>,
    pub bottom: Vec<usize>,
    /// Iteration index per edge of the graph, if the edge was reached.
    pub edge_iterations: Vec<Option<u32>>,
    pub diagnostics: Vec<String>,
}

fn mag(q: &Quantity) -> String {
    match q.magnitude {
        Some(m) => format!("10^{m}"),
        None => "0".into(),
    }
}

fn set(labels: &[String]) -> String {
    format!("{{{}}}", labels.join(", "))
}

impl AnalysisReport {
    pub fn component(&self, id: usize) -> &ComponentRecord {
        &self.components[id]
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serialises")
    }

    /// Human-readable rendering, magnitudes first.
    pub fn render_text(&self, time_unit: Option<&str>) -> String {
        let unit = time_unit.map(|u| format!(" {u}")).unwrap_or_default();
        let mut out = String::new();
        let _ = writeln!(
            out,
            "pruning level {}: {} states, {} transitions, {} kept",
            self.pruning, self.num_states, self.num_edges, self.num_kept
        );
        for it in &self.iterations {
            let _ = writeln!(out, "\niteration {}", it.index);
            for &id in &it.components {
                self.render_component(&mut out, &self.components[id], &unit);
            }
        }
        let _ = writeln!(out, "\nbottom components:");
        for &id in &self.bottom {
            let c = &self.components[id];
            let labels: Vec<String> = c.steady_state.iter().map(|w| w.label.clone()).collect();
            let _ = writeln!(
                out,
                "  #{id} {} reached with probability {} after {}{unit}",
                set(&labels),
                mag(&c.reach_probability),
                mag(&c.arrival_time)
            );
        }
        for d in &self.diagnostics {
            let _ = writeln!(out, "warning: {d}");
        }
        out
    }

    fn render_component(&self, out: &mut String, c: &ComponentRecord, unit: &str) {
        let kind = serde_json::to_value(c.kind).expect("kind").as_str().unwrap_or_default().to_string();
        let _ = writeln!(out, "  component #{} ({kind}, {} states)", c.id, c.steady_state.len());
        for w in &c.steady_state {
            let _ = writeln!(out, "    {}  steady state {}", w.label, mag(&w.probability));
        }
        if let Some(t) = &c.exit_time {
            let _ = writeln!(out, "    exit time {}{unit}", mag(t));
        }
        for b in &c.branches {
            render_branch(out, b, unit);
        }
        for e in &c.exits {
            let _ = writeln!(
                out,
                "    exit {} --{}--> {}  share {}  staying {}  exiting {}  time {}{unit}",
                e.state_label,
                e.reaction,
                e.target_label,
                mag(&e.share),
                mag(&e.staying_rate),
                mag(&e.exiting_rate),
                mag(&e.time_to_exit)
            );
            for b in &e.branches {
                render_branch(out, b, unit);
            }
        }
    }
}

fn render_branch(out: &mut String, b: &Branch, unit: &str) {
    let what = match &b.event {
        Event::BackToCurrent => "back to current".to_string(),
        Event::MergeRange { from, merged } => format!("merge #{from}.. into #{merged}"),
        Event::New { component } => format!("new #{component}"),
        Event::Revisit { component } => format!("revisit #{component}"),
    };
    let _ = writeln!(
        out,
        "      -> {what}  probability {}  path of {} states, time {}{unit}",
        mag(&b.probability),
        b.path.states.len(),
        mag(&b.path.time)
    );
}
