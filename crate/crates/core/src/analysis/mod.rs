//! Iterated steady-state and transient analysis of a pruned abstract CTMC.

mod algorithm;
mod formulas;
mod report;
mod scc;

pub use algorithm::{analyze, MAX_COMPONENTS};
pub use formulas::{
    component_steady_state, exit_distribution, min_with_count, select_exit_states, time_to_exit, transient_time,
};
pub use report::{
    AnalysisReport, Branch, ComponentKind, ComponentRecord, Event, ExitRecord, IterationRecord, Origin, StateWeight,
    TransientPath,
};
pub use scc::{scc_decompose, Sccs};
