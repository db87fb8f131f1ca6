//! Population-level abstraction of a CRN into a finite CTMC.

mod build;
mod config;
mod partition;

pub use build::{
    build_abstraction, interval_rate_bounds, suggest_refinement, traversal_time, AbstractCtmc, AbstractTransition,
    RefinementHint,
};
pub use config::{parse_config, Config, DisplayGroup};
pub use partition::{AbstractState, Interval, LevelPartition, SpeciesLevels, Violation};
