//! Semi-quantitative abstraction and analysis of stochastic chemical
//! reaction networks.

pub mod abstraction;
pub mod analysis;
pub mod concrete;
pub mod crn;
pub mod error;
pub mod fixtures;
pub mod graph;
pub mod magnitude;
pub mod pipeline;
pub mod pruning;

pub use abstraction::{build_abstraction, parse_config, AbstractCtmc, Config, LevelPartition};
pub use analysis::{analyze, AnalysisReport};
pub use crn::{parse_crn, Crn};
pub use error::{Error, Result};
pub use graph::RateGraph;
pub use pipeline::{run_pipeline, validate_against_oracle, RunConfig};
pub use pruning::{prune, PrunedGraph};
