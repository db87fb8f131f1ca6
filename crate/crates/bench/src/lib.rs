//! Shared inputs for the benchmarks.

use std::path::PathBuf;

/// Path of a model or config file in the core corpus.
pub fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/corpus").join(name)
}
