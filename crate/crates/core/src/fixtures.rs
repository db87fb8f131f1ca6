//! Hand-built rate graphs used by tests and benchmarks.

use crate::graph::RateGraph;
use crate::magnitude::Exact;

/// State indices of [`alternating_components`].
pub mod alt {
    pub const S0: usize = 0;
    pub const S1: usize = 1;
    pub const S2: usize = 2;
    pub const S3: usize = 3;
    pub const T: usize = 4;
    pub const U: usize = 5;
}

/// A cycle `s1 -> s2 -> s3 -> s1` (rates 10, 10, 100) entered from `s0`,
/// which also leads to the sink `t`. Slow exits: `s2 -> s0` (1),
/// `s3 -> s1` (10) and `s3 -> u` (`u_rate`, a sink).
pub fn alternating_components(u_rate: i64) -> RateGraph {
    use alt::*;
    let r = |x: i64| Exact::from_integer(x.into());
    let labels = ["s0", "s1", "s2", "s3", "t", "u"].map(String::from).to_vec();
    RateGraph::from_rates(
        labels,
        S0,
        [
            (S0, S1, r(1), "a"),
            (S0, T, r(1), "b"),
            (S1, S2, r(10), "c"),
            (S2, S3, r(10), "d"),
            (S2, S0, r(1), "e"),
            (S3, S1, r(100), "f"),
            (S3, S1, r(10), "g"),
            (S3, U, r(u_rate), "h"),
        ]
        .map(|(s, t, rate, l)| (s, t, rate, l.to_string())),
    )
    .expect("positive rates")
}
