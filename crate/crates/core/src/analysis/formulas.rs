//! Magnitude-level estimates for a single component, in exact arithmetic.

use num::{One, Signed, Zero};

use crate::magnitude::{magnitude, Exact};

fn int(n: usize) -> Exact {
    Exact::from_integer(n.into())
}

/// Minimum positive value and its number of occurrences.
pub fn min_with_count(values: &[Exact]) -> Option<(Exact, usize)> {
    let min = values.iter().filter(|v| v.is_positive()).min()?.clone();
    let m = values.iter().filter(|&v| *v == min).count();
    Some((min, m))
}

/// `minStay / (m * stay(s))` for every state; a component without staying
/// rates (a single absorbing state) gets weight 1.
pub fn component_steady_state(staying: &[Exact]) -> Vec<Exact> {
    match min_with_count(staying) {
        None => vec![Exact::one(); staying.len()],
        Some((min, m)) => staying.iter().map(|s| &min / (int(m) * s)).collect(),
    }
}

/// States minimising `stay(s) / exit(s)` at magnitude resolution; states
/// without an exit are never chosen. Empty iff no state has an exit.
pub fn select_exit_states(staying: &[Exact], exiting: &[Option<Exact>]) -> Vec<usize> {
    let ratios: Vec<Option<i32>> = staying
        .iter()
        .zip(exiting)
        .map(|(s, e)| {
            e.as_ref().map(|e| {
                let ratio = Exact::new_raw(s.numer() * e.denom(), s.denom() * e.numer());
                magnitude(&ratio).expect("positive ratio")
            })
        })
        .collect();
    let Some(best) = ratios.iter().flatten().min().copied() else { return Vec::new() };
    (0..ratios.len()).filter(|&i| ratios[i] == Some(best)).collect()
}

/// `1 / (k * weight(s) * exit(s))`; with the steady-state weight above this
/// is `stay(s) * m / (k * minStay * exit(s))`.
pub fn time_to_exit(weight: &Exact, exit_states: usize, exiting: &Exact) -> Exact {
    Exact::one() / (int(exit_states) * weight * exiting)
}

/// Normalised `weight(s) * exit(s)` over the exit states.
pub fn exit_distribution(weights: &[Exact], exiting: &[Exact]) -> Vec<Exact> {
    let flux: Vec<Exact> = weights.iter().zip(exiting).map(|(w, e)| w * e).collect();
    let total: Exact = flux.iter().sum();
    flux.into_iter().map(|f| f / &total).collect()
}

/// `m / minRate` along a path, zero for an empty one.
pub fn transient_time(rates: &[Exact]) -> Exact {
    match min_with_count(rates) {
        None => Exact::zero(),
        Some((min, m)) => int(m) / min,
    }
}
