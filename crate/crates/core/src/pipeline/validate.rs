//! Magnitude-level comparison of an analysis report with the explicit
//! bounded CTMC of the same network.

use std::fmt::Write as _;

use serde::Serialize;

use crate::abstraction::AbstractCtmc;
use crate::analysis::{scc_decompose, AnalysisReport, ComponentRecord};
use crate::concrete::{build_bounded_ctmc_with_limit, ctmc_state_at, transient_distribution, ConcreteCtmc};
use crate::magnitude::{from_f64, magnitude, time_magnitude, to_f64, Exact};

#[derive(Clone, Debug, PartialEq)]
pub struct OracleOptions {
    pub epsilon: f64,
    pub seeds: u64,
    pub state_limit: usize,
    /// Cap on the number of per-state sojourn comparisons.
    pub max_sojourns: usize,
    /// Sampling and uniformisation are skipped when `rate * horizon` exceeds this.
    pub max_uniformisation: f64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { epsilon: 1e-9, seeds: 1000, state_limit: 50_000, max_sojourns: 50, max_uniformisation: 1e7 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Comparison {
    pub quantity: String,
    pub subject: String,
    pub abstract_magnitude: Option<i32>,
    pub oracle_value: Option<f64>,
    pub oracle_magnitude: Option<i32>,
    pub delta: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

impl Comparison {
    fn new(
        quantity: &str,
        subject: String,
        abstract_magnitude: Option<i32>,
        oracle: Option<(f64, Option<i32>)>,
    ) -> Self {
        let (oracle_value, oracle_magnitude) = match oracle {
            Some((v, m)) => (Some(v), m),
            None => (None, None),
        };
        let delta = match (abstract_magnitude, oracle_magnitude) {
            (Some(a), Some(o)) => Some(a.abs_diff(o)),
            _ => None,
        };
        Comparison {
            quantity: quantity.into(),
            subject,
            abstract_magnitude,
            oracle_value,
            oracle_magnitude,
            delta,
            skipped: None,
        }
    }

    fn skipped(quantity: &str, subject: String, abstract_magnitude: Option<i32>, reason: impl Into<String>) -> Self {
        Comparison {
            quantity: quantity.into(),
            subject,
            abstract_magnitude,
            oracle_value: None,
            oracle_magnitude: None,
            delta: None,
            skipped: Some(reason.into()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub caps: Vec<u64>,
    pub concrete_states: Option<usize>,
    pub dropped_rate: Option<f64>,
    pub seeds: u64,
    pub horizon: Option<f64>,
    pub entries: Vec<Comparison>,
}

impl ValidationReport {
    /// Largest magnitude difference among compared entries.
    pub fn max_delta(&self) -> Option<u32> {
        self.entries.iter().filter_map(|e| e.delta).max()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("validation report serialises")
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let states = self.concrete_states.map_or("-".into(), |n| n.to_string());
        let _ = writeln!(out, "oracle: caps {:?}, {states} concrete states, {} seeds", self.caps, self.seeds);
        let _ = writeln!(out, "{:<12} {:>8} {:>8} {:>5}  subject", "quantity", "abstract", "oracle", "delta");
        let show = |m: Option<i32>| m.map_or("-".to_string(), |m| format!("10^{m}"));
        for e in &self.entries {
            let delta = e.delta.map_or("-".to_string(), |d| d.to_string());
            let _ = write!(
                out,
                "{:<12} {:>8} {:>8} {:>5}  {}",
                e.quantity,
                show(e.abstract_magnitude),
                show(e.oracle_magnitude),
                delta,
                e.subject
            );
            if let Some(reason) = &e.skipped {
                let _ = write!(out, "  (skipped: {reason})");
            }
            out.push('\n');
        }
        out
    }
}

fn prob_magnitude(v: f64) -> Option<i32> {
    from_f64(v).and_then(|x| magnitude(&x).ok())
}

fn time_mag(v: f64) -> Option<i32> {
    from_f64(v).and_then(|x| time_magnitude(&x))
}

fn subject(c: &ComponentRecord) -> String {
    let labels: Vec<&str> = c.steady_state.iter().map(|w| w.label.as_str()).collect();
    if labels.len() <= 3 {
        format!("#{} {{{}}}", c.id, labels.join(", "))
    } else {
        format!("#{} ({} states)", c.id, labels.len())
    }
}

/// Abstract state of every concrete state, if the abstraction reached it.
fn abstract_index(actmc: &AbstractCtmc, ctmc: &ConcreteCtmc) -> Vec<Option<usize>> {
    ctmc.states.iter().map(|x| actmc.index_of(&actmc.partition.abstract_state(x))).collect()
}

/// Compares report magnitudes with exact numbers of the chain bounded by
/// `caps`. Failures of individual oracle computations are reported as
/// skipped entries.
pub fn validate_against_oracle(
    actmc: &AbstractCtmc,
    report: &AnalysisReport,
    caps: &[u64],
    opts: &OracleOptions,
) -> ValidationReport {
    let mut out = ValidationReport {
        caps: caps.to_vec(),
        concrete_states: None,
        dropped_rate: None,
        seeds: opts.seeds,
        horizon: None,
        entries: Vec::new(),
    };
    let ctmc = match build_bounded_ctmc_with_limit(&actmc.crn, caps, opts.state_limit) {
        Ok(c) => c,
        Err(e) => {
            out.entries.push(Comparison::skipped("oracle", "bounded chain".into(), None, e.to_string()));
            return out;
        }
    };
    out.concrete_states = Some(ctmc.len());
    out.dropped_rate = Some(ctmc.dropped_rate);
    let owner = abstract_index(actmc, &ctmc);

    sojourns(actmc, &ctmc, &owner, opts, &mut out.entries);

    let bottoms: Vec<&ComponentRecord> = report.bottom.iter().map(|&id| report.component(id)).collect();
    let in_component = |c: &ComponentRecord| {
        let members = c.members();
        owner.iter().map(|o| o.is_some_and(|a| members.contains(&a))).collect::<Vec<bool>>()
    };

    for c in &bottoms {
        let inside = in_component(c);
        let abstract_m = c.arrival_time.magnitude;
        let h = ctmc.mean_hitting_time(|x| ctmc.index_of(x).is_some_and(|i| inside[i]))[0];
        out.entries.push(if h == 0.0 {
            Comparison::skipped("arrival", subject(c), abstract_m, "initial state already inside")
        } else if h.is_finite() {
            Comparison::new("arrival", subject(c), abstract_m, Some((h, time_mag(h))))
        } else {
            Comparison::skipped("arrival", subject(c), abstract_m, "not reached almost surely")
        });
    }

    steady_states(&ctmc, &owner, &bottoms, &mut out.entries);

    let horizon =
        bottoms.iter().map(|c| to_f64(&c.arrival_time.exact)).filter(|t| t.is_finite()).fold(0.0, f64::max) * 10.0;
    let horizon = if horizon > 0.0 { horizon } else { 1.0 };
    out.horizon = Some(horizon);
    let masks: Vec<Vec<bool>> = bottoms.iter().map(|c| in_component(c)).collect();

    let max_rate = (0..ctmc.len()).map(|s| ctmc.exit_rate(s)).fold(0.0, f64::max);
    let too_long = max_rate * horizon > opts.max_uniformisation;
    let mut hits = vec![0u64; bottoms.len()];
    if !too_long {
        for seed in 0..opts.seeds {
            let s = ctmc_state_at(&ctmc, horizon, seed);
            for (k, m) in masks.iter().enumerate() {
                if m[s] {
                    hits[k] += 1;
                }
            }
        }
    }
    for (k, c) in bottoms.iter().enumerate() {
        let freq = hits[k] as f64 / opts.seeds.max(1) as f64;
        let p = c.reach_probability.magnitude;
        let entry = if opts.seeds == 0 {
            Comparison::skipped("branch", subject(c), p, "no seeds")
        } else if too_long {
            Comparison::skipped("branch", subject(c), p, "horizon too long to sample")
        } else if hits[k] == 0 {
            Comparison::skipped("branch", subject(c), p, "never observed in sampled runs")
        } else {
            Comparison::new("branch", subject(c), p, Some((freq, prob_magnitude(freq))))
        };
        out.entries.push(entry);
    }

    if too_long {
        for c in &bottoms {
            out.entries.push(Comparison::skipped(
                "transient",
                subject(c),
                c.reach_probability.magnitude,
                "uniformisation too expensive",
            ));
        }
    } else {
        let dist = transient_distribution(&ctmc, horizon, opts.epsilon);
        for (k, c) in bottoms.iter().enumerate() {
            let mass: f64 = (0..ctmc.len()).filter(|&s| masks[k][s]).map(|s| dist[s]).sum();
            out.entries.push(Comparison::new(
                "transient",
                subject(c),
                c.reach_probability.magnitude,
                Some((mass, prob_magnitude(mass))),
            ));
        }
    }
    out
}

fn sojourns(
    actmc: &AbstractCtmc,
    ctmc: &ConcreteCtmc,
    owner: &[Option<usize>],
    opts: &OracleOptions,
    entries: &mut Vec<Comparison>,
) {
    let accelerated: Vec<usize> =
        (0..actmc.states.len()).filter(|&s| actmc.outgoing(s).any(|t| t.accelerated)).take(opts.max_sojourns).collect();
    for s in accelerated {
        let total: Exact = actmc.outgoing(s).map(|t| t.rate.clone()).sum();
        let abstract_m = time_magnitude(&(Exact::from_integer(1.into()) / total));
        let label = actmc.label(s);
        let rep = actmc.partition.concretise(&actmc.states[s]);
        let Some(start) = ctmc.index_of(&rep) else {
            entries.push(Comparison::skipped("sojourn", label, abstract_m, "representative outside the caps"));
            continue;
        };
        let h = ctmc.mean_hitting_time(|x| ctmc.index_of(x).is_none_or(|i| owner[i] != Some(s)))[start];
        entries.push(if h.is_finite() {
            Comparison::new("sojourn", label, abstract_m, Some((h, time_mag(h))))
        } else {
            Comparison::skipped("sojourn", label, abstract_m, "level never left within the caps")
        });
    }
}

fn steady_states(
    ctmc: &ConcreteCtmc,
    owner: &[Option<usize>],
    bottoms: &[&ComponentRecord],
    entries: &mut Vec<Comparison>,
) {
    let sccs = scc_decompose(ctmc.len(), |s| ctmc.rows[s].iter().map(|&(t, _)| t).collect::<Vec<_>>());
    for c in bottoms {
        let members = c.members();
        let inside: Vec<&Vec<usize>> = sccs
            .components
            .iter()
            .enumerate()
            .filter(|&(k, comp)| sccs.bottom[k] && comp.iter().all(|&s| owner[s].is_some_and(|a| members.contains(&a))))
            .map(|(_, comp)| comp)
            .collect();
        let reason = match inside.len() {
            0 => Some("no concrete bottom component inside"),
            1 => None,
            _ => Some("several concrete bottom components inside"),
        };
        if let Some(reason) = reason {
            for w in &c.steady_state {
                entries.push(Comparison::skipped("steady", w.label.clone(), w.probability.magnitude, reason));
            }
            continue;
        }
        let set = inside[0];
        let pi = match ctmc.bscc_steady_state(set) {
            Ok(pi) => pi,
            Err(e) => {
                for w in &c.steady_state {
                    entries.push(Comparison::skipped(
                        "steady",
                        w.label.clone(),
                        w.probability.magnitude,
                        e.to_string(),
                    ));
                }
                continue;
            }
        };
        for w in &c.steady_state {
            let mass: f64 = set.iter().zip(&pi).filter(|(&s, _)| owner[s] == Some(w.state)).map(|(_, p)| p).sum();
            entries.push(if mass > 0.0 {
                Comparison::new("steady", w.label.clone(), w.probability.magnitude, Some((mass, prob_magnitude(mass))))
            } else {
                Comparison::skipped("steady", w.label.clone(), w.probability.magnitude, "no concrete mass")
            });
        }
    }
}
