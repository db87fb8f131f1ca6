use std::fmt;

use crate::crn::{ConcreteState, Crn};

/// An interval of populations; `hi == None` is unbounded above.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    pub lo: u64,
    pub hi: Option<u64>,
}

impl Interval {
    pub fn singleton(v: u64) -> Self {
        Interval { lo: v, hi: Some(v) }
    }

    pub fn bounded(lo: u64, hi: u64) -> Self {
        Interval { lo, hi: Some(hi) }
    }

    pub fn from(lo: u64) -> Self {
        Interval { lo, hi: None }
    }

    pub fn contains(&self, v: u64) -> bool {
        v >= self.lo && self.hi.is_none_or(|h| v <= h)
    }

    pub fn is_singleton(&self) -> bool {
        self.hi == Some(self.lo)
    }

    /// Parses `5`, `1..5` or `21..`.
    pub fn parse(text: &str) -> Option<Self> {
        let text = text.trim();
        match text.split_once("..") {
            Some((lo, "")) => Some(Interval::from(lo.trim().parse().ok()?)),
            Some((lo, hi)) => Some(Interval::bounded(lo.trim().parse().ok()?, hi.trim().parse().ok()?)),
            None => Some(Interval::singleton(text.parse().ok()?)),
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.hi {
            Some(h) if h == self.lo => write!(f, "{h}"),
            Some(h) => write!(f, "{}..{h}", self.lo),
            None => write!(f, "{}..", self.lo),
        }
    }
}

/// Ordered levels of one species plus the population bound used to
/// concretise the unbounded top level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpeciesLevels {
    pub levels: Vec<Interval>,
    pub bound: u64,
}

impl SpeciesLevels {
    pub fn new(levels: Vec<Interval>, bound: u64) -> Self {
        SpeciesLevels { levels, bound }
    }

    /// `{0}, {1}, ..., {b-1}, [b..)` with bound `b`.
    pub fn singletons_up_to(b: u64) -> Self {
        let mut levels: Vec<Interval> = (0..b).map(Interval::singleton).collect();
        levels.push(Interval::from(b));
        SpeciesLevels { levels, bound: b }
    }

    pub fn level_of(&self, v: u64) -> usize {
        self.levels.iter().position(|i| i.contains(v)).expect("levels cover the naturals")
    }

    /// Upper end of a level, the bound for the top level.
    pub fn upper(&self, level: usize) -> u64 {
        self.levels[level].hi.unwrap_or(self.bound.max(self.levels[level].lo))
    }

    /// Floor midpoint of a level, the top level clipped at the bound.
    pub fn representative(&self, level: usize) -> u64 {
        let lo = self.levels[level].lo;
        (lo + self.upper(level)) / 2
    }

    pub fn is_top(&self, level: usize) -> bool {
        level + 1 == self.levels.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    SpeciesCount { expected: usize, found: usize },
    Empty { species: String },
    NotStartingAtZero { species: String, lo: u64 },
    Inverted { species: String, interval: Interval },
    NonContiguous { species: String, previous: Interval, next: Interval },
    TopBounded { species: String },
    MissingSingleton { species: String, value: u64 },
    BoundBelowTop { species: String, bound: u64, top: u64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SpeciesCount { expected, found } => {
                write!(f, "expected levels for {expected} species, found {found}")
            }
            Violation::Empty { species } => write!(f, "{species}: no levels"),
            Violation::NotStartingAtZero { species, lo } => {
                write!(f, "{species}: first level starts at {lo}, not 0")
            }
            Violation::Inverted { species, interval } => write!(f, "{species}: empty interval {interval}"),
            Violation::NonContiguous { species, previous, next } => {
                write!(f, "{species}: levels {previous} and {next} are not contiguous")
            }
            Violation::TopBounded { species } => write!(f, "{species}: last level must be unbounded"),
            Violation::MissingSingleton { species, value } => {
                write!(f, "{species}: singleton level {{{value}}} required by reaction enabledness")
            }
            Violation::BoundBelowTop { species, bound, top } => {
                write!(f, "{species}: bound {bound} below top level start {top}")
            }
        }
    }
}

/// Per-species interval partitions of the naturals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelPartition {
    pub species: Vec<SpeciesLevels>,
}

/// Vector of level indices, one per species.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AbstractState(pub Vec<usize>);

impl LevelPartition {
    pub fn new(species: Vec<SpeciesLevels>) -> Self {
        LevelPartition { species }
    }

    /// All violations of the partition invariants with respect to `crn`.
    pub fn validate(&self, crn: &Crn) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.species.len() != crn.num_species() {
            out.push(Violation::SpeciesCount { expected: crn.num_species(), found: self.species.len() });
            return out;
        }
        let max_r = crn.max_reactant_multiplicity();
        for (l, sl) in self.species.iter().enumerate() {
            let name = crn.species[l].name.clone();
            let Some(first) = sl.levels.first() else {
                out.push(Violation::Empty { species: name });
                continue;
            };
            if first.lo != 0 {
                out.push(Violation::NotStartingAtZero { species: name.clone(), lo: first.lo });
            }
            for iv in &sl.levels {
                if iv.hi.is_some_and(|h| h < iv.lo) {
                    out.push(Violation::Inverted { species: name.clone(), interval: *iv });
                }
            }
            for w in sl.levels.windows(2) {
                let contiguous = w[0].hi.is_some_and(|h| h + 1 == w[1].lo);
                if !contiguous {
                    out.push(Violation::NonContiguous { species: name.clone(), previous: w[0], next: w[1] });
                }
            }
            let top = sl.levels.last().expect("non-empty");
            if top.hi.is_some() {
                out.push(Violation::TopBounded { species: name.clone() });
            }
            for v in 0..max_r[l] as u64 {
                if !sl.levels.contains(&Interval::singleton(v)) {
                    out.push(Violation::MissingSingleton { species: name.clone(), value: v });
                }
            }
            if sl.bound < top.lo {
                out.push(Violation::BoundBelowTop { species: name.clone(), bound: sl.bound, top: top.lo });
            }
        }
        out
    }

    pub fn abstract_state(&self, state: &[u64]) -> AbstractState {
        AbstractState(self.species.iter().zip(state).map(|(sl, &x)| sl.level_of(x)).collect())
    }

    /// The representative concrete state of an abstract state.
    pub fn concretise(&self, a: &AbstractState) -> ConcreteState {
        self.species.iter().zip(&a.0).map(|(sl, &lv)| sl.representative(lv)).collect()
    }

    pub fn interval(&self, species: usize, level: usize) -> Interval {
        self.species[species].levels[level]
    }

    pub fn label(&self, crn: &Crn, a: &AbstractState) -> String {
        let parts: Vec<String> =
            a.0.iter()
                .enumerate()
                .map(|(l, &lv)| format!("{}:{}", crn.species[l].name, self.interval(l, lv)))
                .collect();
        parts.join(" ")
    }

    /// True iff `a` lies inside a level of `coarse` for every species, i.e.
    /// this partition refines `coarse` at `a`; returns the coarse state.
    pub fn coarsen(&self, a: &AbstractState, coarse: &LevelPartition) -> Option<AbstractState> {
        let mut out = Vec::with_capacity(a.0.len());
        for (l, &lv) in a.0.iter().enumerate() {
            let iv = self.interval(l, lv);
            let c = &coarse.species[l];
            let k = c.level_of(iv.lo);
            let fits = match (iv.hi, c.levels[k].hi) {
                (_, None) => true,
                (Some(h), Some(ch)) => h <= ch,
                (None, Some(_)) => false,
            };
            if !fits {
                return None;
            }
            out.push(k);
        }
        Some(AbstractState(out))
    }
}
