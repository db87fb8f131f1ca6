//! Partition and run configuration files.
//!
//! ```text
//! levels P: 0 | 1..99 | 100..
//! bound P = 1000
//! prune 1
//! out results/gene
//! format text,json,dot
//! caps P=30, RNA=10
//! display M+D = M, D
//! ```

use std::collections::BTreeMap;

use crate::crn::Crn;
use crate::error::{Error, Result};

use super::partition::{Interval, LevelPartition, SpeciesLevels};

/// A named sum of species, shown in place of its parts in reports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DisplayGroup {
    pub name: String,
    pub members: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Config {
    pub levels: BTreeMap<String, Vec<Interval>>,
    pub bounds: BTreeMap<String, u64>,
    pub prune: Option<u32>,
    pub out: Option<String>,
    pub formats: Option<Vec<String>>,
    pub caps: BTreeMap<String, u64>,
    pub display: Vec<DisplayGroup>,
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn parse_assignments(line: usize, body: &str) -> Result<Vec<(String, u64)>> {
    body.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|item| {
            let (name, value) =
                item.split_once('=').ok_or_else(|| err(line, format!("expected name=value, got `{}`", item.trim())))?;
            let value = value.trim().parse().map_err(|_| err(line, format!("bad number `{}`", value.trim())))?;
            Ok((name.trim().to_string(), value))
        })
        .collect()
}

pub fn parse_config(text: &str) -> Result<Config> {
    let mut cfg = Config::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (keyword, rest) = content.split_once(char::is_whitespace).unwrap_or((content, ""));
        let rest = rest.trim();
        match keyword {
            "levels" => {
                let (name, spec) = rest.split_once(':').ok_or_else(|| err(line, "expected `levels <species>: ...`"))?;
                let intervals = spec
                    .split('|')
                    .map(|p| Interval::parse(p).ok_or_else(|| err(line, format!("bad interval `{}`", p.trim()))))
                    .collect::<Result<Vec<_>>>()?;
                if cfg.levels.insert(name.trim().to_string(), intervals).is_some() {
                    return Err(err(line, format!("levels for `{}` given twice", name.trim())));
                }
            }
            "bound" => {
                for (name, v) in parse_assignments(line, rest)? {
                    cfg.bounds.insert(name, v);
                }
            }
            "caps" => {
                for (name, v) in parse_assignments(line, rest)? {
                    cfg.caps.insert(name, v);
                }
            }
            "prune" => cfg.prune = Some(rest.parse().map_err(|_| err(line, format!("bad pruning level `{rest}`")))?),
            "out" => cfg.out = Some(rest.to_string()),
            "format" => cfg.formats = Some(rest.split(',').map(|s| s.trim().to_string()).collect()),
            "display" => {
                let (name, members) =
                    rest.split_once('=').ok_or_else(|| err(line, "expected `display <name> = <species>, ...`"))?;
                cfg.display.push(DisplayGroup {
                    name: name.trim().to_string(),
                    members: members.split(',').map(|s| s.trim().to_string()).collect(),
                });
            }
            other => return Err(err(line, format!("unknown directive `{other}`"))),
        }
    }
    Ok(cfg)
}

impl Config {
    /// The level partition for `crn`; species without `levels` get
    /// `{0}, ..., {b-1}, [b..)` where `b` is their bound, defaulting to the
    /// larger of the initial population and the reactant multiplicity.
    pub fn partition(&self, crn: &Crn) -> Result<LevelPartition> {
        for name in self.levels.keys().chain(self.bounds.keys()) {
            if crn.species_index(name).is_none() {
                return Err(Error::UndeclaredSpecies(name.clone()));
            }
        }
        let max_r = crn.max_reactant_multiplicity();
        let species = crn
            .species
            .iter()
            .map(|sp| {
                let bound = self.bounds.get(&sp.name).copied();
                match self.levels.get(&sp.name) {
                    Some(levels) => {
                        let top = levels.last().map_or(0, |i| i.lo);
                        let b = bound.unwrap_or_else(|| top.max(crn.initial[sp.index]));
                        SpeciesLevels::new(levels.clone(), b)
                    }
                    None => {
                        let b = bound.unwrap_or_else(|| crn.initial[sp.index].max(max_r[sp.index] as u64).max(1));
                        SpeciesLevels::singletons_up_to(b)
                    }
                }
            })
            .collect();
        let partition = LevelPartition::new(species);
        let violations = partition.validate(crn);
        if violations.is_empty() {
            Ok(partition)
        } else {
            Err(Error::InvalidPartition(violations))
        }
    }

    /// Oracle caps in species order; species without a cap use their bound.
    pub fn caps_for(&self, crn: &Crn, partition: &LevelPartition) -> Result<Vec<u64>> {
        for name in self.caps.keys() {
            if crn.species_index(name).is_none() {
                return Err(Error::UndeclaredSpecies(name.clone()));
            }
        }
        Ok(crn
            .species
            .iter()
            .map(|sp| self.caps.get(&sp.name).copied().unwrap_or(partition.species[sp.index].bound))
            .collect())
    }
}
