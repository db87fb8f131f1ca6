//! File-level composition: parse, abstract, prune, analyse, render.

mod dot;
mod validate;

use std::path::{Path, PathBuf};

pub use dot::{abstraction_dot, pruned_dot};
pub use validate::{validate_against_oracle, Comparison, OracleOptions, ValidationReport};

use crate::abstraction::{
    build_abstraction, parse_config, suggest_refinement, AbstractCtmc, Config, DisplayGroup, Interval,
};
use crate::analysis::{analyze, AnalysisReport};
use crate::crn::{parse_crn, Crn};
use crate::error::{Error, Result};
use crate::pruning::prune;

/// JSON schema of [`AnalysisReport::to_json`].
pub const REPORT_SCHEMA: &str = include_str!("../../schema/report.schema.json");

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Format {
    Text,
    Json,
    Dot,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            "dot" => Ok(Format::Dot),
            other => Err(Error::Invalid(format!("unknown format `{other}` (expected text, json or dot)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub model: PathBuf,
    pub config: PathBuf,
    /// Overrides the pruning level of the config file; default 0.
    pub prune: Option<u32>,
    /// Overrides the output directory of the config file.
    pub out: Option<PathBuf>,
    /// Overrides the formats of the config file; default text.
    pub formats: Option<Vec<Format>>,
    /// Oracle caps in species order, overriding the config file.
    pub caps: Option<Vec<u64>>,
    pub oracle: OracleOptions,
}

impl RunConfig {
    pub fn new(model: impl Into<PathBuf>, config: impl Into<PathBuf>) -> Self {
        RunConfig {
            model: model.into(),
            config: config.into(),
            prune: None,
            out: None,
            formats: None,
            caps: None,
            oracle: OracleOptions::default(),
        }
    }
}

/// A rendered output document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Artifact {
    pub file_name: String,
    pub contents: String,
}

#[derive(Debug)]
pub struct Outcome {
    pub abstraction: AbstractCtmc,
    pub report: AnalysisReport,
    pub level: u32,
    pub artifacts: Vec<Artifact>,
    /// Where the artifacts were written, if an output directory was set.
    pub written: Vec<PathBuf>,
    /// Abstraction diagnostics and refinement suggestions.
    pub warnings: Vec<String>,
}

pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })
}

/// Parses a model file; errors carry the path.
pub fn load_model(path: &Path) -> Result<Crn> {
    parse_crn(&read_file(path)?).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

pub fn load_config(path: &Path) -> Result<Config> {
    parse_config(&read_file(path)?).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

/// State labels with every display group shown as the sum of its members.
pub fn display_labels(actmc: &AbstractCtmc, groups: &[DisplayGroup]) -> Result<Vec<String>> {
    let crn = &actmc.crn;
    let mut group_of = vec![None; crn.num_species()];
    for (g, group) in groups.iter().enumerate() {
        for m in &group.members {
            let i = crn.species_index(m).ok_or_else(|| Error::UndeclaredSpecies(m.clone()))?;
            group_of[i] = Some(g);
        }
    }
    Ok(actmc
        .states
        .iter()
        .map(|a| {
            let mut parts = Vec::new();
            let mut done = vec![false; groups.len()];
            for (l, &lv) in a.0.iter().enumerate() {
                match group_of[l] {
                    None => parts.push(format!("{}:{}", crn.species[l].name, actmc.partition.interval(l, lv))),
                    Some(g) if !done[g] => {
                        done[g] = true;
                        let mut sum = Interval::singleton(0);
                        for (k, &kl) in a.0.iter().enumerate().filter(|&(k, _)| group_of[k] == Some(g)) {
                            let iv = actmc.partition.interval(k, kl);
                            sum = Interval { lo: sum.lo + iv.lo, hi: sum.hi.zip(iv.hi).map(|(x, y)| x + y) };
                        }
                        parts.push(format!("{}:{sum}", groups[g].name));
                    }
                    Some(_) => {}
                }
            }
            parts.join(" ")
        })
        .collect())
}

/// Abstraction, pruning and analysis of `crn` under `cfg`.
pub fn analyse_model(crn: &Crn, cfg: &Config, level: u32) -> Result<(AbstractCtmc, AnalysisReport)> {
    let partition = cfg.partition(crn)?;
    let mut actmc = build_abstraction(crn, &partition)?;
    if !cfg.display.is_empty() {
        actmc.graph.state_labels = display_labels(&actmc, &cfg.display)?;
    }
    let report = analyze(&prune(&actmc.graph, level));
    Ok((actmc, report))
}

/// Runs the whole pipeline and writes the requested artifacts.
pub fn run_pipeline(run: &RunConfig) -> Result<Outcome> {
    let crn = load_model(&run.model)?;
    let cfg = load_config(&run.config)?;
    let level = run.prune.or(cfg.prune).unwrap_or(0);
    let formats = match &run.formats {
        Some(f) => f.clone(),
        None => match &cfg.formats {
            Some(names) => names.iter().map(|n| n.parse()).collect::<Result<Vec<Format>>>()?,
            None => vec![Format::Text],
        },
    };
    let (abstraction, report) = analyse_model(&crn, &cfg, level)?;

    let mut warnings = abstraction.diagnostics.clone();
    warnings.extend(suggest_refinement(&abstraction, 2).iter().map(|h| h.describe(&abstraction)));

    let stem = run.model.file_stem().and_then(|s| s.to_str()).unwrap_or("model").to_string();
    let mut artifacts = Vec::new();
    let mut formats = formats;
    formats.sort();
    formats.dedup();
    for f in formats {
        match f {
            Format::Text => artifacts.push(Artifact {
                file_name: format!("{stem}.report.txt"),
                contents: report.render_text(crn.time_unit.as_deref()),
            }),
            Format::Json => {
                artifacts.push(Artifact { file_name: format!("{stem}.report.json"), contents: report.to_json() + "\n" })
            }
            Format::Dot => {
                let pruned = prune(&abstraction.graph, level);
                artifacts.push(Artifact {
                    file_name: format!("{stem}.abstraction.dot"),
                    contents: abstraction_dot(&abstraction.graph, Some(&pruned)),
                });
                artifacts
                    .push(Artifact { file_name: format!("{stem}.pruned.dot"), contents: pruned_dot(&pruned, &report) });
            }
        }
    }

    let out_dir = run.out.clone().or_else(|| cfg.out.as_ref().map(PathBuf::from));
    let mut written = Vec::new();
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(&dir).map_err(|source| Error::Io { path: dir.display().to_string(), source })?;
        for a in &artifacts {
            let path = dir.join(&a.file_name);
            std::fs::write(&path, &a.contents)
                .map_err(|source| Error::Io { path: path.display().to_string(), source })?;
            written.push(path);
        }
    }
    Ok(Outcome { abstraction, report, level, artifacts, written, warnings })
}

/// Runs the analysis and compares it with the bounded oracle.
pub fn run_validation(run: &RunConfig) -> Result<(Outcome, ValidationReport)> {
    let outcome = run_pipeline(&RunConfig { out: None, formats: Some(Vec::new()), ..run.clone() })?;
    let caps = match &run.caps {
        Some(c) => c.clone(),
        None => {
            let cfg = load_config(&run.config)?;
            cfg.caps_for(&outcome.abstraction.crn, &outcome.abstraction.partition)?
        }
    };
    let validation = validate_against_oracle(&outcome.abstraction, &outcome.report, &caps, &run.oracle);
    Ok((outcome, validation))
}
