use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use sqcrn_core::pipeline::{load_config, load_model, run_validation, Format};
use sqcrn_core::{run_pipeline, RunConfig};

#[derive(Parser)]
#[command(name = "sqcrn", version, about = "Order-of-magnitude analysis of stochastic reaction networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the abstraction, prune it and print the analysis.
    Analyze {
        model: PathBuf,
        #[arg(long)]
        config: PathBuf,
        /// Pruning level n (keep edges within n orders of the fastest).
        #[arg(long)]
        prune: Option<u32>,
        /// Directory for the output files; without it the text report goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Comma-separated list of text, json, dot.
        #[arg(long, value_delimiter = ',')]
        format: Option<Vec<String>>,
    },
    /// Compare the analysis with the explicit bounded chain.
    Validate {
        model: PathBuf,
        #[arg(long)]
        config: PathBuf,
        /// Per-species population caps, e.g. `P=30,RNA=10` or `30,10`.
        #[arg(long)]
        caps: Option<String>,
        #[arg(long, default_value_t = 1000)]
        seeds: u64,
        #[arg(long)]
        prune: Option<u32>,
        /// Print the comparison as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Parse a model and, optionally, check a partition against it.
    Check {
        model: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn parse_caps(text: &str, species: &[String]) -> Result<Vec<u64>> {
    let items: Vec<&str> = text.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if items.iter().all(|i| !i.contains('=')) {
        let caps = items
            .iter()
            .map(|i| i.parse::<u64>().with_context(|| format!("bad cap `{i}`")))
            .collect::<Result<Vec<_>>>()?;
        anyhow::ensure!(caps.len() == species.len(), "expected {} caps, got {}", species.len(), caps.len());
        return Ok(caps);
    }
    let mut caps = vec![None; species.len()];
    for item in items {
        let (name, value) = item.split_once('=').with_context(|| format!("expected name=value, got `{item}`"))?;
        let i = species
            .iter()
            .position(|s| s == name.trim())
            .with_context(|| format!("unknown species `{}`", name.trim()))?;
        caps[i] = Some(value.trim().parse::<u64>().with_context(|| format!("bad cap `{}`", value.trim()))?);
    }
    caps.into_iter().zip(species).map(|(c, s)| c.with_context(|| format!("no cap given for `{s}`"))).collect()
}

fn formats(names: Option<Vec<String>>) -> Result<Option<Vec<Format>>> {
    names.map(|n| n.iter().map(|f| f.parse::<Format>().map_err(anyhow::Error::from)).collect()).transpose()
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Analyze { model, config, prune, out, format } => {
            let mut run = RunConfig::new(model, config);
            run.prune = prune;
            run.out = out;
            run.formats = formats(format)?;
            let outcome = run_pipeline(&run)?;
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            if outcome.written.is_empty() {
                for a in &outcome.artifacts {
                    print!("{}", a.contents);
                }
            } else {
                for p in &outcome.written {
                    eprintln!("wrote {}", p.display());
                }
            }
        }
        Command::Validate { model, config, caps, seeds, prune, json } => {
            let crn = load_model(&model)?;
            let mut run = RunConfig::new(model, config);
            run.prune = prune;
            run.oracle.seeds = seeds;
            if let Some(text) = caps {
                let names: Vec<String> = crn.species.iter().map(|s| s.name.clone()).collect();
                run.caps = Some(parse_caps(&text, &names)?);
            }
            let (outcome, validation) = run_validation(&run)?;
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            if json {
                println!("{}", validation.to_json());
            } else {
                print!("{}", validation.render_text());
            }
        }
        Command::Check { model, config } => {
            let crn = load_model(&model)?;
            println!("{}: {} species, {} reactions", model.display(), crn.species.len(), crn.reactions.len());
            if let Some(path) = config {
                let cfg = load_config(&path)?;
                let partition = cfg.partition(&crn).with_context(|| format!("{}", path.display()))?;
                let sizes: Vec<String> = crn
                    .species
                    .iter()
                    .zip(&partition.species)
                    .map(|(s, l)| format!("{}:{}", s.name, l.levels.len()))
                    .collect();
                println!("partition ok ({} levels)", sizes.join(" "));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
