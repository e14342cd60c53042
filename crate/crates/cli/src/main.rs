mod commands;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use geocomb::equidist::{Direction, Mode};
use geocomb::presets;
use serde::Serialize;

use crate::commands::{Output, Table};
use crate::config::{ExperimentConfig, TermSpec};

/// Counting and equidistribution experiments on combed matrix groups.
#[derive(Parser, Debug)]
#[command(name = "geocomb", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Args, Debug)]
struct Global {
    /// JSON experiment config; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Preset name or `user:<path>` to an automaton file.
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Basepoint coordinates, comma separated (`sqrt(2)-1,1/3`).
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    basepoint: Option<Vec<String>>,
    /// Test function term `K[:RE[:IM]]`, e.g. `1,0` or `-1,2:0.5`; repeatable.
    #[arg(long = "term", global = true, allow_hyphen_values = true)]
    terms: Vec<TermSpec>,
    #[arg(long, global = true)]
    n_max: Option<usize>,
    #[arg(long, global = true, value_parser = parse_mode)]
    mode: Option<Mode>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Maximum number of enumerated paths.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// `inverse` uses w^-1 x, `forward` uses w x.
    #[arg(long, global = true, value_parser = parse_direction)]
    direction: Option<Direction>,
    #[arg(long, global = true)]
    source: Option<usize>,
    #[arg(long, global = true)]
    target: Option<usize>,
    #[arg(long, global = true)]
    rays: Option<usize>,
    /// Radius for geodesic checks and cone-type construction.
    #[arg(long, global = true)]
    radius: Option<usize>,
    #[arg(long, global = true)]
    lookahead: Option<usize>,
    /// Where build-combing writes the automaton file.
    #[arg(long, global = true)]
    output: Option<String>,
    /// Worker threads; all threads if absent.
    #[arg(long, global = true, env = "GEOCOMB_WORKERS")]
    workers: Option<usize>,
    /// Record wall-clock time (makes output differ between runs).
    #[arg(long, global = true)]
    timing: bool,
    /// Write `<command>.json` and `<command>.csv` here instead of printing.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Print the table as CSV instead of the JSON report.
    #[arg(long, global = true)]
    csv: bool,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Transition matrix, Perron data, classification and components.
    Analyze,
    /// Sphere sizes and normalized growth.
    Spheres,
    /// Spherical and Cesaro averages of the test function over orbits.
    Equidist,
    /// Counting-operator averages, optionally between two vertices.
    Kappa,
    /// Markov-weighted Cesaro averages between two vertices.
    MarkovCesaro,
    /// Total variation between the prefix-uniform and counting measures.
    Tv,
    /// Orbit averages along random Markov rays.
    SampleGeodesic,
    /// Build a combing from cone types and optionally save it.
    BuildCombing,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Spheres => "spheres",
            Command::Equidist => "equidist",
            Command::Kappa => "kappa",
            Command::MarkovCesaro => "markov-cesaro",
            Command::Tv => "tv",
            Command::SampleGeodesic => "sample-geodesic",
            Command::BuildCombing => "build-combing",
        }
    }
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    serde_json::from_value(serde_json::Value::String(s.into())).map_err(|_| format!("unknown mode {s:?} (exact, mc, auto)"))
}

fn parse_direction(s: &str) -> Result<Direction, String> {
    serde_json::from_value(serde_json::Value::String(s.into())).map_err(|_| format!("unknown direction {s:?} (inverse, forward)"))
}

fn resolve_config(g: &Global) -> Result<ExperimentConfig> {
    let mut c = match &g.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    macro_rules! set {
        ($($field:ident),*) => {$(if let Some(v) = &g.$field { c.$field = v.clone(); })*};
    }
    set!(preset, n_max, mode, samples, seed, budget, direction, rays, radius, lookahead);
    if g.basepoint.is_some() {
        c.basepoint = g.basepoint.clone();
    }
    if !g.terms.is_empty() {
        c.function = g.terms.clone();
    }
    if g.source.is_some() {
        c.source = g.source;
    }
    if g.target.is_some() {
        c.target = g.target;
    }
    if g.output.is_some() {
        c.output = g.output.clone();
    }
    Ok(c)
}

#[derive(Serialize)]
struct Report<'a> {
    command: &'static str,
    config: &'a ExperimentConfig,
    result: serde_json::Value,
}

fn csv_text(table: &Table) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn write_file(dir: &Path, name: &str, text: &str) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
}

fn run(cli: Cli) -> Result<()> {
    let g = &cli.global;
    if let Some(n) = g.workers {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("starting worker pool")?;
    }
    let mut cfg = resolve_config(g)?;
    let preset = presets::preset(&cfg.preset)?;
    cfg.resolve(&preset)?;
    let Output { result, table } = match cli.command {
        Command::Analyze => commands::analyze(&preset, &cfg)?,
        Command::Spheres => commands::spheres(&preset, &cfg)?,
        Command::Equidist => commands::equidist(&preset, &cfg, g.timing)?,
        Command::Kappa => commands::kappa(&preset, &cfg)?,
        Command::MarkovCesaro => commands::markov_cesaro(&preset, &cfg)?,
        Command::Tv => commands::tv(&preset, &cfg)?,
        Command::SampleGeodesic => commands::sample_geodesic(&preset, &cfg)?,
        Command::BuildCombing => commands::build_combing(&preset, &cfg)?,
    };
    let name = cli.command.name();
    let mut json = serde_json::to_string_pretty(&Report { command: name, config: &cfg, result })?;
    json.push('\n');
    match &g.out_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            write_file(dir, &format!("{name}.json"), &json)?;
            if let Some(t) = &table {
                write_file(dir, &format!("{name}.csv"), &csv_text(t)?)?;
            }
        }
        None if g.csv => match &table {
            Some(t) => print!("{}", csv_text(t)?),
            None => anyhow::bail!("{name} has no table output"),
        },
        None => print!("{json}"),
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
