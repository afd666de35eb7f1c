//! Command-line front end shared by the `spectrum-match` binary and tests.
//!
//! Exit status: 0 on success, 2 when an exhaustive run would visit too many
//! preference profiles, 1 for every other failure (including failed
//! `reproduce-all` checks).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::deferred_acceptance::{Capacity, DeferredAcceptance};
use crate::reproduce::{reproduce_all, ReproduceError};
use crate::scenario::{builtin_scenario, builtin_scenarios, RandomStream, ScenarioError, ScenarioTemplate};
use crate::simulation::{
    run_exhaustive, run_monte_carlo, shard_count, ExperimentMode, SeedInfo, SimulationError, StatsReport,
};

pub const DEFAULT_INSTANTS: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Parser)]
#[command(name = "spectrum-match", version, about = "Stable spectrum matching experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one experiment and write its statistics report.
    Run(RunArgs),
    /// Run two experiments and report their shares side by side.
    Compare(CompareArgs),
    /// Run every bundled experiment check and print one pass/fail line per check.
    ReproduceAll(ReproduceArgs),
    /// List the bundled scenario labels.
    ListScenarios,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineKind {
    Mc,
    Exhaustive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct ExperimentArgs {
    /// Bundled scenario label or path to a scenario JSON file.
    #[arg(long)]
    pub scenario: String,
    /// one-to-one, many-to-one or uncoordinated.
    #[arg(long)]
    pub mode: ExperimentMode,
    #[arg(long, value_enum, default_value = "mc")]
    pub engine: EngineKind,
    /// Allocation instants for the Monte Carlo engine [default: 100000].
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub instants: Option<u64>,
    /// Master seed for the Monte Carlo engine [default: 1].
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub experiment: ExperimentArgs,
    /// Report destination; standard output when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Print the proposal rounds of a fixed-preference scenario.
    #[arg(long)]
    pub trace: bool,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub experiment: ExperimentArgs,
    /// Scenario of the second run; defaults to `--scenario`.
    #[arg(long)]
    pub scenario_b: Option<String>,
    /// Mode of the second run; defaults to `--mode`.
    #[arg(long)]
    pub mode_b: Option<ExperimentMode>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct ReproduceArgs {
    #[arg(long, default_value_t = DEFAULT_INSTANTS, value_parser = clap::value_parser!(u64).range(1..))]
    pub instants: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    MonteCarlo { instants: u64, seed: u64 },
    Exhaustive,
}

/// A validated experiment configuration.
#[derive(Debug, Clone)]
pub struct CliConfig {
    pub scenario: ScenarioTemplate,
    pub mode: ExperimentMode,
    pub engine: Engine,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Simulation(#[from] SimulationError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{failed} of {total} checks failed")]
    ChecksFailed { failed: usize, total: usize },
}

impl From<ReproduceError> for CliError {
    fn from(e: ReproduceError) -> Self {
        match e {
            ReproduceError::Scenario(e) => CliError::Scenario(e),
            ReproduceError::Simulation(e) => CliError::Simulation(e),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Simulation(SimulationError::ProfileSpaceTooLarge { .. }) => 2,
            _ => 1,
        }
    }
}

/// Resolves a bundled label, or else a path to a scenario file.
pub fn resolve_scenario(name: &str) -> Result<ScenarioTemplate, ScenarioError> {
    match builtin_scenario(name) {
        Ok(t) => Ok(t),
        Err(ScenarioError::UnknownLabel(_)) if Path::new(name).is_file() => ScenarioTemplate::load(name),
        Err(e) => Err(e),
    }
}

impl CliConfig {
    pub fn from_args(args: &ExperimentArgs) -> Result<Self, CliError> {
        Self::build(&args.scenario, args.mode, args)
    }

    fn build(scenario: &str, mode: ExperimentMode, args: &ExperimentArgs) -> Result<Self, CliError> {
        let engine = match args.engine {
            EngineKind::Mc => Engine::MonteCarlo {
                instants: args.instants.unwrap_or(DEFAULT_INSTANTS),
                seed: args.seed.unwrap_or(DEFAULT_SEED),
            },
            EngineKind::Exhaustive => {
                if args.seed.is_some() || args.instants.is_some() {
                    return Err(CliError::Usage(
                        "--seed and --instants apply to the mc engine only".into(),
                    ));
                }
                Engine::Exhaustive
            }
        };
        Ok(Self {
            scenario: resolve_scenario(scenario)?,
            mode,
            engine,
        })
    }

    pub fn report(&self) -> Result<StatsReport, CliError> {
        let (stats, seed, shards) = match self.engine {
            Engine::MonteCarlo { instants, seed } => (
                run_monte_carlo(&self.scenario, self.mode, instants, seed)?,
                SeedInfo::MonteCarlo(seed),
                shard_count(instants),
            ),
            Engine::Exhaustive => (run_exhaustive(&self.scenario, self.mode)?, SeedInfo::Exhaustive, 1),
        };
        Ok(StatsReport::new(&self.scenario, self.mode, seed, shards, &stats))
    }
}

/// Proposal log of a fixed-preference scenario.
pub fn trace(config: &CliConfig) -> Result<String, CliError> {
    if !config.scenario.is_deterministic() {
        return Err(CliError::Usage(format!(
            "--trace needs fixed user preferences; `{}` randomizes them",
            config.scenario.label()
        )));
    }
    let capacity = match config.mode {
        ExperimentMode::OneToOneDa => Capacity::Unit,
        ExperimentMode::ManyToOneGs => Capacity::Declared,
        ExperimentMode::Uncoordinated => {
            return Err(CliError::Usage(
                "--trace is not available for uncoordinated runs".into(),
            ))
        }
    };
    let instance = config.scenario.instantiate(&RandomStream::new(0, 0));
    let outcome = DeferredAcceptance::new(&instance).capacity(capacity).traced(true).run();
    Ok(format!(
        "{}matching {}\n",
        outcome.render_trace(&instance),
        outcome.matching.display(&instance)
    ))
}

/// Side-by-side shares of two reports over the same users.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub a: StatsReport,
    pub b: StatsReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub su_id: String,
    /// `None` for the unmatched share.
    pub rank: Option<usize>,
    pub a: f64,
    pub b: f64,
}

impl ComparisonRow {
    pub fn diff(&self) -> f64 {
        self.b - self.a
    }
}

impl Comparison {
    pub fn new(a: StatsReport, b: StatsReport) -> Result<Self, CliError> {
        let ids = |r: &StatsReport| r.rows.iter().map(|x| x.su_id.clone()).collect::<Vec<_>>();
        if ids(&a) != ids(&b) {
            return Err(SimulationError::ShapeMismatch(format!("users {:?} vs {:?}", ids(&a), ids(&b))).into());
        }
        Ok(Self { a, b })
    }

    pub fn rows(&self) -> Vec<ComparisonRow> {
        let ranks = self.a.rows[0].counts.len().max(self.b.rows[0].counts.len());
        let mut out = Vec::new();
        for row in &self.a.rows {
            let id = row.su_id.as_str();
            for i in 1..=ranks {
                out.push(ComparisonRow {
                    su_id: id.to_owned(),
                    rank: Some(i),
                    a: self.a.success(id, i).unwrap_or(0.0),
                    b: self.b.success(id, i).unwrap_or(0.0),
                });
            }
            out.push(ComparisonRow {
                su_id: id.to_owned(),
                rank: None,
                a: self.a.unmatched_share(id).unwrap_or(0.0),
                b: self.b.unmatched_share(id).unwrap_or(0.0),
            });
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let header = ["su_id", "rank", "a", "b", "diff"];
        w.write_record(header).expect("in-memory CSV write");
        for r in self.rows() {
            let rank = r.rank.map_or_else(|| "unmatched".to_owned(), |i| i.to_string());
            w.write_record([
                r.su_id.clone(),
                rank,
                format!("{:.6}", r.a),
                format!("{:.6}", r.b),
                format!("{:.6}", r.diff()),
            ])
            .expect("in-memory CSV write");
        }
        String::from_utf8(w.into_inner().expect("in-memory CSV flush")).expect("CSV is UTF-8")
    }

    pub fn to_json(&self) -> String {
        let parse = |s: String| serde_json::from_str::<serde_json::Value>(&s).expect("report JSON");
        let rows: Vec<serde_json::Value> = self
            .rows()
            .into_iter()
            .map(|r| {
                serde_json::json!({
                    "su_id": r.su_id,
                    "rank": r.rank.map_or(serde_json::Value::from("unmatched"), serde_json::Value::from),
                    "a": r.a,
                    "b": r.b,
                    "diff": r.diff(),
                })
            })
            .collect();
        let doc = serde_json::json!({
            "a": parse(self.a.to_json()),
            "b": parse(self.b.to_json()),
            "rows": rows,
        });
        serde_json::to_string_pretty(&doc).expect("comparison JSON")
    }
}

fn emit(text: &str, output: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    match output {
        Some(path) => fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Run(args) => {
            let config = CliConfig::from_args(&args.experiment)?;
            if args.trace {
                stdout.write_all(trace(&config)?.as_bytes())?;
            }
            let report = config.report()?;
            let text = match args.format {
                Format::Csv => report.to_csv(),
                Format::Json => report.to_json() + "\n",
            };
            emit(&text, args.output.as_deref(), stdout)
        }
        Command::Compare(args) => {
            let a = CliConfig::from_args(&args.experiment)?;
            let b = CliConfig::build(
                args.scenario_b.as_deref().unwrap_or(&args.experiment.scenario),
                args.mode_b.unwrap_or(args.experiment.mode),
                &args.experiment,
            )?;
            let comparison = Comparison::new(a.report()?, b.report()?)?;
            let text = match args.format {
                Format::Csv => comparison.to_csv(),
                Format::Json => comparison.to_json() + "\n",
            };
            emit(&text, args.output.as_deref(), stdout)
        }
        Command::ReproduceAll(args) => {
            let checks = reproduce_all(args.instants, args.seed)?;
            for c in &checks {
                writeln!(
                    stdout,
                    "{} {}: {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                )?;
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            if failed > 0 {
                return Err(CliError::ChecksFailed {
                    failed,
                    total: checks.len(),
                });
            }
            Ok(())
        }
        Command::ListScenarios => {
            for (label, t) in builtin_scenarios() {
                let quotas: Vec<String> = t.providers().iter().map(|p| p.quota.to_string()).collect();
                writeln!(
                    stdout,
                    "{label}\t{} providers (quotas {}), {} users, {} randomized",
                    t.num_providers(),
                    quotas.join("/"),
                    t.num_users(),
                    t.random_users().count()
                )?;
            }
            Ok(())
        }
    }
}
