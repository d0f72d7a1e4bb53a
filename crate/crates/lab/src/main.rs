use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use aoi_core::GenerationMode;
use aoi_lab::config::{parse_config, Scenario, SimOverrides};
use aoi_lab::report::{cmd_analyze, cmd_table1, emit_csv, format_analyze, format_summary, format_table1};
use aoi_lab::run::run_scenarios;
use aoi_lab::scenarios::scenario_fig;
use aoi_lab::validate::{failure_json, Suite, CRITERIA};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "aoilab", version, about = "Age-of-Information scheduling experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form bounds and policy values, no simulation.
    Analyze {
        #[command(flatten)]
        source: Source,
    },
    /// Simulate every scenario and policy of a config file.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Simulate one of the built-in grids.
    Sweep {
        #[arg(long, value_parser = clap::value_parser!(u8).range(3..=6))]
        figure: u8,
        #[command(flatten)]
        run: RunArgs,
    },
    /// The four periodic two-source schedules.
    Table1,
    /// Run the self-validation suite.
    Validate {
        /// Criteria to run (default: all).
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
        /// Write the list of failed criteria as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = clap::value_parser!(u8).range(3..=6))]
    figure: Option<u8>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Refresh,
    Hold,
}

#[derive(Args)]
struct RunArgs {
    /// Directory for per_source.csv and summary.csv.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    horizon: Option<u64>,
    #[arg(long)]
    replications: Option<usize>,
    #[arg(long)]
    warmup: Option<u64>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
}

impl RunArgs {
    fn overrides(&self) -> SimOverrides {
        SimOverrides {
            horizon: self.horizon,
            warmup: self.warmup,
            seed: self.seed,
            replications: self.replications,
            mode: self.mode.map(|m| match m {
                Mode::Refresh => GenerationMode::Refresh,
                Mode::Hold => GenerationMode::HoldUntilDelivery,
            }),
        }
    }
}

fn load(path: &PathBuf) -> anyhow::Result<Vec<Scenario>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_config(&text).with_context(|| format!("in {}", path.display()))
}

fn simulate(mut scenarios: Vec<Scenario>, run: &RunArgs) -> anyhow::Result<()> {
    let overrides = run.overrides();
    for s in &mut scenarios {
        overrides.apply(&mut s.sim);
        s.sim.validate().with_context(|| format!("scenario {}", s.id))?;
    }
    let results = run_scenarios(&scenarios)?;
    emit_csv(&results, &run.out)?;
    print!("{}", format_summary(&results));
    println!("wrote {}", run.out.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match real_main() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn real_main() -> anyhow::Result<ExitCode> {
    match Cli::parse().command {
        Command::Analyze { source } => {
            let scenarios = match (source.config, source.figure) {
                (Some(path), _) => load(&path)?,
                (None, Some(n)) => scenario_fig(n)?,
                (None, None) => unreachable!("clap requires one source"),
            };
            print!("{}", format_analyze(&cmd_analyze(&scenarios)?));
        }
        Command::Simulate { config, run } => simulate(load(&config)?, &run)?,
        Command::Sweep { figure, run } => simulate(scenario_fig(figure)?, &run)?,
        Command::Table1 => print!("{}", format_table1(&cmd_table1()?)),
        Command::Validate { only, json } => {
            if let Some(bad) = only.iter().find(|id| !CRITERIA.iter().any(|c| c.0 == **id)) {
                bail!("no criterion {bad}");
            }
            let suite = Suite::new();
            let ids: Vec<u8> = if only.is_empty() { CRITERIA.iter().map(|c| c.0).collect() } else { only };
            let outcomes: Vec<_> = ids
                .into_iter()
                .map(|id| {
                    let o = suite.run(id);
                    println!("{}", o.line());
                    o
                })
                .collect();
            if let Some(path) = json {
                fs::write(&path, failure_json(&outcomes)).with_context(|| format!("writing {}", path.display()))?;
            }
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            println!("{} of {} criteria passed", outcomes.len() - failed, outcomes.len());
            return Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE });
        }
    }
    Ok(ExitCode::SUCCESS)
}
