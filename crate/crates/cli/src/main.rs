//! `foonplan`: segment subtitles, plan and validate FOON task graphs, export them.
//!
//! Exit codes: 0 success, 1 missing file or locked output directory, 2 parse or
//! usage error, 3 infeasible plan or failed recipe, 4 planner transport failure.

mod commands;
mod error;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use foonplan::orchestrator::DEFAULT_BUDGET;
use foonplan::segmenter::DEFAULT_THRESHOLD;

use error::CliError;
use manifest::{PlannerKind, RunManifest};

#[derive(Parser)]
#[command(name = "foonplan", version, about = "Validate and replan FOON cooking task graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dot,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Split an SRT file into scenes by action keywords.
    Segment {
        #[arg(long)]
        subtitles: PathBuf,
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[arg(long)]
        library: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: f64,
        /// Write the scenes here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Plan every target scene and write graph.json, transcript.json and report.json.
    Plan(PlanArgs),
    /// Run a planning job described by a manifest file.
    Run {
        #[arg(long)]
        manifest: PathBuf,
    },
    /// Check a plan file step by step against an environment.
    Validate {
        #[arg(long)]
        env: PathBuf,
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        library: Option<PathBuf>,
        /// Also write a JSON report.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Render a task graph as DOT or canonical JSON.
    Export {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum, default_value = "dot")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print shortest plans for every target scene.
    Oracle {
        #[arg(long)]
        env: PathBuf,
        #[arg(long)]
        targets: PathBuf,
        #[arg(long)]
        library: Option<PathBuf>,
        #[arg(long, default_value_t = 8)]
        depth: usize,
        #[arg(long)]
        node_cap: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(clap::Args)]
struct PlanArgs {
    #[arg(long)]
    env: PathBuf,
    #[arg(long)]
    targets: PathBuf,
    #[arg(long, value_enum)]
    planner: PlannerKind,
    /// Script book (scripted) or plan book (correcting, faulty).
    #[arg(long)]
    fixture: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Faults injected into the correcting planner's plans.
    #[arg(long, default_value_t = 0)]
    faults: usize,
    #[arg(long, default_value_t = 0.3)]
    error_rate: f64,
    /// Oracle search depth.
    #[arg(long, default_value_t = 8)]
    depth: usize,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u32,
    /// Accept planner output unchecked and audit it afterwards.
    #[arg(long)]
    no_validate: bool,
    #[arg(long)]
    library: Option<PathBuf>,
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Also segment these subtitles into scenes.json.
    #[arg(long)]
    subtitles: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: f64,
    #[arg(long)]
    out: PathBuf,
}

impl From<PlanArgs> for RunManifest {
    fn from(a: PlanArgs) -> Self {
        RunManifest {
            env: a.env,
            targets: a.targets,
            subtitles: a.subtitles,
            lexicon: a.lexicon,
            library: a.library,
            planner: a.planner,
            fixture: a.fixture,
            threshold: a.threshold,
            budget: a.budget,
            out: a.out,
            seed: a.seed,
            faults: a.faults,
            error_rate: a.error_rate,
            depth: a.depth,
            validate: !a.no_validate,
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Segment {
            subtitles,
            lexicon,
            library,
            threshold,
            out,
        } => commands::segment_cmd(&subtitles, lexicon.as_deref(), library.as_deref(), threshold, out.as_deref()),
        Command::Plan(args) => commands::plan_cmd(&args.into()).map(drop),
        Command::Run { manifest } => commands::plan_cmd(&RunManifest::load(&manifest)?).map(drop),
        Command::Validate {
            env,
            plan,
            library,
            report,
        } => commands::validate_cmd(&env, &plan, library.as_deref(), report.as_deref()),
        Command::Export { graph, format, out } => {
            commands::export_cmd(&graph, matches!(format, Format::Dot), out.as_deref())
        }
        Command::Oracle {
            env,
            targets,
            library,
            depth,
            node_cap,
            out,
        } => commands::oracle_cmd(&env, &targets, library.as_deref(), depth, node_cap, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("foonplan: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
