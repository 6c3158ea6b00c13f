mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use tempdx_core::engine::Engine;
use tempdx_core::model::{parse_model, print_model, KnowledgeBase};
use tempdx_core::observations::ObservationTable;
use tempdx_core::sia::{self, text};

use report::{aobs_line, render_text, DiagnosisReport, RunStats};

#[derive(Parser)]
#[command(name = "tempdx", version, about = "Abstract temporal diagnosis over qualitative interval models")]
struct Cli {
    /// Log every Necessary/Possible verdict and split to stderr.
    #[arg(long, global = true, env = "TEMPDX_TRACE", value_parser = clap::builder::BoolishValueParser::new())]
    trace: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the abstract temporal diagnoses of an observation table.
    Diagnose {
        #[arg(short, long)]
        model: PathBuf,
        #[arg(short, long)]
        observations: PathBuf,
        /// Fill gaps between diagnosed modes along the mode graph.
        #[arg(long)]
        complete: bool,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        max_path_len: Option<u64>,
        /// Also list the maximal abstract observations.
        #[arg(long)]
        dump_aobs: bool,
        #[command(flatten)]
        output: Output,
    },
    /// List the maximal abstract observations of an observation table.
    Aobs {
        #[arg(short, long)]
        observations: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Ask whether a formula is possibly or necessarily true in a network.
    Query {
        #[arg(short, long)]
        network: PathBuf,
        #[arg(long, conflicts_with = "necessary", required_unless_present = "necessary")]
        possible: Option<PathBuf>,
        #[arg(long)]
        necessary: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Validate a model file and show the derived consistency models.
    CheckModel {
        #[arg(short, long)]
        model: PathBuf,
        #[command(flatten)]
        output: Output,
    },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_model(path: &Path) -> Result<KnowledgeBase> {
    let text = read(path)?;
    parse_model(&text).map_err(|e| match e.line {
        Some(line) => anyhow!("{}:{line}: {}", path.display(), e.kind),
        None => anyhow!("{}: {}", path.display(), e.kind),
    })
}

fn load_observations(path: &Path) -> Result<ObservationTable> {
    let file = std::fs::File::open(path).with_context(|| format!("cannot read {}", path.display()))?;
    ObservationTable::from_csv(file).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn emit<T: Serialize>(format: Format, value: &T, text: impl FnOnce() -> String) -> Result<()> {
    match format {
        Format::Text => print!("{}", text()),
        Format::Json => println!("{}", serde_json::to_string_pretty(value)?),
    }
    Ok(())
}

fn diagnose(
    model: &Path,
    observations: &Path,
    complete: bool,
    max_path_len: Option<usize>,
    dump_aobs: bool,
    format: Format,
) -> Result<ExitCode> {
    let kb = load_model(model)?;
    let table = load_observations(observations)?;
    table
        .check_domain(|p, v| kb.allows(p, v))
        .map_err(|e| anyhow!("{}: {e}", observations.display()))?;
    let engine = Engine::new(&kb, &table)?;
    let mut diagnoses = engine.atd(max_path_len);
    if complete {
        diagnoses = diagnoses.iter().map(|d| engine.complete(d)).collect();
    }
    let report = DiagnosisReport {
        diagnoses,
        aobs: dump_aobs.then(|| engine.aobs().to_vec()),
        stats: RunStats {
            observations: table.len(),
            positive_observations: engine.positive_observations().len(),
            abstract_observations: engine.aobs().len(),
            engine: engine.stats(),
        },
    };
    emit(format, &report, || render_text(&report))?;
    Ok(if report.diagnoses.is_empty() { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn aobs(observations: &Path, format: Format) -> Result<ExitCode> {
    let table = load_observations(observations)?;
    let aobs = table.maximal_aobs();
    emit(format, &aobs, || aobs.iter().map(|a| aobs_line(a) + "\n").collect())?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct QueryAnswer {
    query: &'static str,
    holds: bool,
}

fn query(network: &Path, possible: Option<&Path>, necessary: Option<&Path>, format: Format) -> Result<ExitCode> {
    let net = text::parse_network(&read(network)?).map_err(|e| anyhow!("{}: {e}", network.display()))?;
    let (kind, phi_path) = match (possible, necessary) {
        (Some(p), _) => ("possible", p),
        (None, Some(p)) => ("necessary", p),
        (None, None) => unreachable!("clap requires one of the two"),
    };
    let phi = text::parse_constraints(&read(phi_path)?).map_err(|e| anyhow!("{}: {e}", phi_path.display()))?;
    let holds = match kind {
        "possible" => sia::possible(&net, &phi),
        _ => sia::necessary(&net, &phi),
    }
    .map_err(|e| anyhow!("{}: {e}", phi_path.display()))?;
    let answer = QueryAnswer { query: kind, holds };
    emit(format, &answer, || format!("{kind}: {holds}\n"))?;
    Ok(if holds { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

#[derive(Serialize)]
struct ModelCheck<'a> {
    knowledge_base: &'a KnowledgeBase,
    consistency_models: Vec<tempdx_core::model::BehavioralModel>,
}

fn check_model(model: &Path, format: Format) -> Result<ExitCode> {
    let kb = load_model(model)?;
    let derived = kb
        .models
        .iter()
        .map(|bm| kb.consistency_model(&bm.mode))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| anyhow!("{}: {e}", model.display()))?;
    let check = ModelCheck { knowledge_base: &kb, consistency_models: derived };
    emit(format, &check, || {
        let mut out = format!("{}: {} parameters, {} modes, valid\n", model.display(), kb.parameters.len(), kb.models.len());
        for cm in &check.consistency_models {
            let only = KnowledgeBase { models: vec![cm.clone()], ..Default::default() };
            out.push_str(&format!("\nconsistency model of {}:", cm.mode));
            out.push_str(&print_model(&only));
        }
        out
    })?;
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Diagnose { model, observations, complete, max_path_len, dump_aobs, output } => {
            diagnose(&model, &observations, complete, max_path_len.map(|n| n as usize), dump_aobs, output.format)
        }
        Command::Aobs { observations, output } => aobs(&observations, output.format),
        Command::Query { network, possible, necessary, output } => {
            query(&network, possible.as_deref(), necessary.as_deref(), output.format)
        }
        Command::CheckModel { model, output } => check_model(&model, output.format),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(2);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    let level = if cli.trace { log::LevelFilter::Debug } else { log::LevelFilter::Warn };
    env_logger::Builder::new().filter_level(level).format_target(false).init();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
