use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use parley::negotiation::{DialogueOutcome, Transcript};
use parley::trace::Trace;
use parley::parse_scenario;

#[derive(Parser)]
#[command(name = "parley", version, about = "Replay two-agent negotiation scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and print its transcript.
    Run {
        file: PathBuf,
        /// Acceptance threshold; overrides PARLEY_TAU and the scenario.
        #[arg(long)]
        tau: Option<u32>,
        #[arg(long)]
        max_depth: Option<usize>,
        /// Write the decision trace here as line-delimited JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("parley: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn env_tau() -> Result<Option<u32>> {
    match std::env::var("PARLEY_TAU") {
        Ok(v) => Ok(Some(v.trim().parse().with_context(|| format!("PARLEY_TAU={v:?} is not a threshold"))?)),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(e).context("reading PARLEY_TAU"),
    }
}

fn run(command: Command) -> Result<u8> {
    let Command::Run {
        file,
        tau,
        max_depth,
        trace: trace_path,
        format,
    } = command;

    let text = std::fs::read_to_string(&file).with_context(|| format!("cannot read {}", file.display()))?;
    let scenario = parse_scenario(&text).map_err(|e| {
        let lines: Vec<String> = e.diagnostics.iter().map(|d| format!("{}:{d}", file.display())).collect();
        anyhow::anyhow!("invalid scenario\n{}", lines.join("\n"))
    })?;

    let mut config = scenario.config;
    if let Some(t) = tau.or(env_tau()?) {
        config.tau = t;
    }
    if let Some(d) = max_depth {
        config.max_depth = d;
    }

    let mut trace = Trace::new();
    let result = scenario.run(&config, &mut trace)?;
    if let Some(path) = trace_path {
        std::fs::write(&path, trace.to_jsonl()).with_context(|| format!("cannot write {}", path.display()))?;
    }

    let transcript = &result.transcript;
    match format {
        Format::Text => print!("{}", transcript.text()),
        Format::Json => println!("{}", serde_json::to_string_pretty(transcript)?),
    }
    eprintln!("{}", summary(transcript));
    Ok(transcript.outcome.exit_code())
}

fn summary(t: &Transcript) -> String {
    let outcome = match &t.outcome {
        DialogueOutcome::Agreement => "agreement".to_string(),
        DialogueOutcome::Concession { agent } => format!("concession by {agent}"),
        DialogueOutcome::UnresolvedNeedsSharing => "unresolved: information sharing needed".to_string(),
    };
    let ratified = t.ratified.as_ref().map(|p| format!(", ratified {p}")).unwrap_or_default();
    format!("outcome: {outcome}; depth {}, rounds {}{ratified}", t.depth, t.rounds)
}
