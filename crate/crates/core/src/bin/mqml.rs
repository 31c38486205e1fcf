use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mqml::pipeline::{Manifest, ModelChoice, Pipeline, PipelineConfig};
use mqml::Result;

/// Multi-omic feature selection and hybrid quantum classification pipeline.
#[derive(Parser)]
#[command(name = "mqml", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML configuration; built-in defaults are used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output root; defaults to the configured output_dir or ./mqml-out.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Model for train, evaluate, report and run.
    #[arg(long, global = true)]
    model: Option<ModelChoice>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Generate a synthetic cohort.
    Synth,
    /// Parse omic matrices and join them with clinical labels.
    Ingest,
    /// Per-feature t-tests and p-value subsets.
    Engineer,
    /// Score, screen and cluster features within each subset.
    Select,
    /// Join the selected omics and cut integrated datasets.
    Integrate,
    /// Fit a model on the training split.
    Train,
    /// Score a trained model on both splits.
    Evaluate,
    /// Feature importance and class-association tables.
    Report,
    /// All stages in order.
    Run,
}

fn execute(cli: &Cli) -> Result<Vec<Manifest>> {
    let mut cfg = match &cli.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("mqml-out"));
    let model = cli.model.unwrap_or(cfg.train.model);
    let p = Pipeline::new(cfg, out)?;
    let one = |m: Result<Manifest>| m.map(|m| vec![m]);
    match cli.command {
        Command::Synth => one(p.synth()),
        Command::Ingest => one(p.ingest()),
        Command::Engineer => one(p.engineer()),
        Command::Select => one(p.select()),
        Command::Integrate => one(p.integrate()),
        Command::Train => one(p.train(model)),
        Command::Evaluate => one(p.evaluate(model)),
        Command::Report => one(p.report(model)),
        Command::Run => p.run_all(model),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // usage errors count as validation failures
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(&cli) {
        Ok(manifests) => {
            for m in manifests {
                println!("{}: {}", m.stage, m.summary);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
