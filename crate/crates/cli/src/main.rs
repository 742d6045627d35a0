use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Result};
use clap::{Parser, Subcommand, ValueEnum};
use docmine::crf::TrainConfig;
use docmine::pipeline::{Extractor, PipelineConfig, Task};
use docmine::synth::Style;
use docmine_cli::{
    evaluate, extract_all, extract_batch, list_inputs, load_annotated, section_map, train, usecase_citedist,
    usecase_datasets, write_model, write_synthetic_corpus, EXIT_PARTIAL, EXIT_USAGE,
};

#[derive(Parser)]
#[command(name = "docmine", version, about = "Metadata, structure and bibliography extraction from rich-XML articles")]
struct Cli {
    /// Flat key = value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Documents processed concurrently.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract rich-XML files (or directories of them) to TEI.
    Extract {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Output directory; defaults to the config's out_dir, else the current directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train one task's labeler on an annotated corpus.
    Train {
        /// title, author, heading or footnote.
        #[arg(long)]
        task: String,
        corpus: PathBuf,
        /// Model file to write.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        iterations: usize,
        #[arg(long, default_value_t = 1.0)]
        l2: f64,
    },
    /// Score extraction against the ground truth of an annotated corpus.
    Eval {
        corpus: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Run a use case over a corpus: datasets or citedist.
    Usecase { kind: String, corpus: PathBuf },
    /// Write a synthetic annotated corpus.
    Generate {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Restrict to one layout style; by default styles rotate.
        #[arg(long)]
        style: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Kv,
}

/// Error that maps to the usage exit code.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(Usage(msg.into()))
}

fn load_config(path: Option<&Path>) -> Result<PipelineConfig> {
    match path {
        Some(p) => PipelineConfig::load(p).map_err(|e| usage(format!("config: {e}"))),
        None => Ok(PipelineConfig::default()),
    }
}

fn run(cli: Cli) -> Result<i32> {
    if cli.jobs == 0 {
        return Err(usage("--jobs must be at least 1"));
    }
    let config = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::Extract { inputs, out } => {
            let out = out.or_else(|| config.out_dir.clone()).unwrap_or_else(|| PathBuf::from("."));
            let extractor = Extractor::from_config(config).map_err(|e| usage(format!("config: {e}")))?;
            let inputs = list_inputs(&inputs)?;
            if inputs.is_empty() {
                return Err(usage("no input files"));
            }
            let outcomes = extract_batch(&extractor, &inputs, &out, cli.jobs)?;
            let mut failed = 0;
            for o in &outcomes {
                println!("{}", o.summary());
                failed += o.result.is_err() as usize;
            }
            eprintln!("{} of {} files extracted", outcomes.len() - failed, outcomes.len());
            Ok(if failed > 0 { EXIT_PARTIAL } else { 0 })
        }
        Command::Train { task, corpus, out, seed, iterations, l2 } => {
            let task = Task::parse(&task).ok_or_else(|| usage(format!("unknown task {task:?}; expected title, author, heading or footnote")))?;
            let (docs, warnings) = load_annotated(&[corpus], &config)?;
            for w in warnings {
                log::warn!("{w}");
            }
            let tc = TrainConfig { l2_lambda: l2, max_iterations: iterations, seed, ..TrainConfig::default() };
            let t = train(task, &docs, &config, &tc)?;
            write_model(&t.model, &out)?;
            println!("task={} train_docs={} heldout_docs={}", task.as_str(), t.train_docs, t.heldout_docs);
            println!("final_objective={:.6}", t.objective);
            match t.heldout_accuracy {
                Some(a) => println!("heldout_token_accuracy={a:.6}"),
                None => println!("heldout_token_accuracy=n/a"),
            }
            println!("model={}", out.display());
            Ok(0)
        }
        Command::Eval { corpus, format } => {
            let (docs, warnings) = load_annotated(&[corpus], &config)?;
            for w in warnings {
                log::warn!("{w}");
            }
            let extractor = Extractor::from_config(config)?;
            let results = extract_all(&extractor, &docs, cli.jobs)?;
            let report = evaluate(&results, &docs)?;
            match format {
                Format::Table => print!("{}", report.table()),
                Format::Kv => print!("{}", report.key_values()),
            }
            Ok(0)
        }
        Command::Usecase { kind, corpus } => {
            if kind != "datasets" && kind != "citedist" {
                return Err(usage(format!("unknown use case {kind:?}; expected datasets or citedist")));
            }
            let map = section_map(&config).map_err(|e| usage(format!("{e:#}")))?;
            let extractor = Extractor::from_config(config)?;
            let inputs = list_inputs(&[corpus])?;
            let mut results = Vec::new();
            let mut failed = 0;
            for input in &inputs {
                let run = || -> Result<_> {
                    let bytes = std::fs::read(input)?;
                    Ok(extractor.extract_bytes(&bytes, &docmine_cli::doc_id(input))?.0)
                };
                match run() {
                    Ok(r) => results.push(r),
                    Err(e) => {
                        eprintln!("{}: error: {e:#}", input.display());
                        failed += 1;
                    }
                }
            }
            if kind == "datasets" {
                print!("{}", usecase_datasets(&results, &map).table());
            } else {
                print!("{}", usecase_citedist(&results, &map).table());
            }
            Ok(if failed > 0 { EXIT_PARTIAL } else { 0 })
        }
        Command::Generate { out, count, seed, style } => {
            let style = style.map(|s| Style::parse(&s)).transpose().map_err(|e| usage(e.to_string()))?;
            let written = write_synthetic_corpus(&out, count, seed, style)?;
            println!("wrote {} documents to {}", written.len(), out.display());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if e.downcast_ref::<Usage>().is_some() { EXIT_USAGE as u8 } else { EXIT_PARTIAL as u8 })
        }
    }
}
