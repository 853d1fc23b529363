//! `textbench` command line.
//!
//! Exit codes: 0 success, 1 runtime or data error, 2 usage or configuration
//! error, 3 grid finished but some cells failed.

use std::fs::File;
use std::io::{BufWriter, Read};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use textbench::corpus::{load_corpus, synth_corpus, write_corpus, CorpusFormat};
use textbench::harness::tables::write_table;
use textbench::harness::{emit_full, emit_summary, read_results_file, run_grid, RunArtifacts, RunConfig};
use textbench::models::ModelKind;
use textbench::preprocess::{apply_all, apply_pipeline, PipelineResources, PreprocessConfig};
use textbench::vectorize::{train_word2vec, EmbeddingKind, W2vVariant};
use textbench::Error;

#[derive(Parser)]
#[command(name = "textbench", version, about = "Text classification benchmark grid")]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Root seed (overrides `run.seed`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory or file (overrides `run.out` for `run`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the preprocessing × embedding × classifier grid.
    Run(RunArgs),
    /// Write the synthetic corpus to a file.
    Synth(SynthArgs),
    /// Print the tokens of a text after a preprocessing code.
    Preprocess(PreprocessArgs),
    /// Train Word2Vec on a corpus and save the binary model.
    TrainW2v(TrainW2vArgs),
    /// Rebuild the summary and full tables from a results CSV.
    Report(ReportArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Corpus file (overrides `corpus.path`).
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Preprocessing codes to run, e.g. `--codes 0000,1111`.
    #[arg(long, value_delimiter = ',')]
    codes: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    embeddings: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    models: Option<Vec<String>>,
    #[arg(long)]
    workers: Option<usize>,
    /// Reuse per-code partial results from an interrupted run.
    #[arg(long)]
    resume: bool,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 3200)]
    n_docs: usize,
    #[arg(long, default_value_t = 8)]
    labels: usize,
    /// Emit keywords without suffixes.
    #[arg(long)]
    no_morphology: bool,
    /// csv or jsonl; guessed from the output extension by default.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct PreprocessArgs {
    /// Four-character code: lowercase, strip non-alphabetic, stem, stopwords.
    #[arg(long)]
    code: String,
    /// Text to process; read from stdin when absent.
    text: Option<String>,
    #[arg(long)]
    stopwords: Option<PathBuf>,
    #[arg(long)]
    suffixes: Option<PathBuf>,
}

#[derive(Args)]
struct TrainW2vArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, default_value = "0000")]
    code: String,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    variant: Option<String>,
}

#[derive(Args)]
struct ReportArgs {
    /// Results CSV written by `run`.
    results: PathBuf,
}

/// Error with the exit code it maps to.
struct Failure(u8, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(if e.is_config() { 2 } else { 1 }, e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure(2, msg.into())
}

fn load_config(cli: &Cli) -> Result<RunConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.run.seed = s;
    }
    Ok(cfg)
}

fn parse_list<T: std::str::FromStr<Err = Error>>(items: &[String]) -> Result<Vec<T>, Failure> {
    items.iter().map(|s| s.parse::<T>().map_err(Failure::from)).collect()
}

fn cmd_run(cli: &Cli, a: &RunArgs) -> Result<u8, Failure> {
    let mut cfg = load_config(cli)?;
    if let Some(p) = &a.corpus {
        cfg.corpus.path = Some(p.clone());
    }
    if let Some(c) = &a.codes {
        cfg.preprocess.codes = parse_list::<PreprocessConfig>(c)?;
    }
    if let Some(e) = &a.embeddings {
        cfg.embeddings.enabled = parse_list::<EmbeddingKind>(e)?;
    }
    if let Some(m) = &a.models {
        cfg.models.enabled = parse_list::<ModelKind>(m)?;
    }
    if a.workers.is_some() {
        cfg.run.workers = a.workers;
    }
    if let Some(o) = &cli.out {
        cfg.run.out = o.clone();
    }
    cfg.run.resume |= a.resume;
    cfg.validate()?;
    let (outcome, art) = run_grid(&cfg)?;
    let failed: Vec<_> = outcome.failed().collect();
    println!("{} cells, {} failed; results in {}", outcome.rows.len(), failed.len(), art.dir.display());
    for r in &failed {
        eprintln!(
            "failed: {} {} {}: {}",
            r.code,
            r.embedding.name(),
            r.model.name(),
            r.error_message().unwrap_or_default()
        );
    }
    Ok(if failed.is_empty() { 0 } else { 3 })
}

fn cmd_synth(cli: &Cli, a: &SynthArgs) -> Result<u8, Failure> {
    let out = cli.out.clone().ok_or_else(|| usage("synth needs --out <file>"))?;
    let format = match &a.format {
        Some(f) => f.parse()?,
        None => CorpusFormat::from_path(&out),
    };
    let corpus = synth_corpus(a.n_docs, a.labels, cli.seed.unwrap_or(42), !a.no_morphology)?;
    write_corpus(&corpus, &out, format)?;
    println!("wrote {} documents, {} labels to {}", corpus.len(), corpus.labels().len(), out.display());
    Ok(0)
}

fn cmd_preprocess(a: &PreprocessArgs) -> Result<u8, Failure> {
    let code: PreprocessConfig = a.code.parse()?;
    let text = match &a.text {
        Some(t) => t.clone(),
        None => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| Failure(1, e.to_string()))?;
            s
        }
    };
    let resources = PipelineResources::from_paths(a.stopwords.as_deref(), a.suffixes.as_deref())?;
    for line in text.lines() {
        println!("{}", apply_pipeline(line, code, &resources)?.tokens().join(" "));
    }
    Ok(0)
}

fn cmd_train_w2v(cli: &Cli, a: &TrainW2vArgs) -> Result<u8, Failure> {
    let cfg = load_config(cli)?;
    let out = cli.out.clone().ok_or_else(|| usage("train-w2v needs --out <model file>"))?;
    let code: PreprocessConfig = a.code.parse()?;
    let corpus = load_corpus(&a.corpus, CorpusFormat::from_path(&a.corpus))?;
    let docs = apply_all(corpus.texts(), code, &cfg.resources()?)?;
    let mut params = cfg.embeddings.word2vec.clone();
    if let Some(d) = a.dim {
        params.dim = d;
    }
    if let Some(e) = a.epochs {
        params.epochs = e;
    }
    if let Some(v) = &a.variant {
        params.variant = v.parse::<W2vVariant>()?;
    }
    if let Some(s) = cli.seed {
        params.seed = s;
    }
    let model = train_word2vec(&docs, &params)?;
    let file = File::create(&out).map_err(|e| Failure(1, format!("{}: {e}", out.display())))?;
    model.save(BufWriter::new(file))?;
    println!(
        "vocabulary {} × {} dims; final epoch loss {:.4}; saved to {}",
        model.vocabulary().len(),
        model.dim(),
        model.epoch_losses().last().copied().unwrap_or(f64::NAN),
        out.display()
    );
    Ok(0)
}

fn cmd_report(cli: &Cli, a: &ReportArgs) -> Result<u8, Failure> {
    let cfg = load_config(cli)?;
    let rows = read_results_file(&a.results)?;
    let dir = cli.out.clone().unwrap_or_else(|| a.results.parent().map(PathBuf::from).unwrap_or_default());
    std::fs::create_dir_all(&dir).map_err(|e| Failure(1, e.to_string()))?;
    let art = RunArtifacts::in_dir(&dir);
    write_table(&emit_summary(&rows)?, &art.summary_csv, &art.summary_md)?;
    write_table(&emit_full(&rows, &cfg.models)?, &art.full_csv, &art.full_md)?;
    println!("tables written to {}", dir.display());
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(a) => cmd_run(&cli, a),
        Command::Synth(a) => cmd_synth(&cli, a),
        Command::Preprocess(a) => cmd_preprocess(a),
        Command::TrainW2v(a) => cmd_train_w2v(&cli, a),
        Command::Report(a) => cmd_report(&cli, a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
