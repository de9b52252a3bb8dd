//! Command-line front end.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use crate::candgen::generate_candidates_with;
use crate::corpus::{load_embeddings, load_wordlist};
use crate::error::{Error, Result};
use crate::eval::{evaluate, load_gold};
use crate::model::{train, ResourceConfig, Resources, TrainConfig};
use crate::persist::{load_model_from, save_model};
use crate::segmenter::segment_batch;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "morphchain", version, about = "Unsupervised morphological segmentation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train a model from a word list and word embeddings
    Train(TrainArgs),
    /// Segment words with a trained model
    Segment(SegmentArgs),
    /// Evaluate a model against gold segmentations
    Eval(EvalArgs),
    /// List the candidate parents of a word
    Candidates(CandidatesArgs),
    /// Show every candidate of a word with its active features
    InspectFeatures(InspectArgs),
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long)]
    wordlist: PathBuf,
    #[arg(long)]
    embeddings: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    min_count: u64,
    #[arg(long, default_value_t = 5)]
    affix_threshold: u64,
    #[arg(long, default_value_t = 100)]
    top_affixes: usize,
    #[arg(long, default_value_t = 2)]
    min_shared: u64,
    #[arg(long, default_value_t = 10_000)]
    top_k: usize,
    #[arg(long, default_value_t = 50)]
    epochs: usize,
    #[arg(long, default_value_t = 0.05)]
    lr: f64,
    #[arg(long, default_value_t = 0.01)]
    l2: f64,
    #[arg(long, default_value_t = 1.0)]
    lr_decay: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Optional replacements for the resource paths recorded in a model.
#[derive(Debug, Args)]
struct ResourceOverride {
    /// Word list to use instead of the one recorded in the model
    #[arg(long)]
    wordlist: Option<PathBuf>,
    /// Embeddings to use instead of the ones recorded in the model
    #[arg(long)]
    embeddings: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SegmentArgs {
    #[arg(long)]
    model: PathBuf,
    /// File with one word per line (first field is used)
    #[arg(long)]
    words: Option<PathBuf>,
    #[command(flatten)]
    resources: ResourceOverride,
    word: Vec<String>,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    gold: PathBuf,
    /// Print per-word predicted and gold boundaries
    #[arg(long)]
    diagnostics: bool,
    #[command(flatten)]
    resources: ResourceOverride,
}

#[derive(Debug, Args)]
struct CandidatesArgs {
    word: String,
    /// Word list enabling delete/modify parents
    #[arg(long)]
    wordlist: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct InspectArgs {
    word: String,
    #[arg(long)]
    model: PathBuf,
    #[command(flatten)]
    resources: ResourceOverride,
}

fn canonical(path: &Path) -> Result<PathBuf> {
    fs::canonicalize(path).map_err(|e| Error::io(path, e))
}

fn io_err(e: std::io::Error) -> Error {
    Error::io("<stdout>", e)
}

fn read_words(path: &Path) -> Result<Vec<String>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if let Some(w) = line.split_whitespace().next() {
            out.push(w.to_string());
        }
    }
    Ok(out)
}

fn run_train(args: TrainArgs, out: &mut dyn Write) -> Result<()> {
    let words = load_wordlist(&args.wordlist, args.min_count)?;
    let embeddings = load_embeddings(&args.embeddings)?;
    let config = ResourceConfig {
        wordlist: Some(canonical(&args.wordlist)?),
        embeddings: Some(canonical(&args.embeddings)?),
        min_count: args.min_count,
        affix_threshold: args.affix_threshold,
        top_affixes: args.top_affixes,
        min_shared: args.min_shared,
    };
    let resources = Arc::new(Resources::build(words, embeddings, config));
    let train_config = TrainConfig {
        learning_rate: args.lr,
        epochs: args.epochs,
        l2_lambda: args.l2,
        top_k: args.top_k,
        seed: args.seed,
        lr_decay: args.lr_decay,
    };
    let outcome = train(resources, train_config)?;
    save_model(&outcome.model, &args.out)?;
    let last = outcome.trace.last().copied().unwrap_or(0.0);
    writeln!(
        out,
        "trained {} weights, final objective {last:.6}, saved to {}",
        outcome.model.weights.len(),
        args.out.display()
    )
    .map_err(io_err)
}

fn run_segment(args: SegmentArgs, out: &mut dyn Write) -> Result<()> {
    let r = &args.resources;
    let model = load_model_from(&args.model, r.wordlist.as_deref(), r.embeddings.as_deref())?;
    let mut words = args.word;
    if let Some(path) = &args.words {
        words.extend(read_words(path)?);
    }
    for seg in segment_batch(&model, &words) {
        writeln!(out, "{seg}").map_err(io_err)?;
    }
    Ok(())
}

fn run_eval(args: EvalArgs, out: &mut dyn Write) -> Result<()> {
    let gold = load_gold(&args.gold)?;
    let r = &args.resources;
    let model = load_model_from(&args.model, r.wordlist.as_deref(), r.embeddings.as_deref())?;
    let words: Vec<&str> = gold.words().collect();
    let preds = segment_batch(&model, &words);
    let report = evaluate(&preds, &gold)?;
    writeln!(out, "{report}").map_err(io_err)?;
    if args.diagnostics {
        let join = |xs: &[usize]| xs.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
        for d in &report.diagnostics {
            writeln!(out, "{}\t{}\t{}", d.word, join(&d.predicted), join(&d.gold)).map_err(io_err)?;
        }
    }
    Ok(())
}

fn run_candidates(args: CandidatesArgs, out: &mut dyn Write) -> Result<()> {
    let vocab = args
        .wordlist
        .as_ref()
        .map(|p| load_wordlist(p, 1))
        .transpose()?;
    for c in generate_candidates_with(&args.word, vocab.as_ref()) {
        writeln!(
            out,
            "{}\t{}\t{}\t{}",
            c.parent,
            c.side,
            c.affix_chain.join(","),
            c.transformation
        )
        .map_err(io_err)?;
    }
    Ok(())
}

fn run_inspect(args: InspectArgs, out: &mut dyn Write) -> Result<()> {
    let r = &args.resources;
    let model = load_model_from(&args.model, r.wordlist.as_deref(), r.embeddings.as_deref())?;
    let fx = model.resources.extractor();
    let cands = fx.candidates(&args.word);
    for (c, fv) in cands.iter().zip(fx.extract_all(&args.word, &cands)) {
        let feats: Vec<String> = fv.iter().map(|(k, v)| format!("{k}={v}")).collect();
        writeln!(out, "{}\t{}\t{}", c.parent, c.side, feats.join(",")).map_err(io_err)?;
    }
    Ok(())
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    return EXIT_OK;
                }
                _ => EXIT_USAGE,
            };
            let _ = write!(err, "{}", e.render());
            return code;
        }
    };
    let result = match cli.command {
        Command::Train(a) => run_train(a, out),
        Command::Segment(a) => run_segment(a, out),
        Command::Eval(a) => run_eval(a, out),
        Command::Candidates(a) => run_candidates(a, out),
        Command::InspectFeatures(a) => run_inspect(a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_DATA
        }
    }
}
