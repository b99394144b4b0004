//! `morphdis` command-line tool.
//!
//! Exit status: 0 on success, 1 on runtime or data errors, 2 on usage errors.
//! Batch commands write one JSON object per input line to stdout; all
//! diagnostics go to stderr.

use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use morphdis_core::did::parse_corpus as parse_did_corpus;
use morphdis_core::morph_db::{validate, DatabaseDocument};
use morphdis_core::pipeline::word_tokenize_in;
use morphdis_core::tagger::{parse_corpus, train_tagger_with_k, DEFAULT_K};
use morphdis_core::{
    analyze_with_backoff, avg_ambiguity, train_did, DialectChoice, DidModel, MorphDatabase, Pipeline, Registry,
    TaggerModel,
};
use morphdis_server::api::{ApiAnalysis, ApiResponse};
use morphdis_server::ServiceConfig;
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "morphdis",
    version,
    about = "Multi-dialect Arabic morphological disambiguation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the HTTP service.
    Serve {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        port: Option<u16>,
    },
    /// List every reading of each word, one JSON line per input line.
    Analyze {
        #[arg(long)]
        db: PathBuf,
        #[command(flatten)]
        input: Input,
    },
    /// Rank readings in context, one JSON line per input line.
    Disambiguate {
        /// Service config naming every model; replaces --db/--tagger/--did-model.
        #[arg(long, conflicts_with_all = ["db", "tagger", "did_model"])]
        config: Option<PathBuf>,
        #[arg(long, requires = "tagger")]
        db: Option<PathBuf>,
        #[arg(long, requires = "db")]
        tagger: Option<PathBuf>,
        #[arg(long)]
        did_model: Option<PathBuf>,
        /// Defaults to auto when a DID model is available, else the database's dialect.
        #[arg(long)]
        dialect: Option<DialectChoice>,
        #[command(flatten)]
        input: Input,
    },
    /// Identify the dialect of each input line.
    Did {
        #[arg(long)]
        did_model: PathBuf,
        #[arg(long, default_value = "auto")]
        dialect: DialectChoice,
        #[command(flatten)]
        input: Input,
    },
    /// Train a tagger from `word TAB tag` lines.
    TrainTagger {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_K)]
        k: f64,
    },
    /// Train a dialect identifier from `label TAB sentence` lines.
    TrainDid {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a database; prints one violation per line.
    DbValidate {
        #[arg(long)]
        db: PathBuf,
    },
    /// Print table sizes and, given a word list, average ambiguity.
    DbStats {
        #[arg(long)]
        db: PathBuf,
        /// One word per line.
        #[arg(long)]
        words: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Input {
    /// Input text; read from stdin when absent.
    text: Option<String>,
}

impl Input {
    /// Nonblank input lines.
    fn lines(&self) -> anyhow::Result<Vec<String>> {
        let raw = match &self.text {
            Some(t) => t.clone(),
            None => io::read_to_string(io::stdin().lock()).context("reading stdin")?,
        };
        Ok(raw.lines().filter(|l| !l.trim().is_empty()).map(String::from).collect())
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_db(path: &Path) -> anyhow::Result<MorphDatabase> {
    MorphDatabase::load(path).with_context(|| format!("loading {}", path.display()))
}

fn load_tagger(path: &Path) -> anyhow::Result<TaggerModel> {
    TaggerModel::load(path).with_context(|| format!("loading {}", path.display()))
}

fn load_did(path: &Path) -> anyhow::Result<DidModel> {
    DidModel::load(path).with_context(|| format!("loading {}", path.display()))
}

fn emit_jsonl<T: Serialize>(out: &mut impl Write, value: &T) -> anyhow::Result<()> {
    serde_json::to_writer(&mut *out, value)?;
    out.write_all(b"\n")?;
    Ok(())
}

#[derive(Serialize)]
struct AnalyzedWord {
    raw: String,
    analyses: Vec<ApiAnalysis>,
}

#[derive(Serialize)]
struct AnalyzeLine {
    text: String,
    words: Vec<AnalyzedWord>,
}

#[derive(Serialize)]
struct DidLine {
    text: String,
    label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    scores: Option<std::collections::BTreeMap<String, f64>>,
}

fn run(command: Command) -> anyhow::Result<ExitCode> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match command {
        Command::Serve { config, port } => {
            let mut config = ServiceConfig::from_env(config.as_deref())?;
            if let Some(port) = port {
                config.port = port;
            }
            tokio::runtime::Runtime::new()?.block_on(morphdis_server::service::serve(config))?;
        }
        Command::Analyze { db, input } => {
            let db = load_db(&db)?;
            for text in input.lines()? {
                let mut words = Vec::new();
                for raw in word_tokenize_in(&text, db.script) {
                    let analyses = analyze_with_backoff(&raw, &db)?.iter().map(ApiAnalysis::from).collect();
                    words.push(AnalyzedWord { raw, analyses });
                }
                emit_jsonl(&mut out, &AnalyzeLine { text, words })?;
            }
        }
        Command::Disambiguate {
            config,
            db,
            tagger,
            did_model,
            dialect,
            input,
        } => {
            let (pipeline, default_choice) = match config {
                Some(path) => (ServiceConfig::load(&path)?.load_pipeline()?, DialectChoice::Auto),
                None => {
                    let identifier = did_model
                        .map(|p| load_did(&p).map(|m| Box::new(m) as Box<dyn morphdis_core::DialectIdentifier>))
                        .transpose()?;
                    let mut registry = Registry::new();
                    let mut fixed = None;
                    if let (Some(db), Some(tagger)) = (db, tagger) {
                        let db = load_db(&db)?;
                        fixed = Some(DialectChoice::Fixed(db.dialect));
                        registry.insert(db, load_tagger(&tagger)?);
                    }
                    let default_choice = match (&identifier, fixed) {
                        (Some(_), _) | (None, None) => DialectChoice::Auto,
                        (None, Some(f)) => f,
                    };
                    (Pipeline::new(registry, identifier), default_choice)
                }
            };
            let choice = dialect.unwrap_or(default_choice);
            for text in input.lines()? {
                let result = pipeline.process(&text, choice)?;
                emit_jsonl(&mut out, &ApiResponse::from(&result))?;
            }
        }
        Command::Did {
            did_model,
            dialect,
            input,
        } => {
            let model = load_did(&did_model)?;
            for text in input.lines()? {
                let line = match dialect {
                    DialectChoice::Auto => {
                        let r = model.identify(&text)?;
                        DidLine {
                            text,
                            label: r.label,
                            scores: Some(r.scores),
                        }
                    }
                    DialectChoice::Fixed(d) => DidLine {
                        text,
                        label: d.id().to_string(),
                        scores: None,
                    },
                };
                emit_jsonl(&mut out, &line)?;
            }
        }
        Command::TrainTagger { corpus, out: path, k } => {
            let sentences = parse_corpus(&read(&corpus)?).with_context(|| format!("parsing {}", corpus.display()))?;
            let model = train_tagger_with_k(&sentences, k)?;
            model
                .save(&path)
                .with_context(|| format!("writing {}", path.display()))?;
            writeln!(
                out,
                "trained tagger on {} sentences: {} tags, {} word types -> {}",
                sentences.len(),
                model.tags().len(),
                model.vocabulary().count(),
                path.display()
            )?;
        }
        Command::TrainDid { corpus, out: path } => {
            let corpus = parse_did_corpus(&read(&corpus)?)?;
            let model = train_did(&corpus)?;
            model
                .save(&path)
                .with_context(|| format!("writing {}", path.display()))?;
            writeln!(
                out,
                "trained dialect identifier on {} sentences: labels {} -> {}",
                corpus.len(),
                model.labels().join(","),
                path.display()
            )?;
        }
        Command::DbValidate { db } => {
            let doc = DatabaseDocument::from_json(&read(&db)?).with_context(|| format!("parsing {}", db.display()))?;
            let violations = validate(&doc);
            for v in &violations {
                writeln!(out, "{v}")?;
            }
            if !violations.is_empty() {
                bail!("{}: {} violation(s)", db.display(), violations.len());
            }
            writeln!(out, "ok")?;
        }
        Command::DbStats { db, words } => {
            let db = load_db(&db)?;
            writeln!(out, "dialect {}", db.dialect)?;
            writeln!(out, "prefixes {}", db.prefixes.len())?;
            writeln!(out, "stems {}", db.stems.len())?;
            writeln!(out, "suffixes {}", db.suffixes.len())?;
            writeln!(out, "compat_ab {}", db.compat_ab.len())?;
            writeln!(out, "compat_bc {}", db.compat_bc.len())?;
            writeln!(out, "compat_ac {}", db.compat_ac.len())?;
            if let Some(path) = words {
                let source = read(&path)?;
                let list: Vec<&str> = source.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
                writeln!(out, "words {}", list.len())?;
                writeln!(out, "avg_ambiguity {}", avg_ambiguity(&list, &db)?)?;
            }
        }
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    // Usage errors exit with status 2; --help and --version with 0.
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
