use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use g2p_core::ccv::{coverage_report, learn_ccv, read_corpus};
use g2p_core::format::{read_file, ResourceError};
use g2p_core::phrasebreak::PhraseLimits;
use g2p_core::pipeline::{evaluate, read_eval_corpus, Converter, EvalError, Resources};

/// Rule-driven Korean grapheme-to-phoneme conversion.
#[derive(Parser)]
#[command(name = "g2p", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ResourceArgs {
    /// Directory with phonetic.dict, phonetic_pattern.dict, ccv.rules,
    /// connectivity.tsv and readings.tsv. Bundled seed data if omitted.
    #[arg(long)]
    resources: Option<PathBuf>,
    /// Break-tag configuration. Bundled file if omitted.
    #[arg(long)]
    break_config: Option<PathBuf>,
    /// Minimum words per phrase before a trigger tag may break it.
    #[arg(long, default_value_t = 3)]
    min_phrase: usize,
    /// Maximum words per phrase; 0 means unbounded.
    #[arg(long, default_value_t = 6)]
    max_phrase: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Convert tagged sentences (one per line) to romanized phonemes.
    Convert {
        #[command(flatten)]
        resources: ResourceArgs,
        /// Input file; standard input if omitted.
        input: Option<PathBuf>,
        /// Print conversion diagnostics to standard error.
        #[arg(long)]
        diagnostics: bool,
    },
    /// Learn CCV rules from a transcribed corpus.
    LearnCcv {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value_t = 1)]
        min_count: usize,
        /// Rule file to write; standard output if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also list corpus boundaries the learned rules get wrong.
        #[arg(long)]
        report: bool,
    },
    /// Score conversion against a reference corpus.
    Evaluate {
        #[command(flatten)]
        resources: ResourceArgs,
        #[arg(long)]
        corpus: PathBuf,
    },
    /// Dump the pruned lattice of one tagged sentence.
    InspectLattice {
        #[command(flatten)]
        resources: ResourceArgs,
        /// Tagged sentence; first line of standard input if omitted.
        sentence: Option<String>,
    },
}

enum Failure {
    Resource(String),
    Usage(String),
}

impl From<ResourceError> for Failure {
    fn from(e: ResourceError) -> Self {
        Failure::Resource(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Resource(e.to_string())
    }
}

fn load_resources(args: &ResourceArgs) -> Result<Resources, Failure> {
    let mut resources = match &args.resources {
        Some(dir) => Resources::load(dir, args.break_config.as_deref())?,
        None => {
            let mut r = Resources::bundled();
            if let Some(path) = &args.break_config {
                r.breaks = g2p_core::phrasebreak::BreakConfig::parse(&path.display().to_string(), &read_file(path)?)?;
            }
            r
        }
    };
    let limits = PhraseLimits {
        min_len: args.min_phrase,
        max_len: (args.max_phrase > 0).then_some(args.max_phrase),
    };
    limits.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    resources.limits = limits;
    Ok(resources)
}

fn read_input(input: Option<&Path>) -> Result<Vec<String>, Failure> {
    match input {
        Some(path) => Ok(read_file(path)?.lines().map(str::to_string).collect()),
        None => Ok(io::stdin().lock().lines().collect::<Result<_, _>>()?),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Convert { resources, input, diagnostics } => {
            let resources = load_resources(&resources)?;
            let lines = read_input(input.as_deref())?;
            let converter = Converter::new(&resources);
            let mut bad = 0;
            let mut out = io::stdout().lock();
            for (n, result) in converter.convert_batch(&lines).into_iter().enumerate() {
                match result {
                    Ok(r) => {
                        writeln!(out, "{}", r.to_line())?;
                        if diagnostics {
                            for d in &r.diagnostics {
                                eprintln!("line {}: {d}", n + 1);
                            }
                        }
                    }
                    Err(e) => {
                        bad += 1;
                        writeln!(out)?;
                        eprintln!("line {}: {e}", n + 1);
                    }
                }
            }
            if bad > 0 {
                return Err(Failure::Usage(format!("{bad} malformed input line(s)")));
            }
        }
        Command::LearnCcv { corpus, min_count, out, report } => {
            let name = corpus.display().to_string();
            let sentences = read_corpus(&name, &read_file(&corpus)?)?;
            let learned = learn_ccv(&sentences, min_count);
            for e in &learned.skipped {
                eprintln!("skipped {e}");
            }
            eprintln!(
                "learned {} rules from {} sentences ({} skipped)",
                learned.rules.len(),
                sentences.len(),
                learned.skipped.len()
            );
            if report {
                for x in coverage_report(&learned.rules, &sentences).exceptions {
                    eprintln!(
                        "exception: sentence {} boundary {}: {} expected {} observed {}",
                        x.sentence, x.boundary, x.context, x.expected, x.observed
                    );
                }
            }
            let text = learned.rules.to_file_string();
            match out {
                Some(path) => fs::write(&path, text)?,
                None => io::stdout().write_all(text.as_bytes())?,
            }
        }
        Command::Evaluate { resources, corpus } => {
            let resources = load_resources(&resources)?;
            let items = read_eval_corpus(&corpus.display().to_string(), &read_file(&corpus)?)?;
            match evaluate(&items, &resources) {
                Ok(report) => {
                    for (line, reason) in &report.skipped {
                        eprintln!("skipped line {line}: {reason}");
                    }
                    for f in &report.failures {
                        println!("line {}: {}\n  expected: {}\n  got:      {}", f.line, f.input, f.expected, f.got);
                    }
                    println!(
                        "sentence accuracy: {:.2}% ({}/{})",
                        report.sentence_accuracy * 100.0,
                        report.correct,
                        report.sentences
                    );
                    println!("grapheme accuracy: {:.2}%", report.grapheme_accuracy * 100.0);
                }
                Err(EvalError::EmptyCorpus { skipped }) => {
                    for (line, reason) in &skipped {
                        eprintln!("skipped line {line}: {reason}");
                    }
                    return Err(Failure::Usage("corpus has no evaluable sentences".into()));
                }
            }
        }
        Command::InspectLattice { resources, sentence } => {
            let resources = load_resources(&resources)?;
            let sentence = match sentence {
                Some(s) => s,
                None => io::stdin().lock().lines().next().transpose()?.unwrap_or_default(),
            };
            let dump = Converter::new(&resources).inspect(&sentence).map_err(|e| Failure::Usage(e.to_string()))?;
            print!("{dump}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("error")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Resource(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
