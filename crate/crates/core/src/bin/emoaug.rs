use std::fmt::Display;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use emoaug::config::RunConfig;
use emoaug::corpus::{fetch_comments, ingest, stratified_split, write_jsonl, CommentKind, Dataset, Format, TOKEN_ENV};
use emoaug::eval::{
    micro_metrics, read_predictions, run_experiment, tool_overlap, train_on, write_predictions, BaselineModel,
    ConfusionCounts, ExperimentReport, ExperimentSetup,
};
use emoaug::lexicon::{Lexicons, BUILD_LOG_FILE, DEFAULT_TAU};
use emoaug::strategies::{augment_dataset, Strategy};

#[derive(Parser)]
#[command(name = "emoaug", version, about = "Emotion-labeled corpus augmentation and evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Download recent issue or pull-request comments as unlabeled JSONL.
    /// The API token is read from EMOAUG_TOKEN.
    Fetch {
        /// Repository as owner/name.
        #[arg(long)]
        repo: String,
        /// issues or pulls.
        #[arg(long)]
        kind: CommentKind,
        /// Maximum number of comments.
        #[arg(long)]
        limit: usize,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mask URLs, mentions and code spans.
    Preprocess {
        /// Raw dataset (JSONL, or CSV by extension).
        #[arg(long = "in")]
        input: PathBuf,
        /// Masked JSONL output.
        #[arg(long)]
        out: PathBuf,
    },
    /// Lexicon construction.
    Lexicon {
        #[command(subcommand)]
        command: LexiconCommand,
    },
    /// Stratified train/test split, written as STEM.train.jsonl and
    /// STEM.test.jsonl.
    Split {
        /// Dataset to split.
        #[arg(long = "in")]
        input: PathBuf,
        /// Test fraction in (0, 1).
        #[arg(long, default_value_t = 0.2)]
        ratio: f64,
        /// Shuffle seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory; defaults to the input's directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Generate label-preserving variants of every training instance.
    Augment {
        /// Training dataset to augment.
        #[arg(long = "in")]
        input: PathBuf,
        /// unconstrained, lexicon or polarity; overrides the config file.
        #[arg(long)]
        strategy: Option<Strategy>,
        /// Run configuration (TOML, or JSON by extension).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Directory with built lexicon files; overrides the config file.
        #[arg(long)]
        lexicons: Option<PathBuf>,
        /// Worker threads; output order does not depend on it.
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Variant output; defaults to STEM.STRATEGY.jsonl next to the input.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Generation report; defaults to STEM.STRATEGY.report.json.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Train the baseline classifier on one or more datasets.
    Train {
        /// One or more training datasets, concatenated.
        #[arg(long = "in", num_args = 1.., required = true)]
        input: Vec<PathBuf>,
        /// Run configuration supplying baseline hyperparameters and seed.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Model output; defaults to STEM.model.json next to the first input.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score a trained model on a labeled test set.
    Eval {
        /// Model file written by `train`.
        #[arg(long)]
        model: PathBuf,
        /// Labeled test dataset.
        #[arg(long)]
        test: PathBuf,
        /// Metrics output; defaults to STEM.metrics.json next to the test set.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write per-instance predictions as JSONL.
        #[arg(long)]
        predictions: Option<PathBuf>,
    },
    /// Original vs augmented comparison for every strategy.
    Experiment {
        /// Training dataset; the only one augmented.
        #[arg(long)]
        train: PathBuf,
        /// Held-out test dataset.
        #[arg(long)]
        test: PathBuf,
        /// Run configuration (TOML, or JSON by extension).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Directory with built lexicon files; overrides the config file.
        #[arg(long)]
        lexicons: Option<PathBuf>,
        /// Strategies to run; all three when omitted.
        #[arg(long, num_args = 1..)]
        strategies: Vec<Strategy>,
        /// Worker threads for augmentation.
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Experiment report JSON, readable by `report`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Render an experiment file as a text table.
    Report {
        /// Experiment file written by `experiment`.
        #[arg(long)]
        experiment: PathBuf,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// False-negative and false-positive overlap between prediction files.
    Overlap {
        /// Prediction JSONL files, one per tool; the file stem names the tool.
        #[arg(long, num_args = 2.., required = true)]
        pred: Vec<PathBuf>,
        /// Labeled dataset the predictions refer to.
        #[arg(long)]
        gold: PathBuf,
        /// Full region counts as JSON; the pooled summary goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum LexiconCommand {
    /// Build the emotion and polarity lexicons plus a build log.
    Build {
        /// NRC word-emotion association file (word, category, 0/1 per line).
        #[arg(long)]
        nrc: PathBuf,
        /// Software-engineering word list, one word per line.
        #[arg(long)]
        se_words: PathBuf,
        /// SentiWordNet 3.0 data file.
        #[arg(long)]
        sentiwordnet: PathBuf,
        /// Output directory for the lexicon files and build log.
        #[arg(long)]
        out: PathBuf,
        /// Polarity threshold.
        #[arg(long, default_value_t = DEFAULT_TAU)]
        tau: f64,
    },
}

struct Failure {
    kind: &'static str,
    message: String,
}

type Result<T> = std::result::Result<T, Failure>;

fn fail<E: Display>(kind: &'static str) -> impl FnOnce(E) -> Failure {
    move |e| Failure {
        kind,
        message: e.to_string(),
    }
}

/// Writes through `PATH.partial` and renames on success; a failed write
/// leaves only the partial file.
fn write_output(path: &Path, body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(fail("io"))?;
    }
    let mut partial = path.as_os_str().to_owned();
    partial.push(".partial");
    let partial = PathBuf::from(partial);
    let file = File::create(&partial).map_err(fail("io"))?;
    let mut w = BufWriter::new(file);
    body(&mut w).and_then(|_| w.flush()).map_err(fail("io"))?;
    drop(w);
    fs::rename(&partial, path).map_err(fail("io"))?;
    log::info!("wrote {}", path.display());
    Ok(())
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    write_output(path, |w| w.write_all(text.as_bytes()))
}

fn sibling(input: &Path, suffix: &str) -> PathBuf {
    let stem = input.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    input.with_file_name(format!("{stem}.{suffix}"))
}

fn load(path: &Path) -> Result<Dataset> {
    let ds = ingest(path, Format::from_path(path)).map_err(fail("input"))?;
    log::info!("loaded {} instances from {}", ds.len(), path.display());
    Ok(ds)
}

fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    let cfg = match path {
        Some(p) => RunConfig::load(p).map_err(fail("config"))?,
        None => RunConfig::default(),
    };
    cfg.validate().map_err(fail("config"))?;
    Ok(cfg)
}

fn load_lexicons(flag: Option<&Path>, cfg: &RunConfig) -> Result<Lexicons> {
    let tau = cfg.augmentation.polarity_tau;
    if let Some(dir) = flag.or(cfg.paths.lexicons.as_deref()) {
        return Lexicons::load_dir(dir, tau).map_err(fail("lexicon"));
    }
    match (&cfg.paths.nrc, &cfg.paths.se_words, &cfg.paths.sentiwordnet) {
        (Some(nrc), Some(se), Some(swn)) => Ok(Lexicons::build(nrc, se, swn, tau).map_err(fail("lexicon"))?.0),
        _ => Err(Failure {
            kind: "usage",
            message: "no lexicons: pass --lexicons DIR or set paths.lexicons in the config".into(),
        }),
    }
}

fn to_json_line<T: serde::Serialize>(w: &mut dyn Write, value: &T) -> std::io::Result<()> {
    serde_json::to_writer(&mut *w, value)?;
    w.write_all(b"\n")
}

fn pretty<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Fetch { repo, kind, limit, out } => {
            let token = std::env::var(TOKEN_ENV).map_err(|_| Failure {
                kind: "auth",
                message: format!("{TOKEN_ENV} is not set"),
            })?;
            let ds = fetch_comments(&repo, kind, limit, &token).map_err(fail("fetch"))?;
            match out {
                Some(path) => write_output(&path, |w| write_jsonl(&ds, w)),
                None => write_jsonl(&ds, std::io::stdout().lock()).map_err(fail("io")),
            }
        }
        Command::Preprocess { input, out } => {
            let ds = load(&input)?;
            write_output(&out, |w| write_jsonl(&ds, w))
        }
        Command::Lexicon {
            command:
                LexiconCommand::Build {
                    nrc,
                    se_words,
                    sentiwordnet,
                    out,
                    tau,
                },
        } => {
            let (lexicons, log) = Lexicons::build(&nrc, &se_words, &sentiwordnet, tau).map_err(fail("lexicon"))?;
            for (name, text) in lexicons.to_files() {
                write_text(&out.join(name), &text)?;
            }
            write_text(&out.join(BUILD_LOG_FILE), &pretty(&log))?;
            println!("{}", serde_json::to_string(&log).expect("serializable"));
            Ok(())
        }
        Command::Split {
            input,
            ratio,
            seed,
            out_dir,
        } => {
            let ds = load(&input)?;
            let split = stratified_split(&ds, ratio, seed).map_err(fail("split"))?;
            let stem = input.file_stem().and_then(|s| s.to_str()).unwrap_or("data");
            let dir = out_dir.unwrap_or_else(|| input.parent().map(Path::to_path_buf).unwrap_or_default());
            write_output(&dir.join(format!("{stem}.train.jsonl")), |w| write_jsonl(&split.train, w))?;
            write_output(&dir.join(format!("{stem}.test.jsonl")), |w| write_jsonl(&split.test, w))?;
            log::info!("split {} -> train {} / test {}", ds.len(), split.train.len(), split.test.len());
            Ok(())
        }
        Command::Augment {
            input,
            strategy,
            config,
            lexicons,
            workers,
            out,
            report,
        } => {
            let cfg = load_config(config.as_deref())?;
            let ds = load(&input)?;
            let lexicons = load_lexicons(lexicons.as_deref(), &cfg)?;
            let mut aug = cfg.augmentation();
            if let Some(s) = strategy {
                aug.strategy = s;
            }
            let proposer = cfg.proposer().map_err(fail("proposer"))?;
            let embedder = cfg.embedder().map_err(fail("embedder"))?;
            let output = augment_dataset(&ds, &aug, &lexicons, proposer.as_ref(), embedder.as_ref(), workers)
                .map_err(fail("augment"))?;
            log::info!(
                "{}: emitted {} variants, shortfall {}",
                aug.strategy,
                output.report.emitted,
                output.report.shortfall
            );
            let out = out.unwrap_or_else(|| sibling(&input, &format!("{}.jsonl", aug.strategy)));
            let report = report.unwrap_or_else(|| sibling(&input, &format!("{}.report.json", aug.strategy)));
            write_output(&out, |w| output.instances.iter().try_for_each(|a| to_json_line(w, a)))?;
            write_text(&report, &pretty(&output.report))
        }
        Command::Train { input, config, out } => {
            let cfg = load_config(config.as_deref())?;
            let mut instances = Vec::new();
            for path in &input {
                instances.extend(load(path)?.instances);
            }
            let model = train_on(&instances, &cfg.baseline()).map_err(fail("train"))?;
            let out = out.unwrap_or_else(|| sibling(&input[0], "model.json"));
            write_text(&out, &pretty(&model))
        }
        Command::Eval {
            model,
            test,
            out,
            predictions,
        } => {
            let text = fs::read_to_string(&model).map_err(fail("io"))?;
            let model = BaselineModel::from_json(&text).map_err(fail("input"))?;
            let ds = load(&test)?;
            let preds = model.predict(&ds);
            let counts = ConfusionCounts::from_pairs(ds.iter().map(|u| &u.labels).zip(preds.iter().map(|p| &p.predicted)));
            let metrics = micro_metrics(&counts);
            if let Some(path) = predictions {
                write_output(&path, |w| write_predictions(w, &preds))?;
            }
            let out = out.unwrap_or_else(|| sibling(&test, "metrics.json"));
            write_text(&out, &pretty(&json!({ "test_size": ds.len(), "counts": counts, "metrics": metrics })))?;
            println!("micro f1 {:.3}", metrics.micro.f1);
            Ok(())
        }
        Command::Experiment {
            train,
            test,
            config,
            lexicons,
            strategies,
            workers,
            out,
        } => {
            let cfg = load_config(config.as_deref())?;
            let (train, test) = (load(&train)?, load(&test)?);
            let lexicons = load_lexicons(lexicons.as_deref(), &cfg)?;
            let strategies = if strategies.is_empty() { Strategy::ALL.to_vec() } else { strategies };
            let configs: Vec<_> = strategies.iter().map(|s| cfg.augmentation().with_strategy(*s)).collect();
            let proposer = cfg.proposer().map_err(fail("proposer"))?;
            let embedder = cfg.embedder().map_err(fail("embedder"))?;
            let setup = ExperimentSetup {
                lexicons: &lexicons,
                proposer: proposer.as_ref(),
                embedder: embedder.as_ref(),
                workers,
            };
            let report = run_experiment(&train, &test, &configs, &cfg.baseline(), &setup).map_err(fail("experiment"))?;
            write_text(&out, &pretty(&report))
        }
        Command::Report { experiment, out } => {
            let text = fs::read_to_string(&experiment).map_err(fail("io"))?;
            let report: ExperimentReport = serde_json::from_str(&text).map_err(fail("input"))?;
            let table = report.render_table();
            match out {
                Some(path) => write_text(&path, &table),
                None => {
                    print!("{table}");
                    Ok(())
                }
            }
        }
        Command::Overlap { pred, gold, out } => {
            let gold_ds = load(&gold)?;
            let mut tools = Vec::new();
            for path in &pred {
                let file = File::open(path).map_err(fail("io"))?;
                let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("pred").to_string();
                tools.push((name, read_predictions(file).map_err(fail("input"))?));
            }
            let overlap = tool_overlap(&gold_ds, &tools).map_err(fail("overlap"))?;
            if let Some(path) = out {
                write_text(&path, &pretty(&overlap))?;
            }
            let fns = &overlap.false_negatives["all"];
            let fps = &overlap.false_positives["all"];
            println!("false negatives shared by all: {}", fns.all_shared_summary());
            println!("false positives shared by all: {}", fps.all_shared_summary());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.to_string();
            let first = message.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            eprintln!("{}", json!({ "error": "usage", "message": first }));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", json!({ "error": f.kind, "message": f.message }));
            ExitCode::FAILURE
        }
    }
}
