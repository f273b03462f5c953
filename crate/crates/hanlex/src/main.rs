//! Command-line driver for the extraction, augmentation, tokenization and
//! scoring pipeline.
//!
//! Reports go to standard output as `# key=value` config header lines,
//! machine-readable `key=value` blocks, and aligned tables. File payloads
//! (candidates, dictionaries, segmented text, corpora) are written
//! atomically, so chained pipeline steps never see partial files. Exit
//! codes: 1 for I/O failures, 2 for configuration errors, 3 for malformed
//! input files.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hanlex::config::Config;
use hanlex::corpus::{load_corpus_path, split_sentences, CharClass, CharStream};
use hanlex::error::{Error, Result};
use hanlex::eval::{
    error_reduction, format_segmentation, generate_synthetic_corpus, judge_stats,
    parse_judgments, parse_surface_lines, parse_weighted_words, pra_report,
    score_surface_lines, segmentation_from_surfaces, PraRow, SegEvalReport, PRNG_NAME,
};
use hanlex::extraction::{
    count_unigrams, extract_candidates, load_candidates, save_candidates, ExtractionParams,
    LengthClass,
};
use hanlex::files::write_atomic;
use hanlex::lexicon::{augment_with_config, load_lexicon, save_lexicon};
use hanlex::tokenizer::{token_types, tokenize_corpus, Segmentation, Strategy};

#[derive(Parser)]
#[command(
    name = "hanlex",
    version,
    about = "Statistical word extraction, lexicon augmentation and tokenization for unsegmented CJK text"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML config file; omitted keys keep their built-in defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured random seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Byte encoding of corpus and text inputs (e.g. utf-8, gbk, big5).
    #[arg(long, global = true, default_value = "utf-8")]
    encoding: String,
    /// Token separator in segmented text files.
    #[arg(long, global = true, default_value = "/")]
    separator: String,
}

#[derive(Subcommand)]
enum Command {
    /// Extract word candidates from an unsegmented corpus.
    Extract {
        /// Corpus file, or directory of shards read in name order.
        corpus: PathBuf,
        /// Candidate TSV destination.
        #[arg(long)]
        out: PathBuf,
    },
    /// Filter candidates and merge them into a dictionary.
    Augment {
        /// Base dictionary TSV.
        #[arg(long)]
        dict: PathBuf,
        /// Candidate TSV from `extract`.
        #[arg(long)]
        candidates: PathBuf,
        /// Augmented dictionary destination.
        #[arg(long)]
        out: PathBuf,
    },
    /// Segment text with a dictionary.
    Tokenize {
        /// Unsegmented input text.
        text: PathBuf,
        /// Dictionary TSV.
        #[arg(long)]
        dict: PathBuf,
        /// Segmented output file; written to standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Mark unknown tokens with a trailing '*'. Marked output is for
        /// reading; files meant for `evaluate` must stay unmarked.
        #[arg(long)]
        mark_unknown: bool,
        /// Tokenization strategy override: dp or greedy.
        #[arg(long)]
        strategy: Option<String>,
    },
    /// Score pipeline outputs.
    Evaluate {
        #[command(subcommand)]
        what: EvaluateCommand,
    },
    /// Generate a synthetic corpus with a known segmentation.
    Synth {
        /// Word list TSV: surface<TAB>weight.
        #[arg(long)]
        words: PathBuf,
        /// Corpus size to reach, in word characters.
        #[arg(long)]
        length: usize,
        /// Corpus text destination.
        #[arg(long)]
        out: PathBuf,
        /// Gold segmentation destination (token-delimited lines).
        #[arg(long)]
        gold_out: Option<PathBuf>,
    },
    /// Count characters, classes and sentences of a corpus.
    Stats {
        /// Corpus file, or directory of shards read in name order.
        corpus: PathBuf,
    },
}

#[derive(Subcommand)]
enum EvaluateCommand {
    /// Tally verdicts per evaluator with both precision conventions.
    Judgments {
        /// Judgment TSV: surface<TAB>verdict<TAB>evaluator.
        file: PathBuf,
        /// Restrict the report to one evaluator.
        #[arg(long)]
        evaluator: Option<String>,
    },
    /// Precision, recall and augmentation of candidates per length class.
    Pra {
        /// Candidate TSV from `extract`.
        #[arg(long)]
        candidates: PathBuf,
        /// Segmented reference text (token-delimited lines).
        #[arg(long)]
        reference: PathBuf,
        /// Dictionary the candidates would augment.
        #[arg(long)]
        dict: PathBuf,
        /// Judgment TSV over the candidate list.
        #[arg(long)]
        judgments: PathBuf,
    },
    /// Boundary error counts of a hypothesis against gold.
    Segmentation {
        /// Hypothesis segmentation file.
        #[arg(long)]
        hyp: PathBuf,
        /// Gold segmentation file.
        #[arg(long)]
        gold: PathBuf,
        /// Baseline hypothesis; adds error-reduction reporting.
        #[arg(long)]
        baseline: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Config { .. } => 2,
                Error::Io { .. } => 1,
                _ => 3,
            })
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut config = match &cli.common.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    if let Some(seed) = cli.common.seed {
        config.seed = seed;
    }
    let common = &cli.common;
    match cli.command {
        Command::Extract { corpus, out } => cmd_extract(&corpus, &out, &config, common),
        Command::Augment {
            dict,
            candidates,
            out,
        } => cmd_augment(&dict, &candidates, &out, &config),
        Command::Tokenize {
            text,
            dict,
            out,
            mark_unknown,
            strategy,
        } => cmd_tokenize(
            &text,
            &dict,
            out.as_deref(),
            mark_unknown,
            strategy.as_deref(),
            &config,
            common,
        ),
        Command::Evaluate { what } => match what {
            EvaluateCommand::Judgments { file, evaluator } => {
                cmd_evaluate_judgments(&file, evaluator.as_deref(), &config)
            }
            EvaluateCommand::Pra {
                candidates,
                reference,
                dict,
                judgments,
            } => cmd_evaluate_pra(&candidates, &reference, &dict, &judgments, &config, common),
            EvaluateCommand::Segmentation {
                hyp,
                gold,
                baseline,
            } => cmd_evaluate_segmentation(&hyp, &gold, baseline.as_deref(), &config, common),
        },
        Command::Synth {
            words,
            length,
            out,
            gold_out,
        } => cmd_synth(&words, length, &out, gold_out.as_deref(), &config, common),
        Command::Stats { corpus } => cmd_stats(&corpus, &config, common),
    }
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn print_header(config: &Config) {
    for line in config.snapshot_lines() {
        println!("# {line}");
    }
}

fn parse_strategy(s: &str) -> Result<Strategy> {
    match s {
        "dp" => Ok(Strategy::Dp),
        "greedy" => Ok(Strategy::Greedy),
        _ => Err(Error::Config {
            key: "tokenizer_strategy".to_string(),
            detail: format!("unknown strategy {s:?} (expected dp or greedy)"),
        }),
    }
}

fn load_sentences(stream: &CharStream, config: &Config) -> Vec<hanlex::corpus::Sentence> {
    split_sentences(stream, &config.delimiter_chars())
}

fn cmd_extract(corpus: &Path, out: &Path, config: &Config, common: &Common) -> Result<()> {
    let stream = load_corpus_path(corpus, &common.encoding)?;
    let sentences = load_sentences(&stream, config);
    let params = ExtractionParams::from_config(config);
    let (buckets, summary) = extract_candidates(&stream, &sentences, &params);
    save_candidates(&buckets, out)?;
    print_header(config);
    println!("sentences={}", summary.sentences);
    println!("bigrams_counted={}", summary.bigrams_counted);
    println!("bigrams_after_floor={}", summary.bigrams_after_floor);
    println!("significant={}", summary.significant);
    println!("adjacent_candidates={}", summary.adjacent_candidates);
    println!("expanded_candidates={}", summary.expanded_candidates);
    for class in LengthClass::ALL {
        println!("candidates[{}]={}", class.label(), buckets.class(class).len());
    }
    println!("candidates_total={}", buckets.total());
    Ok(())
}

fn cmd_augment(dict: &Path, candidates: &Path, out: &Path, config: &Config) -> Result<()> {
    let base = load_lexicon(dict)?;
    let buckets = load_candidates(candidates)?;
    let (augmented, report) = augment_with_config(&base, &buckets, config);
    save_lexicon(&augmented, out)?;
    print_header(config);
    println!(
        "{} entries + {} new -> {} entries (+{:.1}%), {} collisions kept their entry",
        report.old_size,
        report.added,
        report.new_size,
        report.growth_pct(),
        report.collisions
    );
    println!("old_size={}", report.old_size);
    println!("added={}", report.added);
    println!("collisions={}", report.collisions);
    println!("new_size={}", report.new_size);
    println!("growth_pct={:.1}", report.growth_pct());
    Ok(())
}

fn cmd_tokenize(
    text: &Path,
    dict: &Path,
    out: Option<&Path>,
    mark_unknown: bool,
    strategy: Option<&str>,
    config: &Config,
    common: &Common,
) -> Result<()> {
    let dictionary = load_lexicon(dict)?;
    let stream = load_corpus_path(text, &common.encoding)?;
    let sentences = load_sentences(&stream, config);
    let strategy = match strategy {
        Some(s) => parse_strategy(s)?,
        None => config.tokenizer_strategy,
    };
    let segmentations = tokenize_corpus(&stream, &sentences, &dictionary, strategy);
    let mut payload = String::new();
    for seg in &segmentations {
        payload.push_str(&format_segmentation(seg, &common.separator, mark_unknown));
        payload.push('\n');
    }
    match out {
        Some(path) => {
            write_atomic(path, payload.as_bytes())?;
            print_header(config);
            println!("strategy={strategy}");
            println!("sentences={}", segmentations.len());
            println!(
                "tokens={}",
                segmentations.iter().map(|s| s.tokens.len()).sum::<usize>()
            );
        }
        None => print!("{payload}"),
    }
    Ok(())
}

fn cmd_evaluate_judgments(file: &Path, evaluator: Option<&str>, config: &Config) -> Result<()> {
    let text = read_file(file)?;
    let judgments = parse_judgments(&text, &file.display().to_string())?;
    let evaluators: Vec<String> = match evaluator {
        Some(e) => vec![e.to_string()],
        None => judgments
            .iter()
            .map(|j| j.evaluator.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect(),
    };
    print_header(config);
    for e in &evaluators {
        let s = judge_stats(&judgments, e);
        println!(
            "evaluator={} total={} correct={} wrong={} unsure={} punct={} \
             precision_incl_pct={:.1} precision_excl_pct={:.1}",
            e,
            s.total,
            s.correct,
            s.wrong,
            s.unsure,
            s.punct,
            s.precision_incl().percent(),
            s.precision_excl().percent()
        );
    }
    println!();
    println!(
        "{:<12} {:>7} {:>8} {:>6} {:>7} {:>6} {:>7} {:>7}",
        "evaluator", "total", "correct", "wrong", "unsure", "punct", "incl%", "excl%"
    );
    for e in &evaluators {
        let s = judge_stats(&judgments, e);
        println!(
            "{:<12} {:>7} {:>8} {:>6} {:>7} {:>6} {:>7.1} {:>7.1}",
            e,
            s.total,
            s.correct,
            s.wrong,
            s.unsure,
            s.punct,
            s.precision_incl().percent(),
            s.precision_excl().percent()
        );
    }
    Ok(())
}

fn pra_row_line(row: &PraRow) -> String {
    format!(
        "class={} token_types={} candidates={} matched={} new_correct={} \
         precision_pct={:.1} recall_pct={:.1} augmentation_pct={:.1}",
        row.label(),
        row.token_types,
        row.candidates,
        row.matched,
        row.new_correct,
        row.precision().percent(),
        row.recall().percent(),
        row.augmentation().percent()
    )
}

fn cmd_evaluate_pra(
    candidates: &Path,
    reference: &Path,
    dict: &Path,
    judgments: &Path,
    config: &Config,
    common: &Common,
) -> Result<()> {
    let buckets = load_candidates(candidates)?;
    let reference_text = read_file(reference)?;
    let segmentations: Vec<Segmentation> = parse_surface_lines(&reference_text, &common.separator)
        .iter()
        .enumerate()
        .map(|(i, surfaces)| segmentation_from_surfaces(surfaces, i))
        .collect();
    let types = token_types(&segmentations);
    let dictionary = load_lexicon(dict)?;
    let judgment_text = read_file(judgments)?;
    let judgment_rows = parse_judgments(&judgment_text, &judgments.display().to_string())?;
    let report = pra_report(&buckets, &types, &dictionary, &judgment_rows);
    print_header(config);
    for row in report.rows.iter().chain(std::iter::once(&report.total)) {
        println!("{}", pra_row_line(row));
    }
    println!();
    println!(
        "{:<6} {:>11} {:>10} {:>8} {:>11} {:>7} {:>7} {:>7}",
        "class", "token_types", "candidates", "matched", "new_correct", "prec%", "rec%", "aug%"
    );
    for row in report.rows.iter().chain(std::iter::once(&report.total)) {
        println!(
            "{:<6} {:>11} {:>10} {:>8} {:>11} {:>7.1} {:>7.1} {:>7.1}",
            row.label(),
            row.token_types,
            row.candidates,
            row.matched,
            row.new_correct,
            row.precision().percent(),
            row.recall().percent(),
            row.augmentation().percent()
        );
    }
    Ok(())
}

fn print_seg_report(prefix: &str, report: &SegEvalReport) {
    println!("{prefix}tokens={}", report.tokens);
    println!("{prefix}false_joins={}", report.false_joins);
    println!("{prefix}false_breaks={}", report.false_breaks);
    println!("{prefix}errors={}", report.errors());
    println!("{prefix}error_rate_pct={:.1}", report.error_rate() * 100.0);
    println!("{prefix}accuracy_pct={:.1}", report.accuracy() * 100.0);
}

fn cmd_evaluate_segmentation(
    hyp: &Path,
    gold: &Path,
    baseline: Option<&Path>,
    config: &Config,
    common: &Common,
) -> Result<()> {
    let gold_text = read_file(gold)?;
    let hyp_text = read_file(hyp)?;
    let report = score_surface_lines(&hyp_text, &gold_text, &common.separator)?;
    print_header(config);
    print_seg_report("", &report);
    if let Some(baseline_path) = baseline {
        let baseline_text = read_file(baseline_path)?;
        let baseline_report = score_surface_lines(&baseline_text, &gold_text, &common.separator)?;
        print_seg_report("baseline_", &baseline_report);
        println!(
            "error_reduction_pct={:.1}",
            error_reduction(&baseline_report, &report) * 100.0
        );
    }
    Ok(())
}

fn cmd_synth(
    words: &Path,
    length: usize,
    out: &Path,
    gold_out: Option<&Path>,
    config: &Config,
    common: &Common,
) -> Result<()> {
    let words_text = read_file(words)?;
    let lexicon = parse_weighted_words(&words_text, &words.display().to_string())?;
    if lexicon.is_empty() {
        return Err(Error::Format {
            origin: words.display().to_string(),
            line: 0,
            detail: "word list is empty".to_string(),
        });
    }
    let synth = generate_synthetic_corpus(&lexicon, length, config.seed, config.words_per_sentence);
    write_atomic(out, synth.stream.to_text().as_bytes())?;
    if let Some(gold_path) = gold_out {
        let mut payload = String::new();
        for seg in &synth.gold {
            payload.push_str(&format_segmentation(seg, &common.separator, false));
            payload.push('\n');
        }
        write_atomic(gold_path, payload.as_bytes())?;
    }
    print_header(config);
    println!("prng={PRNG_NAME}");
    println!("seed={}", config.seed);
    println!("sentences={}", synth.sentences.len());
    println!(
        "words={}",
        synth.gold.iter().map(|g| g.tokens.len()).sum::<usize>()
    );
    println!("chars={}", synth.stream.len());
    Ok(())
}

fn cmd_stats(corpus: &Path, config: &Config, common: &Common) -> Result<()> {
    let stream = load_corpus_path(corpus, &common.encoding)?;
    let sentences = load_sentences(&stream, config);
    let unigrams = count_unigrams(&stream, &sentences);
    let mut ideographs = 0usize;
    let mut punctuation = 0usize;
    let mut ascii_markup = 0usize;
    let mut other = 0usize;
    for class in stream.classes() {
        match class {
            CharClass::Ideograph => ideographs += 1,
            CharClass::Punctuation => punctuation += 1,
            CharClass::AsciiMarkup => ascii_markup += 1,
            CharClass::Other => other += 1,
        }
    }
    print_header(config);
    println!("chars={}", stream.len());
    println!("ideographs={ideographs}");
    println!("punctuation={punctuation}");
    println!("ascii_markup={ascii_markup}");
    println!("other={other}");
    println!("sentences={}", sentences.len());
    println!("sentence_chars={}", unigrams.total());
    println!("distinct_sentence_chars={}", unigrams.distinct());
    Ok(())
}
