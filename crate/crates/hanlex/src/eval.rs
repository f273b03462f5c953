//! Scoring and test-set machinery.
//!
//! Covers judged-candidate precision, per-length precision/recall against a
//! tokenized reference, boundary-based segmentation error counts, seeded
//! sampling with replacement, and synthetic corpora with known gold
//! segmentations.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{split_sentences, CharStream, Sentence, DEFAULT_DELIMITERS};
use crate::error::{Error, Result};
use crate::extraction::{LengthClass, NGramBuckets};
use crate::lexicon::Lexicon;
use crate::tokenizer::{Segmentation, Token};

/// Identity of the sampling generator, recorded in report metadata so a rerun
/// can verify the algorithm and not just the seed.
pub const PRNG_NAME: &str = "chacha8";

/// A count-over-count ratio that keeps both parts. Zero-denominator ratios
/// evaluate to 0 and report themselves undefined instead of erroring; empty
/// buckets are routine at desk scale.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Self {
        Ratio { num, den }
    }

    pub fn is_defined(&self) -> bool {
        self.den != 0
    }

    pub fn value(&self) -> f64 {
        if self.den == 0 {
            0.0
        } else {
            self.num as f64 / self.den as f64
        }
    }

    pub fn percent(&self) -> f64 {
        self.value() * 100.0
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_defined() {
            write!(f, "{}/{} ({:.1}%)", self.num, self.den, self.percent())
        } else {
            write!(f, "{}/0 (undefined)", self.num)
        }
    }
}

/// One evaluator's call on one candidate surface.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Correct,
    Wrong,
    Unsure,
    Punctuation,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Correct => "correct",
            Verdict::Wrong => "wrong",
            Verdict::Unsure => "unsure",
            Verdict::Punctuation => "punctuation",
        }
    }

    pub fn parse(s: &str) -> Option<Verdict> {
        match s {
            "correct" => Some(Verdict::Correct),
            "wrong" => Some(Verdict::Wrong),
            "unsure" => Some(Verdict::Unsure),
            "punctuation" => Some(Verdict::Punctuation),
            _ => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Judgment {
    pub surface: String,
    pub verdict: Verdict,
    pub evaluator: String,
}

/// Verdict counts for one evaluator over one candidate list.
///
/// Two precision conventions coexist in published summaries of this kind of
/// audit: one divides by every judged row, the other first removes rows the
/// evaluator marked as punctuation. Both are provided; `total` always counts
/// every row.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct JudgmentStats {
    pub total: u64,
    pub correct: u64,
    pub wrong: u64,
    pub unsure: u64,
    pub punct: u64,
}

impl JudgmentStats {
    pub fn from_counts(correct: u64, wrong: u64, unsure: u64, punct: u64) -> Self {
        JudgmentStats {
            total: correct + wrong + unsure + punct,
            correct,
            wrong,
            unsure,
            punct,
        }
    }

    /// correct / total.
    pub fn precision_incl(&self) -> Ratio {
        Ratio::new(self.correct, self.total)
    }

    /// correct / (total - punctuation rows).
    pub fn precision_excl(&self) -> Ratio {
        Ratio::new(self.correct, self.total - self.punct)
    }
}

/// Tallies one evaluator's verdicts.
pub fn judge_stats(judgments: &[Judgment], evaluator: &str) -> JudgmentStats {
    let mut stats = JudgmentStats::default();
    for j in judgments.iter().filter(|j| j.evaluator == evaluator) {
        stats.total += 1;
        match j.verdict {
            Verdict::Correct => stats.correct += 1,
            Verdict::Wrong => stats.wrong += 1,
            Verdict::Unsure => stats.unsure += 1,
            Verdict::Punctuation => stats.punct += 1,
        }
    }
    stats
}

/// Surfaces the judge pool accepts: strictly more `correct` verdicts than all
/// other verdicts combined, pooled across evaluators.
pub fn human_correct_surfaces(judgments: &[Judgment]) -> BTreeSet<String> {
    let mut tally: BTreeMap<&str, (u64, u64)> = BTreeMap::new();
    for j in judgments {
        let entry = tally.entry(j.surface.as_str()).or_default();
        if j.verdict == Verdict::Correct {
            entry.0 += 1;
        } else {
            entry.1 += 1;
        }
    }
    tally
        .into_iter()
        .filter(|(_, (correct, other))| correct > other)
        .map(|(surface, _)| surface.to_string())
        .collect()
}

/// One per-length row of a precision/recall/augmentation report.
///
/// Precision and recall share the matched-candidate numerator; augmentation
/// counts candidates the judges accepted that the dictionary lacks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PraRow {
    /// `None` marks the totals row.
    pub class: Option<LengthClass>,
    pub token_types: u64,
    pub candidates: u64,
    pub matched: u64,
    pub new_correct: u64,
}

impl PraRow {
    pub fn label(&self) -> &'static str {
        self.class.map(LengthClass::label).unwrap_or("total")
    }

    /// matched / candidates.
    pub fn precision(&self) -> Ratio {
        Ratio::new(self.matched, self.candidates)
    }

    /// matched / token types.
    pub fn recall(&self) -> Ratio {
        Ratio::new(self.matched, self.token_types)
    }

    /// judged-correct-and-new / token types.
    pub fn augmentation(&self) -> Ratio {
        Ratio::new(self.new_correct, self.token_types)
    }
}

#[derive(Clone, Debug)]
pub struct PraReport {
    /// One row per length class, in [`LengthClass::ALL`] order.
    pub rows: Vec<PraRow>,
    pub total: PraRow,
}

/// Scores extracted candidates against the multi-character token types of a
/// tokenized reference text.
///
/// Per class: precision = matched/candidates, recall = matched/token types,
/// augmentation = (judged correct and not in `dict`)/token types. The totals
/// row sums the counts.
pub fn pra_report(
    candidates: &NGramBuckets,
    reference: &BTreeMap<LengthClass, BTreeSet<String>>,
    dict: &Lexicon,
    judgments: &[Judgment],
) -> PraReport {
    let accepted = human_correct_surfaces(judgments);
    let empty = BTreeSet::new();
    let mut rows = Vec::with_capacity(LengthClass::ALL.len());
    let mut total = PraRow {
        class: None,
        token_types: 0,
        candidates: 0,
        matched: 0,
        new_correct: 0,
    };
    for class in LengthClass::ALL {
        let types = reference.get(&class).unwrap_or(&empty);
        let cands = candidates.class(class);
        let mut matched = 0;
        let mut new_correct = 0;
        for c in cands {
            if types.contains(&c.surface) {
                matched += 1;
            }
            if accepted.contains(&c.surface) && !dict.contains(&c.surface) {
                new_correct += 1;
            }
        }
        let row = PraRow {
            class: Some(class),
            token_types: types.len() as u64,
            candidates: cands.len() as u64,
            matched,
            new_correct,
        };
        total.token_types += row.token_types;
        total.candidates += row.candidates;
        total.matched += row.matched;
        total.new_correct += row.new_correct;
        rows.push(row);
    }
    PraReport { rows, total }
}

/// Segmentation error counts over one or more scored sentence pairs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SegEvalReport {
    /// Hypothesis token count.
    pub tokens: u64,
    /// Gold boundaries the hypothesis missed (characters wrongly linked).
    pub false_joins: u64,
    /// Hypothesis boundaries absent from gold (characters wrongly split).
    pub false_breaks: u64,
}

impl SegEvalReport {
    pub fn from_counts(tokens: u64, false_joins: u64, false_breaks: u64) -> Self {
        SegEvalReport {
            tokens,
            false_joins,
            false_breaks,
        }
    }

    pub fn errors(&self) -> u64 {
        self.false_joins + self.false_breaks
    }

    pub fn error_ratio(&self) -> Ratio {
        Ratio::new(self.errors(), self.tokens)
    }

    pub fn error_rate(&self) -> f64 {
        self.error_ratio().value()
    }

    pub fn accuracy(&self) -> f64 {
        1.0 - self.error_rate()
    }

    /// Adds the counts of a report over a disjoint test set.
    pub fn merge(&mut self, other: &SegEvalReport) {
        self.tokens += other.tokens;
        self.false_joins += other.false_joins;
        self.false_breaks += other.false_breaks;
    }
}

/// Compares hypothesis and gold boundary sets for one sentence.
///
/// Both segmentations must cover the same characters. A hypothesis boundary
/// missing from gold is a false break; a gold boundary missing from the
/// hypothesis is a false join.
pub fn score_segmentation(hyp: &Segmentation, gold: &Segmentation) -> Result<SegEvalReport> {
    if hyp.text() != gold.text() {
        return Err(Error::MismatchedText);
    }
    let hyp_bounds = hyp.boundaries();
    let gold_bounds = gold.boundaries();
    Ok(SegEvalReport {
        tokens: hyp.tokens.len() as u64,
        false_joins: gold_bounds.difference(&hyp_bounds).count() as u64,
        false_breaks: hyp_bounds.difference(&gold_bounds).count() as u64,
    })
}

/// Scores aligned sentence lists and sums the counts.
pub fn score_corpus(hyp: &[Segmentation], gold: &[Segmentation]) -> Result<SegEvalReport> {
    if hyp.len() != gold.len() {
        return Err(Error::MismatchedText);
    }
    let mut report = SegEvalReport::default();
    for (h, g) in hyp.iter().zip(gold) {
        report.merge(&score_segmentation(h, g)?);
    }
    Ok(report)
}

/// Relative error-rate drop: (baseline - augmented) / baseline.
///
/// Returns 0 when the baseline rate is already 0.
pub fn error_reduction(baseline: &SegEvalReport, augmented: &SegEvalReport) -> f64 {
    let base = baseline.error_rate();
    if base == 0.0 {
        0.0
    } else {
        (base - augmented.error_rate()) / base
    }
}

/// Samples `n` sentences uniformly with replacement, reproducibly from `seed`.
pub fn sample_test_set(sentences: &[Sentence], n: usize, seed: u64) -> Vec<Sentence> {
    if n == 0 {
        return Vec::new();
    }
    assert!(!sentences.is_empty(), "cannot sample from an empty corpus");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| sentences[rng.gen_range(0..sentences.len())])
        .collect()
}

/// A generated corpus whose true segmentation is known.
#[derive(Clone, Debug)]
pub struct SyntheticCorpus {
    pub stream: CharStream,
    pub sentences: Vec<Sentence>,
    /// One segmentation per sentence, aligned with `sentences`.
    pub gold: Vec<Segmentation>,
}

/// Builds a corpus by sampling words i.i.d. by weight until at least `length`
/// word characters are emitted, closing a sentence with `。` after every
/// `words_per_sentence` words (and at the end).
///
/// Word surfaces must be nonempty, free of sentence delimiters, and carry
/// positive weights. The same seed reproduces the same corpus.
pub fn generate_synthetic_corpus(
    lexicon: &[(String, f64)],
    length: usize,
    seed: u64,
    words_per_sentence: usize,
) -> SyntheticCorpus {
    assert!(!lexicon.is_empty(), "word list must be nonempty");
    assert!(words_per_sentence >= 1, "need at least one word per sentence");
    for (surface, weight) in lexicon {
        assert!(!surface.is_empty(), "empty word surface");
        assert!(*weight > 0.0, "word weights must be positive");
        assert!(
            surface.chars().all(|c| !DEFAULT_DELIMITERS.contains(&c)),
            "word surface contains a sentence delimiter: {surface:?}"
        );
    }
    let dist = WeightedIndex::new(lexicon.iter().map(|(_, w)| *w)).expect("validated weights");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut text = String::new();
    let mut emitted = 0;
    let mut gold: Vec<Segmentation> = Vec::new();
    let mut tokens: Vec<Token> = Vec::new();
    let mut offset = 0;
    let close = |text: &mut String, tokens: &mut Vec<Token>, gold: &mut Vec<Segmentation>| {
        text.push('。');
        gold.push(Segmentation {
            tokens: std::mem::take(tokens),
            sentence_index: gold.len(),
        });
    };
    while emitted < length {
        let (surface, _) = &lexicon[dist.sample(&mut rng)];
        let chars = surface.chars().count();
        tokens.push(Token {
            surface: surface.clone(),
            start: offset,
            end: offset + chars,
            known: true,
        });
        offset += chars;
        emitted += chars;
        text.push_str(surface);
        if tokens.len() == words_per_sentence {
            close(&mut text, &mut tokens, &mut gold);
            offset = 0;
        }
    }
    if !tokens.is_empty() {
        close(&mut text, &mut tokens, &mut gold);
    }
    let stream = CharStream::from_text(&text, "synthetic");
    let sentences = split_sentences(&stream, DEFAULT_DELIMITERS);
    debug_assert_eq!(sentences.len(), gold.len());
    SyntheticCorpus {
        stream,
        sentences,
        gold,
    }
}

/// Parses judgment rows: `surface<TAB>verdict<TAB>evaluator`, one per line.
///
/// Rejects repeated (surface, evaluator) pairs; `origin` names the input in
/// errors. Blank lines are skipped.
pub fn parse_judgments(text: &str, origin: &str) -> Result<Vec<Judgment>> {
    let mut seen: BTreeSet<(String, String)> = BTreeSet::new();
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::Format {
                origin: origin.to_string(),
                line: line_no,
                detail: format!("expected 3 tab-separated fields, got {}", fields.len()),
            });
        }
        let verdict = Verdict::parse(fields[1]).ok_or_else(|| Error::Format {
            origin: origin.to_string(),
            line: line_no,
            detail: format!(
                "unknown verdict {:?} (expected correct, wrong, unsure or punctuation)",
                fields[1]
            ),
        })?;
        let surface = fields[0].to_string();
        let evaluator = fields[2].to_string();
        if !seen.insert((surface.clone(), evaluator.clone())) {
            return Err(Error::DuplicateSurface {
                origin: origin.to_string(),
                line: line_no,
                surface,
            });
        }
        out.push(Judgment {
            surface,
            verdict,
            evaluator,
        });
    }
    Ok(out)
}

/// Parses a word-weight list: `surface<TAB>weight` per line, weights finite
/// and positive. Duplicate surfaces are rejected; blank lines are skipped.
pub fn parse_weighted_words(text: &str, origin: &str) -> Result<Vec<(String, f64)>> {
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 2 {
            return Err(Error::Format {
                origin: origin.to_string(),
                line: line_no,
                detail: format!("expected 2 tab-separated fields, got {}", fields.len()),
            });
        }
        let weight: f64 = fields[1].parse().map_err(|_| Error::Format {
            origin: origin.to_string(),
            line: line_no,
            detail: format!("bad weight {:?}", fields[1]),
        })?;
        if !weight.is_finite() || weight <= 0.0 {
            return Err(Error::Format {
                origin: origin.to_string(),
                line: line_no,
                detail: format!("weight must be positive and finite, got {weight}"),
            });
        }
        if fields[0].is_empty() {
            return Err(Error::Format {
                origin: origin.to_string(),
                line: line_no,
                detail: "empty word surface".to_string(),
            });
        }
        if !seen.insert(fields[0].to_string()) {
            return Err(Error::DuplicateSurface {
                origin: origin.to_string(),
                line: line_no,
                surface: fields[0].to_string(),
            });
        }
        out.push((fields[0].to_string(), weight));
    }
    Ok(out)
}

/// Renders one segmented sentence: token surfaces joined by `separator`,
/// unknown tokens marked with a trailing `*` when `mark_unknown` is set.
///
/// Marked output is for reading; scoring input must be written unmarked.
pub fn format_segmentation(seg: &Segmentation, separator: &str, mark_unknown: bool) -> String {
    let mut out = String::new();
    for (i, token) in seg.tokens.iter().enumerate() {
        if i > 0 {
            out.push_str(separator);
        }
        out.push_str(&token.surface);
        if mark_unknown && !token.known {
            out.push('*');
        }
    }
    out
}

/// Splits each line into token surfaces on `separator`; empty pieces (from
/// doubled or trailing separators) are dropped, blank lines give empty
/// sentences.
pub fn parse_surface_lines(text: &str, separator: &str) -> Vec<Vec<String>> {
    text.lines()
        .map(|line| {
            line.split(separator)
                .filter(|piece| !piece.is_empty())
                .map(str::to_string)
                .collect()
        })
        .collect()
}

/// Rebuilds a segmentation from bare surfaces; offsets are cumulative and
/// every token is treated as known.
pub fn segmentation_from_surfaces(surfaces: &[String], sentence_index: usize) -> Segmentation {
    let mut tokens = Vec::with_capacity(surfaces.len());
    let mut offset = 0;
    for surface in surfaces {
        let chars = surface.chars().count();
        tokens.push(Token {
            surface: surface.clone(),
            start: offset,
            end: offset + chars,
            known: true,
        });
        offset += chars;
    }
    Segmentation {
        tokens,
        sentence_index,
    }
}

/// Scores two segmentation files line by line; both must have the same line
/// count and per-line text.
pub fn score_surface_lines(hyp: &str, gold: &str, separator: &str) -> Result<SegEvalReport> {
    let hyp_lines = parse_surface_lines(hyp, separator);
    let gold_lines = parse_surface_lines(gold, separator);
    if hyp_lines.len() != gold_lines.len() {
        return Err(Error::MismatchedText);
    }
    let mut report = SegEvalReport::default();
    for (i, (h, g)) in hyp_lines.iter().zip(&gold_lines).enumerate() {
        let hyp_seg = segmentation_from_surfaces(h, i);
        let gold_seg = segmentation_from_surfaces(g, i);
        report.merge(&score_segmentation(&hyp_seg, &gold_seg)?);
    }
    Ok(report)
}
