//! Lexicon entries, frequency-category scaling, candidate filtering and
//! dictionary augmentation.
//!
//! Raw candidate frequencies are mapped onto the dictionary's coarse 1..=5
//! frequency categories by equal-mass quintiles of the log-frequency
//! distribution of the candidate set itself, so the new entries land on the
//! same scale the original dictionary uses.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::extraction::{CandidateStage, NGramBuckets, NGramCandidate};
use crate::files::write_atomic;

/// Where a lexicon entry came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EntrySource {
    /// Present in the original dictionary.
    Original,
    /// Added by statistical extraction.
    Extracted,
}

impl EntrySource {
    pub fn label(self) -> &'static str {
        match self {
            EntrySource::Original => "original",
            EntrySource::Extracted => "extracted",
        }
    }

    pub fn parse(s: &str) -> Option<EntrySource> {
        match s {
            "original" => Some(EntrySource::Original),
            "extracted" => Some(EntrySource::Extracted),
            _ => None,
        }
    }
}

/// One dictionary entry. `freq_cat` is always in 1..=5.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexEntry {
    pub surface: String,
    pub freq_cat: u8,
    pub source: EntrySource,
}

impl LexEntry {
    pub fn new(surface: impl Into<String>, freq_cat: u8, source: EntrySource) -> LexEntry {
        let surface = surface.into();
        assert!(!surface.is_empty(), "entry surface must be non-empty");
        assert!((1..=5).contains(&freq_cat), "freq_cat must be 1..=5");
        LexEntry {
            surface,
            freq_cat,
            source,
        }
    }
}

/// A dictionary: unique surfaces with frequency categories.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Lexicon {
    entries: BTreeMap<String, LexEntry>,
}

impl Lexicon {
    pub fn new() -> Lexicon {
        Lexicon::default()
    }

    pub fn from_entries(entries: impl IntoIterator<Item = LexEntry>) -> Lexicon {
        let mut lex = Lexicon::new();
        for e in entries {
            lex.insert(e);
        }
        lex
    }

    /// Inserts or replaces an entry outright (no merge rule).
    pub fn insert(&mut self, entry: LexEntry) {
        self.entries.insert(entry.surface.clone(), entry);
    }

    pub fn get(&self, surface: &str) -> Option<&LexEntry> {
        self.entries.get(surface)
    }

    pub fn contains(&self, surface: &str) -> bool {
        self.entries.contains_key(surface)
    }

    /// Frequency category of a surface, 0 when absent. The tokenizer scores
    /// unknown tokens as 0.
    pub fn freq_cat(&self, surface: &str) -> u8 {
        self.get(surface).map(|e| e.freq_cat).unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in surface order.
    pub fn iter(&self) -> impl Iterator<Item = &LexEntry> {
        self.entries.values()
    }
}

/// Maps raw frequencies onto categories 1..=5 by equal-mass quintiles of
/// the log-frequency distribution it was fitted on.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyScaler {
    boundaries: [f64; 4],
    max_log: f64,
}

impl FrequencyScaler {
    /// Fits quintile boundaries to the given raw frequencies. Returns `None`
    /// for an empty set.
    pub fn fit(freqs: &[u64]) -> Option<FrequencyScaler> {
        if freqs.is_empty() {
            return None;
        }
        let mut logs: Vec<f64> = freqs.iter().map(|&f| (f as f64).ln()).collect();
        logs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = logs.len();
        // Nearest-rank quantile: the smallest value with at least p*n mass
        // at or below it.
        let quantile = |p: f64| {
            let rank = (p * n as f64).ceil() as usize;
            logs[rank.clamp(1, n) - 1]
        };
        Some(FrequencyScaler {
            boundaries: [quantile(0.2), quantile(0.4), quantile(0.6), quantile(0.8)],
            max_log: logs[n - 1],
        })
    }

    /// Category for a raw frequency. Monotone in `raw_freq`; the fitted
    /// minimum maps to 1 and anything at or above the fitted maximum maps
    /// to 5, even when heavy ties collapse the upper quintiles.
    pub fn category(&self, raw_freq: u64) -> u8 {
        let lf = (raw_freq as f64).ln();
        if lf >= self.max_log {
            return 5;
        }
        1 + self.boundaries.iter().filter(|&&b| b < lf).count() as u8
    }
}

/// Removes candidates too rare for the lexicon and candidates that begin or
/// end with a stoplist character.
pub fn filter_candidates(
    candidates: Vec<NGramCandidate>,
    min_freq: u64,
    stoplist: &[char],
) -> Vec<NGramCandidate> {
    candidates
        .into_iter()
        .filter(|c| {
            if c.freq < min_freq {
                return false;
            }
            let mut chars = c.surface.chars();
            let first = chars.next();
            let last = c.surface.chars().next_back();
            match (first, last) {
                (Some(f), Some(l)) => !stoplist.contains(&f) && !stoplist.contains(&l),
                _ => false,
            }
        })
        .collect()
}

/// Entry and collision accounting for one augmentation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AugmentReport {
    pub old_size: usize,
    pub added: usize,
    pub collisions: usize,
    pub new_size: usize,
}

impl AugmentReport {
    /// Growth of the dictionary in percent, 0 for an empty base dictionary.
    pub fn growth_pct(&self) -> f64 {
        if self.old_size == 0 {
            0.0
        } else {
            100.0 * self.added as f64 / self.old_size as f64
        }
    }
}

/// Merges scaled stage-two entries and stage-one bigram candidates into a
/// dictionary.
///
/// Stage-one bigrams enter at frequency category 1. A surface already
/// present keeps its source and takes the maximum of the two categories, so
/// augmenting never lowers a category and never removes an entry; applying
/// the same additions twice leaves the result unchanged.
pub fn augment(
    dict: &Lexicon,
    stage2: Vec<LexEntry>,
    stage1_bigrams: &[NGramCandidate],
) -> (Lexicon, AugmentReport) {
    let mut out = dict.clone();
    let mut report = AugmentReport {
        old_size: dict.len(),
        ..AugmentReport::default()
    };
    {
        let mut apply = |entry: LexEntry| match out.entries.entry(entry.surface.clone()) {
            Entry::Vacant(slot) => {
                slot.insert(entry);
                report.added += 1;
            }
            Entry::Occupied(mut slot) => {
                report.collisions += 1;
                let existing = slot.get_mut();
                existing.freq_cat = existing.freq_cat.max(entry.freq_cat);
            }
        };
        for e in stage2 {
            apply(e);
        }
        for b in stage1_bigrams {
            apply(LexEntry::new(b.surface.clone(), 1, EntrySource::Extracted));
        }
    }
    report.new_size = out.len();
    (out, report)
}

/// Full augmentation flow from a bucketed candidate list.
///
/// Splits candidates by stage, applies the stoplist to both, drops grown
/// n-grams rarer than `min_candidate_freq` (adjacent bigrams already passed
/// the extraction thresholds), scales the surviving stage-two frequencies to
/// categories, and merges everything into `dict`.
pub fn augment_with_config(
    dict: &Lexicon,
    candidates: &NGramBuckets,
    config: &Config,
) -> (Lexicon, AugmentReport) {
    let stoplist = config.stoplist_chars();
    let (adjacent, expanded): (Vec<_>, Vec<_>) = candidates
        .iter_all()
        .cloned()
        .partition(|c| c.stage == CandidateStage::Adjacent);
    let stage2 = filter_candidates(expanded, config.min_candidate_freq, &stoplist);
    let stage1 = filter_candidates(adjacent, 1, &stoplist);
    let freqs: Vec<u64> = stage2.iter().map(|c| c.freq).collect();
    let stage2_entries: Vec<LexEntry> = match FrequencyScaler::fit(&freqs) {
        Some(scaler) => stage2
            .iter()
            .map(|c| {
                LexEntry::new(
                    c.surface.clone(),
                    scaler.category(c.freq),
                    EntrySource::Extracted,
                )
            })
            .collect(),
        None => Vec::new(),
    };
    augment(dict, stage2_entries, &stage1)
}

/// Parses lexicon TSV (`surface<TAB>freq_cat<TAB>source`). Duplicate
/// surfaces and malformed rows are errors carrying the line number.
pub fn parse_lexicon(text: &str, origin: &str) -> Result<Lexicon> {
    let mut lex = Lexicon::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split('\t');
        let (surface, cat, source) = match (fields.next(), fields.next(), fields.next(), fields.next())
        {
            (Some(s), Some(c), Some(src), None) => (s, c, src),
            _ => {
                return Err(Error::Format {
                    origin: origin.into(),
                    line: lineno,
                    detail: "expected 3 tab-separated fields".into(),
                })
            }
        };
        if surface.is_empty() {
            return Err(Error::Format {
                origin: origin.into(),
                line: lineno,
                detail: "empty surface".into(),
            });
        }
        let freq_cat: u8 = cat.parse().ok().filter(|c| (1..=5).contains(c)).ok_or_else(|| {
            Error::Format {
                origin: origin.into(),
                line: lineno,
                detail: format!("frequency category {cat:?} is not in 1..=5"),
            }
        })?;
        let source = EntrySource::parse(source).ok_or_else(|| Error::Format {
            origin: origin.into(),
            line: lineno,
            detail: format!("unknown source {source:?}"),
        })?;
        if lex.contains(surface) {
            return Err(Error::DuplicateSurface {
                origin: origin.into(),
                line: lineno,
                surface: surface.into(),
            });
        }
        lex.insert(LexEntry::new(surface, freq_cat, source));
    }
    Ok(lex)
}

pub fn load_lexicon(path: &Path) -> Result<Lexicon> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_owned(),
        source: e,
    })?;
    parse_lexicon(&text, &path.display().to_string())
}

/// Serializes in surface order; loading the result reproduces the lexicon
/// byte for byte.
pub fn lexicon_to_tsv(lex: &Lexicon) -> String {
    let mut out = String::new();
    for e in lex.iter() {
        out.push_str(&e.surface);
        out.push('\t');
        out.push_str(&e.freq_cat.to_string());
        out.push('\t');
        out.push_str(e.source.label());
        out.push('\n');
    }
    out
}

pub fn save_lexicon(lex: &Lexicon, path: &Path) -> Result<()> {
    write_atomic(path, lexicon_to_tsv(lex).as_bytes())
}
