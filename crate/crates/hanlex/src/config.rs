//! Runtime configuration: TOML file keys plus programmatic defaults.
//!
//! Every threshold the pipeline uses lives here so that a run can be
//! reproduced from its config snapshot alone. Command-line flags override
//! file values; the effective config is embedded in report headers.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tokenizer::Strategy;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Maximum co-occurrence distance, in characters (1..=5).
    pub window: usize,
    /// Minimum strength (partner z-score) for a significant bigram.
    pub k0: f64,
    /// Minimum spread (distance-histogram variance) for a significant bigram.
    #[serde(rename = "U0")]
    pub u0: f64,
    /// Peak threshold factor: a histogram slot is a peak when it reaches
    /// `freq/10 + k1 * sqrt(spread)`.
    pub k1: f64,
    /// Concordance dominance fraction for n-gram expansion (0, 1].
    #[serde(rename = "T")]
    pub t: f64,
    /// Bigrams rarer than this are dropped before any statistics.
    pub min_bigram_freq: u64,
    /// Expanded n-grams rarer than this are discarded.
    pub min_ngram_freq: u64,
    /// Candidates rarer than this never enter the lexicon.
    pub min_candidate_freq: u64,
    /// Characters that may not begin or end a lexicon candidate.
    pub stoplist: Vec<String>,
    /// Sentence delimiter characters.
    pub delimiters: Vec<String>,
    pub tokenizer_strategy: Strategy,
    /// Seed for every randomized operation (sampling, synthesis).
    pub seed: u64,
    /// Sentence length, in words, used by the synthetic corpus generator.
    pub words_per_sentence: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            window: 5,
            k0: 1.0,
            u0: 10.0,
            k1: 1.0,
            t: 0.75,
            min_bigram_freq: 8,
            min_ngram_freq: 8,
            min_candidate_freq: 11,
            stoplist: ["的", "是", "了", "在"].map(String::from).to_vec(),
            delimiters: crate::corpus::DEFAULT_DELIMITERS
                .iter()
                .map(|c| c.to_string())
                .collect(),
            tokenizer_strategy: Strategy::Dp,
            seed: 0,
            words_per_sentence: 20,
        }
    }
}

impl Config {
    pub fn from_toml_str(text: &str) -> Result<Config> {
        let config: Config = toml::from_str(text).map_err(|e| Error::Config {
            key: "(parse)".into(),
            detail: e.message().to_owned(),
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Config> {
        let text = fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.to_owned(),
            source: e,
        })?;
        Config::from_toml_str(&text)
    }

    /// Rejects out-of-range values, naming the offending key.
    pub fn validate(&self) -> Result<()> {
        fn bad(key: &str, detail: impl Into<String>) -> Error {
            Error::Config {
                key: key.into(),
                detail: detail.into(),
            }
        }
        if !(1..=5).contains(&self.window) {
            return Err(bad("window", format!("must be 1..=5, got {}", self.window)));
        }
        if !self.k0.is_finite() {
            return Err(bad("k0", "must be finite"));
        }
        if !self.u0.is_finite() || self.u0 < 0.0 {
            return Err(bad("U0", "must be finite and non-negative"));
        }
        if !self.k1.is_finite() {
            return Err(bad("k1", "must be finite"));
        }
        if !(self.t > 0.0 && self.t <= 1.0) {
            return Err(bad("T", format!("must be in (0, 1], got {}", self.t)));
        }
        if self.min_bigram_freq == 0 {
            return Err(bad("min_bigram_freq", "must be at least 1"));
        }
        if self.min_ngram_freq == 0 {
            return Err(bad("min_ngram_freq", "must be at least 1"));
        }
        if self.min_candidate_freq == 0 {
            return Err(bad("min_candidate_freq", "must be at least 1"));
        }
        for s in &self.stoplist {
            if s.chars().count() != 1 {
                return Err(bad("stoplist", format!("entry {s:?} is not a single character")));
            }
        }
        if self.delimiters.is_empty() {
            return Err(bad("delimiters", "must not be empty"));
        }
        for s in &self.delimiters {
            if s.chars().count() != 1 {
                return Err(bad(
                    "delimiters",
                    format!("entry {s:?} is not a single character"),
                ));
            }
        }
        if self.words_per_sentence == 0 {
            return Err(bad("words_per_sentence", "must be at least 1"));
        }
        Ok(())
    }

    pub fn stoplist_chars(&self) -> Vec<char> {
        self.stoplist.iter().filter_map(|s| s.chars().next()).collect()
    }

    pub fn delimiter_chars(&self) -> Vec<char> {
        self.delimiters
            .iter()
            .filter_map(|s| s.chars().next())
            .collect()
    }

    /// Stable `key=value` lines for report headers. Control characters in
    /// delimiter lists are escaped so headers stay one line per key.
    pub fn snapshot_lines(&self) -> Vec<String> {
        fn joined(items: &[String]) -> String {
            items
                .iter()
                .flat_map(|s| s.chars())
                .map(|c| match c {
                    '\n' => "\\n".to_string(),
                    '\t' => "\\t".to_string(),
                    '\r' => "\\r".to_string(),
                    c => c.to_string(),
                })
                .collect()
        }
        vec![
            format!("window={}", self.window),
            format!("k0={:?}", self.k0),
            format!("U0={:?}", self.u0),
            format!("k1={:?}", self.k1),
            format!("T={:?}", self.t),
            format!("min_bigram_freq={}", self.min_bigram_freq),
            format!("min_ngram_freq={}", self.min_ngram_freq),
            format!("min_candidate_freq={}", self.min_candidate_freq),
            format!("stoplist={}", joined(&self.stoplist)),
            format!("delimiters={}", joined(&self.delimiters)),
            format!("tokenizer_strategy={}", self.tokenizer_strategy),
            format!("seed={}", self.seed),
            format!("words_per_sentence={}", self.words_per_sentence),
        ]
    }
}
