//! Statistical word discovery for unsegmented CJK text.
//!
//! The pipeline has four stations, each usable on its own:
//!
//! * [`corpus`] decodes byte streams into classified character streams and
//!   splits them into sentences.
//! * [`extraction`] finds word candidates in two stages: significant
//!   character pairs by positional co-occurrence statistics, then longer
//!   n-grams grown from those pairs through concordance expansion.
//! * [`lexicon`] filters candidates, scales raw frequencies to categories,
//!   and merges the survivors into an existing dictionary.
//! * [`tokenizer`] segments text by maximal dictionary matching with
//!   frequency preferences; [`eval`] scores the results and generates
//!   synthetic corpora with known segmentations.
//!
//! [`config`] carries every tunable threshold; [`error`] is the shared error
//! type. All computation is deterministic: identical inputs, configuration
//! and seeds reproduce identical outputs byte for byte.

pub mod config;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod extraction;
pub mod files;
pub mod lexicon;
pub mod tokenizer;

pub use config::Config;
pub use corpus::{classify_char, load_corpus, load_corpus_path, CharClass, CharStream, Corpus, Sentence};
pub use error::{Error, Result};
pub use eval::{
    error_reduction, generate_synthetic_corpus, judge_stats, pra_report, sample_test_set,
    score_corpus, score_segmentation, JudgmentStats, PraReport, Ratio, SegEvalReport,
    SyntheticCorpus, Verdict,
};
pub use extraction::{
    extract_candidates, ExtractionParams, ExtractionSummary, LengthClass, NGramBuckets,
    NGramCandidate,
};
pub use lexicon::{augment, augment_with_config, AugmentReport, FrequencyScaler, LexEntry, Lexicon};
pub use tokenizer::{tokenize, tokenize_corpus, tokenize_with, Segmentation, Strategy, Token};
