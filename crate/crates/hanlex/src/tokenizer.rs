//! Dictionary tokenization.
//!
//! The default strategy finds a shortest path through the segmentation
//! lattice: fewest tokens first, highest summed frequency category second,
//! longest leftmost token last. A greedy forward longest-match variant is
//! available for comparison runs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::corpus::{CharStream, Sentence};
use crate::extraction::LengthClass;
use crate::lexicon::Lexicon;

/// Longest dictionary match the tokenizer will consider, in characters.
pub const MAX_MATCH: usize = 10;

/// One token of a segmented sentence. `start..end` are character offsets
/// into the sentence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub start: usize,
    pub end: usize,
    /// Whether the surface was found in the dictionary. Single characters
    /// fall back to unknown tokens when absent.
    pub known: bool,
}

/// A tokenized sentence. Token surfaces concatenate back to exactly the
/// input characters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segmentation {
    pub tokens: Vec<Token>,
    pub sentence_index: usize,
}

impl Segmentation {
    /// The covered text; equals the input the segmentation was built from.
    pub fn text(&self) -> String {
        self.tokens.iter().map(|t| t.surface.as_str()).collect()
    }

    pub fn char_len(&self) -> usize {
        self.tokens.iter().map(|t| t.end - t.start).sum()
    }

    /// Interior token boundaries as character offsets (the sentence end is
    /// not a boundary).
    pub fn boundaries(&self) -> BTreeSet<usize> {
        let total = self.char_len();
        self.tokens
            .iter()
            .map(|t| t.end)
            .filter(|&e| e != total)
            .collect()
    }
}

/// Tokenization strategy selector.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Shortest path with frequency and leftmost-longest tie-breaks.
    #[default]
    Dp,
    /// Forward maximum matching.
    Greedy,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Dp => "dp",
            Strategy::Greedy => "greedy",
        })
    }
}

#[derive(Clone, Copy)]
struct Cell {
    count: u32,
    score: u32,
    step: usize,
    known: bool,
}

/// Segments one sentence by dynamic programming over token counts.
///
/// Multi-character tokens must be dictionary entries no longer than
/// [`MAX_MATCH`]; any single character is a valid fallback token. Among
/// segmentations with the fewest tokens, the highest summed frequency
/// category wins (unknown characters score 0); remaining ties prefer the
/// longer token at the leftmost point of difference.
pub fn tokenize(chars: &[char], dict: &Lexicon, sentence_index: usize) -> Segmentation {
    let n = chars.len();
    let mut cells: Vec<Cell> = vec![
        Cell {
            count: 0,
            score: 0,
            step: 0,
            known: false,
        };
        n + 1
    ];
    let mut buf = String::new();
    for i in (0..n).rev() {
        let mut best: Option<Cell> = None;
        for len in 1..=MAX_MATCH.min(n - i) {
            buf.clear();
            buf.extend(&chars[i..i + len]);
            let entry = dict.get(&buf);
            if len > 1 && entry.is_none() {
                continue;
            }
            let next = &cells[i + len];
            let cand = Cell {
                count: next.count + 1,
                score: next.score + entry.map(|e| e.freq_cat as u32).unwrap_or(0),
                step: len,
                known: entry.is_some(),
            };
            // Fewer tokens, then higher score, then longer first token.
            let better = match &best {
                None => true,
                Some(b) => {
                    cand.count < b.count
                        || (cand.count == b.count && cand.score > b.score)
                        || (cand.count == b.count && cand.score == b.score && cand.step > b.step)
                }
            };
            if better {
                best = Some(cand);
            }
        }
        cells[i] = best.expect("single-character fallback always applies");
    }

    let mut tokens = Vec::new();
    let mut i = 0;
    while i < n {
        let cell = cells[i];
        let end = i + cell.step;
        tokens.push(Token {
            surface: chars[i..end].iter().collect(),
            start: i,
            end,
            known: cell.known,
        });
        i = end;
    }
    Segmentation {
        tokens,
        sentence_index,
    }
}

/// Forward maximum matching: repeatedly take the longest dictionary match,
/// falling back to a single character.
pub fn tokenize_greedy(chars: &[char], dict: &Lexicon, sentence_index: usize) -> Segmentation {
    let n = chars.len();
    let mut tokens = Vec::new();
    let mut buf = String::new();
    let mut i = 0;
    while i < n {
        let mut step = 1;
        let mut known = false;
        for len in (1..=MAX_MATCH.min(n - i)).rev() {
            buf.clear();
            buf.extend(&chars[i..i + len]);
            if dict.contains(&buf) {
                step = len;
                known = true;
                break;
            }
        }
        tokens.push(Token {
            surface: chars[i..i + step].iter().collect(),
            start: i,
            end: i + step,
            known,
        });
        i += step;
    }
    Segmentation {
        tokens,
        sentence_index,
    }
}

pub fn tokenize_with(
    strategy: Strategy,
    chars: &[char],
    dict: &Lexicon,
    sentence_index: usize,
) -> Segmentation {
    match strategy {
        Strategy::Dp => tokenize(chars, dict, sentence_index),
        Strategy::Greedy => tokenize_greedy(chars, dict, sentence_index),
    }
}

/// Tokenizes every sentence of a corpus, in order. Sentences are
/// independent, so the output is deterministic for a given dictionary.
pub fn tokenize_corpus(
    stream: &CharStream,
    sentences: &[Sentence],
    dict: &Lexicon,
    strategy: Strategy,
) -> Vec<Segmentation> {
    sentences
        .iter()
        .map(|s| tokenize_with(strategy, stream.sentence(s), dict, s.index))
        .collect()
}

/// Collects the distinct multi-character token surfaces of a tokenized
/// corpus, bucketed by length class. Single-character tokens are excluded.
pub fn token_types(segmentations: &[Segmentation]) -> BTreeMap<LengthClass, BTreeSet<String>> {
    let mut out: BTreeMap<LengthClass, BTreeSet<String>> = BTreeMap::new();
    for seg in segmentations {
        for token in &seg.tokens {
            let len = token.end - token.start;
            if len >= 2 {
                out.entry(LengthClass::of(len))
                    .or_default()
                    .insert(token.surface.clone());
            }
        }
    }
    out
}
