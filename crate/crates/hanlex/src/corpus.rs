//! Corpus ingestion: byte decoding, character classification and sentence
//! splitting.
//!
//! A corpus is a flat sequence of classified characters. Sentences are spans
//! into that sequence; the split never rewrites or drops characters, so the
//! original stream can always be reconstructed from the spans plus the
//! delimiter characters between them.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Coarse character classes used throughout extraction and evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CharClass {
    /// CJK Unified Ideographs and Extension A.
    Ideograph,
    /// CJK symbols and punctuation, fullwidth forms, ASCII punctuation.
    Punctuation,
    /// Remaining printable ASCII: letters, digits, space.
    AsciiMarkup,
    /// Everything else (controls, Latin-1, kana, ...).
    Other,
}

/// Classifies a single code point. Total and pure: every `char` maps to
/// exactly one class.
pub fn classify_char(c: char) -> CharClass {
    match c as u32 {
        0x4E00..=0x9FFF | 0x3400..=0x4DBF => CharClass::Ideograph,
        0x3000..=0x303F | 0xFF00..=0xFFEF => CharClass::Punctuation,
        _ if c.is_ascii_punctuation() => CharClass::Punctuation,
        _ if c == ' ' || c.is_ascii_graphic() => CharClass::AsciiMarkup,
        _ => CharClass::Other,
    }
}

/// Sentence delimiters used when none are configured.
pub const DEFAULT_DELIMITERS: &[char] = &['。', '！', '？', '；', '\n', '.', '!', '?'];

/// A decoded corpus: every character with its class, in input order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharStream {
    chars: Vec<char>,
    classes: Vec<CharClass>,
    source_id: String,
}

impl CharStream {
    pub fn from_text(text: &str, source_id: impl Into<String>) -> Self {
        let chars: Vec<char> = text.chars().collect();
        let classes = chars.iter().map(|&c| classify_char(c)).collect();
        CharStream {
            chars,
            classes,
            source_id: source_id.into(),
        }
    }

    /// Concatenates shards in the given order. Deterministic: the result
    /// depends only on shard order and content.
    pub fn concat<I>(shards: I, source_id: impl Into<String>) -> Self
    where
        I: IntoIterator<Item = CharStream>,
    {
        let mut chars = Vec::new();
        let mut classes = Vec::new();
        for shard in shards {
            chars.extend(shard.chars);
            classes.extend(shard.classes);
        }
        CharStream {
            chars,
            classes,
            source_id: source_id.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.chars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chars.is_empty()
    }

    pub fn chars(&self) -> &[char] {
        &self.chars
    }

    pub fn classes(&self) -> &[CharClass] {
        &self.classes
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    /// Characters covered by one sentence span.
    pub fn sentence(&self, s: &Sentence) -> &[char] {
        &self.chars[s.start..s.end]
    }

    /// Re-encodes the stream. For UTF-8 input this is the identity.
    pub fn to_text(&self) -> String {
        self.chars.iter().collect()
    }
}

/// A contiguous sentence span `[start, end)` into a [`CharStream`].
/// Delimiter characters live between spans, never inside them.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sentence {
    pub start: usize,
    pub end: usize,
    /// Ordinal of this sentence within its stream.
    pub index: usize,
}

impl Sentence {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

/// Decodes raw bytes into a [`CharStream`].
///
/// `encoding` is a label such as `utf-8`, `gbk` or `big5`. UTF-8 is decoded
/// strictly; any invalid sequence is reported with its byte offset. Legacy
/// encodings are transcoded without replacement characters, so malformed
/// input is an error rather than silent data loss.
pub fn load_corpus(bytes: &[u8], encoding: &str, source_id: &str) -> Result<CharStream> {
    let label = encoding.trim().to_ascii_lowercase();
    let text = if label == "utf-8" || label == "utf8" {
        std::str::from_utf8(bytes)
            .map_err(|e| Error::Decoding {
                encoding: "utf-8".into(),
                offset: e.valid_up_to(),
            })?
            .to_owned()
    } else {
        let enc = encoding_rs::Encoding::for_label(label.as_bytes())
            .ok_or_else(|| Error::UnsupportedEncoding(encoding.to_owned()))?;
        decode_without_replacement(enc, bytes)?
    };
    Ok(CharStream::from_text(&text, source_id))
}

fn decode_without_replacement(
    enc: &'static encoding_rs::Encoding,
    bytes: &[u8],
) -> Result<String> {
    use encoding_rs::DecoderResult;

    let mut decoder = enc.new_decoder();
    let mut out = String::new();
    let mut consumed = 0;
    loop {
        let needed = decoder
            .max_utf8_buffer_length_without_replacement(bytes.len() - consumed)
            .unwrap_or(bytes.len().saturating_mul(3) + 16);
        out.reserve(needed.max(16));
        let (result, read) =
            decoder.decode_to_string_without_replacement(&bytes[consumed..], &mut out, true);
        consumed += read;
        match result {
            DecoderResult::InputEmpty => return Ok(out),
            DecoderResult::Malformed(len, _) => {
                return Err(Error::Decoding {
                    encoding: enc.name().to_ascii_lowercase(),
                    offset: consumed.saturating_sub(len as usize),
                })
            }
            DecoderResult::OutputFull => continue,
        }
    }
}

/// Loads a corpus from a file, or from every regular file in a directory
/// (sorted by path, concatenated in that order).
pub fn load_corpus_path(path: &Path, encoding: &str) -> Result<CharStream> {
    let meta = fs::metadata(path).map_err(|e| Error::Io {
        path: path.to_owned(),
        source: e,
    })?;
    if meta.is_dir() {
        let mut files: Vec<_> = fs::read_dir(path)
            .map_err(|e| Error::Io {
                path: path.to_owned(),
                source: e,
            })?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| p.is_file())
            .collect();
        files.sort();
        let mut shards = Vec::with_capacity(files.len());
        for file in &files {
            shards.push(load_file(file, encoding)?);
        }
        Ok(CharStream::concat(shards, path.display().to_string()))
    } else {
        load_file(path, encoding)
    }
}

fn load_file(path: &Path, encoding: &str) -> Result<CharStream> {
    let bytes = fs::read(path).map_err(|e| Error::Io {
        path: path.to_owned(),
        source: e,
    })?;
    load_corpus(&bytes, encoding, &path.display().to_string())
}

/// Splits a stream into sentence spans.
///
/// A delimiter character ends the sentence in progress and belongs to no
/// span; empty spans (consecutive delimiters, leading or trailing delimiter
/// runs) are suppressed. Every non-delimiter character is covered by exactly
/// one span.
pub fn split_sentences(stream: &CharStream, delimiters: &[char]) -> Vec<Sentence> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, &c) in stream.chars().iter().enumerate() {
        if delimiters.contains(&c) {
            if let Some(s) = start.take() {
                out.push(Sentence {
                    start: s,
                    end: i,
                    index: out.len(),
                });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Sentence {
            start: s,
            end: stream.len(),
            index: out.len(),
        });
    }
    out
}

/// A decoded stream together with its sentence spans.
#[derive(Clone, Debug)]
pub struct Corpus {
    pub stream: CharStream,
    pub sentences: Vec<Sentence>,
}

impl Corpus {
    pub fn new(stream: CharStream, delimiters: &[char]) -> Self {
        let sentences = split_sentences(&stream, delimiters);
        Corpus { stream, sentences }
    }

    pub fn from_text(text: &str, source_id: &str, delimiters: &[char]) -> Self {
        Corpus::new(CharStream::from_text(text, source_id), delimiters)
    }
}
