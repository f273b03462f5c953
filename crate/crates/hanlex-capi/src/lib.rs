//! C ABI for the extraction, augmentation and tokenization pipeline.
//!
//! Conventions:
//!
//! * Every fallible function returns a [`HanlexStatus`] and writes its result
//!   through an `out` pointer only on `OK`.
//! * [`hanlex_last_error_message`] describes the most recent failure on the
//!   calling thread; the pointer stays valid until the next failure on that
//!   thread.
//! * Handles are opaque. Release each with its matching `_free` function;
//!   every `_free` accepts NULL. Returned strings belong to the caller and
//!   are released with [`hanlex_string_free`].
//! * Passing NULL for a required argument yields `NULL_ARGUMENT`, never a
//!   crash. Panics are caught and reported as `PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use hanlex::config::Config;
use hanlex::corpus::{load_corpus, split_sentences, CharStream, Sentence};
use hanlex::error::Error;
use hanlex::eval::format_segmentation;
use hanlex::extraction::{
    candidates_to_tsv, extract_candidates, parse_candidates, ExtractionParams, NGramBuckets,
};
use hanlex::lexicon::{augment_with_config, lexicon_to_tsv, parse_lexicon, Lexicon};
use hanlex::tokenizer::tokenize_corpus;

/// Outcome of a C ABI call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HanlexStatus {
    /// The call succeeded and any `out` parameter was written.
    Ok = 0,
    /// A required pointer argument was NULL.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Corpus bytes could not be decoded, or the encoding name is unknown.
    Decoding = 3,
    /// An input file or string violates its declared format.
    Format = 4,
    /// The configuration is invalid.
    Config = 5,
    /// An operating-system I/O failure.
    Io = 6,
    /// An internal panic was caught; state may be incomplete but memory is
    /// intact.
    Panic = 7,
}

/// Opaque configuration handle.
pub struct HanlexConfig {
    inner: Config,
}

/// Opaque decoded corpus: character stream plus sentence spans.
pub struct HanlexCorpus {
    stream: CharStream,
    sentences: Vec<Sentence>,
}

/// Opaque extracted candidate list, bucketed by length.
pub struct HanlexCandidates {
    inner: NGramBuckets,
}

/// Opaque dictionary handle.
pub struct HanlexLexicon {
    inner: Lexicon,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn fail(status: HanlexStatus, message: impl AsRef<str>) -> HanlexStatus {
    let clean: String = message.as_ref().chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = CString::new(clean).unwrap_or_default());
    status
}

fn fail_with(error: &Error) -> HanlexStatus {
    let status = match error {
        Error::Config { .. } => HanlexStatus::Config,
        Error::Io { .. } => HanlexStatus::Io,
        Error::Decoding { .. } | Error::UnsupportedEncoding(_) => HanlexStatus::Decoding,
        Error::Format { .. } | Error::DuplicateSurface { .. } | Error::MismatchedText => {
            HanlexStatus::Format
        }
    };
    fail(status, error.to_string())
}

fn guard(f: impl FnOnce() -> HanlexStatus) -> HanlexStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(HanlexStatus::Panic, "internal panic"),
    }
}

unsafe fn required<'a, T>(ptr: *const T, name: &str) -> Result<&'a T, HanlexStatus> {
    match unsafe { ptr.as_ref() } {
        Some(r) => Ok(r),
        None => Err(fail(
            HanlexStatus::NullArgument,
            format!("{name} must not be NULL"),
        )),
    }
}

unsafe fn required_str<'a>(ptr: *const c_char, name: &str) -> Result<&'a str, HanlexStatus> {
    if ptr.is_null() {
        return Err(fail(
            HanlexStatus::NullArgument,
            format!("{name} must not be NULL"),
        ));
    }
    unsafe { CStr::from_ptr(ptr) }.to_str().map_err(|_| {
        fail(
            HanlexStatus::InvalidUtf8,
            format!("{name} is not valid UTF-8"),
        )
    })
}

unsafe fn give_string(out: *mut *mut c_char, text: String) -> HanlexStatus {
    match CString::new(text) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            HanlexStatus::Ok
        }
        Err(_) => fail(
            HanlexStatus::Format,
            "output contains a NUL byte and cannot cross the C boundary",
        ),
    }
}

/// Library version as a static string; never NULL, do not free.
#[no_mangle]
pub extern "C" fn hanlex_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message for the most recent failure on this thread; empty before any
/// failure. Valid until the next failure on the same thread; do not free.
#[no_mangle]
pub extern "C" fn hanlex_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Releases a string returned by this library. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn hanlex_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// New configuration with built-in defaults. Never fails.
#[no_mangle]
pub extern "C" fn hanlex_config_new() -> *mut HanlexConfig {
    Box::into_raw(Box::new(HanlexConfig {
        inner: Config::default(),
    }))
}

/// Parses and validates a TOML configuration string.
#[no_mangle]
pub unsafe extern "C" fn hanlex_config_from_toml(
    toml: *const c_char,
    out: *mut *mut HanlexConfig,
) -> HanlexStatus {
    guard(|| unsafe {
        if out.is_null() {
            return fail(HanlexStatus::NullArgument, "out must not be NULL");
        }
        let text = match required_str(toml, "toml") {
            Ok(t) => t,
            Err(status) => return status,
        };
        match Config::from_toml_str(text) {
            Ok(config) => {
                *out = Box::into_raw(Box::new(HanlexConfig { inner: config }));
                HanlexStatus::Ok
            }
            Err(e) => fail_with(&e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn hanlex_config_free(config: *mut HanlexConfig) {
    if !config.is_null() {
        drop(unsafe { Box::from_raw(config) });
    }
}

/// Decodes corpus bytes (`encoding` e.g. "utf-8", "gbk", "big5") and splits
/// sentences with the configured delimiters. `bytes` may be NULL when `len`
/// is 0.
#[no_mangle]
pub unsafe extern "C" fn hanlex_corpus_load(
    bytes: *const u8,
    len: usize,
    encoding: *const c_char,
    config: *const HanlexConfig,
    out: *mut *mut HanlexCorpus,
) -> HanlexStatus {
    guard(|| unsafe {
        if out.is_null() {
            return fail(HanlexStatus::NullArgument, "out must not be NULL");
        }
        let data: &[u8] = if bytes.is_null() {
            if len != 0 {
                return fail(
                    HanlexStatus::NullArgument,
                    "bytes must not be NULL when len > 0",
                );
            }
            &[]
        } else {
            std::slice::from_raw_parts(bytes, len)
        };
        let encoding = match required_str(encoding, "encoding") {
            Ok(e) => e,
            Err(status) => return status,
        };
        let config = match required(config, "config") {
            Ok(c) => c,
            Err(status) => return status,
        };
        match load_corpus(data, encoding, "capi") {
            Ok(stream) => {
                let sentences = split_sentences(&stream, &config.inner.delimiter_chars());
                *out = Box::into_raw(Box::new(HanlexCorpus { stream, sentences }));
                HanlexStatus::Ok
            }
            Err(e) => fail_with(&e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn hanlex_corpus_free(corpus: *mut HanlexCorpus) {
    if !corpus.is_null() {
        drop(unsafe { Box::from_raw(corpus) });
    }
}

/// Number of decoded characters (not bytes).
#[no_mangle]
pub unsafe extern "C" fn hanlex_corpus_char_count(
    corpus: *const HanlexCorpus,
    out: *mut usize,
) -> HanlexStatus {
    guard(|| unsafe {
        if out.is_null() {
            return fail(HanlexStatus::NullArgument, "out must not be NULL");
        }
        match required(corpus, "corpus") {
            Ok(c) => {
                *out = c.stream.len();
                HanlexStatus::Ok
            }
            Err(status) => status,
        }
    })
}

/// Number of sentences after delimiter splitting.
#[no_mangle]
pub unsafe extern "C" fn hanlex_corpus_sentence_count(
    corpus: *const HanlexCorpus,
    out: *mut usize,
) -> HanlexStatus {
    guard(|| unsafe {
        if out.is_null() {
            return fail(HanlexStatus::NullArgument, "out must not be NULL");
        }
        match required(corpus, "corpus") {
            Ok(c) => {
                *out = c.sentences.len();
                HanlexStatus::Ok
            }
            Err(status) => status,
        }
    })
}

/// Runs both extraction stages with the configured thresholds.
#[no_mangle]
pub unsafe extern "C" fn hanlex_extract(
    corpus: *const HanlexCorpus,
    config: *const HanlexConfig,
    out: *mut *mut HanlexCandidates,
) -> HanlexStatus {
    guard(|| unsafe {
        if out.is_null() {
            return fail(HanlexStatus::NullArgument, "out must not be NULL");
        }
        let corpus = match required(corpus, "corpus") {
            Ok(c) => c,
            Err(status) => return status,
        };
        let config = match required(config, "config") {
            Ok(c) => c,
            Err(status) => return status,
        };
        let params = ExtractionParams::from_config(&config.inner);
        let (buckets, _) = extract_candidates(&corpus.stream, &corpus.sentences, &params);
        *out = Box::into_raw(Box::new(HanlexCandidates { inner: buckets }));
        HanlexStatus::Ok
    })
}

#[no_mangle]
pub unsafe extern "C" fn hanlex_candidates_free(candidates: *mut HanlexCandidates) {
    if !candidates.is_null() {
        drop(unsafe { Box::from_raw(candidates) });
    }
}

/// Total candidate count across all length classes.
#[no_mangle]
pub unsafe extern "C" fn hanlex_candidates_count(
    candidates: *const HanlexCandidates,
    out: *mut usize,
) -> HanlexStatus {
    guard(|| unsafe {
        if out.is_null() {
            return fail(HanlexStatus::NullArgument, "out must not be NULL");
        }
        match required(candidates, "candidates") {
            Ok(c) => {
                *out = c.inner.total();
                HanlexStatus::Ok
            }
            Err(status) => status,
        }
    })
}

/// Serializes candidates in the candidate TSV format.
#[no_mangle]
pub unsafe extern "C" fn hanlex_candidates_to_tsv(
    candidates: *const HanlexCandidates,
    out: *mut *mut c_char,
) -> HanlexStatus {
    guard(|| unsafe {
        if out.is_null() {
            return fail(HanlexStatus::NullArgument, "out must not be NULL");
        }
        match required(candidates, "candidates") {
            Ok(c) => give_string(out, candidates_to_tsv(&c.inner)),
            Err(status) => status,
        }
    })
}

/// Parses a candidate TSV string.
#[no_mangle]
pub unsafe extern "C" fn hanlex_candidates_from_tsv(
    tsv: *const c_char,
    out: *mut *mut HanlexCandidates,
) -> HanlexStatus {
    guard(|| unsafe {
        if out.is_null() {
            return fail(HanlexStatus::NullArgument, "out must not be NULL");
        }
        let text = match required_str(tsv, "tsv") {
            Ok(t) => t,
            Err(status) => return status,
        };
        match parse_candidates(text, "tsv") {
            Ok(buckets) => {
                *out = Box::into_raw(Box::new(HanlexCandidates { inner: buckets }));
                HanlexStatus::Ok
            }
            Err(e) => fail_with(&e),
        }
    })
}

/// New empty dictionary. Never fails.
#[no_mangle]
pub extern "C" fn hanlex_lexicon_new() -> *mut HanlexLexicon {
    Box::into_raw(Box::new(HanlexLexicon {
        inner: Lexicon::new(),
    }))
}

/// Parses dictionary TSV (`surface<TAB>freq_cat<TAB>source`).
#[no_mangle]
pub unsafe extern "C" fn hanlex_lexicon_from_tsv(
    tsv: *const c_char,
    out: *mut *mut HanlexLexicon,
) -> HanlexStatus {
    guard(|| unsafe {
        if out.is_null() {
            return fail(HanlexStatus::NullArgument, "out must not be NULL");
        }
        let text = match required_str(tsv, "tsv") {
            Ok(t) => t,
            Err(status) => return status,
        };
        match parse_lexicon(text, "tsv") {
            Ok(lexicon) => {
                *out = Box::into_raw(Box::new(HanlexLexicon { inner: lexicon }));
                HanlexStatus::Ok
            }
            Err(e) => fail_with(&e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn hanlex_lexicon_free(lexicon: *mut HanlexLexicon) {
    if !lexicon.is_null() {
        drop(unsafe { Box::from_raw(lexicon) });
    }
}

/// Entry count.
#[no_mangle]
pub unsafe extern "C" fn hanlex_lexicon_size(
    lexicon: *const HanlexLexicon,
    out: *mut usize,
) -> HanlexStatus {
    guard(|| unsafe {
        if out.is_null() {
            return fail(HanlexStatus::NullArgument, "out must not be NULL");
        }
        match required(lexicon, "lexicon") {
            Ok(l) => {
                *out = l.inner.len();
                HanlexStatus::Ok
            }
            Err(status) => status,
        }
    })
}

/// Serializes a dictionary in its canonical sorted TSV format.
#[no_mangle]
pub unsafe extern "C" fn hanlex_lexicon_to_tsv(
    lexicon: *const HanlexLexicon,
    out: *mut *mut c_char,
) -> HanlexStatus {
    guard(|| unsafe {
        if out.is_null() {
            return fail(HanlexStatus::NullArgument, "out must not be NULL");
        }
        match required(lexicon, "lexicon") {
            Ok(l) => give_string(out, lexicon_to_tsv(&l.inner)),
            Err(status) => status,
        }
    })
}

/// Filters, scales and merges candidates into `dict`, producing a new
/// dictionary handle. `added` and `collisions` are optional report outputs;
/// pass NULL to skip either.
#[no_mangle]
pub unsafe extern "C" fn hanlex_augment(
    dict: *const HanlexLexicon,
    candidates: *const HanlexCandidates,
    config: *const HanlexConfig,
    out: *mut *mut HanlexLexicon,
    added: *mut usize,
    collisions: *mut usize,
) -> HanlexStatus {
    guard(|| unsafe {
        if out.is_null() {
            return fail(HanlexStatus::NullArgument, "out must not be NULL");
        }
        let dict = match required(dict, "dict") {
            Ok(d) => d,
            Err(status) => return status,
        };
        let candidates = match required(candidates, "candidates") {
            Ok(c) => c,
            Err(status) => return status,
        };
        let config = match required(config, "config") {
            Ok(c) => c,
            Err(status) => return status,
        };
        let (augmented, report) = augment_with_config(&dict.inner, &candidates.inner, &config.inner);
        if !added.is_null() {
            *added = report.added;
        }
        if !collisions.is_null() {
            *collisions = report.collisions;
        }
        *out = Box::into_raw(Box::new(HanlexLexicon { inner: augmented }));
        HanlexStatus::Ok
    })
}

/// Tokenizes every sentence with the configured strategy and returns one
/// line per sentence, tokens joined by `separator`, with a trailing newline
/// per line. Unknown tokens get a trailing '*' when `mark_unknown` is set.
#[no_mangle]
pub unsafe extern "C" fn hanlex_tokenize(
    corpus: *const HanlexCorpus,
    dict: *const HanlexLexicon,
    config: *const HanlexConfig,
    separator: *const c_char,
    mark_unknown: bool,
    out: *mut *mut c_char,
) -> HanlexStatus {
    guard(|| unsafe {
        if out.is_null() {
            return fail(HanlexStatus::NullArgument, "out must not be NULL");
        }
        let corpus = match required(corpus, "corpus") {
            Ok(c) => c,
            Err(status) => return status,
        };
        let dict = match required(dict, "dict") {
            Ok(d) => d,
            Err(status) => return status,
        };
        let config = match required(config, "config") {
            Ok(c) => c,
            Err(status) => return status,
        };
        let separator = match required_str(separator, "separator") {
            Ok(s) => s,
            Err(status) => return status,
        };
        let segmentations = tokenize_corpus(
            &corpus.stream,
            &corpus.sentences,
            &dict.inner,
            config.inner.tokenizer_strategy,
        );
        let mut text = String::new();
        for seg in &segmentations {
            text.push_str(&format_segmentation(seg, separator, mark_unknown));
            text.push('\n');
        }
        give_string(out, text)
    })
}
