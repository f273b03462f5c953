#ifndef HANLEX_H
#define HANLEX_H

/* Generated by cbindgen from hanlex-capi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Outcome of a C ABI call.
 */
typedef enum HanlexStatus {
  /**
   * The call succeeded and any `out` parameter was written.
   */
  HANLEX_STATUS_OK = 0,
  /**
   * A required pointer argument was NULL.
   */
  HANLEX_STATUS_NULL_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  HANLEX_STATUS_INVALID_UTF8 = 2,
  /**
   * Corpus bytes could not be decoded, or the encoding name is unknown.
   */
  HANLEX_STATUS_DECODING = 3,
  /**
   * An input file or string violates its declared format.
   */
  HANLEX_STATUS_FORMAT = 4,
  /**
   * The configuration is invalid.
   */
  HANLEX_STATUS_CONFIG = 5,
  /**
   * An operating-system I/O failure.
   */
  HANLEX_STATUS_IO = 6,
  /**
   * An internal panic was caught; state may be incomplete but memory is
   * intact.
   */
  HANLEX_STATUS_PANIC = 7,
} HanlexStatus;

/**
 * Opaque extracted candidate list, bucketed by length.
 */
typedef struct HanlexCandidates HanlexCandidates;

/**
 * Opaque configuration handle.
 */
typedef struct HanlexConfig HanlexConfig;

/**
 * Opaque decoded corpus: character stream plus sentence spans.
 */
typedef struct HanlexCorpus HanlexCorpus;

/**
 * Opaque dictionary handle.
 */
typedef struct HanlexLexicon HanlexLexicon;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static string; never NULL, do not free.
 */
const char *hanlex_version(void);

/**
 * Message for the most recent failure on this thread; empty before any
 * failure. Valid until the next failure on the same thread; do not free.
 */
const char *hanlex_last_error_message(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 */
void hanlex_string_free(char *s);

/**
 * New configuration with built-in defaults. Never fails.
 */
struct HanlexConfig *hanlex_config_new(void);

/**
 * Parses and validates a TOML configuration string.
 */
enum HanlexStatus hanlex_config_from_toml(const char *toml, struct HanlexConfig **out);

void hanlex_config_free(struct HanlexConfig *config);

/**
 * Decodes corpus bytes (`encoding` e.g. "utf-8", "gbk", "big5") and splits
 * sentences with the configured delimiters. `bytes` may be NULL when `len`
 * is 0.
 */
enum HanlexStatus hanlex_corpus_load(const uint8_t *bytes,
                                     size_t len,
                                     const char *encoding,
                                     const struct HanlexConfig *config,
                                     struct HanlexCorpus **out);

void hanlex_corpus_free(struct HanlexCorpus *corpus);

/**
 * Number of decoded characters (not bytes).
 */
enum HanlexStatus hanlex_corpus_char_count(const struct HanlexCorpus *corpus, size_t *out);

/**
 * Number of sentences after delimiter splitting.
 */
enum HanlexStatus hanlex_corpus_sentence_count(const struct HanlexCorpus *corpus, size_t *out);

/**
 * Runs both extraction stages with the configured thresholds.
 */
enum HanlexStatus hanlex_extract(const struct HanlexCorpus *corpus,
                                 const struct HanlexConfig *config,
                                 struct HanlexCandidates **out);

void hanlex_candidates_free(struct HanlexCandidates *candidates);

/**
 * Total candidate count across all length classes.
 */
enum HanlexStatus hanlex_candidates_count(const struct HanlexCandidates *candidates, size_t *out);

/**
 * Serializes candidates in the candidate TSV format.
 */
enum HanlexStatus hanlex_candidates_to_tsv(const struct HanlexCandidates *candidates, char **out);

/**
 * Parses a candidate TSV string.
 */
enum HanlexStatus hanlex_candidates_from_tsv(const char *tsv, struct HanlexCandidates **out);

/**
 * New empty dictionary. Never fails.
 */
struct HanlexLexicon *hanlex_lexicon_new(void);

/**
 * Parses dictionary TSV (`surface<TAB>freq_cat<TAB>source`).
 */
enum HanlexStatus hanlex_lexicon_from_tsv(const char *tsv, struct HanlexLexicon **out);

void hanlex_lexicon_free(struct HanlexLexicon *lexicon);

/**
 * Entry count.
 */
enum HanlexStatus hanlex_lexicon_size(const struct HanlexLexicon *lexicon, size_t *out);

/**
 * Serializes a dictionary in its canonical sorted TSV format.
 */
enum HanlexStatus hanlex_lexicon_to_tsv(const struct HanlexLexicon *lexicon, char **out);

/**
 * Filters, scales and merges candidates into `dict`, producing a new
 * dictionary handle. `added` and `collisions` are optional report outputs;
 * pass NULL to skip either.
 */
enum HanlexStatus hanlex_augment(const struct HanlexLexicon *dict,
                                 const struct HanlexCandidates *candidates,
                                 const struct HanlexConfig *config,
                                 struct HanlexLexicon **out,
                                 size_t *added,
                                 size_t *collisions);

/**
 * Tokenizes every sentence with the configured strategy and returns one
 * line per sentence, tokens joined by `separator`, with a trailing newline
 * per line. Unknown tokens get a trailing '*' when `mark_unknown` is set.
 */
enum HanlexStatus hanlex_tokenize(const struct HanlexCorpus *corpus,
                                  const struct HanlexLexicon *dict,
                                  const struct HanlexConfig *config,
                                  const char *separator,
                                  bool mark_unknown,
                                  char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HANLEX_H */
