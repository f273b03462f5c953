//! Acceptance gate for the workspace. Each test covers one numbered
//! criterion and prints a single pass/fail line; a red test here means the
//! release bar is not met.
//!
//! Criteria 1-3 replay recorded evaluation counts through the ratio
//! arithmetic and require every reported percentage to be reproduced.
//! Criteria 4-5 check the counting stage and the tokenizer against
//! exhaustive reference implementations written independently in this file.
//! Criteria 6-7 plant a vocabulary in a synthetic corpus and require the
//! extractor to recover it and to improve tokenization. Criterion 8 runs
//! the core invariants as property suites of 1000 generated cases each.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config as PropConfig, RngAlgorithm, TestRng, TestRunner};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hanlex::config::Config;
use hanlex::corpus::{CharStream, Corpus, Sentence, DEFAULT_DELIMITERS};
use hanlex::eval::{
    error_reduction, generate_synthetic_corpus, judge_stats, sample_test_set, score_corpus,
    score_segmentation, Judgment, JudgmentStats, Ratio, SegEvalReport, Verdict,
};
use hanlex::extraction::{
    apply_frequency_floor, count_positional_bigrams, count_unigrams, extract_candidates,
    filter_significant_bigrams, merge_positional_bigrams, partition_by_length, CandidateStage,
    ExtractionParams, NGramCandidate, PositionalBigram, UnigramTable,
};
use hanlex::lexicon::{augment, augment_with_config, EntrySource, LexEntry, Lexicon};
use hanlex::tokenizer::{tokenize, tokenize_corpus, tokenize_with, Segmentation, Token};
use hanlex::tokenizer::Strategy as TokStrategy;

/// A computed percentage reproduces a reported one when it is within 0.1
/// percentage points, or when it rounds to the reported value at the
/// precision the report used (whole percents swallow up to 0.5 pp).
fn check_pct(what: &str, computed: f64, reported: f64, decimals: u32) {
    let within = (computed - reported).abs() <= 0.1 + 1e-9;
    let scale = 10f64.powi(decimals as i32);
    let rounds = ((computed * scale).round() / scale - reported).abs() < 1e-9;
    assert!(
        within || rounds,
        "{what}: computed {computed:.4}% does not reproduce reported {reported}%"
    );
}

fn synth_judgments(evaluator: &str, counts: [(Verdict, u64); 4]) -> Vec<Judgment> {
    let mut out = Vec::new();
    for (verdict, count) in counts {
        for _ in 0..count {
            out.push(Judgment {
                surface: format!("w{}", out.len()),
                verdict,
                evaluator: evaluator.to_string(),
            });
        }
    }
    out
}

/// Builds a (hypothesis, gold) pair covering the same text where the
/// hypothesis has exactly `tokens` tokens and misses exactly `errors` gold
/// boundaries: gold is all single characters, the hypothesis merges the
/// first `errors` adjacent pairs.
fn merged_pair(tokens: u64, errors: u64) -> (Segmentation, Segmentation) {
    assert!(errors <= tokens);
    let total_chars = (tokens + errors) as usize;
    let gold = Segmentation {
        tokens: (0..total_chars)
            .map(|i| Token {
                surface: "字".into(),
                start: i,
                end: i + 1,
                known: true,
            })
            .collect(),
        sentence_index: 0,
    };
    let mut hyp_tokens = Vec::new();
    let mut pos = 0usize;
    for _ in 0..errors {
        hyp_tokens.push(Token {
            surface: "字字".into(),
            start: pos,
            end: pos + 2,
            known: true,
        });
        pos += 2;
    }
    while pos < total_chars {
        hyp_tokens.push(Token {
            surface: "字".into(),
            start: pos,
            end: pos + 1,
            known: true,
        });
        pos += 1;
    }
    (
        Segmentation {
            tokens: hyp_tokens,
            sentence_index: 0,
        },
        gold,
    )
}

#[test]
fn criterion_1_reference_count_arithmetic() {
    // Four auditors over 1695 bigram candidates, 111 of them punctuation
    // rows; precision here excludes punctuation from the denominator.
    // Row: auditor, wrong (pct, decimals), unsure (pct, decimals), precision.
    let bigram_rows: [(&str, u64, f64, u32, u64, f64, u32, f64); 4] = [
        ("A", 339, 20.0, 0, 53, 3.1, 1, 75.2),
        ("B", 264, 15.6, 1, 31, 1.8, 1, 81.4),
        ("C", 269, 15.87, 2, 118, 6.96, 2, 75.6),
        ("D", 289, 17.0, 0, 23, 1.4, 1, 80.3),
    ];
    for (auditor, wrong, wrong_pct, wrong_dec, unsure, unsure_pct, unsure_dec, prec) in bigram_rows
    {
        let correct = 1695 - wrong - unsure - 111;
        let judgments = synth_judgments(
            auditor,
            [
                (Verdict::Correct, correct),
                (Verdict::Wrong, wrong),
                (Verdict::Unsure, unsure),
                (Verdict::Punctuation, 111),
            ],
        );
        let stats = judge_stats(&judgments, auditor);
        assert_eq!(stats, JudgmentStats::from_counts(correct, wrong, unsure, 111));
        let row = format!("bigram auditor {auditor}");
        check_pct(
            &format!("{row} wrong"),
            Ratio::new(wrong, 1695).percent(),
            wrong_pct,
            wrong_dec,
        );
        check_pct(
            &format!("{row} unsure"),
            Ratio::new(unsure, 1695).percent(),
            unsure_pct,
            unsure_dec,
        );
        check_pct(&format!("{row} punct"), Ratio::new(111, 1695).percent(), 6.5, 1);
        check_pct(
            &format!("{row} precision"),
            stats.precision_excl().percent(),
            prec,
            1,
        );
    }

    // Longer-candidate audits, one row per auditor and length class;
    // precision here keeps punctuation rows in the denominator. Class
    // totals are 344/202/88/47/49.
    // Row: auditor, class, total, wrong, correct, unsure, punct, precision (pct, decimals).
    let ngram_rows: [(&str, &str, u64, u64, u64, u64, u64, f64, u32); 20] = [
        ("A", "3", 344, 205, 81, 33, 25, 23.5, 1),
        ("A", "4", 202, 88, 89, 5, 20, 44.1, 1),
        ("A", "5", 88, 33, 48, 1, 6, 54.5, 1),
        ("A", "6", 47, 9, 32, 5, 1, 68.0, 0),
        ("A", "m", 49, 14, 32, 3, 0, 65.3, 1),
        ("D", "3", 344, 195, 101, 23, 25, 29.4, 1),
        ("D", "4", 202, 102, 75, 2, 23, 37.13, 2),
        ("D", "5", 88, 36, 44, 2, 6, 50.0, 0),
        ("D", "6", 47, 20, 26, 0, 1, 55.3, 1),
        ("D", "m", 49, 18, 27, 0, 4, 55.1, 1),
        ("E", "3", 344, 168, 134, 16, 26, 39.0, 0),
        ("E", "4", 202, 89, 81, 10, 22, 40.1, 1),
        ("E", "5", 88, 29, 44, 5, 10, 50.0, 0),
        ("E", "6", 47, 10, 25, 11, 1, 53.2, 1),
        ("E", "m", 49, 12, 26, 7, 4, 53.06, 2),
        ("C", "3", 344, 210, 112, 0, 22, 32.6, 1),
        ("C", "4", 202, 131, 52, 0, 19, 25.7, 1),
        ("C", "5", 88, 40, 39, 0, 9, 44.3, 1),
        ("C", "6", 47, 25, 21, 0, 1, 44.7, 1),
        ("C", "m", 49, 24, 21, 0, 4, 42.9, 1),
    ];
    for (auditor, class, total, wrong, correct, unsure, punct, prec, dec) in ngram_rows {
        assert_eq!(
            wrong + correct + unsure + punct,
            total,
            "auditor {auditor} class {class}: counts must cover the class"
        );
        let judgments = synth_judgments(
            auditor,
            [
                (Verdict::Correct, correct),
                (Verdict::Wrong, wrong),
                (Verdict::Unsure, unsure),
                (Verdict::Punctuation, punct),
            ],
        );
        let stats = judge_stats(&judgments, auditor);
        check_pct(
            &format!("auditor {auditor} class {class} precision"),
            stats.precision_incl().percent(),
            prec,
            dec,
        );
    }

    // Token/error tallies from two test sets plus their pooled averages,
    // reported as whole percents. Row: tokens, errors, error rate, accuracy.
    let seg_rows: [(u64, u64, f64, f64); 14] = [
        (4194, 1128, 27.0, 73.0),
        (4194, 1145, 27.0, 73.0),
        (4194, 1202, 29.0, 71.0),
        (3893, 731, 19.0, 81.0),
        (3893, 713, 18.0, 82.0),
        (3893, 702, 18.0, 82.0),
        (3083, 737, 24.0, 76.0),
        (3083, 489, 16.0, 84.0),
        (3083, 545, 18.0, 82.0),
        (2890, 375, 13.0, 87.0),
        (2890, 322, 11.0, 89.0),
        (2890, 339, 12.0, 88.0),
        (7277, 1749, 24.0, 76.0),
        (6783, 1061, 16.0, 84.0),
    ];
    for (tokens, errors, rate, accuracy) in seg_rows {
        let (hyp, gold) = merged_pair(tokens, errors);
        let report = score_segmentation(&hyp, &gold).unwrap();
        assert_eq!(report.tokens, tokens);
        assert_eq!(report.false_joins, errors);
        assert_eq!(report.false_breaks, 0);
        let row = format!("{tokens} tokens / {errors} errors");
        check_pct(&format!("{row} rate"), report.error_rate() * 100.0, rate, 0);
        check_pct(
            &format!("{row} accuracy"),
            report.accuracy() * 100.0,
            accuracy,
            0,
        );
    }

    println!("criterion 1 (reference count arithmetic): PASS");
}

#[test]
fn criterion_2_error_reduction_from_reference_rates() {
    let baseline = SegEvalReport::from_counts(100, 24, 0);
    let augmented = SegEvalReport::from_counts(100, 16, 0);
    assert_eq!(baseline.error_rate(), 0.24);
    assert_eq!(augmented.error_rate(), 0.16);
    let reduction_pct = error_reduction(&baseline, &augmented) * 100.0;
    assert!(
        (reduction_pct - 100.0 / 3.0).abs() < 1e-9,
        "24% -> 16% must reduce error by exactly one third, got {reduction_pct:.4}%"
    );
    assert_eq!(format!("{reduction_pct:.1}"), "33.3");
    assert!(
        (reduction_pct - 33.0).abs() <= 0.5 + 1e-9,
        "reduction {reduction_pct:.4}% not within 0.5 pp of the reported 33%"
    );
    println!("criterion 2 (error reduction from reference rates): PASS");
}

#[test]
fn criterion_3_augmentation_accounting() {
    // 110,055 unique three-character surfaces over a 50-character pool.
    let pool: Vec<char> = (0..50u32)
        .map(|i| char::from_u32(0x4E00 + i).unwrap())
        .collect();
    let surface = |i: usize| -> String {
        [pool[i / 2500], pool[(i / 50) % 50], pool[i % 50]]
            .iter()
            .collect()
    };
    let base = Lexicon::from_entries(
        (0..104_501).map(|i| LexEntry::new(surface(i), (i % 5 + 1) as u8, EntrySource::Original)),
    );
    assert_eq!(base.len(), 104_501);
    let additions: Vec<LexEntry> = (104_501..110_055)
        .map(|i| LexEntry::new(surface(i), (i % 5 + 1) as u8, EntrySource::Extracted))
        .collect();
    let (augmented, report) = augment(&base, additions, &[]);
    assert_eq!(report.old_size, 104_501);
    assert_eq!(report.added, 5_554);
    assert_eq!(report.collisions, 0);
    assert_eq!(report.new_size, 110_055);
    assert_eq!(augmented.len(), 110_055);
    let growth = report.growth_pct();
    assert!((growth - 100.0 * 5_554.0 / 104_501.0).abs() < 1e-12);
    assert_eq!(format!("{growth:.1}"), "5.3");
    println!("criterion 3 (augmentation accounting): PASS");
}

/// Reference positional count: quadratic scan with its own sentence
/// splitting, keyed maps, and slot arithmetic.
fn reference_positional(text: &str, window: i64) -> BTreeMap<(char, char), [u64; 10]> {
    let delims = ['。', '！', '？', '；', '\n', '.', '!', '?'];
    let chars: Vec<char> = text.chars().collect();
    let mut spans = Vec::new();
    let mut begin = 0usize;
    for (i, c) in chars.iter().enumerate() {
        if delims.contains(c) {
            if i > begin {
                spans.push((begin, i));
            }
            begin = i + 1;
        }
    }
    if chars.len() > begin {
        spans.push((begin, chars.len()));
    }
    let mut map: BTreeMap<(char, char), [u64; 10]> = BTreeMap::new();
    for (s, e) in spans {
        for i in s..e {
            for j in s..e {
                let d = j as i64 - i as i64;
                if d == 0 || d.abs() > window {
                    continue;
                }
                let slot = if d < 0 { (d + 5) as usize } else { (d + 4) as usize };
                map.entry((chars[i], chars[j])).or_insert([0; 10])[slot] += 1;
            }
        }
    }
    map
}

/// Reference significance filter over the reference counts: frequency
/// floor, per-leading-character z-score, histogram variance, and peak
/// detection, computed from first principles.
#[allow(clippy::type_complexity)]
fn reference_significant(
    pairs: &BTreeMap<(char, char), [u64; 10]>,
    floor: u64,
    k0: f64,
    u0: f64,
    k1: f64,
) -> Vec<((char, char), f64, f64, Vec<i32>)> {
    let kept: Vec<((char, char), [u64; 10], u64)> = pairs
        .iter()
        .map(|(&k, &h)| (k, h, h.iter().sum()))
        .filter(|&(_, _, f)| f >= floor)
        .collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < kept.len() {
        let w1 = kept[i].0 .0;
        let mut j = i;
        while j < kept.len() && kept[j].0 .0 == w1 {
            j += 1;
        }
        let group = &kept[i..j];
        let n = group.len() as f64;
        let mean = group.iter().map(|g| g.2 as f64).sum::<f64>() / n;
        let std = (group
            .iter()
            .map(|g| (g.2 as f64 - mean).powi(2))
            .sum::<f64>()
            / n)
            .sqrt();
        if std > 0.0 {
            for g in group {
                let strength = (g.2 as f64 - mean) / std;
                if strength < k0 {
                    continue;
                }
                let expect = g.2 as f64 / 10.0;
                let spread = g
                    .1
                    .iter()
                    .map(|&h| (h as f64 - expect).powi(2))
                    .sum::<f64>()
                    / 10.0;
                if spread < u0 {
                    continue;
                }
                let threshold = expect + k1 * spread.sqrt();
                let peaks: Vec<i32> = (-5i32..=5)
                    .filter(|&d| d != 0)
                    .filter(|&d| {
                        let slot = if d < 0 { (d + 5) as usize } else { (d + 4) as usize };
                        g.1[slot] as f64 >= threshold
                    })
                    .collect();
                if !peaks.is_empty() {
                    out.push((g.0, strength, spread, peaks));
                }
            }
        }
        i = j;
    }
    out
}

#[test]
fn criterion_4_stage1_matches_exhaustive_reference() {
    let start = Instant::now();
    let alphabet: Vec<char> = (0..20u32)
        .map(|i| char::from_u32(0x4E00 + i).unwrap())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(40);
    let mut significant_total = 0usize;
    for case in 0..100 {
        let len = rng.gen_range(50..=500);
        let text: String = (0..len)
            .map(|_| {
                if rng.gen_ratio(1, 25) {
                    if rng.gen_bool(0.5) {
                        '。'
                    } else {
                        '.'
                    }
                } else {
                    alphabet[rng.gen_range(0..alphabet.len())]
                }
            })
            .collect();
        let corpus = Corpus::from_text(&text, "reference", &DEFAULT_DELIMITERS);
        let counted = count_positional_bigrams(&corpus.stream, &corpus.sentences, 5);
        let reference = reference_positional(&text, 5);
        assert_eq!(counted.len(), reference.len(), "case {case}: pair sets differ");
        for (b, (&(w1, w2), hist)) in counted.iter().zip(reference.iter()) {
            assert_eq!((b.w1, b.w2), (w1, w2), "case {case}: pair order differs");
            assert_eq!(&b.hist, hist, "case {case}: histogram differs for {w1}{w2}");
            assert_eq!(b.freq, hist.iter().sum::<u64>());
        }
        for (floor, k0, u0, k1) in [(8u64, 1.0, 10.0, 1.0), (2, 0.5, 0.5, 0.5)] {
            let floored = apply_frequency_floor(counted.clone(), floor);
            let significant = filter_significant_bigrams(&floored, k0, u0, k1);
            let expected = reference_significant(&reference, floor, k0, u0, k1);
            assert_eq!(
                significant.len(),
                expected.len(),
                "case {case} floor {floor}: significant sets differ"
            );
            for (s, e) in significant.iter().zip(&expected) {
                assert_eq!((s.bigram.w1, s.bigram.w2), e.0, "case {case}: pair differs");
                assert!(
                    (s.stats.strength - e.1).abs() < 1e-9,
                    "case {case}: strength {} vs {}",
                    s.stats.strength,
                    e.1
                );
                assert!(
                    (s.stats.spread - e.2).abs() < 1e-9,
                    "case {case}: spread {} vs {}",
                    s.stats.spread,
                    e.2
                );
                assert_eq!(s.stats.peaks, e.3, "case {case}: peaks differ");
            }
            significant_total += significant.len();
        }
    }
    assert!(significant_total > 0, "thresholds never produced output; the comparison is vacuous");
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    println!(
        "criterion 4 (stage-1 equals exhaustive reference on 100 corpora, \
         {significant_total} significant pairs compared, {elapsed:?}): PASS"
    );
}

/// Exhaustive tokenizer reference: every cut mask, feasibility by
/// dictionary-or-single-character, objective (fewest tokens, highest summed
/// category, lexicographically longest length sequence).
fn exhaustive_best(chars: &[char], dict: &Lexicon) -> Vec<String> {
    let n = chars.len();
    if n == 0 {
        return Vec::new();
    }
    let mut best: Option<(usize, i64, Vec<usize>, Vec<String>)> = None;
    for mask in 0u32..(1 << (n - 1)) {
        let mut cuts = vec![0usize];
        for gap in 0..n - 1 {
            if mask & (1 << gap) != 0 {
                cuts.push(gap + 1);
            }
        }
        cuts.push(n);
        let mut pieces = Vec::new();
        let mut lens = Vec::new();
        let mut score = 0i64;
        let mut feasible = true;
        for w in cuts.windows(2) {
            let piece: String = chars[w[0]..w[1]].iter().collect();
            let len = w[1] - w[0];
            match dict.get(&piece) {
                Some(e) => score += e.freq_cat as i64,
                None if len == 1 => {}
                None => {
                    feasible = false;
                    break;
                }
            }
            lens.push(len);
            pieces.push(piece);
        }
        if !feasible {
            continue;
        }
        let count = lens.len();
        let better = match &best {
            None => true,
            Some((bc, bs, bl, _)) => {
                count < *bc
                    || (count == *bc && (score > *bs || (score == *bs && lens > *bl)))
            }
        };
        if better {
            best = Some((count, score, lens, pieces));
        }
    }
    best.expect("single-character cuts are always feasible").3
}

#[test]
fn criterion_5_tokenizer_matches_exhaustive_search() {
    let start = Instant::now();
    let alphabet: Vec<char> = (0..6u32)
        .map(|i| char::from_u32(0x4E00 + i).unwrap())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    for case in 0..200 {
        let mut dict = Lexicon::new();
        while dict.len() < 30 {
            let len = rng.gen_range(1..=4);
            let surface: String = (0..len)
                .map(|_| alphabet[rng.gen_range(0..alphabet.len())])
                .collect();
            if !dict.contains(&surface) {
                dict.insert(LexEntry::new(
                    surface,
                    rng.gen_range(1..=5) as u8,
                    EntrySource::Original,
                ));
            }
        }
        let n = if case % 20 == 0 { 0 } else { rng.gen_range(1..=12) };
        let chars: Vec<char> = (0..n)
            .map(|_| alphabet[rng.gen_range(0..alphabet.len())])
            .collect();
        let segmentation = tokenize(&chars, &dict, 0);
        let got: Vec<String> = segmentation
            .tokens
            .iter()
            .map(|t| t.surface.clone())
            .collect();
        let best = exhaustive_best(&chars, &dict);
        let text: String = chars.iter().collect();
        assert_eq!(got, best, "case {case} on {text:?}");
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    println!("criterion 5 (tokenizer equals exhaustive search on 200 sentences, {elapsed:?}): PASS");
}

/// 200 planted words over pairwise-disjoint character sets: 119 simple
/// two-character words, plus 20 compounds (eight of three characters, six
/// of four, three of five, three of six) where every adjacent character
/// pair inside a compound is itself planted as a word, the way real
/// compounds share substructure with shorter words. Weights decay as
/// rank^-0.15 over a shuffled order, so no word is more than about 2.2
/// times as likely as any other; steeper decay makes the top few words so
/// common that their chance neighborhoods start passing the significance
/// filter, which says more about the weights than about the extractor.
fn planted_lexicon(seed: u64) -> Vec<(String, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut next = 0u32;
    let mut fresh = |n: usize| -> Vec<char> {
        let out: Vec<char> = (next..next + n as u32)
            .map(|i| char::from_u32(0x4E00 + i).unwrap())
            .collect();
        next += n as u32;
        out
    };
    let mut words: Vec<String> = Vec::new();
    for _ in 0..119 {
        words.push(fresh(2).iter().collect());
    }
    for len in [3usize, 3, 3, 3, 3, 3, 3, 3, 4, 4, 4, 4, 4, 4, 5, 5, 5, 6, 6, 6] {
        let chars = fresh(len);
        words.push(chars.iter().collect());
        for pair in chars.windows(2) {
            words.push(pair.iter().collect());
        }
    }
    assert_eq!(words.len(), 200);
    assert_eq!(words.iter().collect::<BTreeSet<_>>().len(), 200);
    words.shuffle(&mut rng);
    words
        .into_iter()
        .enumerate()
        .map(|(rank, w)| (w, 1.0 / ((rank + 1) as f64).powf(0.15)))
        .collect()
}

/// In-sentence occurrence count (all start positions) for each word.
fn word_counts(
    stream: &CharStream,
    sentences: &[Sentence],
    words: &[(String, f64)],
) -> BTreeMap<String, u64> {
    let mut by_first: HashMap<char, Vec<(Vec<char>, &str)>> = HashMap::new();
    for (w, _) in words {
        let chars: Vec<char> = w.chars().collect();
        by_first.entry(chars[0]).or_default().push((chars, w));
    }
    let mut counts: BTreeMap<String, u64> = words.iter().map(|(w, _)| (w.clone(), 0)).collect();
    for s in sentences {
        let chars = stream.sentence(s);
        for i in 0..chars.len() {
            if let Some(group) = by_first.get(&chars[i]) {
                for (wc, w) in group {
                    if i + wc.len() <= chars.len() && chars[i..i + wc.len()] == wc[..] {
                        *counts.get_mut(*w).unwrap() += 1;
                    }
                }
            }
        }
    }
    counts
}

#[test]
fn criterion_6_synthetic_recovery() {
    let start = Instant::now();
    let words = planted_lexicon(6);
    let synth = generate_synthetic_corpus(&words, 500_000, 60, 12);
    let config = Config::default();
    let (buckets, _) = extract_candidates(
        &synth.stream,
        &synth.sentences,
        &ExtractionParams::from_config(&config),
    );
    assert!(buckets.total() > 0, "extraction produced nothing");

    let counts = word_counts(&synth.stream, &synth.sentences, &words);
    let eligible: Vec<&String> = counts
        .iter()
        .filter(|&(_, &c)| c >= 11)
        .map(|(w, _)| w)
        .collect();
    assert!(!eligible.is_empty());

    let extracted: BTreeSet<&str> = buckets.iter_all().map(|c| c.surface.as_str()).collect();
    let found = eligible
        .iter()
        .filter(|w| extracted.contains(w.as_str()))
        .count();
    let recall = found as f64 / eligible.len() as f64;

    let planted: BTreeSet<&str> = words.iter().map(|(w, _)| w.as_str()).collect();
    let hits = buckets
        .iter_all()
        .filter(|c| planted.contains(c.surface.as_str()))
        .count();
    let precision = hits as f64 / buckets.total() as f64;

    assert!(
        recall >= 0.80,
        "recall {found}/{} = {:.1}% below 80%",
        eligible.len(),
        recall * 100.0
    );
    assert!(
        precision >= 0.60,
        "precision {hits}/{} = {:.1}% below 60%",
        buckets.total(),
        precision * 100.0
    );
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(120), "took {elapsed:?}");
    println!(
        "criterion 6 (synthetic recovery: recall {found}/{} = {:.1}%, precision {hits}/{} = {:.1}%, {elapsed:?}): PASS",
        eligible.len(),
        recall * 100.0,
        buckets.total(),
        precision * 100.0
    );
}

#[test]
fn criterion_7_augmentation_improves_tokenization() {
    let words = planted_lexicon(6);
    let train = generate_synthetic_corpus(&words, 200_000, 71, 12);
    let heldout = generate_synthetic_corpus(&words, 40_000, 72, 12);
    let config = Config::default();
    let (candidates, _) = extract_candidates(
        &train.stream,
        &train.sentences,
        &ExtractionParams::from_config(&config),
    );

    // Impoverished dictionary: only the adjacent character pairs inside
    // each vocabulary word, so every longer word must come out fragmented.
    let mut fragments = Lexicon::new();
    for (w, _) in &words {
        let chars: Vec<char> = w.chars().collect();
        for pair in chars.windows(2) {
            let surface: String = pair.iter().collect();
            if !fragments.contains(&surface) {
                fragments.insert(LexEntry::new(surface, 3, EntrySource::Original));
            }
        }
    }
    let (augmented, report) = augment_with_config(&fragments, &candidates, &config);
    assert!(report.added > 0, "training extraction added nothing");

    let sample = sample_test_set(&heldout.sentences, 300, 9);
    let gold: Vec<Segmentation> = sample.iter().map(|s| heldout.gold[s.index].clone()).collect();
    let hyp_base = tokenize_corpus(&heldout.stream, &sample, &fragments, TokStrategy::Dp);
    let hyp_aug = tokenize_corpus(&heldout.stream, &sample, &augmented, TokStrategy::Dp);
    let base_report = score_corpus(&hyp_base, &gold).unwrap();
    let aug_report = score_corpus(&hyp_aug, &gold).unwrap();

    assert!(
        aug_report.errors() < base_report.errors(),
        "errors did not strictly drop: {} -> {}",
        base_report.errors(),
        aug_report.errors()
    );
    println!(
        "criterion 7 (augmentation improves held-out tokenization: errors {} -> {}, error rate {:.1}% -> {:.1}%): PASS",
        base_report.errors(),
        aug_report.errors(),
        base_report.error_rate() * 100.0,
        aug_report.error_rate() * 100.0
    );
}

fn property_runner() -> TestRunner {
    let config = PropConfig {
        cases: 1000,
        failure_persistence: None,
        ..PropConfig::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn chars_of(alphabet: &[char], indices: &[usize]) -> Vec<char> {
    indices.iter().map(|&i| alphabet[i]).collect()
}

#[test]
fn criterion_8_segmentation_losslessness() {
    let alphabet: Vec<char> = (0..10u32)
        .map(|i| char::from_u32(0x4E00 + i).unwrap())
        .collect();
    let strategy = (
        prop::collection::vec(0..10usize, 0..40),
        prop::collection::vec((prop::collection::vec(0..10usize, 1..=4), 1..=5u8), 0..15),
    );
    property_runner()
        .run(&strategy, |(text_idx, dict_gen)| {
            let chars = chars_of(&alphabet, &text_idx);
            let dict = Lexicon::from_entries(dict_gen.iter().map(|(idx, cat)| {
                LexEntry::new(
                    chars_of(&alphabet, idx).into_iter().collect::<String>(),
                    *cat,
                    EntrySource::Original,
                )
            }));
            let text: String = chars.iter().collect();
            for strat in [TokStrategy::Dp, TokStrategy::Greedy] {
                let seg = tokenize_with(strat, &chars, &dict, 0);
                prop_assert_eq!(seg.text(), text.clone(), "{:?} lost characters", strat);
                for t in &seg.tokens {
                    prop_assert_eq!(t.known, dict.contains(&t.surface));
                    prop_assert!(t.end > t.start);
                }
            }
            Ok(())
        })
        .unwrap();
    println!("criterion 8 (segmentation losslessness, 1000 cases): PASS");
}

#[test]
fn criterion_8_histogram_sum_equals_frequency() {
    let alphabet: Vec<char> = (0..10u32)
        .map(|i| char::from_u32(0x4E00 + i).unwrap())
        .collect();
    let strategy = (prop::collection::vec(0..12usize, 0..300), 1..=5usize);
    property_runner()
        .run(&strategy, |(indices, window)| {
            let text: String = indices
                .iter()
                .map(|&i| match i {
                    10 => '。',
                    11 => '\n',
                    _ => alphabet[i],
                })
                .collect();
            let corpus = Corpus::from_text(&text, "prop", &DEFAULT_DELIMITERS);
            for b in count_positional_bigrams(&corpus.stream, &corpus.sentences, window) {
                prop_assert_eq!(b.freq, b.hist.iter().sum::<u64>());
                prop_assert!(b.freq > 0);
            }
            Ok(())
        })
        .unwrap();
    println!("criterion 8 (histogram sum equals frequency, 1000 cases): PASS");
}

#[test]
fn criterion_8_augmentation_monotone_and_idempotent() {
    let alphabet: Vec<char> = (0..10u32)
        .map(|i| char::from_u32(0x4E00 + i).unwrap())
        .collect();
    let strategy = (
        prop::collection::vec((prop::collection::vec(0..10usize, 1..=4), 1..=5u8), 0..15),
        prop::collection::vec(
            (prop::collection::vec(0..10usize, 2..=6), 1..200u64, any::<bool>()),
            0..25,
        ),
    );
    property_runner()
        .run(&strategy, |(dict_gen, cand_gen)| {
            let base = Lexicon::from_entries(dict_gen.iter().map(|(idx, cat)| {
                LexEntry::new(
                    chars_of(&alphabet, idx).into_iter().collect::<String>(),
                    *cat,
                    EntrySource::Original,
                )
            }));
            let candidates = partition_by_length(
                cand_gen
                    .iter()
                    .map(|(idx, freq, adjacent)| NGramCandidate {
                        surface: chars_of(&alphabet, idx).into_iter().collect(),
                        freq: *freq,
                        stage: if *adjacent {
                            CandidateStage::Adjacent
                        } else {
                            CandidateStage::Expanded
                        },
                        anchor: None,
                    })
                    .collect(),
            );
            let config = Config::default();
            let (aug1, r1) = augment_with_config(&base, &candidates, &config);
            prop_assert_eq!(r1.old_size, base.len());
            prop_assert_eq!(r1.new_size, aug1.len());
            prop_assert_eq!(r1.old_size + r1.added, r1.new_size);
            for e in base.iter() {
                let kept = aug1.get(&e.surface);
                prop_assert!(kept.is_some(), "entry {} vanished", e.surface);
                let kept = kept.unwrap();
                prop_assert!(kept.freq_cat >= e.freq_cat);
                prop_assert_eq!(kept.source, e.source);
            }
            let (aug2, r2) = augment_with_config(&aug1, &candidates, &config);
            prop_assert_eq!(&aug2, &aug1);
            prop_assert_eq!(r2.added, 0);
            Ok(())
        })
        .unwrap();
    println!("criterion 8 (augmentation monotone and idempotent, 1000 cases): PASS");
}

#[test]
fn criterion_8_shard_merge_determinism() {
    let alphabet: Vec<char> = (0..10u32)
        .map(|i| char::from_u32(0x4E00 + i).unwrap())
        .collect();
    let strategy = (
        prop::collection::vec(0..12usize, 0..300),
        1..=5usize,
        prop::collection::vec(0..3usize, 1..10),
        0..3usize,
    );
    property_runner()
        .run(&strategy, |(indices, window, assignment, rotation)| {
            let text: String = indices
                .iter()
                .map(|&i| match i {
                    10 => '。',
                    11 => '\n',
                    _ => alphabet[i],
                })
                .collect();
            let corpus = Corpus::from_text(&text, "prop", &DEFAULT_DELIMITERS);
            let whole = count_positional_bigrams(&corpus.stream, &corpus.sentences, window);

            let mut shards: [Vec<Sentence>; 3] = Default::default();
            for (i, s) in corpus.sentences.iter().enumerate() {
                shards[assignment[i % assignment.len()]].push(*s);
            }
            let mut tables: Vec<Vec<PositionalBigram>> = shards
                .iter()
                .map(|part| count_positional_bigrams(&corpus.stream, part, window))
                .collect();
            tables.rotate_left(rotation);
            let merged = merge_positional_bigrams(tables);
            prop_assert_eq!(merged.len(), whole.len());
            for (m, w) in merged.iter().zip(&whole) {
                prop_assert_eq!((m.w1, m.w2, m.freq, m.hist), (w.w1, w.w2, w.freq, w.hist));
            }

            let whole_uni = count_unigrams(&corpus.stream, &corpus.sentences);
            let merged_uni = shards
                .iter()
                .map(|part| count_unigrams(&corpus.stream, part))
                .fold(count_unigrams(&corpus.stream, &[]), |acc, t| acc.merge(&t));
            let snapshot = |t: &UnigramTable| t.iter().collect::<BTreeMap<char, u64>>();
            prop_assert_eq!(snapshot(&merged_uni), snapshot(&whole_uni));
            Ok(())
        })
        .unwrap();
    println!("criterion 8 (shard-merge determinism, 1000 cases): PASS");
}
