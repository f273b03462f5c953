//! Two-stage statistical extraction of word candidates.
//!
//! Stage one counts positional character bigrams inside sentences, keeps the
//! pairs whose co-occurrence is both strong (partner z-score) and rigid
//! (peaked distance histogram), and reads adjacent pairs off as bigram word
//! candidates. Stage two grows longer candidates around each significant
//! pair by keeping the characters that dominate a concordance of all its
//! instances, then recounts the grown surface against the corpus.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;

use crate::config::Config;
use crate::corpus::{classify_char, CharClass, CharStream, Sentence};
use crate::error::{Error, Result};
use crate::files::write_atomic;

/// Number of distance slots in a positional histogram: -5..=-1 and +1..=+5.
pub const SLOTS: usize = 10;

/// Largest co-occurrence distance a histogram can hold.
pub const WINDOW_MAX: usize = 5;

/// Candidate surfaces never exceed this many characters.
pub const MAX_NGRAM: usize = 10;

/// Histogram slot for a distance `d` with `1 <= |d| <= 5`.
#[inline]
pub fn slot_of(d: i32) -> usize {
    debug_assert!(d != 0 && d.unsigned_abs() as usize <= WINDOW_MAX);
    if d < 0 {
        (d + 5) as usize
    } else {
        (d + 4) as usize
    }
}

/// Distance represented by a histogram slot index.
#[inline]
pub fn distance_of(slot: usize) -> i32 {
    debug_assert!(slot < SLOTS);
    if slot < 5 {
        slot as i32 - 5
    } else {
        slot as i32 - 4
    }
}

/// Character frequency table over sentence text.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct UnigramTable {
    counts: BTreeMap<char, u64>,
    total: u64,
}

impl UnigramTable {
    pub fn get(&self, c: char) -> u64 {
        self.counts.get(&c).copied().unwrap_or(0)
    }

    /// Sum of all counts; equals the summed length of the counted sentences.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (char, u64)> + '_ {
        self.counts.iter().map(|(&c, &n)| (c, n))
    }

    /// Merges shard tables; addition is commutative, so shard order cannot
    /// change the result.
    pub fn merge(mut self, other: &UnigramTable) -> UnigramTable {
        for (&c, &n) in &other.counts {
            *self.counts.entry(c).or_insert(0) += n;
        }
        self.total += other.total;
        self
    }
}

/// Counts every character occurrence within the given sentence spans.
pub fn count_unigrams(stream: &CharStream, sentences: &[Sentence]) -> UnigramTable {
    let mut table = UnigramTable::default();
    for s in sentences {
        for &c in stream.sentence(s) {
            *table.counts.entry(c).or_insert(0) += 1;
            table.total += 1;
        }
    }
    table
}

/// Co-occurrence record for an ordered character pair: how often `w2`
/// appeared at each signed distance from `w1`, within one sentence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PositionalBigram {
    pub w1: char,
    pub w2: char,
    /// Total co-occurrences; always the sum of `hist`.
    pub freq: u64,
    /// Distance histogram, slots -5..=-1 then +1..=+5.
    pub hist: [u64; SLOTS],
}

impl PositionalBigram {
    pub fn hist_at(&self, d: i32) -> u64 {
        self.hist[slot_of(d)]
    }
}

/// Counts positional bigrams over sentence spans. Windows never cross
/// sentence boundaries. The result is sorted by `(w1, w2)`.
pub fn count_positional_bigrams(
    stream: &CharStream,
    sentences: &[Sentence],
    window: usize,
) -> Vec<PositionalBigram> {
    assert!(
        (1..=WINDOW_MAX).contains(&window),
        "window must be 1..=5, got {window}"
    );
    let mut map: HashMap<(char, char), [u64; SLOTS]> = HashMap::new();
    for s in sentences {
        let chars = stream.sentence(s);
        if chars.is_empty() {
            continue;
        }
        for i in 0..chars.len() {
            let lo = i.saturating_sub(window);
            let hi = (i + window).min(chars.len() - 1);
            for j in lo..=hi {
                if j == i {
                    continue;
                }
                let d = j as i32 - i as i32;
                map.entry((chars[i], chars[j])).or_insert([0; SLOTS])[slot_of(d)] += 1;
            }
        }
    }
    materialize(map)
}

fn materialize(map: HashMap<(char, char), [u64; SLOTS]>) -> Vec<PositionalBigram> {
    let mut out: Vec<PositionalBigram> = map
        .into_iter()
        .map(|((w1, w2), hist)| PositionalBigram {
            w1,
            w2,
            freq: hist.iter().sum(),
            hist,
        })
        .collect();
    out.sort_unstable_by_key(|b| (b.w1, b.w2));
    out
}

/// Merges shard bigram tables into one, summing histograms pairwise.
/// Deterministic for any shard order.
pub fn merge_positional_bigrams(tables: Vec<Vec<PositionalBigram>>) -> Vec<PositionalBigram> {
    let mut map: HashMap<(char, char), [u64; SLOTS]> = HashMap::new();
    for table in tables {
        for b in table {
            let hist = map.entry((b.w1, b.w2)).or_insert([0; SLOTS]);
            for (acc, n) in hist.iter_mut().zip(b.hist) {
                *acc += n;
            }
        }
    }
    materialize(map)
}

/// Drops bigrams rarer than `min_freq`. Applied before any statistics, so
/// rare pairs do not dilute partner distributions.
pub fn apply_frequency_floor(
    bigrams: Vec<PositionalBigram>,
    min_freq: u64,
) -> Vec<PositionalBigram> {
    bigrams.into_iter().filter(|b| b.freq >= min_freq).collect()
}

/// Significance measures for one retained bigram.
#[derive(Clone, Debug, PartialEq)]
pub struct BigramStats {
    /// z-score of this pair's frequency among all partners of `w1`.
    pub strength: f64,
    /// Variance of the distance histogram around its uniform expectation.
    pub spread: f64,
    /// Distances whose slot count reaches `freq/10 + k1*sqrt(spread)`.
    /// Non-empty for every retained bigram.
    pub peaks: Vec<i32>,
}

/// A bigram that passed the significance filter.
#[derive(Clone, Debug, PartialEq)]
pub struct SignificantBigram {
    pub bigram: PositionalBigram,
    pub stats: BigramStats,
}

/// Keeps exactly the bigrams with `strength >= k0`, `spread >= u0` and at
/// least one histogram peak.
///
/// Strength compares a pair's total frequency against all pairs sharing the
/// same `w1` (population mean and standard deviation). When every partner of
/// a `w1` has identical frequency the deviation is zero, strength is
/// undefined, and all its pairs are rejected.
pub fn filter_significant_bigrams(
    bigrams: &[PositionalBigram],
    k0: f64,
    u0: f64,
    k1: f64,
) -> Vec<SignificantBigram> {
    let mut groups: BTreeMap<char, Vec<&PositionalBigram>> = BTreeMap::new();
    for b in bigrams {
        groups.entry(b.w1).or_default().push(b);
    }
    let mut out = Vec::new();
    for group in groups.values_mut() {
        group.sort_unstable_by_key(|b| b.w2);
        let n = group.len() as f64;
        let mean = group.iter().map(|b| b.freq as f64).sum::<f64>() / n;
        let var = group
            .iter()
            .map(|b| {
                let d = b.freq as f64 - mean;
                d * d
            })
            .sum::<f64>()
            / n;
        let std = var.sqrt();
        if std == 0.0 {
            continue;
        }
        for b in group.iter() {
            let strength = (b.freq as f64 - mean) / std;
            if strength < k0 {
                continue;
            }
            let expect = b.freq as f64 / SLOTS as f64;
            let spread = b
                .hist
                .iter()
                .map(|&h| {
                    let d = h as f64 - expect;
                    d * d
                })
                .sum::<f64>()
                / SLOTS as f64;
            if spread < u0 {
                continue;
            }
            let threshold = expect + k1 * spread.sqrt();
            let peaks: Vec<i32> = (0..SLOTS)
                .filter(|&slot| b.hist[slot] as f64 >= threshold)
                .map(distance_of)
                .collect();
            if peaks.is_empty() {
                continue;
            }
            out.push(SignificantBigram {
                bigram: (*b).clone(),
                stats: BigramStats {
                    strength,
                    spread,
                    peaks,
                },
            });
        }
    }
    out
}

/// Which extraction stage produced a candidate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CandidateStage {
    Adjacent,
    Expanded,
}

impl CandidateStage {
    pub fn label(self) -> &'static str {
        match self {
            CandidateStage::Adjacent => "adjacent",
            CandidateStage::Expanded => "expanded",
        }
    }

    pub fn parse(s: &str) -> Option<CandidateStage> {
        match s {
            "adjacent" => Some(CandidateStage::Adjacent),
            "expanded" => Some(CandidateStage::Expanded),
            _ => None,
        }
    }
}

/// The significant pair an expanded candidate grew from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Anchor {
    pub w1: char,
    pub w2: char,
    pub distance: i32,
}

/// A word candidate: 2..=10 characters with its corpus frequency.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NGramCandidate {
    pub surface: String,
    pub freq: u64,
    pub stage: CandidateStage,
    /// Present on expanded candidates only.
    pub anchor: Option<Anchor>,
}

fn all_ideographs(chars: &[char]) -> bool {
    chars.iter().all(|&c| classify_char(c) == CharClass::Ideograph)
}

/// Reads bigram word candidates off the significant pairs whose peak set
/// contains distance +1. The candidate frequency is the +1 slot count, not
/// the pair total. Candidates containing non-ideographs are dropped.
pub fn extract_adjacent_bigrams(significant: &[SignificantBigram]) -> Vec<NGramCandidate> {
    significant
        .iter()
        .filter(|s| s.stats.peaks.contains(&1))
        .filter(|s| all_ideographs(&[s.bigram.w1, s.bigram.w2]))
        .map(|s| NGramCandidate {
            surface: [s.bigram.w1, s.bigram.w2].iter().collect(),
            freq: s.bigram.hist_at(1),
            stage: CandidateStage::Adjacent,
            anchor: None,
        })
        .collect()
}

/// Grows n-gram candidates around every peak of every significant pair.
///
/// For each `(pair, peak distance)` a concordance of all instances is built
/// over offsets -5..=+5 relative to `w1`. An offset is kept when one
/// character accounts for at least fraction `t` of the instances; positions
/// outside the sentence count against dominance. The candidate is the
/// maximal contiguous kept run containing both anchor characters, recounted
/// exactly against the corpus. Results shorter than 3 characters, longer
/// than [`MAX_NGRAM`], rarer than `min_freq`, or containing non-ideographs
/// are discarded. Duplicate surfaces keep their first anchor.
pub fn expand_ngrams(
    stream: &CharStream,
    sentences: &[Sentence],
    significant: &[SignificantBigram],
    t: f64,
    min_freq: u64,
) -> Vec<NGramCandidate> {
    assert!(t > 0.0 && t <= 1.0, "dominance fraction must be in (0, 1]");

    // All positions of every character, as (sentence, offset) pairs.
    let mut index: HashMap<char, Vec<(u32, u32)>> = HashMap::new();
    for (si, s) in sentences.iter().enumerate() {
        for (ci, &c) in stream.sentence(s).iter().enumerate() {
            index.entry(c).or_default().push((si as u32, ci as u32));
        }
    }

    let mut grown: Vec<(Vec<char>, Anchor)> = Vec::new();
    for sb in significant {
        let (w1, w2) = (sb.bigram.w1, sb.bigram.w2);
        let positions = match index.get(&w1) {
            Some(p) => p,
            None => continue,
        };
        for &d in &sb.stats.peaks {
            let mut instances: Vec<(u32, u32)> = Vec::new();
            for &(si, ci) in positions {
                let chars = stream.sentence(&sentences[si as usize]);
                let j = ci as i64 + d as i64;
                if j >= 0 && (j as usize) < chars.len() && chars[j as usize] == w2 {
                    instances.push((si, ci));
                }
            }
            if instances.is_empty() {
                continue;
            }
            if let Some(run) = dominant_run(stream, sentences, &instances, d, t) {
                grown.push((run, Anchor { w1, w2, distance: d }));
            }
        }
    }

    // Exact substring recount over the whole corpus, then length and
    // frequency filters. Duplicates collapse to the first anchor; the
    // recount makes their frequencies identical by construction.
    let mut by_surface: BTreeMap<Vec<char>, Anchor> = BTreeMap::new();
    for (chars, anchor) in grown {
        let len = chars.len();
        if !(3..=MAX_NGRAM).contains(&len) || !all_ideographs(&chars) {
            continue;
        }
        by_surface.entry(chars).or_insert(anchor);
    }
    let counts = count_surfaces(stream, sentences, by_surface.keys());
    by_surface
        .into_iter()
        .filter_map(|(chars, anchor)| {
            let freq = counts.get(&chars).copied().unwrap_or(0);
            if freq < min_freq {
                return None;
            }
            Some(NGramCandidate {
                surface: chars.iter().collect(),
                freq,
                stage: CandidateStage::Expanded,
                anchor: Some(anchor),
            })
        })
        .collect()
}

/// Builds the dominance concordance for one `(pair, distance)` and returns
/// the maximal kept run covering both anchors, if one exists.
fn dominant_run(
    stream: &CharStream,
    sentences: &[Sentence],
    instances: &[(u32, u32)],
    d: i32,
    t: f64,
) -> Option<Vec<char>> {
    const HALF: i32 = WINDOW_MAX as i32;
    let n = instances.len() as f64;
    let mut kept: [Option<char>; 11] = [None; 11];
    for off in -HALF..=HALF {
        let mut column: BTreeMap<char, u64> = BTreeMap::new();
        for &(si, ci) in instances {
            let chars = stream.sentence(&sentences[si as usize]);
            let j = ci as i64 + off as i64;
            if j >= 0 && (j as usize) < chars.len() {
                *column.entry(chars[j as usize]).or_insert(0) += 1;
            }
        }
        // Highest count wins; ties break toward the smaller code point.
        kept[(off + HALF) as usize] = column
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
            .filter(|(_, &count)| count as f64 >= t * n)
            .map(|(&c, _)| c);
    }
    let (a, b) = (0.min(d), 0.max(d));
    for off in a..=b {
        kept[(off + HALF) as usize]?;
    }
    let mut lo = a;
    while lo > -HALF && kept[(lo - 1 + HALF) as usize].is_some() {
        lo -= 1;
    }
    let mut hi = b;
    while hi < HALF && kept[(hi + 1 + HALF) as usize].is_some() {
        hi += 1;
    }
    Some((lo..=hi).map(|off| kept[(off + HALF) as usize].unwrap()).collect())
}

/// Counts exact occurrences of each surface within sentences, overlapping
/// occurrences included. One pass per distinct surface length.
fn count_surfaces<'a, I>(
    stream: &CharStream,
    sentences: &[Sentence],
    surfaces: I,
) -> HashMap<Vec<char>, u64>
where
    I: IntoIterator<Item = &'a Vec<char>>,
{
    let mut by_len: BTreeMap<usize, HashMap<Vec<char>, u64>> = BTreeMap::new();
    for s in surfaces {
        by_len.entry(s.len()).or_default().insert(s.clone(), 0);
    }
    by_len.remove(&0);
    for (&len, targets) in by_len.iter_mut() {
        for s in sentences {
            let chars = stream.sentence(s);
            if chars.len() < len {
                continue;
            }
            for window in chars.windows(len) {
                if let Some(count) = targets.get_mut(window) {
                    *count += 1;
                }
            }
        }
    }
    by_len.into_values().flatten().collect()
}

/// Length buckets `2, 3, 4, 5, 6, m` where `m` collects everything longer
/// than six characters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LengthClass {
    Two,
    Three,
    Four,
    Five,
    Six,
    Longer,
}

impl LengthClass {
    /// Bucket for a surface of `n >= 2` characters.
    pub fn of(n: usize) -> LengthClass {
        debug_assert!(n >= 2);
        match n {
            2 => LengthClass::Two,
            3 => LengthClass::Three,
            4 => LengthClass::Four,
            5 => LengthClass::Five,
            6 => LengthClass::Six,
            _ => LengthClass::Longer,
        }
    }

    pub const ALL: [LengthClass; 6] = [
        LengthClass::Two,
        LengthClass::Three,
        LengthClass::Four,
        LengthClass::Five,
        LengthClass::Six,
        LengthClass::Longer,
    ];

    pub fn label(self) -> &'static str {
        match self {
            LengthClass::Two => "2",
            LengthClass::Three => "3",
            LengthClass::Four => "4",
            LengthClass::Five => "5",
            LengthClass::Six => "6",
            LengthClass::Longer => "m",
        }
    }
}

impl std::fmt::Display for LengthClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Candidates grouped by length class. Buckets are sorted by descending
/// frequency, then surface.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct NGramBuckets {
    buckets: BTreeMap<LengthClass, Vec<NGramCandidate>>,
}

impl NGramBuckets {
    pub fn class(&self, class: LengthClass) -> &[NGramCandidate] {
        self.buckets.get(&class).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn total(&self) -> usize {
        self.buckets.values().map(Vec::len).sum()
    }

    pub fn iter_all(&self) -> impl Iterator<Item = &NGramCandidate> {
        self.buckets.values().flatten()
    }
}

/// Groups candidates into length buckets, collapsing duplicate surfaces to
/// their highest frequency first.
pub fn partition_by_length(candidates: Vec<NGramCandidate>) -> NGramBuckets {
    let mut by_surface: BTreeMap<String, NGramCandidate> = BTreeMap::new();
    for c in candidates {
        match by_surface.get_mut(&c.surface) {
            None => {
                by_surface.insert(c.surface.clone(), c);
            }
            Some(existing) => {
                if c.freq > existing.freq {
                    *existing = c;
                }
            }
        }
    }
    let mut buckets: BTreeMap<LengthClass, Vec<NGramCandidate>> = BTreeMap::new();
    for (_, c) in by_surface {
        let len = c.surface.chars().count();
        buckets.entry(LengthClass::of(len)).or_default().push(c);
    }
    for bucket in buckets.values_mut() {
        bucket.sort_by(|a, b| b.freq.cmp(&a.freq).then_with(|| a.surface.cmp(&b.surface)));
    }
    NGramBuckets { buckets }
}

/// Thresholds steering both extraction stages.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtractionParams {
    pub window: usize,
    pub k0: f64,
    pub u0: f64,
    pub k1: f64,
    pub t: f64,
    pub min_bigram_freq: u64,
    pub min_ngram_freq: u64,
}

impl ExtractionParams {
    pub fn from_config(config: &Config) -> Self {
        ExtractionParams {
            window: config.window,
            k0: config.k0,
            u0: config.u0,
            k1: config.k1,
            t: config.t,
            min_bigram_freq: config.min_bigram_freq,
            min_ngram_freq: config.min_ngram_freq,
        }
    }
}

impl Default for ExtractionParams {
    fn default() -> Self {
        ExtractionParams::from_config(&Config::default())
    }
}

/// Intermediate counts of one extraction run, for reporting.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ExtractionSummary {
    pub sentences: usize,
    pub bigrams_counted: usize,
    pub bigrams_after_floor: usize,
    pub significant: usize,
    pub adjacent_candidates: usize,
    pub expanded_candidates: usize,
}

/// Runs both extraction stages and buckets the merged candidate list.
pub fn extract_candidates(
    stream: &CharStream,
    sentences: &[Sentence],
    params: &ExtractionParams,
) -> (NGramBuckets, ExtractionSummary) {
    let counted = count_positional_bigrams(stream, sentences, params.window);
    let bigrams_counted = counted.len();
    let floored = apply_frequency_floor(counted, params.min_bigram_freq);
    let bigrams_after_floor = floored.len();
    let significant = filter_significant_bigrams(&floored, params.k0, params.u0, params.k1);
    let adjacent = extract_adjacent_bigrams(&significant);
    let expanded = expand_ngrams(stream, sentences, &significant, params.t, params.min_ngram_freq);
    let summary = ExtractionSummary {
        sentences: sentences.len(),
        bigrams_counted,
        bigrams_after_floor,
        significant: significant.len(),
        adjacent_candidates: adjacent.len(),
        expanded_candidates: expanded.len(),
    };
    let mut all = adjacent;
    all.extend(expanded);
    (partition_by_length(all), summary)
}

/// Serializes candidates as TSV rows `surface, length, freq, stage, anchor
/// pair, anchor distance`, ordered by (length, descending freq, surface) for
/// reproducible diffs. Candidates without an anchor write `-` in both anchor
/// columns; anchor distances carry an explicit sign.
pub fn candidates_to_tsv(buckets: &NGramBuckets) -> String {
    let mut rows: Vec<&NGramCandidate> = buckets.iter_all().collect();
    rows.sort_by(|a, b| {
        let (la, lb) = (a.surface.chars().count(), b.surface.chars().count());
        la.cmp(&lb)
            .then(b.freq.cmp(&a.freq))
            .then_with(|| a.surface.cmp(&b.surface))
    });
    let mut out = String::new();
    for c in rows {
        let (pair, distance) = match &c.anchor {
            Some(a) => (format!("{}{}", a.w1, a.w2), format!("{:+}", a.distance)),
            None => ("-".to_string(), "-".to_string()),
        };
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\n",
            c.surface,
            c.surface.chars().count(),
            c.freq,
            c.stage.label(),
            pair,
            distance
        ));
    }
    out
}

/// Parses a candidate TSV back into length buckets. The length column must
/// match the surface, anchors must be two characters at a nonzero distance
/// within the counting window, and surfaces must be unique.
pub fn parse_candidates(text: &str, origin: &str) -> Result<NGramBuckets> {
    let err = |line: usize, detail: String| Error::Format {
        origin: origin.to_string(),
        line,
        detail,
    };
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 6 {
            return Err(err(
                line_no,
                format!("expected 6 tab-separated fields, got {}", fields.len()),
            ));
        }
        let surface = fields[0].to_string();
        let length: usize = fields[1]
            .parse()
            .map_err(|_| err(line_no, format!("bad length {:?}", fields[1])))?;
        if length != surface.chars().count() {
            return Err(err(
                line_no,
                format!(
                    "length column says {length} but surface has {} characters",
                    surface.chars().count()
                ),
            ));
        }
        let freq: u64 = fields[2]
            .parse()
            .map_err(|_| err(line_no, format!("bad frequency {:?}", fields[2])))?;
        let stage = CandidateStage::parse(fields[3])
            .ok_or_else(|| err(line_no, format!("unknown stage {:?}", fields[3])))?;
        let anchor = match (fields[4], fields[5]) {
            ("-", "-") => None,
            (pair, dist) => {
                let pair_chars: Vec<char> = pair.chars().collect();
                if pair_chars.len() != 2 {
                    return Err(err(line_no, format!("anchor pair {pair:?} is not 2 characters")));
                }
                let distance: i32 = dist
                    .parse()
                    .map_err(|_| err(line_no, format!("bad anchor distance {dist:?}")))?;
                if distance == 0 || distance.unsigned_abs() as usize > WINDOW_MAX {
                    return Err(err(line_no, format!("anchor distance {distance} out of range")));
                }
                Some(Anchor {
                    w1: pair_chars[0],
                    w2: pair_chars[1],
                    distance,
                })
            }
        };
        if seen.insert(surface.clone(), line_no).is_some() {
            return Err(Error::DuplicateSurface {
                origin: origin.to_string(),
                line: line_no,
                surface,
            });
        }
        out.push(NGramCandidate {
            surface,
            freq,
            stage,
            anchor,
        });
    }
    Ok(partition_by_length(out))
}

pub fn load_candidates(path: &Path) -> Result<NGramBuckets> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    parse_candidates(&text, &path.display().to_string())
}

pub fn save_candidates(buckets: &NGramBuckets, path: &Path) -> Result<()> {
    write_atomic(path, candidates_to_tsv(buckets).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Corpus, DEFAULT_DELIMITERS};

    fn corpus(text: &str) -> Corpus {
        Corpus::from_text(text, "test", DEFAULT_DELIMITERS)
    }

    #[test]
    fn slot_mapping_round_trips() {
        for slot in 0..SLOTS {
            assert_eq!(slot_of(distance_of(slot)), slot);
        }
        assert_eq!(slot_of(-5), 0);
        assert_eq!(slot_of(-1), 4);
        assert_eq!(slot_of(1), 5);
        assert_eq!(slot_of(5), 9);
    }

    #[test]
    fn unigram_totals_cover_sentences_only() {
        let c = corpus("甲乙。甲。");
        let table = count_unigrams(&c.stream, &c.sentences);
        assert_eq!(table.total(), 3);
        assert_eq!(table.get('甲'), 2);
        assert_eq!(table.get('乙'), 1);
        assert_eq!(table.get('。'), 0);
        assert_eq!(table.distinct(), 2);
    }

    #[test]
    fn repeated_char_histogram() {
        let c = corpus("甲甲甲");
        let bigrams = count_positional_bigrams(&c.stream, &c.sentences, 5);
        assert_eq!(bigrams.len(), 1);
        let b = &bigrams[0];
        assert_eq!((b.w1, b.w2), ('甲', '甲'));
        assert_eq!(b.hist_at(1), 2);
        assert_eq!(b.hist_at(2), 1);
        assert_eq!(b.hist_at(-1), 2);
        assert_eq!(b.hist_at(-2), 1);
        assert_eq!(b.freq, 6);
    }

    #[test]
    fn window_never_crosses_sentences() {
        let c = corpus("甲乙。丙丁");
        let bigrams = count_positional_bigrams(&c.stream, &c.sentences, 5);
        assert!(bigrams
            .iter()
            .all(|b| !(b.w1 == '乙' && b.w2 == '丙') && !(b.w1 == '甲' && b.w2 == '丙')));
    }

    #[test]
    fn histogram_sums_match_freq() {
        let c = corpus("立法局立法。立法院。");
        for b in count_positional_bigrams(&c.stream, &c.sentences, 5) {
            assert_eq!(b.freq, b.hist.iter().sum::<u64>());
        }
    }

    /// 50 sentences of 立法 followed by an alternating third character. By
    /// hand: partners of 立 have frequencies {法: 50, 甲: 25, 乙: 25}, with
    /// population mean 100/3 and deviation sqrt(1250/9), so the strength of
    /// (立,法) is exactly sqrt(2); its histogram {+1: 50} has spread 225.
    fn planted() -> Corpus {
        let mut text = String::new();
        for i in 0..50 {
            text.push_str("立法");
            text.push(if i % 2 == 0 { '甲' } else { '乙' });
            text.push('。');
        }
        corpus(&text)
    }

    #[test]
    fn planted_pair_is_significant_with_adjacent_peak() {
        let c = planted();
        let bigrams = count_positional_bigrams(&c.stream, &c.sentences, 5);
        let floored = apply_frequency_floor(bigrams, 8);
        let significant = filter_significant_bigrams(&floored, 1.0, 10.0, 1.0);
        let hit = significant
            .iter()
            .find(|s| s.bigram.w1 == '立' && s.bigram.w2 == '法')
            .expect("retained");
        assert!((hit.stats.strength - 2.0_f64.sqrt()).abs() < 1e-12);
        assert_eq!(hit.stats.spread, 225.0);
        assert_eq!(hit.stats.peaks, vec![1]);
    }

    #[test]
    fn retained_bigrams_always_have_peaks() {
        let c = planted();
        let bigrams = count_positional_bigrams(&c.stream, &c.sentences, 5);
        for s in filter_significant_bigrams(&bigrams, 0.5, 1.0, 1.0) {
            assert!(!s.stats.peaks.is_empty());
        }
    }

    #[test]
    fn degenerate_partner_deviation_rejects_group() {
        // Single partner per w1: std is 0, nothing can be retained.
        let c = corpus("立法。立法。立法。立法。立法。立法。立法。立法。立法。立法。");
        let bigrams = count_positional_bigrams(&c.stream, &c.sentences, 5);
        let significant = filter_significant_bigrams(&bigrams, 0.0, 0.0, 1.0);
        assert!(significant.is_empty());
    }

    #[test]
    fn adjacent_bigrams_read_off_plus_one_peaks() {
        let c = planted();
        let bigrams = count_positional_bigrams(&c.stream, &c.sentences, 5);
        let floored = apply_frequency_floor(bigrams, 8);
        let significant = filter_significant_bigrams(&floored, 1.0, 10.0, 1.0);
        let candidates = extract_adjacent_bigrams(&significant);
        let hit = candidates.iter().find(|c| c.surface == "立法").expect("kept");
        assert_eq!(hit.freq, 50);
        assert_eq!(hit.stage, CandidateStage::Adjacent);
        assert!(hit.anchor.is_none());
    }

    #[test]
    fn frequency_floor_drops_before_statistics() {
        let c = planted();
        let bigrams = count_positional_bigrams(&c.stream, &c.sentences, 5);
        let floored = apply_frequency_floor(bigrams.clone(), 30);
        // Only (立,法) and (法,立) survive a floor of 30; each then has a
        // single partner, so nothing is significant.
        assert_eq!(floored.len(), 2);
        assert!(filter_significant_bigrams(&floored, 1.0, 10.0, 1.0).is_empty());
    }

    fn sig_for(c: &Corpus, w1: char, w2: char, d: i32) -> Vec<SignificantBigram> {
        let bigrams = count_positional_bigrams(&c.stream, &c.sentences, 5);
        let b = bigrams
            .iter()
            .find(|b| b.w1 == w1 && b.w2 == w2)
            .expect("pair present")
            .clone();
        vec![SignificantBigram {
            bigram: b,
            stats: BigramStats {
                strength: 9.9,
                spread: 999.0,
                peaks: vec![d],
            },
        }]
    }

    #[test]
    fn expansion_recovers_planted_trigram() {
        // Varied left context keeps the run from growing past the word.
        let mut text = String::new();
        for i in 0..30 {
            text.push(if i % 2 == 0 { '甲' } else { '乙' });
            text.push_str("立法局。");
        }
        let c = corpus(&text);
        let sig = sig_for(&c, '立', '法', 1);
        let grown = expand_ngrams(&c.stream, &c.sentences, &sig, 0.75, 8);
        assert_eq!(grown.len(), 1);
        assert_eq!(grown[0].surface, "立法局");
        assert_eq!(grown[0].freq, 30);
        assert_eq!(grown[0].stage, CandidateStage::Expanded);
        assert_eq!(
            grown[0].anchor,
            Some(Anchor {
                w1: '立',
                w2: '法',
                distance: 1
            })
        );
    }

    #[test]
    fn expansion_works_from_negative_peak() {
        let mut text = String::new();
        for i in 0..30 {
            text.push(if i % 2 == 0 { '甲' } else { '乙' });
            text.push_str("立法局。");
        }
        let c = corpus(&text);
        let sig = sig_for(&c, '局', '立', -2);
        let grown = expand_ngrams(&c.stream, &c.sentences, &sig, 0.75, 8);
        assert_eq!(grown.len(), 1);
        assert_eq!(grown[0].surface, "立法局");
    }

    #[test]
    fn expansion_discards_below_min_freq() {
        let mut text = String::new();
        for i in 0..7 {
            text.push(if i % 2 == 0 { '甲' } else { '乙' });
            text.push_str("立法局。");
        }
        let c = corpus(&text);
        let sig = sig_for(&c, '立', '法', 1);
        assert!(expand_ngrams(&c.stream, &c.sentences, &sig, 0.75, 8).is_empty());
    }

    #[test]
    fn expansion_discards_runs_longer_than_cap() {
        // Eleven fixed characters fill the whole concordance window.
        let mut text = String::new();
        for _ in 0..20 {
            text.push_str("一丁七万丈三上下不与丑。");
        }
        let c = corpus(&text);
        let sig = sig_for(&c, '三', '上', 1);
        assert!(expand_ngrams(&c.stream, &c.sentences, &sig, 0.75, 8).is_empty());
    }

    #[test]
    fn expansion_requires_contiguous_dominance_between_anchors() {
        // The middle character alternates, so dominance breaks between the
        // anchors and no candidate can contain both.
        let mut text = String::new();
        for i in 0..30 {
            text.push_str(if i % 2 == 0 { "立甲局" } else { "立乙局" });
            text.push('。');
        }
        let c = corpus(&text);
        let sig = sig_for(&c, '立', '局', 2);
        assert!(expand_ngrams(&c.stream, &c.sentences, &sig, 0.75, 8).is_empty());
    }

    #[test]
    fn non_ideograph_candidates_are_dropped() {
        let mut text = String::new();
        for i in 0..30 {
            text.push(if i % 2 == 0 { '甲' } else { '乙' });
            text.push_str("Ｘ立法。");
        }
        let c = corpus(&text);
        let sig = sig_for(&c, 'Ｘ', '立', 1);
        assert!(expand_ngrams(&c.stream, &c.sentences, &sig, 0.75, 8).is_empty());
        let adjacent = extract_adjacent_bigrams(&sig);
        assert!(adjacent.is_empty());
    }

    #[test]
    fn partition_deduplicates_keeping_max_freq() {
        let mk = |surface: &str, freq| NGramCandidate {
            surface: surface.into(),
            freq,
            stage: CandidateStage::Adjacent,
            anchor: None,
        };
        let buckets = partition_by_length(vec![mk("立法", 9), mk("立法", 12), mk("法局", 4)]);
        let two = buckets.class(LengthClass::Two);
        assert_eq!(two.len(), 2);
        assert_eq!(two[0].surface, "立法");
        assert_eq!(two[0].freq, 12);
        assert_eq!(buckets.class(LengthClass::Three).len(), 0);
        assert_eq!(buckets.total(), 2);
    }

    #[test]
    fn length_classes_bucket_correctly() {
        assert_eq!(LengthClass::of(2), LengthClass::Two);
        assert_eq!(LengthClass::of(6), LengthClass::Six);
        assert_eq!(LengthClass::of(7), LengthClass::Longer);
        assert_eq!(LengthClass::of(10), LengthClass::Longer);
        assert_eq!(LengthClass::Longer.label(), "m");
    }

    #[test]
    fn shard_merge_equals_whole_corpus() {
        let text = "立法局立法。立法院。行政局。";
        let whole = corpus(text);
        let whole_bigrams = count_positional_bigrams(&whole.stream, &whole.sentences, 5);

        let a = corpus("立法局立法。");
        let b = corpus("立法院。行政局。");
        let merged = merge_positional_bigrams(vec![
            count_positional_bigrams(&a.stream, &a.sentences, 5),
            count_positional_bigrams(&b.stream, &b.sentences, 5),
        ]);
        assert_eq!(whole_bigrams, merged);

        let u_whole = count_unigrams(&whole.stream, &whole.sentences);
        let u_merged = count_unigrams(&a.stream, &a.sentences)
            .merge(&count_unigrams(&b.stream, &b.sentences));
        assert_eq!(u_whole, u_merged);
    }

    #[test]
    fn empty_corpus_extracts_nothing() {
        let c = corpus("");
        let (buckets, summary) =
            extract_candidates(&c.stream, &c.sentences, &ExtractionParams::default());
        assert_eq!(buckets.total(), 0);
        assert_eq!(summary.bigrams_counted, 0);
    }

    #[test]
    fn candidate_rows_sort_by_length_then_frequency_and_round_trip() {
        let buckets = partition_by_length(vec![
            NGramCandidate {
                surface: "立法局".to_string(),
                freq: 30,
                stage: CandidateStage::Expanded,
                anchor: Some(Anchor {
                    w1: '局',
                    w2: '立',
                    distance: -2,
                }),
            },
            NGramCandidate {
                surface: "政府".to_string(),
                freq: 12,
                stage: CandidateStage::Adjacent,
                anchor: None,
            },
            NGramCandidate {
                surface: "草案".to_string(),
                freq: 40,
                stage: CandidateStage::Adjacent,
                anchor: None,
            },
        ]);
        let tsv = candidates_to_tsv(&buckets);
        assert_eq!(
            tsv,
            "草案\t2\t40\tadjacent\t-\t-\n\
             政府\t2\t12\tadjacent\t-\t-\n\
             立法局\t3\t30\texpanded\t局立\t-2\n"
        );
        let parsed = parse_candidates(&tsv, "c.tsv").unwrap();
        assert_eq!(parsed, buckets);
    }

    #[test]
    fn candidate_rows_reject_inconsistent_fields() {
        let bad_len = "立法局\t2\t30\texpanded\t局立\t-2\n";
        assert!(matches!(
            parse_candidates(bad_len, "c.tsv"),
            Err(Error::Format { line: 1, .. })
        ));
        let bad_stage = "政府\t2\t12\tmerged\t-\t-\n";
        assert!(matches!(
            parse_candidates(bad_stage, "c.tsv"),
            Err(Error::Format { line: 1, .. })
        ));
        let bad_distance = "立法局\t3\t30\texpanded\t局立\t-7\n";
        assert!(matches!(
            parse_candidates(bad_distance, "c.tsv"),
            Err(Error::Format { line: 1, .. })
        ));
        let dup = "政府\t2\t12\tadjacent\t-\t-\n政府\t2\t9\tadjacent\t-\t-\n";
        match parse_candidates(dup, "c.tsv") {
            Err(Error::DuplicateSurface { line, surface, .. }) => {
                assert_eq!(line, 2);
                assert_eq!(surface, "政府");
            }
            other => panic!("expected duplicate error, got {other:?}"),
        }
    }
}
