//! Affix statistics and the sparse feature map over word/candidate pairs.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::candgen::{generate_candidates_with, Candidate, Side, Transformation, MAX_AFFIX_LEN};
use crate::corpus::{EmbeddingTable, WordList};
use crate::error::Result;

/// Number of cosine indicator bins over [-1, 1].
pub const COSINE_BINS: usize = 20;

/// Stop-candidate length features saturate at this value.
pub const STOP_LEN_CAP: usize = 10;

/// Most frequent suffixes and prefixes of frequent words.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AffixLexicon {
    pub suffixes: BTreeMap<String, u64>,
    pub prefixes: BTreeMap<String, u64>,
    pub threshold: u64,
}

impl AffixLexicon {
    pub fn get(&self, side: Side, affix: &str) -> Option<u64> {
        match side {
            Side::Suffix => self.suffixes.get(affix).copied(),
            Side::Prefix => self.prefixes.get(affix).copied(),
            Side::Stop => None,
        }
    }

    pub fn contains(&self, side: Side, affix: &str) -> bool {
        self.get(side, affix).is_some()
    }

    pub fn is_empty(&self) -> bool {
        self.suffixes.is_empty() && self.prefixes.is_empty()
    }
}

/// Splits of `word` into a stem and an affix of 1..=4 characters where the
/// stem keeps at least half the word, one entry per affix length.
fn affix_splits(word: &str) -> impl Iterator<Item = AffixSplit> + '_ {
    let chars: Vec<char> = word.chars().collect();
    let n = chars.len();
    (1..=MAX_AFFIX_LEN.min(n.saturating_sub(1)))
        .filter(move |k| 2 * (n - k) >= n)
        .map(move |k| AffixSplit {
            prefix: chars[..k].iter().collect(),
            prefix_stem: chars[k..].iter().collect(),
            suffix: chars[n - k..].iter().collect(),
            suffix_stem: chars[..n - k].iter().collect(),
        })
}

struct AffixSplit {
    prefix: String,
    prefix_stem: String,
    suffix: String,
    suffix_stem: String,
}

fn keep_top(counts: HashMap<String, u64>, top_n: usize) -> BTreeMap<String, u64> {
    let mut ranked: Vec<(String, u64)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(top_n);
    ranked.into_iter().collect()
}

/// Counts, for every word seen more than `threshold` times, each of its
/// admissible suffixes and prefixes, then keeps the `top_n` most frequent
/// affixes per side.
pub fn build_affix_lexicon(words: &WordList, threshold: u64, top_n: usize) -> AffixLexicon {
    let mut suffixes: HashMap<String, u64> = HashMap::new();
    let mut prefixes: HashMap<String, u64> = HashMap::new();
    for (word, count) in words.iter() {
        if count <= threshold {
            continue;
        }
        for split in affix_splits(word) {
            *suffixes.entry(split.suffix).or_insert(0) += 1;
            *prefixes.entry(split.prefix).or_insert(0) += 1;
        }
    }
    AffixLexicon {
        suffixes: keep_top(suffixes, top_n),
        prefixes: keep_top(prefixes, top_n),
        threshold,
    }
}

/// Pairs of lexicon affixes that attach to the same stems.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CorrelationTable {
    suffix_pairs: BTreeMap<(String, String), u64>,
    prefix_pairs: BTreeMap<(String, String), u64>,
    neighbors: HashMap<(Side, String), Vec<String>>,
}

fn ordered(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

impl CorrelationTable {
    /// Builds a table from stored pairs; each pair is normalized to sorted order.
    pub fn from_pairs<I>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (Side, String, String, u64)>,
    {
        let mut table = CorrelationTable::default();
        for (side, a, b, count) in pairs {
            let key = ordered(&a, &b);
            match side {
                Side::Suffix => table.suffix_pairs.insert(key, count),
                Side::Prefix => table.prefix_pairs.insert(key, count),
                Side::Stop => continue,
            };
        }
        table.reindex();
        table
    }

    fn reindex(&mut self) {
        self.neighbors.clear();
        for (side, pairs) in [(Side::Suffix, &self.suffix_pairs), (Side::Prefix, &self.prefix_pairs)] {
            for (a, b) in pairs.keys() {
                self.neighbors
                    .entry((side, a.clone()))
                    .or_default()
                    .push(b.clone());
                self.neighbors
                    .entry((side, b.clone()))
                    .or_default()
                    .push(a.clone());
            }
        }
        for list in self.neighbors.values_mut() {
            list.sort();
        }
    }

    /// Shared-stem count of an unordered pair.
    pub fn shared(&self, side: Side, a: &str, b: &str) -> Option<u64> {
        let key = ordered(a, b);
        match side {
            Side::Suffix => self.suffix_pairs.get(&key).copied(),
            Side::Prefix => self.prefix_pairs.get(&key).copied(),
            Side::Stop => None,
        }
    }

    /// Affixes correlated with `affix`, in lexicographic order.
    pub fn neighbors(&self, side: Side, affix: &str) -> &[String] {
        self.neighbors
            .get(&(side, affix.to_string()))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// All stored pairs as `(side, a, b, count)` with `a <= b`.
    pub fn pairs(&self) -> impl Iterator<Item = (Side, &str, &str, u64)> + '_ {
        let suffix = self
            .suffix_pairs
            .iter()
            .map(|((a, b), c)| (Side::Suffix, a.as_str(), b.as_str(), *c));
        let prefix = self
            .prefix_pairs
            .iter()
            .map(|((a, b), c)| (Side::Prefix, a.as_str(), b.as_str(), *c));
        suffix.chain(prefix)
    }

    pub fn len(&self) -> usize {
        self.suffix_pairs.len() + self.prefix_pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn count_pairs(stems: HashMap<String, BTreeSet<String>>, min_shared: u64) -> BTreeMap<(String, String), u64> {
    let mut pairs: BTreeMap<(String, String), u64> = BTreeMap::new();
    for affixes in stems.values() {
        let affixes: Vec<&String> = affixes.iter().collect();
        for (i, a) in affixes.iter().enumerate() {
            for b in &affixes[i + 1..] {
                *pairs.entry(((*a).clone(), (*b).clone())).or_insert(0) += 1;
            }
        }
    }
    pairs.retain(|_, c| *c >= min_shared);
    pairs
}

/// Counts, per pair of lexicon affixes, the stems that occur in the word list
/// with both affixes. Pairs sharing fewer than `min_shared` stems are dropped.
pub fn build_correlation(words: &WordList, lexicon: &AffixLexicon, min_shared: u64) -> CorrelationTable {
    let mut suffix_stems: HashMap<String, BTreeSet<String>> = HashMap::new();
    let mut prefix_stems: HashMap<String, BTreeSet<String>> = HashMap::new();
    for (word, _) in words.iter() {
        for split in affix_splits(word) {
            if lexicon.suffixes.contains_key(&split.suffix) {
                suffix_stems
                    .entry(split.suffix_stem)
                    .or_default()
                    .insert(split.suffix);
            }
            if lexicon.prefixes.contains_key(&split.prefix) {
                prefix_stems
                    .entry(split.prefix_stem)
                    .or_default()
                    .insert(split.prefix);
            }
        }
    }
    let mut table = CorrelationTable {
        suffix_pairs: count_pairs(suffix_stems, min_shared),
        prefix_pairs: count_pairs(prefix_stems, min_shared),
        neighbors: HashMap::new(),
    };
    table.reindex();
    table
}

/// Sparse feature map. Zero values are never stored.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeatureVector {
    entries: BTreeMap<String, f64>,
}

impl FeatureVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, name: impl Into<String>, value: f64) {
        if value == 0.0 {
            return;
        }
        let name = name.into();
        let slot = self.entries.entry(name.clone()).or_insert(0.0);
        *slot += value;
        if *slot == 0.0 {
            self.entries.remove(&name);
        }
    }

    pub fn set(&mut self, name: impl Into<String>) {
        self.entries.insert(name.into(), 1.0);
    }

    pub fn get(&self, name: &str) -> f64 {
        self.entries.get(name).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> + '_ {
        self.entries.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Inner product with a weight map; absent weights count as zero.
    pub fn dot(&self, weights: &BTreeMap<String, f64>) -> f64 {
        self.entries
            .iter()
            .map(|(k, v)| weights.get(k).map_or(0.0, |w| w * v))
            .sum()
    }
}

impl<'a> FromIterator<(&'a str, f64)> for FeatureVector {
    fn from_iter<T: IntoIterator<Item = (&'a str, f64)>>(iter: T) -> Self {
        let mut fv = FeatureVector::new();
        for (k, v) in iter {
            fv.add(k, v);
        }
        fv
    }
}

/// Bin index of a cosine similarity, monotone in its argument.
pub fn cosine_bin(cos: f64) -> usize {
    let k = ((cos + 1.0) * 10.0).floor();
    (k.max(0.0) as usize).min(COSINE_BINS - 1)
}

/// Maps word/candidate pairs to feature vectors against frozen resources.
#[derive(Debug, Clone, Copy)]
pub struct FeatureExtractor<'a> {
    pub words: &'a WordList,
    pub embeddings: &'a EmbeddingTable,
    pub lexicon: &'a AffixLexicon,
    pub correlations: &'a CorrelationTable,
}

impl<'a> FeatureExtractor<'a> {
    pub fn new(
        words: &'a WordList,
        embeddings: &'a EmbeddingTable,
        lexicon: &'a AffixLexicon,
        correlations: &'a CorrelationTable,
    ) -> Self {
        FeatureExtractor {
            words,
            embeddings,
            lexicon,
            correlations,
        }
    }

    /// Candidates of `word` under this extractor's vocabulary.
    pub fn candidates(&self, word: &str) -> Vec<Candidate> {
        generate_candidates_with(word, Some(self.words))
    }

    /// Features of one pair. Fails if `cand` is not a candidate of `word`.
    pub fn extract(&self, word: &str, cand: &Candidate) -> Result<FeatureVector> {
        cand.validate(word)?;
        if cand.is_stop() {
            let stop_cos = self.max_parent_cosine(word, &self.candidates(word));
            Ok(self.stop_features(word, stop_cos))
        } else {
            Ok(self.pair_features(word, cand))
        }
    }

    /// Features of every candidate in `cands`, which must come from
    /// [`FeatureExtractor::candidates`] for `word`.
    pub fn extract_all(&self, word: &str, cands: &[Candidate]) -> Vec<FeatureVector> {
        let stop_cos = if cands.iter().any(Candidate::is_stop) {
            self.max_parent_cosine(word, cands)
        } else {
            None
        };
        cands
            .iter()
            .map(|c| {
                if c.is_stop() {
                    self.stop_features(word, stop_cos)
                } else {
                    self.pair_features(word, c)
                }
            })
            .collect()
    }

    fn max_parent_cosine(&self, word: &str, cands: &[Candidate]) -> Option<f64> {
        cands
            .iter()
            .filter(|c| c.is_first_level())
            .filter_map(|c| self.embeddings.similarity(word, &c.parent))
            .fold(None, |acc: Option<f64>, x| Some(acc.map_or(x, |a| a.max(x))))
    }

    fn affix_feature(&self, fv: &mut FeatureVector, side: Side, affix: &str) {
        if self.lexicon.contains(side, affix) {
            fv.add(format!("affix:{side}:{affix}"), 1.0);
        } else {
            fv.add(format!("affix_unk:{side}"), 1.0);
        }
    }

    fn correlated(&self, side: Side, affix: &str, parent: &str) -> bool {
        self.correlations.neighbors(side, affix).iter().any(|other| {
            let attached = match side {
                Side::Prefix => format!("{other}{parent}"),
                _ => format!("{parent}{other}"),
            };
            self.words.contains(&attached)
        })
    }

    fn pair_features(&self, word: &str, cand: &Candidate) -> FeatureVector {
        let mut fv = FeatureVector::new();
        if let Some(cos) = self.embeddings.similarity(word, &cand.parent) {
            fv.set(format!("cos_bin:{}", cosine_bin(cos)));
        }
        for affix in &cand.affix_chain {
            self.affix_feature(&mut fv, Side::Suffix, affix);
        }
        if cand.side == Side::Prefix {
            self.affix_feature(&mut fv, Side::Prefix, &cand.surface_affix);
        }
        if cand
            .affix_chain
            .iter()
            .any(|a| self.correlated(Side::Suffix, a, &cand.parent))
        {
            fv.set("corr:Suffix");
        }
        if cand.side == Side::Prefix && self.correlated(Side::Prefix, &cand.surface_affix, &cand.parent) {
            fv.set("corr:Prefix");
        }
        if self.words.contains(&cand.parent) {
            fv.set("in_wordlist");
        }
        match cand.transformation {
            Transformation::None => {}
            Transformation::Repeat(_) => fv.set("xform_repeat"),
            Transformation::Delete(_) => fv.set("xform_delete"),
            Transformation::Modify(_) => fv.set("xform_modify"),
        }
        fv.set(format!("bias:{}", cand.side));
        fv
    }

    fn stop_features(&self, word: &str, max_cos: Option<f64>) -> FeatureVector {
        let mut fv = FeatureVector::new();
        if let Some(cos) = max_cos {
            fv.set(format!("stop_cos_max:{}", cosine_bin(cos)));
        }
        let len = word.chars().count();
        fv.set(format!("stop_len:{}", len.min(STOP_LEN_CAP)));
        if let (Some(first), Some(last)) = (word.chars().next(), word.chars().next_back()) {
            fv.set(format!("stop_begin:{first}"));
            fv.set(format!("stop_end:{last}"));
        }
        fv.set("bias:Stop");
        fv
    }
}

/// Feature-name namespaces the extractor may emit.
pub const FEATURE_NAMESPACES: [&str; 13] = [
    "cos_bin",
    "affix",
    "affix_unk",
    "corr",
    "in_wordlist",
    "xform_repeat",
    "xform_delete",
    "xform_modify",
    "stop_cos_max",
    "stop_len",
    "stop_begin",
    "stop_end",
    "bias",
];

/// Namespace of a feature name (text before the first `:`).
pub fn namespace(name: &str) -> &str {
    name.split(':').next().unwrap_or(name)
}
