#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use morphchain::{Candidate, EmbeddingTable, Side, Transformation, WordList};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every candidate of `word` found by exhaustive depth-first stripping over
/// plain strings, with chains minimized per (parent, side, transformation).
pub fn oracle_candidates(word: &str) -> BTreeSet<Candidate> {
    fn descend(host: &str, chain: &mut Vec<String>, out: &mut Vec<Candidate>, word: &str) {
        let h: Vec<char> = host.chars().collect();
        // prefix-side parents of this host: short right-hand pieces
        for start in 1..h.len() {
            let parent: String = h[start..].iter().collect();
            let p = h.len() - start;
            if p <= 4 && 2 * p >= h.len() {
                out.push(Candidate {
                    parent,
                    side: Side::Prefix,
                    transformation: Transformation::None,
                    affix_chain: chain.clone(),
                    surface_affix: h[..start].iter().collect(),
                });
            }
        }
        if h.len() <= 2 {
            return;
        }
        for cut in 1..h.len() {
            let affix: String = h[cut..].iter().collect();
            if affix.chars().count() > 4 || 2 * cut < h.len() {
                continue;
            }
            let parent: String = h[..cut].iter().collect();
            chain.push(affix);
            let tail: String = chain.iter().rev().map(String::as_str).collect();
            out.push(Candidate {
                parent: parent.clone(),
                side: Side::Suffix,
                transformation: Transformation::None,
                affix_chain: chain.clone(),
                surface_affix: tail.clone(),
            });
            let pc: Vec<char> = parent.chars().collect();
            if pc.len() >= 2 && pc[pc.len() - 1] == pc[pc.len() - 2] {
                out.push(Candidate {
                    parent: pc[..pc.len() - 1].iter().collect(),
                    side: Side::Suffix,
                    transformation: Transformation::Repeat(pc[pc.len() - 1]),
                    affix_chain: chain.clone(),
                    surface_affix: tail,
                });
            }
            descend(&parent, chain, out, word);
            chain.pop();
        }
    }

    let mut all = Vec::new();
    descend(word, &mut Vec::new(), &mut all, word);
    let mut best: BTreeMap<(String, Side, Transformation), usize> = BTreeMap::new();
    for c in &all {
        let key = (c.parent.clone(), c.side, c.transformation);
        let d = best.entry(key).or_insert(usize::MAX);
        *d = (*d).min(c.affix_chain.len());
    }
    let mut out: BTreeSet<Candidate> = all
        .into_iter()
        .filter(|c| best[&(c.parent.clone(), c.side, c.transformation)] == c.affix_chain.len())
        .collect();
    out.insert(Candidate::stop(word));
    out
}

/// Every string of length `1..=max_len` over `alphabet`.
pub fn all_strings(alphabet: &[char], max_len: usize) -> Vec<String> {
    let mut out = Vec::new();
    let mut layer = vec![String::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * alphabet.len());
        for s in &layer {
            for &c in alphabet {
                let mut t = s.clone();
                t.push(c);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

pub const SUFFIXES: [&str; 6] = ["lar", "ler", "da", "de", "a", "e"];

/// A generated agglutinative language: stems with suffix sequences, word
/// counts, embeddings and held-out gold analyses.
pub struct Synthetic {
    pub stems: Vec<String>,
    pub train: WordList,
    pub embeddings: EmbeddingTable,
    /// Held-out words with their morphs, absent from `train`.
    pub heldout: Vec<(String, Vec<String>)>,
    /// Morphs of every generated word, held-out ones included.
    pub analyses: BTreeMap<String, Vec<String>>,
}

/// Count ceiling for bare stems; at or below the default lexicon threshold.
pub const BARE_STEM_MAX_COUNT: u64 = 4;
/// Length of each suffix's offset vector relative to the unit stem direction.
const SUFFIX_OFFSET: f64 = 0.25;
/// Embedding dimensionality.
pub const DIM: usize = 200;
/// Length of the per-word random perturbation.
const NOISE: f64 = 0.05;

const CONSONANTS: &[char] = &['b', 'c', 'f', 'g', 'k', 'm', 'n', 'p', 's', 't', 'v', 'y', 'z'];
const VOWELS: &[char] = &['i', 'o', 'u', 'ı', 'ü'];

fn random_stem(rng: &mut ChaCha8Rng) -> String {
    let syllables = rng.gen_range(2..=3);
    let mut s = String::new();
    for _ in 0..syllables {
        s.push(*CONSONANTS.choose(rng).unwrap());
        s.push(*VOWELS.choose(rng).unwrap());
    }
    if rng.gen_bool(0.6) {
        s.push(*CONSONANTS.choose(rng).unwrap());
    }
    s
}

fn random_suffixes(rng: &mut ChaCha8Rng) -> Vec<String> {
    let k = rng.gen_range(1..=3);
    (0..k)
        .map(|_| SUFFIXES.choose(rng).unwrap().to_string())
        .collect()
}

fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / norm).collect()
}

/// Builds the corpus. Every stem appears bare (rarely) and with
/// `forms_per_stem` suffix sequences, each contributing all of its prefixes
/// as words. Held-out words are fresh sequences whose proper sub-forms all
/// occur in training. A word's vector is its stem's unit direction plus one
/// fixed offset per suffix and a little noise, so forms of one stem are much
/// closer to each other than to forms of other stems, and a word is closest
/// to the forms differing from it by fewest suffixes.
pub fn synthetic(seed: u64, n_stems: usize, forms_per_stem: usize, n_heldout: usize) -> Synthetic {
    let dim = DIM;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stems = BTreeSet::new();
    while stems.len() < n_stems {
        stems.insert(random_stem(&mut rng));
    }
    let mut stems: Vec<String> = stems.into_iter().collect();
    stems.shuffle(&mut rng);

    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    // first analysis seen for each surface form
    let mut analyses: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut add = |counts: &mut BTreeMap<String, u64>, morphs: Vec<String>, c: u64| {
        let w: String = morphs.concat();
        *counts.entry(w.clone()).or_insert(0) += c;
        analyses.entry(w).or_insert(morphs);
    };
    for stem in &stems {
        // bare stems are attested, but too rarely to feed the affix lexicon
        add(&mut counts, vec![stem.clone()], rng.gen_range(1..=BARE_STEM_MAX_COUNT));
        for _ in 0..forms_per_stem {
            let mut morphs = vec![stem.clone()];
            for s in random_suffixes(&mut rng) {
                morphs.push(s);
                add(&mut counts, morphs.clone(), rng.gen_range(3..30));
            }
        }
    }

    let mut heldout = Vec::new();
    let mut seen = BTreeSet::new();
    let mut reserved = BTreeSet::new();
    let mut guard = 0;
    while heldout.len() < n_heldout {
        guard += 1;
        assert!(guard < 1_000_000, "cannot draw enough held-out words");
        let stem = stems.choose(&mut rng).unwrap().clone();
        let mut morphs = vec![stem];
        morphs.extend(random_suffixes(&mut rng));
        let word = morphs.concat();
        let subs: Vec<String> = (1..morphs.len()).map(|k| morphs[..k].concat()).collect();
        if counts.contains_key(&word)
            || seen.contains(&word)
            || reserved.contains(&word)
            || subs.iter().any(|s| seen.contains(s))
        {
            continue;
        }
        seen.insert(word.clone());
        reserved.extend(subs);
        heldout.push((word, morphs));
    }
    // sub-forms of held-out words are observed words
    for (_, morphs) in &heldout {
        for k in 1..morphs.len() {
            let sub: String = morphs[..k].concat();
            counts.entry(sub.clone()).or_insert_with(|| rng.gen_range(3..30));
            analyses.entry(sub).or_insert_with(|| morphs[..k].to_vec());
        }
    }
    for (w, morphs) in &heldout {
        analyses.entry(w.clone()).or_insert_with(|| morphs.clone());
    }

    let base: BTreeMap<&str, Vec<f64>> = stems
        .iter()
        .map(|s| (s.as_str(), random_unit(&mut rng, dim)))
        .collect();
    let offsets: BTreeMap<&str, Vec<f64>> = SUFFIXES
        .iter()
        .map(|s| (*s, random_unit(&mut rng, dim)))
        .collect();
    let mut embeddings = EmbeddingTable::new(dim);
    let vocab: BTreeSet<&str> = counts
        .keys()
        .map(String::as_str)
        .chain(heldout.iter().map(|(w, _)| w.as_str()))
        .collect();
    for w in vocab {
        let morphs = &analyses[w];
        let mut v = base[morphs[0].as_str()].clone();
        for m in &morphs[1..] {
            for (x, o) in v.iter_mut().zip(&offsets[m.as_str()]) {
                *x += SUFFIX_OFFSET * o;
            }
        }
        for (x, e) in v.iter_mut().zip(random_unit(&mut rng, dim)) {
            *x += NOISE * e;
        }
        embeddings.insert(w, v).unwrap();
    }

    Synthetic {
        stems,
        train: WordList::from_counts(counts),
        embeddings,
        heldout,
        analyses,
    }
}

impl Synthetic {
    pub fn gold_text(&self) -> String {
        let mut s = String::new();
        for (w, m) in &self.heldout {
            writeln!(s, "{w}\t{}", m.join(" ")).unwrap();
        }
        s
    }

    pub fn embeddings_text(&self) -> String {
        let mut words: Vec<&str> = self.train.iter().map(|(w, _)| w).collect();
        words.extend(self.heldout.iter().map(|(w, _)| w.as_str()));
        words.sort_unstable();
        words.dedup();
        let mut s = format!("{} {}\n", words.len(), self.embeddings.dim());
        for w in words {
            let v = self.embeddings.get(w).unwrap();
            let parts: Vec<String> = v.iter().map(f64::to_string).collect();
            writeln!(s, "{w} {}", parts.join(" ")).unwrap();
        }
        s
    }

    pub fn wordlist_text(&self) -> String {
        let mut out = Vec::new();
        self.train.write(&mut out).unwrap();
        String::from_utf8(out).unwrap()
    }

    /// Writes word list, embeddings and gold file into `dir`.
    pub fn write_files(&self, dir: &Path) -> (PathBuf, PathBuf, PathBuf) {
        let wl = dir.join("words.tsv");
        let emb = dir.join("vectors.txt");
        let gold = dir.join("gold.tsv");
        std::fs::write(&wl, self.wordlist_text()).unwrap();
        std::fs::write(&emb, self.embeddings_text()).unwrap();
        std::fs::write(&gold, self.gold_text()).unwrap();
        (wl, emb, gold)
    }
}

/// A small random training problem: resources, data words and a weight
/// vector over exactly the features active on the data.
pub struct Toy {
    pub resources: std::sync::Arc<morphchain::Resources>,
    pub data: Vec<String>,
    pub weights: BTreeMap<String, f64>,
}

/// Random instance with at most `max_words` words and `max_features` active
/// features. Weights are uniform in `[-scale, scale]`.
pub fn toy_instance(rng: &mut ChaCha8Rng, max_words: usize, max_features: usize, scale: f64) -> Toy {
    use morphchain::{Model, ResourceConfig, Resources, TrainConfig};
    let alphabet = ['a', 'b', 'c', 'd', 'e'];
    loop {
        let n = rng.gen_range(2..=max_words);
        let mut counts = BTreeMap::new();
        while counts.len() < n {
            let len = rng.gen_range(2..=6);
            let w: String = (0..len).map(|_| *alphabet.choose(rng).unwrap()).collect();
            counts.insert(w, rng.gen_range(1..10u64));
        }
        let words = WordList::from_counts(counts.clone());
        let mut emb = EmbeddingTable::new(3);
        for w in counts.keys() {
            if rng.gen_bool(0.7) {
                emb.insert(w.as_str(), random_unit(rng, 3)).unwrap();
            }
        }
        let config = ResourceConfig {
            affix_threshold: 0,
            top_affixes: 4,
            min_shared: 1,
            ..ResourceConfig::default()
        };
        let resources = std::sync::Arc::new(Resources::build(words, emb, config));
        let data: Vec<String> = counts.keys().cloned().collect();
        let probe = Model::new(resources.clone(), TrainConfig::default());
        let names: Vec<String> = probe.gradient(&data).into_keys().collect();
        if names.is_empty() || names.len() > max_features {
            continue;
        }
        let weights = names
            .into_iter()
            .map(|k| (k, rng.gen_range(-scale..=scale)))
            .collect();
        return Toy {
            resources,
            data,
            weights,
        };
    }
}

impl Toy {
    pub fn model(&self, l2: f64) -> morphchain::Model {
        let config = morphchain::TrainConfig {
            l2_lambda: l2,
            ..morphchain::TrainConfig::default()
        };
        morphchain::Model::new(self.resources.clone(), config).with_weights(self.weights.clone())
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
