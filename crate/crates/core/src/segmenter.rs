//! Greedy recursive segmentation with a trained model.

use std::cmp::Ordering;
use std::fmt;

use rayon::prelude::*;

use crate::candgen::{Candidate, Side};
use crate::model::Model;

/// A word and its split points, measured in characters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segmentation {
    pub word: String,
    pub boundaries: Vec<usize>,
}

impl Segmentation {
    /// Builds a segmentation, sorting and deduplicating boundaries and
    /// dropping any at the word edges.
    pub fn new(word: impl Into<String>, mut boundaries: Vec<usize>) -> Self {
        let word = word.into();
        let n = word.chars().count();
        boundaries.retain(|&b| b > 0 && b < n);
        boundaries.sort_unstable();
        boundaries.dedup();
        Segmentation { word, boundaries }
    }

    pub fn unsegmented(word: impl Into<String>) -> Self {
        Self::new(word, Vec::new())
    }

    /// Segmentation induced by a sequence of morphs.
    pub fn from_morphs<S: AsRef<str>>(morphs: &[S]) -> Self {
        let mut word = String::new();
        let mut boundaries = Vec::new();
        let mut pos = 0;
        for (i, m) in morphs.iter().enumerate() {
            if i > 0 {
                boundaries.push(pos);
            }
            word.push_str(m.as_ref());
            pos += m.as_ref().chars().count();
        }
        Segmentation::new(word, boundaries)
    }

    pub fn morphs(&self) -> Vec<String> {
        let chars: Vec<char> = self.word.chars().collect();
        let mut out = Vec::with_capacity(self.boundaries.len() + 1);
        let mut start = 0;
        for &b in self.boundaries.iter().chain(std::iter::once(&chars.len())) {
            out.push(chars[start..b].iter().collect());
            start = b;
        }
        out
    }
}

/// `word<TAB>morph1 morph2 ...`
impl fmt::Display for Segmentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t{}", self.word, self.morphs().join(" "))
    }
}

/// Ranking used to pick the best candidate: higher score first, then stop,
/// then the longer parent, then the lexicographically smaller parent, then
/// the candidate's own order.
fn rank(a: &(Candidate, f64), b: &(Candidate, f64)) -> Ordering {
    b.1.partial_cmp(&a.1)
        .unwrap_or(Ordering::Equal)
        .then_with(|| b.0.is_stop().cmp(&a.0.is_stop()))
        .then_with(|| b.0.parent.chars().count().cmp(&a.0.parent.chars().count()))
        .then_with(|| a.0.parent.cmp(&b.0.parent))
        .then_with(|| a.0.cmp(&b.0))
}

/// Highest-ranked candidate of `word` under `model`.
pub fn best_candidate(model: &Model, word: &str) -> Candidate {
    model
        .scored_candidates(word)
        .into_iter()
        .min_by(rank)
        .map(|(c, _)| c)
        .unwrap_or_else(|| Candidate::stop(word))
}

/// Repeatedly applies the best candidate to the remaining surface stem until
/// the stop candidate wins or a prefix-side parent ends the descent.
pub fn segment(model: &Model, word: &str) -> Segmentation {
    let mut boundaries = Vec::new();
    let mut current: String = word.to_string();
    loop {
        let n = current.chars().count();
        let best = best_candidate(model, &current);
        boundaries.extend(best.boundaries(n));
        match best.side {
            Side::Stop | Side::Prefix => break,
            Side::Suffix => {
                let stem_len = best.surface_stem_len(n);
                if stem_len == 0 || stem_len >= n {
                    break;
                }
                current = current.chars().take(stem_len).collect();
            }
        }
    }
    Segmentation::new(word, boundaries)
}

/// Segments every word independently, preserving order.
pub fn segment_batch<S: AsRef<str> + Sync>(model: &Model, words: &[S]) -> Vec<Segmentation> {
    words.par_iter().map(|w| segment(model, w.as_ref())).collect()
}
