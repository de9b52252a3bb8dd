//! Boundary precision, recall and F1 against gold segmentations.
//!
//! Counts are micro-averaged over words. When a gold word lists several
//! alternative analyses, one alternative per word is chosen so that the
//! overall F1 is as high as possible.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};
use crate::segmenter::Segmentation;

/// Gold analyses, each a sequence of morphs concatenating to the word.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GoldStandard {
    entries: BTreeMap<String, Vec<Vec<String>>>,
}

impl GoldStandard {
    /// Adds an analysis; exact duplicates are ignored.
    pub fn insert(&mut self, word: &str, morphs: Vec<String>) -> Result<()> {
        if morphs.concat() != word || morphs.iter().any(String::is_empty) {
            return Err(Error::Contract(format!(
                "analysis {:?} does not spell {:?}",
                morphs.join(" "),
                word
            )));
        }
        let alts = self.entries.entry(word.to_string()).or_default();
        if !alts.contains(&morphs) {
            alts.push(morphs);
        }
        Ok(())
    }

    /// Parses `word<TAB>m1 m2, m1' m2'` lines.
    pub fn read<R: BufRead>(reader: R, origin: &Path) -> Result<Self> {
        let mut gold = GoldStandard::default();
        for (idx, line) in reader.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.map_err(|e| Error::io(origin, e))?;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let (word, analyses) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(origin, lineno, "expected `word<TAB>analysis`"))?;
            for alt in analyses.split(',') {
                let morphs: Vec<String> = alt.split_whitespace().map(str::to_string).collect();
                if morphs.is_empty() {
                    return Err(Error::parse(origin, lineno, "empty analysis"));
                }
                gold.insert(word, morphs)
                    .map_err(|e| Error::parse(origin, lineno, e.to_string()))?;
            }
        }
        Ok(gold)
    }

    pub fn analyses(&self, word: &str) -> Option<&[Vec<String>]> {
        self.entries.get(word).map(Vec::as_slice)
    }

    pub fn words(&self) -> impl Iterator<Item = &str> + '_ {
        self.entries.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn load_gold(path: impl AsRef<Path>) -> Result<GoldStandard> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    GoldStandard::read(BufReader::new(file), path)
}

fn boundary_set(morphs: &[String]) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    let mut pos = 0;
    for m in &morphs[..morphs.len().saturating_sub(1)] {
        pos += m.chars().count();
        out.insert(pos);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct WordDiagnostic {
    pub word: String,
    pub predicted: Vec<usize>,
    pub gold: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub hits: usize,
    pub predicted: usize,
    pub gold: usize,
    /// Gold words that received a prediction.
    pub words: usize,
    /// Gold words without a prediction; their boundaries count as misses.
    pub missing: usize,
    /// Predicted words absent from the gold standard.
    pub skipped: usize,
    pub diagnostics: Vec<WordDiagnostic>,
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# boundary evaluation, micro-averaged over words")?;
        writeln!(f, "{:.4}\t{:.4}\t{:.4}", self.precision, self.recall, self.f1)?;
        write!(
            f,
            "hits={} predicted={} gold={} words={} missing={} skipped={}",
            self.hits, self.predicted, self.gold, self.words, self.missing, self.skipped
        )
    }
}

/// Precision, recall and F1 from boundary counts, with the degenerate cases
/// of zero predicted or zero gold boundaries resolved to 1 when both are zero
/// and 0 otherwise.
pub fn prf(hits: usize, predicted: usize, gold: usize) -> (f64, f64, f64) {
    let ratio = |num: usize, den: usize| {
        if den > 0 {
            num as f64 / den as f64
        } else if predicted == 0 && gold == 0 {
            1.0
        } else {
            0.0
        }
    };
    let p = ratio(hits, predicted);
    let r = ratio(hits, gold);
    let f = if p + r > 0.0 { 2.0 * p * r / (p + r) } else { 0.0 };
    (p, r, f)
}

/// One word's options: (hits, gold count) per alternative.
struct WordChoices {
    word: String,
    predicted: BTreeSet<usize>,
    alternatives: Vec<BTreeSet<usize>>,
    options: Vec<(usize, usize)>,
}

/// Picks one alternative per word maximizing `2H / (P + G)`.
///
/// Fractional programming: with the current ratio `λ`, each word
/// independently maximizes `h - λ g`; the ratio strictly increases until no
/// word can improve, at which point the selection is optimal.
fn select_alternatives(words: &[WordChoices], total_predicted: usize) -> Vec<usize> {
    let mut choice: Vec<usize> = words
        .iter()
        .map(|w| {
            // start from the per-word best F1
            (0..w.options.len())
                .max_by(|&a, &b| {
                    let fa = prf(w.options[a].0, w.predicted.len(), w.options[a].1).2;
                    let fb = prf(w.options[b].0, w.predicted.len(), w.options[b].1).2;
                    fa.partial_cmp(&fb).unwrap().then(b.cmp(&a))
                })
                .unwrap_or(0)
        })
        .collect();
    if total_predicted == 0 {
        // H is zero whatever is chosen; fewest gold boundaries is best
        for (c, w) in choice.iter_mut().zip(words) {
            *c = (0..w.options.len())
                .min_by_key(|&i| (w.options[i].1, i))
                .unwrap_or(0);
        }
        return choice;
    }
    let totals = |choice: &[usize]| {
        words.iter().zip(choice).fold((0usize, 0usize), |(h, g), (w, &c)| {
            (h + w.options[c].0, g + w.options[c].1)
        })
    };
    loop {
        let (h, g) = totals(&choice);
        let lambda = h as f64 / (total_predicted + g) as f64;
        let next: Vec<usize> = choice
            .iter()
            .zip(words)
            .map(|(&c, w)| {
                let value = |i: usize| w.options[i].0 as f64 - lambda * w.options[i].1 as f64;
                (0..w.options.len()).fold(c, |best, i| if value(i) > value(best) + 1e-12 { i } else { best })
            })
            .collect();
        let (h2, g2) = totals(&next);
        if h2 as f64 / (total_predicted + g2) as f64 > lambda {
            choice = next;
        } else {
            return choice;
        }
    }
}

/// Scores predictions against the gold standard.
pub fn evaluate(preds: &[Segmentation], gold: &GoldStandard) -> Result<EvalReport> {
    let mut by_word: HashMap<&str, &Segmentation> = HashMap::new();
    let mut skipped = 0;
    for p in preds {
        if gold.analyses(&p.word).is_some() {
            by_word.insert(p.word.as_str(), p);
        } else {
            skipped += 1;
        }
    }
    if by_word.is_empty() {
        return Err(Error::Evaluation(
            "no predicted word appears in the gold standard".to_string(),
        ));
    }

    let mut choices = Vec::with_capacity(gold.len());
    let mut total_predicted = 0;
    let mut missing = 0;
    for (word, alts) in &gold.entries {
        let predicted: BTreeSet<usize> = match by_word.get(word.as_str()) {
            Some(p) => p.boundaries.iter().copied().collect(),
            None => {
                missing += 1;
                BTreeSet::new()
            }
        };
        total_predicted += predicted.len();
        let alternatives: Vec<BTreeSet<usize>> = alts.iter().map(|m| boundary_set(m)).collect();
        let options = alternatives
            .iter()
            .map(|g| (g.intersection(&predicted).count(), g.len()))
            .collect();
        choices.push(WordChoices {
            word: word.clone(),
            predicted,
            alternatives,
            options,
        });
    }

    let selected = select_alternatives(&choices, total_predicted);
    let (mut hits, mut gold_total) = (0, 0);
    let mut diagnostics = Vec::with_capacity(choices.len());
    for (w, &c) in choices.iter().zip(&selected) {
        hits += w.options[c].0;
        gold_total += w.options[c].1;
        diagnostics.push(WordDiagnostic {
            word: w.word.clone(),
            predicted: w.predicted.iter().copied().collect(),
            gold: w.alternatives[c].iter().copied().collect(),
        });
    }
    let (precision, recall, f1) = prf(hits, total_predicted, gold_total);
    Ok(EvalReport {
        precision,
        recall,
        f1,
        hits,
        predicted: total_predicted,
        gold: gold_total,
        words: choices.len() - missing,
        missing,
        skipped,
        diagnostics,
    })
}
