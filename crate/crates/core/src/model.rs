//! Log-linear model over word/candidate pairs trained by contrastive
//! estimation.
//!
//! The joint score of a pair is `θ·φ(w, z)`. Training maximizes, for every
//! observed word, the log of its candidate mass relative to the mass of the
//! word together with its transposition neighborhood, minus an L2 penalty.

use std::collections::{BTreeMap, HashMap};
use std::ops::Range;
use std::path::PathBuf;
use std::sync::Arc;

use rayon::prelude::*;

use crate::candgen::{generate_neighbors, Candidate};
use crate::corpus::{EmbeddingTable, WordList};
use crate::error::{Error, Result};
use crate::features::{
    build_affix_lexicon, build_correlation, AffixLexicon, CorrelationTable, FeatureExtractor,
};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub l2_lambda: f64,
    /// Train on this many of the most frequent words.
    pub top_k: usize,
    /// Recorded for reproducibility; full-batch training has no random
    /// ordering to seed.
    pub seed: u64,
    /// Multiplicative per-epoch step decay.
    pub lr_decay: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.05,
            epochs: 50,
            l2_lambda: 0.01,
            top_k: 10_000,
            seed: 0,
            lr_decay: 1.0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Contract(format!("invalid training config: {what}")));
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return bad("learning_rate must be positive");
        }
        if !(self.l2_lambda.is_finite() && self.l2_lambda >= 0.0) {
            return bad("l2_lambda must be non-negative");
        }
        if self.top_k == 0 {
            return bad("top_k must be positive");
        }
        if !(self.lr_decay.is_finite() && self.lr_decay > 0.0) {
            return bad("lr_decay must be positive");
        }
        Ok(())
    }
}

/// How the frozen resources were built. Paths are recorded so a saved model
/// can reload its word list and embeddings.
#[derive(Debug, Clone, PartialEq)]
pub struct ResourceConfig {
    pub wordlist: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub min_count: u64,
    pub affix_threshold: u64,
    pub top_affixes: usize,
    pub min_shared: u64,
}

impl Default for ResourceConfig {
    fn default() -> Self {
        ResourceConfig {
            wordlist: None,
            embeddings: None,
            min_count: 1,
            affix_threshold: 5,
            top_affixes: 100,
            min_shared: 2,
        }
    }
}

/// Everything feature extraction reads. Never mutated after construction.
#[derive(Debug, Clone)]
pub struct Resources {
    pub words: WordList,
    pub embeddings: EmbeddingTable,
    pub lexicon: AffixLexicon,
    pub correlations: CorrelationTable,
    pub config: ResourceConfig,
}

impl Resources {
    /// Derives the affix lexicon and correlation table from `words`.
    pub fn build(words: WordList, embeddings: EmbeddingTable, config: ResourceConfig) -> Self {
        let lexicon = build_affix_lexicon(&words, config.affix_threshold, config.top_affixes);
        let correlations = build_correlation(&words, &lexicon, config.min_shared);
        Resources {
            words,
            embeddings,
            lexicon,
            correlations,
            config,
        }
    }

    pub fn extractor(&self) -> FeatureExtractor<'_> {
        FeatureExtractor::new(&self.words, &self.embeddings, &self.lexicon, &self.correlations)
    }
}

#[derive(Debug, Clone)]
pub struct Model {
    pub weights: BTreeMap<String, f64>,
    pub resources: Arc<Resources>,
    pub config: TrainConfig,
}

impl Model {
    /// A model with all weights zero.
    pub fn new(resources: Arc<Resources>, config: TrainConfig) -> Self {
        Model {
            weights: BTreeMap::new(),
            resources,
            config,
        }
    }

    pub fn with_weights(mut self, weights: BTreeMap<String, f64>) -> Self {
        self.weights = weights;
        self
    }

    pub fn weight(&self, name: &str) -> f64 {
        self.weights.get(name).copied().unwrap_or(0.0)
    }

    /// Unnormalized log-probability `θ·φ(word, cand)`.
    pub fn score(&self, word: &str, cand: &Candidate) -> Result<f64> {
        let fv = self.resources.extractor().extract(word, cand)?;
        Ok(fv.dot(&self.weights))
    }

    /// All candidates of `word` with their scores, in candidate order.
    pub fn scored_candidates(&self, word: &str) -> Vec<(Candidate, f64)> {
        let fx = self.resources.extractor();
        let cands = fx.candidates(word);
        let feats = fx.extract_all(word, &cands);
        cands
            .into_iter()
            .zip(feats)
            .map(|(c, fv)| {
                let s = fv.dot(&self.weights);
                (c, s)
            })
            .collect()
    }

    /// `P(z | word)` over every candidate of `word`.
    pub fn conditional(&self, word: &str) -> Vec<(Candidate, f64)> {
        let scored = self.scored_candidates(word);
        let scores: Vec<f64> = scored.iter().map(|(_, s)| *s).collect();
        scored
            .into_iter()
            .zip(softmax(&scores))
            .map(|((c, _), p)| (c, p))
            .collect()
    }

    fn l2_norm_sq(&self) -> f64 {
        self.weights.values().map(|w| w * w).sum()
    }

    /// Contrastive log-likelihood of `data` minus the L2 penalty.
    pub fn objective(&self, data: &[String]) -> f64 {
        let problem = ContrastiveProblem::build(&self.resources, data);
        let theta = problem.project(&self.weights);
        problem.log_likelihood(&theta) - self.config.l2_lambda * self.l2_norm_sq()
    }

    /// Analytic gradient of [`Model::objective`] with respect to every weight
    /// that is either set in the model or active on `data`.
    pub fn gradient(&self, data: &[String]) -> BTreeMap<String, f64> {
        let problem = ContrastiveProblem::build(&self.resources, data);
        let theta = problem.project(&self.weights);
        let (_, grad) = problem.evaluate(&theta, true);
        let grad = grad.unwrap_or_default();
        let mut out: BTreeMap<String, f64> = problem
            .names
            .iter()
            .cloned()
            .zip(grad)
            .collect();
        for (name, w) in &self.weights {
            *out.entry(name.clone()).or_insert(0.0) -= 2.0 * self.config.l2_lambda * w;
        }
        out
    }
}

/// Normalized exponentials of `scores`.
pub fn softmax(scores: &[f64]) -> Vec<f64> {
    let lse = log_sum_exp(scores);
    scores.iter().map(|s| (s - lse).exp()).collect()
}

/// Numerically stable `log Σ exp(x)`. Returns `-inf` for an empty slice.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || !max.is_finite() {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

struct WordTerm {
    /// Candidate rows of the observed word.
    center: Range<usize>,
    /// Rows of the observed word followed by its neighbors' rows.
    all: Range<usize>,
}

/// Feature-indexed training data: every candidate of every observed word and
/// of its neighbors, as sparse rows.
pub struct ContrastiveProblem {
    names: Vec<String>,
    index: HashMap<String, usize>,
    rows: Vec<Vec<(u32, f64)>>,
    terms: Vec<WordTerm>,
}

const CHUNK: usize = 128;

impl ContrastiveProblem {
    /// Words with an empty neighborhood contribute nothing and are skipped.
    pub fn build(resources: &Resources, data: &[String]) -> Self {
        let fx = resources.extractor();
        let extracted: Vec<Vec<Vec<crate::features::FeatureVector>>> = data
            .par_iter()
            .map(|word| {
                let hood = generate_neighbors(word);
                if hood.members.is_empty() {
                    return Vec::new();
                }
                std::iter::once(word.as_str())
                    .chain(hood.members.iter().map(String::as_str))
                    .map(|w| {
                        let cands = fx.candidates(w);
                        fx.extract_all(w, &cands)
                    })
                    .collect()
            })
            .collect();

        let mut problem = ContrastiveProblem {
            names: Vec::new(),
            index: HashMap::new(),
            rows: Vec::new(),
            terms: Vec::new(),
        };
        for groups in extracted {
            if groups.is_empty() {
                continue;
            }
            let start = problem.rows.len();
            let mut center_end = start;
            for (g, group) in groups.into_iter().enumerate() {
                for fv in group {
                    let row = fv
                        .iter()
                        .map(|(name, value)| (problem.intern(name) as u32, value))
                        .collect();
                    problem.rows.push(row);
                }
                if g == 0 {
                    center_end = problem.rows.len();
                }
            }
            problem.terms.push(WordTerm {
                center: start..center_end,
                all: start..problem.rows.len(),
            });
        }
        problem
    }

    fn intern(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        let i = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), i);
        i
    }

    /// Feature names in index order.
    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    /// Number of words with a non-empty contrastive term.
    pub fn terms(&self) -> usize {
        self.terms.len()
    }

    /// Dense parameter vector holding the indexed entries of `weights`.
    pub fn project(&self, weights: &BTreeMap<String, f64>) -> Vec<f64> {
        self.names
            .iter()
            .map(|n| weights.get(n).copied().unwrap_or(0.0))
            .collect()
    }

    pub fn weights_from(&self, theta: &[f64]) -> BTreeMap<String, f64> {
        self.names
            .iter()
            .zip(theta)
            .filter(|(_, w)| **w != 0.0)
            .map(|(n, w)| (n.clone(), *w))
            .collect()
    }

    /// Unregularized contrastive log-likelihood.
    pub fn log_likelihood(&self, theta: &[f64]) -> f64 {
        self.evaluate(theta, false).0
    }

    /// Log-likelihood and, if requested, its gradient. Chunks are reduced in
    /// a fixed order, so results do not depend on the thread count.
    pub fn evaluate(&self, theta: &[f64], with_grad: bool) -> (f64, Option<Vec<f64>>) {
        let partials: Vec<(f64, HashMap<u32, f64>)> = self
            .terms
            .par_chunks(CHUNK)
            .map(|chunk| {
                let mut value = 0.0;
                let mut grad: HashMap<u32, f64> = HashMap::new();
                let mut scores = Vec::new();
                for term in chunk {
                    scores.clear();
                    scores.extend(self.rows[term.all.clone()].iter().map(|row| {
                        row.iter().map(|&(i, v)| theta[i as usize] * v).sum::<f64>()
                    }));
                    let n_center = term.center.len();
                    let lse_center = log_sum_exp(&scores[..n_center]);
                    let lse_all = log_sum_exp(&scores);
                    value += lse_center - lse_all;
                    if with_grad {
                        for (k, row) in self.rows[term.all.clone()].iter().enumerate() {
                            let mut coef = -(scores[k] - lse_all).exp();
                            if k < n_center {
                                coef += (scores[k] - lse_center).exp();
                            }
                            for &(i, v) in row {
                                *grad.entry(i).or_insert(0.0) += coef * v;
                            }
                        }
                    }
                }
                (value, grad)
            })
            .collect();

        let mut value = 0.0;
        let mut grad = with_grad.then(|| vec![0.0; self.dim()]);
        for (v, g) in partials {
            value += v;
            if let Some(grad) = grad.as_mut() {
                let mut keys: Vec<(u32, f64)> = g.into_iter().collect();
                keys.sort_unstable_by_key(|(i, _)| *i);
                for (i, x) in keys {
                    grad[i as usize] += x;
                }
            }
        }
        (value, grad)
    }
}

/// A trained model and the objective after each epoch (index 0 is the
/// starting point).
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: Model,
    pub trace: Vec<f64>,
}

/// Full-batch gradient ascent from zero weights on the `top_k` most frequent
/// words. The step for epoch `e` is `learning_rate · lr_decay^e`, applied to
/// the gradient averaged over training words.
pub fn train(resources: Arc<Resources>, config: TrainConfig) -> Result<TrainOutcome> {
    config.validate()?;
    let data: Vec<String> = resources.words.top(config.top_k).to_vec();
    let problem = ContrastiveProblem::build(&resources, &data);
    log::info!(
        "training on {} words ({} contrastive terms, {} features, {} rows)",
        data.len(),
        problem.terms(),
        problem.dim(),
        problem.rows.len()
    );
    let scale = 1.0 / data.len().max(1) as f64;
    let lambda = config.l2_lambda;
    let mut theta = vec![0.0; problem.dim()];
    let mut trace = Vec::with_capacity(config.epochs + 1);
    let mut step = config.learning_rate;
    for epoch in 0..config.epochs {
        let (ll, grad) = problem.evaluate(&theta, true);
        let grad = grad.unwrap_or_default();
        let objective = ll - lambda * theta.iter().map(|w| w * w).sum::<f64>();
        if !objective.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::Training {
                epoch,
                message: "non-finite objective or gradient".to_string(),
            });
        }
        trace.push(objective);
        for (w, g) in theta.iter_mut().zip(&grad) {
            *w += step * scale * (g - 2.0 * lambda * *w);
        }
        step *= config.lr_decay;
        log::debug!("epoch {epoch}: objective {objective:.6}");
    }
    let final_objective =
        problem.log_likelihood(&theta) - lambda * theta.iter().map(|w| w * w).sum::<f64>();
    if !final_objective.is_finite() {
        return Err(Error::Training {
            epoch: config.epochs,
            message: "non-finite objective".to_string(),
        });
    }
    trace.push(final_objective);
    let model = Model {
        weights: problem.weights_from(&theta),
        resources,
        config,
    };
    Ok(TrainOutcome { model, trace })
}
