//! Plain-text model files.
//!
//! ```text
//! morphchain-model v1
//! learning_rate=0.05,epochs=50,...,wordlist=/data/words.tsv
//! [weights]
//! affix:Suffix:lar<TAB>0.4231
//! [suffixes]
//! lar<TAB>812
//! [prefixes]
//! ...
//! [correlations]
//! suffix da de<TAB>17
//! ```
//!
//! Every section is written in lexicographic key order. Floats use Rust's
//! shortest round-trip formatting, so reading a file back is exact.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::candgen::Side;
use crate::corpus::{load_embeddings, load_wordlist, EmbeddingTable, WordList};
use crate::error::{Error, Result};
use crate::features::{AffixLexicon, CorrelationTable};
use crate::model::{Model, ResourceConfig, Resources, TrainConfig};

pub const MODEL_HEADER: &str = "morphchain-model v1";

/// The serialized part of a model: everything except the word list and the
/// embedding table, which are referenced by path.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub weights: BTreeMap<String, f64>,
    pub lexicon: AffixLexicon,
    pub correlations: CorrelationTable,
    pub train: TrainConfig,
    pub resources: ResourceConfig,
}

impl ModelFile {
    pub fn of(model: &Model) -> Self {
        ModelFile {
            weights: model.weights.clone(),
            lexicon: model.resources.lexicon.clone(),
            correlations: model.resources.correlations.clone(),
            train: model.config.clone(),
            resources: model.resources.config.clone(),
        }
    }

    /// Attaches a word list and embeddings, yielding a usable model.
    pub fn into_model(self, words: WordList, embeddings: EmbeddingTable) -> Model {
        let resources = Resources {
            words,
            embeddings,
            lexicon: self.lexicon,
            correlations: self.correlations,
            config: self.resources,
        };
        Model {
            weights: self.weights,
            resources: Arc::new(resources),
            config: self.train,
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(MODEL_HEADER);
        out.push('\n');
        out.push_str(&self.config_line());
        out.push('\n');
        out.push_str("[weights]\n");
        for (name, w) in &self.weights {
            let _ = writeln!(out, "{name}\t{w}");
        }
        out.push_str("[suffixes]\n");
        for (affix, c) in &self.lexicon.suffixes {
            let _ = writeln!(out, "{affix}\t{c}");
        }
        out.push_str("[prefixes]\n");
        for (affix, c) in &self.lexicon.prefixes {
            let _ = writeln!(out, "{affix}\t{c}");
        }
        out.push_str("[correlations]\n");
        for (side, a, b, c) in self.correlations.pairs() {
            let side = if side == Side::Prefix { "prefix" } else { "suffix" };
            let _ = writeln!(out, "{side} {a} {b}\t{c}");
        }
        out
    }

    fn config_line(&self) -> String {
        let t = &self.train;
        let r = &self.resources;
        let mut fields = vec![
            format!("learning_rate={}", t.learning_rate),
            format!("epochs={}", t.epochs),
            format!("l2_lambda={}", t.l2_lambda),
            format!("top_k={}", t.top_k),
            format!("seed={}", t.seed),
            format!("lr_decay={}", t.lr_decay),
            format!("min_count={}", r.min_count),
            format!("affix_threshold={}", r.affix_threshold),
            format!("top_affixes={}", r.top_affixes),
            format!("min_shared={}", r.min_shared),
        ];
        if let Some(p) = &r.wordlist {
            fields.push(format!("wordlist={}", escape(&p.to_string_lossy())));
        }
        if let Some(p) = &r.embeddings {
            fields.push(format!("embeddings={}", escape(&p.to_string_lossy())));
        }
        fields.join(",")
    }

    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h == MODEL_HEADER => {}
            Some((_, h)) => {
                return Err(Error::Format(format!(
                    "{}: expected header {MODEL_HEADER:?}, found {h:?}",
                    origin.display()
                )))
            }
            None => {
                return Err(Error::Format(format!("{}: empty model file", origin.display())))
            }
        }
        let (_, config) = lines
            .next()
            .ok_or_else(|| Error::parse(origin, 2, "missing configuration line"))?;
        let (train, resources) = parse_config(config, origin)?;

        let mut file = ModelFile {
            weights: BTreeMap::new(),
            lexicon: AffixLexicon {
                threshold: resources.affix_threshold,
                ..AffixLexicon::default()
            },
            correlations: CorrelationTable::default(),
            train,
            resources,
        };
        let mut pairs = Vec::new();
        let mut section: Option<&str> = None;
        for (idx, line) in lines {
            let lineno = idx + 1;
            if line.is_empty() {
                continue;
            }
            if line.starts_with('[') && line.ends_with(']') {
                let name = &line[1..line.len() - 1];
                if !["weights", "suffixes", "prefixes", "correlations"].contains(&name) {
                    return Err(Error::parse(origin, lineno, format!("unknown section {line}")));
                }
                section = Some(name);
                continue;
            }
            let (key, value) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(origin, lineno, "expected `name<TAB>value`"))?;
            let count = || {
                value
                    .parse::<u64>()
                    .map_err(|_| Error::parse(origin, lineno, format!("bad count {value:?}")))
            };
            match section {
                Some("weights") => {
                    let w = value
                        .parse::<f64>()
                        .ok()
                        .filter(|w| w.is_finite())
                        .ok_or_else(|| {
                            Error::parse(origin, lineno, format!("bad weight {value:?}"))
                        })?;
                    file.weights.insert(key.to_string(), w);
                }
                Some("suffixes") => {
                    file.lexicon.suffixes.insert(key.to_string(), count()?);
                }
                Some("prefixes") => {
                    file.lexicon.prefixes.insert(key.to_string(), count()?);
                }
                Some("correlations") => {
                    let parts: Vec<&str> = key.split(' ').collect();
                    let side = match parts.first() {
                        Some(&"suffix") => Side::Suffix,
                        Some(&"prefix") => Side::Prefix,
                        _ => return Err(Error::parse(origin, lineno, "bad correlation side")),
                    };
                    if parts.len() != 3 {
                        return Err(Error::parse(origin, lineno, "expected `side a b`"));
                    }
                    pairs.push((side, parts[1].to_string(), parts[2].to_string(), count()?));
                }
                _ => return Err(Error::parse(origin, lineno, "entry outside a section")),
            }
        }
        file.correlations = CorrelationTable::from_pairs(pairs);
        Ok(file)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '%' | ',' | '=' | '\n' | '\r' | '\t' => {
                let _ = write!(out, "%{:02X}", c as u32);
            }
            c => out.push(c),
        }
    }
    out
}

fn unescape(s: &str) -> Option<String> {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c == '%' {
            let hex: String = chars.by_ref().take(2).collect();
            out.push(char::from(u8::from_str_radix(&hex, 16).ok()?));
        } else {
            out.push(c);
        }
    }
    Some(out)
}

fn parse_config(line: &str, origin: &Path) -> Result<(TrainConfig, ResourceConfig)> {
    let mut train = TrainConfig::default();
    let mut res = ResourceConfig::default();
    let err = |msg: String| Error::parse(origin, 2, msg);
    for field in line.split(',').filter(|f| !f.is_empty()) {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| err(format!("expected key=value, found {field:?}")))?;
        let bad = || err(format!("bad value for {key}: {value:?}"));
        macro_rules! num {
            ($t:ty) => {
                value.parse::<$t>().map_err(|_| bad())?
            };
        }
        match key {
            "learning_rate" => train.learning_rate = num!(f64),
            "epochs" => train.epochs = num!(usize),
            "l2_lambda" => train.l2_lambda = num!(f64),
            "top_k" => train.top_k = num!(usize),
            "seed" => train.seed = num!(u64),
            "lr_decay" => train.lr_decay = num!(f64),
            "min_count" => res.min_count = num!(u64),
            "affix_threshold" => res.affix_threshold = num!(u64),
            "top_affixes" => res.top_affixes = num!(usize),
            "min_shared" => res.min_shared = num!(u64),
            "wordlist" => res.wordlist = Some(PathBuf::from(unescape(value).ok_or_else(bad)?)),
            "embeddings" => {
                res.embeddings = Some(PathBuf::from(unescape(value).ok_or_else(bad)?))
            }
            _ => return Err(err(format!("unknown configuration key {key:?}"))),
        }
    }
    Ok((train, res))
}

pub fn save_model(model: &Model, path: impl AsRef<Path>) -> Result<()> {
    ModelFile::of(model).write(path)
}

/// Loads a model, reloading the word list and embeddings from the paths
/// recorded at training time.
pub fn load_model(path: impl AsRef<Path>) -> Result<Model> {
    load_model_from(path, None, None)
}

/// Loads a model, optionally overriding the recorded resource paths.
pub fn load_model_from(
    path: impl AsRef<Path>,
    wordlist: Option<&Path>,
    embeddings: Option<&Path>,
) -> Result<Model> {
    let file = ModelFile::read(path.as_ref())?;
    let missing = |what: &str| {
        Error::Format(format!(
            "{}: no {what} path recorded; supply one explicitly",
            path.as_ref().display()
        ))
    };
    let wl_path = wordlist
        .map(Path::to_path_buf)
        .or_else(|| file.resources.wordlist.clone())
        .ok_or_else(|| missing("word list"))?;
    let emb_path = embeddings
        .map(Path::to_path_buf)
        .or_else(|| file.resources.embeddings.clone())
        .ok_or_else(|| missing("embeddings"))?;
    let words = load_wordlist(&wl_path, file.resources.min_count)?;
    let emb = load_embeddings(&emb_path)?;
    Ok(file.into_model(words, emb))
}

/// Loads a model against in-memory resources.
pub fn load_model_with(path: impl AsRef<Path>, words: WordList, embeddings: EmbeddingTable) -> Result<Model> {
    Ok(ModelFile::read(path)?.into_model(words, embeddings))
}
