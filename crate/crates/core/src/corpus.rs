//! Word list and embedding ingestion.
//!
//! Both resources are read once and are immutable afterwards. String lengths
//! are measured in `char`s everywhere in this crate.

use std::collections::{BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Frequency-ranked vocabulary.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WordList {
    entries: HashMap<String, u64>,
    ranked: Vec<String>,
    alphabet: BTreeSet<char>,
}

impl WordList {
    /// Builds a word list from `(word, count)` pairs. Duplicates are summed;
    /// empty words, words containing whitespace and zero counts are dropped.
    pub fn from_counts<I, S>(counts: I) -> Self
    where
        I: IntoIterator<Item = (S, u64)>,
        S: Into<String>,
    {
        let mut entries: HashMap<String, u64> = HashMap::new();
        for (word, count) in counts {
            let word = word.into();
            if count == 0 || word.is_empty() || word.chars().any(char::is_whitespace) {
                continue;
            }
            *entries.entry(word).or_insert(0) += count;
        }
        Self::from_entries(entries)
    }

    fn from_entries(entries: HashMap<String, u64>) -> Self {
        let mut ranked: Vec<String> = entries.keys().cloned().collect();
        ranked.sort_by(|a, b| entries[b].cmp(&entries[a]).then_with(|| a.cmp(b)));
        let alphabet = entries.keys().flat_map(|w| w.chars()).collect();
        WordList {
            entries,
            ranked,
            alphabet,
        }
    }

    /// Parses the `word` / `word<TAB>count` format. `origin` only labels errors.
    pub fn read<R: BufRead>(reader: R, min_count: u64, origin: &Path) -> Result<Self> {
        let mut entries: HashMap<String, u64> = HashMap::new();
        for (idx, line) in reader.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.map_err(|e| Error::io(origin, e))?;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let (word, count) = match line.split_once('\t') {
                Some((word, count)) => {
                    let count = count.trim().parse::<u64>().map_err(|_| {
                        Error::parse(origin, lineno, format!("malformed count {:?}", count))
                    })?;
                    (word.trim(), count)
                }
                None => (line.trim(), 1),
            };
            if word.is_empty() || word.chars().any(char::is_whitespace) {
                return Err(Error::parse(
                    origin,
                    lineno,
                    format!("invalid word {:?}", word),
                ));
            }
            *entries.entry(word.to_string()).or_insert(0) += count;
        }
        entries.retain(|_, c| *c >= min_count.max(1));
        Ok(Self::from_entries(entries))
    }

    /// Writes the list in ranked order as `word<TAB>count` lines.
    pub fn write<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for word in &self.ranked {
            writeln!(out, "{}\t{}", word, self.entries[word])?;
        }
        Ok(())
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains_key(word)
    }

    pub fn count(&self, word: &str) -> Option<u64> {
        self.entries.get(word).copied()
    }

    /// Words by descending count, ties lexicographic.
    pub fn ranked(&self) -> &[String] {
        &self.ranked
    }

    pub fn top(&self, k: usize) -> &[String] {
        &self.ranked[..k.min(self.ranked.len())]
    }

    /// Every character occurring in some word.
    pub fn alphabet(&self) -> &BTreeSet<char> {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.ranked.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranked.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> + '_ {
        self.ranked.iter().map(move |w| (w.as_str(), self.entries[w]))
    }
}

pub fn load_wordlist(path: impl AsRef<Path>, min_count: u64) -> Result<WordList> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    WordList::read(BufReader::new(file), min_count, path)
}

/// Dense word vectors read from word2vec text format.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    vectors: HashMap<String, Vec<f64>>,
}

impl EmbeddingTable {
    /// An empty table of the given dimensionality.
    pub fn new(dim: usize) -> Self {
        EmbeddingTable {
            dim,
            vectors: HashMap::new(),
        }
    }

    /// Inserts a vector, replacing any earlier one for the same word.
    pub fn insert(&mut self, word: impl Into<String>, vector: Vec<f64>) -> Result<()> {
        if vector.len() != self.dim {
            return Err(Error::Contract(format!(
                "vector has {} components, table dimension is {}",
                vector.len(),
                self.dim
            )));
        }
        self.vectors.insert(word.into(), vector);
        Ok(())
    }

    pub fn read<R: BufRead>(reader: R, origin: &Path) -> Result<Self> {
        let mut lines = reader.lines().enumerate();
        let header = loop {
            match lines.next() {
                Some((idx, line)) => {
                    let line = line.map_err(|e| Error::io(origin, e))?;
                    if !line.trim().is_empty() {
                        break (idx + 1, line);
                    }
                }
                None => return Err(Error::parse(origin, 1, "missing `<count> <dim>` header")),
            }
        };
        let fields: Vec<&str> = header.1.split_whitespace().collect();
        let dim = match fields.as_slice() {
            [count, dim] => {
                count.parse::<usize>().map_err(|_| {
                    Error::parse(origin, header.0, format!("malformed word count {:?}", count))
                })?;
                dim.parse::<usize>()
                    .ok()
                    .filter(|&d| d > 0)
                    .ok_or_else(|| {
                        Error::parse(origin, header.0, format!("malformed dimension {:?}", dim))
                    })?
            }
            _ => {
                return Err(Error::parse(
                    origin,
                    header.0,
                    "header must be `<count> <dim>`",
                ))
            }
        };

        let mut table = EmbeddingTable::new(dim);
        for (idx, line) in lines {
            let lineno = idx + 1;
            let line = line.map_err(|e| Error::io(origin, e))?;
            let mut fields = line.split_whitespace();
            let Some(word) = fields.next() else {
                continue;
            };
            let vector = fields
                .map(|tok| {
                    tok.parse::<f64>().map_err(|_| {
                        Error::parse(origin, lineno, format!("non-numeric component {:?}", tok))
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            if vector.len() != dim {
                return Err(Error::parse(
                    origin,
                    lineno,
                    format!("expected {} components, found {}", dim, vector.len()),
                ));
            }
            table.vectors.insert(word.to_string(), vector);
        }
        Ok(table)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.vectors.get(word).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Cosine similarity of two words, `None` if either vector is missing or zero.
    pub fn similarity(&self, a: &str, b: &str) -> Option<f64> {
        cosine(self.get(a)?, self.get(b)?)
    }
}

pub fn load_embeddings(path: impl AsRef<Path>) -> Result<EmbeddingTable> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    EmbeddingTable::read(BufReader::new(file), path)
}

/// Cosine similarity. Returns `None` when either vector has zero norm or the
/// lengths differ.
pub fn cosine(a: &[f64], b: &[f64]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let (mut dot, mut na, mut nb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return None;
    }
    Some((dot / (na.sqrt() * nb.sqrt())).clamp(-1.0, 1.0))
}
