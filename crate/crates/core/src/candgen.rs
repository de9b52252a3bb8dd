//! Recursive candidate generation and contrastive neighborhoods.
//!
//! A word's candidates are the parents reachable by repeatedly stripping
//! suffixes of at most [`MAX_AFFIX_LEN`] characters, where every parent keeps
//! at least half the length of the string it was stripped from and only
//! strings longer than two characters are split further. Every reachable
//! string also proposes its short right-hand substrings as prefix-side
//! parents, which are never split further.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::corpus::WordList;
use crate::error::{Error, Result};

/// Longest affix stripped in a single step.
pub const MAX_AFFIX_LEN: usize = 4;

/// Strings of this length or shorter are not split on the suffix side.
pub const MIN_SPLIT_LEN: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Suffix,
    Prefix,
    Stop,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Suffix => "Suffix",
            Side::Prefix => "Prefix",
            Side::Stop => "Stop",
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Stem change between the surface stem and the proposed parent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Transformation {
    None,
    /// Surface stem doubles its final character: `runn|ing` → `run`.
    Repeat(char),
    /// Parent ends in a character dropped from the surface: `delet|ing` → `delete`.
    Delete(char),
    /// Parent's final character is replaced on the surface.
    Modify(char),
}

impl fmt::Display for Transformation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Transformation::None => f.write_str("none"),
            Transformation::Repeat(c) => write!(f, "repeat({c})"),
            Transformation::Delete(c) => write!(f, "delete({c})"),
            Transformation::Modify(c) => write!(f, "modify({c})"),
        }
    }
}

/// A proposed parent of a word.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Candidate {
    pub parent: String,
    pub side: Side,
    pub transformation: Transformation,
    /// Suffixes stripped on the way down, outermost first. For prefix-side
    /// candidates this is the path to the string the prefix was split from.
    pub affix_chain: Vec<String>,
    /// Trailing residue (suffix side) or leading residue (prefix side).
    pub surface_affix: String,
}

impl Candidate {
    pub fn stop(word: &str) -> Self {
        Candidate {
            parent: word.to_string(),
            side: Side::Stop,
            transformation: Transformation::None,
            affix_chain: Vec::new(),
            surface_affix: String::new(),
        }
    }

    pub fn is_stop(&self) -> bool {
        self.side == Side::Stop
    }

    /// Whether the candidate comes from a single split of the word itself.
    pub fn is_first_level(&self) -> bool {
        match self.side {
            Side::Suffix => self.affix_chain.len() == 1,
            Side::Prefix => self.affix_chain.is_empty(),
            Side::Stop => false,
        }
    }

    fn chain_len(&self) -> usize {
        self.affix_chain.iter().map(|a| a.chars().count()).sum()
    }

    /// Interior split positions (in chars) this candidate asserts on a word of
    /// `word_len` characters, ascending.
    pub fn boundaries(&self, word_len: usize) -> Vec<usize> {
        let mut out = Vec::new();
        if self.side == Side::Stop {
            return out;
        }
        let mut pos = word_len;
        for affix in &self.affix_chain {
            pos -= affix.chars().count();
            out.push(pos);
        }
        if self.side == Side::Prefix {
            out.push(self.surface_affix.chars().count());
        }
        out.retain(|&p| p > 0 && p < word_len);
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Length of the surface string left once the suffix chain is removed.
    pub fn surface_stem_len(&self, word_len: usize) -> usize {
        word_len - self.chain_len()
    }

    /// Checks that the candidate is a structurally valid parent proposal for `word`.
    pub fn validate(&self, word: &str) -> Result<()> {
        let bad = |why: &str| {
            Err(Error::Contract(format!(
                "candidate {:?}/{} is not a candidate of {:?}: {}",
                self.parent, self.side, word, why
            )))
        };
        if self.side == Side::Stop {
            if self.parent != word
                || !self.affix_chain.is_empty()
                || !self.surface_affix.is_empty()
                || self.transformation != Transformation::None
            {
                return bad("malformed stop candidate");
            }
            return Ok(());
        }
        if self.parent.is_empty() || self.parent == word {
            return bad("parent must be a non-empty string other than the word");
        }
        if self
            .affix_chain
            .iter()
            .any(|a| a.is_empty() || a.chars().count() > MAX_AFFIX_LEN)
        {
            return bad("chain affix length out of range");
        }
        let tail: String = self.affix_chain.iter().rev().map(String::as_str).collect();
        let Some(stem) = word.strip_suffix(tail.as_str()) else {
            return bad("affix chain does not match the word ending");
        };
        match self.side {
            Side::Suffix => {
                if self.affix_chain.is_empty() || self.surface_affix != tail || stem.is_empty() {
                    return bad("suffix residue mismatch");
                }
                let ok = match self.transformation {
                    Transformation::None => self.parent == stem,
                    Transformation::Repeat(c) => {
                        self.parent.ends_with(c)
                            && stem.strip_suffix(c) == Some(self.parent.as_str())
                    }
                    Transformation::Delete(c) => {
                        self.parent.strip_suffix(c) == Some(stem) && !tail.starts_with(c)
                    }
                    Transformation::Modify(c) => {
                        let mut p = self.parent.chars();
                        let mut s = stem.chars();
                        p.next_back() == Some(c)
                            && s.next_back().is_some_and(|x| x != c)
                            && p.as_str() == s.as_str()
                    }
                };
                if !ok {
                    return bad("transformation does not relate parent to surface stem");
                }
            }
            Side::Prefix => {
                if self.transformation != Transformation::None
                    || self.surface_affix.is_empty()
                    || stem.strip_prefix(self.surface_affix.as_str()) != Some(self.parent.as_str())
                {
                    return bad("prefix residue mismatch");
                }
            }
            Side::Stop => unreachable!(),
        }
        Ok(())
    }
}

/// Minimal-length suffix chains from the whole word down to each reachable
/// prefix length. Index `l` holds the chains reaching `chars[..l]`; an empty
/// entry means unreachable.
fn reachable_chains(chars: &[char]) -> Vec<Vec<Vec<String>>> {
    let n = chars.len();
    let mut reach: Vec<Vec<Vec<String>>> = vec![Vec::new(); n + 1];
    reach[n].push(Vec::new());
    for host in (MIN_SPLIT_LEN + 1..=n).rev() {
        if reach[host].is_empty() {
            continue;
        }
        let depth = reach[host][0].len() + 1;
        let lo = host.saturating_sub(MAX_AFFIX_LEN).max(1);
        for len in lo..host {
            if 2 * len < host {
                continue;
            }
            let affix: String = chars[len..host].iter().collect();
            let extended: Vec<Vec<String>> = reach[host]
                .iter()
                .map(|chain| {
                    let mut chain = chain.clone();
                    chain.push(affix.clone());
                    chain
                })
                .collect();
            match reach[len].first().map(Vec::len) {
                Some(d) if d < depth => {}
                Some(d) if d == depth => reach[len].extend(extended),
                _ => reach[len] = extended,
            }
        }
    }
    reach
}

/// Candidates of `word` without vocabulary-dependent transformations.
pub fn generate_candidates(word: &str) -> Vec<Candidate> {
    generate_candidates_with(word, None)
}

/// Candidates of `word`. With a vocabulary, delete and modify parents that
/// are vocabulary members are proposed at every suffix split point.
///
/// Candidates sharing `(parent, side, transformation)` keep only the
/// minimal-length affix chains. The stop candidate is always included. Output
/// is sorted and free of duplicates.
pub fn generate_candidates_with(word: &str, vocab: Option<&WordList>) -> Vec<Candidate> {
    let chars: Vec<char> = word.chars().collect();
    let n = chars.len();
    let text = |a: usize, b: usize| chars[a..b].iter().collect::<String>();
    let reach = reachable_chains(&chars);

    let mut found: Vec<Candidate> = Vec::new();
    for len in 1..n {
        if reach[len].is_empty() {
            continue;
        }
        let stem = text(0, len);
        let residue = text(len, n);
        let mut parents = vec![(stem.clone(), Transformation::None)];
        if len >= 2 && chars[len - 1] == chars[len - 2] {
            parents.push((text(0, len - 1), Transformation::Repeat(chars[len - 1])));
        }
        if let Some(vocab) = vocab {
            let head = text(0, len - 1);
            for &c in vocab.alphabet() {
                let mut deleted = stem.clone();
                deleted.push(c);
                // a genuine deletion drops `c` from the surface
                if c != chars[len] && vocab.contains(&deleted) {
                    parents.push((deleted, Transformation::Delete(c)));
                }
                if c != chars[len - 1] {
                    let mut modified = head.clone();
                    modified.push(c);
                    if vocab.contains(&modified) {
                        parents.push((modified, Transformation::Modify(c)));
                    }
                }
            }
        }
        for (parent, transformation) in parents {
            for chain in &reach[len] {
                found.push(Candidate {
                    parent: parent.clone(),
                    side: Side::Suffix,
                    transformation,
                    affix_chain: chain.clone(),
                    surface_affix: residue.clone(),
                });
            }
        }
    }

    for host in 1..=n {
        if reach[host].is_empty() {
            continue;
        }
        let lo = host.saturating_sub(MAX_AFFIX_LEN).max(1);
        for start in lo..host {
            if 2 * (host - start) < host {
                continue;
            }
            for chain in &reach[host] {
                found.push(Candidate {
                    parent: text(start, host),
                    side: Side::Prefix,
                    transformation: Transformation::None,
                    affix_chain: chain.clone(),
                    surface_affix: text(0, start),
                });
            }
        }
    }

    let mut groups: BTreeMap<(String, Side, Transformation), Vec<Candidate>> = BTreeMap::new();
    for cand in found {
        groups
            .entry((cand.parent.clone(), cand.side, cand.transformation))
            .or_default()
            .push(cand);
    }
    let mut out: Vec<Candidate> = Vec::new();
    for (_, group) in groups {
        let shortest = group.iter().map(|c| c.affix_chain.len()).min().unwrap_or(0);
        out.extend(group.into_iter().filter(|c| c.affix_chain.len() == shortest));
    }
    out.push(Candidate::stop(word));
    out.sort();
    out.dedup();
    out
}

/// Contrastive neighborhood of a word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Neighborhood {
    pub center: String,
    pub members: BTreeSet<String>,
}

/// All distinct strings obtained by swapping two adjacent characters, minus
/// the word itself. Words shorter than two characters get no neighbors.
pub fn generate_neighbors(word: &str) -> Neighborhood {
    let chars: Vec<char> = word.chars().collect();
    let mut members = BTreeSet::new();
    for i in 0..chars.len().saturating_sub(1) {
        if chars[i] == chars[i + 1] {
            continue;
        }
        let mut swapped = chars.clone();
        swapped.swap(i, i + 1);
        members.insert(swapped.into_iter().collect::<String>());
    }
    members.remove(word);
    Neighborhood {
        center: word.to_string(),
        members,
    }
}
