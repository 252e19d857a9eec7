//! Sample sets, prefix closure, and counter maps — the passive-learning input.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::alphabet::{llex_compare, Alphabet, Word};
use crate::{Error, Result};

/// Positive and negative example words.
///
/// Construction enforces consistency: no word may be both positive and
/// negative. Within each side, duplicates collapse.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SampleSet {
    positives: Vec<Word>,
    negatives: Vec<Word>,
}

impl SampleSet {
    /// Builds a sample set, deduplicating each side and rejecting overlap.
    pub fn new(
        positives: impl IntoIterator<Item = Word>,
        negatives: impl IntoIterator<Item = Word>,
    ) -> Result<SampleSet> {
        let positives: BTreeSet<Word> = positives.into_iter().collect();
        let negatives: BTreeSet<Word> = negatives.into_iter().collect();
        if let Some(w) = positives.intersection(&negatives).next() {
            return Err(Error::Inconsistent(format!(
                "word {w:?} appears as both a positive and a negative sample"
            )));
        }
        let mut positives: Vec<Word> = positives.into_iter().collect();
        let mut negatives: Vec<Word> = negatives.into_iter().collect();
        positives.sort_by(|u, v| llex_compare(u, v));
        negatives.sort_by(|u, v| llex_compare(u, v));
        Ok(SampleSet { positives, negatives })
    }

    /// Positive words, in increasing llex order.
    pub fn positives(&self) -> &[Word] {
        &self.positives
    }

    /// Negative words, in increasing llex order.
    pub fn negatives(&self) -> &[Word] {
        &self.negatives
    }

    /// All sample words (positives then negatives).
    pub fn all_words(&self) -> impl Iterator<Item = &Word> {
        self.positives.iter().chain(self.negatives.iter())
    }

    /// Total number of sample words.
    pub fn len(&self) -> usize {
        self.positives.len() + self.negatives.len()
    }

    /// True iff both sides are empty.
    pub fn is_empty(&self) -> bool {
        self.positives.is_empty() && self.negatives.is_empty()
    }

    /// True iff `w` is a positive sample.
    pub fn is_positive(&self, w: &[u32]) -> bool {
        self.positives.iter().any(|p| p == w)
    }

    /// True iff `w` is a negative sample.
    pub fn is_negative(&self, w: &[u32]) -> bool {
        self.negatives.iter().any(|n| n == w)
    }
}

/// The prefix closure of a word set: every prefix of every input word,
/// including ε and the words themselves, in increasing llex order.
///
/// The prefix closure of the empty set is empty (callers seed ε explicitly
/// when they need it).
pub fn prefixes<'a>(words: impl IntoIterator<Item = &'a Word>) -> Vec<Word> {
    let mut set: HashSet<Word> = HashSet::new();
    for w in words {
        for i in 0..=w.len() {
            set.insert(w[..i].to_vec());
        }
    }
    let mut out: Vec<Word> = set.into_iter().collect();
    out.sort_by(|u, v| llex_compare(u, v));
    out
}

/// Counter-effect values for every prefix of a sample: the function
/// `ce: pref(S) → ℕ`.
///
/// Stores absolute counter values; per-letter deltas are derived by
/// subtraction where needed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CounterMap {
    map: HashMap<Word, u64>,
}

impl CounterMap {
    /// Builds a counter map from `(word, value)` pairs, rejecting duplicate
    /// words with conflicting values.
    pub fn new(entries: impl IntoIterator<Item = (Word, u64)>) -> Result<CounterMap> {
        let mut map = HashMap::new();
        for (w, v) in entries {
            if let Some(&old) = map.get(&w) {
                if old != v {
                    return Err(Error::Input(format!(
                        "conflicting counter values {old} and {v} for the same word"
                    )));
                }
            }
            map.insert(w, v);
        }
        Ok(CounterMap { map })
    }

    /// The value for `w`, if present.
    pub fn get(&self, w: &[u32]) -> Option<u64> {
        self.map.get(w).copied()
    }

    /// Inserts or overwrites one entry.
    pub fn insert(&mut self, w: Word, v: u64) {
        self.map.insert(w, v);
    }

    /// Number of entries.
    pub fn len(&self) -> usize {
        self.map.len()
    }

    /// True iff no entries.
    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Iterates over entries in unspecified order.
    pub fn iter(&self) -> impl Iterator<Item = (&Word, u64)> {
        self.map.iter().map(|(w, &v)| (w, v))
    }

    /// Validates this map as a counter function on `pref(S)` for the given
    /// sample:
    ///
    /// * defined on every prefix of every sample word;
    /// * `ce(ε) = 0`;
    /// * consecutive prefixes differ by at most one;
    /// * a decrement only happens from a positive value (which is implied
    ///   by non-negativity, but checked structurally: `ce(wσ) = ce(w) − 1`
    ///   requires `ce(w) > 0`).
    pub fn validate(&self, sample: &SampleSet) -> Result<()> {
        for p in prefixes(sample.all_words()) {
            let v = self.get(&p).ok_or_else(|| {
                Error::Input(format!(
                    "counter map is missing prefix {p:?} of the sample"
                ))
            })?;
            if p.is_empty() {
                if v != 0 {
                    return Err(Error::Input(format!("ce(ε) must be 0, got {v}")));
                }
            } else {
                let parent = &p[..p.len() - 1];
                let pv = self.get(parent).ok_or_else(|| {
                    Error::Input(format!("counter map is missing prefix {parent:?}"))
                })?;
                let diff = v as i64 - pv as i64;
                if !(-1..=1).contains(&diff) {
                    return Err(Error::Input(format!(
                        "counter step from {pv} to {v} exceeds one between consecutive prefixes"
                    )));
                }
                if diff == -1 && pv == 0 {
                    return Err(Error::Input(
                        "counter map decrements from zero".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Entries sorted in llex order of the words — handy for deterministic
    /// serialization and enumeration.
    pub fn sorted_entries(&self) -> Vec<(Word, u64)> {
        let mut v: Vec<(Word, u64)> = self.map.iter().map(|(w, &c)| (w.clone(), c)).collect();
        v.sort_by(|(a, _), (b, _)| llex_compare(a, b));
        v
    }
}

/// Convenience: parse many words in the concatenated single-character
/// syntax against one alphabet.
pub fn parse_words(alpha: &Alphabet, texts: &[&str]) -> Result<Vec<Word>> {
    texts.iter().map(|t| alpha.parse_word(t)).collect()
}
