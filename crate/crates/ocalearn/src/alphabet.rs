//! Alphabets, words, and the length-lexicographic order.
//!
//! A [`Alphabet`] fixes a finite set of letters together with a total order
//! on them (the order in which the letters were supplied). Letters are
//! represented everywhere as dense indices into that alphabet, so the fixed
//! order on letters is simply the numeric order on indices, and the
//! length-lexicographic comparisons below need no alphabet handle.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use crate::{Error, Result};

/// A letter, as an index into its [`Alphabet`].
pub type Letter = u32;

/// A word: a finite sequence of letters.
pub type Word = Vec<Letter>;

/// A finite, ordered, duplicate-free set of letters.
///
/// The supplied order of the names is the fixed total order `≺` used by all
/// lexicographic comparisons; it must stay stable for the lifetime of any
/// computation referring to this alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    /// Builds an alphabet from letter names in order.
    ///
    /// Fails on an empty list, an empty name, or a duplicate name.
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Alphabet> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::Input("alphabet must be non-empty".into()));
        }
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() {
                return Err(Error::Input("alphabet letter name must be non-empty".into()));
            }
            if n.chars().any(char::is_whitespace) {
                return Err(Error::Input(format!(
                    "alphabet letter {n:?} must not contain whitespace"
                )));
            }
            if names[..i].contains(n) {
                return Err(Error::Input(format!("duplicate alphabet letter {n:?}")));
            }
        }
        Ok(Alphabet { names })
    }

    /// The first `k` lowercase Latin letters (`a`, `b`, …), the naming used
    /// by the random generators.
    pub fn latin(k: usize) -> Result<Alphabet> {
        if k == 0 || k > 26 {
            return Err(Error::Input(format!(
                "latin alphabet size must be in 1..=26, got {k}"
            )));
        }
        Alphabet::new((0..k).map(|i| ((b'a' + i as u8) as char).to_string()))
    }

    /// Number of letters.
    pub fn len(&self) -> usize {
        self.names.len()
    }

    /// Always false: alphabets are non-empty by construction.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Iterator over all letters in `≺` order.
    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        0..self.len() as Letter
    }

    /// Display name of a letter.
    pub fn name(&self, l: Letter) -> &str {
        &self.names[l as usize]
    }

    /// Looks a letter up by name.
    pub fn index_of(&self, name: &str) -> Option<Letter> {
        self.names.iter().position(|n| n == name).map(|i| i as Letter)
    }

    /// True iff every name is a single character, which is what the
    /// concatenated word syntax of sample files requires.
    pub fn single_char(&self) -> bool {
        self.names.iter().all(|n| n.chars().count() == 1)
    }

    /// Renders a word using this alphabet's letter names, `@eps` for ε.
    pub fn format_word(&self, w: &[Letter]) -> String {
        if w.is_empty() {
            return "@eps".to_string();
        }
        w.iter().map(|&l| self.name(l)).collect()
    }

    /// Parses a word in the concatenated single-character syntax
    /// (`@eps` for ε). Fails if the alphabet has multi-character letter
    /// names or the text contains a foreign character.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        if text == "@eps" {
            return Ok(Vec::new());
        }
        if !self.single_char() {
            return Err(Error::Input(
                "word syntax requires single-character letter names".into(),
            ));
        }
        text.chars()
            .map(|c| {
                self.index_of(&c.to_string()).ok_or_else(|| {
                    Error::Input(format!("letter {c:?} is not in the alphabet"))
                })
            })
            .collect()
    }

    /// Checks that every letter of `w` belongs to this alphabet.
    pub fn check_word(&self, w: &[Letter]) -> Result<()> {
        match w.iter().find(|&&l| l as usize >= self.len()) {
            None => Ok(()),
            Some(&l) => Err(Error::Input(format!(
                "letter index {l} is outside the {}-letter alphabet",
                self.len()
            ))),
        }
    }

    /// Wraps the alphabet for cheap sharing between machines.
    pub fn into_arc(self) -> Arc<Alphabet> {
        Arc::new(self)
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.names.join(" "))
    }
}

/// Length-lexicographic comparison: shorter words first, ties broken
/// lexicographically by the letter order `≺` (numeric index order).
pub fn llex_compare(u: &[Letter], v: &[Letter]) -> Ordering {
    u.len().cmp(&v.len()).then_with(|| u.cmp(v))
}

/// Length-lexicographic comparison of word pairs: lexicographic on the
/// components, each compared by [`llex_compare`].
pub fn llex_pair_compare(a: (&[Letter], &[Letter]), b: (&[Letter], &[Letter])) -> Ordering {
    llex_compare(a.0, b.0).then_with(|| llex_compare(a.1, b.1))
}

/// Sorts words in increasing llex order (stable, duplicates preserved).
pub fn llex_sort(words: &mut [Word]) {
    words.sort_by(|u, v| llex_compare(u, v));
}
