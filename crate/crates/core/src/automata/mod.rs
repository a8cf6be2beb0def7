//! Regular expressions and finite automata over dense symbol alphabets.
//!
//! Symbols are integers `0..alphabet.len()`; the alphabet only carries
//! display names. Tag alphabets, nonterminal alphabets and state alphabets
//! all go through the same machinery.

mod dfa;
mod nfa;
mod regex;

use std::fmt;
use std::sync::Arc;

pub use dfa::{BoolOp, Dfa};
pub use nfa::Nfa;
pub use regex::Regex;

/// Ordered list of symbol names.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Alphabet(Arc<[String]>);

impl Alphabet {
    pub fn new<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Alphabet(names.into_iter().map(Into::into).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn name(&self, symbol: usize) -> &str {
        &self.0[symbol]
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }

    /// Formats a word over this alphabet, `~e~` for the empty word.
    pub fn format_word(&self, word: &[usize]) -> String {
        if word.is_empty() {
            return "~e~".to_string();
        }
        word.iter()
            .map(|&s| self.name(s))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}
