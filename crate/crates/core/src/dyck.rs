//! Tag alphabets, tagged words and the Dyck machinery on them.
//!
//! A word over `T = A ∪ Ā` is written in token notation: an opening tag is
//! its bare name (`a`), a closing tag carries a slash (`/a`), tokens are
//! separated by whitespace and `~e~` stands for the empty word.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// An ordered set of tag names. The closing tags are implied.
#[derive(Clone, Debug, Default)]
pub struct TagAlphabet {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl PartialEq for TagAlphabet {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names
    }
}

impl Eq for TagAlphabet {}

pub fn is_valid_tag_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

impl TagAlphabet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_names<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut alphabet = Self::new();
        for name in names {
            let name = name.as_ref();
            if alphabet.index_of(name).is_some() {
                return Err(Error::InvalidTagName(format!("{name} (duplicate)")));
            }
            alphabet.insert(name)?;
        }
        Ok(alphabet)
    }

    /// Adds `name` if absent and returns its index.
    pub fn insert(&mut self, name: &str) -> Result<usize> {
        if let Some(&i) = self.index.get(name) {
            return Ok(i);
        }
        if !is_valid_tag_name(name) {
            return Err(Error::InvalidTagName(name.to_string()));
        }
        let i = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), i);
        Ok(i)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, tag: usize) -> &str {
        &self.names[tag]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Union keeping `self`'s order, followed by the new tags of `other`.
    /// Returns the union and the index map for `other`'s tags.
    pub fn union(&self, other: &TagAlphabet) -> (TagAlphabet, Vec<usize>) {
        let mut union = self.clone();
        let map = other
            .names
            .iter()
            .map(|n| union.insert(n).expect("names already validated"))
            .collect();
        (union, map)
    }

    /// Symbol names of `T = A ∪ Ā` in the canonical order `a /a b /b ...`.
    pub fn symbol_names(&self) -> Vec<String> {
        self.names
            .iter()
            .flat_map(|n| [n.clone(), format!("/{n}")])
            .collect()
    }

    pub fn letter(&self, token: &str) -> Result<Letter> {
        let (open, name) = match token.strip_prefix('/') {
            Some(rest) => (false, rest),
            None => (true, token),
        };
        let tag = self
            .index_of(name)
            .ok_or_else(|| Error::UnknownTag(name.to_string()))?;
        Ok(Letter { tag, open })
    }

    pub fn letter_name(&self, letter: Letter) -> String {
        if letter.open {
            self.names[letter.tag].clone()
        } else {
            format!("/{}", self.names[letter.tag])
        }
    }
}

/// A letter of `T`: an opening or a closing tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Letter {
    pub tag: usize,
    pub open: bool,
}

impl Letter {
    pub fn open(tag: usize) -> Self {
        Letter { tag, open: true }
    }

    pub fn close(tag: usize) -> Self {
        Letter { tag, open: false }
    }

    /// Dense symbol index in the canonical `a /a b /b ...` order.
    pub fn symbol(self) -> usize {
        2 * self.tag + usize::from(!self.open)
    }

    pub fn from_symbol(symbol: usize) -> Self {
        Letter {
            tag: symbol / 2,
            open: symbol.is_multiple_of(2),
        }
    }

    fn cancels(self, next: Letter) -> bool {
        self.open && !next.open && self.tag == next.tag
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.symbol().cmp(&other.symbol())
    }
}

/// A finite word over `T`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TaggedWord(pub Vec<Letter>);

impl TaggedWord {
    pub fn new(letters: Vec<Letter>) -> Self {
        TaggedWord(letters)
    }

    pub fn empty() -> Self {
        TaggedWord(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Parses a word whose tags must all be declared in `alphabet`.
    pub fn parse(text: &str, alphabet: &TagAlphabet) -> Result<Self> {
        text.split_whitespace()
            .filter(|t| *t != "~e~")
            .map(|t| alphabet.letter(t))
            .collect::<Result<Vec<_>>>()
            .map(TaggedWord)
    }

    /// Parses a word, declaring unseen tags in `alphabet` on the fly.
    pub fn parse_extending(text: &str, alphabet: &mut TagAlphabet) -> Result<Self> {
        let mut letters = Vec::new();
        for token in text.split_whitespace().filter(|t| *t != "~e~") {
            let name = token.strip_prefix('/').unwrap_or(token);
            alphabet.insert(name)?;
            letters.push(alphabet.letter(token)?);
        }
        Ok(TaggedWord(letters))
    }

    pub fn display<'a>(&'a self, alphabet: &'a TagAlphabet) -> impl fmt::Display + 'a {
        WordDisplay {
            letters: &self.0,
            alphabet,
        }
    }

    pub fn to_symbols(&self) -> Vec<usize> {
        self.0.iter().map(|l| l.symbol()).collect()
    }

    pub fn from_symbols(symbols: &[usize]) -> Self {
        TaggedWord(symbols.iter().map(|&s| Letter::from_symbol(s)).collect())
    }
}

impl From<Vec<Letter>> for TaggedWord {
    fn from(letters: Vec<Letter>) -> Self {
        TaggedWord(letters)
    }
}

struct WordDisplay<'a> {
    letters: &'a [Letter],
    alphabet: &'a TagAlphabet,
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("~e~");
        }
        for (i, &l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(&self.alphabet.letter_name(l))?;
        }
        Ok(())
    }
}

/// Formats a word over `A` (a trace or surface word) with space separated tags.
pub fn format_tags(tags: &[usize], alphabet: &TagAlphabet) -> String {
    if tags.is_empty() {
        return "~e~".to_string();
    }
    tags.iter()
        .map(|&t| alphabet.name(t))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Parses a word file: one word per line, `#` comment lines, blank lines
/// skipped. A file holding no word at all denotes the single empty word.
pub fn parse_word_file(
    text: &str,
    alphabet: &mut TagAlphabet,
    strict: bool,
) -> Result<Vec<TaggedWord>> {
    let mut words = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let word = if strict {
            TaggedWord::parse(trimmed, alphabet)
        } else {
            TaggedWord::parse_extending(trimmed, alphabet)
        };
        words.push(word.map_err(|e| Error::parse(lineno + 1, 1, e.to_string()))?);
    }
    if words.is_empty() {
        words.push(TaggedWord::empty());
    }
    Ok(words)
}

/// The irreducible form of a word under `aā → ε`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ReducedWord {
    /// `x̄y`: closing tags followed by opening tags.
    Canonical {
        closers: Vec<usize>,
        openers: Vec<usize>,
    },
    /// Irreducible but containing a factor `a b̄`; not a factor of any Dyck word.
    NotDyckFactor(TaggedWord),
}

impl ReducedWord {
    pub fn from_irreducible(letters: Vec<Letter>) -> Self {
        let split = letters.iter().position(|l| l.open).unwrap_or(letters.len());
        if letters[split..].iter().all(|l| l.open) {
            ReducedWord::Canonical {
                closers: letters[..split].iter().map(|l| l.tag).collect(),
                openers: letters[split..].iter().map(|l| l.tag).collect(),
            }
        } else {
            ReducedWord::NotDyckFactor(TaggedWord(letters))
        }
    }

    pub fn is_canonical(&self) -> bool {
        matches!(self, ReducedWord::Canonical { .. })
    }

    pub fn is_empty(&self) -> bool {
        match self {
            ReducedWord::Canonical { closers, openers } => closers.is_empty() && openers.is_empty(),
            ReducedWord::NotDyckFactor(w) => w.is_empty(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            ReducedWord::Canonical { closers, openers } => closers.len() + openers.len(),
            ReducedWord::NotDyckFactor(w) => w.len(),
        }
    }

    pub fn to_word(&self) -> TaggedWord {
        match self {
            ReducedWord::Canonical { closers, openers } => TaggedWord(
                closers
                    .iter()
                    .map(|&t| Letter::close(t))
                    .chain(openers.iter().map(|&t| Letter::open(t)))
                    .collect(),
            ),
            ReducedWord::NotDyckFactor(w) => w.clone(),
        }
    }
}

/// Appends `word` to the irreducible word `acc`, keeping it irreducible.
pub fn reduce_into(acc: &mut Vec<Letter>, word: &[Letter]) {
    for &l in word {
        match acc.last() {
            Some(&top) if top.cancels(l) => {
                acc.pop();
            }
            _ => acc.push(l),
        }
    }
}

/// Dyck reduction ρ, as one stack pass.
pub fn dyck_reduce(word: &[Letter]) -> ReducedWord {
    let mut acc = Vec::with_capacity(word.len());
    reduce_into(&mut acc, word);
    ReducedWord::from_irreducible(acc)
}

/// `true` iff `word` is a product of Dyck primes (the empty word included).
pub fn is_dyck_word(word: &[Letter]) -> bool {
    let mut stack = Vec::new();
    for &l in word {
        if l.open {
            stack.push(l.tag);
        } else if stack.pop() != Some(l.tag) {
            return false;
        }
    }
    stack.is_empty()
}

/// `true` iff `word` is a Dyck prime, starting with `root` when given.
pub fn is_dyck_prime(word: &[Letter], root: Option<usize>) -> bool {
    let Some(first) = word.first() else {
        return false;
    };
    if !first.open || root.is_some_and(|r| r != first.tag) {
        return false;
    }
    let mut stack = Vec::new();
    for (i, &l) in word.iter().enumerate() {
        if l.open {
            stack.push(l.tag);
        } else if stack.pop() != Some(l.tag) {
            return false;
        }
        if stack.is_empty() && i + 1 != word.len() {
            return false;
        }
    }
    stack.is_empty()
}

/// Splits a product of Dyck primes into its unique list of primes.
pub fn factor_primes(word: &[Letter]) -> Result<Vec<TaggedWord>> {
    let mut primes = Vec::new();
    let mut stack = Vec::new();
    let mut start = 0;
    for (i, &l) in word.iter().enumerate() {
        if l.open {
            stack.push(l.tag);
        } else if stack.pop() != Some(l.tag) {
            return Err(Error::NotWellFormed);
        }
        if stack.is_empty() {
            primes.push(TaggedWord(word[start..=i].to_vec()));
            start = i + 1;
        }
    }
    if !stack.is_empty() {
        return Err(Error::NotWellFormed);
    }
    Ok(primes)
}

/// Root tags of the children of a Dyck prime.
pub fn trace(word: &[Letter]) -> Result<Vec<usize>> {
    if !is_dyck_prime(word, None) {
        return Err(Error::NotPrime);
    }
    let interior = &word[1..word.len() - 1];
    let mut tags = Vec::new();
    let mut depth = 0usize;
    for &l in interior {
        if l.open {
            if depth == 0 {
                tags.push(l.tag);
            }
            depth += 1;
        } else {
            depth -= 1;
        }
    }
    Ok(tags)
}

/// `(|w|_A − |w|_Ā, max prefix weight)`; the empty prefix counts, so height ≥ 0.
pub fn weight_and_height(word: &[Letter]) -> (i64, i64) {
    let mut weight = 0i64;
    let mut height = 0i64;
    for &l in word {
        weight += if l.open { 1 } else { -1 };
        height = height.max(weight);
    }
    (weight, height)
}
