//! Finite context-free grammars over `T = A ∪ Ā` and their Dyck analyses.
//!
//! File format: an `axiom S` line and production lines such as
//! `S -> a S /a | a /a`. Identifiers starting with an uppercase letter are
//! nonterminals, `a` and `/a` are tags, `~e~` is the empty right-hand side.

mod irr;
mod pairs;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::dyck::{Letter, TagAlphabet};
use crate::error::{Error, Result};

pub use irr::{IrrReport, IrrStatus};
pub use pairs::{FiniteSurfaces, IteratingPair, PairKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Terminal(Letter),
    Nonterminal(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Production {
    pub lhs: usize,
    pub rhs: Vec<Symbol>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cfg {
    tags: TagAlphabet,
    nonterminals: Vec<String>,
    productions: Vec<Production>,
    axiom: usize,
}

fn is_nonterminal_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_uppercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '\''))
}

impl Cfg {
    pub fn new(
        tags: TagAlphabet,
        nonterminals: Vec<String>,
        productions: Vec<Production>,
        axiom: usize,
    ) -> Result<Self> {
        if axiom >= nonterminals.len() {
            return Err(Error::Internal("axiom out of range".into()));
        }
        for p in &productions {
            let ok = p.lhs < nonterminals.len()
                && p.rhs.iter().all(|s| match s {
                    Symbol::Terminal(l) => l.tag < tags.len(),
                    Symbol::Nonterminal(n) => *n < nonterminals.len(),
                });
            if !ok {
                return Err(Error::Internal("production symbol out of range".into()));
            }
        }
        Ok(Cfg {
            tags,
            nonterminals,
            productions,
            axiom,
        })
    }

    /// Parses the grammar file format. With `strict`, every tag must already
    /// be declared in `tags`; otherwise tags are added as they appear.
    pub fn parse(text: &str, mut tags: TagAlphabet, strict: bool) -> Result<Self> {
        let mut nonterminals: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut intern = |name: &str, nts: &mut Vec<String>| -> usize {
            *index.entry(name.to_string()).or_insert_with(|| {
                nts.push(name.to_string());
                nts.len() - 1
            })
        };
        let mut axiom_name: Option<(String, usize)> = None;
        let mut productions = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let indent = raw.len() - raw.trim_start().len();
            if let Some(rest) = trimmed.strip_prefix("axiom") {
                if rest.is_empty() || rest.starts_with(char::is_whitespace) {
                    let name = rest.trim();
                    if !is_nonterminal_name(name) {
                        return Err(Error::parse(
                            line,
                            indent + 7,
                            format!("expected nonterminal, found `{name}`"),
                        ));
                    }
                    axiom_name = Some((name.to_string(), line));
                    continue;
                }
            }
            let Some((lhs, rhs)) = trimmed.split_once("->") else {
                return Err(Error::parse(
                    line,
                    indent + 1,
                    "expected `axiom X` or `X -> ...`",
                ));
            };
            let lhs = lhs.trim();
            if !is_nonterminal_name(lhs) {
                return Err(Error::parse(
                    line,
                    indent + 1,
                    format!("expected nonterminal, found `{lhs}`"),
                ));
            }
            let lhs = intern(lhs, &mut nonterminals);
            let rhs_col = indent + trimmed.find("->").unwrap() + 3;
            for alt in rhs.split('|') {
                let mut symbols = Vec::new();
                let mut saw_epsilon = false;
                for tok in alt.split_whitespace() {
                    let col = rhs_col + rhs.find(tok).unwrap_or(0);
                    if tok == "~e~" {
                        saw_epsilon = true;
                    } else if is_nonterminal_name(tok) {
                        symbols.push(Symbol::Nonterminal(intern(tok, &mut nonterminals)));
                    } else {
                        let name = tok.strip_prefix('/').unwrap_or(tok);
                        if !strict {
                            tags.insert(name)
                                .map_err(|e| Error::parse(line, col, e.to_string()))?;
                        }
                        let letter = tags
                            .letter(tok)
                            .map_err(|e| Error::parse(line, col, e.to_string()))?;
                        symbols.push(Symbol::Terminal(letter));
                    }
                }
                if symbols.is_empty() && !saw_epsilon {
                    return Err(Error::parse(
                        line,
                        rhs_col,
                        "empty alternative; write `~e~`",
                    ));
                }
                productions.push(Production { lhs, rhs: symbols });
            }
        }
        let axiom = match axiom_name {
            Some((name, line)) => *index.get(&name).ok_or_else(|| {
                Error::parse(line, 1, format!("axiom `{name}` has no production"))
            })?,
            None if !productions.is_empty() => productions[0].lhs,
            None => return Err(Error::parse(1, 1, "grammar has no production")),
        };
        Cfg::new(tags, nonterminals, productions, axiom)
    }

    pub fn tags(&self) -> &TagAlphabet {
        &self.tags
    }

    pub fn nonterminals(&self) -> &[String] {
        &self.nonterminals
    }

    pub fn productions(&self) -> &[Production] {
        &self.productions
    }

    pub fn axiom(&self) -> usize {
        self.axiom
    }

    pub fn nonterminal_index(&self, name: &str) -> Option<usize> {
        self.nonterminals.iter().position(|n| n == name)
    }

    fn productive(&self) -> Vec<bool> {
        let mut productive = vec![false; self.nonterminals.len()];
        let mut changed = true;
        while changed {
            changed = false;
            for p in &self.productions {
                if !productive[p.lhs]
                    && p.rhs.iter().all(|s| match s {
                        Symbol::Terminal(_) => true,
                        Symbol::Nonterminal(n) => productive[*n],
                    })
                {
                    productive[p.lhs] = true;
                    changed = true;
                }
            }
        }
        productive
    }

    /// Removes unproductive and inaccessible nonterminals; the survivors keep
    /// their relative order.
    pub fn reduce(&self) -> Result<Cfg> {
        let productive = self.productive();
        if !productive[self.axiom] {
            return Err(Error::EmptyLanguage);
        }
        let useful_prod = |p: &Production| {
            productive[p.lhs]
                && p.rhs.iter().all(|s| match s {
                    Symbol::Terminal(_) => true,
                    Symbol::Nonterminal(n) => productive[*n],
                })
        };
        let mut reachable = vec![false; self.nonterminals.len()];
        reachable[self.axiom] = true;
        let mut stack = vec![self.axiom];
        while let Some(x) = stack.pop() {
            for p in self
                .productions
                .iter()
                .filter(|p| p.lhs == x && useful_prod(p))
            {
                for s in &p.rhs {
                    if let Symbol::Nonterminal(n) = *s {
                        if !reachable[n] {
                            reachable[n] = true;
                            stack.push(n);
                        }
                    }
                }
            }
        }
        let mut renumber = vec![usize::MAX; self.nonterminals.len()];
        let mut names = Vec::new();
        for (i, name) in self.nonterminals.iter().enumerate() {
            if reachable[i] {
                renumber[i] = names.len();
                names.push(name.clone());
            }
        }
        let productions = self
            .productions
            .iter()
            .filter(|p| reachable[p.lhs] && useful_prod(p))
            .map(|p| Production {
                lhs: renumber[p.lhs],
                rhs: p
                    .rhs
                    .iter()
                    .map(|s| match *s {
                        Symbol::Nonterminal(n) => Symbol::Nonterminal(renumber[n]),
                        t => t,
                    })
                    .collect(),
            })
            .collect();
        Cfg::new(self.tags.clone(), names, productions, renumber[self.axiom])
    }

    pub(crate) fn nullable(&self) -> Vec<bool> {
        let mut nullable = vec![false; self.nonterminals.len()];
        let mut changed = true;
        while changed {
            changed = false;
            for p in &self.productions {
                if !nullable[p.lhs]
                    && p.rhs
                        .iter()
                        .all(|s| matches!(s, Symbol::Nonterminal(n) if nullable[*n]))
                {
                    nullable[p.lhs] = true;
                    changed = true;
                }
            }
        }
        nullable
    }

    /// First (or, with `last`, final) letters of the words each nonterminal derives.
    pub(crate) fn edge_letters(&self, last: bool) -> Vec<BTreeSet<Letter>> {
        let nullable = self.nullable();
        let mut sets: Vec<BTreeSet<Letter>> = vec![BTreeSet::new(); self.nonterminals.len()];
        let mut changed = true;
        while changed {
            changed = false;
            for p in &self.productions {
                let mut add = BTreeSet::new();
                let seq: Box<dyn Iterator<Item = &Symbol>> = if last {
                    Box::new(p.rhs.iter().rev())
                } else {
                    Box::new(p.rhs.iter())
                };
                for s in seq {
                    match *s {
                        Symbol::Terminal(l) => {
                            add.insert(l);
                            break;
                        }
                        Symbol::Nonterminal(n) => {
                            add.extend(sets[n].iter().copied());
                            if !nullable[n] {
                                break;
                            }
                        }
                    }
                }
                let before = sets[p.lhs].len();
                sets[p.lhs].extend(add);
                changed |= sets[p.lhs].len() != before;
            }
        }
        sets
    }

    /// `true` iff every word of the language lies in `a T* ā`.
    pub(crate) fn is_wrapped_by(&self, tag: usize) -> bool {
        let nullable = self.nullable();
        let first = self.edge_letters(false);
        let last = self.edge_letters(true);
        !nullable[self.axiom]
            && first[self.axiom].iter().all(|&l| l == Letter::open(tag))
            && last[self.axiom].iter().all(|&l| l == Letter::close(tag))
    }

    /// Grammar for `a⁻¹ L ā⁻¹`; only meaningful when `L ⊆ a T* ā`.
    pub(crate) fn strip_outer(&self, tag: usize) -> Cfg {
        let n = self.nonterminals.len();
        let nullable = self.nullable();
        let mut names = self.nonterminals.clone();
        let fresh = |base: &str, suffix: &str, names: &mut Vec<String>| -> usize {
            let mut name = format!("{base}_{suffix}");
            while names.contains(&name) {
                name.push('\'');
            }
            names.push(name);
            names.len() - 1
        };
        let left: Vec<usize> = (0..n)
            .map(|i| fresh(&self.nonterminals[i].clone(), "L", &mut names))
            .collect();
        let right: Vec<usize> = (0..n)
            .map(|i| fresh(&self.nonterminals[i].clone(), "R", &mut names))
            .collect();
        let both: Vec<usize> = (0..n)
            .map(|i| fresh(&self.nonterminals[i].clone(), "LR", &mut names))
            .collect();
        let is_nullable = |s: &Symbol| matches!(s, Symbol::Nonterminal(m) if nullable[*m]);
        // quotient of one symbol: None = empty language, Some(vec) = replacement
        let quot_left = |s: &Symbol| -> Option<Vec<Symbol>> {
            match *s {
                Symbol::Terminal(l) if l == Letter::open(tag) => Some(vec![]),
                Symbol::Terminal(_) => None,
                Symbol::Nonterminal(m) => Some(vec![Symbol::Nonterminal(left[m])]),
            }
        };
        let quot_right = |s: &Symbol| -> Option<Vec<Symbol>> {
            match *s {
                Symbol::Terminal(l) if l == Letter::close(tag) => Some(vec![]),
                Symbol::Terminal(_) => None,
                Symbol::Nonterminal(m) => Some(vec![Symbol::Nonterminal(right[m])]),
            }
        };
        let mut productions = self.productions.clone();
        for p in &self.productions {
            let rhs = &p.rhs;
            for i in 0..rhs.len() {
                if !rhs[..i].iter().all(is_nullable) {
                    break;
                }
                if let Some(mut head) = quot_left(&rhs[i]) {
                    head.extend_from_slice(&rhs[i + 1..]);
                    productions.push(Production {
                        lhs: left[p.lhs],
                        rhs: head,
                    });
                }
            }
            for j in (0..rhs.len()).rev() {
                if !rhs[j + 1..].iter().all(is_nullable) {
                    break;
                }
                if let Some(tail) = quot_right(&rhs[j]) {
                    let mut body = rhs[..j].to_vec();
                    body.extend(tail);
                    productions.push(Production {
                        lhs: right[p.lhs],
                        rhs: body,
                    });
                }
            }
            for i in 0..rhs.len() {
                if !rhs[..i].iter().all(is_nullable) {
                    break;
                }
                for j in i..rhs.len() {
                    if !rhs[j + 1..].iter().all(is_nullable) {
                        continue;
                    }
                    if i == j {
                        if let Symbol::Nonterminal(m) = rhs[i] {
                            productions.push(Production {
                                lhs: both[p.lhs],
                                rhs: vec![Symbol::Nonterminal(both[m])],
                            });
                        }
                        continue;
                    }
                    let (Some(head), Some(tail)) = (quot_left(&rhs[i]), quot_right(&rhs[j])) else {
                        continue;
                    };
                    let mut body = head;
                    body.extend_from_slice(&rhs[i + 1..j]);
                    body.extend(tail);
                    productions.push(Production {
                        lhs: both[p.lhs],
                        rhs: body,
                    });
                }
            }
        }
        Cfg {
            tags: self.tags.clone(),
            nonterminals: names,
            productions,
            axiom: both[self.axiom],
        }
    }

    /// All words of length at most `max_len` derivable from the axiom,
    /// sorted by length then symbol order.
    pub fn enumerate(&self, max_len: usize) -> Vec<Vec<Letter>> {
        let mut sets: Vec<BTreeSet<Vec<Letter>>> = vec![BTreeSet::new(); self.nonterminals.len()];
        let mut changed = true;
        while changed {
            changed = false;
            for p in &self.productions {
                let mut acc: BTreeSet<Vec<Letter>> = BTreeSet::from([Vec::new()]);
                for s in &p.rhs {
                    let mut next = BTreeSet::new();
                    for w in &acc {
                        match *s {
                            Symbol::Terminal(l) => {
                                if w.len() < max_len {
                                    let mut w2 = w.clone();
                                    w2.push(l);
                                    next.insert(w2);
                                }
                            }
                            Symbol::Nonterminal(n) => {
                                for v in &sets[n] {
                                    if w.len() + v.len() <= max_len {
                                        let mut w2 = w.clone();
                                        w2.extend_from_slice(v);
                                        next.insert(w2);
                                    }
                                }
                            }
                        }
                    }
                    acc = next;
                    if acc.is_empty() {
                        break;
                    }
                }
                for w in acc {
                    changed |= sets[p.lhs].insert(w);
                }
            }
        }
        let mut words: Vec<Vec<Letter>> =
            std::mem::take(&mut sets[self.axiom]).into_iter().collect();
        words.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        words
    }

    pub(crate) fn format_symbols(&self, symbols: &[Symbol]) -> String {
        if symbols.is_empty() {
            return "~e~".to_string();
        }
        symbols
            .iter()
            .map(|s| match *s {
                Symbol::Terminal(l) => self.tags.letter_name(l),
                Symbol::Nonterminal(n) => self.nonterminals[n].clone(),
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for Cfg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "axiom {}", self.nonterminals[self.axiom])?;
        for (i, name) in self.nonterminals.iter().enumerate() {
            let alts: Vec<String> = self
                .productions
                .iter()
                .filter(|p| p.lhs == i)
                .map(|p| self.format_symbols(&p.rhs))
                .collect();
            if !alts.is_empty() {
                writeln!(f, "{name} -> {}", alts.join(" | "))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn cfg(text: &str) -> Cfg {
        Cfg::parse(text, TagAlphabet::new(), false).unwrap()
    }

    #[test]
    fn parse_and_print() {
        let g = cfg("axiom S\nS -> a S /a | a /a\n");
        assert_eq!(g.productions().len(), 2);
        assert_eq!(g.to_string(), "axiom S\nS -> a S /a | a /a\n");
        let g2 = Cfg::parse(&g.to_string(), TagAlphabet::new(), false).unwrap();
        assert_eq!(g, g2);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            Cfg::parse("S -> a S /a |", TagAlphabet::new(), false),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            Cfg::parse("axiom S\nT -> a /a", TagAlphabet::new(), false),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            Cfg::parse("S a /a", TagAlphabet::new(), false),
            Err(Error::Parse { .. })
        ));
        let tags = TagAlphabet::from_names(["a"]).unwrap();
        assert!(matches!(
            Cfg::parse("S -> b /b", tags, true),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn reduce_drops_unreachable() {
        let g = cfg("axiom S\nS -> a /a\nX -> a X /a");
        let r = g.reduce().unwrap();
        assert_eq!(r.nonterminals(), ["S"]);
        assert_eq!(r.productions().len(), 1);
    }

    #[test]
    fn reduce_detects_empty_language() {
        assert_eq!(cfg("S -> a S /a").reduce(), Err(Error::EmptyLanguage));
    }

    #[test]
    fn reduce_keeps_reduced_grammar() {
        let g = cfg("axiom S\nS -> a T T /a\nT -> a T T /a | b /b");
        assert_eq!(g.reduce().unwrap(), g);
    }

    #[test]
    fn enumerate_small() {
        let g = cfg("S -> a S /a | a /a");
        let a = Letter::open(0);
        let abar = Letter::close(0);
        assert_eq!(g.enumerate(4), vec![vec![a, abar], vec![a, a, abar, abar]]);
        let eps = cfg("S -> a /a S | ~e~");
        assert_eq!(eps.enumerate(4).len(), 3);
    }

    #[test]
    fn strip_outer_quotient() {
        let g = cfg("axiom S\nS -> a T T /a\nT -> a T T /a | b /b");
        assert!(g.is_wrapped_by(0));
        assert!(!g.is_wrapped_by(1));
        let q = g.strip_outer(0).reduce().unwrap();
        let words: Vec<Vec<Letter>> = g
            .enumerate(12)
            .into_iter()
            .map(|w| w[1..w.len() - 1].to_vec())
            .collect();
        assert_eq!(
            q.enumerate(10),
            words
                .into_iter()
                .filter(|w| w.len() <= 10)
                .collect::<Vec<_>>()
        );
        let nullable_parts = cfg("axiom S\nS -> E a E b /b E /a E\nE -> ~e~");
        let q = nullable_parts.strip_outer(0).reduce().unwrap();
        assert_eq!(
            q.enumerate(4),
            vec![vec![Letter::open(1), Letter::close(1)]]
        );
    }
}
