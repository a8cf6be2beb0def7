//! XML-grammars: one nonterminal `X_a` per tag and a regular content model
//! `R_a` per tag, with productions `X_a → a m ā` for `m ∈ R_a`.
//!
//! Nonterminals are identified with their tags, so a content model is an
//! automaton over the tag alphabet. For a reduced grammar the content model
//! of `a` is exactly the surface `S_a` of the generated language.
//!
//! File format: an `axiom a` line, then `a -> <regex over tag names>` lines.

mod dtd;
mod ops;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::automata::{Alphabet, Dfa, Regex};
use crate::dyck::{format_tags, Letter, TagAlphabet};
use crate::error::{Error, Result};

pub use dtd::{parse_dtd, ContentSpec, Dtd, ElementDecl, Occurrence, Particle};
pub use ops::{equals, includes, inclusion_witness, intersect, InclusionWitness, Sequentiality};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XmlGrammar {
    tags: TagAlphabet,
    alphabet: Alphabet,
    content: Vec<Dfa>,
    axiom: usize,
}

/// Surfaces `a ↦ S_a` as minimal automata over the tag alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceFamily {
    tags: TagAlphabet,
    alphabet: Alphabet,
    surfaces: Vec<Dfa>,
}

pub(crate) fn tag_alphabet(tags: &TagAlphabet) -> Alphabet {
    Alphabet::new(tags.names().iter().cloned())
}

impl XmlGrammar {
    /// Content models must be automata over the tag names of `tags`.
    pub fn new(tags: TagAlphabet, content: Vec<Dfa>, axiom: usize) -> Result<Self> {
        let alphabet = tag_alphabet(&tags);
        if content.len() != tags.len() || content.iter().any(|d| d.alphabet() != &alphabet) {
            return Err(Error::AlphabetMismatch);
        }
        if axiom >= tags.len() {
            return Err(Error::Internal("axiom out of range".into()));
        }
        let content = content.iter().map(Dfa::minimize).collect();
        Ok(XmlGrammar {
            tags,
            alphabet,
            content,
            axiom,
        })
    }

    pub fn from_regexes(tags: TagAlphabet, content: &[Regex], axiom: usize) -> Result<Self> {
        let alphabet = tag_alphabet(&tags);
        let dfas = content
            .iter()
            .map(|r| Dfa::from_regex(r, &alphabet))
            .collect();
        XmlGrammar::new(tags, dfas, axiom)
    }

    /// Parses the grammar file format. When `declared` is given, exactly
    /// those tags (in that order) make up the alphabet.
    pub fn parse(text: &str, declared: Option<&TagAlphabet>) -> Result<Self> {
        let mut axiom: Option<(String, usize, usize)> = None;
        let mut defs: Vec<(String, String, usize, usize)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let indent = raw.len() - raw.trim_start().len();
            if let Some(rest) = trimmed.strip_prefix("axiom ") {
                axiom = Some((rest.trim().to_string(), line, indent + 7));
                continue;
            }
            let Some((lhs, rhs)) = trimmed.split_once("->") else {
                return Err(Error::parse(
                    line,
                    indent + 1,
                    "expected `axiom a` or `a -> regex`",
                ));
            };
            let rhs_col = indent + trimmed.find("->").unwrap() + 3;
            defs.push((lhs.trim().to_string(), rhs.to_string(), line, rhs_col));
        }
        let mut tags = declared.cloned().unwrap_or_default();
        let mut defined: HashMap<String, usize> = HashMap::new();
        for (name, _, line, _) in &defs {
            if defined.insert(name.clone(), *line).is_some() {
                return Err(Error::parse(
                    *line,
                    1,
                    format!("tag `{name}` defined twice"),
                ));
            }
            if declared.is_some() {
                if tags.index_of(name).is_none() {
                    return Err(Error::parse(
                        *line,
                        1,
                        format!("tag `{name}` not in the declared alphabet"),
                    ));
                }
            } else {
                tags.insert(name)
                    .map_err(|e| Error::parse(*line, 1, e.to_string()))?;
            }
        }
        let alphabet = tag_alphabet(&tags);
        let mut regexes = vec![Regex::Empty; tags.len()];
        for (name, rhs, line, col) in &defs {
            let regex = Regex::parse(rhs, |t| {
                if defined.contains_key(t) || declared.is_some_and(|d| d.index_of(t).is_some()) {
                    Ok(tags.index_of(t).expect("defined tag"))
                } else {
                    Err(Error::UndeclaredElement(t.to_string()))
                }
            })
            .map_err(|e| match e {
                Error::Parse {
                    column, message, ..
                } => Error::parse(*line, col + column - 1, message),
                other => other,
            })?;
            regexes[tags.index_of(name).unwrap()] = regex;
        }
        let (axiom_name, line, col) = match axiom {
            Some(a) => a,
            None => match defs.first() {
                Some((name, _, line, _)) => (name.clone(), *line, 1),
                None => return Err(Error::parse(1, 1, "grammar has no production")),
            },
        };
        let axiom = tags.index_of(&axiom_name).ok_or_else(|| {
            Error::parse(
                line,
                col,
                format!("axiom `{axiom_name}` is not a declared tag"),
            )
        })?;
        let dfas = regexes
            .iter()
            .map(|r| Dfa::from_regex(r, &alphabet))
            .collect();
        XmlGrammar::new(tags, dfas, axiom)
    }

    pub fn tags(&self) -> &TagAlphabet {
        &self.tags
    }

    /// The tag names as an automaton alphabet.
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn axiom(&self) -> usize {
        self.axiom
    }

    pub fn content(&self, tag: usize) -> &Dfa {
        &self.content[tag]
    }

    pub fn contents(&self) -> &[Dfa] {
        &self.content
    }

    /// Least fixpoint: `a` is productive when `R_a` has a word over
    /// productive tags.
    pub fn productive(&self) -> Vec<bool> {
        let n = self.tags.len();
        let mut productive = vec![false; n];
        let mut changed = true;
        while changed {
            changed = false;
            for a in 0..n {
                if !productive[a] && !self.content[a].restrict(&productive).is_empty() {
                    productive[a] = true;
                    changed = true;
                }
            }
        }
        productive
    }

    /// Accessible tags from the axiom through live transitions, once the
    /// content models are restricted to `allowed` tags.
    fn accessible(&self, allowed: &[bool]) -> Vec<bool> {
        let mut seen = vec![false; self.tags.len()];
        seen[self.axiom] = true;
        let mut stack = vec![self.axiom];
        while let Some(a) = stack.pop() {
            let live = self.content[a].restrict(allowed).live_symbols();
            for (b, used) in live.into_iter().enumerate() {
                if used && !seen[b] {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
        seen
    }

    /// Tags that are both productive and accessible.
    pub fn useful(&self) -> Vec<bool> {
        let productive = self.productive();
        if !productive[self.axiom] {
            return vec![false; self.tags.len()];
        }
        let accessible = self.accessible(&productive);
        productive
            .iter()
            .zip(&accessible)
            .map(|(p, a)| *p && *a)
            .collect()
    }

    /// Reduced form: useless tags get the empty content model and every
    /// content model is restricted to useful tags. The alphabet is kept.
    pub fn reduce(&self) -> Result<XmlGrammar> {
        let useful = self.useful();
        if !useful[self.axiom] {
            return Err(Error::EmptyLanguage);
        }
        let content = (0..self.tags.len())
            .map(|a| {
                if useful[a] {
                    self.content[a].restrict(&useful).minimize()
                } else {
                    Dfa::empty(self.alphabet.clone())
                }
            })
            .collect();
        Ok(XmlGrammar {
            tags: self.tags.clone(),
            alphabet: self.alphabet.clone(),
            content,
            axiom: self.axiom,
        })
    }

    pub fn is_reduced(&self) -> bool {
        self.reduce().is_ok_and(|r| &r == self)
    }

    /// Surfaces of the generated language; the grammar must be reduced.
    pub fn surfaces(&self) -> Result<SurfaceFamily> {
        if let Some(a) = self.first_useless_difference() {
            return Err(Error::NotReduced(self.tags.name(a).to_string()));
        }
        Ok(SurfaceFamily {
            tags: self.tags.clone(),
            alphabet: self.alphabet.clone(),
            surfaces: self.content.clone(),
        })
    }

    fn first_useless_difference(&self) -> Option<usize> {
        match self.reduce() {
            Err(_) => Some(self.axiom),
            Ok(r) => (0..self.tags.len()).find(|&a| r.content[a] != self.content[a]),
        }
    }

    /// Deterministic recognition with a stack of content-model runs.
    pub fn member(&self, word: &[Letter]) -> bool {
        let Some(first) = word.first() else {
            return false;
        };
        if *first != Letter::open(self.axiom) {
            return false;
        }
        let mut stack: Vec<(usize, usize)> = Vec::new();
        for (i, &l) in word.iter().enumerate() {
            if l.tag >= self.tags.len() {
                return false;
            }
            if l.open {
                if i > 0 && stack.is_empty() {
                    return false;
                }
                stack.push((l.tag, self.content[l.tag].initial()));
            } else {
                let Some((tag, state)) = stack.pop() else {
                    return false;
                };
                if tag != l.tag || !self.content[tag].is_final(state) {
                    return false;
                }
                if let Some(parent) = stack.last_mut() {
                    parent.1 = self.content[parent.0].next(parent.1, tag);
                }
            }
        }
        stack.is_empty()
    }

    /// Re-expresses the grammar over a larger tag alphabet; `map[t]` is the
    /// new index of tag `t`. New tags get empty content models.
    pub fn with_tags(&self, tags: &TagAlphabet, map: &[usize]) -> XmlGrammar {
        let alphabet = tag_alphabet(tags);
        let mut content = vec![Dfa::empty(alphabet.clone()); tags.len()];
        for (t, &nt) in map.iter().enumerate() {
            content[nt] = self.content[t].with_alphabet(&alphabet, map);
        }
        XmlGrammar {
            tags: tags.clone(),
            alphabet,
            content,
            axiom: map[self.axiom],
        }
    }

    /// Words of length at most `max_len`, shortest first then symbol order.
    pub fn enumerate(&self, max_len: usize) -> Vec<Vec<Letter>> {
        let n = self.tags.len();
        let mut sets: Vec<BTreeSet<Vec<Letter>>> = vec![BTreeSet::new(); n];
        let co: Vec<Vec<bool>> = self.content.iter().map(Dfa::coreachable).collect();
        let mut changed = true;
        while changed {
            changed = false;
            for a in 0..n {
                if max_len < 2 {
                    break;
                }
                let dfa = &self.content[a];
                let budget = max_len - 2;
                let mut found = Vec::new();
                let mut frontier = vec![(dfa.initial(), Vec::<Letter>::new())];
                while let Some((q, w)) = frontier.pop() {
                    if dfa.is_final(q) {
                        found.push(w.clone());
                    }
                    for (b, set) in sets.iter().enumerate() {
                        let r = dfa.next(q, b);
                        if !co[a][r] {
                            continue;
                        }
                        for child in set {
                            if w.len() + child.len() <= budget {
                                let mut w2 = w.clone();
                                w2.extend_from_slice(child);
                                frontier.push((r, w2));
                            }
                        }
                    }
                }
                for inner in found {
                    let mut word = Vec::with_capacity(inner.len() + 2);
                    word.push(Letter::open(a));
                    word.extend(inner);
                    word.push(Letter::close(a));
                    changed |= sets[a].insert(word);
                }
            }
        }
        let mut words: Vec<Vec<Letter>> =
            std::mem::take(&mut sets[self.axiom]).into_iter().collect();
        words.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
        words
    }

    /// Tags whose content model is referenced or nonempty, for printing.
    fn printed_tags(&self) -> Vec<usize> {
        let mut referenced = vec![false; self.tags.len()];
        for d in &self.content {
            for (b, used) in d.live_symbols().into_iter().enumerate() {
                referenced[b] |= used;
            }
        }
        (0..self.tags.len())
            .filter(|&a| a == self.axiom || referenced[a] || !self.content[a].is_empty())
            .collect()
    }
}

impl fmt::Display for XmlGrammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "axiom {}", self.tags.name(self.axiom))?;
        for a in self.printed_tags() {
            writeln!(
                f,
                "{} -> {}",
                self.tags.name(a),
                self.content[a].to_regex().display(&self.alphabet)
            )?;
        }
        Ok(())
    }
}

impl SurfaceFamily {
    pub fn new(tags: TagAlphabet, surfaces: Vec<Dfa>) -> Result<Self> {
        let alphabet = tag_alphabet(&tags);
        if surfaces.len() != tags.len() || surfaces.iter().any(|d| d.alphabet() != &alphabet) {
            return Err(Error::AlphabetMismatch);
        }
        let surfaces = surfaces.iter().map(Dfa::minimize).collect();
        Ok(SurfaceFamily {
            tags,
            alphabet,
            surfaces,
        })
    }

    pub fn tags(&self) -> &TagAlphabet {
        &self.tags
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn surface(&self, tag: usize) -> &Dfa {
        &self.surfaces[tag]
    }

    pub fn surfaces(&self) -> &[Dfa] {
        &self.surfaces
    }

    /// The XML-grammar with `R_a = S_a`, reduced for the given axiom.
    pub fn standard_grammar(&self, axiom: usize) -> Result<XmlGrammar> {
        XmlGrammar::new(self.tags.clone(), self.surfaces.clone(), axiom)?.reduce()
    }

    /// Lines `S_a = regex`, one per tag.
    pub fn describe(&self) -> Vec<(String, String)> {
        (0..self.tags.len())
            .map(|a| {
                (
                    self.tags.name(a).to_string(),
                    self.surfaces[a]
                        .to_regex()
                        .display(&self.alphabet)
                        .to_string(),
                )
            })
            .collect()
    }

    /// Equality as languages after aligning tag alphabets by name.
    pub fn same_as(&self, other: &SurfaceFamily) -> bool {
        let (union, map) = self.tags.union(&other.tags);
        let alphabet = tag_alphabet(&union);
        let ident: Vec<usize> = (0..self.tags.len()).collect();
        (0..union.len()).all(|t| {
            let mine = if t < self.tags.len() {
                self.surfaces[t].with_alphabet(&alphabet, &ident)
            } else {
                Dfa::empty(alphabet.clone())
            };
            let theirs = match map.iter().position(|&m| m == t) {
                Some(o) => other.surfaces[o].with_alphabet(&alphabet, &map),
                None => Dfa::empty(alphabet.clone()),
            };
            mine.equivalent(&theirs).unwrap_or(false)
        })
    }
}

impl fmt::Display for SurfaceFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (tag, regex) in self.describe() {
            writeln!(f, "S_{tag} = {regex}")?;
        }
        Ok(())
    }
}

/// Formats a surface word.
pub fn format_trace(trace: &[usize], tags: &TagAlphabet) -> String {
    format_tags(trace, tags)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::dyck::TaggedWord;

    pub(crate) fn xg(text: &str) -> XmlGrammar {
        XmlGrammar::parse(text, None).unwrap()
    }

    pub(crate) fn word(g: &XmlGrammar, text: &str) -> Vec<Letter> {
        TaggedWord::parse(text, g.tags()).unwrap().0
    }

    fn regex_of(g: &XmlGrammar, text: &str) -> Dfa {
        let r = Regex::parse(text, |n| {
            g.tags().index_of(n).ok_or(Error::UnknownTag(n.into()))
        })
        .unwrap();
        Dfa::from_regex(&r, g.alphabet())
    }

    #[test]
    fn surfaces_of_b2n_example() {
        let g = xg("axiom a\na -> b\nb -> b?");
        let s = g.surfaces().unwrap();
        assert!(s.surface(0).equivalent(&regex_of(&g, "b")).unwrap());
        assert!(s.surface(1).equivalent(&regex_of(&g, "b|~e~")).unwrap());
        assert_eq!(s.to_string(), "S_a = b\nS_b = b?\n");
    }

    #[test]
    fn surfaces_of_dyck_primes() {
        let g = xg("a -> a*");
        assert_eq!(g.surfaces().unwrap().to_string(), "S_a = a*\n");
        let g = xg("axiom a\na -> (a|b)(a|b)\nb -> ~e~");
        assert_eq!(
            g.surfaces().unwrap().to_string(),
            "S_a = (a|b)(a|b)\nS_b = ~e~\n"
        );
    }

    #[test]
    fn surfaces_require_reduced() {
        let g = xg("axiom a\na -> b | c\nb -> ~e~\nc -> c");
        assert_eq!(g.surfaces(), Err(Error::NotReduced("a".into())));
        assert!(g.reduce().unwrap().surfaces().is_ok());
    }

    #[test]
    fn standard_grammar_examples() {
        let g = xg("axiom a\na -> b\nb -> b?");
        let std = g.surfaces().unwrap().standard_grammar(0).unwrap();
        assert_eq!(std, g);
        assert!(std.member(&word(&std, "a b b /b /b /a")));
        assert!(std.member(&word(&std, "a b /b /a")));
        assert!(!std.member(&word(&std, "a /a")));
        assert!(!std.member(&[]));

        let only = xg("a -> ~e~");
        assert_eq!(only.enumerate(6), vec![word(&only, "a /a")]);

        let dead = xg("axiom a\na -> b\nb -> {}");
        assert_eq!(
            dead.surfaces().map(|s| s.standard_grammar(0)),
            Err(Error::NotReduced("a".into()))
        );
        let fam = SurfaceFamily::new(dead.tags().clone(), dead.contents().to_vec()).unwrap();
        assert_eq!(fam.standard_grammar(0), Err(Error::EmptyLanguage));
    }

    #[test]
    fn member_rejects_malformed() {
        let g = xg("axiom a\na -> b*\nb -> ~e~");
        assert!(g.member(&word(&g, "a b /b b /b /a")));
        assert!(!g.member(&word(&g, "a b /a /b")));
        assert!(!g.member(&word(&g, "a /a a /a")));
        assert!(!g.member(&word(&g, "b /b")));
        assert!(!g.member(&word(&g, "a b /b")));
        assert!(!g.member(&word(&g, "a /a /a")));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            XmlGrammar::parse("a -> c", None),
            Err(Error::Parse {
                line: 1,
                column: 6,
                ..
            })
        ));
        assert!(matches!(
            XmlGrammar::parse("a -> b\nb -> (b", None),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            XmlGrammar::parse("axiom z\na -> ~e~", None),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            XmlGrammar::parse("a -> ~e~\na -> a", None),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn display_round_trip() {
        let g = xg("axiom a\na -> (a|b),(a|b)\nb -> b*");
        let again = XmlGrammar::parse(&g.to_string(), None).unwrap();
        assert_eq!(again, g);
    }

    #[test]
    fn enumerate_by_length() {
        let g = xg("axiom a\na -> b\nb -> b?");
        let words = g.enumerate(7);
        assert_eq!(
            words,
            vec![word(&g, "a b /b /a"), word(&g, "a b b /b /b /a")]
        );
    }

    #[test]
    fn reduce_marks_useless() {
        let g = xg("axiom a\na -> b c?\nb -> ~e~\nc -> c\nd -> ~e~");
        let r = g.reduce().unwrap();
        assert_eq!(r.useful(), vec![true, true, false, false]);
        assert!(r.content(2).is_empty());
        assert!(r.is_reduced());
        assert_eq!(r.to_string(), "axiom a\na -> b\nb -> ~e~\n");
    }
}
