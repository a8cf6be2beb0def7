//! Balanced grammars and hedge automata over unranked document trees.
//!
//! A balanced grammar has productions `X → a m ā` with `m` a word of
//! nonterminals, and every nonterminal carries a single tag. Such a grammar
//! is a nondeterministic hedge automaton whose states are the nonterminals;
//! XML-grammars give deterministic ones with one state per tag.

mod automaton;

use std::collections::BTreeSet;
use std::fmt;

use crate::automata::{Alphabet, Dfa, Nfa};
use crate::cfg::{Cfg, Symbol};
use crate::dyck::{is_dyck_prime, Letter, TagAlphabet, TaggedWord};
use crate::error::{Error, Result};
use crate::xml::XmlGrammar;

pub use automaton::{hedge_equal, HedgeAutomaton, DEFAULT_BUDGET};

/// A document: a root tag and its ordered children.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DocTree {
    pub tag: usize,
    pub children: Vec<DocTree>,
}

impl DocTree {
    pub fn new(tag: usize, children: Vec<DocTree>) -> Self {
        DocTree { tag, children }
    }

    pub fn leaf(tag: usize) -> Self {
        DocTree::new(tag, Vec::new())
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(DocTree::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(DocTree::depth).max().unwrap_or(0)
    }

    /// The Dyck prime `a · children · ā`.
    pub fn to_word(&self) -> Vec<Letter> {
        let mut out = Vec::with_capacity(2 * self.size());
        self.write_word(&mut out);
        out
    }

    fn write_word(&self, out: &mut Vec<Letter>) {
        out.push(Letter::open(self.tag));
        for c in &self.children {
            c.write_word(out);
        }
        out.push(Letter::close(self.tag));
    }

    pub fn from_word(word: &[Letter]) -> Result<DocTree> {
        if !is_dyck_prime(word, None) {
            return Err(Error::NotPrime);
        }
        let mut stack: Vec<DocTree> = Vec::new();
        for &l in word {
            if l.open {
                stack.push(DocTree::leaf(l.tag));
            } else {
                let done = stack.pop().expect("prime word");
                match stack.last_mut() {
                    Some(parent) => parent.children.push(done),
                    None => return Ok(done),
                }
            }
        }
        unreachable!("prime word closes its root")
    }

    pub fn display(&self, tags: &TagAlphabet) -> String {
        TaggedWord(self.to_word()).display(tags).to_string()
    }
}

/// Productions `X → a(X) m ā(X)` with `m ∈ R_X`, a regular set of words
/// over the nonterminals. Several nonterminals may start the language.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalancedGrammar {
    tags: TagAlphabet,
    names: Vec<String>,
    states: Alphabet,
    tag_of: Vec<usize>,
    content: Vec<Dfa>,
    axioms: Vec<usize>,
}

impl BalancedGrammar {
    pub fn new(
        tags: TagAlphabet,
        names: Vec<String>,
        tag_of: Vec<usize>,
        content: Vec<Dfa>,
        axioms: Vec<usize>,
    ) -> Result<Self> {
        let states = Alphabet::new(names.iter().cloned());
        if tag_of.len() != names.len()
            || content.len() != names.len()
            || content.iter().any(|d| d.alphabet() != &states)
            || tag_of.iter().any(|&t| t >= tags.len())
            || axioms.iter().any(|&x| x >= names.len())
        {
            return Err(Error::AlphabetMismatch);
        }
        Ok(BalancedGrammar {
            tags,
            names,
            states,
            tag_of,
            content,
            axioms,
        })
    }

    /// Parses the context-free grammar file format and converts.
    pub fn parse(text: &str, tags: TagAlphabet, strict: bool) -> Result<Self> {
        BalancedGrammar::from_cfg(&Cfg::parse(text, tags, strict)?)
    }

    /// Reinterprets a grammar in balanced form. A nonterminal with
    /// productions under several tags is split into one copy per tag,
    /// named `X_a`; every occurrence becomes the union of the copies.
    pub fn from_cfg(cfg: &Cfg) -> Result<Self> {
        for p in cfg.productions() {
            let ok = match (p.rhs.first(), p.rhs.last()) {
                (Some(Symbol::Terminal(open)), Some(Symbol::Terminal(close))) => {
                    p.rhs.len() >= 2
                        && open.open
                        && !close.open
                        && open.tag == close.tag
                        && p.rhs[1..p.rhs.len() - 1]
                            .iter()
                            .all(|s| matches!(s, Symbol::Nonterminal(_)))
                }
                _ => false,
            };
            if !ok {
                return Err(Error::NotBalancedForm(format!(
                    "{} -> {}",
                    cfg.nonterminals()[p.lhs],
                    cfg.format_symbols(&p.rhs)
                )));
            }
        }
        let cfg = cfg.reduce()?;
        let n = cfg.nonterminals().len();
        let mut tag_sets: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for p in cfg.productions() {
            if let Symbol::Terminal(l) = p.rhs[0] {
                tag_sets[p.lhs].insert(l.tag);
            }
        }
        let mut names: Vec<String> = Vec::new();
        let mut tag_of = Vec::new();
        let mut copies: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (x, set) in tag_sets.iter().enumerate() {
            for &t in set {
                let base = if set.len() == 1 {
                    cfg.nonterminals()[x].clone()
                } else {
                    format!("{}_{}", cfg.nonterminals()[x], cfg.tags().name(t))
                };
                let mut name = base;
                while names.contains(&name)
                    || (set.len() > 1 && cfg.nonterminal_index(&name).is_some())
                {
                    name.push('\'');
                }
                copies[x].push((t, names.len()));
                names.push(name);
                tag_of.push(t);
            }
        }
        let states = Alphabet::new(names.iter().cloned());
        let mut content = Vec::new();
        for (x, list) in copies.iter().enumerate() {
            for &(t, _) in list {
                let mut nfa = Nfa::new(states.clone());
                let start = nfa.add_state();
                nfa.set_initial(vec![start]);
                for p in cfg.productions().iter().filter(|p| p.lhs == x) {
                    if p.rhs[0] != Symbol::Terminal(Letter::open(t)) {
                        continue;
                    }
                    let mut cur = start;
                    for s in &p.rhs[1..p.rhs.len() - 1] {
                        let Symbol::Nonterminal(y) = *s else {
                            unreachable!()
                        };
                        let next = nfa.add_state();
                        for &(_, c) in &copies[y] {
                            nfa.add_transition(cur, c, next);
                        }
                        cur = next;
                    }
                    if cur == start {
                        let end = nfa.add_state();
                        nfa.add_epsilon(start, end);
                        cur = end;
                    }
                    nfa.set_final(cur, true);
                }
                content.push(nfa.determinize().minimize());
            }
        }
        let axioms = copies[cfg.axiom()].iter().map(|&(_, c)| c).collect();
        BalancedGrammar::new(cfg.tags().clone(), names, tag_of, content, axioms)
    }

    /// The grammar `X_a → a R_a ā` of an XML-grammar, reduced.
    pub fn from_xml(g: &XmlGrammar) -> Result<Self> {
        let r = g.reduce()?;
        let useful = r.useful();
        let keep: Vec<usize> = (0..useful.len()).filter(|&a| useful[a]).collect();
        let mut map = vec![usize::MAX; useful.len()];
        for (i, &a) in keep.iter().enumerate() {
            map[a] = i;
        }
        let names: Vec<String> = keep.iter().map(|&a| r.tags().name(a).to_string()).collect();
        let states = Alphabet::new(names.iter().cloned());
        let content = keep
            .iter()
            .map(|&a| {
                let d = r.content(a);
                let nfa = d.map_alphabet(&states, |s| {
                    if map[s] == usize::MAX {
                        vec![]
                    } else {
                        vec![map[s]]
                    }
                });
                nfa.determinize().minimize()
            })
            .collect();
        BalancedGrammar::new(
            r.tags().clone(),
            names,
            keep.clone(),
            content,
            vec![map[r.axiom()]],
        )
    }

    pub fn tags(&self) -> &TagAlphabet {
        &self.tags
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Nonterminal names as an automaton alphabet.
    pub fn states(&self) -> &Alphabet {
        &self.states
    }

    pub fn tag_of(&self, x: usize) -> usize {
        self.tag_of[x]
    }

    pub fn content(&self, x: usize) -> &Dfa {
        &self.content[x]
    }

    pub fn axioms(&self) -> &[usize] {
        &self.axioms
    }

    pub fn to_hedge(&self) -> HedgeAutomaton {
        let rules = (0..self.names.len())
            .map(|x| ((x, self.tag_of[x]), self.content[x].clone()))
            .collect();
        let mut accepting = vec![false; self.names.len()];
        for &x in &self.axioms {
            accepting[x] = true;
        }
        HedgeAutomaton::new(self.tags.clone(), self.names.clone(), rules, accepting)
            .expect("consistent alphabets")
    }

    /// Membership of a word through the hedge automaton.
    pub fn member(&self, word: &[Letter]) -> bool {
        DocTree::from_word(word).is_ok_and(|t| self.to_hedge().accepts(&t))
    }

    /// Decides whether the language is an XML-language. On success the
    /// reduced XML-grammar is returned; otherwise a tree of the standard
    /// language of the surfaces that the grammar does not generate, or,
    /// when the language has several root tags, a tree under a second root.
    pub fn is_xml(&self) -> Result<XmlVerdict> {
        let h = self.to_hedge();
        let mut roots: Vec<usize> = self.axioms.iter().map(|&x| self.tag_of[x]).collect();
        roots.sort_unstable();
        roots.dedup();
        if roots.len() > 1 {
            let smallest = h.smallest_trees();
            let tree = self
                .axioms
                .iter()
                .filter(|&&x| self.tag_of[x] == roots[1])
                .filter_map(|&x| smallest[x].clone())
                .min_by(|a, b| automaton::shortlex(&a.to_word(), &b.to_word()))
                .expect("reduced grammar");
            return Ok(XmlVerdict::NotXml(tree));
        }
        let surfaces = h.surfaces();
        let standard = surfaces.standard_grammar(roots[0])?;
        let other = HedgeAutomaton::from_xml(&standard);
        let (union, diff) = hedge_equal(&h, &other)?;
        debug_assert_eq!(&union, &self.tags);
        match diff {
            None => Ok(XmlVerdict::Xml(standard)),
            Some(tree) => Ok(XmlVerdict::NotXml(tree)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum XmlVerdict {
    Xml(XmlGrammar),
    NotXml(DocTree),
}

impl fmt::Display for BalancedGrammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let axioms: Vec<&str> = self
            .axioms
            .iter()
            .map(|&x| self.names[x].as_str())
            .collect();
        writeln!(f, "axiom {}", axioms.join(" "))?;
        for (x, name) in self.names.iter().enumerate() {
            let tag = self.tags.name(self.tag_of[x]);
            writeln!(
                f,
                "{name} -> {tag} ({}) /{tag}",
                self.content[x].to_regex().display(&self.states)
            )?;
        }
        Ok(())
    }
}
