//! Generators with fixed seeds and brute-force oracles shared by the
//! integration suites. Nothing here calls the library's algorithms.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use dtdkit::automata::Regex;
use dtdkit::cfg::{Cfg, Production, Symbol};
use dtdkit::dyck::{Letter, TagAlphabet, TaggedWord};
use dtdkit::hedge::DocTree;
use dtdkit::xml::XmlGrammar;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Word = Vec<Letter>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn tags(n: usize) -> TagAlphabet {
    TagAlphabet::from_names(["a", "b", "c", "d", "e", "f"].iter().take(n)).unwrap()
}

pub fn word(text: &str, t: &TagAlphabet) -> Word {
    TaggedWord::parse(text, t).unwrap().0
}

pub fn show(w: &[Letter], t: &TagAlphabet) -> String {
    TaggedWord(w.to_vec()).display(t).to_string()
}

// ---------------------------------------------------------------- words

pub fn random_word(r: &mut ChaCha8Rng, ntags: usize, len: usize) -> Word {
    (0..len)
        .map(|_| Letter {
            tag: r.gen_range(0..ntags),
            open: r.gen_bool(0.5),
        })
        .collect()
}

pub fn random_tree(r: &mut ChaCha8Rng, ntags: usize, max_nodes: usize) -> DocTree {
    let budget = r.gen_range(1..=max_nodes);
    grow(r, ntags, budget)
}

fn grow(r: &mut ChaCha8Rng, ntags: usize, nodes: usize) -> DocTree {
    let tag = r.gen_range(0..ntags);
    let mut left = nodes - 1;
    let mut children = Vec::new();
    while left > 0 {
        let size = r.gen_range(1..=left);
        children.push(grow(r, ntags, size));
        left -= size;
    }
    DocTree::new(tag, children)
}

pub fn tree_word(t: &DocTree) -> Word {
    let mut out = vec![Letter::open(t.tag)];
    for c in &t.children {
        out.extend(tree_word(c));
    }
    out.push(Letter::close(t.tag));
    out
}

/// Cancels adjacent `x x̄` pairs by rescanning from the start until none is
/// left.
pub fn naive_reduce(w: &[Letter]) -> Word {
    let mut w = w.to_vec();
    loop {
        let hit = (0..w.len().saturating_sub(1))
            .find(|&i| w[i].open && !w[i + 1].open && w[i].tag == w[i + 1].tag);
        match hit {
            Some(i) => {
                w.drain(i..i + 2);
            }
            None => return w,
        }
    }
}

/// Same reduction, cancelling pairs in a random order.
pub fn shuffled_reduce(r: &mut ChaCha8Rng, w: &[Letter]) -> Word {
    let mut w = w.to_vec();
    loop {
        let hits: Vec<usize> = (0..w.len().saturating_sub(1))
            .filter(|&i| w[i].open && !w[i + 1].open && w[i].tag == w[i + 1].tag)
            .collect();
        match hits.choose(r) {
            Some(&i) => {
                w.drain(i..i + 2);
            }
            None => return w,
        }
    }
}

pub fn naive_is_dyck(w: &[Letter]) -> bool {
    naive_reduce(w).is_empty()
}

pub fn naive_is_prime(w: &[Letter]) -> bool {
    !w.is_empty() && naive_is_dyck(w) && (1..w.len()).all(|i| !naive_is_dyck(&w[..i]))
}

/// Splits a product of primes at its shortest Dyck prefixes.
pub fn naive_factors(w: &[Letter]) -> Option<Vec<Word>> {
    let mut out = Vec::new();
    let mut rest = w;
    while !rest.is_empty() {
        let cut = (1..=rest.len()).find(|&i| naive_is_dyck(&rest[..i]))?;
        out.push(rest[..cut].to_vec());
        rest = &rest[cut..];
    }
    Some(out)
}

pub fn naive_trace(p: &[Letter]) -> Option<Vec<usize>> {
    if !naive_is_prime(p) {
        return None;
    }
    let kids = naive_factors(&p[1..p.len() - 1])?;
    Some(kids.iter().map(|k| k[0].tag).collect())
}

/// Every factor of `w` that is a Dyck prime.
pub fn prime_factors(w: &[Letter]) -> Vec<Word> {
    let mut out = Vec::new();
    for i in 0..w.len() {
        for j in i + 1..=w.len() {
            if naive_is_prime(&w[i..j]) {
                out.push(w[i..j].to_vec());
            }
        }
    }
    out
}

/// Max prefix weight.
pub fn naive_height(w: &[Letter]) -> i64 {
    (0..=w.len())
        .map(|i| {
            w[..i]
                .iter()
                .map(|l| if l.open { 1 } else { -1 })
                .sum::<i64>()
        })
        .max()
        .unwrap()
}

/// Dyck primes of length at most `max_len`, optionally with a fixed root.
pub fn primes_up_to(ntags: usize, root: Option<usize>, max_len: usize) -> Vec<Word> {
    let mut forests: Vec<Vec<Word>> = Vec::new();
    // forests[b]: forests of length exactly b
    let mut primes: Vec<Vec<Word>> = vec![Vec::new(); max_len + 1];
    forests.push(vec![Vec::new()]);
    for b in 1..=max_len {
        if b >= 2 {
            for f in &forests[b - 2] {
                for t in 0..ntags {
                    let mut p = vec![Letter::open(t)];
                    p.extend_from_slice(f);
                    p.push(Letter::close(t));
                    primes[b].push(p);
                }
            }
        }
        let mut fb = Vec::new();
        for first in 2..=b {
            for p in &primes[first] {
                for rest in &forests[b - first] {
                    let mut w = p.clone();
                    w.extend_from_slice(rest);
                    fb.push(w);
                }
            }
        }
        forests.push(fb);
    }
    primes
        .into_iter()
        .flatten()
        .filter(|p| root.is_none_or(|r| p[0].tag == r))
        .collect()
}

// ---------------------------------------------------------------- regexes

/// End positions reachable by matching `r` against `w` from `i`.
pub fn regex_ends(r: &Regex, w: &[usize], i: usize) -> BTreeSet<usize> {
    match r {
        Regex::Empty => BTreeSet::new(),
        Regex::Epsilon => BTreeSet::from([i]),
        Regex::Symbol(s) => {
            if w.get(i) == Some(s) {
                BTreeSet::from([i + 1])
            } else {
                BTreeSet::new()
            }
        }
        Regex::Concat(parts) => {
            let mut at = BTreeSet::from([i]);
            for p in parts {
                at = at.iter().flat_map(|&j| regex_ends(p, w, j)).collect();
            }
            at
        }
        Regex::Union(parts) => parts.iter().flat_map(|p| regex_ends(p, w, i)).collect(),
        Regex::Star(inner) => {
            let mut seen = BTreeSet::from([i]);
            let mut todo = vec![i];
            while let Some(j) = todo.pop() {
                for k in regex_ends(inner, w, j) {
                    if seen.insert(k) {
                        todo.push(k);
                    }
                }
            }
            seen
        }
        Regex::Plus(inner) => regex_ends(inner, w, i)
            .into_iter()
            .flat_map(|j| regex_ends(&Regex::Star(inner.clone()), w, j))
            .collect(),
        Regex::Optional(inner) => {
            let mut s = regex_ends(inner, w, i);
            s.insert(i);
            s
        }
    }
}

pub fn regex_matches(r: &Regex, w: &[usize]) -> bool {
    regex_ends(r, w, 0).contains(&w.len())
}

pub fn random_regex(r: &mut ChaCha8Rng, symbols: &[usize], depth: usize) -> Regex {
    if symbols.is_empty() {
        return Regex::Epsilon;
    }
    if depth == 0 || r.gen_bool(0.35) {
        return if r.gen_bool(0.1) {
            Regex::Epsilon
        } else {
            Regex::Symbol(*symbols.choose(r).unwrap())
        };
    }
    let d = depth - 1;
    match r.gen_range(0..6) {
        0 | 1 => Regex::Concat(vec![
            random_regex(r, symbols, d),
            random_regex(r, symbols, d),
        ]),
        2 | 3 => Regex::Union(vec![
            random_regex(r, symbols, d),
            random_regex(r, symbols, d),
        ]),
        4 => Regex::Star(Box::new(random_regex(r, symbols, d))),
        _ => Regex::Optional(Box::new(random_regex(r, symbols, d))),
    }
}

// ---------------------------------------------------------------- XML-grammars

/// An XML-grammar kept as regexes, for the oracles.
#[derive(Clone, Debug)]
pub struct Spec {
    pub tags: TagAlphabet,
    pub rules: Vec<Regex>,
    pub axiom: usize,
}

impl Spec {
    pub fn grammar(&self) -> XmlGrammar {
        XmlGrammar::from_regexes(self.tags.clone(), &self.rules, self.axiom).unwrap()
    }

    /// Recursive membership: a prime rooted at `tag` whose trace matches
    /// the rule and whose children are generated in turn.
    pub fn generates_from(&self, tag: usize, w: &[Letter]) -> bool {
        if !naive_is_prime(w) || w[0].tag != tag || w[0].tag >= self.tags.len() {
            return false;
        }
        let Some(kids) = naive_factors(&w[1..w.len() - 1]) else {
            return false;
        };
        let tr: Vec<usize> = kids.iter().map(|k| k[0].tag).collect();
        regex_matches(&self.rules[tag], &tr)
            && kids.iter().all(|k| self.generates_from(k[0].tag, k))
    }

    pub fn generates(&self, w: &[Letter]) -> bool {
        self.generates_from(self.axiom, w)
    }

    /// All generated words up to `max_len`, by filtering every prime.
    pub fn words(&self, max_len: usize) -> BTreeSet<Word> {
        primes_up_to(self.tags.len(), Some(self.axiom), max_len)
            .into_iter()
            .filter(|w| self.generates(w))
            .collect()
    }

    /// Tags that derive some finite tree, by fixpoint over the rules.
    pub fn productive(&self) -> Vec<bool> {
        let n = self.tags.len();
        let mut prod = vec![false; n];
        loop {
            let mut changed = false;
            for t in 0..n {
                if !prod[t] && has_word_over(&self.rules[t], &prod) {
                    prod[t] = true;
                    changed = true;
                }
            }
            if !changed {
                return prod;
            }
        }
    }

    /// Tag dependency edges `t → s` for every symbol `s` in a productive
    /// word of the rule of `t`, approximated by symbols of the regex that
    /// can occur in a word over productive tags.
    pub fn has_cycle(&self) -> bool {
        let prod = self.productive();
        let n = self.tags.len();
        let edges: Vec<Vec<usize>> = (0..n)
            .map(|t| {
                if !prod[t] {
                    return Vec::new();
                }
                usable_symbols(&self.rules[t], &prod).into_iter().collect()
            })
            .collect();
        // reachable from the axiom
        let mut seen = vec![false; n];
        let mut stack = vec![self.axiom];
        while let Some(t) = stack.pop() {
            if !std::mem::replace(&mut seen[t], true) {
                stack.extend(edges[t].iter().copied());
            }
        }
        (0..n).filter(|&t| seen[t]).any(|t| {
            let mut vis = vec![false; n];
            let mut st = edges[t].clone();
            while let Some(u) = st.pop() {
                if u == t {
                    return true;
                }
                if !std::mem::replace(&mut vis[u], true) {
                    st.extend(edges[u].iter().copied());
                }
            }
            false
        })
    }
}

fn has_word_over(r: &Regex, ok: &[bool]) -> bool {
    match r {
        Regex::Empty => false,
        Regex::Epsilon | Regex::Star(_) | Regex::Optional(_) => true,
        Regex::Symbol(s) => ok[*s],
        Regex::Concat(ps) => ps.iter().all(|p| has_word_over(p, ok)),
        Regex::Union(ps) => ps.iter().any(|p| has_word_over(p, ok)),
        Regex::Plus(p) => has_word_over(p, ok),
    }
}

/// Symbols occurring in some word of `r` whose letters are all in `ok`.
fn usable_symbols(r: &Regex, ok: &[bool]) -> BTreeSet<usize> {
    if !has_word_over(r, ok) {
        return BTreeSet::new();
    }
    match r {
        Regex::Empty | Regex::Epsilon => BTreeSet::new(),
        Regex::Symbol(s) => BTreeSet::from([*s]),
        Regex::Concat(ps) | Regex::Union(ps) => {
            ps.iter().flat_map(|p| usable_symbols(p, ok)).collect()
        }
        Regex::Star(p) | Regex::Optional(p) | Regex::Plus(p) => usable_symbols(p, ok),
    }
}

/// Tag `i` only refers to later tags; the last one is a leaf.
pub fn random_sequential(r: &mut ChaCha8Rng, ntags: usize) -> Spec {
    let rules = (0..ntags)
        .map(|i| {
            let later: Vec<usize> = (i + 1..ntags).collect();
            random_regex(r, &later, 3)
        })
        .collect();
    Spec {
        tags: tags(ntags),
        rules,
        axiom: 0,
    }
}

/// Every tag stays productive through a sequential fallback; a random
/// regex over all tags is added on top. Regenerated until the tag graph
/// has a cycle reachable from the axiom.
pub fn random_cyclic(r: &mut ChaCha8Rng, ntags: usize) -> Spec {
    loop {
        let spec = random_spec(r, ntags);
        if spec.has_cycle() {
            return spec;
        }
    }
}

pub fn random_spec(r: &mut ChaCha8Rng, ntags: usize) -> Spec {
    let all: Vec<usize> = (0..ntags).collect();
    let rules = (0..ntags)
        .map(|i| {
            let later: Vec<usize> = (i + 1..ntags).collect();
            let base = random_regex(r, &later, 2);
            if r.gen_bool(0.7) {
                Regex::Union(vec![base, random_regex(r, &all, 2)])
            } else {
                base
            }
        })
        .collect();
    Spec {
        tags: tags(ntags),
        rules,
        axiom: 0,
    }
}

// ---------------------------------------------------------------- CFGs

pub fn cfg(text: &str) -> Cfg {
    Cfg::parse(text, TagAlphabet::new(), false).unwrap()
}

/// Words of length at most `max_len`, as the least fixpoint of truncated
/// word sets per nonterminal.
pub fn cfg_words(g: &Cfg, max_len: usize) -> BTreeSet<Word> {
    let n = g.nonterminals().len();
    let mut sets: Vec<BTreeSet<Word>> = vec![BTreeSet::new(); n];
    loop {
        let mut changed = false;
        for p in g.productions() {
            let mut partial: BTreeSet<Word> = BTreeSet::from([Vec::new()]);
            for sym in &p.rhs {
                let mut next = BTreeSet::new();
                for pre in &partial {
                    match sym {
                        Symbol::Terminal(l) => {
                            if pre.len() < max_len {
                                let mut w = pre.clone();
                                w.push(*l);
                                next.insert(w);
                            }
                        }
                        Symbol::Nonterminal(x) => {
                            for y in &sets[*x] {
                                if pre.len() + y.len() <= max_len {
                                    let mut w = pre.clone();
                                    w.extend_from_slice(y);
                                    next.insert(w);
                                }
                            }
                        }
                    }
                }
                partial = next;
            }
            for w in partial {
                changed |= sets[p.lhs].insert(w);
            }
        }
        if !changed {
            return std::mem::take(&mut sets[g.axiom()]);
        }
    }
}

/// Small random grammars over `a, b` mixing balanced and unbalanced
/// right-hand sides; retried until the language is nonempty.
pub fn random_cfg(r: &mut ChaCha8Rng) -> Cfg {
    let names: Vec<String> = ["S", "X", "Y"].iter().map(|s| s.to_string()).collect();
    let t = tags(2);
    loop {
        let mut productions = Vec::new();
        for lhs in 0..names.len() {
            for _ in 0..r.gen_range(1..=3) {
                let nt = |r: &mut ChaCha8Rng| Symbol::Nonterminal(r.gen_range(0..names.len()));
                let rhs = match r.gen_range(0..10) {
                    0..=4 => {
                        let tag = r.gen_range(0..2);
                        let mut v = vec![Symbol::Terminal(Letter::open(tag))];
                        for _ in 0..r.gen_range(0..=2) {
                            v.push(nt(r));
                        }
                        v.push(Symbol::Terminal(Letter::close(tag)));
                        v
                    }
                    5 | 6 => vec![nt(r), nt(r)],
                    7 => Vec::new(),
                    _ => {
                        let mut v: Vec<Symbol> = (0..r.gen_range(1..=2))
                            .map(|_| {
                                Symbol::Terminal(Letter {
                                    tag: r.gen_range(0..2),
                                    open: r.gen_bool(0.5),
                                })
                            })
                            .collect();
                        if r.gen_bool(0.5) {
                            v.push(nt(r));
                        }
                        v
                    }
                };
                productions.push(Production { lhs, rhs });
            }
        }
        let g = Cfg::new(t.clone(), names.clone(), productions, 0).unwrap();
        if g.reduce().is_ok() {
            return g;
        }
    }
}

/// Largest trace length over every prime factor of every word.
pub fn max_trace_width(words: &BTreeSet<Word>) -> usize {
    words
        .iter()
        .flat_map(|w| prime_factors(w))
        .filter_map(|p| naive_trace(&p))
        .map(|t| t.len())
        .max()
        .unwrap_or(0)
}

/// Surface words seen in a finite language: traces of prime factors,
/// keyed by root tag.
pub fn observed_surfaces(words: &BTreeSet<Word>) -> BTreeMap<usize, BTreeSet<Vec<usize>>> {
    let mut out: BTreeMap<usize, BTreeSet<Vec<usize>>> = BTreeMap::new();
    for w in words {
        for p in prime_factors(w) {
            let root = p[0].tag;
            out.entry(root)
                .or_default()
                .insert(naive_trace(&p).unwrap());
        }
    }
    out
}

/// Any finite tree per productive tag, found by growing the set of tags
/// with a known tree.
pub fn some_trees(spec: &Spec) -> Vec<Option<DocTree>> {
    let n = spec.tags.len();
    let mut trees: Vec<Option<DocTree>> = vec![None; n];
    loop {
        let mut changed = false;
        for t in 0..n {
            if trees[t].is_some() {
                continue;
            }
            let known: Vec<bool> = trees.iter().map(Option::is_some).collect();
            if let Some(tr) = short_word_over(&spec.rules[t], &known, None) {
                let kids = tr.iter().map(|&s| trees[s].clone().unwrap()).collect();
                trees[t] = Some(DocTree::new(t, kids));
                changed = true;
            }
        }
        if !changed {
            return trees;
        }
    }
}

/// A word of `r` over the allowed symbols, containing `need` if given,
/// searched by increasing length up to 6.
pub fn short_word_over(r: &Regex, ok: &[bool], need: Option<usize>) -> Option<Vec<usize>> {
    let syms: Vec<usize> = (0..ok.len()).filter(|&s| ok[s]).collect();
    let mut layer: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..=6 {
        for w in &layer {
            if need.is_none_or(|x| w.contains(&x)) && regex_matches(r, w) {
                return Some(w.clone());
            }
        }
        layer = layer
            .iter()
            .flat_map(|w| {
                syms.iter().map(move |&s| {
                    let mut v = w.clone();
                    v.push(s);
                    v
                })
            })
            .collect();
    }
    None
}
