//! Regular languages of Dyck primes given by automata over `T = A ∪ Ā`:
//! shape checks, height, surfaces through good pairs, and the XML test.

mod engine;
mod surfaces;

use std::collections::{BTreeSet, VecDeque};

use crate::automata::{Alphabet, Dfa};
use crate::dyck::{Letter, TagAlphabet};
use crate::error::{Error, Result};

pub use surfaces::GoodPairTable;

/// A minimal automaton over `T = A ∪ Ā` in the layout `a /a b /b ...`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TagDfa {
    tags: TagAlphabet,
    dfa: Dfa,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DyckCheck {
    /// Every word is a Dyck prime starting with this tag.
    Prime(usize),
    Rejected(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HeightReport {
    Finite(i64),
    /// A cycle through `state` reading `cycle`, of nonzero weight.
    Infinite {
        state: usize,
        cycle: Vec<Letter>,
    },
}

fn weight(symbol: usize) -> i64 {
    if symbol.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

impl TagDfa {
    /// `dfa` must read `tags.symbol_names()`.
    pub fn new(tags: TagAlphabet, dfa: &Dfa) -> Result<Self> {
        if dfa.alphabet() != &Alphabet::new(tags.symbol_names()) {
            return Err(Error::AlphabetMismatch);
        }
        Ok(TagDfa {
            tags,
            dfa: dfa.minimize(),
        })
    }

    /// Re-expresses an automaton whose symbols are tag tokens (`a`, `/a`).
    /// With `declared`, exactly those tags make up the alphabet.
    pub fn from_token_dfa(dfa: &Dfa, declared: Option<&TagAlphabet>) -> Result<Self> {
        let mut tags = declared.cloned().unwrap_or_default();
        for name in dfa.alphabet().names() {
            let tag = name.strip_prefix('/').unwrap_or(name);
            if declared.is_none() {
                tags.insert(tag)?;
            }
        }
        let mut map = Vec::new();
        for name in dfa.alphabet().names() {
            map.push(tags.letter(name)?.symbol());
        }
        let t = Alphabet::new(tags.symbol_names());
        let dfa = dfa.with_alphabet(&t, &map);
        Ok(TagDfa { tags, dfa })
    }

    /// The minimal automaton of a finite set of words.
    pub fn from_words(tags: TagAlphabet, words: &[Vec<Letter>]) -> Self {
        let t = Alphabet::new(tags.symbol_names());
        let symbols: Vec<Vec<usize>> = words
            .iter()
            .map(|w| w.iter().map(|l| l.symbol()).collect())
            .collect();
        TagDfa {
            tags,
            dfa: Dfa::from_words(t, &symbols).minimize(),
        }
    }

    pub fn tags(&self) -> &TagAlphabet {
        &self.tags
    }

    pub fn dfa(&self) -> &Dfa {
        &self.dfa
    }

    pub fn accepts(&self, word: &[Letter]) -> bool {
        let symbols: Vec<usize> = word.iter().map(|l| l.symbol()).collect();
        self.dfa.accepts(&symbols)
    }

    /// Accepted words of length at most `max_len`.
    pub fn enumerate(&self, max_len: usize) -> Vec<Vec<Letter>> {
        self.dfa
            .enumerate(max_len)
            .into_iter()
            .map(|w| w.into_iter().map(Letter::from_symbol).collect())
            .collect()
    }

    fn live_edges(&self) -> (Vec<bool>, Vec<Vec<(usize, usize)>>) {
        let live = self.dfa.live();
        let n = self.dfa.num_states();
        let mut out = vec![Vec::new(); n];
        for q in (0..n).filter(|&q| live[q]) {
            for s in 0..self.dfa.alphabet().len() {
                let r = self.dfa.next(q, s);
                if live[r] {
                    out[q].push((s, r));
                }
            }
        }
        (live, out)
    }

    /// Prefix weight of each live state, if it does not depend on the path.
    fn state_weights(&self) -> Option<Vec<Option<i64>>> {
        let (live, edges) = self.live_edges();
        let mut w = vec![None; self.dfa.num_states()];
        let init = self.dfa.initial();
        if !live[init] {
            return Some(w);
        }
        w[init] = Some(0);
        let mut queue = VecDeque::from([init]);
        while let Some(q) = queue.pop_front() {
            let wq = w[q].unwrap();
            for &(s, r) in &edges[q] {
                let wr = wq + weight(s);
                match w[r] {
                    None => {
                        w[r] = Some(wr);
                        queue.push_back(r);
                    }
                    Some(x) if x != wr => return None,
                    Some(_) => {}
                }
            }
        }
        Some(w)
    }

    /// Root tags if every accepted word is a Dyck prime, otherwise the
    /// first violated condition.
    pub fn prime_roots(&self) -> std::result::Result<BTreeSet<usize>, String> {
        let (live, edges) = self.live_edges();
        let init = self.dfa.initial();
        if !live[init] {
            return Err("the language is empty".into());
        }
        let Some(w) = self.state_weights() else {
            return Err("some cycle or pair of paths changes the nesting depth".into());
        };
        let n = self.dfa.num_states();
        if self.dfa.is_final(init) {
            return Err("the empty word is accepted".into());
        }
        let mut roots = BTreeSet::new();
        for &(s, _) in &edges[init] {
            let l = Letter::from_symbol(s);
            if !l.open {
                return Err(format!(
                    "a word starts with the closing tag /{}",
                    self.tags.name(l.tag)
                ));
            }
            roots.insert(l.tag);
        }
        for q in (0..n).filter(|&q| live[q]) {
            let wq = w[q].unwrap();
            if wq < 0 {
                return Err("a prefix closes more tags than it opens".into());
            }
            if self.dfa.is_final(q) && wq != 0 {
                return Err("an accepted word leaves tags open".into());
            }
            if wq == 0 && q != init && !edges[q].is_empty() {
                return Err("an accepted word is a product of several primes".into());
            }
            if edges[q].iter().any(|&(_, r)| r == init) {
                return Err("an accepted word is a product of several primes".into());
            }
        }
        // every opening letter must be closed by its own closing tag
        for p in (0..n).filter(|&p| live[p]) {
            for &(s, p1) in &edges[p] {
                let l = Letter::from_symbol(s);
                if !l.open {
                    continue;
                }
                let level = w[p1].unwrap();
                let mut seen = vec![false; n];
                seen[p1] = true;
                let mut stack = vec![p1];
                while let Some(r) = stack.pop() {
                    for &(s2, r2) in &edges[r] {
                        if w[r2].unwrap() < level {
                            if s2 != l.symbol() + 1 {
                                let got = Letter::from_symbol(s2);
                                return Err(format!(
                                    "tag {} is closed by /{}",
                                    self.tags.name(l.tag),
                                    self.tags.name(got.tag)
                                ));
                            }
                        } else if !seen[r2] {
                            seen[r2] = true;
                            stack.push(r2);
                        }
                    }
                }
            }
        }
        Ok(roots)
    }

    /// Decides `K ⊆ D_a` for some tag `a`.
    pub fn check_dyck(&self) -> DyckCheck {
        match self.prime_roots() {
            Ok(roots) if roots.len() == 1 => DyckCheck::Prime(*roots.iter().next().unwrap()),
            Ok(_) => DyckCheck::Rejected("accepted words start with different tags".into()),
            Err(reason) => DyckCheck::Rejected(reason),
        }
    }

    /// Maximal prefix weight over accepted words, or a cycle of nonzero
    /// weight when it is unbounded.
    pub fn height(&self) -> HeightReport {
        let (live, edges) = self.live_edges();
        let n = self.dfa.num_states();
        let comp = scc(n, &live, &edges);
        // potentials inside each strongly connected component
        let mut pot: Vec<Option<i64>> = vec![None; n];
        let mut root_of = vec![usize::MAX; n];
        for start in (0..n).filter(|&q| live[q]) {
            if pot[start].is_some() {
                continue;
            }
            pot[start] = Some(0);
            root_of[start] = start;
            let mut queue = VecDeque::from([start]);
            while let Some(q) = queue.pop_front() {
                for &(s, r) in &edges[q] {
                    if comp[r] != comp[q] {
                        continue;
                    }
                    let pr = pot[q].unwrap() + weight(s);
                    match pot[r] {
                        None => {
                            pot[r] = Some(pr);
                            root_of[r] = start;
                            queue.push_back(r);
                        }
                        Some(x) if x != pr => {
                            return self.nonzero_cycle(start, q, s, r, &comp, &edges);
                        }
                        Some(_) => {}
                    }
                }
            }
        }
        // longest prefix weight through the component DAG
        let order = topo_components(n, &live, &edges, &comp);
        let mut base: Vec<Option<i64>> = vec![None; n];
        let init = self.dfa.initial();
        if !live[init] {
            return HeightReport::Finite(0);
        }
        base[comp[init]] = Some(-pot[init].unwrap());
        let mut best = 0;
        for c in order {
            let Some(b) = base[c] else { continue };
            for q in (0..n).filter(|&q| live[q] && comp[q] == c) {
                let dq = b + pot[q].unwrap();
                best = best.max(dq);
                for &(s, r) in &edges[q] {
                    if comp[r] != c {
                        let cand = dq + weight(s) - pot[r].unwrap();
                        if base[comp[r]].is_none_or(|x| cand > x) {
                            base[comp[r]] = Some(cand);
                        }
                    }
                }
            }
        }
        HeightReport::Finite(best)
    }

    /// Builds a cycle of nonzero weight from an edge `u -s-> v` that
    /// disagrees with the potentials rooted at `root`.
    fn nonzero_cycle(
        &self,
        root: usize,
        u: usize,
        s: usize,
        v: usize,
        comp: &[usize],
        edges: &[Vec<(usize, usize)>],
    ) -> HeightReport {
        let path = |from: usize, to: usize| -> Vec<usize> {
            let n = edges.len();
            let mut prev: Vec<Option<(usize, usize)>> = vec![None; n];
            let mut seen = vec![false; n];
            seen[from] = true;
            let mut queue = VecDeque::from([from]);
            while let Some(q) = queue.pop_front() {
                if q == to {
                    break;
                }
                for &(sym, r) in &edges[q] {
                    if comp[r] == comp[from] && !seen[r] {
                        seen[r] = true;
                        prev[r] = Some((q, sym));
                        queue.push_back(r);
                    }
                }
            }
            let mut out = Vec::new();
            let mut cur = to;
            while cur != from {
                let (p, sym) = prev[cur].expect("same component");
                out.push(sym);
                cur = p;
            }
            out.reverse();
            out
        };
        let mut first = path(root, u);
        first.push(s);
        first.extend(path(v, root));
        let mut second = path(root, v);
        second.extend(path(v, root));
        let total = |c: &[usize]| c.iter().map(|&x| weight(x)).sum::<i64>();
        let cycle = if total(&first) != 0 { first } else { second };
        debug_assert_ne!(total(&cycle), 0);
        HeightReport::Infinite {
            state: root,
            cycle: cycle.into_iter().map(Letter::from_symbol).collect(),
        }
    }
}

/// Tarjan's algorithm over live states; returns a component id per state.
fn scc(n: usize, live: &[bool], edges: &[Vec<(usize, usize)>]) -> Vec<usize> {
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comp = vec![usize::MAX; n];
    let mut next_index = 0;
    let mut next_comp = 0;
    for root in (0..n).filter(|&q| live[q]) {
        if index[root] != usize::MAX {
            continue;
        }
        let mut work: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut i)) = work.last_mut() {
            if *i < edges[v].len() {
                let w = edges[v][*i].1;
                *i += 1;
                if index[w] == usize::MAX {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    work.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                work.pop();
                if let Some(&(parent, _)) = work.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp[w] = next_comp;
                        if w == v {
                            break;
                        }
                    }
                    next_comp += 1;
                }
            }
        }
    }
    comp
}

/// Components in an order where every edge goes forward.
fn topo_components(
    n: usize,
    live: &[bool],
    edges: &[Vec<(usize, usize)>],
    comp: &[usize],
) -> Vec<usize> {
    let k = comp
        .iter()
        .filter(|&&c| c != usize::MAX)
        .max()
        .map_or(0, |m| m + 1);
    let mut indeg = vec![0; k];
    let mut succ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); k];
    for q in (0..n).filter(|&q| live[q]) {
        for &(_, r) in &edges[q] {
            if comp[r] != comp[q] && succ[comp[q]].insert(comp[r]) {
                indeg[comp[r]] += 1;
            }
        }
    }
    let mut queue: VecDeque<usize> = (0..k).filter(|&c| indeg[c] == 0).collect();
    let mut order = Vec::new();
    while let Some(c) = queue.pop_front() {
        order.push(c);
        for &d in &succ[c] {
            indeg[d] -= 1;
            if indeg[d] == 0 {
                queue.push_back(d);
            }
        }
    }
    order
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::automata::Regex;
    use crate::dyck::TaggedWord;

    pub(crate) fn words(names: &[&str], list: &[&str]) -> TagDfa {
        let tags = TagAlphabet::from_names(names.iter().copied()).unwrap();
        let ws: Vec<Vec<Letter>> = list
            .iter()
            .map(|w| TaggedWord::parse(w, &tags).unwrap().0)
            .collect();
        TagDfa::from_words(tags, &ws)
    }

    pub(crate) fn regex(names: &[&str], text: &str) -> TagDfa {
        let tags = TagAlphabet::from_names(names.iter().copied()).unwrap();
        let t = Alphabet::new(tags.symbol_names());
        let r = Regex::parse(text, |n| Ok(tags.letter(n)?.symbol())).unwrap();
        TagDfa::new(tags, &Dfa::from_regex(&r, &t)).unwrap()
    }

    #[test]
    fn dyck_checks() {
        assert_eq!(
            words(&["a", "b"], &["a b /b /a", "a /a"]).check_dyck(),
            DyckCheck::Prime(0)
        );
        assert!(matches!(
            words(&["a"], &["a /a a /a"]).check_dyck(),
            DyckCheck::Rejected(r) if r.contains("several primes")
        ));
        assert!(matches!(
            regex(&["a"], "a*").check_dyck(),
            DyckCheck::Rejected(_)
        ));
        assert!(matches!(
            words(&["a", "b"], &["a b /a /b"]).check_dyck(),
            DyckCheck::Rejected(r) if r.contains("closed by")
        ));
        assert!(matches!(
            words(&["a", "b"], &["a /a", "b /b"]).check_dyck(),
            DyckCheck::Rejected(_)
        ));
        assert_eq!(
            regex(&["a", "b"], "a (b /b)* /a").check_dyck(),
            DyckCheck::Prime(0)
        );
        assert!(matches!(
            regex(&["a"], "(a /a)*").check_dyck(),
            DyckCheck::Rejected(_)
        ));
    }

    #[test]
    fn heights() {
        assert_eq!(
            words(&["a", "b"], &["a b /b /a"]).height(),
            HeightReport::Finite(2)
        );
        assert_eq!(
            regex(&["a", "b"], "a /a (b /b)*").height(),
            HeightReport::Finite(1)
        );
        match regex(&["a"], "a*").height() {
            HeightReport::Infinite { cycle, .. } => assert_eq!(cycle, vec![Letter::open(0)]),
            other => panic!("{other:?}"),
        }
        match regex(&["a"], "a* /a*").height() {
            HeightReport::Infinite { cycle, .. } => assert_eq!(cycle.len(), 1),
            other => panic!("{other:?}"),
        }
        assert_eq!(regex(&["a"], "{}").height(), HeightReport::Finite(0));
    }

    #[test]
    fn token_dfa_is_remapped() {
        let d = Dfa::parse_text("alphabet: /b b\nstates: 3\ninitial: 0\nfinal: 2\n0 b 1\n1 /b 2\n")
            .unwrap();
        let k = TagDfa::from_token_dfa(&d, None).unwrap();
        assert_eq!(k.tags().names(), &["b"]);
        assert!(k.accepts(&[Letter::open(0), Letter::close(0)]));
        assert!(
            TagDfa::from_token_dfa(&d, Some(&TagAlphabet::from_names(["a"]).unwrap())).is_err()
        );
    }
}
