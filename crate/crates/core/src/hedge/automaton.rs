use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BinaryHeap, HashMap};

use super::{BalancedGrammar, DocTree};
use crate::automata::{Alphabet, Dfa, Nfa};
use crate::dyck::{Letter, TagAlphabet};
use crate::error::{Error, Result};
use crate::xml::{SurfaceFamily, XmlGrammar};

/// Default cap on subset-states created by determinization.
pub const DEFAULT_BUDGET: usize = 100_000;

/// Bottom-up automaton on document trees. A node with tag `a` whose
/// children evaluate to `q₁ … qₙ` may evaluate to `q` when the horizontal
/// automaton of `(q, a)` accepts `q₁ … qₙ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HedgeAutomaton {
    tags: TagAlphabet,
    names: Vec<String>,
    states: Alphabet,
    rules: BTreeMap<(usize, usize), Dfa>,
    accepting: Vec<bool>,
}

pub(crate) fn shortlex(x: &[Letter], y: &[Letter]) -> Ordering {
    x.len().cmp(&y.len()).then_with(|| x.cmp(y))
}

/// Shortlex-least words reaching each state of `dfa` when symbol `s` costs
/// the word `cost[s]`; unavailable symbols are `None`.
fn cheapest_paths(dfa: &Dfa, cost: &[Option<Vec<Letter>>]) -> Vec<Option<Vec<Letter>>> {
    let mut best: Vec<Option<Vec<Letter>>> = vec![None; dfa.num_states()];
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((0usize, Vec::<Letter>::new(), dfa.initial())));
    while let Some(Reverse((len, word, q))) = heap.pop() {
        if best[q].is_some() {
            continue;
        }
        for (s, c) in cost.iter().enumerate() {
            let Some(c) = c else { continue };
            let r = dfa.next(q, s);
            if best[r].is_none() {
                let mut w = word.clone();
                w.extend_from_slice(c);
                heap.push(Reverse((len + c.len(), w, r)));
            }
        }
        best[q] = Some(word);
    }
    best
}

impl HedgeAutomaton {
    /// `rules` maps `(state, tag)` to a horizontal automaton over the states.
    pub fn new(
        tags: TagAlphabet,
        names: Vec<String>,
        rules: BTreeMap<(usize, usize), Dfa>,
        accepting: Vec<bool>,
    ) -> Result<Self> {
        let states = Alphabet::new(names.iter().cloned());
        if accepting.len() != names.len()
            || rules
                .iter()
                .any(|(&(q, a), d)| q >= names.len() || a >= tags.len() || d.alphabet() != &states)
        {
            return Err(Error::AlphabetMismatch);
        }
        Ok(HedgeAutomaton {
            tags,
            names,
            states,
            rules,
            accepting,
        })
    }

    /// One state per useful tag; deterministic.
    pub fn from_xml(g: &XmlGrammar) -> HedgeAutomaton {
        match BalancedGrammar::from_xml(g) {
            Ok(b) => b.to_hedge(),
            Err(_) => {
                HedgeAutomaton::new(g.tags().clone(), Vec::new(), BTreeMap::new(), Vec::new())
                    .expect("empty automaton")
            }
        }
    }

    pub fn tags(&self) -> &TagAlphabet {
        &self.tags
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn state_names(&self) -> &[String] {
        &self.names
    }

    pub fn states(&self) -> &Alphabet {
        &self.states
    }

    pub fn rule(&self, state: usize, tag: usize) -> Option<&Dfa> {
        self.rules.get(&(state, tag))
    }

    pub fn rules(&self) -> &BTreeMap<(usize, usize), Dfa> {
        &self.rules
    }

    pub fn is_accepting(&self, state: usize) -> bool {
        self.accepting[state]
    }

    /// Horizontal languages of distinct states under one tag are disjoint.
    pub fn is_deterministic(&self) -> bool {
        let list: Vec<(&(usize, usize), &Dfa)> = self.rules.iter().collect();
        for (i, ((_, a), d)) in list.iter().enumerate() {
            for ((_, b), e) in &list[i + 1..] {
                if a == b && !d.intersection(e).expect("same alphabet").is_empty() {
                    return false;
                }
            }
        }
        true
    }

    /// States the tree may evaluate to.
    pub fn run(&self, tree: &DocTree) -> Vec<bool> {
        let children: Vec<Vec<usize>> = tree
            .children
            .iter()
            .map(|c| {
                let set = self.run(c);
                (0..set.len()).filter(|&q| set[q]).collect()
            })
            .collect();
        let mut out = vec![false; self.num_states()];
        if tree.tag >= self.tags.len() {
            return out;
        }
        for (&(q, a), d) in &self.rules {
            if a != tree.tag || out[q] {
                continue;
            }
            let mut cur = vec![d.initial()];
            for set in &children {
                let mut next: Vec<usize> = cur
                    .iter()
                    .flat_map(|&p| set.iter().map(move |&s| d.next(p, s)))
                    .collect();
                next.sort_unstable();
                next.dedup();
                cur = next;
            }
            out[q] = cur.iter().any(|&p| d.is_final(p));
        }
        out
    }

    pub fn accepts(&self, tree: &DocTree) -> bool {
        self.run(tree)
            .iter()
            .zip(&self.accepting)
            .any(|(r, a)| *r && *a)
    }

    /// Rules whose horizontal language has a word over productive states,
    /// and the productive states.
    fn productive(&self) -> (Vec<bool>, BTreeMap<(usize, usize), Dfa>) {
        let mut productive = vec![false; self.num_states()];
        let mut changed = true;
        while changed {
            changed = false;
            for (&(q, _), d) in &self.rules {
                if !productive[q] && !d.restrict(&productive).is_empty() {
                    productive[q] = true;
                    changed = true;
                }
            }
        }
        let rules = self
            .rules
            .iter()
            .filter_map(|(&k, d)| {
                let r = d.restrict(&productive);
                (!r.is_empty()).then(|| (k, r.minimize()))
            })
            .collect();
        (productive, rules)
    }

    pub fn is_empty(&self) -> bool {
        let (productive, _) = self.productive();
        !productive
            .iter()
            .zip(&self.accepting)
            .any(|(p, a)| *p && *a)
    }

    /// A smallest tree evaluating to each state (node count, then the
    /// shortlex order of the encoding), or `None` for unproductive states.
    pub fn smallest_trees(&self) -> Vec<Option<DocTree>> {
        let n = self.num_states();
        let mut best: Vec<Option<Vec<Letter>>> = vec![None; n];
        // Knuth's generalization of Dijkstra: settle the cheapest state
        // among those computable from settled ones.
        loop {
            let mut pick: Option<(usize, Vec<Letter>)> = None;
            for (&(q, a), d) in &self.rules {
                if best[q].is_some() {
                    continue;
                }
                let paths = cheapest_paths(d, &best);
                for (p, w) in paths.into_iter().enumerate() {
                    let Some(w) = w else { continue };
                    if !d.is_final(p) {
                        continue;
                    }
                    let mut word = Vec::with_capacity(w.len() + 2);
                    word.push(Letter::open(a));
                    word.extend(w);
                    word.push(Letter::close(a));
                    if pick
                        .as_ref()
                        .is_none_or(|(_, b)| shortlex(&word, b) == Ordering::Less)
                    {
                        pick = Some((q, word));
                    }
                }
            }
            match pick {
                Some((q, w)) => best[q] = Some(w),
                None => break,
            }
        }
        best.into_iter()
            .map(|w| w.map(|w| DocTree::from_word(&w).expect("built as a prime")))
            .collect()
    }

    /// A smallest accepted tree.
    pub fn smallest_accepted(&self) -> Option<DocTree> {
        self.smallest_trees()
            .into_iter()
            .enumerate()
            .filter(|(q, _)| self.accepting[*q])
            .filter_map(|(_, t)| t)
            .min_by(|a, b| shortlex(&a.to_word(), &b.to_word()))
    }

    /// Surfaces of the accepted language, computed on the trimmed automaton.
    pub fn surfaces(&self) -> SurfaceFamily {
        let (productive, rules) = self.productive();
        let n = self.num_states();
        let mut reachable = vec![false; n];
        let mut stack: Vec<usize> = (0..n)
            .filter(|&q| productive[q] && self.accepting[q])
            .collect();
        for &q in &stack {
            reachable[q] = true;
        }
        while let Some(q) = stack.pop() {
            for (_, d) in rules.range((q, 0)..(q + 1, 0)) {
                for (s, used) in d.live_symbols().into_iter().enumerate() {
                    if used && !reachable[s] {
                        reachable[s] = true;
                        stack.push(s);
                    }
                }
            }
        }
        let tag_alpha = Alphabet::new(self.tags.names().iter().cloned());
        let mut tags_of: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(q, a) in rules.keys() {
            tags_of[q].push(a);
        }
        let mut parts: Vec<Vec<Nfa>> = vec![Vec::new(); self.tags.len()];
        for (&(q, a), d) in &rules {
            if reachable[q] {
                parts[a].push(d.map_alphabet(&tag_alpha, |s| tags_of[s].clone()));
            }
        }
        let surfaces = parts
            .into_iter()
            .map(|nfas| {
                let mut all = Nfa::new(tag_alpha.clone());
                let mut initial = Vec::new();
                for nfa in &nfas {
                    let base = all.embed(nfa);
                    initial.extend(nfa.initial_states().iter().map(|i| base + i));
                }
                all.set_initial(initial);
                all.determinize().minimize()
            })
            .collect();
        SurfaceFamily::new(self.tags.clone(), surfaces).expect("surfaces over the tag alphabet")
    }

    /// Re-expresses the automaton over a larger tag alphabet.
    pub fn with_tags(&self, tags: &TagAlphabet, map: &[usize]) -> HedgeAutomaton {
        let rules = self
            .rules
            .iter()
            .map(|(&(q, a), d)| ((q, map[a]), d.clone()))
            .collect();
        HedgeAutomaton::new(
            tags.clone(),
            self.names.clone(),
            rules,
            self.accepting.clone(),
        )
        .expect("same states")
    }

    /// Disjoint union of the state sets; states of `other` are shifted by
    /// `self.num_states()`. Both must share the tag alphabet.
    fn disjoint_union(&self, other: &HedgeAutomaton) -> HedgeAutomaton {
        let n = self.num_states();
        let mut names: Vec<String> = self.names.iter().map(|s| format!("1.{s}")).collect();
        names.extend(other.names.iter().map(|s| format!("2.{s}")));
        let states = Alphabet::new(names.iter().cloned());
        let left: Vec<usize> = (0..n).collect();
        let right: Vec<usize> = (0..other.num_states()).map(|q| q + n).collect();
        let mut rules = BTreeMap::new();
        for (&(q, a), d) in &self.rules {
            rules.insert((q, a), d.with_alphabet(&states, &left));
        }
        for (&(q, a), d) in &other.rules {
            rules.insert((q + n, a), d.with_alphabet(&states, &right));
        }
        let mut accepting = self.accepting.clone();
        accepting.extend_from_slice(&other.accepting);
        HedgeAutomaton::new(self.tags.clone(), names, rules, accepting)
            .expect("union of consistent automata")
    }

    pub fn determinize(&self) -> Result<HedgeAutomaton> {
        self.determinize_with_budget(DEFAULT_BUDGET)
    }

    pub fn determinize_with_budget(&self, budget: usize) -> Result<HedgeAutomaton> {
        Ok(self.subset_construction(budget)?.0)
    }

    /// Subset construction keeping only nonempty reachable subsets, listed
    /// in sorted order. Returns the automaton and its subsets.
    fn subset_construction(&self, budget: usize) -> Result<(HedgeAutomaton, Vec<Vec<usize>>)> {
        let mut by_tag: Vec<Vec<(usize, &Dfa)>> = vec![Vec::new(); self.tags.len()];
        for (&(q, a), d) in &self.rules {
            by_tag[a].push((q, d));
        }
        let co: BTreeMap<(usize, usize), Vec<bool>> = self
            .rules
            .iter()
            .map(|(&k, d)| (k, d.coreachable()))
            .collect();
        let mut subsets: Vec<Vec<usize>> = Vec::new();
        let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
        loop {
            let mut added = false;
            for (a, rules) in by_tag.iter().enumerate() {
                let explored = explore(a, rules, &co, &subsets, budget)?;
                for set in explored.accepted {
                    if !set.is_empty() && !index.contains_key(&set) {
                        index.insert(set.clone(), subsets.len());
                        subsets.push(set);
                        added = true;
                        if subsets.len() > budget {
                            return Err(Error::BudgetExceeded(budget));
                        }
                    }
                }
            }
            if !added {
                break;
            }
        }
        subsets.sort();
        let names: Vec<String> = subsets
            .iter()
            .map(|s| {
                let inner: Vec<&str> = s.iter().map(|&q| self.names[q].as_str()).collect();
                format!("{{{}}}", inner.join(","))
            })
            .collect();
        let states = Alphabet::new(names.iter().cloned());
        let index: HashMap<&Vec<usize>, usize> =
            subsets.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let mut rules = BTreeMap::new();
        for (a, tag_rules) in by_tag.iter().enumerate() {
            let explored = explore(a, tag_rules, &co, &subsets, budget)?;
            let k = subsets.len();
            let m = explored.accepted.len();
            for (target, &t) in index.iter() {
                let finals: Vec<bool> = explored.accepted.iter().map(|s| s == *target).collect();
                if !finals.iter().any(|f| *f) {
                    continue;
                }
                let dfa =
                    Dfa::from_table(states.clone(), explored.table.clone(), 0, finals).minimize();
                debug_assert_eq!(explored.table.len(), m * k);
                rules.insert((t, a), dfa);
            }
        }
        let accepting = subsets
            .iter()
            .map(|s| s.iter().any(|&q| self.accepting[q]))
            .collect();
        let h = HedgeAutomaton::new(self.tags.clone(), names, rules, accepting)?;
        Ok((h, subsets))
    }
}

struct Explored {
    /// Transition table of the horizontal subset automaton, row-major.
    table: Vec<usize>,
    /// Per horizontal state, the sorted set of states it accepts for.
    accepted: Vec<Vec<usize>>,
}

/// Runs every horizontal automaton of tag `a` at once over the current
/// subset alphabet. A horizontal state is the set of pairs
/// `(rule position, DFA state)` still able to accept.
fn explore(
    a: usize,
    rules: &[(usize, &Dfa)],
    co: &BTreeMap<(usize, usize), Vec<bool>>,
    subsets: &[Vec<usize>],
    budget: usize,
) -> Result<Explored> {
    let alive = |i: usize, p: usize| co[&(rules[i].0, a)][p];
    let mut start: Vec<(usize, usize)> = rules
        .iter()
        .enumerate()
        .map(|(i, (_, d))| (i, d.initial()))
        .filter(|&(i, p)| alive(i, p))
        .collect();
    start.sort_unstable();
    let mut sets = vec![start.clone()];
    let mut index: HashMap<Vec<(usize, usize)>, usize> = HashMap::from([(start, 0)]);
    let k = subsets.len();
    let mut table = Vec::new();
    let mut i = 0;
    while i < sets.len() {
        for sym in subsets {
            let mut next: Vec<(usize, usize)> = Vec::new();
            for &(r, p) in &sets[i] {
                for &s in sym {
                    let p2 = rules[r].1.next(p, s);
                    if alive(r, p2) {
                        next.push((r, p2));
                    }
                }
            }
            next.sort_unstable();
            next.dedup();
            let id = match index.get(&next) {
                Some(&id) => id,
                None => {
                    if sets.len() >= budget {
                        return Err(Error::BudgetExceeded(budget));
                    }
                    index.insert(next.clone(), sets.len());
                    sets.push(next);
                    sets.len() - 1
                }
            };
            table.push(id);
        }
        i += 1;
    }
    debug_assert_eq!(table.len(), sets.len() * k);
    let accepted = sets
        .iter()
        .map(|set| {
            let mut acc: Vec<usize> = set
                .iter()
                .filter(|&&(r, p)| rules[r].1.is_final(p))
                .map(|&(r, _)| rules[r].0)
                .collect();
            acc.sort_unstable();
            acc.dedup();
            acc
        })
        .collect();
    Ok(Explored { table, accepted })
}

/// Equality of the accepted languages, after aligning tag alphabets
/// (`h1`'s tags first). A smallest tree accepted by exactly one automaton
/// is returned when they differ.
pub fn hedge_equal(
    h1: &HedgeAutomaton,
    h2: &HedgeAutomaton,
) -> Result<(TagAlphabet, Option<DocTree>)> {
    let (union, map2) = h1.tags.union(&h2.tags);
    let map1: Vec<usize> = (0..h1.tags.len()).collect();
    let left = h1.with_tags(&union, &map1);
    let right = h2.with_tags(&union, &map2);
    let n1 = left.num_states();
    let both = left.disjoint_union(&right);
    let (det, subsets) = both.subset_construction(DEFAULT_BUDGET)?;
    let smallest = det.smallest_trees();
    let diff = subsets
        .iter()
        .enumerate()
        .filter(|(_, s)| {
            let in1 = s.iter().any(|&q| q < n1 && both.accepting[q]);
            let in2 = s.iter().any(|&q| q >= n1 && both.accepting[q]);
            in1 != in2
        })
        .filter_map(|(i, _)| smallest[i].clone())
        .min_by(|a, b| shortlex(&a.to_word(), &b.to_word()));
    Ok((union, diff))
}

#[cfg(test)]
mod tests {
    use super::super::tests::bg;
    use super::*;
    use crate::xml::XmlGrammar;

    fn xg(text: &str) -> XmlGrammar {
        XmlGrammar::parse(text, None).unwrap()
    }

    fn tree(g: &TagAlphabet, text: &str) -> DocTree {
        DocTree::from_word(&crate::dyck::TaggedWord::parse(text, g).unwrap().0).unwrap()
    }

    #[test]
    fn xml_hedge_is_deterministic() {
        let g = xg("axiom a\na -> b\nb -> b?");
        let h = HedgeAutomaton::from_xml(&g);
        assert_eq!(h.num_states(), 2);
        assert!(h.is_deterministic());
        assert!(h.accepts(&tree(g.tags(), "a b b /b /b /a")));
        assert!(!h.accepts(&tree(g.tags(), "a /a")));
        assert!(!h.accepts(&tree(g.tags(), "b /b")));
        let det = h.determinize().unwrap();
        assert_eq!(det.num_states(), 2);
        let s = h.surfaces();
        assert_eq!(s.to_string(), "S_a = b\nS_b = b?\n");
    }

    #[test]
    fn single_tree() {
        let g = xg("a -> ~e~");
        let h = HedgeAutomaton::from_xml(&g);
        assert!(h.accepts(&DocTree::leaf(0)));
        assert!(!h.accepts(&DocTree::new(0, vec![DocTree::leaf(0)])));
        assert_eq!(h.surfaces().to_string(), "S_a = ~e~\n");
        assert_eq!(h.smallest_accepted(), Some(DocTree::leaf(0)));
    }

    #[test]
    fn nondeterministic_balanced() {
        let g = bg("axiom S\nS -> a X /a | a /a\nX -> a /a | a X X /a");
        let h = g.to_hedge();
        assert_eq!(h.num_states(), 2);
        assert!(!h.is_deterministic());
        let det = h.determinize().unwrap();
        assert!(det.is_deterministic());
        for t in [
            "a /a",
            "a a /a /a",
            "a a a /a a /a /a /a",
            "a a a /a /a /a",
            "a a /a a /a /a",
        ] {
            let t = tree(g.tags(), t);
            assert_eq!(h.accepts(&t), det.accepts(&t), "{}", t.display(g.tags()));
        }
        assert_eq!(hedge_equal(&h, &det).unwrap().1, None);
    }

    #[test]
    fn split_example_equals_xml_grammar() {
        let g = bg("axiom S\nS -> a T T /a\nT -> a T T /a | b /b");
        let x = xg("axiom a\na -> (a|b)(a|b)\nb -> ~e~");
        let (_, diff) = hedge_equal(&g.to_hedge(), &HedgeAutomaton::from_xml(&x)).unwrap();
        assert_eq!(diff, None);
        assert_eq!(
            g.to_hedge().surfaces().to_string(),
            "S_a = (a|b)(a|b)\nS_b = ~e~\n"
        );
    }

    #[test]
    fn inequality_counterexample() {
        let x1 = xg("axiom a\na -> b\nb -> ~e~");
        let x2 = xg("a -> ~e~");
        let (union, diff) = hedge_equal(
            &HedgeAutomaton::from_xml(&x1),
            &HedgeAutomaton::from_xml(&x2),
        )
        .unwrap();
        assert_eq!(diff.unwrap().display(&union), "a /a");
        let h = HedgeAutomaton::from_xml(&x1);
        assert_eq!(hedge_equal(&h, &h).unwrap().1, None);
    }

    #[test]
    fn empty_automaton() {
        let h = HedgeAutomaton::from_xml(&xg("a -> a"));
        assert!(h.is_empty());
        assert_eq!(h.determinize().unwrap().num_states(), 0);
        assert_eq!(h.smallest_accepted(), None);
    }

    #[test]
    fn budget_is_enforced() {
        let g = bg("axiom S\nS -> a X /a\nX -> a /a | a X X /a");
        assert_eq!(
            g.to_hedge().determinize_with_budget(1),
            Err(Error::BudgetExceeded(1))
        );
    }
}
