//! Which words of an XML-grammar fit between two states of an automaton.
//!
//! The grammar is `X_a → a m ā` with `m` accepted by a horizontal automaton
//! `H_a` over the tags. For the Dyck primes, every `H_a` is universal.
//! Items are settled in shortlex order of their witness words (Knuth's
//! generalization of Dijkstra), so each settled witness is the shortest,
//! lexicographically least one. Sources are explored on demand.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet};

use crate::automata::Dfa;
use crate::dyck::Letter;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Item {
    /// A word of `X_a` reading `x → y`.
    Prime { tag: usize, from: usize, to: usize },
    /// A child sequence of an `a`-node driving `H_a` to `h` while reading
    /// `s → r`, where `s` is the state just after the opening letter.
    Inner {
        tag: usize,
        h: usize,
        from: usize,
        to: usize,
    },
}

#[allow(clippy::type_complexity)]
pub(crate) struct Engine<'a> {
    m: &'a Dfa,
    h: &'a [Dfa],
    h_live: Vec<Vec<bool>>,
    heap: BinaryHeap<Reverse<(usize, Vec<Letter>, Item)>>,
    settled: HashSet<Item>,
    primes: HashMap<(usize, usize), Vec<(usize, Vec<Letter>)>>,
    prime_out: HashMap<usize, Vec<(usize, usize, Vec<Letter>)>>,
    inner_in: HashMap<usize, Vec<(usize, usize, usize, Vec<Letter>)>>,
    inner_by_source: HashMap<(usize, usize), Vec<(usize, usize, Vec<Letter>)>>,
    demanded: HashSet<(usize, usize)>,
    demanders: HashMap<(usize, usize), Vec<usize>>,
}

impl<'a> Engine<'a> {
    /// `m` reads `T = A ∪ Ā` in the layout `a /a b /b ...`; `h[a]` reads
    /// the tags.
    pub(crate) fn new(m: &'a Dfa, h: &'a [Dfa]) -> Self {
        debug_assert_eq!(m.alphabet().len(), 2 * h.len());
        Engine {
            m,
            h,
            h_live: h.iter().map(Dfa::coreachable).collect(),
            heap: BinaryHeap::new(),
            settled: HashSet::new(),
            primes: HashMap::new(),
            prime_out: HashMap::new(),
            inner_in: HashMap::new(),
            inner_by_source: HashMap::new(),
            demanded: HashSet::new(),
            demanders: HashMap::new(),
        }
    }

    fn push(&mut self, word: Vec<Letter>, item: Item) {
        if !self.settled.contains(&item) {
            self.heap.push(Reverse((word.len(), word, item)));
        }
    }

    fn close_prime(&mut self, tag: usize, from: usize, r: usize, inner: &[Letter]) {
        let mut w = Vec::with_capacity(inner.len() + 2);
        w.push(Letter::open(tag));
        w.extend_from_slice(inner);
        w.push(Letter::close(tag));
        let to = self.m.next(r, 2 * tag + 1);
        self.push(w, Item::Prime { tag, from, to });
    }

    fn demand(&mut self, tag: usize, from: usize) {
        if !self.demanded.insert((tag, from)) {
            return;
        }
        let s = self.m.next(from, 2 * tag);
        let list = self.demanders.entry((tag, s)).or_default();
        list.push(from);
        if list.len() > 1 {
            let done = self
                .inner_by_source
                .get(&(tag, s))
                .cloned()
                .unwrap_or_default();
            for (h, r, w) in done {
                if self.h[tag].is_final(h) {
                    self.close_prime(tag, from, r, &w);
                }
            }
            return;
        }
        let init = self.h[tag].initial();
        if self.h_live[tag][init] {
            self.push(
                Vec::new(),
                Item::Inner {
                    tag,
                    h: init,
                    from: s,
                    to: s,
                },
            );
        }
    }

    fn settle(&mut self, word: Vec<Letter>, item: Item) {
        match item {
            Item::Prime { tag, from, to } => {
                self.primes
                    .entry((tag, from))
                    .or_default()
                    .push((to, word.clone()));
                self.prime_out
                    .entry(from)
                    .or_default()
                    .push((tag, to, word.clone()));
                let waiting = self.inner_in.get(&from).cloned().unwrap_or_default();
                for (a, h, s, w) in waiting {
                    let h2 = self.h[a].next(h, tag);
                    if self.h_live[a][h2] {
                        let mut w2 = w;
                        w2.extend_from_slice(&word);
                        self.push(
                            w2,
                            Item::Inner {
                                tag: a,
                                h: h2,
                                from: s,
                                to,
                            },
                        );
                    }
                }
            }
            Item::Inner { tag, h, from, to } => {
                self.inner_in
                    .entry(to)
                    .or_default()
                    .push((tag, h, from, word.clone()));
                self.inner_by_source
                    .entry((tag, from))
                    .or_default()
                    .push((h, to, word.clone()));
                if self.h[tag].is_final(h) {
                    let xs = self
                        .demanders
                        .get(&(tag, from))
                        .cloned()
                        .unwrap_or_default();
                    for x in xs {
                        self.close_prime(tag, x, to, &word);
                    }
                }
                for c in 0..self.h.len() {
                    if self.h_live[tag][self.h[tag].next(h, c)] {
                        self.demand(c, to);
                    }
                }
                let ready = self.prime_out.get(&to).cloned().unwrap_or_default();
                for (c, y, u) in ready {
                    let h2 = self.h[tag].next(h, c);
                    if self.h_live[tag][h2] {
                        let mut w2 = word.clone();
                        w2.extend_from_slice(&u);
                        self.push(
                            w2,
                            Item::Inner {
                                tag,
                                h: h2,
                                from,
                                to: y,
                            },
                        );
                    }
                }
            }
        }
    }

    fn run(&mut self) {
        while let Some(Reverse((_, word, item))) = self.heap.pop() {
            if self.settled.insert(item) {
                self.settle(word, item);
            }
        }
    }

    /// Every state `y` with a word of `X_tag` reading `from → y`, with the
    /// shortest such word.
    pub(crate) fn primes_from(&mut self, tag: usize, from: usize) -> Vec<(usize, Vec<Letter>)> {
        self.demand(tag, from);
        self.run();
        let mut out = self.primes.get(&(tag, from)).cloned().unwrap_or_default();
        out.sort();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::Alphabet;
    use crate::dyck::{TagAlphabet, TaggedWord};

    #[test]
    fn primes_between_states() {
        let tags = TagAlphabet::from_names(["a", "b"]).unwrap();
        let t = Alphabet::new(tags.symbol_names());
        let words: Vec<Vec<usize>> = ["a b /b /a", "a /a"]
            .iter()
            .map(|w| TaggedWord::parse(w, &tags).unwrap().to_symbols())
            .collect();
        let m = Dfa::from_words(t, &words).minimize();
        let tag_alpha = Alphabet::new(tags.names().iter().cloned());
        let h = vec![Dfa::universal(tag_alpha.clone()), Dfa::universal(tag_alpha)];
        let mut e = Engine::new(&m, &h);
        let found: Vec<_> = e
            .primes_from(0, m.initial())
            .into_iter()
            .filter(|(q, _)| m.is_final(*q))
            .collect();
        assert_eq!(found.len(), 1);
        let (to, w) = &found[0];
        assert!(m.is_final(*to));
        assert_eq!(TaggedWord(w.clone()).display(&tags).to_string(), "a /a");
        let after_a = m.next(m.initial(), 0);
        let live = m.live();
        let inner: Vec<_> = e
            .primes_from(1, after_a)
            .into_iter()
            .filter(|(q, _)| live[*q])
            .collect();
        assert_eq!(inner.len(), 1);
        assert_eq!(inner[0].1.len(), 2);
        assert!(e.primes_from(0, after_a).iter().all(|(q, _)| !live[*q]));
    }
}
