use std::collections::BTreeMap;

use super::engine::Engine;
use super::{DyckCheck, TagDfa};
use crate::automata::{Alphabet, Dfa, Nfa};
use crate::dyck::Letter;
use crate::error::{Error, Result};
use crate::hedge::{DocTree, XmlVerdict};
use crate::xml::{tag_alphabet, SurfaceFamily};

/// For each tag `a`, the live state pairs `(p, q)` joined by a Dyck prime
/// starting with `a`, with the shortest such prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoodPairTable {
    pub pairs: Vec<BTreeMap<(usize, usize), Vec<Letter>>>,
}

impl GoodPairTable {
    pub fn is_good(&self, tag: usize, p: usize, q: usize) -> bool {
        self.pairs[tag].contains_key(&(p, q))
    }

    pub fn witness(&self, tag: usize, p: usize, q: usize) -> Option<&[Letter]> {
        self.pairs[tag].get(&(p, q)).map(Vec::as_slice)
    }
}

fn universal_contents(k: &TagDfa) -> Vec<Dfa> {
    let alpha = tag_alphabet(k.tags());
    vec![Dfa::universal(alpha); k.tags().len()]
}

fn primes(dfa: &Dfa, h: &[Dfa], from: usize, tag: usize) -> Vec<(usize, Vec<Letter>)> {
    Engine::new(dfa, h).primes_from(tag, from)
}

impl TagDfa {
    fn require_dyck(&self) -> Result<()> {
        self.prime_roots()
            .map(|_| ())
            .map_err(|_| Error::NotDyckSubset)
    }

    pub fn good_pairs(&self) -> Result<GoodPairTable> {
        self.require_dyck()?;
        let live = self.dfa.live();
        let h = universal_contents(self);
        let mut engine = Engine::new(&self.dfa, &h);
        let mut pairs = vec![BTreeMap::new(); self.tags.len()];
        for p in (0..self.dfa.num_states()).filter(|&p| live[p]) {
            for (a, table) in pairs.iter_mut().enumerate() {
                for (q, w) in engine.primes_from(a, p) {
                    if live[q] {
                        table.insert((p, q), w);
                    }
                }
            }
        }
        Ok(GoodPairTable { pairs })
    }

    /// `S_a` is read off the paths of good pairs between a state entered by
    /// an `a`-edge and a state left by an `ā`-edge.
    pub fn surfaces(&self) -> Result<SurfaceFamily> {
        let table = self.good_pairs()?;
        let live = self.dfa.live();
        let n = self.dfa.num_states();
        let alpha: Alphabet = tag_alphabet(&self.tags);
        let mut surfaces = Vec::new();
        for a in 0..self.tags.len() {
            let mut nfa = Nfa::new(alpha.clone());
            for _ in 0..n {
                nfa.add_state();
            }
            for (b, pairs) in table.pairs.iter().enumerate() {
                for &(p, q) in pairs.keys() {
                    nfa.add_transition(p, b, q);
                }
            }
            let mut initial = Vec::new();
            for p in (0..n).filter(|&p| live[p]) {
                let p1 = self.dfa.next(p, 2 * a);
                if live[p1] {
                    initial.push(p1);
                }
                let q = self.dfa.next(p, 2 * a + 1);
                if live[q] {
                    nfa.set_final(p, true);
                }
            }
            initial.sort_unstable();
            initial.dedup();
            nfa.set_initial(initial);
            surfaces.push(nfa.determinize().minimize());
        }
        SurfaceFamily::new(self.tags.clone(), surfaces)
    }

    fn root_tag(&self) -> Result<usize> {
        match self.check_dyck() {
            DyckCheck::Prime(a) => Ok(a),
            DyckCheck::Rejected(reason) => Err(Error::NotDyckPrimeSubset(reason)),
        }
    }

    /// `K` is an XML-language iff the standard language of its surfaces is
    /// contained in `K`. Otherwise the shortest standard word outside `K`
    /// is returned.
    pub fn is_xml(&self) -> Result<XmlVerdict> {
        let a = self.root_tag()?;
        let standard = self.surfaces()?.standard_grammar(a)?;
        let outside = self.dfa.complement();
        let found = primes(&outside, standard.contents(), outside.initial(), a);
        let bad = found
            .into_iter()
            .filter(|(q, _)| outside.is_final(*q))
            .map(|(_, w)| w)
            .min_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
        match bad {
            None => Ok(XmlVerdict::Xml(standard)),
            Some(w) => Ok(XmlVerdict::NotXml(DocTree::from_word(&w)?)),
        }
    }

    /// Independent decision through contexts: on the minimal automaton,
    /// the primes starting with `a` that label a path `p → q` must be the
    /// same set for every good pair `(p, q)` of `a`.
    pub fn is_xml_by_contexts(&self) -> Result<XmlVerdict> {
        let k = TagDfa {
            tags: self.tags.clone(),
            dfa: self.dfa.minimize(),
        };
        let root = k.root_tag()?;
        let table = k.good_pairs()?;
        let dfa = &k.dfa;
        let n = dfa.num_states();
        let t = dfa.alphabet().clone();
        // product automaton; pair (x, y) is state x * n + y
        let mut table_p = Vec::with_capacity(n * n * t.len());
        for x in 0..n {
            for y in 0..n {
                for s in 0..t.len() {
                    table_p.push(dfa.next(x, s) * n + dfa.next(y, s));
                }
            }
        }
        let h = universal_contents(&k);
        for (a, pairs) in table.pairs.iter().enumerate() {
            let mut it = pairs.keys();
            let Some(&(p0, q0)) = it.next() else { continue };
            for &(p, q) in it {
                let finals: Vec<bool> = (0..n * n).map(|s| (s / n == q0) != (s % n == q)).collect();
                let product = Dfa::from_table(t.clone(), table_p.clone(), p0 * n + p, finals);
                let found = primes(&product, &h, p0 * n + p, a);
                let Some((end, w)) = found.into_iter().find(|(s, _)| product.is_final(*s)) else {
                    continue;
                };
                // w leads one pair to its end and the other elsewhere
                let (p_bad, q_bad, reached) = if end / n == q0 {
                    (p, q, end % n)
                } else {
                    (p0, q0, end / n)
                };
                let witness = table.witness(a, p_bad, q_bad).expect("good pair").to_vec();
                return Ok(XmlVerdict::NotXml(
                    k.context_counterexample(p_bad, q_bad, reached, &witness, &w)?,
                ));
            }
        }
        let standard = k.surfaces()?.standard_grammar(root)?;
        Ok(XmlVerdict::Xml(standard))
    }

    /// With `u` leading `p → q` and `w` leading `p → r ≠ q`, one of
    /// `x u z`, `x w z` lies in the standard language but not in `K`, where
    /// `x` reaches `p` and `z` separates `q` from `r`.
    fn context_counterexample(
        &self,
        p: usize,
        q: usize,
        r: usize,
        u: &[Letter],
        w: &[Letter],
    ) -> Result<DocTree> {
        let dfa = &self.dfa;
        let access = dfa
            .with_endpoints(dfa.initial(), &[p])
            .shortest_word()
            .expect("live state");
        let finals: Vec<usize> = (0..dfa.num_states()).filter(|&s| dfa.is_final(s)).collect();
        let from_q = dfa.with_endpoints(q, &finals);
        let from_r = dfa.with_endpoints(r, &finals);
        let z = from_q
            .equal_witness(&from_r)?
            .expect("minimal automaton separates states");
        let build = |mid: &[Letter]| -> Vec<Letter> {
            let mut out: Vec<Letter> = access.iter().map(|&s| Letter::from_symbol(s)).collect();
            out.extend_from_slice(mid);
            out.extend(z.iter().map(|&s| Letter::from_symbol(s)));
            out
        };
        let with_u = build(u);
        let with_w = build(w);
        let word = if self.accepts(&with_u) {
            with_w
        } else {
            with_u
        };
        debug_assert!(!self.accepts(&word));
        DocTree::from_word(&word)
    }
}
