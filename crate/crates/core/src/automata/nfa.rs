use std::collections::{BTreeMap, VecDeque};

use super::{Alphabet, Dfa};

/// Nondeterministic automaton with ε-moves.
#[derive(Clone, Debug)]
pub struct Nfa {
    alphabet: Alphabet,
    transitions: Vec<Vec<(usize, usize)>>,
    epsilon: Vec<Vec<usize>>,
    initial: Vec<usize>,
    finals: Vec<bool>,
}

impl Nfa {
    pub fn new(alphabet: Alphabet) -> Self {
        Nfa {
            alphabet,
            transitions: Vec::new(),
            epsilon: Vec::new(),
            initial: Vec::new(),
            finals: Vec::new(),
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.finals.len()
    }

    pub fn add_state(&mut self) -> usize {
        self.transitions.push(Vec::new());
        self.epsilon.push(Vec::new());
        self.finals.push(false);
        self.finals.len() - 1
    }

    pub fn add_transition(&mut self, from: usize, symbol: usize, to: usize) {
        debug_assert!(symbol < self.alphabet.len());
        self.transitions[from].push((symbol, to));
    }

    pub fn add_epsilon(&mut self, from: usize, to: usize) {
        self.epsilon[from].push(to);
    }

    pub fn set_initial(&mut self, states: Vec<usize>) {
        self.initial = states;
    }

    pub fn add_initial(&mut self, state: usize) {
        self.initial.push(state);
    }

    pub fn set_final(&mut self, state: usize, is_final: bool) {
        self.finals[state] = is_final;
    }

    /// Copies `other` into `self` (same alphabet); returns the state offset.
    pub fn embed(&mut self, other: &Nfa) -> usize {
        debug_assert_eq!(self.alphabet, other.alphabet);
        let offset = self.num_states();
        for q in 0..other.num_states() {
            let s = self.add_state();
            self.finals[s] = other.finals[q];
        }
        for q in 0..other.num_states() {
            for &(sym, to) in &other.transitions[q] {
                self.transitions[q + offset].push((sym, to + offset));
            }
            for &to in &other.epsilon[q] {
                self.epsilon[q + offset].push(to + offset);
            }
        }
        offset
    }

    pub fn initial_states(&self) -> &[usize] {
        &self.initial
    }

    pub fn is_final(&self, state: usize) -> bool {
        self.finals[state]
    }

    fn closure(&self, set: &mut Vec<usize>) {
        let mut seen = vec![false; self.num_states()];
        let mut stack: Vec<usize> = set.clone();
        for &q in set.iter() {
            seen[q] = true;
        }
        while let Some(q) = stack.pop() {
            for &r in &self.epsilon[q] {
                if !seen[r] {
                    seen[r] = true;
                    set.push(r);
                    stack.push(r);
                }
            }
        }
        set.sort_unstable();
        set.dedup();
    }

    pub fn accepts(&self, word: &[usize]) -> bool {
        let mut cur = self.initial.clone();
        self.closure(&mut cur);
        for &s in word {
            let mut next: Vec<usize> = cur
                .iter()
                .flat_map(|&q| self.transitions[q].iter().filter(|t| t.0 == s).map(|t| t.1))
                .collect();
            self.closure(&mut next);
            cur = next;
        }
        cur.iter().any(|&q| self.finals[q])
    }

    /// Subset construction; subset-states are numbered in discovery order.
    pub fn determinize(&self) -> Dfa {
        let k = self.alphabet.len();
        let mut start = self.initial.clone();
        self.closure(&mut start);
        let mut ids: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        let mut sets = vec![start.clone()];
        ids.insert(start, 0);
        let mut table: Vec<usize> = Vec::new();
        let mut queue = VecDeque::from([0usize]);
        let mut rows: Vec<Vec<usize>> = vec![Vec::new()];
        while let Some(id) = queue.pop_front() {
            let set = sets[id].clone();
            let mut row = vec![0; k];
            let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); k];
            for &q in &set {
                for &(s, r) in &self.transitions[q] {
                    buckets[s].push(r);
                }
            }
            for (s, mut next) in buckets.into_iter().enumerate() {
                self.closure(&mut next);
                let nid = match ids.get(&next) {
                    Some(&nid) => nid,
                    None => {
                        let nid = sets.len();
                        ids.insert(next.clone(), nid);
                        sets.push(next);
                        rows.push(Vec::new());
                        queue.push_back(nid);
                        nid
                    }
                };
                row[s] = nid;
            }
            rows[id] = row;
        }
        for row in &rows {
            table.extend_from_slice(row);
        }
        let finals = sets
            .iter()
            .map(|set| set.iter().any(|&q| self.finals[q]))
            .collect();
        Dfa::from_table(self.alphabet.clone(), table, 0, finals)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embed_and_union() {
        let ab = Alphabet::new(["a", "b"]);
        let mut x = Nfa::new(ab.clone());
        let s = x.add_state();
        let t = x.add_state();
        x.add_transition(s, 0, t);
        x.set_initial(vec![s]);
        x.set_final(t, true);
        let mut y = Nfa::new(ab.clone());
        let s2 = y.add_state();
        y.add_transition(s2, 1, s2);
        y.set_initial(vec![s2]);
        y.set_final(s2, true);
        let off = x.embed(&y);
        x.add_initial(s2 + off);
        assert!(x.accepts(&[0]));
        assert!(x.accepts(&[]));
        assert!(x.accepts(&[1, 1]));
        assert!(!x.accepts(&[0, 1]));
        let d = x.determinize();
        for w in [vec![], vec![0], vec![1, 1], vec![0, 1], vec![1, 0]] {
            assert_eq!(d.accepts(&w), x.accepts(&w));
        }
    }
}
