use std::collections::{HashMap, VecDeque};

use super::{Alphabet, Nfa, Regex};
use crate::error::{Error, Result};

/// Boolean combinations available through [`Dfa::combine`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoolOp {
    Intersection,
    Union,
    Difference,
    SymmetricDifference,
}

impl BoolOp {
    fn apply(self, x: bool, y: bool) -> bool {
        match self {
            BoolOp::Intersection => x && y,
            BoolOp::Union => x || y,
            BoolOp::Difference => x && !y,
            BoolOp::SymmetricDifference => x != y,
        }
    }
}

/// Total deterministic automaton. Missing transitions are routed to an
/// explicit dead state when the automaton is built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfa {
    alphabet: Alphabet,
    table: Vec<usize>,
    initial: usize,
    finals: Vec<bool>,
}

impl Dfa {
    pub fn from_table(
        alphabet: Alphabet,
        table: Vec<usize>,
        initial: usize,
        finals: Vec<bool>,
    ) -> Self {
        assert_eq!(table.len(), finals.len() * alphabet.len());
        assert!(initial < finals.len());
        Dfa {
            alphabet,
            table,
            initial,
            finals,
        }
    }

    /// Builds from a partial transition list; a dead state is appended if
    /// some transition is missing.
    pub fn from_partial(
        alphabet: Alphabet,
        num_states: usize,
        edges: &[(usize, usize, usize)],
        initial: usize,
        finals: &[usize],
    ) -> Self {
        let k = alphabet.len();
        let dead = num_states;
        let mut table = vec![usize::MAX; num_states * k];
        for &(from, sym, to) in edges {
            table[from * k + sym] = to;
        }
        let needs_dead = table.contains(&usize::MAX) || num_states == 0;
        let mut is_final = vec![false; num_states];
        for &f in finals {
            is_final[f] = true;
        }
        if needs_dead {
            for t in table.iter_mut() {
                if *t == usize::MAX {
                    *t = dead;
                }
            }
            table.extend(std::iter::repeat_n(dead, k));
            is_final.push(false);
        }
        Dfa::from_table(alphabet, table, initial.min(is_final.len() - 1), is_final)
    }

    pub fn empty(alphabet: Alphabet) -> Self {
        let k = alphabet.len();
        Dfa::from_table(alphabet, vec![0; k], 0, vec![false])
    }

    pub fn epsilon(alphabet: Alphabet) -> Self {
        Dfa::from_partial(alphabet, 1, &[], 0, &[0])
    }

    /// `Σ*` over the whole alphabet.
    pub fn universal(alphabet: Alphabet) -> Self {
        let k = alphabet.len();
        Dfa::from_table(alphabet, vec![0; k], 0, vec![true])
    }

    /// Minimal automaton of a regular expression.
    pub fn from_regex(regex: &Regex, alphabet: &Alphabet) -> Self {
        regex.compile(alphabet).determinize().minimize()
    }

    /// Minimal automaton of a finite set of words.
    pub fn from_words(alphabet: Alphabet, words: &[Vec<usize>]) -> Self {
        let mut edges = Vec::new();
        let mut finals = Vec::new();
        let mut trie: HashMap<(usize, usize), usize> = HashMap::new();
        let mut count = 1;
        for w in words {
            let mut cur = 0;
            for &s in w {
                cur = *trie.entry((cur, s)).or_insert_with(|| {
                    count += 1;
                    edges.push((cur, s, count - 1));
                    count - 1
                });
            }
            finals.push(cur);
        }
        Dfa::from_partial(alphabet, count, &edges, 0, &finals).minimize()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.finals.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn next(&self, state: usize, symbol: usize) -> usize {
        self.table[state * self.alphabet.len() + symbol]
    }

    pub fn is_final(&self, state: usize) -> bool {
        self.finals[state]
    }

    pub fn run(&self, state: usize, word: &[usize]) -> usize {
        word.iter().fold(state, |q, &s| self.next(q, s))
    }

    pub fn accepts(&self, word: &[usize]) -> bool {
        self.finals[self.run(self.initial, word)]
    }

    /// Same transitions, different initial state and final set.
    pub fn with_endpoints(&self, initial: usize, finals: &[usize]) -> Dfa {
        let mut is_final = vec![false; self.num_states()];
        for &f in finals {
            is_final[f] = true;
        }
        Dfa {
            alphabet: self.alphabet.clone(),
            table: self.table.clone(),
            initial,
            finals: is_final,
        }
    }

    pub fn reachable(&self) -> Vec<bool> {
        let k = self.alphabet.len();
        let mut seen = vec![false; self.num_states()];
        seen[self.initial] = true;
        let mut stack = vec![self.initial];
        while let Some(q) = stack.pop() {
            for s in 0..k {
                let r = self.next(q, s);
                if !seen[r] {
                    seen[r] = true;
                    stack.push(r);
                }
            }
        }
        seen
    }

    /// States from which some final state can be reached.
    pub fn coreachable(&self) -> Vec<bool> {
        let n = self.num_states();
        let k = self.alphabet.len();
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        for q in 0..n {
            for s in 0..k {
                preds[self.next(q, s)].push(q);
            }
        }
        let mut seen = self.finals.clone();
        let mut stack: Vec<usize> = (0..n).filter(|&q| seen[q]).collect();
        while let Some(q) = stack.pop() {
            for &p in &preds[q] {
                if !seen[p] {
                    seen[p] = true;
                    stack.push(p);
                }
            }
        }
        seen
    }

    /// Reachable and coreachable states.
    pub fn live(&self) -> Vec<bool> {
        let r = self.reachable();
        let c = self.coreachable();
        r.iter().zip(&c).map(|(a, b)| *a && *b).collect()
    }

    /// Symbols labelling some transition between live states.
    pub fn live_symbols(&self) -> Vec<bool> {
        let live = self.live();
        let k = self.alphabet.len();
        let mut used = vec![false; k];
        for q in (0..self.num_states()).filter(|&q| live[q]) {
            for (s, u) in used.iter_mut().enumerate() {
                if live[self.next(q, s)] {
                    *u = true;
                }
            }
        }
        used
    }

    /// Minimal total automaton, states numbered breadth-first from the
    /// initial state in symbol order.
    pub fn minimize(&self) -> Dfa {
        let k = self.alphabet.len();
        let reach = self.reachable();
        let states: Vec<usize> = (0..self.num_states()).filter(|&q| reach[q]).collect();
        let mut class = vec![usize::MAX; self.num_states()];
        for &q in &states {
            class[q] = usize::from(self.finals[q]);
        }
        let mut num_classes = 0;
        loop {
            let mut sig_ids: HashMap<Vec<usize>, usize> = HashMap::new();
            let mut next_class = vec![usize::MAX; self.num_states()];
            for &q in &states {
                let mut sig = Vec::with_capacity(k + 1);
                sig.push(class[q]);
                sig.extend((0..k).map(|s| class[self.next(q, s)]));
                let len = sig_ids.len();
                next_class[q] = *sig_ids.entry(sig).or_insert(len);
            }
            let count = sig_ids.len();
            class = next_class;
            if count == num_classes {
                break;
            }
            num_classes = count;
        }
        // canonical numbering
        let mut order = vec![usize::MAX; num_classes];
        let mut reps = Vec::with_capacity(num_classes);
        let start = class[self.initial];
        order[start] = 0;
        reps.push(self.initial);
        let mut i = 0;
        while i < reps.len() {
            let q = reps[i];
            for s in 0..k {
                let r = self.next(q, s);
                if order[class[r]] == usize::MAX {
                    order[class[r]] = reps.len();
                    reps.push(r);
                }
            }
            i += 1;
        }
        let mut table = Vec::with_capacity(reps.len() * k);
        for &q in &reps {
            for s in 0..k {
                table.push(order[class[self.next(q, s)]]);
            }
        }
        let finals = reps.iter().map(|&q| self.finals[q]).collect();
        Dfa::from_table(self.alphabet.clone(), table, 0, finals)
    }

    pub fn complement(&self) -> Dfa {
        Dfa {
            alphabet: self.alphabet.clone(),
            table: self.table.clone(),
            initial: self.initial,
            finals: self.finals.iter().map(|f| !f).collect(),
        }
    }

    /// Product construction over reachable state pairs.
    pub fn combine(&self, other: &Dfa, op: BoolOp) -> Result<Dfa> {
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch);
        }
        let k = self.alphabet.len();
        let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
        let mut pairs = vec![(self.initial, other.initial)];
        ids.insert(pairs[0], 0);
        let mut table = Vec::new();
        let mut i = 0;
        while i < pairs.len() {
            let (p, q) = pairs[i];
            for s in 0..k {
                let pair = (self.next(p, s), other.next(q, s));
                let id = *ids.entry(pair).or_insert_with(|| {
                    pairs.push(pair);
                    pairs.len() - 1
                });
                table.push(id);
            }
            i += 1;
        }
        let finals = pairs
            .iter()
            .map(|&(p, q)| op.apply(self.finals[p], other.finals[q]))
            .collect();
        Ok(Dfa::from_table(self.alphabet.clone(), table, 0, finals))
    }

    pub fn intersection(&self, other: &Dfa) -> Result<Dfa> {
        self.combine(other, BoolOp::Intersection)
    }

    pub fn union(&self, other: &Dfa) -> Result<Dfa> {
        self.combine(other, BoolOp::Union)
    }

    pub fn difference(&self, other: &Dfa) -> Result<Dfa> {
        self.combine(other, BoolOp::Difference)
    }

    pub fn is_empty(&self) -> bool {
        self.shortest_word().is_none()
    }

    /// Shortest accepted word, least in symbol order among the shortest.
    pub fn shortest_word(&self) -> Option<Vec<usize>> {
        let k = self.alphabet.len();
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; self.num_states()];
        let mut seen = vec![false; self.num_states()];
        seen[self.initial] = true;
        let mut queue = VecDeque::from([self.initial]);
        while let Some(q) = queue.pop_front() {
            if self.finals[q] {
                let mut word = Vec::new();
                let mut cur = q;
                while let Some((p, s)) = parent[cur] {
                    word.push(s);
                    cur = p;
                }
                word.reverse();
                return Some(word);
            }
            for s in 0..k {
                let r = self.next(q, s);
                if !seen[r] {
                    seen[r] = true;
                    parent[r] = Some((q, s));
                    queue.push_back(r);
                }
            }
        }
        None
    }

    /// `true` iff the language is finite: no cycle through live states.
    pub fn is_finite(&self) -> bool {
        let live = self.live();
        let k = self.alphabet.len();
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut color = vec![0u8; self.num_states()];
        for root in (0..self.num_states()).filter(|&q| live[q]) {
            if color[root] != 0 {
                continue;
            }
            let mut stack = vec![(root, 0usize)];
            color[root] = 1;
            while let Some(&mut (q, ref mut s)) = stack.last_mut() {
                if *s == k {
                    color[q] = 2;
                    stack.pop();
                    continue;
                }
                let r = self.next(q, *s);
                *s += 1;
                if !live[r] {
                    continue;
                }
                match color[r] {
                    0 => {
                        color[r] = 1;
                        stack.push((r, 0));
                    }
                    1 => return false,
                    _ => {}
                }
            }
        }
        true
    }

    /// `Ok(None)` if `L(self) ⊆ L(other)`, else the shortest counterexample.
    pub fn subset_witness(&self, other: &Dfa) -> Result<Option<Vec<usize>>> {
        Ok(self.difference(other)?.shortest_word())
    }

    pub fn is_subset(&self, other: &Dfa) -> Result<bool> {
        Ok(self.subset_witness(other)?.is_none())
    }

    /// `Ok(None)` if the languages are equal, else the shortest word of the
    /// symmetric difference.
    pub fn equal_witness(&self, other: &Dfa) -> Result<Option<Vec<usize>>> {
        Ok(self
            .combine(other, BoolOp::SymmetricDifference)?
            .shortest_word())
    }

    pub fn equivalent(&self, other: &Dfa) -> Result<bool> {
        Ok(self.equal_witness(other)?.is_none())
    }

    /// All accepted words of length at most `max_len`, shortest first and
    /// in symbol order within one length.
    pub fn enumerate(&self, max_len: usize) -> Vec<Vec<usize>> {
        let co = self.coreachable();
        let k = self.alphabet.len();
        let mut out = Vec::new();
        if !co[self.initial] {
            return out;
        }
        let mut frontier = vec![(Vec::new(), self.initial)];
        for len in 0..=max_len {
            for (w, q) in &frontier {
                if self.finals[*q] {
                    out.push(w.clone());
                }
            }
            if len == max_len {
                break;
            }
            let mut next = Vec::new();
            for (w, q) in &frontier {
                for s in 0..k {
                    let r = self.next(*q, s);
                    if co[r] {
                        let mut w2 = w.clone();
                        w2.push(s);
                        next.push((w2, r));
                    }
                }
            }
            frontier = next;
        }
        out
    }

    /// Image under a finite substitution `symbol ↦ f(symbol) ⊆ target`.
    pub fn map_alphabet(&self, target: &Alphabet, f: impl Fn(usize) -> Vec<usize>) -> Nfa {
        let mut nfa = Nfa::new(target.clone());
        for q in 0..self.num_states() {
            let s = nfa.add_state();
            nfa.set_final(s, self.finals[q]);
        }
        for q in 0..self.num_states() {
            for s in 0..self.alphabet.len() {
                for t in f(s) {
                    nfa.add_transition(q, t, self.next(q, s));
                }
            }
        }
        nfa.set_initial(vec![self.initial]);
        nfa
    }

    /// Re-expresses the automaton over `alphabet`; `map[s]` is the new index
    /// of old symbol `s`. New symbols outside the image lead to a dead state.
    pub fn with_alphabet(&self, alphabet: &Alphabet, map: &[usize]) -> Dfa {
        let mut edges = Vec::new();
        for q in 0..self.num_states() {
            for (s, &t) in map.iter().enumerate() {
                edges.push((q, t, self.next(q, s)));
            }
        }
        let finals: Vec<usize> = (0..self.num_states()).filter(|&q| self.finals[q]).collect();
        Dfa::from_partial(
            alphabet.clone(),
            self.num_states(),
            &edges,
            self.initial,
            &finals,
        )
        .minimize()
    }

    /// Keeps only the transitions on allowed symbols.
    pub fn restrict(&self, allowed: &[bool]) -> Dfa {
        let mut edges = Vec::new();
        for q in 0..self.num_states() {
            for (s, _) in allowed.iter().enumerate().filter(|(_, a)| **a) {
                edges.push((q, s, self.next(q, s)));
            }
        }
        let finals: Vec<usize> = (0..self.num_states()).filter(|&q| self.finals[q]).collect();
        Dfa::from_partial(
            self.alphabet.clone(),
            self.num_states(),
            &edges,
            self.initial,
            &finals,
        )
    }

    pub fn to_nfa(&self) -> Nfa {
        self.map_alphabet(&self.alphabet, |s| vec![s])
    }

    /// Regular expression by state elimination over the live states.
    pub fn to_regex(&self) -> Regex {
        let live = self.live();
        if !live[self.initial] {
            return Regex::Empty;
        }
        let states: Vec<usize> = (0..self.num_states()).filter(|&q| live[q]).collect();
        let n = states.len();
        let index: HashMap<usize, usize> =
            states.iter().enumerate().map(|(i, &q)| (q, i)).collect();
        // nodes 0..n are states, n is the source and n+1 the sink
        let size = n + 2;
        let mut edge: Vec<Vec<Regex>> = vec![vec![Regex::Empty; size]; size];
        for (i, &q) in states.iter().enumerate() {
            for s in 0..self.alphabet.len() {
                if let Some(&j) = index.get(&self.next(q, s)) {
                    let cur = std::mem::replace(&mut edge[i][j], Regex::Empty);
                    edge[i][j] = Regex::union(cur, Regex::Symbol(s));
                }
            }
            if self.finals[q] {
                edge[i][n + 1] = Regex::Epsilon;
            }
        }
        edge[n][index[&self.initial]] = Regex::Epsilon;
        for v in 0..n {
            let loop_re = Regex::star(edge[v][v].clone());
            let ins: Vec<usize> = (0..size)
                .filter(|&u| u != v && edge[u][v] != Regex::Empty)
                .collect();
            let outs: Vec<usize> = (0..size)
                .filter(|&w| w != v && edge[v][w] != Regex::Empty)
                .collect();
            for &u in &ins {
                for &w in &outs {
                    let path = Regex::concat(
                        Regex::concat(edge[u][v].clone(), loop_re.clone()),
                        edge[v][w].clone(),
                    );
                    let cur = std::mem::replace(&mut edge[u][w], Regex::Empty);
                    edge[u][w] = Regex::union(cur, path);
                }
            }
            for row in edge.iter_mut().take(size) {
                row[v] = Regex::Empty;
            }
            for cell in edge[v].iter_mut().take(size) {
                *cell = Regex::Empty;
            }
        }
        edge[n][n + 1].clone().tidy()
    }

    /// Text format: `alphabet:`, `states:`, `initial:`, `final:` header
    /// lines followed by `from symbol to` lines. Transitions into states
    /// that cannot reach a final state are omitted.
    pub fn to_text(&self) -> String {
        let co = self.coreachable();
        let mut out = format!("alphabet: {}\n", self.alphabet.names().join(" "));
        out.push_str(&format!("states: {}\n", self.num_states()));
        out.push_str(&format!("initial: {}\n", self.initial));
        let finals: Vec<String> = (0..self.num_states())
            .filter(|&q| self.finals[q])
            .map(|q| q.to_string())
            .collect();
        out.push_str(&format!("final: {}\n", finals.join(" ")));
        for q in 0..self.num_states() {
            for s in 0..self.alphabet.len() {
                let r = self.next(q, s);
                if co[r] {
                    out.push_str(&format!("{q} {} {r}\n", self.alphabet.name(s)));
                }
            }
        }
        out
    }

    /// Parses the text format written by [`Dfa::to_text`]. `#` starts a
    /// comment line; unlisted transitions go to a dead state.
    pub fn parse_text(text: &str) -> Result<Dfa> {
        let mut alphabet: Option<Alphabet> = None;
        let mut states: Option<usize> = None;
        let mut initial: Option<usize> = None;
        let mut finals: Vec<usize> = Vec::new();
        let mut edges = Vec::new();
        let parse_state = |tok: &str, line: usize, col: usize, n: Option<usize>| -> Result<usize> {
            let v: usize = tok.parse().map_err(|_| {
                Error::parse(line, col, format!("expected state number, found `{tok}`"))
            })?;
            match n {
                Some(n) if v < n => Ok(v),
                Some(n) => Err(Error::parse(
                    line,
                    col,
                    format!("state {v} out of range (states: {n})"),
                )),
                None => Err(Error::parse(line, col, "`states:` line must come first")),
            }
        };
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let col = raw.len() - raw.trim_start().len() + 1;
            if let Some(rest) = trimmed.strip_prefix("alphabet:") {
                let names: Vec<&str> = rest.split_whitespace().collect();
                for (j, n) in names.iter().enumerate() {
                    if names[..j].contains(n) {
                        return Err(Error::parse(line, col, format!("duplicate symbol `{n}`")));
                    }
                }
                alphabet = Some(Alphabet::new(names));
            } else if let Some(rest) = trimmed.strip_prefix("states:") {
                let n = rest
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(line, col, "expected a state count"))?;
                states = Some(n);
            } else if let Some(rest) = trimmed.strip_prefix("initial:") {
                initial = Some(parse_state(rest.trim(), line, col, states)?);
            } else if let Some(rest) = trimmed.strip_prefix("final:") {
                for tok in rest.split_whitespace() {
                    finals.push(parse_state(tok, line, col, states)?);
                }
            } else {
                let toks: Vec<&str> = trimmed.split_whitespace().collect();
                if toks.len() != 3 {
                    return Err(Error::parse(line, col, "expected `from symbol to`"));
                }
                let Some(alpha) = &alphabet else {
                    return Err(Error::parse(line, col, "`alphabet:` line must come first"));
                };
                let from = parse_state(toks[0], line, col, states)?;
                let sym = alpha.index_of(toks[1]).ok_or_else(|| {
                    Error::parse(line, col, format!("symbol `{}` not in alphabet", toks[1]))
                })?;
                let to = parse_state(toks[2], line, col, states)?;
                if edges.iter().any(|&(f, s, _)| f == from && s == sym) {
                    return Err(Error::parse(line, col, "nondeterministic transition"));
                }
                edges.push((from, sym, to));
            }
        }
        let alphabet = alphabet.ok_or_else(|| Error::parse(1, 1, "missing `alphabet:` line"))?;
        let states = states.ok_or_else(|| Error::parse(1, 1, "missing `states:` line"))?;
        if states == 0 {
            return Err(Error::parse(1, 1, "at least one state is required"));
        }
        let initial = initial.ok_or_else(|| Error::parse(1, 1, "missing `initial:` line"))?;
        Ok(Dfa::from_partial(
            alphabet, states, &edges, initial, &finals,
        ))
    }
}
