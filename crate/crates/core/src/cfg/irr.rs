//! Reduced-word fixpoint deciding `L ⊆ D*`.
//!
//! `Irr(X)` is the set of Dyck-reduced forms of the words derived from `X`.
//! Starting from empty sets, each round substitutes the current sets into
//! every right-hand side and reduces. When `L ⊆ D*` holds every word of
//! `Irr(X)` is bounded by `ℓ_X = |ρ(g)| + |ρ(d)|` for any derivation
//! `S ⇒* gXd`, so a longer word refutes the inclusion and the rounds stop.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use super::{Cfg, Symbol};
use crate::dyck::{reduce_into, Letter, ReducedWord};
use crate::error::{Error, Result};

const ITERATION_CAP: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IrrStatus {
    Bounded,
    Unbounded,
    NotDyckFactor,
}

/// Reduced form, "some derived word is nonempty" flag.
pub(crate) type IrrKey = (Vec<Letter>, bool);
/// Key ↦ a terminal word realizing it.
pub(crate) type IrrSet = BTreeMap<IrrKey, Vec<Letter>>;

#[derive(Clone, Debug)]
pub struct IrrReport {
    pub status: IrrStatus,
    /// Per nonterminal, the reduced words found (the full sets when bounded).
    pub irr: Vec<Vec<ReducedWord>>,
    /// Per nonterminal, the length budget `ℓ_X`.
    pub budgets: Vec<usize>,
    /// Number of rounds run.
    pub steps: usize,
    /// Nonterminal that broke the bound or left the Dyck-factor shape.
    pub offender: Option<usize>,
    pub(crate) sets: Vec<IrrSet>,
}

impl IrrReport {
    pub fn is_bounded(&self) -> bool {
        self.status == IrrStatus::Bounded
    }
}

/// Substitutes `sets` into `symbols` and reduces.
pub(crate) fn substitute(symbols: &[Symbol], sets: &[IrrSet]) -> IrrSet {
    let mut acc: IrrSet = BTreeMap::from([((Vec::new(), false), Vec::new())]);
    for s in symbols {
        let mut next = IrrSet::new();
        for ((red, ne), wit) in &acc {
            match *s {
                Symbol::Terminal(l) => {
                    let mut r = red.clone();
                    reduce_into(&mut r, &[l]);
                    let mut w = wit.clone();
                    w.push(l);
                    next.entry((r, true)).or_insert(w);
                }
                Symbol::Nonterminal(n) => {
                    for ((red2, ne2), wit2) in &sets[n] {
                        let mut r = red.clone();
                        reduce_into(&mut r, red2);
                        let key = (r, *ne || *ne2);
                        next.entry(key).or_insert_with(|| {
                            let mut w = wit.clone();
                            w.extend_from_slice(wit2);
                            w
                        });
                    }
                }
            }
        }
        acc = next;
        if acc.is_empty() {
            break;
        }
    }
    acc
}

impl Cfg {
    /// Shortest terminal word derivable from each nonterminal.
    pub(crate) fn shortest_yields(&self) -> Vec<Option<Vec<Letter>>> {
        let mut best: Vec<Option<Vec<Letter>>> = vec![None; self.nonterminals.len()];
        let mut changed = true;
        while changed {
            changed = false;
            for p in &self.productions {
                let mut word = Vec::new();
                let mut ok = true;
                for s in &p.rhs {
                    match *s {
                        Symbol::Terminal(l) => word.push(l),
                        Symbol::Nonterminal(n) => match &best[n] {
                            Some(w) => word.extend_from_slice(w),
                            None => {
                                ok = false;
                                break;
                            }
                        },
                    }
                }
                if ok && best[p.lhs].as_ref().is_none_or(|b| word.len() < b.len()) {
                    best[p.lhs] = Some(word);
                    changed = true;
                }
            }
        }
        best
    }

    /// Length budgets `ℓ_X` from a shortest witness derivation `S ⇒* gXd`.
    pub(crate) fn budgets(&self) -> Vec<usize> {
        let yields = self.shortest_yields();
        let n = self.nonterminals.len();
        let expand = |symbols: &[Symbol]| -> Vec<Letter> {
            let mut w = Vec::new();
            for s in symbols {
                match *s {
                    Symbol::Terminal(l) => w.push(l),
                    Symbol::Nonterminal(m) => w.extend(yields[m].clone().unwrap_or_default()),
                }
            }
            w
        };
        let mut ctx: Vec<Option<(Vec<Letter>, Vec<Letter>)>> = vec![None; n];
        let mut heap = BinaryHeap::new();
        ctx[self.axiom] = Some((Vec::new(), Vec::new()));
        heap.push(Reverse((0usize, self.axiom)));
        let mut done = vec![false; n];
        while let Some(Reverse((cost, x))) = heap.pop() {
            if done[x] {
                continue;
            }
            done[x] = true;
            let (g, d) = ctx[x].clone().unwrap();
            for p in self.productions.iter().filter(|p| p.lhs == x) {
                for (i, s) in p.rhs.iter().enumerate() {
                    let Symbol::Nonterminal(y) = *s else { continue };
                    let mut g2 = g.clone();
                    g2.extend(expand(&p.rhs[..i]));
                    let mut d2 = expand(&p.rhs[i + 1..]);
                    d2.extend_from_slice(&d);
                    let c = g2.len() + d2.len();
                    let better = match &ctx[y] {
                        None => true,
                        Some((gy, dy)) => !done[y] && c < gy.len() + dy.len(),
                    };
                    if better {
                        ctx[y] = Some((g2, d2));
                        heap.push(Reverse((c.max(cost), y)));
                    }
                }
            }
        }
        ctx.into_iter()
            .map(|c| match c {
                Some((g, d)) => {
                    let mut rg = Vec::new();
                    reduce_into(&mut rg, &g);
                    let mut rd = Vec::new();
                    reduce_into(&mut rd, &d);
                    rg.len() + rd.len()
                }
                None => 0,
            })
            .collect()
    }

    /// Runs the reduced-word fixpoint on the reduced form of the grammar.
    /// Nonterminal indices in the report refer to `self.reduce()`.
    pub fn irr_fixpoint(&self) -> Result<IrrReport> {
        let g = self.reduce()?;
        g.irr_fixpoint_reduced()
    }

    pub(crate) fn irr_fixpoint_reduced(&self) -> Result<IrrReport> {
        let n = self.nonterminals.len();
        let budgets = self.budgets();
        let mut sets: Vec<IrrSet> = vec![IrrSet::new(); n];
        let mut steps = 0;
        let finish = |status, sets: Vec<IrrSet>, steps, offender| IrrReport {
            status,
            irr: sets
                .iter()
                .map(|s| {
                    let mut words: Vec<Vec<Letter>> = s.keys().map(|(r, _)| r.clone()).collect();
                    words.dedup();
                    words.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
                    words.dedup();
                    words
                        .into_iter()
                        .map(ReducedWord::from_irreducible)
                        .collect()
                })
                .collect(),
            budgets: budgets.clone(),
            steps,
            offender,
            sets,
        };
        loop {
            if steps >= ITERATION_CAP {
                return Err(Error::Internal(
                    "reduced-word fixpoint did not converge".into(),
                ));
            }
            steps += 1;
            let mut next = sets.clone();
            for p in &self.productions {
                for (key, wit) in substitute(&p.rhs, &sets) {
                    next[p.lhs].entry(key).or_insert(wit);
                }
            }
            for (x, set) in next.iter().enumerate() {
                if set
                    .keys()
                    .any(|(r, _)| !ReducedWord::from_irreducible(r.clone()).is_canonical())
                {
                    return Ok(finish(IrrStatus::NotDyckFactor, next, steps, Some(x)));
                }
            }
            for (x, set) in next.iter().enumerate() {
                if set.keys().any(|(r, _)| r.len() > budgets[x]) {
                    return Ok(finish(IrrStatus::Unbounded, next, steps, Some(x)));
                }
            }
            if next == sets {
                return Ok(finish(IrrStatus::Bounded, next, steps, None));
            }
            sets = next;
        }
    }

    /// Decides `L ⊆ D*` (products of Dyck primes, the empty word included).
    pub fn is_dyck_star_subset(&self) -> Result<bool> {
        let g = match self.reduce() {
            Ok(g) => g,
            Err(Error::EmptyLanguage) => return Ok(true),
            Err(e) => return Err(e),
        };
        let report = g.irr_fixpoint_reduced()?;
        Ok(report.is_bounded()
            && report.irr[g.axiom] == vec![ReducedWord::from_irreducible(Vec::new())])
    }

    /// Decides `L ⊆ D_a` by checking `L ⊆ a T* ā` and then `a⁻¹Lā⁻¹ ⊆ D*`.
    pub fn is_dyck_prime_subset(&self, tag: usize) -> Result<bool> {
        let g = match self.reduce() {
            Ok(g) => g,
            Err(Error::EmptyLanguage) => return Ok(true),
            Err(e) => return Err(e),
        };
        if !g.is_wrapped_by(tag) {
            return Ok(false);
        }
        g.strip_outer(tag).is_dyck_star_subset()
    }

    /// The tag `a` with `L ⊆ D_a`, if any.
    pub fn dyck_prime_root(&self) -> Result<Option<usize>> {
        let g = self.reduce()?;
        let first = g.edge_letters(false);
        let roots: Vec<usize> = first[g.axiom]
            .iter()
            .filter(|l| l.open)
            .map(|l| l.tag)
            .collect();
        match roots.as_slice() {
            [tag] if g.is_dyck_prime_subset(*tag)? => Ok(Some(*tag)),
            _ => Ok(None),
        }
    }
}
