//! Iterating pairs `X ⇒⁺ gXd` and the finite-surfaces decision.
//!
//! For `L ⊆ D` every iterating pair satisfies `ρ(g) = x̄px` and
//! `ρ(d) = ȳq̄y` with `p`, `q` conjugate. The pair is flat when `p = ε`.
//! Surfaces are all finite iff no flat pair exists, and flat pairs can be
//! searched among elementary skeletons (no nonterminal repeated on the
//! spine), instantiated with the finite reduced-word sets of the sides.

use std::collections::BTreeSet;

use super::irr::{substitute, IrrSet};
use super::{Cfg, Symbol};
use crate::dyck::{Letter, TaggedWord};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairKind {
    Lifting,
    Flat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IteratingPair {
    pub nonterminal: usize,
    /// Terminal words with `X ⇒⁺ g X d`.
    pub g: TaggedWord,
    pub d: TaggedWord,
    pub kind: PairKind,
    /// `ρ(g) = x̄ p x`.
    pub x: Vec<usize>,
    pub p: Vec<usize>,
    /// Skeleton sides `X ⇒⁺ U X U'` before instantiation.
    pub left: Vec<Symbol>,
    pub right: Vec<Symbol>,
    /// `(production index, position)` along the spine.
    pub chain: Vec<(usize, usize)>,
}

#[derive(Clone, Debug)]
pub struct FiniteSurfaces {
    pub finite: bool,
    pub witness: Option<IteratingPair>,
    /// The reduced grammar the pair indices refer to.
    pub grammar: Cfg,
}

struct Skeleton {
    root: usize,
    left: Vec<Symbol>,
    right: Vec<Symbol>,
    chain: Vec<(usize, usize)>,
}

/// Splits `ρ(g) = x̄ z` into `x̄ p x`; `None` if `x` is not a suffix of `z`.
fn decompose(reduced: &[Letter]) -> Option<(Vec<usize>, Vec<usize>)> {
    let split = reduced.iter().position(|l| l.open).unwrap_or(reduced.len());
    let closers: Vec<usize> = reduced[..split].iter().map(|l| l.tag).collect();
    let openers: Vec<usize> = reduced[split..].iter().map(|l| l.tag).collect();
    if reduced[split..].iter().any(|l| !l.open) {
        return None;
    }
    // x̄ = closers, so x lists the same tags in reverse order
    let x: Vec<usize> = closers.iter().rev().copied().collect();
    if openers.len() < x.len() || openers[openers.len() - x.len()..] != x[..] {
        return None;
    }
    let p = openers[..openers.len() - x.len()].to_vec();
    Some((x, p))
}

impl Cfg {
    fn skeletons(&self) -> Vec<Skeleton> {
        let mut out = Vec::new();
        for root in 0..self.nonterminals.len() {
            let mut visited = vec![false; self.nonterminals.len()];
            visited[root] = true;
            self.extend_skeleton(
                root,
                root,
                &mut visited,
                Vec::new(),
                Vec::new(),
                Vec::new(),
                &mut out,
            );
        }
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn extend_skeleton(
        &self,
        root: usize,
        cur: usize,
        visited: &mut Vec<bool>,
        left: Vec<Symbol>,
        right: Vec<Symbol>,
        chain: Vec<(usize, usize)>,
        out: &mut Vec<Skeleton>,
    ) {
        for (pi, p) in self
            .productions
            .iter()
            .enumerate()
            .filter(|(_, p)| p.lhs == cur)
        {
            for (pos, s) in p.rhs.iter().enumerate() {
                let Symbol::Nonterminal(y) = *s else { continue };
                let mut l = left.clone();
                l.extend_from_slice(&p.rhs[..pos]);
                let mut r = p.rhs[pos + 1..].to_vec();
                r.extend_from_slice(&right);
                let mut c = chain.clone();
                c.push((pi, pos));
                if y == root {
                    out.push(Skeleton {
                        root,
                        left: l,
                        right: r,
                        chain: c,
                    });
                } else if !visited[y] {
                    visited[y] = true;
                    self.extend_skeleton(root, y, visited, l, r, c, out);
                    visited[y] = false;
                }
            }
        }
    }

    /// All instantiated elementary iterating pairs of the reduced grammar.
    /// Pairs where both sides only derive the empty word are skipped: they
    /// come from unit cycles and pump nothing.
    pub fn elementary_pairs(&self) -> Result<Vec<IteratingPair>> {
        let g = self.reduce()?;
        g.elementary_pairs_reduced()
    }

    fn elementary_pairs_reduced(&self) -> Result<Vec<IteratingPair>> {
        let report = self.irr_fixpoint_reduced()?;
        if !report.is_bounded() {
            return Err(Error::NotDyckSubset);
        }
        let sets: &[IrrSet] = &report.sets;
        let mut pairs = Vec::new();
        for sk in self.skeletons() {
            let lefts = substitute(&sk.left, sets);
            let rights = substitute(&sk.right, sets);
            let mut seen = BTreeSet::new();
            for ((u, ne_u), g) in &lefts {
                for ((v, ne_v), d) in &rights {
                    if !ne_u && !ne_v {
                        continue;
                    }
                    if !seen.insert((u.clone(), v.clone())) {
                        continue;
                    }
                    let (x, p) = decompose(u).ok_or(Error::NotDyckSubset)?;
                    pairs.push(IteratingPair {
                        nonterminal: sk.root,
                        g: TaggedWord(g.clone()),
                        d: TaggedWord(d.clone()),
                        kind: if p.is_empty() {
                            PairKind::Flat
                        } else {
                            PairKind::Lifting
                        },
                        x,
                        p,
                        left: sk.left.clone(),
                        right: sk.right.clone(),
                        chain: sk.chain.clone(),
                    });
                }
            }
        }
        Ok(pairs)
    }

    /// Decides whether every surface of `L ⊆ D` is finite; a flat pair is
    /// returned as witness otherwise.
    pub fn surfaces_are_finite(&self) -> Result<FiniteSurfaces> {
        let g = self.reduce()?;
        if g.dyck_prime_root()?.is_none() {
            return Err(Error::NotDyckSubset);
        }
        let pairs = g.elementary_pairs_reduced()?;
        let witness = pairs.into_iter().find(|p| p.kind == PairKind::Flat);
        Ok(FiniteSurfaces {
            finite: witness.is_none(),
            witness,
            grammar: g,
        })
    }

    /// Human-readable derivation chain of a pair.
    pub fn describe_pair(&self, pair: &IteratingPair) -> String {
        let mut steps = Vec::new();
        for &(pi, pos) in &pair.chain {
            let p = &self.productions[pi];
            let mut rhs = self.format_symbols(&p.rhs);
            if let Some(Symbol::Nonterminal(n)) = p.rhs.get(pos) {
                rhs = format!("{rhs}  [{}@{}]", self.nonterminals[*n], pos + 1);
            }
            steps.push(format!("{} -> {rhs}", self.nonterminals[p.lhs]));
        }
        steps.join("; ")
    }
}
