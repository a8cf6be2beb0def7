//! Decisions on XML-languages through their surfaces: inclusion, equality,
//! intersection, and regularity of sequential grammars.

use super::XmlGrammar;
use crate::automata::{Alphabet, Dfa, Nfa};
use crate::dyck::TagAlphabet;
use crate::error::{Error, Result};

/// Why `L(g1) ⊆ L(g2)` fails. Tags index the union alphabet returned with it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InclusionWitness {
    /// A word of `S_a(L1)` outside `S_a(L2)`.
    Surface { tag: usize, trace: Vec<usize> },
    /// Both languages are nonempty but rooted at different tags.
    Axiom { left: usize, right: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sequentiality {
    /// Useful tags in an order where children come before parents.
    Acyclic(Vec<usize>),
    /// A cycle `a₀ → a₁ → … → a₀` of the tag graph, listed without repetition.
    Cycle(Vec<usize>),
}

/// Surfaces of a grammar over a target alphabet; all empty when the
/// language is.
fn aligned_surfaces(g: &XmlGrammar, tags: &TagAlphabet, map: &[usize]) -> Result<Option<Vec<Dfa>>> {
    match g.reduce() {
        Ok(r) => Ok(Some(r.with_tags(tags, map).content)),
        Err(Error::EmptyLanguage) => Ok(None),
        Err(e) => Err(e),
    }
}

/// `None` when `L(g1) ⊆ L(g2)`; otherwise a witness over the returned
/// union alphabet (g1's tags first).
pub fn inclusion_witness(
    g1: &XmlGrammar,
    g2: &XmlGrammar,
) -> Result<(TagAlphabet, Option<InclusionWitness>)> {
    let (union, map2) = g1.tags.union(&g2.tags);
    let map1: Vec<usize> = (0..g1.tags.len()).collect();
    let Some(s1) = aligned_surfaces(g1, &union, &map1)? else {
        return Ok((union, None));
    };
    let a1 = g1.axiom;
    let a2 = map2[g2.axiom];
    let Some(s2) = aligned_surfaces(g2, &union, &map2)? else {
        let trace = s1[a1].shortest_word().expect("nonempty surface");
        return Ok((union, Some(InclusionWitness::Surface { tag: a1, trace })));
    };
    if a1 != a2 {
        return Ok((
            union,
            Some(InclusionWitness::Axiom {
                left: a1,
                right: a2,
            }),
        ));
    }
    for (tag, (x, y)) in s1.iter().zip(&s2).enumerate() {
        if let Some(trace) = x.subset_witness(y)? {
            return Ok((union, Some(InclusionWitness::Surface { tag, trace })));
        }
    }
    Ok((union, None))
}

pub fn includes(g1: &XmlGrammar, g2: &XmlGrammar) -> Result<bool> {
    Ok(inclusion_witness(g1, g2)?.1.is_none())
}

/// `None` when equal; otherwise `(left_to_right, witness)` where the flag
/// tells which inclusion failed.
pub fn equals(
    g1: &XmlGrammar,
    g2: &XmlGrammar,
) -> Result<(TagAlphabet, Option<(bool, InclusionWitness)>)> {
    let (union, w) = inclusion_witness(g1, g2)?;
    if let Some(w) = w {
        return Ok((union, Some((true, w))));
    }
    // align both over the union so witnesses share its indices
    let (_, map2) = g1.tags.union(&g2.tags);
    let ident: Vec<usize> = (0..g1.tags.len()).collect();
    let (_, w) = inclusion_witness(&g2.with_tags(&union, &map2), &g1.with_tags(&union, &ident))?;
    Ok((union, w.map(|w| (false, w))))
}

/// Letterwise intersection of surfaces, reduced. Different axioms give
/// the empty language.
pub fn intersect(g1: &XmlGrammar, g2: &XmlGrammar) -> Result<XmlGrammar> {
    let (union, map2) = g1.tags.union(&g2.tags);
    let map1: Vec<usize> = (0..g1.tags.len()).collect();
    let (Some(s1), Some(s2)) = (
        aligned_surfaces(g1, &union, &map1)?,
        aligned_surfaces(g2, &union, &map2)?,
    ) else {
        return Err(Error::EmptyLanguage);
    };
    if g1.axiom != map2[g2.axiom] {
        return Err(Error::EmptyLanguage);
    }
    let content = s1
        .iter()
        .zip(&s2)
        .map(|(x, y)| x.intersection(y))
        .collect::<Result<Vec<_>>>()?;
    XmlGrammar::new(union, content, g1.axiom)?.reduce()
}

impl XmlGrammar {
    /// Tag graph of the reduced grammar: `a → b` when `b` occurs in a word
    /// of `R_a`.
    fn tag_graph(&self) -> Result<(XmlGrammar, Vec<Vec<usize>>)> {
        let r = self.reduce()?;
        let graph = r
            .content
            .iter()
            .map(|d| {
                d.live_symbols()
                    .into_iter()
                    .enumerate()
                    .filter_map(|(b, u)| u.then_some(b))
                    .collect()
            })
            .collect();
        Ok((r, graph))
    }

    /// Acyclicity of the tag graph of the reduced grammar.
    pub fn sequentiality(&self) -> Result<Sequentiality> {
        let (r, graph) = self.tag_graph()?;
        let n = r.tags.len();
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut color = vec![0u8; n];
        let mut order = Vec::new();
        let mut path: Vec<usize> = Vec::new();
        let mut iters: Vec<usize> = Vec::new();
        color[r.axiom] = 1;
        path.push(r.axiom);
        iters.push(0);
        while let Some(&v) = path.last() {
            let i = *iters.last().unwrap();
            if i < graph[v].len() {
                *iters.last_mut().unwrap() += 1;
                let w = graph[v][i];
                match color[w] {
                    0 => {
                        color[w] = 1;
                        path.push(w);
                        iters.push(0);
                    }
                    1 => {
                        let start = path.iter().position(|&x| x == w).unwrap();
                        return Ok(Sequentiality::Cycle(path[start..].to_vec()));
                    }
                    _ => {}
                }
            } else {
                color[v] = 2;
                order.push(v);
                path.pop();
                iters.pop();
            }
        }
        Ok(Sequentiality::Acyclic(order))
    }

    pub fn is_sequential(&self) -> Result<bool> {
        Ok(matches!(self.sequentiality()?, Sequentiality::Acyclic(_)))
    }

    /// Minimal automaton over `T = A ∪ Ā` (symbols `a /a b /b ...`)
    /// recognizing the language of a sequential grammar.
    pub fn to_regular(&self) -> Result<Dfa> {
        let order = match self.sequentiality()? {
            Sequentiality::Acyclic(order) => order,
            Sequentiality::Cycle(cycle) => {
                return Err(Error::NotSequential(self.tags.name(cycle[0]).to_string()))
            }
        };
        let r = self.reduce()?;
        let t = Alphabet::new(r.tags.symbol_names());
        let mut built: Vec<Option<Dfa>> = vec![None; r.tags.len()];
        for &b in &order {
            let content = &r.content[b];
            let mut nfa = Nfa::new(t.clone());
            let start = nfa.add_state();
            let end = nfa.add_state();
            nfa.set_initial(vec![start]);
            nfa.set_final(end, true);
            let live = content.live();
            let offset = nfa.num_states();
            for q in 0..content.num_states() {
                let s = nfa.add_state();
                debug_assert_eq!(s, offset + q);
            }
            nfa.add_transition(start, 2 * b, offset + content.initial());
            for q in (0..content.num_states()).filter(|&q| live[q]) {
                if content.is_final(q) {
                    nfa.add_transition(offset + q, 2 * b + 1, end);
                }
                for (c, sub) in built.iter().enumerate() {
                    let q2 = content.next(q, c);
                    if !live[q2] {
                        continue;
                    }
                    let child = sub.as_ref().expect("children come first").to_nfa();
                    let base = nfa.embed(&child);
                    for s in 0..child.num_states() {
                        nfa.set_final(base + s, false);
                    }
                    for &i in child.initial_states() {
                        nfa.add_epsilon(offset + q, base + i);
                    }
                    for s in (0..child.num_states()).filter(|&s| child.is_final(s)) {
                        nfa.add_epsilon(base + s, offset + q2);
                    }
                }
            }
            built[b] = Some(nfa.determinize().minimize());
        }
        Ok(built[r.axiom].take().expect("axiom built"))
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::{word, xg};
    use super::*;
    use crate::dyck::Letter;

    fn symbols(w: &[Letter]) -> Vec<usize> {
        w.iter().map(|l| l.symbol()).collect()
    }

    #[test]
    fn inclusion_examples() {
        let g1 = xg("axiom a\na -> b\nb -> ~e~");
        let g2 = xg("axiom a\na -> b\nb -> b?");
        assert!(includes(&g1, &g2).unwrap());
        let (_, w) = inclusion_witness(&g2, &g1).unwrap();
        assert_eq!(
            w,
            Some(InclusionWitness::Surface {
                tag: 1,
                trace: vec![1]
            })
        );
        let (_, eq) = equals(&g1, &g2).unwrap();
        assert_eq!(
            eq,
            Some((
                false,
                InclusionWitness::Surface {
                    tag: 1,
                    trace: vec![1]
                }
            ))
        );
        assert_eq!(equals(&g2, &g2).unwrap().1, None);
    }

    #[test]
    fn prime_inclusion_witness() {
        let all = xg("a -> a*");
        let opt = xg("a -> (a|~e~)");
        assert_eq!(
            inclusion_witness(&all, &opt).unwrap().1,
            Some(InclusionWitness::Surface {
                tag: 0,
                trace: vec![0, 0]
            })
        );
        assert_eq!(intersect(&opt, &all).unwrap(), opt);
    }

    #[test]
    fn inclusion_across_alphabets() {
        let g1 = xg("axiom a\na -> c?\nc -> ~e~");
        let g2 = xg("axiom a\na -> b?\nb -> ~e~");
        let (union, w) = inclusion_witness(&g1, &g2).unwrap();
        assert_eq!(union.names(), &["a", "c", "b"]);
        assert_eq!(
            w,
            Some(InclusionWitness::Surface {
                tag: 0,
                trace: vec![1]
            })
        );
        let (union, eq) = equals(&g1, &g2).unwrap();
        assert_eq!(union.names(), &["a", "c", "b"]);
        assert!(eq.unwrap().0);
        let (_, eq) = equals(&xg("axiom a\na -> ~e~"), &g2).unwrap();
        assert_eq!(
            eq,
            Some((
                false,
                InclusionWitness::Surface {
                    tag: 0,
                    trace: vec![1]
                }
            ))
        );
    }

    #[test]
    fn inclusion_with_axiom_mismatch() {
        let g1 = xg("a -> ~e~");
        let g2 = xg("b -> ~e~");
        assert_eq!(
            inclusion_witness(&g1, &g2).unwrap().1,
            Some(InclusionWitness::Axiom { left: 0, right: 1 })
        );
        let empty = xg("a -> a");
        assert!(includes(&empty, &g2).unwrap());
        assert!(!includes(&g2, &empty).unwrap());
    }

    #[test]
    fn intersection_examples() {
        let g1 = xg("axiom a\na -> b*\nb -> ~e~");
        let g2 = xg("axiom a\na -> b b?\nb -> ~e~");
        let i = intersect(&g1, &g2).unwrap();
        assert!(includes(&i, &g2).unwrap() && includes(&g2, &i).unwrap());
        assert!(i.member(&word(&i, "a b /b b /b /a")));
        assert!(!i.member(&word(&i, "a b /b b /b b /b /a")));
        assert_eq!(
            intersect(&xg("a -> ~e~"), &xg("b -> ~e~")),
            Err(Error::EmptyLanguage)
        );
        let g3 = xg("axiom a\na -> b\nb -> b");
        assert_eq!(intersect(&g1, &g3), Err(Error::EmptyLanguage));
    }

    #[test]
    fn sequential_examples() {
        let g = xg("axiom a\na -> b c\nb -> c?\nc -> ~e~");
        assert_eq!(
            g.sequentiality().unwrap(),
            Sequentiality::Acyclic(vec![2, 1, 0])
        );
        let dfa = g.to_regular().unwrap();
        for w in g.enumerate(12) {
            assert!(dfa.accepts(&symbols(&w)));
        }
        assert!(dfa.accepts(&symbols(&word(&g, "a b /b c /c /a"))));
        assert!(!dfa.accepts(&symbols(&word(&g, "a c /c b /b /a"))));
        assert!(dfa.is_finite());
        assert_eq!(dfa.enumerate(20).len(), 2);

        let cyc = xg("axiom a\na -> b\nb -> b?");
        assert_eq!(cyc.sequentiality().unwrap(), Sequentiality::Cycle(vec![1]));
        assert_eq!(cyc.to_regular(), Err(Error::NotSequential("b".into())));
        let two = xg("axiom a\na -> b?\nb -> a");
        assert_eq!(
            two.sequentiality().unwrap(),
            Sequentiality::Cycle(vec![0, 1])
        );
    }

    #[test]
    fn regular_star_language() {
        let g = xg("axiom a\na -> b*\nb -> ~e~");
        let dfa = g.to_regular().unwrap();
        assert!(!dfa.is_finite());
        let words: Vec<Vec<usize>> = g.enumerate(10).iter().map(|w| symbols(w)).collect();
        assert_eq!(dfa.enumerate(10), words);
    }
}
