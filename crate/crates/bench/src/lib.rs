//! Scalable inputs for the benchmarks. Everything is built from a size
//! parameter so runs are reproducible without a random source.

use dtdkit::cfg::Cfg;
use dtdkit::dyck::{Letter, TagAlphabet};
use dtdkit::regular::TagDfa;
use dtdkit::xml::XmlGrammar;

pub fn tag_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("t{i}")).collect()
}

/// A grammar where tag `i` holds any number of tags `i+1` and the last tag
/// may nest back into the first.
pub fn chain_grammar(n: usize) -> XmlGrammar {
    let names = tag_names(n);
    let mut text = format!("axiom {}\n", names[0]);
    for i in 0..n {
        let next = &names[(i + 1) % n];
        if i + 1 == n {
            text.push_str(&format!("{} -> ({})?\n", names[i], next));
        } else {
            text.push_str(&format!("{} -> ({} | {})*\n", names[i], next, names[n - 1]));
        }
    }
    XmlGrammar::parse(&text, None).expect("chain grammar")
}

/// A full tree of the given depth and branching, as a word.
pub fn balanced_word(depth: usize, branching: usize, ntags: usize) -> Vec<Letter> {
    fn go(out: &mut Vec<Letter>, d: usize, b: usize, n: usize, tag: usize) {
        out.push(Letter::open(tag));
        if d > 0 {
            for k in 0..b {
                go(out, d - 1, b, n, (tag + k + 1) % n);
            }
        }
        out.push(Letter::close(tag));
    }
    let mut out = Vec::new();
    go(&mut out, depth, branching, ntags, 0);
    out
}

/// The language of `chain_grammar(n)` truncated to a finite automaton over
/// its sample documents.
pub fn sample_automaton(n: usize, docs: usize) -> TagDfa {
    let g = chain_grammar(n);
    let words: Vec<Vec<Letter>> = g.enumerate(4 * n).into_iter().take(docs).collect();
    TagDfa::from_words(g.tags().clone(), &words)
}

/// A grammar for nested `a`-`b` ladders with `n` nonterminals.
pub fn ladder_cfg(n: usize) -> Cfg {
    let mut text = String::from("axiom S0\n");
    for i in 0..n {
        let next = if i + 1 == n {
            "S0".to_string()
        } else {
            format!("S{}", i + 1)
        };
        text.push_str(&format!("S{i} -> a {next} /a | b /b | a /a\n"));
    }
    Cfg::parse(&text, TagAlphabet::new(), false).expect("ladder grammar")
}
