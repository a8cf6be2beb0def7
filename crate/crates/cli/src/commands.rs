use dtdkit::automata::Alphabet;
use dtdkit::cfg::{Cfg, Production, Symbol};
use dtdkit::dyck::{
    dyck_reduce, factor_primes, format_tags, is_dyck_prime as word_is_prime, is_dyck_word,
    trace as word_trace, weight_and_height, Letter, TagAlphabet, TaggedWord,
};
use dtdkit::hedge::{hedge_equal, BalancedGrammar, HedgeAutomaton, XmlVerdict};
use dtdkit::regular::{DyckCheck, HeightReport, TagDfa};
use dtdkit::xml::{self, InclusionWitness, Sequentiality, SurfaceFamily, XmlGrammar};
use dtdkit::Error;
use serde_json::{json, Map, Value};

use crate::input::{self, display_name, Input, InputError, Kind};
use crate::{Options, Report};

type Outcome = Result<Report, InputError>;

fn show(word: &[Letter], tags: &TagAlphabet) -> String {
    TaggedWord(word.to_vec()).display(tags).to_string()
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn decision(answer: bool, witness: Option<String>, extra: String) -> Report {
    Report {
        result: Value::Bool(answer),
        verdict: Some(answer),
        witness,
        text: format!("{}\n{extra}", yes_no(answer)),
    }
}

fn listing(lines: Vec<String>) -> Report {
    let text: String = lines.iter().map(|l| format!("{l}\n")).collect();
    Report {
        result: json!(lines),
        verdict: None,
        witness: None,
        text,
    }
}

fn unsupported(file: &str, command: &str, found: &Input) -> InputError {
    InputError::new(
        display_name(file),
        format!("`{command}` does not accept a {}", found.kind_name()),
    )
}

fn core(file: &str) -> impl Fn(Error) -> InputError + '_ {
    move |e| InputError::from_core(display_name(file), e)
}

fn lookup_tag(tags: &TagAlphabet, name: &str, file: &str) -> Result<usize, InputError> {
    tags.index_of(name)
        .ok_or_else(|| InputError::new(display_name(file), format!("unknown tag `{name}`")))
}

fn load(file: &str, opts: &Options) -> Result<Input, InputError> {
    input::load(file, opts.alphabet.as_ref())
}

/// Right-linear grammar of an automaton, one nonterminal per live state.
fn dfa_to_cfg(k: &TagDfa) -> Cfg {
    let dfa = k.dfa();
    let live = dfa.live();
    let names: Vec<String> = (0..dfa.num_states()).map(|q| format!("Q{q}")).collect();
    let mut productions = Vec::new();
    for q in (0..dfa.num_states()).filter(|&q| live[q]) {
        for s in 0..dfa.alphabet().len() {
            let r = dfa.next(q, s);
            if live[r] {
                productions.push(Production {
                    lhs: q,
                    rhs: vec![
                        Symbol::Terminal(Letter::from_symbol(s)),
                        Symbol::Nonterminal(r),
                    ],
                });
            }
        }
        if dfa.is_final(q) {
            productions.push(Production {
                lhs: q,
                rhs: Vec::new(),
            });
        }
    }
    Cfg::new(k.tags().clone(), names, productions, dfa.initial()).expect("states are in range")
}

/// Words of the language up to `max_len`, for reporting counterexamples.
fn sample(input: &Input, max_len: usize) -> Vec<Vec<Letter>> {
    match input {
        Input::Words(_, ws) => ws.iter().map(|w| w.0.clone()).collect(),
        Input::Xml(g) => g.enumerate(max_len),
        Input::Cfg(c) => c.enumerate(max_len),
        Input::Dfa(k) => k.enumerate(max_len),
    }
}

fn tags_of(input: &Input) -> &TagAlphabet {
    match input {
        Input::Words(t, _) => t,
        Input::Xml(g) => g.tags(),
        Input::Cfg(c) => c.tags(),
        Input::Dfa(k) => k.tags(),
    }
}

pub fn reduce(file: &str, opts: &Options) -> Outcome {
    let grammar = |r: Result<String, Error>| match r {
        Ok(text) => Ok(Report {
            result: Value::String(text.clone()),
            verdict: None,
            witness: None,
            text,
        }),
        Err(Error::EmptyLanguage) => Ok(Report {
            result: Value::Null,
            verdict: Some(false),
            witness: None,
            text: "empty language\n".into(),
        }),
        Err(e) => Err(core(file)(e)),
    };
    match load(file, opts)? {
        Input::Words(tags, words) => Ok(listing(
            words
                .iter()
                .map(|w| dyck_reduce(&w.0).to_word().display(&tags).to_string())
                .collect(),
        )),
        Input::Xml(g) => grammar(g.reduce().map(|r| r.to_string())),
        Input::Cfg(c) => grammar(c.reduce().map(|r| r.to_string())),
        other => Err(unsupported(file, "reduce", &other)),
    }
}

pub fn prime(file: &str, tag: Option<&str>, opts: &Options) -> Outcome {
    let (tags, words) = match load(file, opts)? {
        Input::Words(t, w) => (t, w),
        other => return Err(unsupported(file, "prime", &other)),
    };
    let root = tag.map(|t| lookup_tag(&tags, t, file)).transpose()?;
    let mut lines = String::new();
    let mut witness = None;
    for w in &words {
        let ok = word_is_prime(&w.0, root);
        let shown = show(&w.0, &tags);
        lines.push_str(&format!("{}  {shown}", yes_no(ok)));
        if let Ok(factors) = factor_primes(&w.0) {
            if factors.len() > 1 {
                let parts: Vec<String> = factors.iter().map(|f| show(&f.0, &tags)).collect();
                lines.push_str(&format!("  factors: {}", parts.join(" | ")));
            }
        }
        lines.push('\n');
        if !ok && witness.is_none() {
            witness = Some(shown);
        }
    }
    let all = witness.is_none();
    Ok(Report {
        result: Value::Bool(all),
        verdict: Some(all),
        witness,
        text: lines,
    })
}

pub fn trace(file: &str, opts: &Options) -> Outcome {
    let (tags, words) = match load(file, opts)? {
        Input::Words(t, w) => (t, w),
        other => return Err(unsupported(file, "trace", &other)),
    };
    let mut text = String::new();
    let mut rows = Vec::new();
    let mut witness = None;
    for w in &words {
        let (weight, height) = weight_and_height(&w.0);
        let shown = show(&w.0, &tags);
        let tr = word_trace(&w.0).ok();
        let tr_text = tr.as_ref().map(|t| format_tags(t, &tags));
        text.push_str(&format!(
            "trace: {}  weight: {weight}  height: {height}\n",
            tr_text.as_deref().unwrap_or("(not a prime)")
        ));
        rows.push(json!({"word": shown, "trace": tr_text, "weight": weight, "height": height}));
        if tr.is_none() && witness.is_none() {
            witness = Some(shown);
        }
    }
    Ok(Report {
        result: Value::Array(rows),
        verdict: Some(witness.is_none()),
        witness,
        text,
    })
}

pub fn is_dyck(file: &str, opts: &Options) -> Outcome {
    let input = load(file, opts)?;
    let answer = match &input {
        Input::Words(_, ws) => ws.iter().all(|w| is_dyck_word(&w.0)),
        Input::Xml(_) => true,
        Input::Cfg(c) => c.is_dyck_star_subset().map_err(core(file))?,
        Input::Dfa(k) => dfa_to_cfg(k).is_dyck_star_subset().map_err(core(file))?,
    };
    let witness = if answer {
        None
    } else {
        sample(&input, opts.max_len)
            .into_iter()
            .find(|w| !is_dyck_word(w))
            .map(|w| show(&w, tags_of(&input)))
    };
    Ok(decision(answer, witness, String::new()))
}

pub fn is_dyck_prime(file: &str, tag: Option<&str>, opts: &Options) -> Outcome {
    let input = load(file, opts)?;
    let tags = tags_of(&input).clone();
    let wanted = tag.map(|t| lookup_tag(&tags, t, file)).transpose()?;
    let root: Result<Option<usize>, String> = match &input {
        Input::Words(_, ws) => {
            let r = wanted.or_else(|| ws.first().and_then(|w| w.0.first()).map(|l| l.tag));
            if ws.iter().all(|w| word_is_prime(&w.0, r)) {
                Ok(r)
            } else {
                Err(String::new())
            }
        }
        Input::Xml(g) => match g.reduce() {
            Ok(r) if wanted.is_none_or(|t| t == r.axiom()) => Ok(Some(r.axiom())),
            Ok(_) => Err(String::new()),
            Err(Error::EmptyLanguage) => Ok(wanted),
            Err(e) => return Err(core(file)(e)),
        },
        Input::Cfg(c) => match wanted {
            Some(t) => match c.is_dyck_prime_subset(t).map_err(core(file))? {
                true => Ok(Some(t)),
                false => Err(String::new()),
            },
            None => match c.dyck_prime_root() {
                Ok(Some(t)) => Ok(Some(t)),
                Ok(None) => Err(String::new()),
                Err(Error::EmptyLanguage) => Ok(None),
                Err(e) => return Err(core(file)(e)),
            },
        },
        Input::Dfa(k) => match k.check_dyck() {
            DyckCheck::Prime(a) if wanted.is_none_or(|t| t == a) => Ok(Some(a)),
            DyckCheck::Prime(a) => Err(format!("every word starts with `{}`", tags.name(a))),
            DyckCheck::Rejected(reason) => Err(reason),
        },
    };
    match root {
        Ok(r) => {
            let extra = r
                .map(|a| format!("root: {}\n", tags.name(a)))
                .unwrap_or_default();
            Ok(decision(true, None, extra))
        }
        Err(reason) => {
            let words = sample(&input, opts.max_len);
            let guess = wanted.or_else(|| words.first().and_then(|w| w.first()).map(|l| l.tag));
            let found = words
                .into_iter()
                .find(|w| !word_is_prime(w, guess))
                .map(|w| show(&w, &tags));
            let witness = found.or((!reason.is_empty()).then_some(reason));
            Ok(decision(false, witness, String::new()))
        }
    }
}

/// Surfaces of any language input, with its root tag when there is one.
fn family(input: &Input, file: &str) -> Result<(SurfaceFamily, Option<usize>), InputError> {
    match input {
        Input::Xml(g) => {
            let r = g.reduce().map_err(core(file))?;
            Ok((r.surfaces().map_err(core(file))?, Some(r.axiom())))
        }
        Input::Cfg(c) => {
            let bg = BalancedGrammar::from_cfg(c).map_err(core(file))?;
            let mut roots: Vec<usize> = bg.axioms().iter().map(|&x| bg.tag_of(x)).collect();
            roots.dedup();
            let root = (roots.len() == 1).then(|| roots[0]);
            Ok((bg.to_hedge().surfaces(), root))
        }
        Input::Dfa(k) => regular_family(k, file),
        Input::Words(tags, ws) => {
            let words: Vec<Vec<Letter>> = ws.iter().map(|w| w.0.clone()).collect();
            regular_family(&TagDfa::from_words(tags.clone(), &words), file)
        }
    }
}

fn regular_family(k: &TagDfa, file: &str) -> Result<(SurfaceFamily, Option<usize>), InputError> {
    let root = match k.check_dyck() {
        DyckCheck::Prime(a) => Some(a),
        DyckCheck::Rejected(_) => None,
    };
    Ok((k.surfaces().map_err(core(file))?, root))
}

fn family_report(f: &SurfaceFamily) -> Report {
    let mut obj = Map::new();
    for (tag, regex) in f.describe() {
        obj.insert(tag, Value::String(regex));
    }
    Report {
        result: Value::Object(obj),
        verdict: None,
        witness: None,
        text: f.to_string(),
    }
}

pub fn surfaces(file: &str, opts: &Options) -> Outcome {
    let input = load(file, opts)?;
    let (f, _) = family(&input, file)?;
    Ok(family_report(&f))
}

pub fn surfaces_regular(file: &str, opts: &Options) -> Outcome {
    let input = load(file, opts)?;
    match &input {
        Input::Dfa(_) | Input::Words(..) => Ok(family_report(&family(&input, file)?.0)),
        other => Err(unsupported(file, "surfaces-regular", other)),
    }
}

fn grammar_report(g: &XmlGrammar) -> Report {
    let text = g.to_string();
    Report {
        result: Value::String(text.clone()),
        verdict: None,
        witness: None,
        text,
    }
}

pub fn standard(file: &str, axiom: Option<&str>, opts: &Options) -> Outcome {
    let input = load(file, opts)?;
    let (f, root) = family(&input, file)?;
    let root = match axiom {
        Some(name) => Some(lookup_tag(f.tags(), name, file)?),
        None => root,
    };
    let Some(root) = root else {
        return Err(InputError::new(
            display_name(file),
            "the language has no single root tag; pass --axiom",
        ));
    };
    match f.standard_grammar(root) {
        Ok(g) => Ok(grammar_report(&g)),
        Err(Error::EmptyLanguage) => Ok(Report {
            result: Value::Null,
            verdict: Some(false),
            witness: None,
            text: "empty language\n".into(),
        }),
        Err(e) => Err(core(file)(e)),
    }
}

type Acceptor<'a> = Box<dyn Fn(&[Letter]) -> bool + 'a>;

pub fn member(grammar: &str, documents: &str, opts: &Options) -> Outcome {
    let input = load(grammar, opts)?;
    let tags = tags_of(&input).clone();
    let (doc_tags, docs) = input::load_documents(documents, &tags)?;
    let known = |w: &[Letter]| w.iter().all(|l| l.tag < tags.len());
    let accept: Acceptor = match &input {
        Input::Xml(g) => Box::new(move |w| g.member(w)),
        Input::Cfg(c) => {
            let bg = BalancedGrammar::from_cfg(c).map_err(core(grammar))?;
            Box::new(move |w| bg.member(w))
        }
        Input::Dfa(k) => Box::new(move |w| k.accepts(w)),
        Input::Words(_, ws) => Box::new(move |w| ws.iter().any(|x| x.0 == w)),
    };
    let mut text = String::new();
    let mut witness = None;
    for d in &docs {
        let ok = known(&d.0) && accept(&d.0);
        let shown = show(&d.0, &doc_tags);
        text.push_str(&format!("{}  {shown}\n", yes_no(ok)));
        if !ok && witness.is_none() {
            witness = Some(shown);
        }
    }
    let all = witness.is_none();
    Ok(Report {
        result: Value::Bool(all),
        verdict: Some(all),
        witness,
        text,
    })
}

fn load_xml(file: &str, command: &str, opts: &Options) -> Result<XmlGrammar, InputError> {
    match load(file, opts)? {
        Input::Xml(g) => Ok(g),
        other => Err(unsupported(file, command, &other)),
    }
}

fn describe_witness(w: &InclusionWitness, tags: &TagAlphabet, from: &str, to: &str) -> String {
    match w {
        InclusionWitness::Surface { tag, trace } => format!(
            "surface of `{}`: `{}` is in {from} but not in {to}",
            tags.name(*tag),
            xml::format_trace(trace, tags)
        ),
        InclusionWitness::Axiom { left, right } => format!(
            "{from} is rooted at `{}`, {to} at `{}`",
            tags.name(*left),
            tags.name(*right)
        ),
    }
}

pub fn include(left: &str, right: &str, opts: &Options) -> Outcome {
    let g1 = load_xml(left, "include", opts)?;
    let g2 = load_xml(right, "include", opts)?;
    let (tags, w) = xml::inclusion_witness(&g1, &g2).map_err(core(left))?;
    let witness = w.map(|w| describe_witness(&w, &tags, "left", "right"));
    Ok(decision(witness.is_none(), witness, String::new()))
}

fn hedge_of(input: &Input, file: &str) -> Result<HedgeAutomaton, InputError> {
    match input {
        Input::Xml(g) => Ok(HedgeAutomaton::from_xml(g)),
        Input::Cfg(c) => Ok(BalancedGrammar::from_cfg(c).map_err(core(file))?.to_hedge()),
        other => Err(unsupported(file, "equal", other)),
    }
}

/// Re-reads an automaton over a larger tag alphabet containing its own.
fn widen(k: &TagDfa, tags: &TagAlphabet, map: &[usize]) -> dtdkit::automata::Dfa {
    let t = Alphabet::new(tags.symbol_names());
    let symbols: Vec<usize> = (0..k.dfa().alphabet().len())
        .map(|s| 2 * map[s / 2] + s % 2)
        .collect();
    k.dfa().with_alphabet(&t, &symbols)
}

pub fn equal(left: &str, right: &str, opts: &Options) -> Outcome {
    let a = load(left, opts)?;
    let b = load(right, opts)?;
    let witness = match (&a, &b) {
        (Input::Xml(g1), Input::Xml(g2)) => {
            let (tags, w) = xml::equals(g1, g2).map_err(core(left))?;
            w.map(|(forward, w)| {
                let (from, to) = if forward {
                    ("left", "right")
                } else {
                    ("right", "left")
                };
                describe_witness(&w, &tags, from, to)
            })
        }
        (Input::Dfa(_) | Input::Words(..), Input::Dfa(_) | Input::Words(..)) => {
            let (k1, k2) = (
                as_regular(&a).expect("regular"),
                as_regular(&b).expect("regular"),
            );
            let (tags, map2) = k1.tags().union(k2.tags());
            let map1: Vec<usize> = (0..k1.tags().len()).collect();
            let d1 = widen(&k1, &tags, &map1);
            let d2 = widen(&k2, &tags, &map2);
            let w = d1.equal_witness(&d2).map_err(core(left))?;
            w.map(|w| TaggedWord::from_symbols(&w).display(&tags).to_string())
        }
        _ => {
            let h1 = hedge_of(&a, left)?;
            let h2 = hedge_of(&b, right)?;
            let (tags, tree) = hedge_equal(&h1, &h2).map_err(core(left))?;
            tree.map(|t| t.display(&tags))
        }
    };
    Ok(decision(witness.is_none(), witness, String::new()))
}

pub fn intersect(left: &str, right: &str, opts: &Options) -> Outcome {
    let g1 = load_xml(left, "intersect", opts)?;
    let g2 = load_xml(right, "intersect", opts)?;
    match xml::intersect(&g1, &g2) {
        Ok(g) => Ok(grammar_report(&g)),
        Err(Error::EmptyLanguage) => Ok(Report {
            result: Value::Null,
            verdict: Some(false),
            witness: None,
            text: "empty language\n".into(),
        }),
        Err(e) => Err(core(left)(e)),
    }
}

pub fn finite_surfaces(file: &str, opts: &Options) -> Outcome {
    let input = load(file, opts)?;
    if let Input::Cfg(c) = &input {
        let fs = c.surfaces_are_finite().map_err(core(file))?;
        let witness = fs.witness.as_ref().map(|p| {
            let g = &fs.grammar;
            format!(
                "{} =>+ g {} d with g = {}, d = {}; via {}",
                g.nonterminals()[p.nonterminal],
                g.nonterminals()[p.nonterminal],
                p.g.display(g.tags()),
                p.d.display(g.tags()),
                g.describe_pair(p)
            )
        });
        return Ok(decision(fs.finite, witness, String::new()));
    }
    let (f, _) = family(&input, file)?;
    let infinite = (0..f.tags().len()).find(|&a| !f.surface(a).is_finite());
    let witness = infinite.map(|a| format!("S_{} is infinite", f.tags().name(a)));
    Ok(decision(infinite.is_none(), witness, String::new()))
}

fn xml_verdict(v: XmlVerdict, tags: &TagAlphabet) -> Report {
    match v {
        XmlVerdict::Xml(g) => decision(true, None, g.to_string()),
        XmlVerdict::NotXml(t) => decision(false, Some(t.display(tags)), String::new()),
    }
}

pub fn is_xml_balanced(file: &str, opts: &Options) -> Outcome {
    match load(file, opts)? {
        Input::Cfg(c) => {
            let bg = BalancedGrammar::from_cfg(&c).map_err(core(file))?;
            let v = bg.is_xml().map_err(core(file))?;
            Ok(xml_verdict(v, bg.tags()))
        }
        Input::Xml(g) => Ok(decision(
            true,
            None,
            g.reduce().map_err(core(file))?.to_string(),
        )),
        other => Err(unsupported(file, "is-xml-balanced", &other)),
    }
}

fn as_regular(input: &Input) -> Option<TagDfa> {
    match input {
        Input::Dfa(k) => Some(k.clone()),
        Input::Words(tags, ws) => {
            let words: Vec<Vec<Letter>> = ws.iter().map(|w| w.0.clone()).collect();
            Some(TagDfa::from_words(tags.clone(), &words))
        }
        _ => None,
    }
}

fn regular_input(file: &str, command: &str, opts: &Options) -> Result<TagDfa, InputError> {
    let input = load(file, opts)?;
    as_regular(&input).ok_or_else(|| unsupported(file, command, &input))
}

pub fn is_xml_regular(file: &str, contexts: bool, opts: &Options) -> Outcome {
    let k = regular_input(file, "is-xml-regular", opts)?;
    let v = if contexts {
        k.is_xml_by_contexts()
    } else {
        k.is_xml()
    };
    match v {
        Ok(v) => Ok(xml_verdict(v, k.tags())),
        Err(e @ (Error::NotDyckPrimeSubset(_) | Error::NotDyckSubset | Error::EmptyLanguage)) => {
            Ok(decision(false, Some(e.to_string()), String::new()))
        }
        Err(e) => Err(core(file)(e)),
    }
}

pub fn height(file: &str, opts: &Options) -> Outcome {
    let k = regular_input(file, "height", opts)?;
    Ok(match k.height() {
        HeightReport::Finite(h) => Report {
            result: json!(h),
            verdict: Some(true),
            witness: None,
            text: format!("finite: {h}\n"),
        },
        HeightReport::Infinite { state, cycle } => Report {
            result: Value::Null,
            verdict: Some(false),
            witness: Some(show(&cycle, k.tags())),
            text: format!("infinite: cycle at state {state}\n"),
        },
    })
}

fn cycle_text(cycle: &[usize], tags: &TagAlphabet) -> String {
    let mut names: Vec<&str> = cycle.iter().map(|&a| tags.name(a)).collect();
    if let Some(&first) = names.first() {
        names.push(first);
    }
    names.join(" -> ")
}

pub fn is_sequential(file: &str, opts: &Options) -> Outcome {
    let g = load_xml(file, "is-sequential", opts)?
        .reduce()
        .map_err(core(file))?;
    Ok(match g.sequentiality().map_err(core(file))? {
        Sequentiality::Acyclic(order) => decision(
            true,
            None,
            format!("order: {}\n", format_tags(&order, g.tags())),
        ),
        Sequentiality::Cycle(c) => decision(false, Some(cycle_text(&c, g.tags())), String::new()),
    })
}

pub fn to_regular(file: &str, opts: &Options) -> Outcome {
    let g = load_xml(file, "to-regular", opts)?
        .reduce()
        .map_err(core(file))?;
    match g.to_regular() {
        Ok(dfa) => {
            let text = dfa.to_text();
            Ok(Report {
                result: Value::String(text.clone()),
                verdict: None,
                witness: None,
                text,
            })
        }
        Err(Error::NotSequential(_)) => {
            let witness = match g.sequentiality().map_err(core(file))? {
                Sequentiality::Cycle(c) => Some(cycle_text(&c, g.tags())),
                Sequentiality::Acyclic(_) => None,
            };
            Ok(Report {
                result: Value::Null,
                verdict: Some(false),
                witness,
                text: "not regular: the tag graph has a cycle\n".into(),
            })
        }
        Err(e) => Err(core(file)(e)),
    }
}

pub fn parse_dtd(file: &str, opts: &Options) -> Outcome {
    let text = input::read_text(file)?;
    match input::parse(&text, Kind::Dtd, display_name(file), opts.alphabet.as_ref())? {
        Input::Xml(g) => Ok(grammar_report(&g)),
        _ => unreachable!("DTD input parses to a grammar"),
    }
}

pub fn enumerate(file: &str, opts: &Options) -> Outcome {
    let input = load(file, opts)?;
    let tags = tags_of(&input).clone();
    let mut words = sample(&input, opts.max_len);
    if let Input::Words(..) = input {
        words.retain(|w| w.len() <= opts.max_len);
        words.sort_by(|a, b| {
            a.len().cmp(&b.len()).then_with(|| {
                a.iter()
                    .map(|l| l.symbol())
                    .cmp(b.iter().map(|l| l.symbol()))
            })
        });
        words.dedup();
    }
    Ok(listing(words.iter().map(|w| show(w, &tags)).collect()))
}
