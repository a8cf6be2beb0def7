use std::fmt;

use super::{Alphabet, Nfa};
use crate::error::{Error, Result};

/// Regular expression syntax tree over dense symbols.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Regex {
    Empty,
    Epsilon,
    Symbol(usize),
    Concat(Vec<Regex>),
    Union(Vec<Regex>),
    Star(Box<Regex>),
    Plus(Box<Regex>),
    Optional(Box<Regex>),
}

impl Regex {
    /// Parses the surface syntax: `|` union, juxtaposition or `,`
    /// concatenation, postfix `* + ?`, parentheses, `~e~` for the empty
    /// word and `{}` for the empty set. Identifiers are resolved through
    /// `resolve`, which may add them to an alphabet.
    pub fn parse(text: &str, mut resolve: impl FnMut(&str) -> Result<usize>) -> Result<Regex> {
        let tokens = tokenize(text)?;
        let mut parser = Parser {
            tokens: &tokens,
            pos: 0,
            resolve: &mut resolve,
        };
        let regex = parser.union()?;
        if let Some(tok) = parser.peek() {
            return Err(Error::parse(
                1,
                tok.col,
                format!("unexpected `{}`", tok.kind),
            ));
        }
        Ok(regex)
    }

    /// Thompson construction.
    pub fn compile(&self, alphabet: &Alphabet) -> Nfa {
        let mut nfa = Nfa::new(alphabet.clone());
        let start = nfa.add_state();
        let end = nfa.add_state();
        self.build(&mut nfa, start, end);
        nfa.set_initial(vec![start]);
        nfa.set_final(end, true);
        nfa
    }

    fn build(&self, nfa: &mut Nfa, from: usize, to: usize) {
        match self {
            Regex::Empty => {}
            Regex::Epsilon => nfa.add_epsilon(from, to),
            Regex::Symbol(s) => nfa.add_transition(from, *s, to),
            Regex::Concat(parts) => {
                let mut cur = from;
                for (i, part) in parts.iter().enumerate() {
                    let next = if i + 1 == parts.len() {
                        to
                    } else {
                        nfa.add_state()
                    };
                    part.build(nfa, cur, next);
                    cur = next;
                }
                if parts.is_empty() {
                    nfa.add_epsilon(from, to);
                }
            }
            Regex::Union(parts) => {
                for part in parts {
                    let (s, e) = (nfa.add_state(), nfa.add_state());
                    nfa.add_epsilon(from, s);
                    part.build(nfa, s, e);
                    nfa.add_epsilon(e, to);
                }
            }
            Regex::Star(inner) | Regex::Plus(inner) => {
                let (s, e) = (nfa.add_state(), nfa.add_state());
                nfa.add_epsilon(from, s);
                inner.build(nfa, s, e);
                nfa.add_epsilon(e, s);
                nfa.add_epsilon(e, to);
                if matches!(self, Regex::Star(_)) {
                    nfa.add_epsilon(from, to);
                }
            }
            Regex::Optional(inner) => {
                inner.build(nfa, from, to);
                nfa.add_epsilon(from, to);
            }
        }
    }

    /// Symbols occurring in the expression.
    pub fn symbols(&self, out: &mut Vec<usize>) {
        match self {
            Regex::Empty | Regex::Epsilon => {}
            Regex::Symbol(s) => out.push(*s),
            Regex::Concat(parts) | Regex::Union(parts) => parts.iter().for_each(|p| p.symbols(out)),
            Regex::Star(r) | Regex::Plus(r) | Regex::Optional(r) => r.symbols(out),
        }
    }

    /// Applies `f` to every symbol.
    pub fn map_symbols(&self, f: &impl Fn(usize) -> Regex) -> Regex {
        match self {
            Regex::Empty => Regex::Empty,
            Regex::Epsilon => Regex::Epsilon,
            Regex::Symbol(s) => f(*s),
            Regex::Concat(parts) => Regex::Concat(parts.iter().map(|p| p.map_symbols(f)).collect()),
            Regex::Union(parts) => Regex::Union(parts.iter().map(|p| p.map_symbols(f)).collect()),
            Regex::Star(r) => Regex::Star(Box::new(r.map_symbols(f))),
            Regex::Plus(r) => Regex::Plus(Box::new(r.map_symbols(f))),
            Regex::Optional(r) => Regex::Optional(Box::new(r.map_symbols(f))),
        }
    }

    pub(crate) fn concat(a: Regex, b: Regex) -> Regex {
        match (a, b) {
            (Regex::Empty, _) | (_, Regex::Empty) => Regex::Empty,
            (Regex::Epsilon, r) | (r, Regex::Epsilon) => r,
            (Regex::Concat(mut x), Regex::Concat(y)) => {
                x.extend(y);
                Regex::Concat(x)
            }
            (Regex::Concat(mut x), r) => {
                x.push(r);
                Regex::Concat(x)
            }
            (r, Regex::Concat(mut y)) => {
                y.insert(0, r);
                Regex::Concat(y)
            }
            (x, y) => Regex::Concat(vec![x, y]),
        }
    }

    pub(crate) fn union(a: Regex, b: Regex) -> Regex {
        let mut parts = Vec::new();
        let mut nullable = false;
        for r in [a, b] {
            match r {
                Regex::Empty => {}
                Regex::Epsilon => nullable = true,
                Regex::Union(xs) => parts.extend(xs),
                Regex::Optional(inner) => {
                    nullable = true;
                    match *inner {
                        Regex::Union(xs) => parts.extend(xs),
                        other => parts.push(other),
                    }
                }
                other => parts.push(other),
            }
        }
        parts.sort();
        parts.dedup();
        if nullable {
            parts.retain(|p| !p.is_nullable_shape());
            let nullable_part = parts.is_empty();
            if nullable_part {
                return Regex::Epsilon;
            }
        }
        let body = match parts.len() {
            0 => {
                return if nullable {
                    Regex::Epsilon
                } else {
                    Regex::Empty
                }
            }
            1 => parts.pop().unwrap(),
            _ => Regex::Union(parts),
        };
        if nullable {
            body.optional()
        } else {
            body
        }
    }

    fn optional(self) -> Regex {
        match self {
            Regex::Plus(inner) => Regex::Star(inner),
            r @ (Regex::Star(_) | Regex::Optional(_) | Regex::Epsilon) => r,
            r => Regex::Optional(Box::new(r)),
        }
    }

    fn is_nullable_shape(&self) -> bool {
        matches!(self, Regex::Epsilon)
    }

    pub(crate) fn star(r: Regex) -> Regex {
        match r {
            Regex::Empty | Regex::Epsilon => Regex::Epsilon,
            Regex::Star(inner) | Regex::Plus(inner) | Regex::Optional(inner) => Regex::Star(inner),
            r => Regex::Star(Box::new(r)),
        }
    }

    /// Rewrites `x x*` and `x* x` into `x+`.
    pub(crate) fn tidy(self) -> Regex {
        match self {
            Regex::Concat(parts) => {
                let parts: Vec<Regex> = parts.into_iter().map(Regex::tidy).collect();
                let mut out: Vec<Regex> = Vec::with_capacity(parts.len());
                for p in parts {
                    match (out.last(), &p) {
                        (Some(prev), Regex::Star(inner)) if **inner == *prev => {
                            let inner = inner.clone();
                            out.pop();
                            out.push(Regex::Plus(inner));
                        }
                        (Some(Regex::Star(inner)), _) if **inner == p => {
                            let inner = inner.clone();
                            out.pop();
                            out.push(Regex::Plus(inner));
                        }
                        _ => out.push(p),
                    }
                }
                if out.len() == 1 {
                    out.pop().unwrap()
                } else {
                    Regex::Concat(out)
                }
            }
            Regex::Union(parts) => factor_union(parts.into_iter().map(Regex::tidy).collect()),
            Regex::Star(r) => Regex::Star(Box::new(r.tidy())),
            Regex::Plus(r) => Regex::Plus(Box::new(r.tidy())),
            Regex::Optional(r) => Regex::Optional(Box::new(r.tidy())),
            r => r,
        }
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> impl fmt::Display + 'a {
        RegexDisplay {
            regex: self,
            alphabet,
        }
    }
}

struct RegexDisplay<'a> {
    regex: &'a Regex,
    alphabet: &'a Alphabet,
}

impl RegexDisplay<'_> {
    // precedence: 0 union, 1 concat, 2 postfix operand
    fn write(&self, f: &mut fmt::Formatter<'_>, r: &Regex, prec: u8) -> fmt::Result {
        match r {
            Regex::Empty => f.write_str("{}"),
            Regex::Epsilon => f.write_str("~e~"),
            Regex::Symbol(s) => f.write_str(self.alphabet.name(*s)),
            Regex::Concat(parts) => {
                if prec > 1 {
                    f.write_str("(")?;
                }
                for (i, p) in parts.iter().enumerate() {
                    let needs_space = i > 0 && !matches!(p, Regex::Union(_));
                    let prev_group = i > 0 && matches!(parts[i - 1], Regex::Union(_));
                    if needs_space && !prev_group {
                        f.write_str(" ")?;
                    }
                    self.write(f, p, 2)?;
                }
                if prec > 1 {
                    f.write_str(")")?;
                }
                Ok(())
            }
            Regex::Union(parts) => {
                let paren = prec > 0;
                if paren {
                    f.write_str("(")?;
                }
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str("|")?;
                    }
                    self.write(f, p, 1)?;
                }
                if paren {
                    f.write_str(")")?;
                }
                Ok(())
            }
            Regex::Star(inner) | Regex::Plus(inner) | Regex::Optional(inner) => {
                self.write(f, inner, 3)?;
                f.write_str(match r {
                    Regex::Star(_) => "*",
                    Regex::Plus(_) => "+",
                    _ => "?",
                })
            }
        }
    }
}

impl fmt::Display for RegexDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, self.regex, 0)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum TokKind {
    Ident(String),
    Bar,
    Comma,
    Star,
    Plus,
    Question,
    LParen,
    RParen,
    Epsilon,
    EmptySet,
}

impl fmt::Display for TokKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokKind::Ident(s) => f.write_str(s),
            TokKind::Bar => f.write_str("|"),
            TokKind::Comma => f.write_str(","),
            TokKind::Star => f.write_str("*"),
            TokKind::Plus => f.write_str("+"),
            TokKind::Question => f.write_str("?"),
            TokKind::LParen => f.write_str("("),
            TokKind::RParen => f.write_str(")"),
            TokKind::Epsilon => f.write_str("~e~"),
            TokKind::EmptySet => f.write_str("{}"),
        }
    }
}

struct Tok {
    kind: TokKind,
    col: usize,
}

fn tokenize(text: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        let simple = match c {
            '|' => Some(TokKind::Bar),
            ',' => Some(TokKind::Comma),
            '*' => Some(TokKind::Star),
            '+' => Some(TokKind::Plus),
            '?' => Some(TokKind::Question),
            '(' => Some(TokKind::LParen),
            ')' => Some(TokKind::RParen),
            _ => None,
        };
        if let Some(kind) = simple {
            tokens.push(Tok { kind, col });
            i += 1;
        } else if c.is_whitespace() {
            i += 1;
        } else if chars[i..].starts_with(&['~', 'e', '~']) {
            tokens.push(Tok {
                kind: TokKind::Epsilon,
                col,
            });
            i += 3;
        } else if chars[i..].starts_with(&['{', '}']) {
            tokens.push(Tok {
                kind: TokKind::EmptySet,
                col,
            });
            i += 2;
        } else if c.is_ascii_alphabetic() || c == '/' || c == '#' {
            let start = i;
            i += 1;
            while i < chars.len()
                && (chars[i].is_ascii_alphanumeric() || matches!(chars[i], '_' | '-' | '.' | ':'))
            {
                i += 1;
            }
            tokens.push(Tok {
                kind: TokKind::Ident(chars[start..i].iter().collect()),
                col,
            });
        } else {
            return Err(Error::parse(1, col, format!("unexpected character `{c}`")));
        }
    }
    Ok(tokens)
}

struct Parser<'a, F> {
    tokens: &'a [Tok],
    pos: usize,
    resolve: &'a mut F,
}

impl<F: FnMut(&str) -> Result<usize>> Parser<'_, F> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn end_col(&self) -> usize {
        self.tokens.last().map_or(1, |t| t.col + 1)
    }

    fn union(&mut self) -> Result<Regex> {
        let mut parts = vec![self.concat()?];
        while matches!(
            self.peek(),
            Some(Tok {
                kind: TokKind::Bar,
                ..
            })
        ) {
            self.pos += 1;
            parts.push(self.concat()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Regex::Union(parts)
        })
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek(),
            Some(Tok {
                kind: TokKind::Ident(_) | TokKind::LParen | TokKind::Epsilon | TokKind::EmptySet,
                ..
            })
        )
    }

    fn concat(&mut self) -> Result<Regex> {
        let mut parts = vec![self.postfix()?];
        loop {
            if matches!(
                self.peek(),
                Some(Tok {
                    kind: TokKind::Comma,
                    ..
                })
            ) {
                self.pos += 1;
                parts.push(self.postfix()?);
            } else if self.starts_atom() {
                parts.push(self.postfix()?);
            } else {
                break;
            }
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Regex::Concat(parts)
        })
    }

    fn postfix(&mut self) -> Result<Regex> {
        let mut r = self.atom()?;
        while let Some(tok) = self.peek() {
            r = match tok.kind {
                TokKind::Star => Regex::Star(Box::new(r)),
                TokKind::Plus => Regex::Plus(Box::new(r)),
                TokKind::Question => Regex::Optional(Box::new(r)),
                _ => break,
            };
            self.pos += 1;
        }
        Ok(r)
    }

    fn atom(&mut self) -> Result<Regex> {
        let Some(tok) = self.tokens.get(self.pos) else {
            return Err(Error::parse(
                1,
                self.end_col(),
                "expected tag name, `(`, `~e~` or `{}`, found end of input",
            ));
        };
        self.pos += 1;
        match &tok.kind {
            TokKind::Ident(name) => (self.resolve)(name)
                .map(Regex::Symbol)
                .map_err(|e| match e {
                    Error::Parse { .. } => e,
                    other => Error::parse(1, tok.col, other.to_string()),
                }),
            TokKind::Epsilon => Ok(Regex::Epsilon),
            TokKind::EmptySet => Ok(Regex::Empty),
            TokKind::LParen => {
                if matches!(
                    self.peek(),
                    Some(Tok {
                        kind: TokKind::RParen,
                        ..
                    })
                ) {
                    self.pos += 1;
                    return Ok(Regex::Epsilon);
                }
                let inner = self.union()?;
                match self.peek() {
                    Some(Tok {
                        kind: TokKind::RParen,
                        ..
                    }) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    Some(t) => Err(Error::parse(
                        1,
                        t.col,
                        format!("expected `)` or `|`, found `{}`", t.kind),
                    )),
                    None => Err(Error::parse(
                        1,
                        self.end_col(),
                        "expected `)`, found end of input",
                    )),
                }
            }
            other => Err(Error::parse(
                1,
                tok.col,
                format!("expected tag name, `(`, `~e~` or `{{}}`, found `{other}`"),
            )),
        }
    }
}

fn split_first(r: &Regex) -> (Regex, Regex) {
    match r {
        Regex::Concat(parts) => {
            let rest = parts[1..]
                .iter()
                .cloned()
                .fold(Regex::Epsilon, Regex::concat);
            (parts[0].clone(), rest)
        }
        other => (other.clone(), Regex::Epsilon),
    }
}

fn split_last(r: &Regex) -> (Regex, Regex) {
    match r {
        Regex::Concat(parts) => {
            let n = parts.len();
            let rest = parts[..n - 1]
                .iter()
                .cloned()
                .fold(Regex::Epsilon, Regex::concat);
            (rest, parts[n - 1].clone())
        }
        other => (Regex::Epsilon, other.clone()),
    }
}

/// Pulls out common leading or trailing factors: `x y | x` becomes `x y?`.
fn factor_union(mut parts: Vec<Regex>) -> Regex {
    'again: loop {
        for i in 0..parts.len() {
            for j in i + 1..parts.len() {
                let (hi, ti) = split_first(&parts[i]);
                let (hj, tj) = split_first(&parts[j]);
                let merged = if hi == hj {
                    Some(Regex::concat(hi, Regex::union(ti, tj).tidy()))
                } else {
                    let (ri, li) = split_last(&parts[i]);
                    let (rj, lj) = split_last(&parts[j]);
                    (li == lj).then(|| Regex::concat(Regex::union(ri, rj).tidy(), li))
                };
                if let Some(m) = merged {
                    parts.remove(j);
                    parts[i] = m;
                    continue 'again;
                }
            }
        }
        break;
    }
    match parts.len() {
        1 => parts.pop().unwrap(),
        _ => Regex::Union(parts),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_ab(text: &str) -> Result<Regex> {
        Regex::parse(text, |n| match n {
            "a" => Ok(0),
            "b" => Ok(1),
            other => Err(Error::UnknownTag(other.to_string())),
        })
    }

    #[test]
    fn parse_forms() {
        let ab = Alphabet::new(["a", "b"]);
        assert_eq!(
            parse_ab("(a|b),(a|b)").unwrap(),
            parse_ab("(a|b)(a|b)").unwrap()
        );
        assert_eq!(parse_ab("~e~").unwrap(), Regex::Epsilon);
        assert_eq!(parse_ab("{}").unwrap(), Regex::Empty);
        assert_eq!(parse_ab("()").unwrap(), Regex::Epsilon);
        assert_eq!(
            parse_ab("a b* | b?").unwrap().display(&ab).to_string(),
            "a b*|b?"
        );
        assert_eq!(
            parse_ab("(a b)+").unwrap().display(&ab).to_string(),
            "(a b)+"
        );
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_ab("(a|b"), Err(Error::Parse { .. })));
        assert!(matches!(parse_ab("a |"), Err(Error::Parse { .. })));
        assert!(matches!(
            parse_ab("a $"),
            Err(Error::Parse { column: 3, .. })
        ));
        assert!(matches!(parse_ab("c"), Err(Error::Parse { column: 1, .. })));
        assert!(matches!(parse_ab(""), Err(Error::Parse { .. })));
    }

    #[test]
    fn smart_union() {
        let b = Regex::Symbol(1);
        assert_eq!(
            Regex::union(Regex::Epsilon, b.clone()),
            Regex::Optional(Box::new(b.clone()))
        );
        assert_eq!(Regex::union(Regex::Empty, b.clone()), b);
        assert_eq!(
            Regex::union(Regex::Epsilon, Regex::Plus(Box::new(b.clone()))),
            Regex::Star(Box::new(b.clone()))
        );
        assert_eq!(Regex::union(b.clone(), b.clone()), b);
    }
}
