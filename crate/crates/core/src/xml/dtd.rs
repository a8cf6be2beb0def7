//! A DTD subset: `<!DOCTYPE root [ ... ]>` (or bare declarations) with
//! `<!ELEMENT name spec>` where `spec` is `EMPTY`, `ANY`, mixed content
//! `(#PCDATA | a | b)*` or a children model built from `,`, `|`, `?`, `*`,
//! `+`. Comments, processing instructions and `ATTLIST`, `ENTITY`,
//! `NOTATION` declarations are skipped. Character data maps to `ε`.

use crate::automata::Regex;
use crate::dyck::TagAlphabet;
use crate::error::{Error, Result};

use super::XmlGrammar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ContentSpec {
    Empty,
    Any,
    /// `(#PCDATA | a | ...)*` with the listed element names.
    Mixed(Vec<String>),
    Children(Particle),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Particle {
    Name(String, Occurrence),
    Seq(Vec<Particle>, Occurrence),
    Choice(Vec<Particle>, Occurrence),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Occurrence {
    Once,
    Optional,
    Star,
    Plus,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementDecl {
    pub name: String,
    pub content: ContentSpec,
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dtd {
    /// The DOCTYPE name, or the first declared element without one.
    pub root: String,
    pub elements: Vec<ElementDecl>,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            src: text.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn starts_with(&self, s: &str) -> bool {
        self.src[self.pos..].starts_with(s.as_bytes())
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn advance(&mut self, n: usize) {
        for _ in 0..n {
            self.bump();
        }
    }

    fn error(&self, expected: &str) -> Error {
        let found = match self.peek() {
            None => "end of input".to_string(),
            Some(_) => {
                let rest = String::from_utf8_lossy(&self.src[self.pos..]);
                let tok: String = rest
                    .chars()
                    .take_while(|c| !c.is_whitespace())
                    .take(12)
                    .collect();
                format!("`{tok}`")
            }
        };
        Error::parse(
            self.line,
            self.col,
            format!("expected {expected}, found {found}"),
        )
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_ascii_whitespace()) {
            self.bump();
        }
    }

    fn expect(&mut self, s: &str) -> Result<()> {
        if self.starts_with(s) {
            self.advance(s.len());
            Ok(())
        } else {
            Err(self.error(&format!("`{s}`")))
        }
    }

    /// Skips up to and including `end`.
    fn skip_past(&mut self, end: &str, what: &str) -> Result<()> {
        while !self.starts_with(end) {
            if self.bump().is_none() {
                return Err(self.error(&format!("`{end}` closing {what}")));
            }
        }
        self.advance(end.len());
        Ok(())
    }

    /// Skips a declaration body up to its `>`, ignoring quoted strings.
    fn skip_decl(&mut self) -> Result<()> {
        loop {
            match self.bump() {
                None => return Err(self.error("`>`")),
                Some(b'>') => return Ok(()),
                Some(q @ (b'"' | b'\'')) => {
                    while self.peek() != Some(q) {
                        if self.bump().is_none() {
                            return Err(self.error("closing quote"));
                        }
                    }
                    self.bump();
                }
                Some(_) => {}
            }
        }
    }

    fn name(&mut self) -> Result<String> {
        let start = self.pos;
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() || c == b'_' || c == b':' => {}
            _ => return Err(self.error("element name")),
        }
        while self
            .peek()
            .is_some_and(|c| c.is_ascii_alphanumeric() || matches!(c, b'_' | b'-' | b'.' | b':'))
        {
            self.bump();
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn occurrence(&mut self) -> Occurrence {
        let occ = match self.peek() {
            Some(b'?') => Occurrence::Optional,
            Some(b'*') => Occurrence::Star,
            Some(b'+') => Occurrence::Plus,
            _ => return Occurrence::Once,
        };
        self.bump();
        occ
    }

    /// After an opening parenthesis: a sequence or choice group.
    fn group(&mut self) -> Result<Particle> {
        let mut items = vec![self.particle()?];
        let mut sep: Option<u8> = None;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b')') => {
                    self.bump();
                    break;
                }
                Some(c @ (b',' | b'|')) if sep.is_none_or(|s| s == c) => {
                    sep = Some(c);
                    self.bump();
                    items.push(self.particle()?);
                }
                Some(b',' | b'|') => {
                    let s = sep.unwrap() as char;
                    return Err(self.error(&format!(
                        "`{s}` or `)` (separators cannot be mixed in one group)"
                    )));
                }
                _ => {
                    let exp = match sep {
                        Some(s) => format!("`{}` or `)`", s as char),
                        None => "`,`, `|` or `)`".to_string(),
                    };
                    return Err(self.error(&exp));
                }
            }
        }
        let occ = self.occurrence();
        Ok(match sep {
            Some(b'|') => Particle::Choice(items, occ),
            _ => Particle::Seq(items, occ),
        })
    }

    fn particle(&mut self) -> Result<Particle> {
        self.skip_ws();
        if self.peek() == Some(b'(') {
            self.bump();
            return self.group();
        }
        if self.peek() == Some(b'#') {
            return Err(
                self.error("element name or `(` (#PCDATA must come first in mixed content)")
            );
        }
        let name = self.name()?;
        let occ = self.occurrence();
        Ok(Particle::Name(name, occ))
    }

    fn content_spec(&mut self) -> Result<ContentSpec> {
        self.skip_ws();
        if self.starts_with("EMPTY") {
            self.advance(5);
            return Ok(ContentSpec::Empty);
        }
        if self.starts_with("ANY") {
            self.advance(3);
            return Ok(ContentSpec::Any);
        }
        if self.peek() != Some(b'(') {
            return Err(self.error("`EMPTY`, `ANY` or `(`"));
        }
        self.bump();
        self.skip_ws();
        if self.starts_with("#PCDATA") {
            self.advance(7);
            let mut names = Vec::new();
            loop {
                self.skip_ws();
                match self.peek() {
                    Some(b'|') => {
                        self.bump();
                        self.skip_ws();
                        names.push(self.name()?);
                    }
                    Some(b')') => {
                        self.bump();
                        break;
                    }
                    _ => return Err(self.error("`|` or `)`")),
                }
            }
            if self.peek() == Some(b'*') {
                self.bump();
            } else if !names.is_empty() {
                return Err(self.error("`*` after mixed content with elements"));
            }
            return Ok(ContentSpec::Mixed(names));
        }
        Ok(ContentSpec::Children(self.group()?))
    }

    /// Markup declarations until `]` (inside DOCTYPE) or end of input.
    fn declarations(&mut self, in_subset: bool, elements: &mut Vec<ElementDecl>) -> Result<()> {
        loop {
            self.skip_ws();
            if in_subset && self.peek() == Some(b']') {
                self.bump();
                return Ok(());
            }
            if self.peek().is_none() {
                return if in_subset {
                    Err(self.error("`]`"))
                } else {
                    Ok(())
                };
            }
            if self.starts_with("<!--") {
                self.advance(4);
                self.skip_past("-->", "comment")?;
            } else if self.starts_with("<?") {
                self.advance(2);
                self.skip_past("?>", "processing instruction")?;
            } else if self.starts_with("<!ELEMENT") {
                self.advance(9);
                let line = self.line;
                self.skip_ws();
                let name = self.name()?;
                let content = self.content_spec()?;
                self.skip_ws();
                self.expect(">")?;
                elements.push(ElementDecl {
                    name,
                    content,
                    line,
                });
            } else if self.starts_with("<!ATTLIST")
                || self.starts_with("<!ENTITY")
                || self.starts_with("<!NOTATION")
            {
                self.advance(2);
                self.skip_decl()?;
            } else if self.peek() == Some(b'%') {
                // parameter entity reference
                self.skip_past(";", "entity reference")?;
            } else {
                return Err(self.error("`<!ELEMENT`, `<!ATTLIST`, a comment or `]`"));
            }
        }
    }
}

impl Dtd {
    pub fn parse(text: &str) -> Result<Dtd> {
        let mut lx = Lexer::new(text);
        let mut elements = Vec::new();
        let mut root = None;
        loop {
            lx.skip_ws();
            if lx.starts_with("<?") {
                lx.advance(2);
                lx.skip_past("?>", "processing instruction")?;
            } else if lx.starts_with("<!--") {
                lx.advance(4);
                lx.skip_past("-->", "comment")?;
            } else {
                break;
            }
        }
        if lx.starts_with("<!DOCTYPE") {
            lx.advance(9);
            lx.skip_ws();
            root = Some((lx.name()?, lx.line, lx.col));
            lx.skip_ws();
            lx.expect("[")?;
            lx.declarations(true, &mut elements)?;
            lx.skip_ws();
            lx.expect(">")?;
            lx.skip_ws();
            if lx.peek().is_some() {
                return Err(lx.error("end of input"));
            }
        } else {
            lx.declarations(false, &mut elements)?;
        }
        for (i, e) in elements.iter().enumerate() {
            if elements[..i].iter().any(|f| f.name == e.name) {
                return Err(Error::DuplicateElement(e.name.clone()));
            }
        }
        let root = match root {
            Some((name, _, _)) => name,
            None => match elements.first() {
                Some(e) => e.name.clone(),
                None => {
                    return Err(Error::parse(
                        1,
                        1,
                        "expected at least one `<!ELEMENT` declaration",
                    ))
                }
            },
        };
        Ok(Dtd { root, elements })
    }

    /// The XML-grammar with one tag per declared element, in declaration
    /// order. Referenced but undeclared elements are an error.
    pub fn to_grammar(&self) -> Result<XmlGrammar> {
        let tags = TagAlphabet::from_names(self.elements.iter().map(|e| e.name.as_str()))?;
        let index = |name: &str| {
            tags.index_of(name)
                .ok_or_else(|| Error::UndeclaredElement(name.to_string()))
        };
        let axiom = index(&self.root)?;
        let mut models = Vec::new();
        for e in &self.elements {
            let regex = match &e.content {
                ContentSpec::Empty => Regex::Epsilon,
                ContentSpec::Any => Regex::Star(Box::new(Regex::Union(
                    (0..tags.len()).map(Regex::Symbol).collect(),
                ))),
                ContentSpec::Mixed(names) if names.is_empty() => Regex::Epsilon,
                ContentSpec::Mixed(names) => Regex::Star(Box::new(Regex::Union(
                    names
                        .iter()
                        .map(|n| index(n).map(Regex::Symbol))
                        .collect::<Result<_>>()?,
                ))),
                ContentSpec::Children(p) => particle_regex(p, &index)?,
            };
            models.push(regex);
        }
        XmlGrammar::from_regexes(tags, &models, axiom)
    }
}

fn particle_regex(p: &Particle, index: &impl Fn(&str) -> Result<usize>) -> Result<Regex> {
    let (base, occ) = match p {
        Particle::Name(n, occ) => (Regex::Symbol(index(n)?), *occ),
        Particle::Seq(items, occ) => (
            Regex::Concat(
                items
                    .iter()
                    .map(|i| particle_regex(i, index))
                    .collect::<Result<_>>()?,
            ),
            *occ,
        ),
        Particle::Choice(items, occ) => (
            Regex::Union(
                items
                    .iter()
                    .map(|i| particle_regex(i, index))
                    .collect::<Result<_>>()?,
            ),
            *occ,
        ),
    };
    Ok(match occ {
        Occurrence::Once => base,
        Occurrence::Optional => Regex::Optional(Box::new(base)),
        Occurrence::Star => Regex::Star(Box::new(base)),
        Occurrence::Plus => Regex::Plus(Box::new(base)),
    })
}

/// Parses a DTD straight to its XML-grammar.
pub fn parse_dtd(text: &str) -> Result<XmlGrammar> {
    Dtd::parse(text)?.to_grammar()
}

#[cfg(test)]
mod tests {
    use super::*;

    const BOOK: &str = r#"<?xml version="1.0"?>
<!DOCTYPE book [
  <!-- a small book -->
  <!ELEMENT book (title, chapter+)>
  <!ELEMENT title (#PCDATA)>
  <!ELEMENT chapter (title, (para | note)*)>
  <!ATTLIST chapter id ID #REQUIRED label CDATA "x>y">
  <!ELEMENT para (#PCDATA | note)*>
  <!ELEMENT note EMPTY>
]>
"#;

    #[test]
    fn parses_book() {
        let dtd = Dtd::parse(BOOK).unwrap();
        assert_eq!(dtd.root, "book");
        assert_eq!(dtd.elements.len(), 5);
        assert_eq!(
            dtd.elements[3].content,
            ContentSpec::Mixed(vec!["note".into()])
        );
        let g = dtd.to_grammar().unwrap();
        assert_eq!(
            g.to_string(),
            "axiom book\nbook -> title chapter+\ntitle -> ~e~\nchapter -> title (para|note)*\npara -> note*\nnote -> ~e~\n"
        );
    }

    #[test]
    fn two_tag_doctype() {
        let g = parse_dtd(
            "<!DOCTYPE a [\n     <!ELEMENT a ((a|b),(a|b)) >\n     <!ELEMENT b (b)* >\n]>",
        )
        .unwrap();
        assert_eq!(g.to_string(), "axiom a\na -> (a|b)(a|b)\nb -> b*\n");
        let g = parse_dtd("<!DOCTYPE a [<!ELEMENT a EMPTY>]>").unwrap();
        assert_eq!(g.enumerate(10).len(), 1);
    }

    #[test]
    fn bare_declarations_use_first_element() {
        let g = parse_dtd("<!ELEMENT a (b?)>\n<!ELEMENT b ANY>").unwrap();
        assert_eq!(g.axiom(), 0);
        assert_eq!(g.to_string(), "axiom a\na -> b?\nb -> (a|b)*\n");
    }

    #[test]
    fn undeclared_element() {
        assert_eq!(
            parse_dtd("<!DOCTYPE a [<!ELEMENT a (b)>]>"),
            Err(Error::UndeclaredElement("b".into()))
        );
        assert_eq!(
            parse_dtd("<!DOCTYPE z [<!ELEMENT a EMPTY>]>"),
            Err(Error::UndeclaredElement("z".into()))
        );
    }

    #[test]
    fn error_positions() {
        let err = parse_dtd("<!DOCTYPE a [\n<!ELEMENT a (b, c | d)>\n]>").unwrap_err();
        match err {
            Error::Parse {
                line,
                column,
                message,
            } => {
                assert_eq!((line, column), (2, 19));
                assert!(message.contains("expected `,` or `)`"), "{message}");
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_dtd("<!ELEMENT a (b"),
            Err(Error::Parse {
                line: 1,
                column: 15,
                ..
            })
        ));
        assert!(matches!(
            parse_dtd("<!ELEMENT a FOO>"),
            Err(Error::Parse { .. })
        ));
        assert_eq!(
            parse_dtd("<!ELEMENT a EMPTY><!ELEMENT a ANY>"),
            Err(Error::DuplicateElement("a".into()))
        );
    }
}
