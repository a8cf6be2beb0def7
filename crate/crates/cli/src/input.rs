use std::fmt;
use std::io::Read;
use std::path::Path;

use dtdkit::automata::Dfa;
use dtdkit::cfg::Cfg;
use dtdkit::dyck::{parse_word_file, TagAlphabet, TaggedWord};
use dtdkit::regular::TagDfa;
use dtdkit::xml::{parse_dtd, XmlGrammar};

/// An input problem, reported with the file it came from.
#[derive(Debug)]
pub struct InputError {
    pub file: String,
    pub message: String,
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.file, self.message)
    }
}

impl InputError {
    pub fn new(file: &str, message: impl fmt::Display) -> Self {
        InputError {
            file: file.to_string(),
            message: format!(" {message}"),
        }
    }

    pub fn from_core(file: &str, err: dtdkit::Error) -> Self {
        match err {
            // positioned errors read as `file:line:col: message`
            dtdkit::Error::Parse { .. } => InputError {
                file: file.to_string(),
                message: err.to_string(),
            },
            other => InputError::new(file, other),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Words,
    Xml,
    Dtd,
    Cfg,
    Dfa,
}

impl Kind {
    fn from_extension(path: &str) -> Option<Kind> {
        let ext = Path::new(path).extension()?.to_str()?;
        match ext {
            "w" | "words" => Some(Kind::Words),
            "xg" => Some(Kind::Xml),
            "dtd" => Some(Kind::Dtd),
            "cfg" | "bg" => Some(Kind::Cfg),
            "dfa" => Some(Kind::Dfa),
            _ => None,
        }
    }

    /// Guesses the format from the first meaningful line.
    fn sniff(text: &str) -> Kind {
        if text.contains("<!") {
            return Kind::Dtd;
        }
        for line in text.lines().map(str::trim) {
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if ["alphabet:", "states:", "initial:", "final:"]
                .iter()
                .any(|p| line.starts_with(p))
            {
                return Kind::Dfa;
            }
            let head = line.strip_prefix("axiom").map(str::trim).unwrap_or(line);
            let head = head.split("->").next().unwrap_or("").trim();
            if line.starts_with("axiom") || line.contains("->") {
                return if head.starts_with(|c: char| c.is_ascii_uppercase()) {
                    Kind::Cfg
                } else {
                    Kind::Xml
                };
            }
            return Kind::Words;
        }
        Kind::Words
    }

    pub fn describe(self) -> &'static str {
        match self {
            Kind::Words => "word file",
            Kind::Xml => "XML-grammar",
            Kind::Dtd => "DTD",
            Kind::Cfg => "grammar",
            Kind::Dfa => "automaton",
        }
    }
}

pub enum Input {
    Words(TagAlphabet, Vec<TaggedWord>),
    /// Both `.xg` and `.dtd` files.
    Xml(XmlGrammar),
    Cfg(Cfg),
    Dfa(TagDfa),
}

impl Input {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Input::Words(..) => Kind::Words.describe(),
            Input::Xml(_) => Kind::Xml.describe(),
            Input::Cfg(_) => Kind::Cfg.describe(),
            Input::Dfa(_) => Kind::Dfa.describe(),
        }
    }
}

/// Reads a path, `-` meaning standard input.
pub fn read_text(path: &str) -> Result<String, InputError> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| InputError::new("<stdin>", e))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| InputError::new(path, e))
    }
}

pub fn display_name(path: &str) -> &str {
    if path == "-" {
        "<stdin>"
    } else {
        path
    }
}

pub fn load(path: &str, alphabet: Option<&TagAlphabet>) -> Result<Input, InputError> {
    let text = read_text(path)?;
    let kind = Kind::from_extension(path).unwrap_or_else(|| Kind::sniff(&text));
    parse(&text, kind, display_name(path), alphabet)
}

pub fn parse(
    text: &str,
    kind: Kind,
    name: &str,
    alphabet: Option<&TagAlphabet>,
) -> Result<Input, InputError> {
    let err = |e| InputError::from_core(name, e);
    Ok(match kind {
        Kind::Words => {
            let mut tags = alphabet.cloned().unwrap_or_default();
            let words = parse_word_file(text, &mut tags, alphabet.is_some()).map_err(err)?;
            Input::Words(tags, words)
        }
        Kind::Xml => Input::Xml(XmlGrammar::parse(text, alphabet).map_err(err)?),
        Kind::Dtd => {
            let g = parse_dtd(text).map_err(err)?;
            Input::Xml(match alphabet {
                Some(tags) => realign(&g, tags).map_err(|m| InputError::new(name, m))?,
                None => g,
            })
        }
        Kind::Cfg => {
            let tags = alphabet.cloned().unwrap_or_default();
            Input::Cfg(Cfg::parse(text, tags, alphabet.is_some()).map_err(err)?)
        }
        Kind::Dfa => {
            let dfa = Dfa::parse_text(text).map_err(err)?;
            let k = TagDfa::from_token_dfa(&dfa, alphabet).map_err(err)?;
            Input::Dfa(TagDfa::new(k.tags().clone(), k.dfa()).map_err(err)?)
        }
    })
}

/// Moves a grammar onto a declared alphabet that must contain all its tags.
fn realign(g: &XmlGrammar, tags: &TagAlphabet) -> Result<XmlGrammar, String> {
    let mut map = Vec::new();
    for name in g.tags().names() {
        match tags.index_of(name) {
            Some(i) => map.push(i),
            None => return Err(format!(" tag `{name}` is not in the declared alphabet")),
        }
    }
    Ok(g.with_tags(tags, &map))
}

/// Parses a document file against a grammar's tags. Words using other tags
/// are kept; they extend a copy of the alphabet and can never be accepted.
pub fn load_documents(
    path: &str,
    tags: &TagAlphabet,
) -> Result<(TagAlphabet, Vec<TaggedWord>), InputError> {
    let text = read_text(path)?;
    let mut ext = tags.clone();
    let words = parse_word_file(&text, &mut ext, false)
        .map_err(|e| InputError::from_core(display_name(path), e))?;
    Ok((ext, words))
}
