mod commands;
mod input;

use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use dtdkit::dyck::TagAlphabet;
use serde_json::{json, Value};

use input::InputError;

#[derive(Parser, Debug)]
#[command(
    name = "dtdkit",
    version,
    about = "Decision procedures for XML-grammars and Dyck languages"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Longest word listed by `enumerate`.
    #[arg(long, global = true, default_value_t = 8, value_name = "N")]
    max_len: usize,
    /// Tag alphabet, overriding the one inferred from the inputs.
    #[arg(long, global = true, value_delimiter = ',', value_name = "a,b,c")]
    alphabet: Option<Vec<String>>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dyck reduction of each word, or the reduced form of a grammar.
    Reduce { file: String },
    /// Whether each word is a Dyck prime.
    Prime {
        file: String,
        #[arg(long)]
        tag: Option<String>,
    },
    /// Trace, weight and height of each word.
    Trace { file: String },
    /// Whether the words or language are products of Dyck primes.
    IsDyck { file: String },
    /// Whether the words or language are Dyck primes (rooted at `--tag`).
    IsDyckPrime {
        file: String,
        #[arg(long)]
        tag: Option<String>,
    },
    /// Surfaces of a grammar, balanced grammar or automaton.
    Surfaces { file: String },
    /// Standard XML-grammar of the surfaces.
    Standard {
        file: String,
        #[arg(long)]
        axiom: Option<String>,
    },
    /// Whether each document is generated by the grammar.
    Member { grammar: String, documents: String },
    /// Whether the first language is contained in the second.
    Include { left: String, right: String },
    /// Whether the two languages are equal.
    Equal { left: String, right: String },
    /// XML-grammar of the intersection.
    Intersect { left: String, right: String },
    /// Whether every surface is finite.
    FiniteSurfaces { file: String },
    /// Whether a balanced grammar generates an XML-language.
    IsXmlBalanced { file: String },
    /// Surfaces of a regular language of Dyck primes.
    SurfacesRegular { file: String },
    /// Whether a regular language is an XML-language.
    IsXmlRegular {
        file: String,
        /// Decide through the contexts of the minimal automaton.
        #[arg(long)]
        contexts: bool,
    },
    /// Height of a regular language.
    Height { file: String },
    /// Whether the tag graph of an XML-grammar is acyclic.
    IsSequential { file: String },
    /// Automaton of a sequential XML-grammar.
    ToRegular { file: String },
    /// XML-grammar of a DTD.
    ParseDtd { file: String },
    /// Words of the language up to `--max-len`.
    Enumerate { file: String },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Reduce { .. } => "reduce",
            Command::Prime { .. } => "prime",
            Command::Trace { .. } => "trace",
            Command::IsDyck { .. } => "is-dyck",
            Command::IsDyckPrime { .. } => "is-dyck-prime",
            Command::Surfaces { .. } => "surfaces",
            Command::Standard { .. } => "standard",
            Command::Member { .. } => "member",
            Command::Include { .. } => "include",
            Command::Equal { .. } => "equal",
            Command::Intersect { .. } => "intersect",
            Command::FiniteSurfaces { .. } => "finite-surfaces",
            Command::IsXmlBalanced { .. } => "is-xml-balanced",
            Command::SurfacesRegular { .. } => "surfaces-regular",
            Command::IsXmlRegular { .. } => "is-xml-regular",
            Command::Height { .. } => "height",
            Command::IsSequential { .. } => "is-sequential",
            Command::ToRegular { .. } => "to-regular",
            Command::ParseDtd { .. } => "parse-dtd",
            Command::Enumerate { .. } => "enumerate",
        }
    }
}

/// What a command found. `verdict` is `Some(false)` for a negative answer.
pub struct Report {
    pub result: Value,
    pub verdict: Option<bool>,
    pub witness: Option<String>,
    pub text: String,
}

pub struct Options {
    pub alphabet: Option<TagAlphabet>,
    pub max_len: usize,
}

fn run(cli: &Cli) -> Result<Report, InputError> {
    let alphabet = match &cli.alphabet {
        Some(names) => Some(
            TagAlphabet::from_names(names.iter().map(|s| s.trim()))
                .map_err(|e| InputError::new("--alphabet", e))?,
        ),
        None => None,
    };
    let opts = Options {
        alphabet,
        max_len: cli.max_len,
    };
    use commands as c;
    match &cli.command {
        Command::Reduce { file } => c::reduce(file, &opts),
        Command::Prime { file, tag } => c::prime(file, tag.as_deref(), &opts),
        Command::Trace { file } => c::trace(file, &opts),
        Command::IsDyck { file } => c::is_dyck(file, &opts),
        Command::IsDyckPrime { file, tag } => c::is_dyck_prime(file, tag.as_deref(), &opts),
        Command::Surfaces { file } => c::surfaces(file, &opts),
        Command::Standard { file, axiom } => c::standard(file, axiom.as_deref(), &opts),
        Command::Member { grammar, documents } => c::member(grammar, documents, &opts),
        Command::Include { left, right } => c::include(left, right, &opts),
        Command::Equal { left, right } => c::equal(left, right, &opts),
        Command::Intersect { left, right } => c::intersect(left, right, &opts),
        Command::FiniteSurfaces { file } => c::finite_surfaces(file, &opts),
        Command::IsXmlBalanced { file } => c::is_xml_balanced(file, &opts),
        Command::SurfacesRegular { file } => c::surfaces_regular(file, &opts),
        Command::IsXmlRegular { file, contexts } => c::is_xml_regular(file, *contexts, &opts),
        Command::Height { file } => c::height(file, &opts),
        Command::IsSequential { file } => c::is_sequential(file, &opts),
        Command::ToRegular { file } => c::to_regular(file, &opts),
        Command::ParseDtd { file } => c::parse_dtd(file, &opts),
        Command::Enumerate { file } => c::enumerate(file, &opts),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let outcome = run(&cli);
    let elapsed_ms = start.elapsed().as_secs_f64() * 1000.0;
    match outcome {
        Ok(report) => {
            if cli.json {
                let v = json!({
                    "command": cli.command.name(),
                    "result": report.result,
                    "witness": report.witness,
                    "elapsed_ms": elapsed_ms,
                });
                println!("{v}");
            } else {
                print!("{}", report.text);
                if let Some(w) = &report.witness {
                    println!("witness: {w}");
                }
            }
            match report.verdict {
                Some(false) => ExitCode::from(1),
                _ => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            if cli.json {
                let v = json!({
                    "command": cli.command.name(),
                    "result": Value::Null,
                    "witness": Value::Null,
                    "elapsed_ms": elapsed_ms,
                    "error": e.to_string(),
                });
                println!("{v}");
            }
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
