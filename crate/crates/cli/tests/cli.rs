use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use tempfile::TempDir;

struct Files {
    dir: TempDir,
}

impl Files {
    fn new() -> Self {
        Files {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn put(&self, name: &str, text: &str) -> String {
        let path: PathBuf = self.dir.path().join(name);
        std::fs::write(&path, text).unwrap();
        path.to_str().unwrap().to_string()
    }
}

fn dtdkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dtdkit"))
        .args(args)
        .output()
        .unwrap()
}

fn with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_dtdkit"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_str(stdout(o).trim()).unwrap()
}

const CHAIN: &str = "axiom a\na -> b\nb -> b?\n";
const SQUARE: &str = "axiom a\na -> (a|b) (a|b)\nb -> ~e~\n";
const TWO_WORDS: &str = "c a b /b /a /c\nc a /a d /d /c\n";

#[test]
fn surfaces_of_chain_grammar() {
    let f = Files::new();
    let g = f.put("g.xg", CHAIN);
    let o = dtdkit(&["surfaces", &g]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "S_a = b\nS_b = b?\n");
}

#[test]
fn regular_counterexample() {
    let f = Files::new();
    let k = f.put("k.w", TWO_WORDS);
    let o = dtdkit(&["is-xml-regular", &k]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o), "no\nwitness: c a /a /c\n");
    let o = dtdkit(&["is-xml-regular", "--contexts", "--json", &k]);
    assert_eq!(code(&o), 1);
    assert_eq!(json(&o)["witness"], "c a /a /c");
}

#[test]
fn regular_counterexample_from_dfa_file() {
    let f = Files::new();
    let dfa = "alphabet: a /a b /b c /c d /d\nstates: 9\ninitial: 0\nfinal: 8\n\
               0 c 1\n1 a 2\n2 b 3\n3 /b 4\n4 /a 7\n2 /a 5\n5 d 6\n6 /d 7\n7 /c 8\n";
    let k = f.put("k.dfa", dfa);
    let o = dtdkit(&["is-xml-regular", &k]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).ends_with("witness: c a /a /c\n"));
}

#[test]
fn empty_document_is_rejected() {
    let f = Files::new();
    let g = f.put("g.xg", CHAIN);
    let doc = f.put("doc.w", "");
    let o = dtdkit(&["member", &g, &doc]);
    assert_eq!(code(&o), 1);
}

#[test]
fn member_accepts_and_rejects() {
    let f = Files::new();
    let g = f.put("g.xg", CHAIN);
    let doc = f.put("doc.w", "a b /b /a\na b b /b /b /a\n");
    assert_eq!(code(&dtdkit(&["member", &g, &doc])), 0);
    let doc = f.put("bad.w", "a b /b /a\na /a\nx /x\n");
    let o = dtdkit(&["member", &g, &doc]);
    assert_eq!(code(&o), 1);
    assert_eq!(
        stdout(&o),
        "yes  a b /b /a\nno  a /a\nno  x /x\nwitness: a /a\n"
    );
}

#[test]
fn json_envelope_has_the_documented_keys() {
    let f = Files::new();
    let g = f.put("g.xg", SQUARE);
    let k = f.put("k.w", TWO_WORDS);
    let runs = [
        dtdkit(&["--json", "surfaces", &g]),
        dtdkit(&["--json", "is-sequential", &g]),
        dtdkit(&["--json", "enumerate", "--max-len", "6", &g]),
        dtdkit(&["--json", "height", &k]),
    ];
    for o in &runs {
        let v = json(o);
        let obj = v.as_object().unwrap();
        let mut keys: Vec<&str> = obj.keys().map(String::as_str).collect();
        keys.sort_unstable();
        assert_eq!(keys, ["command", "elapsed_ms", "result", "witness"]);
        assert!(obj["elapsed_ms"].is_number());
    }
    assert_eq!(json(&runs[0])["result"]["a"], "(a|b)(a|b)");
    assert_eq!(json(&runs[1])["witness"], "a -> a");
    assert_eq!(json(&runs[3])["result"], 3);
}

#[test]
fn reports_are_reproducible() {
    let f = Files::new();
    let g = f.put("g.xg", SQUARE);
    let k = f.put("k.w", TWO_WORDS);
    for args in [
        vec!["surfaces", g.as_str()],
        vec!["enumerate", "--max-len", "10", g.as_str()],
        vec!["standard", k.as_str()],
        vec!["is-xml-regular", k.as_str()],
    ] {
        let a = dtdkit(&args);
        let b = dtdkit(&args);
        assert_eq!(a.stdout, b.stdout);
        assert_eq!(code(&a), code(&b));
    }
    let strip = |o: &Output| {
        let mut v = json(o);
        v.as_object_mut().unwrap().remove("elapsed_ms");
        v
    };
    let a = dtdkit(&["--json", "surfaces-regular", &k]);
    let b = dtdkit(&["--json", "surfaces-regular", &k]);
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn input_errors_name_file_and_position() {
    let f = Files::new();
    let g = f.put("broken.xg", "axiom a\na -> b c\nb -> ~e~\n");
    let o = dtdkit(&["surfaces", &g]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("broken.xg:2:"), "{}", stderr(&o));
    let d = f.put(
        "bad.dfa",
        "alphabet: a /a\nstates: 2\ninitial: 0\nfinal: 1\n0 a 7\n",
    );
    let o = dtdkit(&["height", &d]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("bad.dfa:5:"), "{}", stderr(&o));
    let o = dtdkit(&["surfaces", "/nonexistent/g.xg"]);
    assert_eq!(code(&o), 2);
    let o = dtdkit(&["--json", "surfaces", &g]);
    assert_eq!(code(&o), 2);
    assert!(json(&o)["result"].is_null());
}

#[test]
fn stdin_input_is_sniffed() {
    let o = with_stdin(&["surfaces", "-"], CHAIN);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "S_a = b\nS_b = b?\n");
    let o = with_stdin(&["is-dyck", "-"], "a /a b /b\n");
    assert_eq!(code(&o), 0);
    let o = with_stdin(&["is-dyck", "-"], "axiom S\nS -> a S | a\n");
    assert_eq!(code(&o), 1);
    let o = with_stdin(
        &["parse-dtd", "-"],
        "<!ELEMENT a (b*)>\n<!ELEMENT b EMPTY>\n",
    );
    assert_eq!(stdout(&o), "axiom a\na -> b*\nb -> ~e~\n");
    let o = with_stdin(&["surfaces", "-"], "axiom a\na -> q\n");
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("<stdin>:2:"), "{}", stderr(&o));
}

#[test]
fn alphabet_override() {
    let f = Files::new();
    let g = f.put("g.xg", CHAIN);
    let o = dtdkit(&["surfaces", "--alphabet", "a,b,c", &g]);
    assert_eq!(stdout(&o), "S_a = b\nS_b = b?\nS_c = {}\n");
    let o = dtdkit(&["surfaces", "--alphabet", "a", &g]);
    assert_eq!(code(&o), 2);
}

#[test]
fn dyck_word_commands() {
    let f = Files::new();
    let w = f.put("w.w", "a b /b /a\na /a b /b\n/a a\n");
    let o = dtdkit(&["reduce", &w]);
    assert_eq!(stdout(&o), "~e~\n~e~\n/a a\n");
    let o = dtdkit(&["prime", &w]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("no  a /a b /b  factors: a /a | b /b"));
    let o = dtdkit(&["trace", &w]);
    assert!(stdout(&o).starts_with("trace: b  weight: 0  height: 2\n"));
    assert_eq!(code(&o), 1);
    let p = f.put("p.w", "a b /b /a\na /a\n");
    let o = dtdkit(&["is-dyck-prime", "--tag", "a", &p]);
    assert_eq!(code(&o), 0);
    let o = dtdkit(&["is-dyck-prime", "--tag", "b", &p]);
    assert_eq!(code(&o), 1);
}

#[test]
fn grammar_decisions() {
    let f = Files::new();
    let dyck = f.put("s.cfg", "axiom S\nS -> a S /a | a /a\n");
    assert_eq!(code(&dtdkit(&["is-dyck", &dyck])), 0);
    assert_eq!(code(&dtdkit(&["is-dyck-prime", &dyck])), 0);
    let flat = f.put("f.cfg", "axiom S\nS -> a Y /a\nY -> Y b /b | b /b\n");
    let o = dtdkit(&["finite-surfaces", &flat]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("witness: Y =>+"), "{}", stdout(&o));
    let bg = f.put(
        "ex.bg",
        "axiom S\nS -> a S S /a | a S T /a | a T S /a | a T T /a\nT -> b /b\n",
    );
    let o = dtdkit(&["is-xml-balanced", &bg]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "yes\naxiom a\na -> (a|b)(a|b)\nb -> ~e~\n");
    let roots = f.put("r.bg", "axiom S\nS -> a /a | b /b\n");
    let o = dtdkit(&["is-xml-balanced", &roots]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o), "no\nwitness: b /b\n");
}

#[test]
fn grammar_comparisons() {
    let f = Files::new();
    let small = f.put("small.xg", "axiom a\na -> b\nb -> ~e~\n");
    let big = f.put("big.xg", "axiom a\na -> b?\nb -> ~e~\n");
    assert_eq!(code(&dtdkit(&["include", &small, &big])), 0);
    let o = dtdkit(&["include", &big, &small]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("surface of `a`"));
    assert_eq!(code(&dtdkit(&["equal", &big, &big])), 0);
    let o = dtdkit(&["intersect", &small, &big]);
    assert_eq!(stdout(&o), "axiom a\na -> b\nb -> ~e~\n");
    let other = f.put("other.xg", "axiom b\nb -> ~e~\n");
    let o = dtdkit(&["intersect", &small, &other]);
    assert_eq!(code(&o), 1);
    let bg = f.put("g.bg", "axiom S\nS -> a T /a\nT -> b /b\n");
    assert_eq!(code(&dtdkit(&["equal", &small, &bg])), 0);
    let o = dtdkit(&["equal", &big, &bg]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o), "no\nwitness: a /a\n");
}

#[test]
fn sequential_grammar_to_automaton() {
    let f = Files::new();
    let g = f.put("s.xg", "axiom a\na -> b*\nb -> ~e~\n");
    let o = dtdkit(&["to-regular", &g]);
    assert_eq!(code(&o), 0);
    let dfa = f.put("s.dfa", &stdout(&o));
    let o = dtdkit(&["is-xml-regular", &dfa]);
    assert_eq!(stdout(&o), "yes\naxiom a\na -> b*\nb -> ~e~\n");
    let o = dtdkit(&["enumerate", "--max-len", "6", &dfa]);
    assert_eq!(stdout(&o), "a /a\na b /b /a\na b /b b /b /a\n");
    let o = dtdkit(&["height", &dfa]);
    assert_eq!(stdout(&o), "finite: 2\n");
    let cyc = f.put("c.xg", CHAIN);
    let o = dtdkit(&["to-regular", &cyc]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).ends_with("witness: b -> b\n"));
}

#[test]
fn dtd_files() {
    let f = Files::new();
    let d = f.put(
        "doc.dtd",
        "<!DOCTYPE a [\n<!ELEMENT a (b, (a|b)?)>\n<!ELEMENT b EMPTY>\n]>\n",
    );
    let o = dtdkit(&["surfaces", &d]);
    assert_eq!(stdout(&o), "S_a = b (a|b)?\nS_b = ~e~\n");
    let bad = f.put("bad.dtd", "<!ELEMENT a (b c)>\n");
    let o = dtdkit(&["parse-dtd", &bad]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("bad.dtd:1:"), "{}", stderr(&o));
}

#[test]
fn non_dyck_automaton_is_not_xml() {
    let f = Files::new();
    let k = f.put("k.w", "a /a a /a\n");
    let o = dtdkit(&["is-xml-regular", &k]);
    assert_eq!(code(&o), 1);
    let o = dtdkit(&["is-dyck", &k]);
    assert_eq!(code(&o), 0);
    let o = dtdkit(&["is-dyck-prime", &k]);
    assert_eq!(code(&o), 1);
}
