use std::io::Write;
use std::process::{Command, Output};

fn pblocks(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pblocks"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

const A4: &str = r#"
[[groups]]
name = "A4"
degree = 4
generators = [[2, 3, 1, 4], [2, 1, 4, 3]]
"#;

#[test]
fn analyze_a4_json() {
    let g = file(A4);
    let out = pblocks(&["analyze", "--group", g.path().to_str().unwrap(), "--prime", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let block = &v["blocks"][0]["blocks"][0];
    assert_eq!(block["tau"], "4/1");
    assert_eq!(block["cartan"], serde_json::json!([[2, 1, 1], [1, 2, 1], [1, 1, 2]]));
    assert_eq!(block["verdict"]["ineq3_holds"], true);
}

#[test]
fn analyze_formats() {
    let g = file(A4);
    let path = g.path().to_str().unwrap();
    let md = pblocks(&["analyze", "--group", path, "--prime", "3", "--format", "md"]);
    assert_eq!(md.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&md.stdout).contains("| A4 | 3 |"));
    let csv = pblocks(&["analyze", "--group", path, "--prime", "3", "--format", "csv"]);
    let text = String::from_utf8(csv.stdout).unwrap();
    assert!(text.starts_with("group,prime,block,"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn tau_subcommand() {
    let c = file("[[4,2,2],[2,2,1],[2,1,2]]");
    let out = pblocks(&["tau", "--cartan", c.path().to_str().unwrap(), "--degrees", "1,2,2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "44/9");

    let c = file("2 1 1\n1 2 1\n1 1 2\n");
    let out = pblocks(&["tau", "--cartan", c.path().to_str().unwrap(), "--degrees", "1,1,1"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "4/1");

    let out = pblocks(&["tau", "--cartan", c.path().to_str().unwrap(), "--degrees", "1,1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fixtures_subcommand() {
    let out = pblocks(&["fixtures"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["J1", "Co3", "KleinA", "KleinB"] {
        assert!(text.contains(&format!("| {name} |")), "{text}");
    }
}

#[test]
fn verify_small_corpus_is_deterministic() {
    let c = file(
        r#"
[[groups]]
name = "S4"
degree = 4
generators = [[2, 3, 4, 1], [2, 1, 3, 4]]

[[normal_subgroups]]
name = "A4"
parent = "S4"
generators = [[2, 3, 1, 4], [2, 1, 4, 3]]

[[lemma_bindings]]
lemma = "p-extension"
group = "S4"
subgroup = "A4"
prime = 2
"#,
    );
    let path = c.path().to_str().unwrap();
    let run = |seed: &str| pblocks(&["verify-corpus", "--corpus", path, "--seed", seed, "--no-timings"]);
    let a = run("3");
    let b = run("3");
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["lemmas"][0]["passed"], true);
    assert!(v["meta"].get("timings").is_none());
}

#[test]
fn unsatisfiable_binding_is_a_hard_error() {
    let c = file(
        r#"
[[groups]]
name = "S4"
degree = 4
generators = [[2, 3, 4, 1], [2, 1, 3, 4]]
primes = [3]

[[normal_subgroups]]
name = "A4"
parent = "S4"
generators = [[2, 3, 1, 4], [2, 1, 4, 3]]

[[lemma_bindings]]
lemma = "pprime-index"
group = "S4"
subgroup = "A4"
prime = 2
"#,
    );
    let out = pblocks(&["verify-corpus", "--corpus", c.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["lemmas"][0]["configuration_error"], true);
}

#[test]
fn bad_input_exits_with_two() {
    let out = pblocks(&["analyze", "--group", "/nonexistent/file.toml", "--prime", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let g = file("[[groups]]\nname = \"x\"\ndegree = 3\ngenerators = [[1, 1, 2]]\n");
    let out = pblocks(&["analyze", "--group", g.path().to_str().unwrap(), "--prime", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn empty_corpus_exits_zero() {
    let c = file("");
    let out = pblocks(&["verify-corpus", "--corpus", c.path().to_str().unwrap(), "--format", "md"]);
    assert_eq!(out.status.code(), Some(0));
}
