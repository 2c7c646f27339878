use elimpar::syntax::{parse_theory, print_theory};
use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name).display().to_string()
}

fn elimpar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_elimpar")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn subsets_check_passes_with_deterministic_report() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    let theory = data("decidable.theory");
    let groupoid = data("subsets.json");
    for p in [&a, &b] {
        let o = elimpar(&["check", "--theory", &theory, "--groupoid", &groupoid, "--json", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    }
    let (ja, jb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ja, jb);
    let v: serde_json::Value = serde_json::from_slice(&ja).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["status"], "pass");
    assert_eq!(v["bounds"]["max_tuple"], 3);
    assert_eq!(v["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
    let names: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["theory", "conservative", "elimination", "open", "t0"]);
}

#[test]
fn linear_orders_fail_with_witness() {
    let o = elimpar(&["check", "--groupoid", &data("linear_orders.json"), "--check", "elimination"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("elimination: FAIL at (a)"), "{}", stdout(&o));
}

#[test]
fn missing_file_is_a_usage_error() {
    let o = elimpar(&["check", "--groupoid", "/definitely/missing.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/definitely/missing.json"));
    assert_eq!(elimpar(&["check"]).status.code(), Some(2));
}

#[test]
fn cap_makes_conservativity_inconclusive() {
    let o = elimpar(&[
        "check",
        "--theory",
        &data("decidable.theory"),
        "--groupoid",
        &data("subsets.json"),
        "--check",
        "conservative",
        "--model-cap",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", stdout(&o));
}

#[test]
fn orbit_of_gf4_generator() {
    let o = elimpar(&["orbit", "--groupoid", &data("gf4.json"), "--tuple", "a"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("orbit (2 points):") && s.contains("GF4: (a)") && s.contains("GF4: (b)"), "{s}");
    assert!(s.contains("formula: exists"), "{s}");

    let o = elimpar(&["orbit", "--groupoid", &data("gf4.json"), "--tuple", "a,a"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("upper bound: x1 = x2"));
}

#[test]
fn orbit_errors() {
    let o = elimpar(&["orbit", "--groupoid", &data("gf4.json"), "--tuple", "nope"]);
    assert_eq!(o.status.code(), Some(2));
    let o = elimpar(&["orbit", "--groupoid", &data("gf_bouquet.json"), "--tuple", "0_2,0_4"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn etale_completion_adds_frobenius_and_keeps_verdicts_consistent() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("completed.json");
    let report = dir.path().join("r.json");
    let o = elimpar(&[
        "etale",
        "--groupoid",
        &data("gf4_identity.json"),
        "--out",
        out.to_str().unwrap(),
        "--json",
        report.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["arrows"].as_array().unwrap().len(), 2);
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let after = r["checks"][0]["detail"]["eliminates_after"].as_bool().unwrap();
    let o = elimpar(&["check", "--groupoid", out.to_str().unwrap(), "--check", "elimination"]);
    assert_eq!(o.status.code(), Some(if after { 0 } else { 1 }));
}

#[test]
fn synth_on_two_block_orders() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.theory");
    let o = elimpar(&["synth", "--groupoid", &data("two_block.json"), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("[x] U1(x) & U2(x) => false"));
    assert!(text.contains("[x, y] Lt(x, y) => U1(x) | U2(y)"));
    assert_eq!(print_theory(&parse_theory(&text).unwrap()), text);
}

#[test]
fn morleyize_leaves_negation_free_theories_alone() {
    let path = data("decidable.theory");
    let o = elimpar(&["morleyize", "--theory", &path]);
    assert_eq!(o.status.code(), Some(0));
    let input = parse_theory(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(stdout(&o), print_theory(&input));
}

#[test]
fn morleyize_adds_negation_relations() {
    let o = elimpar(&["morleyize", "--theory", &data("graph.theory")]);
    assert_eq!(o.status.code(), Some(0));
    let t = parse_theory(&stdout(&o)).unwrap();
    assert!(t.signature.relation("N_E").is_some());
}

#[test]
fn topology_reports_lattice_gap() {
    let o = elimpar(&["topology", "--groupoid", &data("linear_orders.json")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("is not parameter-free definable"));
    let o = elimpar(&["topology", "--groupoid", &data("gf4.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}
