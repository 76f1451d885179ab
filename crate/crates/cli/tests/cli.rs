use std::process::{Command, Output};

use serde_json::Value;

fn perfiso(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_perfiso"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn lines(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).expect("every line is JSON"))
        .collect()
}

fn summary(out: &Output) -> Value {
    lines(out).pop().expect("a summary line")
}

fn verdict<'a>(rep: &'a Value, name: &str) -> &'a Value {
    rep["verdicts"]
        .as_array()
        .unwrap()
        .iter()
        .find(|v| v["name"] == name)
        .unwrap_or_else(|| panic!("no verdict {name}"))
}

#[test]
fn tables() {
    let out = perfiso(&["tables", "a4"]);
    assert!(out.status.success());
    let ls = lines(&out);
    assert_eq!(ls[0]["table"]["chars"].as_array().unwrap().len(), 4);
    assert_eq!(ls[1]["name"], "tables.orthogonality");
    assert_eq!(ls[1]["pass"], true);

    let rep = summary(&perfiso(&["tables", "cyclic", "8"]));
    assert_eq!(verdict(&rep, "tables.orthogonality")["counts"]["characters"], 8);
    let rep = summary(&perfiso(&["tables", "product", "cyclic:4", "a4"]));
    assert_eq!(verdict(&rep, "tables.orthogonality")["counts"]["characters"], 16);
    assert_eq!(rep["overall_pass"], true);

    let out = perfiso(&["tables", "s4"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown group spec"));
}

#[test]
fn verify_prop24() {
    let out = perfiso(&["verify", "prop24"]);
    assert!(out.status.success());
    let rep = summary(&out);
    assert_eq!(rep["command"], "verify prop24");
    assert_eq!(rep["overall_pass"], true);
    assert_eq!(verdict(&rep, "prop24.count")["counts"]["count"], 48);
    assert_eq!(verdict(&rep, "prop24.group")["counts"]["family_matched"], 1);
    // one line per verdict, then the summary
    assert_eq!(lines(&out).len(), rep["verdicts"].as_array().unwrap().len() + 1);
}

#[test]
fn blocks_under_both_primes() {
    let out = perfiso(&["verify", "blocks", "--prime-factor", "all"]);
    assert!(out.status.success());
    let rep = summary(&out);
    assert_eq!(rep["prime_choice_sweep"].as_array().unwrap().len(), 2);
    assert_eq!(verdict(&rep, "blocks.prime_choice_identical")["pass"], true);
    let c4 = &verdict(&rep, "blocks.c4xa4")["counts"];
    assert_eq!(
        (
            c4["block0.k"].as_u64(),
            c4["block0.l"].as_u64(),
            c4["block0.defect"].as_u64()
        ),
        (Some(16), Some(3), Some(4))
    );
    assert_eq!(verdict(&rep, "blocks.a5")["counts"]["blocks"], 2);

    let rep = summary(&perfiso(&["verify", "blocks", "--prime-factor", "1"]));
    assert_eq!(rep["overall_pass"], true);
    let rep = summary(&perfiso(&["verify", "blocks", "--prime-factor", "2"]));
    assert_eq!(rep["overall_pass"], false);
}

#[test]
fn lemma_roots_small() {
    let rep = summary(&perfiso(&["verify", "lemma-roots", "2"]));
    assert_eq!(rep["overall_pass"], true);
    assert_eq!(verdict(&rep, "lemma_roots.n2.m2")["counts"]["tuples"], 256);
    assert_eq!(verdict(&rep, "lemma_roots.n2.m2")["counts"]["violations"], 0);
}

#[test]
fn reports_are_reproducible() {
    let dir = std::env::temp_dir().join(format!("perfiso-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("report.jsonl");
    let a = perfiso(&["verify", "prop26", "2", "--out", file.to_str().unwrap()]);
    let b = perfiso(&["verify", "prop26", "2"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(std::fs::read(&file).unwrap(), a.stdout);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn guards_and_limits() {
    let out = perfiso(&["verify", "prop26", "9"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(verdict(&summary(&out), "prop26.n9.completed")["pass"], false);

    let out = perfiso(&["verify", "thm27", "2", "--strategy", "exhaustive"]);
    assert_eq!(out.status.code(), Some(1));
    let rep = summary(&out);
    assert!(verdict(&rep, "thm27.n2.completed")["detail"]
        .as_str()
        .unwrap()
        .contains("exceeds the limit of 8"));

    let out = perfiso(&[
        "verify",
        "prop26",
        "3",
        "--strategy",
        "exhaustive",
        "--node-limit",
        "100",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v = verdict(&summary(&out), "prop26.n3.completed").clone();
    assert_eq!(v["timed_out"], true);
    assert_eq!(v["counts"]["nodes_visited"], 101);

    assert_eq!(perfiso(&["verify", "prop26"]).status.code(), Some(1));
    assert_eq!(perfiso(&["verify", "blocks", "3"]).status.code(), Some(1));
}

#[test]
fn verify_all() {
    let rep = summary(&perfiso(&["verify-all", "--n", "0"]));
    assert_eq!(rep["overall_pass"], true);
    let names: Vec<&str> = rep["verdicts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v["name"].as_str().unwrap())
        .collect();
    assert!(names
        .iter()
        .all(|n| n.starts_with("prop24") || n.starts_with("lemma_roots") || n.starts_with("blocks")));

    let out = perfiso(&["verify-all", "--n", "1", "--jobs", "2"]);
    assert!(out.status.success());
    let rep = summary(&out);
    assert_eq!(verdict(&rep, "thm27.n1.count")["counts"]["count"], 96);
    assert_eq!(verdict(&rep, "cross_a4a5.count")["counts"]["count"], 48);
    assert_eq!(verdict(&rep, "descent.n1.j_twist")["pass"], true);
    assert_eq!(verdict(&rep, "centres.enumerated")["pass"], true);
    assert!(!rep["prime_choice_sweep"].as_array().unwrap().is_empty());
}
