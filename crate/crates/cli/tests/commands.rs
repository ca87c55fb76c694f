use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn teaming(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_teaming"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut input = child.stdin.take().unwrap();
    if let Some(text) = stdin {
        input.write_all(text.as_bytes()).unwrap();
    }
    drop(input);
    child.wait_with_output().unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Config file pointing at the fixture corpus.
fn config(dir: &Path) -> PathBuf {
    let f = fixtures();
    let path = dir.join("teaming.toml");
    std::fs::write(
        &path,
        format!(
            "reference_date = \"2015-01-01\"\n[corpus]\ncalls = {:?}\nroster = {:?}\nawards = {:?}\n",
            f.join("calls.txt"),
            f.join("roster.csv"),
            f.join("awards.xml")
        ),
    )
    .unwrap();
    path
}

#[test]
fn ingest_prints_coverage_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path());
    let text = stdout(&teaming(&["ingest", "--config", cfg.to_str().unwrap()], None));
    let rows: Vec<Vec<&str>> = text.lines().map(|l| l.split_whitespace().collect()).collect();
    let row = |name: &str| rows.iter().find(|r| r.first() == Some(&name)).unwrap().clone();
    assert_eq!(row("title"), ["title", "19", "20", "95.0"]);
    assert_eq!(row("deadline"), ["deadline", "17", "20", "85.0"]);
    assert_eq!(row("budget"), ["budget", "18", "20", "90.0"]);
    assert_eq!(row("users_research"), ["users_research", "15", "17", "88.2"]);
}

#[test]
fn ingest_into_store_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path());
    let store = dir.path().join("store");
    let out = teaming(&["ingest", "--config", cfg.to_str().unwrap(), "--store", store.to_str().unwrap(), "--json"], None);
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["stats"]["awards_parsed"], 17);
    assert_eq!(std::fs::read_dir(store.join("calls")).unwrap().count(), 20);
    assert!(std::fs::read_dir(store.join("recommendations")).unwrap().count() > 0);
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path());
    let out = teaming(&["match", "--config", cfg.to_str().unwrap(), "--strategy", "fuzzy", "--user", "amara", "--json"], None);
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(json["amara"]["entries"].as_array().unwrap().iter().all(|e| e["strategy"] == "fuzzy"));

    let out = teaming(&["match", "--config", cfg.to_str().unwrap(), "--user", "nobody"], None);
    assert!(!out.status.success());
}

#[test]
fn match_with_imported_embeddings() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path());
    let emb = fixtures().join("embeddings.tsv");
    let out = teaming(
        &["match", "--config", cfg.to_str().unwrap(), "--embeddings", emb.to_str().unwrap(), "--user", "amara"],
        None,
    );
    // calls without a vector are an error, not a silent zero
    assert!(!out.status.success());
}

#[test]
fn recommend_lists_teams_for_a_lead() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path());
    let out = teaming(&["recommend", "--config", cfg.to_str().unwrap(), "--user", "amara", "--json"], None);
    let teams: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let teams = teams.as_array().unwrap();
    assert!(!teams.is_empty());
    assert!(teams.iter().all(|t| t["lead"] == "u01" && t["report"]["entries"].as_array().is_some_and(|e| e.len() == 3)));
}

#[test]
fn evaluate_reports_hit_rate_and_feedback() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path());
    let fb = fixtures().join("feedback.jsonl");
    let text = stdout(&teaming(&["evaluate", "--config", cfg.to_str().unwrap(), "--feedback", fb.to_str().unwrap()], None));
    assert!(text.contains("hit@10: 3/5 = 0.600"), "{text}");
    assert!(text.contains("feedback: 65 of 70 ratings at or above 7"), "{text}");
}

#[test]
fn map_reads_standard_input() {
    let text = stdout(&teaming(&["map", "--threshold", "60"], Some("natural language processing for question answering")));
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap().split_whitespace().collect::<Vec<_>>(), ["code", "score", "term"]);
    assert!(text.lines().any(|l| l.starts_with("I.2.7 ")), "{text}");

    let dir = tempfile::tempdir().unwrap();
    let tax = dir.path().join("tiny.tsv");
    std::fs::write(&tax, "X.1\tGraph Mining\nX.2\tCompilers\n").unwrap();
    let text = stdout(&teaming(&["map", "--threshold", "50", "--taxonomy", tax.to_str().unwrap()], Some("mining large graphs")));
    assert_eq!(text.lines().count(), 2, "{text}");
    assert!(text.contains("X.1"));

    assert!(!teaming(&["map", "--threshold", "101"], Some("x")).status.success());
}
