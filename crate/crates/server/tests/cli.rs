mod common;

use std::io::Write;
use std::process::{Command, Output, Stdio};

use common::fixture;

fn morphdis(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_morphdis"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn path(name: &str) -> String {
    fixture(name).to_str().unwrap().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["frobnicate"][..],
        &["db-stats"],
        &["db-stats", "--db", "x", "--bogus"],
        &[],
    ] {
        let out = morphdis(args, "");
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty());
        assert!(!out.stderr.is_empty());
    }
    assert_eq!(morphdis(&["--help"], "").status.code(), Some(0));
}

#[test]
fn unreadable_files_exit_1_on_stderr() {
    for args in [
        &["db-stats", "--db", "/nonexistent/db.json"][..],
        &["did", "--did-model", "/nonexistent/m.json", "x"],
        &[
            "train-tagger",
            "--corpus",
            "/nonexistent/c.tsv",
            "--out",
            "/tmp/never.json",
        ],
    ] {
        let out = morphdis(args, "");
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(out.stdout.is_empty());
        assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/"));
    }
}

#[test]
fn db_stats_reports_average_ambiguity() {
    let out = morphdis(
        &["db-stats", "--db", &path("toy-msa.json"), "--words", &path("words.txt")],
        "",
    );
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.lines().any(|l| l == "avg_ambiguity 1.5"), "{text}");
    assert!(text.lines().any(|l| l == "stems 2"));
}

#[test]
fn did_reads_stdin_lines() {
    let out = morphdis(
        &["did", "--did-model", &path("did.model.json"), "--dialect", "auto"],
        "Azyk ya ESAm\n\nkyfk Alywm\n",
    );
    assert_eq!(out.status.code(), Some(0));
    let lines: Vec<serde_json::Value> = stdout(&out).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0]["label"], "egy");
    assert_eq!(lines[1]["label"], "lev");
    assert_eq!(lines[0]["scores"].as_object().unwrap().len(), 4);
}

#[test]
fn batch_output_is_byte_stable() {
    let input = "wktbt\nhw ktb .\n$lwnk\n";
    let run = |args: &[&str]| stdout(&morphdis(args, input));
    let config = path("service.toml");
    let db = path("toy-msa.json");
    for args in [
        vec!["disambiguate", "--config", config.as_str()],
        vec!["analyze", "--db", db.as_str()],
    ] {
        let first = run(&args);
        assert_eq!(first.lines().count(), 3);
        assert_eq!(first, run(&args));
    }
}

#[test]
fn disambiguate_with_explicit_models() {
    let out = morphdis(
        &[
            "disambiguate",
            "--db",
            &path("toy-glf.json"),
            "--tagger",
            &path("tagger-glf.model.json"),
            "wktbt",
        ],
        "",
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["dialect_used"], "glf");
    assert_eq!(v["views"]["tokenized"], "w+ktb+t");
    assert_eq!(v["views"]["diac_pos"], "wktbt/verb");
}

#[test]
fn db_validate_lists_violations() {
    let ok = morphdis(&["db-validate", "--db", &path("toy-egy.json")], "");
    assert_eq!(ok.status.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.json");
    let source = std::fs::read_to_string(fixture("toy-msa.json"))
        .unwrap()
        .replace("\"S-N\"]", "\"S-XX\"]");
    std::fs::write(&broken, source).unwrap();
    let out = morphdis(&["db-validate", "--db", broken.to_str().unwrap()], "");
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("S-XX"));
    assert!(!out.stderr.is_empty());
}
