use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_equifocal");
const SPACES: &str = include_str!("../data/symmetric_spaces.json");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("EQUIFOCAL_CATALOG_DIR").output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn table1_shipped_catalog_matches() {
    let out = run(&["table1"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert!(rows.len() > 30);
    assert!(rows.iter().all(|r| r.ends_with(",true")));
}

#[test]
fn table1_flags_corrupted_multiplicity() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("spaces.json");
    let mut json: serde_json::Value = serde_json::from_str(SPACES).unwrap();
    let first = &mut json["spaces"][0];
    assert_eq!(first["label"], "AI");
    first["multiplicities"]["all"] = "2".into();
    std::fs::write(&file, json.to_string()).unwrap();
    let out = run(&["table1", "--catalog", path(&file)]);
    assert_eq!(code(&out), 1);
    let text = stdout(&out);
    let flagged: Vec<&str> = text.lines().filter(|l| l.ends_with(",false")).collect();
    assert!(!flagged.is_empty());
    assert!(flagged.iter().all(|l| l.starts_with("AI[")), "{flagged:?}");
}

#[test]
fn table1_empty_catalog_gives_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("empty.json");
    std::fs::write(&file, "").unwrap();
    let out = run(&["table1", "--catalog", path(&file)]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).lines().count(), 1);
}

#[test]
fn table1_missing_or_invalid_catalog() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["table1", "--catalog", path(&dir.path().join("none.json"))]);
    assert_eq!(code(&out), 2);
    assert!(!out.stderr.is_empty());
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(code(&run(&["table1", "--catalog", path(&bad)])), 2);
}

#[test]
fn table1_writes_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("t1.csv");
    let out = run(&["table1", "--out", path(&file)]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&file).unwrap(), stdout(&run(&["table1"])));
}

#[test]
fn hermann_rows() {
    let out = run(&["hermann"]);
    assert_eq!(code(&out), 0);
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let headers = reader.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let (h, computed, matched) = (col("h"), col("computed"), col("match"));
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert!(rows.iter().all(|r| &r[matched] == "true"));
    let find = |label: &str| rows.iter().find(|r| &r[h] == label).unwrap()[computed].to_string();
    assert_eq!(find("SO'(16)"), "120");
    assert_eq!(find("Sp(4,C)"), "72");
}

#[test]
fn arrange_isotropy_a2() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("a2.svg");
    let out = run(&["arrange", "--space", "T2-01[n=3]", "--xi", "1,2", "--svg", path(&svg)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let svg = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(svg.matches("<line").count(), 3);
    assert!(svg.contains("<circle"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("-5/3"));
}

#[test]
fn arrange_real_slice_only() {
    let out = run(&["arrange", "--space", "T2-01[n=3]", "--xi", "1,2", "--j-range", "0..0"]);
    assert_eq!(code(&out), 0);
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| &r[3] == "0"), "{rows:?}");
}

#[test]
fn arrange_errors() {
    assert_eq!(code(&run(&["arrange", "--space", "T9-99", "--xi", "1,2"])), 2);
    assert_eq!(code(&run(&["arrange", "--space", "T2-01[n=3]", "--xi", "1,2,3,4,5"])), 2);
    let cat = equifocal::hermann::HermannCatalog::builtin();
    let aggregate = cat.actions().iter().find(|a| !a.has_per_root_split()).unwrap();
    let xi = vec!["1"; aggregate.rank()].join(",");
    let out = run(&["arrange", "--space", &aggregate.id, "--xi", &xi]);
    assert_ne!(code(&out), 0);
    assert!(!out.stderr.is_empty());
}

#[test]
fn spectra_json() {
    let out = run(&["spectra", "--space", "T2-01[n=3]", "--xi", "1,2", "--eta", "1,-1"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v.is_object());
}

#[test]
fn focal_radii_csv() {
    let out = run(&["focal-radii", "--lambda", "0.5", "--beta", "1", "--j-range", "-1..1"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("index,re,im,residual"));
    for line in text.lines().skip(1) {
        let residual: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
        assert!(residual < 1e-9);
    }
}

#[test]
fn roots_check_and_weyl_order() {
    let out = run(&["roots-check", "--type", "B", "--rank", "3"]);
    assert_eq!(code(&out), 0);
    // A3 restricted to the orthogonal complement of a root is not closed
    let out = run(&["roots-check", "--type", "A", "--rank", "3", "--restrict", "1,1,0,0;0,0,1,0;0,0,0,1"]);
    assert_eq!(code(&out), 1);
    let out = run(&["weyl-order", "--type", "F4"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v.to_string().contains("1152"));
}

#[test]
fn oracle_models() {
    assert_eq!(code(&run(&["oracle", "sl_n_R", "--n", "4", "--trials", "20"])), 0);
    assert_eq!(code(&run(&["oracle", "so_p_q", "--p", "2", "--q", "3", "--trials", "20"])), 0);
    let out = run(&["oracle", "sl_n_R", "--n", "50"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("too large"));
    assert_eq!(code(&run(&["oracle", "su_n"])), 2);
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["oracle", "so_p_q", "--p", "1", "--q", "3", "--trials", "10", "--seed", "7"][..],
        &["arrange", "--space", "T2-01[n=4]", "--xi", "1,2,3"],
        &["hermann"],
    ] {
        assert_eq!(run(args).stdout, run(args).stdout, "{args:?}");
    }
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&run(&[])), 2);
    assert_eq!(code(&run(&["no-such-command"])), 2);
    assert_eq!(code(&run(&["focal-radii", "--lambda", "x", "--beta", "1"])), 2);
}
