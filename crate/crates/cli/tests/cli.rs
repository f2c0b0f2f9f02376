use std::process::{Command, Output};

use metabel::suite::{ReportDocument, Status};

fn metabel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_metabel"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const RIGHT_ALTERNATIVE: &str = "1 ((x1 x2) x3); -1 (x1 (x2 x3)); 1 ((x1 x3) x2); -1 (x1 (x3 x2))";

#[test]
fn membership_and_normal_form() {
    let o = metabel(&["member", "--expr", RIGHT_ALTERNATIVE]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "true");
    let o = metabel(&["member", "--expr", "1 ((x1 x2) x3)"]);
    assert_eq!(stdout(&o).trim(), "false");
    let o = metabel(&["nf", "--expr", "1 ((x1 x2) (x3 x4))"]);
    assert_eq!(stdout(&o).trim(), "0");
}

#[test]
fn dimensions() {
    let o = metabel(&["dim", "--variety", "ra2", "--degree", "4"]);
    assert!(stdout(&o).contains("quotient 36"), "{}", stdout(&o));
    let o = metabel(&["dim", "--variety", "ral:2", "--degree", "5", "--field", "fp:101"]);
    assert!(stdout(&o).contains("quotient 9"));
}

#[test]
fn degree_cap_and_syntax_errors_exit_with_two() {
    let o = metabel(&["dim", "--degree", "7"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cap 6"));
    let o = metabel(&["member", "--expr", "(x1 x2 x3)"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1, column 8"));
}

#[test]
fn approx_and_allotted() {
    let o = metabel(&["allotted", "--n", "2"]);
    assert_eq!(stdout(&o).trim(), "true");
    let o = metabel(&["allotted", "--n", "2", "--variety", "ra2"]);
    assert_eq!(stdout(&o).trim(), "false");
    // the cube, multilinearized on input
    let o = metabel(&["approx", "--variety", "ral:2", "--expr", "1 ((x1 x1) x1)"]);
    assert_eq!(stdout(&o).trim(), "true");
    let o = metabel(&["approx", "--variety", "ra2", "--expr", "1 ((x1 x1) x1)"]);
    assert_eq!(stdout(&o).trim(), "false");
}

#[test]
fn superalgebra_commands() {
    let o = metabel(&[
        "supercheck",
        "--epsilon",
        "1",
        "--window",
        "3,4",
        "--expr",
        RIGHT_ALTERNATIVE,
    ]);
    assert!(stdout(&o).starts_with("true"));
    let o = metabel(&[
        "supercheck",
        "--n",
        "3",
        "--window",
        "2,2",
        "--expr",
        "1 (x1 x2); -1 (x2 x1)",
    ]);
    assert!(stdout(&o).starts_with("false"));
    assert!(stdout(&o).contains("witness"));
    let o = metabel(&["superize", "--parities", "11", "--expr", "1 (x1 x2); -1 (x2 x1)"]);
    assert_eq!(stdout(&o), "1 (x1 x2)\n1 (x2 x1)\n");
    let dir = tempfile::tempdir().unwrap();
    let subst = dir.path().join("subst.txt");
    std::fs::write(&subst, "x1 = e1 ⊗ X\nx2 = e2 ⊗ X\n").unwrap();
    let o = metabel(&[
        "envelope-eval",
        "--epsilon",
        "1",
        "--generators",
        "4",
        "--subst",
        subst.to_str().unwrap(),
        "--expr",
        "1 (x1 x2)",
    ]);
    assert_eq!(stdout(&o).trim(), "1/2 e1e2 ⊗ A(0,0)");
}

#[test]
fn witness_lists_values() {
    let o = metabel(&["witness", "--n", "4", "--jmax", "1"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("R_X^0: 1 A(2,1)"), "{out}");
    assert!(out.contains("R_X^1: 1 A(2,2)"));
}

#[test]
fn regular_span_report() {
    let o = metabel(&["regular-span", "--n", "2", "--degree", "5", "--list"]);
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.starts_with("type")).count(), 9);
    assert!(out.contains("9 words, rank 9, dim 9, spanned true"), "{out}");
}

#[test]
fn suite_report_and_exit_status() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let o = metabel(&["run", "witnesses", "--n", "4", "--report", report.to_str().unwrap()]);
    assert!(o.status.success());
    let doc = ReportDocument::from_json(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(doc.results.len(), 1);
    assert_eq!(doc.results[0].status, Status::Pass);
    let o = metabel(&["suite", "operator_relations", "--max-degree", "4"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("unverified"));
}

#[test]
fn opcheck_single_relation() {
    let o = metabel(&["opcheck", "--id", "eq7"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("eq7") && stdout(&o).contains("pass"));
    let o = metabel(&["opcheck", "--id", "nope"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = metabel(&[
        "cache",
        "build",
        "--variety",
        "ral:2",
        "--degree",
        "4",
        "--cache-dir",
        d,
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = metabel(&["cache", "list", "--cache-dir", d]);
    assert!(stdout(&o).contains("ral2-d4-q.basis"));
    let o = metabel(&["dim", "--variety", "ral:2", "--degree", "4", "--cache-dir", d]);
    assert!(stdout(&o).contains("quotient 7"));
    let o = metabel(&["cache", "clear", "--cache-dir", d]);
    assert_eq!(stdout(&o).trim(), "removed 1 files");
}
