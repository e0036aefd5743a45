use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qmf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmf")).args(args).env_remove("QMF_CACHE").output().expect("binary runs")
}

fn qmf_cached(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmf")).args(args).env("QMF_CACHE", dir).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn coeff_examples() {
    let o = qmf(&["coeff", "--form", "G10H", "--T", "1,1,0,0,0,0"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "129\n");

    let o = qmf(&["coeff", "--form", "X14", "--T", "1,3,1,1,0,0", "--mod", "23"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "4830 ≡ 0 (mod 23)\n");

    let o = qmf(&["coeff", "--form", "X10", "--T", "0,0,0,0,0,0"]);
    assert_eq!(stdout(&o), "0\n");

    let o = qmf(&["coeff", "--form", "G14H", "--T", "1,2,1,1,0,0", "--mod", "691"]);
    assert_eq!(stdout(&o), "177148 ≡ 252 (mod 691)\n");
}

#[test]
fn coeff_rational_and_negative_coordinates() {
    let o = qmf(&["coeff", "--form", "G4H", "--T", "0,0,0,0,0,0"]);
    assert_eq!(stdout(&o), "1/1920\n");
    let o = qmf(&["coeff", "--form", "G4H", "--T", "0,0,0,0,0,0", "--mod", "5"]);
    assert_eq!(stdout(&o), "1/1920 ≡ not p-integral (mod 5)\n");
    let o = qmf(&["coeff", "--form", "X10", "--T", "1,1,-1,1,0,0"]);
    assert_eq!(stdout(&o), "1\n");
}

#[test]
fn coeff_not_psd_warns() {
    let o = qmf(&["coeff", "--form", "E4H", "--T", "1,1,2,2,0,0"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "0\n");
    assert!(stderr(&o).contains("not positive semidefinite"));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["coeff", "--form", "X10", "--T", "1,1,1,0,0,0"][..],
        &["coeff", "--form", "X10", "--T", "1,1,x,0,0,0"],
        &["coeff", "--form", "X16", "--T", "1,1,0,0,0,0"],
        &["coeff", "--form", "E5H", "--T", "1,1,0,0,0,0"],
        &["coeff", "--form", "X10", "--T", "1,3,1,1,0,0", "--depth", "2"],
        &["verify", "congeis", "--k", "16"],
        &["verify", "congeis"],
        &["verify", "ep1", "--p", "9"],
        &["verify", "ramanujan", "--k", "10", "--p", "5"],
        &["verify", "ramanujan", "--k", "4"],
        &["table", "--form", "X10"],
        &["frobnicate"],
    ] {
        let o = qmf(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn deep_runs_warn() {
    let o = qmf(&["verify", "ep1", "--p", "3", "--depth", "5"]);
    assert!(stderr(&o).contains("warning: depth 5"));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_reports() {
    let o = qmf(&["verify", "ramanujan", "--k", "14", "--p", "691", "--depth", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["status"], "holds");
    assert_eq!(v["theorem"], "ramanujan");
    assert!(v["checked"].as_u64().unwrap() > 0);

    let o = qmf(&["verify", "ramanujan", "--k", "16", "--depth", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let ps: Vec<_> = v.as_array().unwrap().iter().map(|r| r["params"]["p"].as_u64().unwrap()).collect();
    assert_eq!(ps, [43, 127]);

    for args in [
        &["verify", "mod23", "--depth", "2"][..],
        &["verify", "theta", "--depth", "2"],
        &["verify", "congeis", "--k", "14", "--depth", "2"],
        &["verify", "ep1", "--p", "7", "--depth", "2"],
    ] {
        let o = qmf(args);
        assert!(o.status.success(), "{args:?}: {}", stderr(&o));
        assert!(!stdout(&o).contains("\"fails\""));
    }
}

#[test]
fn verify_writes_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let o = qmf(&["verify", "mod23", "--depth", "2", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).is_empty());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["status"], "holds");
    assert_eq!(v["params"]["depth"], 2);
}

#[test]
fn table_rows() {
    let o = qmf(&["table", "--form", "X10", "--max", "2"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("T,coeff\n"));
    for row in ["\"1,1,1,1,0,0\",1\n", "\"1,1,0,0,0,0\",-24\n", "\"1,2,1,1,0,0\",12\n"] {
        assert!(out.contains(row), "{row}");
    }

    let o = qmf(&["table", "--form", "G4H", "--max", "1"]);
    assert!(stdout(&o).contains("\"0,0,0,0,0,0\",1/1920\n"));

    let o = qmf(&["table", "--form", "X12", "--max", "0"]);
    assert_eq!(stdout(&o), "T,coeff\n\"0,0,0,0,0,0\",0\n");

    let o = qmf(&["table", "--form", "X10", "--max", "1", "--mod", "17", "--format", "json"]);
    let rows: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let i2 = rows.as_array().unwrap().iter().find(|r| r["T"] == "1,1,0,0,0,0").unwrap();
    assert_eq!(i2["coeff"]["num"], "-24");
    assert_eq!(i2["coeff"]["den"], "1");
    assert_eq!(i2["residue"], 10);
}

#[test]
fn output_is_byte_stable() {
    let args = ["table", "--form", "X14", "--max", "2", "--mod", "23"];
    assert_eq!(qmf(&args).stdout, qmf(&args).stdout);
}

#[test]
fn cache_hits_match_recomputation() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["table", "--form", "X12", "--max", "2", "--format", "json"];
    let fresh = qmf(&args);
    let first = qmf_cached(dir.path(), &args);
    assert!(dir.path().join("X12-depth2.json").exists());
    let second = qmf_cached(dir.path(), &args);
    assert_eq!(fresh.stdout, first.stdout);
    assert_eq!(first.stdout, second.stdout);

    let o = Command::new(env!("CARGO_BIN_EXE_qmf"))
        .args(["--cache", dir.path().to_str().unwrap(), "coeff", "--form", "X12", "--T", "1,1,1,1,0,0", "--depth", "2"])
        .env_remove("QMF_CACHE")
        .output()
        .unwrap();
    assert_eq!(stdout(&o), "1\n");
}

#[test]
fn failed_check_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let o = qmf_cached(dir.path(), &["verify", "mod23", "--depth", "2"]);
    assert!(o.status.success());
    let path = dir.path().join("X14-depth2.json");
    let mut entries: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    // 2det = 5, a non-residue mod 23
    let target = entries.as_array_mut().unwrap().iter_mut().find(|e| e["T"] == "2,2,2,1,1,0").unwrap();
    target["coeff"] = serde_json::json!({ "num": "1", "den": "1" });
    fs::write(&path, serde_json::to_string(&entries).unwrap()).unwrap();

    let o = qmf_cached(dir.path(), &["verify", "mod23", "--depth", "2"]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["status"], "fails");
    assert_eq!(v["witnesses"][0]["T"], "2,2,2,1,1,0");
}
