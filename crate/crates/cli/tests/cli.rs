use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kreinrel"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn kreinrel")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("kreinrel-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn check_rrz_passes() {
    let out = run(&["check", "rrz", "--trials", "100", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["theorem_id"], "rrz");
    assert_eq!(v["trials"], 100);
    assert_eq!(v["failures"], 0);
}

#[test]
fn repeated_check_is_byte_identical() {
    let args = ["check", "rrz", "cwsum_adjoint", "--trials", "40", "--seed", "11"];
    let a = run(&args);
    let b = run(&args);
    let c = run(&[&args[..], &["--sequential"]].concat());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn gen_then_sweep() {
    let pair = scratch("pair.json");
    let csv_path = scratch("sweep.csv");
    let g = run(&["gen", "--flavor", "obt", "--n", "3", "--m", "2", "--seed", "5", "--out", pair.to_str().unwrap()]);
    assert_eq!(g.status.code(), Some(0), "{}", String::from_utf8_lossy(&g.stderr));
    let s = run(&["sweep", pair.to_str().unwrap(), "--nx", "3", "--ny", "2", "--out", csv_path.to_str().unwrap()]);
    assert_eq!(s.status.code(), Some(0), "{}", String::from_utf8_lossy(&s.stderr));
    let mut rdr = csv::Reader::from_path(&csv_path).unwrap();
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["re_z", "im_z", "dim_M", "dim_mul", "dim_ker", "is_operator", "in_sigma", "in_res_main"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 6);
    for r in &rows {
        // dim M(z) equals the boundary dimension for a boundary triplet
        assert_eq!(&r[2], "2");
        assert_eq!(&r[5], "true");
    }
}

#[test]
fn flip_fixture_sweep_has_no_resolvent_points() {
    let pair = scratch("flip.json");
    assert_eq!(run(&["gen", "--fixture", "flip", "--n", "1", "--out", pair.to_str().unwrap()]).status.code(), Some(0));
    let s = run(&["sweep", pair.to_str().unwrap(), "--format", "json"]);
    assert_eq!(s.status.code(), Some(0));
    let rows: Vec<serde_json::Value> = serde_json::from_slice(&s.stdout).unwrap();
    assert_eq!(rows.len(), 25);
    assert!(rows.iter().all(|r| r["in_res_main"] == false));
}

#[test]
fn report_aggregates_and_flags_failures() {
    let rep = scratch("rrz.json");
    let c = run(&["check", "rrz", "--trials", "10", "--seed", "1", "--out", rep.to_str().unwrap()]);
    assert_eq!(c.status.code(), Some(0));
    let ok = run(&["report", rep.to_str().unwrap()]);
    assert_eq!(ok.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(v["total_failures"], 0);

    let mut bad: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&rep).unwrap()).unwrap();
    bad["failures"] = 3.into();
    let bad_path = scratch("bad.json");
    std::fs::write(&bad_path, bad.to_string()).unwrap();
    let r = run(&["report", rep.to_str().unwrap(), bad_path.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["check", "rrz", "--seed", "1", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["check", "rrz"]).status.code(), Some(2));
    assert_eq!(run(&["check", "no_such_theorem", "--seed", "1"]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "/nonexistent/pair.json"]).status.code(), Some(2));
    assert_eq!(run(&["gen", "--n", "0"]).status.code(), Some(2));
}

#[test]
fn real_sweep_points_are_rejected() {
    let pair = scratch("real.json");
    assert_eq!(run(&["gen", "--fixture", "identity", "--n", "2", "--out", pair.to_str().unwrap()]).status.code(), Some(0));
    let s = run(&["sweep", pair.to_str().unwrap(), "--im-lo", "0", "--im-hi", "1", "--ny", "2"]);
    assert_eq!(s.status.code(), Some(2));
}

#[test]
fn sweep_help_documents_columns() {
    let h = run(&["sweep", "--help"]);
    let text = String::from_utf8(h.stdout).unwrap();
    for col in ["re_z", "im_z", "dim_M", "dim_mul", "dim_ker", "is_operator", "in_sigma", "in_res_main"] {
        assert!(text.contains(col), "missing {col}");
    }
}
