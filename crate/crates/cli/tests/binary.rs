use std::process::{Command, Output};

fn kerrwalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kerrwalk")).args(args).output().unwrap()
}

#[test]
fn walk_prints_a_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w.csv");
    let run = kerrwalk(&["walk", "--theta", "pi/4", "--chi", "0.3", "--steps", "20", "--out", out.to_str().unwrap()]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let summary: serde_json::Value = serde_json::from_slice(&run.stdout).unwrap();
    assert_eq!(summary["rows"], 20);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("t,ipr,sp,norm\n1,"));
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w.csv");
    let out = out.to_str().unwrap();
    for args in [
        vec!["walk", "--theta", "pi/4", "--chi", "0.3", "--steps", "0", "--out", out],
        vec!["walk", "--theta", "pi/4", "--steps", "10", "--out", out],
        vec!["walk", "--theta", "pi/4", "--chi", "nan", "--steps", "10", "--out", out],
        vec!["profile", "--theta", "1", "--chi", "0", "--steps", "10", "--snapshots", "3,20", "--out", out],
        vec!["sweep", "--theta-range", "0,pi,3", "--chi-range", "0,2,0", "--steps", "10", "--out", out],
    ] {
        let run = kerrwalk(&args);
        assert_eq!(run.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&run.stderr));
        assert!(String::from_utf8_lossy(&run.stderr).starts_with("error: "));
    }
}

#[test]
fn unwritable_output_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let out = blocker.join("w.csv");
    let run = kerrwalk(&["walk", "--theta", "1", "--chi", "0", "--steps", "5", "--out", out.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(1), "{}", String::from_utf8_lossy(&run.stderr));
}
