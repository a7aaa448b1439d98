//! The `gonality` binary end to end.

use std::io::Write;
use std::process::{Command, Output};

fn gonality(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gonality"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn arithmetic_commands() {
    let o = gonality(&["count", "420", "11", "--deg", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "420\t121\t1128\n");
    assert_eq!(stdout(&gonality(&["trace", "37", "1"])), "37\t1\t2\n");
    assert_eq!(stdout(&gonality(&["classnum", "-23"])), "-23\t3\n");
    assert_eq!(stdout(&gonality(&["genus", "70", "2", "35"])), "70\t(2,35)\t1\n");
}

#[test]
fn json_output_parses() {
    let o = gonality(&["--format", "json", "classify", "60", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).lines().next().unwrap()).unwrap();
    assert_eq!(v["lowerQ"], 4);
    assert_eq!(v["upperQ"], 4);
    assert_eq!(v["status"], "decided");
}

#[test]
fn exit_codes() {
    assert_eq!(gonality(&["genus", "70", "3"]).status.code(), Some(1));
    assert_eq!(gonality(&["count", "10", "5"]).status.code(), Some(1));
    assert_eq!(gonality(&["bogus"]).status.code(), Some(1));
    assert_eq!(
        gonality(&["classify", "60", "3", "--facts", "/nonexistent"])
            .status
            .code(),
        Some(2)
    );

    let mut bad = tempfile();
    writeln!(bad.1, "FP_GON_LB;curve=X0(60)/<3>;p=7").unwrap();
    let o = gonality(&["facts", "validate", bad.0.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let _ = std::fs::remove_file(&bad.0);
}

#[test]
fn contradictory_facts_are_data_errors() {
    let mut f = tempfile();
    writeln!(f.1, "GON_KNOWN;curve=X0(60)/<3>;field=Q;value=7;src=t").unwrap();
    let o = gonality(&["classify", "60", "3", "--facts", f.0.to_str().unwrap()]);
    let _ = std::fs::remove_file(&f.0);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn verify_reports_mismatch_exit() {
    let mut f = tempfile();
    writeln!(f.1, "60;3;gonQ=4\n66;33;gonQ=3").unwrap();
    let path = f.0.to_str().unwrap().to_string();
    let o = gonality(&["verify", "--expected", &path]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    let mut g = tempfile();
    writeln!(g.1, "60;3;gonQ=5").unwrap();
    let o = gonality(&["verify", "--expected", g.0.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).starts_with("mismatch\t60\t3"), "{}", stdout(&o));
    let _ = std::fs::remove_file(&f.0);
    let _ = std::fs::remove_file(&g.0);
}

#[test]
fn survey_small_range() {
    let o = gonality(&["survey", "--nmax", "30"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().all(|l| l.split('\t').count() >= 8), "{text}");
}

fn tempfile() -> (std::path::PathBuf, std::fs::File) {
    use std::sync::atomic::{AtomicU32, Ordering};
    static NEXT: AtomicU32 = AtomicU32::new(0);
    let path = std::env::temp_dir().join(format!(
        "gonality_cli_{}_{}.txt",
        std::process::id(),
        NEXT.fetch_add(1, Ordering::Relaxed)
    ));
    let file = std::fs::File::create(&path).unwrap();
    (path, file)
}
