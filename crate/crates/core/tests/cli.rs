use std::path::PathBuf;
use std::process::{Command, Output};

fn catalog() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("catalog")
}

fn hkinv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hkinv"))
        .args(args)
        .current_dir(catalog())
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn invariant_table_output() {
    let o = hkinv(&["invariant", "0_1_theta.hkd", "--r-range", "3..5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("4.000000"), "{text}");
    assert!(text.contains("16.000000"), "{text}");
    assert!(text.contains("52.360680"), "{text}");
}

#[test]
fn json_is_deterministic_across_workers() {
    let args = |w: &'static str| {
        ["--workers", w, "--format", "json", "invariant", "4_1.hkd", "trivial_genus3.hkd", "--r-range", "3..7"]
    };
    let a = hkinv(&args("1"));
    let b = hkinv(&args("3"));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!(v.is_object() || v.is_array());
}

#[test]
fn eval_with_colors() {
    let o = hkinv(&["--format", "csv", "eval", "circle.hkd", "--r", "5", "--color", "o1=1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("-1.618034"), "{}", stdout(&o));
}

#[test]
fn wrt_of_the_unknot() {
    let o = hkinv(&["--format", "csv", "wrt", "links/unlink_1.hkd", "--r", "6"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("1.000000"), "{}", stdout(&o));
}

#[test]
fn verify_one_suite() {
    let o = hkinv(&["verify", "--suite", "kirby", "--r-range", "3..5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn exit_codes() {
    // Bad input: missing file, empty directory, unknown flag, r out of range.
    assert_eq!(hkinv(&["invariant", "nope.hkd", "--r", "3"]).status.code(), Some(1));
    let empty = std::env::temp_dir().join(format!("hkinv-empty-{}", std::process::id()));
    std::fs::create_dir_all(&empty).unwrap();
    assert_eq!(hkinv(&["table", empty.to_str().unwrap()]).status.code(), Some(1));
    std::fs::remove_dir(&empty).unwrap();
    assert_eq!(hkinv(&["invariant", "--bogus"]).status.code(), Some(1));
    assert_eq!(hkinv(&["invariant", "4_1.hkd", "--r", "2"]).status.code(), Some(1));
    assert_eq!(hkinv(&["invariant", "4_1.hkd", "--r", "65"]).status.code(), Some(1));
    // A link evaluator refuses diagrams with vertices.
    assert_eq!(hkinv(&["wrt", "0_1_theta.hkd", "--r", "3"]).status.code(), Some(1));
    // Failed comparison.
    let o = hkinv(&["table", ".", "--compare", "table1.csv"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("nodiag"));
}
