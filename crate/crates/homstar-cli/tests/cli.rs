use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn homstar(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_homstar")).args(args).current_dir(dir).env_remove("HOMSTAR_K").output().unwrap()
}

fn json_report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

#[test]
fn report_schema_is_pinned() {
    let dir = tempfile::tempdir().unwrap();
    for (args, golden) in [
        (vec!["validate", "preset:so3", "--format", "json"], "validate_so3.json"),
        (vec!["cohomology", "preset:h3", "-p", "2", "--format", "json"], "cohomology_h3.json"),
    ] {
        let out = homstar(dir.path(), &args);
        assert_eq!(out.status.code(), Some(0));
        let want = std::fs::read(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(golden)).unwrap();
        assert_eq!(out.stdout, want, "{golden}");
    }
}

#[test]
fn qr_check_on_abelian_r3_reports_equal_coordinates() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c.txt", "fibre_n = 1 2\nfibre_c = 3\n");
    write(dir.path(), "b.form", "degree = 2\nform[1][2] = 1\nform[1][3] = 2\n");
    let out = homstar(
        dir.path(),
        &["qr-check", "preset:abelian3", "--constraint", "c.txt", "--B", "b.form", "-K", "3", "--format", "json"],
    );
    assert_eq!(out.status.code(), Some(0));
    let r = json_report(&out);
    assert_eq!(r["direct"], r["via_projectable"]);
    assert_eq!(r["direct"], serde_json::json!(["1"]));
    assert_eq!(r["truncation"]["order"], 3);
}

#[test]
fn equiv_of_exact_shift_writes_a_witness() {
    let dir = tempfile::tempdir().unwrap();
    // On h3, e¹∧e² = −d_A e³.
    write(dir.path(), "b.form", "degree = 2\nform[1][3] = 1\n");
    write(dir.path(), "b2.form", "degree = 2\nform[1][3] = 1\nform[1][2] = -1\n");
    for (form, star) in [("b.form", "a.star"), ("b2.form", "b.star")] {
        let out = homstar(dir.path(), &["build-star", "preset:h3", "--B", form, "-K", "3", "-o", star]);
        assert_eq!(out.status.code(), Some(0));
    }
    let out = homstar(dir.path(), &["equiv", "a.star", "b.star", "-o", "w.txt", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_report(&out)["equivalent"], true);
    let text = std::fs::read_to_string(dir.path().join("w.txt")).unwrap();
    let (_, w) = homstar::formats::parse_witness(&text).unwrap();
    assert_eq!(w.order(), 3);

    let out = homstar(dir.path(), &["build-star", "preset:h3", "-K", "3", "-o", "z.star"]);
    assert_eq!(out.status.code(), Some(0));
    let out = homstar(dir.path(), &["equiv", "a.star", "z.star", "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json_report(&out)["relative_class"]["coordinates"], serde_json::json!(["1", "0"]));
}

#[test]
fn corrupted_star_is_not_projectable() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c.txt", "fibre_k = 3\nfibre_n = 1 2\n");
    let out = homstar(dir.path(), &["build-star", "preset:h3", "-K", "2", "-o", "s.star"]);
    assert_eq!(out.status.code(), Some(0));
    let out = homstar(dir.path(), &["check-projectable", "s.star", "--constraint", "c.txt"]);
    assert_eq!(out.status.code(), Some(0));

    let text = std::fs::read_to_string(dir.path().join("s.star")).unwrap();
    let bad = text.replace("begin C2\n", "begin C2\n[xi3, 1] -> xi1\n");
    assert_ne!(bad, text);
    write(dir.path(), "bad.star", &bad);
    let out = homstar(dir.path(), &["check-projectable", "bad.star", "--constraint", "c.txt", "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    let v = &json_report(&out)["violation"];
    assert_eq!(v["order"], 2);
    assert_eq!(v["condition"], "ideal-two-sided-in-normalizer");

    let out = homstar(dir.path(), &["check", "bad.star", "--assoc"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn exit_codes_and_default_order() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(homstar(dir.path(), &["validate", "missing.txt"]).status.code(), Some(2));
    assert_eq!(homstar(dir.path(), &["build-star", "preset:h3", "-K", "0", "-o", "x"]).status.code(), Some(2));
    write(dir.path(), "bad.txt", "dim_base = 0\nrank = 2\nc[1][2][3] = 1\n");
    assert_eq!(homstar(dir.path(), &["validate", "bad.txt"]).status.code(), Some(2));
    // Structure constants that violate the Jacobi identity.
    write(dir.path(), "nonlie.txt", "dim_base = 0\nrank = 3\nc[1][2][1] = 1\nc[2][3][2] = 1\nc[1][3][3] = 1\n");
    let out = homstar(dir.path(), &["validate", "nonlie.txt"]);
    assert_eq!(out.status.code(), Some(1));

    let out = Command::new(env!("CARGO_BIN_EXE_homstar"))
        .args(["build-star", "preset:so3", "-o", "s.star", "--format", "json"])
        .current_dir(dir.path())
        .env("HOMSTAR_K", "2")
        .output()
        .unwrap();
    assert_eq!(json_report(&out)["truncation"]["order"], 2);
}
