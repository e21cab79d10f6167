use std::path::Path;
use std::process::Command;

use strassen_core::cli::{cli_main, EXIT_INPUT_ERROR, EXIT_OK, EXIT_VERIFICATION_FAILED};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("strassen").chain(args.iter().copied());
    let code = cli_main(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn derive(dir: &Path, field: &str) -> String {
    let path = dir.join(format!("{}.json", field.replace(['(', ')'], "")));
    let p = path.to_str().unwrap().to_string();
    let (code, out, err) = run(&["derive", "--field", field, "--out", &p]);
    assert_eq!(code, EXIT_OK, "{out}{err}");
    p
}

#[test]
fn derive_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let p = derive(dir.path(), "rational");
    let (code, out, _) = run(&["verify", &p]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("bilinear: 16 pairs checked, passed"), "{out}");
    assert!(out.contains("trilinear: 64 triples checked, passed"), "{out}");
    assert!(!out.contains("skipped"));
}

#[test]
fn exhaustive_over_gf3() {
    let dir = tempfile::tempdir().unwrap();
    let p = derive(dir.path(), "gf(3)");
    let (code, out, _) = run(&["verify", &p, "--exhaustive"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("6561 pairs checked, passed"), "{out}");

    let (code, out, _) = run(&["verify", &p, "--exhaustive", "--json"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["reports"][1]["checks_run"], 6561);
}

#[test]
fn exhaustive_skipped_for_rationals_and_refused_for_large_primes() {
    let dir = tempfile::tempdir().unwrap();
    let p = derive(dir.path(), "rational");
    let (code, out, _) = run(&["verify", &p, "--exhaustive"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("skipped"));
    let p = derive(dir.path(), "gf(101)");
    let (code, _, err) = run(&["verify", &p, "--exhaustive"]);
    assert_eq!(code, EXIT_INPUT_ERROR);
    assert!(err.contains("budget"), "{err}");
}

#[test]
fn tampered_file_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let p = derive(dir.path(), "gf(5)");
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    v["terms"][0]["W"] = serde_json::json!(["2", "0", "0", "2"]);
    std::fs::write(&p, v.to_string()).unwrap();
    let (code, out, _) = run(&["verify", &p]);
    assert_eq!(code, EXIT_VERIFICATION_FAILED);
    assert!(out.contains("FAILED"));
}

#[test]
fn rank_six_file_verifies_with_warning_and_engine_refuses() {
    let dir = tempfile::tempdir().unwrap();
    let p = derive(dir.path(), "rational");
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    v["terms"].as_array_mut().unwrap().pop();
    v["rank"] = 6.into();
    std::fs::write(&p, v.to_string()).unwrap();
    let (code, out, _) = run(&["verify", &p]);
    assert_eq!(code, EXIT_VERIFICATION_FAILED);
    assert!(out.contains("warning: rank 6"));
    let (code, _, err) = run(&["bench", &p, "--sizes", "2"]);
    assert_eq!(code, EXIT_INPUT_ERROR);
    assert!(err.contains("rank 6"));
}

#[test]
fn derive_with_explicit_rotation_and_vector() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("d.json");
    let p = p.to_str().unwrap();
    let (code, _, err) = run(&[
        "derive", "--field", "gf(7)", "--d", "2,1,0,4", "--u", "0,1", "--out", p,
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    let (code, _, err) = run(&["derive", "--field", "gf(7)", "--u", "1,5", "--out", p]);
    assert_eq!(code, EXIT_INPUT_ERROR);
    assert!(err.contains("eigenvector"), "{err}");
    let (code, _, err) = run(&["derive", "--field", "gf(3)", "--d", "1,0,0,1", "--out", p]);
    assert_eq!(code, EXIT_INPUT_ERROR);
    assert!(err.contains("scalar multiple"), "{err}");
    let (code, _, _) = run(&["derive", "--field", "rational", "--d", "0,-1,1,-1", "--u", "-1,0", "--out", p]);
    assert_eq!(code, EXIT_OK);
    let (code, _, _) = run(&["derive", "--field", "float64", "--out", p]);
    assert_eq!(code, EXIT_INPUT_ERROR);
    let (code, _, _) = run(&["derive", "--field", "gf(4)", "--out", p]);
    assert_eq!(code, EXIT_INPUT_ERROR);
}

#[test]
fn table_lists_sixteen_cells() {
    let (code, out, _) = run(&["table", "--field", "rational"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.matches("[ok]").count(), 16);
    assert!(out.contains("-MD"));
    assert!(out.contains("-DM"));
    assert!(out.contains("-D⁻¹MD⁻¹"));
    assert!(out.contains("table: 16 cells checked, passed"), "{out}");
}

#[test]
fn bench_counts_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let p = derive(dir.path(), "gf(5)");
    let (code, out, _) = run(&["bench", &p, "--sizes", "2,4,8", "--cutoff", "1", "--csv"]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "n,strassen_mults,classical_mults,strassen_ms,classical_ms");
    assert_eq!(&lines[1..], ["2,7,8,,", "4,49,64,,", "8,343,512,,"]);
    let (code, out, _) = run(&["bench", &p, "--sizes", "2,4,8"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.lines().nth(3).unwrap().contains("343"));
}

#[test]
fn float_bench_reports_times() {
    let dir = tempfile::tempdir().unwrap();
    let p = derive(dir.path(), "rational");
    let (code, out, err) = run(&["bench", &p, "--sizes", "4,8", "--cutoff", "2", "--float", "--csv"]);
    assert_eq!(code, EXIT_OK, "{err}");
    let row: Vec<&str> = out.lines().nth(2).unwrap().split(',').collect();
    assert_eq!(row[0], "8");
    // 8 -> 4 -> 2: 49 leaf blocks, 8 classical mults each
    assert_eq!(row[1], "392");
    assert!(row[3].parse::<f64>().is_ok());
}

#[test]
fn multiply_files_and_seeded_operands() {
    let dir = tempfile::tempdir().unwrap();
    let p = derive(dir.path(), "rational");
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    std::fs::write(&a, "n 3 field rational\n1 2 3\n4 5 6\n7 8 9\n").unwrap();
    std::fs::write(&b, "n 3 field rational\n1 0 0\n0 1/2 0\n0 0 -1\n").unwrap();
    let (code, out, err) = run(&[
        "multiply", &p, "--a", a.to_str().unwrap(), "--b", b.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(out.starts_with("n 3 field rational\n1 1 -3\n4 5/2 -6\n7 4 -9\n"), "{out}");
    assert!(out.contains("scalar_mults 49"));
    assert!(out.contains("matches classical: yes"));

    let (code, first, _) = run(&["multiply", &p, "--n", "5", "--seed", "11", "--cutoff", "2"]);
    assert_eq!(code, EXIT_OK);
    let (_, second, _) = run(&["multiply", &p, "--n", "5", "--seed", "11", "--cutoff", "2"]);
    assert_eq!(first, second);

    let (code, _, _) = run(&["multiply", &p, "--a", a.to_str().unwrap()]);
    assert_eq!(code, EXIT_INPUT_ERROR);
    std::fs::write(&b, "n 3 field gf(5)\n1 0 0\n0 1 0\n0 0 1\n").unwrap();
    let (code, _, _) = run(&[
        "multiply", &p, "--a", a.to_str().unwrap(), "--b", b.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_INPUT_ERROR);
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(run(&["verify", "/nonexistent/file.json"]).0, EXIT_INPUT_ERROR);
    assert_eq!(run(&["frobnicate"]).0, EXIT_INPUT_ERROR);
    assert_eq!(run(&[]).0, EXIT_INPUT_ERROR);
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, "{\"format_version\": \"1\"").unwrap();
    assert_eq!(run(&["verify", p.to_str().unwrap()]).0, EXIT_INPUT_ERROR);
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("s.json");
    let bin = env!("CARGO_BIN_EXE_strassen");
    let status = Command::new(bin)
        .args(["derive", "--field", "rational", "--out", p.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let status = Command::new(bin).args(["verify", p.to_str().unwrap()]).status().unwrap();
    assert_eq!(status.code(), Some(0));
    let status = Command::new(bin).args(["verify", "missing.json"]).status().unwrap();
    assert_eq!(status.code(), Some(2));
}
