use std::path::PathBuf;
use std::process::Command;

use sts_cli::{run, EXIT_BUDGET, EXIT_OK, EXIT_USAGE, EXIT_VALIDATION};
use sts_core::format::parse;

fn sts(args: &[&str]) -> sts_cli::Outcome {
    run(std::iter::once("sts").chain(args.iter().copied()))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sts-cli-test-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn field<'a>(stdout: &'a str, key: &str) -> &'a str {
    stdout
        .lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(": ")))
        .unwrap_or_else(|| panic!("no {key} in {stdout}"))
}

#[test]
fn construct_to_stdout_parses() {
    let out = sts(&["construct", "pg2", "--dim", "3"]);
    assert_eq!(out.code, EXIT_OK);
    let ts = parse(&out.stdout).unwrap();
    assert_eq!((ts.order(), ts.triples().len()), (15, 35));
    let out = sts(&["construct", "section4", "--n", "4"]);
    let ts = parse(&out.stdout).unwrap();
    assert_eq!(ts.order(), 30);
    assert!(!ts.is_steiner());
}

#[test]
fn construct_writes_sidecars() {
    let dir = scratch("sidecars");
    let path = dir.join("ag2.sts");
    let out = sts(&["construct", "ag3", "--dim", "2", "--out", path.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    assert!(path.exists());
    let labels = std::fs::read_to_string(dir.join("ag2.sts.labels")).unwrap();
    assert_eq!(labels.lines().count(), 9);
    let manifest = std::fs::read_to_string(dir.join("ag2.sts.manifest")).unwrap();
    assert!(manifest.contains("seed=0"));
    assert!(manifest.lines().any(|l| l.starts_with("result_sha256=")));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn manifest_digest_is_reproducible() {
    let dir = scratch("manifest");
    let digest = |name: &str| {
        let m = dir.join(name);
        let out = sts(&["--seed", "3", "--manifest", m.to_str().unwrap(), "construct", "random", "--order", "19"]);
        assert_eq!(out.code, EXIT_OK);
        let text = std::fs::read_to_string(&m).unwrap();
        text.lines().find(|l| l.starts_with("result_sha256=")).unwrap().to_string()
    };
    assert_eq!(digest("a.manifest"), digest("b.manifest"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn exit_codes() {
    assert_eq!(sts(&["construct", "pg2", "--dim", "40"]).code, EXIT_VALIDATION);
    assert_eq!(sts(&["construct", "pg2"]).code, EXIT_USAGE);
    assert_eq!(sts(&["frobnicate"]).code, EXIT_USAGE);
    assert_eq!(sts(&["--help"]).code, EXIT_OK);
    assert_eq!(sts(&["construct", "random", "--order", "8"]).code, EXIT_VALIDATION);
    assert_eq!(sts(&["analyze", "--system", "/nonexistent.sts", "projective"]).code, EXIT_VALIDATION);
    let out = sts(&["demo", "two-sizes", "--restarts", "1", "--moves", "10", "--max-orders", "1"]);
    assert_eq!(out.code, EXIT_BUDGET);
    assert!(out.stderr.contains("v=61"), "{}", out.stderr);
}

#[test]
fn analyze_examples() {
    let dir = scratch("analyze");
    let fano = dir.join("fano.sts");
    let pg3 = dir.join("pg3.sts");
    let bad = dir.join("bad.sts");
    sts(&["construct", "pg2", "--dim", "2", "--out", fano.to_str().unwrap()]);
    sts(&["construct", "pg2", "--dim", "3", "--out", pg3.to_str().unwrap()]);
    std::fs::write(&bad, "v 7 steiner\nb 0 1 1\n").unwrap();

    let out = sts(&["analyze", "--system", fano.to_str().unwrap(), "spread", "min"]);
    assert_eq!(field(&out.stdout, "min_spreading_size"), "3");

    let out = sts(&["analyze", "--system", pg3.to_str().unwrap(), "closure", "--set", "0,1,2", "--trace"]);
    assert_eq!(out.code, EXIT_OK);
    assert_eq!(field(&out.stdout, "closure_size"), "7");
    assert!(out.stdout.contains("step 1 added"));

    let out = sts(&["analyze", "--system", bad.to_str().unwrap(), "spread", "min"]);
    assert_eq!(out.code, EXIT_VALIDATION);
    assert!(out.stderr.contains("line 2"));

    let out = sts(&["analyze", "--system", pg3.to_str().unwrap(), "closure", "--set", "0,99"]);
    assert_eq!(out.code, EXIT_VALIDATION);

    let out = sts(&["spread", "projective", "--system", pg3.to_str().unwrap()]);
    assert_eq!(field(&out.stdout, "projective"), "true");

    let out = sts(&["analyze", "--system", fano.to_str().unwrap(), "spread", "minimal", "--set", "0,1,2,3"]);
    assert_eq!(out.code, sts_cli::EXIT_PROPERTY);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn non_projective_answer_is_not_an_error() {
    let dir = scratch("nonproj");
    let ag = dir.join("ag.sts");
    sts(&["construct", "ag3", "--dim", "2", "--out", ag.to_str().unwrap()]);
    let out = sts(&["analyze", "--system", ag.to_str().unwrap(), "projective"]);
    assert_eq!(out.code, EXIT_OK);
    assert_eq!(field(&out.stdout, "projective"), "false");
    // the dimension check needs a PG(d,2) tag
    let out = sts(&["analyze", "--system", ag.to_str().unwrap(), "dimension"]);
    assert_eq!(out.code, EXIT_VALIDATION);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn embed_round_trip() {
    let dir = scratch("embed");
    let src = dir.join("block.sts");
    let dst = dir.join("out.sts");
    std::fs::write(&src, "v 3 partial\nb 0 1 2\n").unwrap();
    let out = sts(&["embed", "--system", src.to_str().unwrap(), "--order", "7", "--out", dst.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    assert_eq!(field(&out.stdout, "success"), "true");
    let ts = parse(&std::fs::read_to_string(&dst).unwrap()).unwrap();
    assert!(ts.is_steiner() && ts.is_block(0, 1, 2));
    let out = sts(&["embed", "--system", src.to_str().unwrap(), "--order", "9"]);
    assert_eq!(out.code, EXIT_OK);
    let out = sts(&["embed", "--system", src.to_str().unwrap(), "--order", "8"]);
    assert_eq!(out.code, EXIT_VALIDATION);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn demo_examples_pass() {
    for args in [
        &["demo", "maxofmin", "--orders", "7,9,13,15"][..],
        &["demo", "szoras", "--n", "3", "--trials", "100", "--seed", "7"],
        &["demo", "bounds"],
        &["demo", "almostmax"],
    ] {
        let out = sts(args);
        assert_eq!(out.code, EXIT_OK, "{args:?}\n{}", out.stdout);
        assert!(out.stdout.ends_with("RESULT PASS\n"));
        assert!(!out.stdout.contains("FAIL"));
    }
}

#[test]
fn csv_tables() {
    let out = sts(&["--format", "csv", "saturate", "bounds", "--max-n", "3"]);
    assert_eq!(out.stdout, "n,q,lunelli_sce,refined\n1,2,2,2\n2,2,4,4\n3,2,5,5\n");
    let out = sts(&["saturate", "bounds", "--max-n", "2", "--q", "3"]);
    assert!(out.stdout.contains("-"));
    let out = sts(&["saturate", "bounds", "--q", "6"]);
    assert_eq!(out.code, EXIT_VALIDATION);
}

#[test]
fn saturate_commands() {
    let out = sts(&["saturate", "min", "--dim", "2"]);
    assert_eq!(field(&out.stdout, "min_saturating_size"), "4");
    let out = sts(&["saturate", "variance", "--n", "2", "--set", "0,1,2"]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.contains("PASS variance_identity"));
    let out = sts(&["saturate", "extremes", "--n", "2", "--m", "3"]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.contains("maxmin_witness"));
}

#[test]
fn size_cap_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_sts"))
        .args(["construct", "pg2", "--dim", "3"])
        .env(sts_core::limits::MAX_ORDER_ENV, "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_VALIDATION));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));
}
