//! End-to-end tests driving the compiled binary through every subcommand.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chowcheck"))
}

fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("chowcheck-test-{tag}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn numbers_prints_exact_rationals() {
    let out = run(&[
        "numbers",
        "--bernoulli",
        "0",
        "--bernoulli",
        "12",
        "--euler",
        "3",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "1\n-691/2730\n1/4\n");
}

#[test]
fn numbers_requires_an_index() {
    let out = run(&["numbers"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn identities_pass_and_fail_modes() {
    let out = run(&[
        "identities",
        "--cg",
        "--lambda-product",
        "-g",
        "2",
        "-D",
        "6",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("cg-identity g=2 D=6: pass"));
    assert!(text.contains("lambda-product g=2 D=6: pass"));

    // Out-of-range genus is a usage error (clap exits 2).
    let out = run(&["identities", "--cg", "-g", "0", "-D", "6"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn lemma21_json_round_trips() {
    let out = run(&["lemma21", "-g", "2", "-D", "6", "--json"]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["g"], 2);
    assert_eq!(value["even_ratios"][0][1], "1/4");
    assert_eq!(value["nonvanishing_certified"], true);
}

#[test]
fn grr_certify_exit_codes() {
    let dir = fixtures_dir();
    for (name, expect) in [
        ("semistable.cfg", 0),
        ("multifiber.cfg", 0),
        ("chain.cfg", 0),
        ("adversarial.cfg", 1),
    ] {
        let path = dir.join(name);
        let out = run(&["grr", "certify", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(expect), "{name}: {}", stdout(&out));
    }
}

#[test]
fn grr_delta_and_reduce() {
    let chain = fixtures_dir().join("chain.cfg");
    let out = run(&["grr", "delta", chain.to_str().unwrap(), "--set", "Y1,Y2"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("delta({Y1,Y2}) = 1"));

    let out = run(&[
        "grr",
        "reduce",
        chain.to_str().unwrap(),
        "--expr",
        "cg*Y2*Y2",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("normal form: cg*f*(1/2 T1)*Y2"), "{text}");

    // Unknown component name in the expression.
    let out = run(&["grr", "reduce", chain.to_str().unwrap(), "--expr", "cg*Y9"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn cone_check_outputs() {
    let dir = fixtures_dir();
    let out = run(&["cone", "check", dir.join("g1_pass.cone").to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("fixed-stratum check skipped"));

    let out = run(&[
        "cone",
        "check",
        dir.join("g1_oddmu.cone").to_str().unwrap(),
        "--even-level",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("hypothesis violation"));

    let out = run(&[
        "cone",
        "check",
        dir.join("g2_pass.cone").to_str().unwrap(),
        "--even-level",
        "--bound",
        "5",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("fixed stratum lies in smooth locus"));

    let out = run(&["cone", "check", dir.join("g1_swap.cone").to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("smooth (partial Z-basis): false"));
}

#[test]
fn lemma21_degree_defaults_to_2g_plus_2() {
    let out = run(&["lemma21", "-g", "2", "--json"]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["trunc"], 6);
}

#[test]
fn verify_all_genus_zero_is_a_usage_error() {
    let out = run(&["verify-all", "--g-max", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_all_list_and_selection() {
    let out = run(&["verify-all", "--list"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("numbers/euler-bridge"));
    assert!(text.contains("cone/involution-samples"));

    let out = run(&["verify-all", "--check", "numbers/psi-routes", "--quiet"]);
    assert!(out.status.success());

    let out = run(&["verify-all", "--check", "does/not-exist"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_all_rejects_corrupted_fixture_naming_it() {
    let dir = temp_dir("corrupt");
    for entry in fs::read_dir(fixtures_dir()).unwrap() {
        let path = entry.unwrap().path();
        fs::copy(&path, dir.join(path.file_name().unwrap())).unwrap();
    }
    fs::write(dir.join("semistable.cfg"), "[components\nbroken").unwrap();
    let out = bin()
        .args(["verify-all", "--fixtures", dir.to_str().unwrap(), "--quiet"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("semistable.cfg"), "stderr: {err}");
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn verify_all_requires_complete_fixture_directory() {
    let dir = temp_dir("incomplete");
    fs::write(dir.join("only.cfg"), "x").unwrap();
    let out = bin()
        .args(["verify-all", "--fixtures", dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("missing"), "stderr: {err}");
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn report_honors_output_directory_override() {
    let dir = temp_dir("outdir");
    let out = bin()
        .args([
            "report",
            "--check",
            "numbers/psi-routes",
            "--format",
            "json",
            "--out",
            "run.json",
        ])
        .env("CHOWCHECK_OUT_DIR", &dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let body = fs::read_to_string(dir.join("run.json")).unwrap();
    let report = chowcheck::report::RunReport::from_json(&body).unwrap();
    assert_eq!(report.checks.len(), 1);
    assert_eq!(report.checks[0].name, "numbers/psi-routes");
    // Timings are on stderr, not in the report body.
    assert!(!body.contains("timing"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("timing"));
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn report_unwritable_output_path_errors() {
    let out = run(&[
        "report",
        "--check",
        "numbers/psi-routes",
        "--out",
        "/nonexistent-dir/sub/run.json",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("writing"));
}

#[test]
fn report_text_format_includes_timings() {
    let out = run(&[
        "report",
        "--check",
        "numbers/psi-routes",
        "--format",
        "text",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("ms)"));
}
