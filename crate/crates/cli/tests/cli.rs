use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn data(name: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name);
    root.to_str().unwrap().to_string()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("mconc").chain(args.iter().copied());
    let code = mconc::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(text: &str) -> Value {
    serde_json::from_str(text.trim()).unwrap_or_else(|e| panic!("not JSON ({e}): {text}"))
}

#[test]
fn product_of_bell_pairs_has_zero_concurrence_across_the_pairs() {
    let (code, out, _) = run(&[
        "concurrence",
        "--state",
        &data("bell_pair_product.json"),
        "--partition",
        "12|34",
    ]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["value"], 0);
    assert_eq!(v["squared"], 0);
}

#[test]
fn full_concurrence_prints_twelve_significant_digits() {
    let (code, out, _) = run(&["concurrence", "--state", &data("bell_pair_product.json")]);
    assert_eq!(code, 0);
    assert!(out.contains("\"value\":1.32287565553"), "{out}");
    assert!(out.contains("\"squared\":1.75"), "{out}");
}

#[test]
fn sig12_formatting() {
    assert_eq!(mconc::sig12(0.0), "0");
    assert_eq!(mconc::sig12(-0.0), "0");
    assert_eq!(mconc::sig12(1.75), "1.75");
    assert_eq!(mconc::sig12(2f64.sqrt()), "1.41421356237");
    assert_eq!(mconc::sig12(1.0 / 3.0e5), "0.00000333333333333");
    assert_eq!(mconc::sig12(123456789.123456), "123456789.123");
}

#[test]
fn default_scheme_has_zero_slack_everywhere() {
    let (code, out, _) = run(&["verify-scheme", "--n", "4", "--scheme", &data("theorem1.json")]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["valid"], true);
    let slack = v["slack"].as_object().unwrap();
    assert_eq!(slack.len(), 14);
    assert!(slack.values().all(|s| s == "0"));
}

#[test]
fn overweight_scheme_is_rejected() {
    let (code, out, err) = run(&["verify-scheme", "--n", "4", "--scheme", &data("too_heavy.json")]);
    assert_eq!(code, 1);
    assert_eq!(json(&out)["slack"]["12"], "-1/4");
    assert!(err.contains("subset 12"), "{err}");

    let state = data("noisy_bell_pairs_t0.5.json");
    let (code, _, err) = run(&[
        "bound",
        "--state",
        &state,
        "--method",
        "scheme",
        "--scheme",
        &data("too_heavy.json"),
    ]);
    assert_eq!(code, 1);
    assert!(err.contains("slack -1/4"), "{err}");
}

#[test]
fn bound_reports_are_json() {
    let state = data("noisy_bell_pairs_t0.5.json");
    for method in ["theorem1", "corollary1", "delta"] {
        let (code, out, err) = run(&[
            "bound",
            "--state",
            &state,
            "--method",
            method,
            "--providers",
            "ppt,ccnr",
        ]);
        assert_eq!(code, 0, "{err}");
        let v = json(&out);
        let sq = v["squared"].as_f64().unwrap();
        let value = v["value"].as_f64().unwrap();
        assert!((value * value - sq).abs() < 1e-12);
        assert!(v["method"].as_str().unwrap().starts_with(method));
        assert!(!v["contributions"].as_object().unwrap().is_empty());
    }
    let (code, out, _) = run(&[
        "bound",
        "--state",
        &state,
        "--method",
        "theorem1",
        "--tripartite",
        "relation",
    ]);
    assert_eq!(code, 0);
    assert!((json(&out)["squared"].as_f64().unwrap() - 0.296875).abs() < 1e-12);

    let (code, out, _) = run(&[
        "bound",
        "--state",
        &state,
        "--method",
        "theorem2",
        "--partition",
        "1|2|34",
    ]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["contributions"].as_object().unwrap().len(), 6);
}

#[test]
fn bound_argument_errors() {
    let state = data("noisy_bell_pairs_t0.5.json");
    let (code, _, err) = run(&["bound", "--state", &state, "--method", "nonsense"]);
    assert_eq!(code, 1, "{err}");
    let (code, _, _) = run(&[
        "bound",
        "--state",
        &state,
        "--method",
        "delta",
        "--providers",
        "ppt,magic",
    ]);
    assert_eq!(code, 1);
    // theorem2 needs a 2x2x4 state or an i|j|kl grouping
    let (code, _, err) = run(&["bound", "--state", &state, "--method", "theorem2"]);
    assert_eq!(code, 1);
    assert!(err.contains("2x2x4"), "{err}");
    let (code, _, _) = run(&["bound", "--state", &state, "--method", "scheme"]);
    assert_eq!(code, 2);
}

#[test]
fn mixed_state_has_no_exact_concurrence() {
    let (code, _, err) = run(&["concurrence", "--state", &data("noisy_bell_pairs_t0.5.json")]);
    assert_eq!(code, 1);
    assert!(err.contains("pure"), "{err}");
}

#[test]
fn malformed_state_files_exit_2_naming_the_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("notjson.json", "{ dims: ", "state"),
        (
            "norm.json",
            r#"{"dims":[2],"kind":"pure","data":[[1,0],[1,0]]}"#,
            "norm",
        ),
        (
            "herm.json",
            r#"{"dims":[2],"kind":"mixed","data":[[[0.5,0],[0.3,0]],[[0,0],[0.5,0]]]}"#,
            "Hermitian",
        ),
        (
            "trace.json",
            r#"{"dims":[2],"kind":"mixed","data":[[[0.7,0],[0,0]],[[0,0],[0.7,0]]]}"#,
            "trace",
        ),
        (
            "count.json",
            r#"{"dims":[2,2],"kind":"pure","data":[[1,0]]}"#,
            "expected 4 entries",
        ),
    ];
    for (name, body, needle) in cases {
        let path = dir.path().join(name);
        std::fs::write(&path, body).unwrap();
        let (code, _, err) = run(&["concurrence", "--state", path.to_str().unwrap()]);
        assert_eq!(code, 2, "{name}: {err}");
        assert!(err.to_lowercase().contains(&needle.to_lowercase()), "{name}: {err}");
    }
    let (code, _, _) = run(&[
        "concurrence",
        "--state",
        dir.path().join("missing.json").to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
}

#[test]
fn invalid_partitions_exit_1() {
    let state = data("bell_pair_product.json");
    for bad in ["12|3", "12|23|4", "1|2|3|4|5", "1a|234", "|1234"] {
        let (code, _, err) = run(&["concurrence", "--state", &state, "--partition", bad]);
        assert_eq!(code, 1, "{bad}: {err}");
    }
    let (code, _, _) = run(&["partitions", "--n", "3", "--m", "4"]);
    assert_eq!(code, 1);
}

#[test]
fn unknown_flags_are_rejected() {
    let (code, _, err) = run(&["concurrence", "--state", "x.json", "--bogus"]);
    assert_eq!(code, 2);
    assert!(err.contains("--bogus"));
    let (code, _, _) = run(&["frobnicate"]);
    assert_eq!(code, 2);
}

#[test]
fn partitions_and_composition() {
    let (code, out, _) = run(&["partitions", "--n", "4", "--m", "2"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["count"], 7);
    assert_eq!(v["partitions"][0], "1|234");

    let family = "1|2|34,1|3|24,1|4|23,12|3|4,13|2|4,14|2|3,12|34,13|24,14|23";
    let (code, out, _) = run(&["compose", "--n", "4", "--family", family]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["weights"]["1|2|34"], "1/6");
    assert_eq!(v["weights"]["12|34"], "1/12");
    assert_eq!(v["uniform_optimal"], true);

    let (_, out, _) = run(&["compose", "--n", "4", "--family", "12|34", "--objective", "max-total"]);
    assert_eq!(json(&out)["weights"]["12|34"], "1/4");
}

#[test]
fn example_point_and_sweep() {
    let (code, out, _) = run(&["example", "point", "--t", "1"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["z1"], 0.125);
    assert!((v["z4"].as_f64().unwrap() - 0.375).abs() < 1e-15);
    assert!((v["bound_sq_engine"].as_f64().unwrap() - 1.75).abs() < 1e-9);

    let (code, _, _) = run(&["example", "point", "--t", "1.5"]);
    assert_eq!(code, 1);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig.csv");
    let (code, out, _) = run(&[
        "--jobs",
        "2",
        "example",
        "sweep",
        "--steps",
        "11",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 12);
    assert!(text.starts_with("t,z1,z2,z3,z4,z_piecewise,bound_sq_paper,bound_sq_engine,delta_sq\n"));

    // the same rows on stdout, whatever the worker count
    let (_, one, _) = run(&["--jobs", "1", "example", "sweep", "--steps", "11"]);
    let (_, many, _) = run(&["--jobs", "4", "example", "sweep", "--steps", "11"]);
    assert_eq!(one, text);
    assert_eq!(many, text);

    let (code, _, _) = run(&["example", "sweep", "--from", "0.5", "--to", "0.2"]);
    assert_eq!(code, 1);
}

#[test]
fn selftest_passes_and_is_reproducible() {
    let (code, first, err) = run(&["selftest", "--cases", "20"]);
    assert_eq!(code, 0, "{err}");
    let v = json(&first);
    assert_eq!(v["passed"], true);
    assert_eq!(v["seed"], 42);
    assert!(v["suites"].as_array().unwrap().len() >= 10);
    let (_, second, _) = run(&["selftest", "--cases", "20"]);
    assert_eq!(first, second);
    let (_, other, _) = run(&["--seed", "7", "selftest", "--cases", "20"]);
    assert_eq!(json(&other)["seed"], 7);
}

#[test]
fn binary_reports_version_and_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_mconc");
    let out = Command::new(exe).arg("--version").output().unwrap();
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8(out.stdout).unwrap().trim(),
        format!("mconc {}", env!("CARGO_PKG_VERSION"))
    );

    let out = Command::new(exe)
        .args([
            "concurrence",
            "--state",
            &data("bell_pair_product.json"),
            "--partition",
            "12|34",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "{\"partition\":\"12|34\",\"value\":0,\"squared\":0}\n"
    );

    let out = Command::new(exe)
        .args(["concurrence", "--state", "/nonexistent/x.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(exe)
        .args(["partitions", "--n", "2", "--m", "5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
