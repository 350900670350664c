use std::path::PathBuf;
use std::process::{Command, Output};

fn graphmat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_graphmat"))
        .args(args)
        .env_remove("GRAPHMAT_CAP_ENTRIES")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn shape(name: &str) -> String {
    format!("{}/../core/shapes/{name}.toml", env!("CARGO_MANIFEST_DIR"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    dir.join(name)
}

/// Compares against `tests/golden/<name>.txt`; `UPDATE_GOLDEN=1` rewrites it.
fn golden(name: &str, actual: &str) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(format!("{name}.txt"));
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).unwrap();
    }
    let expected =
        std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing {}", path.display()));
    assert_eq!(
        actual, expected,
        "{name} help changed; rerun with UPDATE_GOLDEN=1 if intended"
    );
}

#[test]
fn help_matches_golden_files() {
    let o = graphmat(&["--help"]);
    assert!(o.status.success());
    golden("help", &stdout(&o));
    for sub in [
        "bound",
        "estimate",
        "verify",
        "tightness",
        "moments",
        "separator",
    ] {
        let o = graphmat(&[sub, "--help"]);
        assert!(o.status.success());
        golden(&format!("help_{sub}"), &stdout(&o));
    }
}

#[test]
fn help_documents_every_flag() {
    let text = stdout(&graphmat(&["estimate", "--help"]));
    for flag in [
        "--shape",
        "--n ",
        "--n-grid",
        "--epsilon",
        "--trials",
        "--seed",
        "--workers",
        "--out",
        "--cap-entries",
    ] {
        assert!(text.contains(flag), "missing {flag}");
    }
    assert!(text.contains("GRAPHMAT_CAP_ENTRIES"));
    let text = stdout(&graphmat(&["verify", "--help"]));
    assert!(text.contains("--suite") && text.contains("--count"));
}

#[test]
fn bound_prints_the_closed_form_value() {
    let o = graphmat(&[
        "bound",
        "--shape",
        &shape("single_edge"),
        "--n",
        "100",
        "--epsilon",
        "0.5",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let b = &v["bounds"][0];
    assert!((b["upper_bound"].as_f64().unwrap() - 2039.3113305524605).abs() < 1e-9);
    assert_eq!(b["formula_terms"].as_array().unwrap().len(), 4);
}

#[test]
fn separator_reports_size_and_paths() {
    let o = graphmat(&["separator", "--shape", &shape("separator_example")]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["separator"]["q"], 2);
    assert_eq!(v["separator"]["paths"].as_array().unwrap().len(), 2);
}

#[test]
fn verify_konig_reports_all_equalities() {
    let o = graphmat(&[
        "verify", "--suite", "konig", "--count", "1000", "--seed", "7",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("1000/1000 equalities"));
}

#[test]
fn built_in_shape_names_are_accepted() {
    let o = graphmat(&["bound", "--shape", "middle_path", "--n-grid", "8,16,32"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["bounds"].as_array().unwrap().len(), 3);
}

#[test]
fn usage_errors_exit_with_two() {
    let cases: &[&[&str]] = &[
        &[
            "bound",
            "--shape",
            "single_edge",
            "--n",
            "4",
            "--n-grid",
            "4,8",
        ],
        &["bound", "--shape", "single_edge"],
        &["bound", "--shape", "single_edge", "--n", "4", "--bogus"],
        &["bound", "--shape", "no/such/file.toml", "--n", "4"],
        &[
            "bound",
            "--shape",
            "single_edge",
            "--n",
            "4",
            "--epsilon",
            "1.5",
        ],
        &["estimate", "--shape", "single_edge", "--n-grid", "8,4"],
        &["verify", "--suite", "nope"],
        &["frobnicate"],
    ];
    for args in cases {
        assert_eq!(graphmat(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn cap_entries_env_var_is_parsed() {
    let o = Command::new(env!("CARGO_BIN_EXE_graphmat"))
        .args(["bound", "--shape", "single_edge", "--n", "4"])
        .env("GRAPHMAT_CAP_ENTRIES", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn estimate_is_deterministic_given_the_seed() {
    let run = |file: &str, workers: &str| {
        let out = scratch(file);
        let args = [
            "estimate",
            "--shape",
            "middle_path",
            "--n-grid",
            "8,16",
            "--trials",
            "4",
            "--seed",
            "3",
            "--workers",
            workers,
        ];
        let o = Command::new(env!("CARGO_BIN_EXE_graphmat"))
            .args(args)
            .arg("--out")
            .arg(&out)
            .output()
            .unwrap();
        assert!(o.status.success());
        let summary = PathBuf::from(format!("{}.summary.json", out.display()));
        assert!(summary.exists());
        std::fs::read_to_string(out).unwrap()
    };
    let a = run("det_a.csv", "1");
    let b = run("det_b.csv", "2");
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 1 + 2 * 4);
    assert!(a.starts_with("n,trial,seed,value"));
}

#[test]
fn moments_and_tightness_run() {
    let o = graphmat(&[
        "moments",
        "--shape",
        "single_edge",
        "--n",
        "5",
        "--k",
        "2",
        "--trials",
        "50",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    // n(n−1)(2n−3) closed walks of length 4 use every edge an even number of times.
    assert_eq!(v["moments"][0]["expected_trace"], "140");
    let o = graphmat(&[
        "tightness",
        "--shape",
        "single_edge",
        "--n-grid",
        "16,32,64,128",
        "--trials",
        "8",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}
