//! Report-level guarantees of the experiment harness.

use graphmat::catalog;
use graphmat::harness::{run_experiment, ExperimentConfig, Mode};

fn config(mode: Mode) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(catalog::middle_path(), mode);
    c.shape_label = "middle_path".into();
    c.n_grid = vec![6, 12, 24];
    c.trials = 5;
    c.master_seed = 99;
    c
}

#[test]
fn reports_do_not_depend_on_worker_count() {
    for mode in [Mode::Estimate, Mode::Tightness, Mode::Moments] {
        let mut c = config(mode);
        if mode == Mode::Moments {
            c.n_grid = vec![4, 5, 6];
        }
        let bodies: Vec<String> = [1, 2, 8]
            .into_iter()
            .map(|w| {
                c.workers = Some(w);
                run_experiment(&c).unwrap().body_json()
            })
            .collect();
        assert_eq!(bodies[0], bodies[1], "{mode:?}");
        assert_eq!(bodies[0], bodies[2], "{mode:?}");
    }
}

#[test]
fn reruns_are_byte_identical() {
    let c = config(Mode::Estimate);
    let (a, b) = (run_experiment(&c).unwrap(), run_experiment(&c).unwrap());
    assert_eq!(a.body_json(), b.body_json());
    let (mut ca, mut cb) = (Vec::new(), Vec::new());
    a.write_csv(&mut ca).unwrap();
    b.write_csv(&mut cb).unwrap();
    assert_eq!(ca, cb);
}

#[test]
fn one_record_per_grid_point_and_trial() {
    let r = run_experiment(&config(Mode::Estimate)).unwrap();
    assert_eq!(r.records.len(), 3 * 5);
    assert_eq!(r.bounds.len(), 3);
    assert!(r
        .records
        .iter()
        .all(|t| t.upper_bound.is_some() && t.ratio.is_some()));
}

#[test]
fn bound_mode_reports_one_bound_per_n() {
    for h in [
        catalog::single_edge(),
        catalog::separator_example(),
        catalog::shared_endpoint(),
    ] {
        let mut c = ExperimentConfig::new(h, Mode::Bound);
        c.n_grid = vec![10, 100, 1000, 10000];
        assert_eq!(run_experiment(&c).unwrap().bounds.len(), 4);
    }
}

#[test]
fn single_edge_tightness_slope_is_one_half() {
    let mut c = ExperimentConfig::new(catalog::single_edge(), Mode::Tightness);
    c.n_grid = vec![64, 128, 256, 512];
    c.trials = 20;
    let r = run_experiment(&c).unwrap();
    let fit = r.fit.as_ref().unwrap();
    assert_eq!(fit.points, 4);
    assert!((0.35..=0.65).contains(&fit.slope), "slope {}", fit.slope);
    assert!(r.passed(), "{:?}", r.checks);
}

#[test]
fn trial_errors_are_recorded_not_raised() {
    let mut c = ExperimentConfig::new(catalog::two_cover_bipartite(), Mode::Moments);
    c.n_grid = vec![40];
    c.trials = 2;
    c.cap_entries = 100;
    let r = run_experiment(&c).unwrap();
    assert_eq!(r.records.len(), 2);
    assert!(r
        .records
        .iter()
        .all(|t| t.error.is_some() && t.value.is_none()));
    assert!(!r.skipped.is_empty());
}

#[test]
fn summary_omits_records_and_reports_status() {
    let r = run_experiment(&config(Mode::Estimate)).unwrap();
    let summary: serde_json::Value = serde_json::from_str(&r.summary_json()).unwrap();
    assert_eq!(summary["passed"], serde_json::json!(true));
    assert_eq!(summary["hard_failures"], serde_json::json!([]));
    assert!(summary.get("records").is_none());
    assert_eq!(summary["bounds"].as_array().unwrap().len(), 3);
}
