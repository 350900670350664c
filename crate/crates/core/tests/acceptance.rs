//! The twelve acceptance criteria, each run through its harness preset.
//! Prints one line per criterion to stderr (bypassing output capture) and
//! fails if any criterion fails.

use std::io::Write;
use std::time::Duration;

use graphmat::harness::{run_suite, Suite, SuiteOptions};

/// Runtime limits that are part of a criterion.
fn runtime_limit(suite: Suite) -> Option<Duration> {
    match suite {
        Suite::Wigner => Some(Duration::from_secs(120)),
        Suite::ConstraintEdges => Some(Duration::from_secs(300)),
        _ => None,
    }
}

#[test]
fn acceptance_criteria() {
    let opts = SuiteOptions {
        seed: 2024,
        ..SuiteOptions::default()
    };
    let mut failed = Vec::new();
    for (i, suite) in Suite::ALL.into_iter().enumerate() {
        let report = run_suite(suite, &opts);
        let elapsed = Duration::from_millis(report.wall_ms as u64);
        let in_time = runtime_limit(suite).is_none_or(|limit| elapsed <= limit);
        let passed = report.passed && in_time;
        let mut detail: Vec<String> = report
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{}: {}", c.name, c.detail))
            .collect();
        if !in_time {
            detail.push(format!(
                "took {elapsed:?}, limit {:?}",
                runtime_limit(suite).unwrap()
            ));
        }
        detail.extend(report.skipped.iter().cloned());
        let line = format!(
            "criterion {:>2} [{}] {}: {} (checks: {}, {:.1}s){}",
            i + 1,
            suite.name(),
            suite.description(),
            if passed { "PASS" } else { "FAIL" },
            report.checks.len(),
            elapsed.as_secs_f64(),
            if detail.is_empty() {
                String::new()
            } else {
                format!(" - {}", detail.join("; "))
            },
        );
        writeln!(std::io::stderr(), "{line}").unwrap();
        if !passed {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
