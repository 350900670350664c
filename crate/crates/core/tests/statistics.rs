//! Seeded Monte Carlo checks of distributional invariants.

use graphmat::bounds::{lower_bound_scale, norm_upper_bound, ShapeStats};
use graphmat::catalog;
use graphmat::gmatrix::{GraphMatrix, LinearCombination, Partition};
use graphmat::harness::{estimate_norm, ols, trial_seed};
use graphmat::rgraph::InputGraph;
use graphmat::shape::ShapeGraph;
use graphmat::spectral::{self, PowerOptions};
use graphmat::witness::{matrix_inner_product, witness_ratio};
use rayon::prelude::*;

const SAMPLES: usize = 10_000;

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let k = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / k;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

fn norms(h: &ShapeGraph, n: usize, trials: usize, seed: u64) -> Vec<f64> {
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let s = trial_seed(seed, n, i);
            let g = InputGraph::sample(n, s).unwrap();
            estimate_norm(h, &g, 1 << 24, spectral::DEFAULT_TOL, s)
                .unwrap()
                .value
        })
        .collect()
}

#[test]
fn edge_variables_have_mean_zero() {
    let mean = (0..SAMPLES as u64)
        .map(|s| {
            InputGraph::sample(5, s)
                .unwrap()
                .edge_variable(1, 3)
                .unwrap() as f64
        })
        .sum::<f64>()
        / SAMPLES as f64;
    assert!(mean.abs() <= 3.0 / (SAMPLES as f64).sqrt(), "mean {mean}");
}

#[test]
fn characters_are_orthogonal() {
    let e1 = [(0, 1), (1, 2)];
    let e2 = [(0, 1), (2, 3)];
    let mut cross = 0i64;
    for s in 0..SAMPLES as u64 {
        let g = InputGraph::sample(4, s).unwrap();
        let (a, b) = (g.chi(&e1).unwrap(), g.chi(&e2).unwrap());
        assert_eq!(a * a, 1);
        cross += a * b;
    }
    let mean = cross as f64 / SAMPLES as f64;
    assert!(mean.abs() <= 5.0 / (SAMPLES as f64).sqrt(), "mean {mean}");
}

#[test]
fn entries_have_mean_zero() {
    let h = catalog::middle_path();
    let xs: Vec<f64> = (0..SAMPLES as u64)
        .into_par_iter()
        .map(|s| {
            let g = InputGraph::sample(6, s).unwrap();
            GraphMatrix::new(&h, &g).unwrap().entry(&[0], &[1]).unwrap() as f64
        })
        .collect();
    let (mean, se) = mean_and_se(&xs);
    assert!(mean.abs() <= 5.0 * se, "mean {mean} ± {se}");
}

#[test]
fn random_partition_average_approximates_the_full_matrix() {
    let h = catalog::single_edge();
    let n = 10;
    let g = InputGraph::sample(n, 3).unwrap();
    let full = GraphMatrix::new(&h, &g).unwrap().to_dense(1 << 10).unwrap();
    let tt = 4.0;
    let parts: Vec<Vec<i64>> = (0..SAMPLES as u64)
        .into_par_iter()
        .map(|s| {
            let p = Partition::uniform(n, 2, s).unwrap();
            GraphMatrix::partitioned(&h, &g, p)
                .unwrap()
                .to_dense(1 << 10)
                .unwrap()
                .data()
                .to_vec()
        })
        .collect();
    for idx in 0..full.data().len() {
        let xs: Vec<f64> = parts.iter().map(|m| tt * m[idx] as f64).collect();
        let (mean, se) = mean_and_se(&xs);
        let want = full.data()[idx] as f64;
        assert!(
            (mean - want).abs() <= 5.0 * se + 1e-12,
            "entry {idx}: {mean} ± {se} vs {want}"
        );
    }
}

/// Fraction of trials above the bound is at most ε + 3·√(ε/200).
#[test]
fn upper_bound_is_probabilistically_sound() {
    for (h, n) in [
        (catalog::single_edge(), 64),
        (catalog::middle_path(), 32),
        (catalog::fan(), 24),
    ] {
        let ns = norms(&h, n, 200, 5);
        for eps in [0.5, 0.1] {
            let bound = norm_upper_bound(ShapeStats::from_shape(&h), n as u64, eps)
                .unwrap()
                .upper_bound;
            let frac = ns.iter().filter(|&&v| v > bound).count() as f64 / 200.0;
            assert!(
                frac <= eps + 3.0 * (eps / 200.0).sqrt(),
                "n={n} eps={eps}: {frac}"
            );
        }
    }
}

#[test]
fn bound_over_lower_scale_grows_polylogarithmically() {
    for h in [
        catalog::single_edge(),
        catalog::middle_path(),
        catalog::seven_vertex(),
        catalog::separator_example(),
    ] {
        let stats = ShapeStats::from_shape(&h);
        let power = (stats.q + stats.z + 1) as f64;
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for e in 6..=11 {
            let n = 1u64 << e;
            let ratio = norm_upper_bound(stats, n, 0.01).unwrap().upper_bound
                / lower_bound_scale(&h, n).unwrap();
            xs.push((n as f64).ln().ln());
            ys.push(ratio.ln());
        }
        let (slope, _, _) = ols(&xs, &ys).unwrap();
        assert!(slope <= power, "log-log-log slope {slope} above {power}");
    }
}

#[test]
fn bipartite_witnesses_certify_the_lower_scale() {
    for h in [
        catalog::single_edge(),
        catalog::fan(),
        catalog::two_cover_bipartite(),
    ] {
        for n in [32usize, 64, 128] {
            let good = (0..20)
                .into_par_iter()
                .filter(|&i| {
                    let g = InputGraph::sample(n, trial_seed(9, n, i)).unwrap();
                    let w = witness_ratio(&g, &h).unwrap();
                    w.ratio >= 0.1 * w.scale
                })
                .count();
            assert!(good >= 19, "n={n}: {good}/20");
        }
    }
}

#[test]
fn frobenius_norm_concentrates_at_n_to_the_t() {
    let h = catalog::middle_path();
    let t = h.t() as i32;
    let (mut xs, mut sds, mut rel) = (Vec::new(), Vec::new(), Vec::new());
    for n in [16usize, 32, 64] {
        let vals: Vec<f64> = (0..50)
            .into_par_iter()
            .map(|i| {
                let g = InputGraph::sample(n, trial_seed(1, n, i)).unwrap();
                let m = GraphMatrix::new(&h, &g).unwrap();
                matrix_inner_product(&m, &m).unwrap() as f64
            })
            .collect();
        let (mean, se) = mean_and_se(&vals);
        xs.push((n as f64).ln());
        sds.push((se * 50f64.sqrt()).ln());
        rel.push(mean / (n as f64).powi(t));
    }
    assert!(rel.iter().all(|&r| r > 0.1 && r < 10.0), "{rel:?}");
    let (slope, _, _) = ols(&xs, &sds).unwrap();
    assert!(slope <= t as f64 - 0.3, "std dev slope {slope}");
}

#[test]
fn norms_stay_in_the_lower_scale_band() {
    for h in [catalog::middle_path(), catalog::fan()] {
        let stats = ShapeStats::from_shape(&h);
        for n in [32usize, 64, 128] {
            let mut ns = norms(&h, n, 10, 2);
            ns.sort_by(f64::total_cmp);
            let scale = lower_bound_scale(&h, n as u64).unwrap();
            let upper = 10.0 * (n as f64).ln().powi((stats.q + stats.z) as i32);
            let (lo, hi) = (ns[0] / scale, ns[9] / scale);
            assert!(
                lo >= 0.1 && hi <= upper,
                "n={n}: [{lo}, {hi}] vs [0.1, {upper}]"
            );
        }
    }
}

#[test]
fn linear_combinations_obey_the_triangle_inequality() {
    let n = 48;
    let g = InputGraph::sample(n, 4).unwrap();
    let (a, b) = (catalog::single_edge(), catalog::middle_path());
    let opts = PowerOptions {
        seed: 1,
        ..PowerOptions::default()
    };
    let na = spectral::operator_norm(&GraphMatrix::new(&a, &g).unwrap(), &opts)
        .unwrap()
        .value;
    let nb = spectral::operator_norm(&GraphMatrix::new(&b, &g).unwrap(), &opts)
        .unwrap()
        .value;
    let combo = LinearCombination::new(vec![
        (2.0, GraphMatrix::new(&a, &g).unwrap()),
        (-0.5, GraphMatrix::new(&b, &g).unwrap()),
    ])
    .unwrap();
    let nc = spectral::operator_norm(&combo, &opts).unwrap().value;
    let biggest = (2.0 * na).max(0.5 * nb);
    assert!(nc <= 2.0 * na + 0.5 * nb + 1e-6);
    assert!(nc >= 0.5 * biggest, "{nc} vs max term {biggest}");
}
