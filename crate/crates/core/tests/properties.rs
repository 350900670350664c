//! Exact structural invariants checked on generated inputs.

use graphmat::bounds::{norm_upper_bound, ShapeStats};
use graphmat::catalog;
use graphmat::gmatrix::{GraphMatrix, Partition};
use graphmat::moment_oracle::expected_trace_moment_exact;
use graphmat::oracle::{brute_min_cover, brute_min_separator, valid_disjoint_paths};
use graphmat::rgraph::InputGraph;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn konig_cover_matches_matching_and_brute_force(seed in any::<u64>()) {
        let h = catalog::random_bipartite(&mut ChaCha8Rng::seed_from_u64(seed), 8);
        let cover = h.min_vertex_cover().unwrap();
        prop_assert_eq!(cover.q, h.max_matching().unwrap().len());
        prop_assert_eq!(cover.q, brute_min_cover(&h));
        prop_assert!(h.covers(&cover.cover));
        // U and V are the only parts, so separating them means covering every edge.
        prop_assert_eq!(h.separator_size(), cover.q);
    }

    #[test]
    fn menger_separator_matches_paths_and_brute_force(seed in any::<u64>()) {
        let h = catalog::random_shape(&mut ChaCha8Rng::seed_from_u64(seed), 12);
        let sep = h.min_separator();
        let paths = h.max_disjoint_paths();
        prop_assert_eq!(sep.q, sep.separator.len());
        prop_assert_eq!(sep.q, paths.len());
        prop_assert_eq!(sep.q, brute_min_separator(&h));
        prop_assert!(h.separates(&sep.separator));
        prop_assert!(valid_disjoint_paths(&h, &paths));
        prop_assert!(sep.path_lengths.iter().zip(&sep.disjoint_paths).all(|(&l, p)| l + 1 == p.len()));
    }

    #[test]
    fn characters_are_relabeling_equivariant(n in 2usize..30, seed in any::<u64>(), m in 0usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = InputGraph::sample(n, seed).unwrap();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        let edges: Vec<(usize, usize)> = (0..m)
            .map(|_| {
                let i = rng.random_range(0..n);
                let j = (i + rng.random_range(1..n)) % n;
                (i, j)
            })
            .collect();
        let moved: Vec<(usize, usize)> = edges.iter().map(|&(i, j)| (perm[i], perm[j])).collect();
        let chi = g.chi(&edges).unwrap();
        prop_assert_eq!(g.relabel(&perm).unwrap().chi(&moved).unwrap(), chi);
        prop_assert_eq!(chi * chi, 1);
    }

    #[test]
    fn matvec_equals_explicit_product(which in 0usize..4, n in 3usize..9, seed in any::<u64>()) {
        let h = [catalog::single_edge(), catalog::middle_path(), catalog::fan(), catalog::two_cover_bipartite()][which].clone();
        let g = InputGraph::sample(n, seed).unwrap();
        let m = GraphMatrix::new(&h, &g).unwrap();
        let dense = m.to_dense(1 << 20).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let w: Vec<i64> = (0..dense.cols()).map(|_| rng.random_range(-5..=5)).collect();
        let want: Vec<i128> = (0..dense.rows())
            .map(|i| dense.row(i).iter().zip(&w).map(|(&a, &b)| a as i128 * b as i128).sum())
            .collect();
        prop_assert_eq!(m.matvec_exact(&w).unwrap(), want);
    }

    #[test]
    fn partitioned_counts_respect_the_corollaries(which in 0usize..3, extra in 0usize..2, k in 1usize..3, seed in any::<u64>()) {
        let h = [catalog::two_cover_bipartite(), catalog::middle_path(), catalog::fan()][which].clone();
        let n = h.t() + extra;
        let p = Partition::uniform(n, h.t(), seed).unwrap();
        let mc = expected_trace_moment_exact(&h, n, k, Some(&p), 1 << 32).unwrap();
        let b = mc.bound.expect("partitioned shapes have a regime");
        prop_assert!(mc.nonzero_terms <= b.value);
        prop_assert!(b.value <= b.corollary);
    }
}

#[test]
fn bipartite_and_general_forms_coincide() {
    for h in [
        catalog::single_edge(),
        catalog::fan(),
        catalog::two_cover_bipartite(),
    ] {
        for n in [10u64, 1000, 1 << 20] {
            let r = norm_upper_bound(ShapeStats::from_shape(&h), n, 0.05).unwrap();
            assert_eq!(r.general_value, r.bipartite_value);
        }
    }
}
