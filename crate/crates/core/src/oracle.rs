//! Brute-force reference computations, written directly from the definitions
//! and sharing no code with the fast paths they check. Everything here is
//! exponential in its input and meant for small cases only.

use crate::error::{Error, Result};
use crate::gmatrix::{binomial, IndexScheme};
use crate::linalg::DenseMatrix;
use crate::rgraph::{pair_count, InputGraph};
use crate::shape::ShapeGraph;

/// All `t`-bit masks with `k` bits set, in increasing order (Gosper's hack).
fn masks_of_size(t: usize, k: usize) -> impl Iterator<Item = u32> {
    let limit = 1u64 << t;
    let mut cur: u64 = if k == 0 { 0 } else { (1u64 << k) - 1 };
    let mut done = k > t;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let out = cur as u32;
        if cur == 0 {
            done = true;
        } else {
            let c = cur & cur.wrapping_neg();
            let r = cur + c;
            cur = (((r ^ cur) >> 2) / c) | r;
            done = cur >= limit;
        }
        Some(out)
    })
}

fn smallest_mask_size(t: usize, accept: impl Fn(u32) -> bool) -> usize {
    (0..=t)
        .find(|&k| masks_of_size(t, k).any(&accept))
        .expect("the full vertex set is accepted")
}

/// Smallest vertex cover of the shape's edges, by trying subsets in
/// increasing size.
pub fn brute_min_cover(shape: &ShapeGraph) -> usize {
    let edges: Vec<u32> = shape
        .edges()
        .iter()
        .map(|&(a, b)| (1 << a) | (1 << b))
        .collect();
    smallest_mask_size(shape.t(), |m| edges.iter().all(|&e| e & m != 0))
}

/// True when no path joins `U \ set` to `V \ set` avoiding `set`.
fn blocks(adj: &[u32], u: u32, v: u32, set: u32) -> bool {
    let mut reached = u & !set;
    loop {
        let mut next = reached;
        for (a, &row) in adj.iter().enumerate() {
            if (reached >> a) & 1 == 1 {
                next |= row & !set;
            }
        }
        if next == reached {
            return reached & v == 0;
        }
        reached = next;
    }
}

/// Smallest `U`–`V` vertex separator, by trying subsets in increasing size.
pub fn brute_min_separator(shape: &ShapeGraph) -> usize {
    let t = shape.t();
    let mut adj = vec![0u32; t];
    for &(a, b) in shape.edges() {
        adj[a] |= 1 << b;
        adj[b] |= 1 << a;
    }
    let u = shape.u().iter().fold(0u32, |m, &i| m | (1 << i));
    let v = shape.v().iter().fold(0u32, |m, &i| m | (1 << i));
    smallest_mask_size(t, |set| blocks(&adj, u, v, set))
}

/// Checks that `paths` are pairwise vertex-disjoint walks along shape edges
/// from `U` to `V` with every interior vertex in `W`.
pub fn valid_disjoint_paths(shape: &ShapeGraph, paths: &[Vec<usize>]) -> bool {
    let mut used = vec![false; shape.t()];
    for p in paths {
        let (Some(&first), Some(&last)) = (p.first(), p.last()) else {
            return false;
        };
        if !shape.in_u(first) || !shape.in_v(last) {
            return false;
        }
        if p.len() > 2 && p[1..p.len() - 1].iter().any(|&w| !shape.in_w(w)) {
            return false;
        }
        if p.windows(2).any(|e| !shape.has_edge(e[0], e[1])) {
            return false;
        }
        for &v in p {
            if used[v] {
                return false;
            }
            used[v] = true;
        }
    }
    true
}

/// `R_H(A, B)` by enumerating every ordered tuple `C`.
pub fn naive_entry(graph: &InputGraph, shape: &ShapeGraph, a: &[usize], b: &[usize]) -> i64 {
    let n = graph.n();
    let t = shape.t();
    let mut img = vec![usize::MAX; t];
    for (i, &u) in shape.u().iter().enumerate() {
        img[u] = a[i];
    }
    for (j, &v) in shape.v().iter().enumerate() {
        if img[v] != usize::MAX {
            if img[v] != b[j] {
                return 0;
            }
        } else {
            if a.contains(&b[j]) {
                return 0;
            }
            img[v] = b[j];
        }
    }
    let z = shape.z();
    let mut total = 0;
    let mut c = vec![0usize; z];
    'outer: loop {
        let distinct =
            (0..z).all(|k| !a.contains(&c[k]) && !b.contains(&c[k]) && !c[..k].contains(&c[k]));
        if distinct {
            for (k, &w) in shape.w().iter().enumerate() {
                img[w] = c[k];
            }
            // χ_e = +1 for an edge, −1 for a non-edge.
            let absent = shape
                .edges()
                .iter()
                .filter(|&&(p, q)| !graph.adjacent(img[p], img[q]))
                .count();
            total += if absent % 2 == 0 { 1 } else { -1 };
        }
        for slot in c.iter_mut() {
            *slot += 1;
            if *slot < n {
                continue 'outer;
            }
            *slot = 0;
        }
        break;
    }
    total
}

/// Explicit `R_H` from [`naive_entry`].
pub fn naive_matrix(graph: &InputGraph, shape: &ShapeGraph) -> Result<DenseMatrix> {
    let rows: Vec<Vec<usize>> = IndexScheme::new(graph.n(), shape.x())?.iter().collect();
    let cols: Vec<Vec<usize>> = IndexScheme::new(graph.n(), shape.y())?.iter().collect();
    Ok(DenseMatrix::from_fn(rows.len(), cols.len(), |i, j| {
        naive_entry(graph, shape, &rows[i], &cols[j])
    }))
}

/// `tr((M Mᵀ)^k)` by repeated naive multiplication.
pub fn naive_trace_moment(m: &DenseMatrix, k: usize) -> Result<i128> {
    let r = m.rows();
    let c = m.cols();
    let mut mmt = vec![vec![0i128; r]; r];
    for i in 0..r {
        for j in 0..r {
            mmt[i][j] = (0..c)
                .map(|l| m.get(i, l) as i128 * m.get(j, l) as i128)
                .sum();
        }
    }
    let mut power = mmt.clone();
    for _ in 1..k {
        let mut next = vec![vec![0i128; r]; r];
        for i in 0..r {
            for j in 0..r {
                let mut acc: i128 = 0;
                for l in 0..r {
                    acc = acc
                        .checked_add(
                            power[i][l]
                                .checked_mul(mmt[l][j])
                                .ok_or(Error::Overflow("trace".into()))?,
                        )
                        .ok_or(Error::Overflow("trace".into()))?;
                }
                next[i][j] = acc;
            }
        }
        power = next;
    }
    Ok((0..r).map(|i| power[i][i]).sum())
}

/// Exact `E[tr((R_H R_Hᵀ)^k)]` averaged over all `2^{C(n,2)}` graphs on
/// `n` vertices. Fails unless the average is an integer.
pub fn brute_expected_trace(shape: &ShapeGraph, n: usize, k: usize) -> Result<i128> {
    let pairs = pair_count(n);
    if pairs > 16 {
        return Err(Error::CapExceeded {
            what: "graphs to enumerate".into(),
            size: 1u128 << pairs,
            cap: 1 << 16,
        });
    }
    let all_pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    let mut sum: i128 = 0;
    for mask in 0u32..(1u32 << pairs) {
        let edges: Vec<(usize, usize)> = all_pairs
            .iter()
            .enumerate()
            .filter(|(p, _)| (mask >> p) & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        let g = InputGraph::from_edges(n, &edges)?;
        sum += naive_trace_moment(&naive_matrix(&g, shape)?, k)?;
    }
    let count = 1i128 << pairs;
    if sum % count != 0 {
        return Err(Error::InvalidArgument(format!(
            "average {sum}/{count} is not an integer"
        )));
    }
    Ok(sum / count)
}

/// Number of compatible `(A, B)` pairs for an edgeless bipartite shape with
/// `|U| = x`, `|V| = y`: `C(n, x)·C(n − x, y)`.
pub fn compatible_pairs(n: u64, x: u64, y: u64) -> Option<u128> {
    binomial(n, x)?.checked_mul(binomial(n.checked_sub(x)?, y)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn gosper_enumerates_all_masks_of_each_size() {
        for t in 0..6 {
            for k in 0..=t {
                let got: Vec<u32> = masks_of_size(t, k).collect();
                let want: Vec<u32> = (0..(1u32 << t))
                    .filter(|m| m.count_ones() as usize == k)
                    .collect();
                assert_eq!(got, want);
            }
        }
    }

    #[test]
    fn brute_sizes_on_catalog() {
        assert_eq!(brute_min_cover(&catalog::two_cover_bipartite()), 2);
        assert_eq!(brute_min_separator(&catalog::separator_example()), 2);
        assert_eq!(brute_min_separator(&catalog::seven_vertex()), 2);
        assert_eq!(brute_min_separator(&catalog::middle_path()), 1);
        assert_eq!(brute_min_separator(&catalog::shared_endpoint()), 1);
    }

    #[test]
    fn path_validator_rejects_bad_paths() {
        let h = catalog::middle_path();
        let ids = h.ids_of(&["u1", "w1", "v1"]).unwrap();
        assert!(valid_disjoint_paths(&h, std::slice::from_ref(&ids)));
        assert!(!valid_disjoint_paths(&h, &[ids.clone(), ids.clone()]));
        assert!(!valid_disjoint_paths(&h, &[vec![ids[0], ids[2]]]));
        assert!(!valid_disjoint_paths(&h, &[vec![]]));
    }

    #[test]
    fn single_edge_fourth_moment_at_three() {
        assert_eq!(
            brute_expected_trace(&catalog::single_edge(), 3, 2).unwrap(),
            18
        );
        assert_eq!(
            brute_expected_trace(&catalog::single_edge(), 4, 1).unwrap(),
            12
        );
    }

    #[test]
    fn naive_single_edge_is_signed_adjacency() {
        let g = InputGraph::from_edges(3, &[(0, 1)]).unwrap();
        let m = naive_matrix(&g, &catalog::single_edge()).unwrap();
        assert_eq!(m.get(0, 1), 1);
        assert_eq!(m.get(0, 2), -1);
        assert_eq!(m.get(1, 1), 0);
    }
}
