//! Lower-bound witnesses for `‖R_H‖`.
//!
//! For a bipartite shape with minimum vertex cover `S`, fixing where the
//! cover vertices land separates the dependence of `R_H(A, B)` on `A` and on
//! `B`; the sparse vectors `u`, `v` built here certify
//! `‖R_H‖ ≥ |uᵀ R_H v| / (‖u‖‖v‖)` exactly at finite `n`. For general shapes
//! a minimum separator splits `H` into a left part `H_L` and a right part
//! `H_R`, and every partitioned matrix `R_{H,V_1..V_t}` is a sum of outer
//! products of `H_L` and `H_R` vectors.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{cap_check, Error, Result};
use crate::gmatrix::{next_colex, GraphMatrix, IndexScheme, Partition};
use crate::linalg::{DenseMatrix, IntegerMatrix};
use crate::rgraph::InputGraph;
use crate::shape::{ShapeDocument, ShapeGraph, ShapeOptions};

/// A vector indexed by subset ranks, stored as increasing `(rank, value)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseVector {
    pub len: usize,
    pub entries: Vec<(usize, i64)>,
}

impl SparseVector {
    pub fn zeros(len: usize) -> Self {
        SparseVector {
            len,
            entries: Vec::new(),
        }
    }

    /// Number of nonzero entries.
    pub fn support(&self) -> usize {
        self.entries.iter().filter(|&&(_, v)| v != 0).count()
    }

    pub fn norm_squared(&self) -> i128 {
        self.entries
            .iter()
            .map(|&(_, v)| v as i128 * v as i128)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        (self.norm_squared() as f64).sqrt()
    }

    pub fn to_dense(&self) -> Vec<i64> {
        let mut out = vec![0; self.len];
        for &(i, v) in &self.entries {
            out[i] = v;
        }
        out
    }
}

/// Target input vertices for the cover vertices, in `U`/`V` list order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessTargets {
    /// Image of each vertex of `S ∩ U`.
    pub a_s: Vec<usize>,
    /// Image of each vertex of `S ∩ V`.
    pub b_s: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct WitnessConstruction {
    pub n: usize,
    /// Minimum vertex cover, as shape ids.
    pub cover: Vec<usize>,
    /// `(shape id, input vertex)` for each vertex of `S ∩ U`.
    pub a_s: Vec<(usize, usize)>,
    /// `(shape id, input vertex)` for each vertex of `S ∩ V`.
    pub b_s: Vec<(usize, usize)>,
    /// Edges between `U \ S` and `S ∩ V`.
    pub e_l: Vec<(usize, usize)>,
    /// Edges between `S ∩ U` and `S ∩ V`.
    pub e_m: Vec<(usize, usize)>,
    /// Edges between `S ∩ U` and `V \ S`.
    pub e_r: Vec<(usize, usize)>,
    pub u: SparseVector,
    pub v: SparseVector,
}

/// Outcome of evaluating one witness against `R_H`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessOutcome {
    pub n: usize,
    pub t: usize,
    pub q: usize,
    pub value: i128,
    pub u_support: usize,
    pub v_support: usize,
    pub u_norm: f64,
    pub v_norm: f64,
    /// `|uᵀ R_H v| / (‖u‖‖v‖)`, zero when either vector vanishes.
    pub ratio: f64,
    /// `n^{(t−q)/2}`.
    pub scale: f64,
}

/// Spreads the fixed positions of a sorted `k`-tuple across `0..n`, so that
/// the free positions before, between and after them all have room.
fn spread_targets(n: usize, k: usize, positions: &[usize]) -> Vec<usize> {
    positions
        .iter()
        .map(|&p| ((p + 1) * n / (k + 1)).min(n.saturating_sub(1)))
        .collect()
}

/// Default targets: spread placement, then nearest unused vertex on
/// collision (`A_S` first, then `B_S`).
pub fn default_targets(shape: &ShapeGraph, cover: &[usize], n: usize) -> WitnessTargets {
    let su: Vec<usize> = shape
        .u()
        .iter()
        .enumerate()
        .filter(|(_, id)| cover.contains(id))
        .map(|(p, _)| p)
        .collect();
    let sv: Vec<usize> = shape
        .v()
        .iter()
        .enumerate()
        .filter(|(_, id)| cover.contains(id))
        .map(|(p, _)| p)
        .collect();
    let want_a = spread_targets(n, shape.x(), &su);
    let want_b = spread_targets(n, shape.y(), &sv);
    let mut used = vec![false; n];
    let mut take = |want: usize| -> usize {
        for d in 0..n {
            for c in [want.checked_add(d), want.checked_sub(d)]
                .into_iter()
                .flatten()
            {
                if c < n && !used[c] {
                    used[c] = true;
                    return c;
                }
            }
        }
        want
    };
    let a_s = want_a.into_iter().map(&mut take).collect();
    let b_s = want_b.into_iter().map(&mut take).collect();
    WitnessTargets { a_s, b_s }
}

/// Builds the witness vectors `u`, `v` for a bipartite shape on `graph`.
///
/// `cover` defaults to the shape's canonical minimum vertex cover and
/// `targets` to [`default_targets`].
pub fn build_witness_bipartite(
    graph: &InputGraph,
    shape: &ShapeGraph,
    cover: Option<&[usize]>,
    targets: Option<&WitnessTargets>,
) -> Result<WitnessConstruction> {
    let n = graph.n();
    let cover: Vec<usize> = match cover {
        Some(c) => {
            if !shape.is_bipartite_uv() {
                return Err(Error::NotBipartite(
                    "witness needs a bipartite shape".into(),
                ));
            }
            if !shape.covers(c) || c.iter().any(|&id| id >= shape.t()) {
                return Err(Error::InvalidArgument(
                    "given set is not a vertex cover".into(),
                ));
            }
            let mut c = c.to_vec();
            c.sort_unstable();
            c.dedup();
            c
        }
        None => shape.min_vertex_cover()?.cover,
    };
    let defaults;
    let targets = match targets {
        Some(t) => t,
        None => {
            defaults = default_targets(shape, &cover, n);
            &defaults
        }
    };
    let su: Vec<usize> = shape
        .u()
        .iter()
        .copied()
        .filter(|id| cover.contains(id))
        .collect();
    let sv: Vec<usize> = shape
        .v()
        .iter()
        .copied()
        .filter(|id| cover.contains(id))
        .collect();
    if targets.a_s.len() != su.len() || targets.b_s.len() != sv.len() {
        return Err(Error::InvalidArgument(format!(
            "targets have sizes ({}, {}) but S ∩ U, S ∩ V have sizes ({}, {})",
            targets.a_s.len(),
            targets.b_s.len(),
            su.len(),
            sv.len()
        )));
    }
    let all: Vec<usize> = targets.a_s.iter().chain(&targets.b_s).copied().collect();
    if let Some(&bad) = all.iter().find(|&&c| c >= n) {
        return Err(Error::InvalidArgument(format!(
            "target vertex {bad} out of range for n = {n}"
        )));
    }
    for (i, a) in all.iter().enumerate() {
        if all[..i].contains(a) {
            return Err(Error::InvalidArgument(format!(
                "target vertex {a} used twice"
            )));
        }
    }

    let in_s = |id: usize| cover.contains(&id);
    let mut e_l = Vec::new();
    let mut e_m = Vec::new();
    let mut e_r = Vec::new();
    for &(p, q) in shape.edges() {
        let (a, b) = if shape.in_u(p) { (p, q) } else { (q, p) };
        match (in_s(a), in_s(b)) {
            (false, true) => e_l.push((a, b)),
            (true, true) => e_m.push((a, b)),
            (true, false) => e_r.push((a, b)),
            (false, false) => {
                return Err(Error::InvalidArgument(
                    "given set is not a vertex cover".into(),
                ))
            }
        }
    }

    let a_s: Vec<(usize, usize)> = su
        .iter()
        .copied()
        .zip(targets.a_s.iter().copied())
        .collect();
    let b_s: Vec<(usize, usize)> = sv
        .iter()
        .copied()
        .zip(targets.b_s.iter().copied())
        .collect();

    // u_A = χ_{π(E_L)} with π: U → A positionally, S ∩ V → B_S.
    let u = side_vector(graph, shape.u(), &a_s, &b_s, &e_l, |img, id| {
        shape
            .u_position(id)
            .map(|p| img[p])
            .or_else(|| b_s.iter().find(|&&(s, _)| s == id).map(|&(_, c)| c))
    })?;
    // v_B = χ_{π(E_R)} with π: V → B positionally, S ∩ U → A_S.
    let v = side_vector(graph, shape.v(), &b_s, &a_s, &e_r, |img, id| {
        shape
            .v_position(id)
            .map(|p| img[p])
            .or_else(|| a_s.iter().find(|&&(s, _)| s == id).map(|&(_, c)| c))
    })?;

    Ok(WitnessConstruction {
        n,
        cover,
        a_s,
        b_s,
        e_l,
        e_m,
        e_r,
        u,
        v,
    })
}

/// Enumerates the sorted tuples on one side whose cover positions hit the
/// fixed targets and which avoid the other side's targets.
fn side_vector(
    graph: &InputGraph,
    side: &[usize],
    fixed: &[(usize, usize)],
    avoid: &[(usize, usize)],
    edges: &[(usize, usize)],
    image: impl Fn(&[usize], usize) -> Option<usize>,
) -> Result<SparseVector> {
    let n = graph.n();
    let k = side.len();
    let scheme = IndexScheme::new(n, k)?;
    let blocked: Vec<usize> = fixed.iter().chain(avoid).map(|&(_, c)| c).collect();
    let pool: Vec<usize> = (0..n).filter(|c| !blocked.contains(c)).collect();
    let free = k - fixed.len();
    let mut entries = Vec::new();
    if pool.len() < free {
        return Ok(SparseVector::zeros(scheme.len()));
    }
    let fixed_pos: Vec<(usize, usize)> = fixed
        .iter()
        .map(|&(id, c)| {
            (
                side.iter()
                    .position(|&s| s == id)
                    .expect("fixed vertex lies on this side"),
                c,
            )
        })
        .collect();
    let mut pick: Vec<usize> = (0..free).collect();
    let mut tuple = vec![0usize; k];
    loop {
        let mut fi = 0;
        let mut ok = true;
        for (pos, slot) in tuple.iter_mut().enumerate() {
            if let Some(&(_, c)) = fixed_pos.iter().find(|&&(p, _)| p == pos) {
                *slot = c;
            } else {
                *slot = pool[pick[fi]];
                fi += 1;
            }
        }
        if tuple.windows(2).any(|w| w[0] >= w[1]) {
            ok = false;
        }
        if ok {
            let mut mapped = Vec::with_capacity(edges.len());
            for &(p, q) in edges {
                let a = image(&tuple, p).expect("edge endpoint has an image");
                let b = image(&tuple, q).expect("edge endpoint has an image");
                mapped.push((a, b));
            }
            entries.push((scheme.rank(&tuple), graph.chi(&mapped)?));
        }
        if !next_colex(&mut pick, pool.len()) {
            break;
        }
    }
    entries.sort_unstable();
    Ok(SparseVector {
        len: scheme.len(),
        entries,
    })
}

/// Exact `uᵀ M v`.
pub fn rayleigh<M: IntegerMatrix + ?Sized>(
    u: &SparseVector,
    m: &M,
    v: &SparseVector,
) -> Result<i128> {
    if u.len != m.nrows() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            got: u.len,
        });
    }
    if v.len != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.ncols(),
            got: v.len,
        });
    }
    let mut acc: i128 = 0;
    for &(i, ui) in &u.entries {
        for &(j, vj) in &v.entries {
            let term = (ui as i128) * (m.entry_at(i, j) as i128) * (vj as i128);
            acc = acc
                .checked_add(term)
                .ok_or_else(|| Error::Overflow("uᵀMv".into()))?;
        }
    }
    Ok(acc)
}

/// Evaluates the witness against `R_H` over `graph`.
pub fn evaluate_witness(
    graph: &InputGraph,
    shape: &ShapeGraph,
    w: &WitnessConstruction,
) -> Result<WitnessOutcome> {
    let m = GraphMatrix::new(shape, graph)?;
    let value = m.bilinear_sparse(&w.u.entries, &w.v.entries)?;
    let (un, vn) = (w.u.norm(), w.v.norm());
    let ratio = if un == 0.0 || vn == 0.0 {
        0.0
    } else {
        (value as f64).abs() / (un * vn)
    };
    let t = shape.t();
    let q = w.cover.len();
    Ok(WitnessOutcome {
        n: graph.n(),
        t,
        q,
        value,
        u_support: w.u.support(),
        v_support: w.v.support(),
        u_norm: un,
        v_norm: vn,
        ratio,
        scale: (graph.n() as f64).powf((t - q) as f64 / 2.0),
    })
}

/// Builds the default witness and evaluates it.
pub fn witness_ratio(graph: &InputGraph, shape: &ShapeGraph) -> Result<WitnessOutcome> {
    let w = build_witness_bipartite(graph, shape, None, None)?;
    evaluate_witness(graph, shape, &w)
}

/// `⟨M₁, M₂⟩ = Σ_{i,j} M₁(i,j) M₂(i,j)`.
pub fn matrix_inner_product<A, B>(m1: &A, m2: &B) -> Result<i128>
where
    A: IntegerMatrix + ?Sized,
    B: IntegerMatrix + ?Sized,
{
    if m1.nrows() != m2.nrows() || m1.ncols() != m2.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m1.nrows() * m1.ncols(),
            got: m2.nrows() * m2.ncols(),
        });
    }
    let mut acc: i128 = 0;
    for i in 0..m1.nrows() {
        for j in 0..m1.ncols() {
            let a = m1.entry_at(i, j) as i128;
            if a != 0 {
                acc = acc
                    .checked_add(a * m2.entry_at(i, j) as i128)
                    .ok_or_else(|| Error::Overflow("inner product".into()))?;
            }
        }
    }
    Ok(acc)
}

/// `f_{H′}(G) = Σ_{A,B} R_{H′}(A, B)`, refusing more than `cap` entries.
pub fn f_sum(graph: &InputGraph, shape: &ShapeGraph, cap: u128) -> Result<i128> {
    let m = GraphMatrix::new(shape, graph)?;
    cap_check("entries to sum", m.entry_count(), cap)?;
    m.entry_sum()
}

/// Left/right split of a shape along a separator.
#[derive(Debug, Clone)]
pub struct DecompositionPieces {
    pub separator: Vec<usize>,
    /// Vertices reachable from `U` once `S` is removed.
    pub left: Vec<usize>,
    /// Everything else outside `S`: vertices reachable from `V`, plus any
    /// vertex that reaches `U ∪ V` only through `S`.
    pub right: Vec<usize>,
    /// `U = U(H)`, `V = ∅`, vertices `L ∪ S`, edges incident to `L`.
    pub h_left: ShapeGraph,
    /// `U = ∅`, `V = V(H)`, vertices `R ∪ S`, remaining edges.
    pub h_right: ShapeGraph,
    /// Shape id in `H` of each `H_L` vertex.
    pub left_ids: Vec<usize>,
    /// Shape id in `H` of each `H_R` vertex.
    pub right_ids: Vec<usize>,
    pub l: usize,
    pub q: usize,
    pub r_count: usize,
}

fn reach(shape: &ShapeGraph, from: &[usize], removed: &[bool]) -> Vec<bool> {
    let mut seen = vec![false; shape.t()];
    let mut queue = VecDeque::new();
    for &s in from {
        if !removed[s] && !seen[s] {
            seen[s] = true;
            queue.push_back(s);
        }
    }
    while let Some(a) = queue.pop_front() {
        for &b in shape.neighbors(a) {
            if !removed[b] && !seen[b] {
                seen[b] = true;
                queue.push_back(b);
            }
        }
    }
    seen
}

/// Splits `H` along the separator `S` into `H_L` and `H_R`.
pub fn decompose_shape(shape: &ShapeGraph, separator: &[usize]) -> Result<DecompositionPieces> {
    if shape.r() > 0 {
        return Err(Error::Unsupported(
            "decomposition needs U and V disjoint".into(),
        ));
    }
    if separator.iter().any(|&s| s >= shape.t()) || !shape.separates(separator) {
        return Err(Error::NotASeparator(format!(
            "{:?}",
            shape.names_of(separator)
        )));
    }
    if !shape.middle_vertices_reach_boundary() {
        return Err(Error::HypothesisViolated(
            "a middle vertex has no path to U or V".into(),
        ));
    }
    let t = shape.t();
    let mut s: Vec<usize> = separator.to_vec();
    s.sort_unstable();
    s.dedup();
    let mut removed = vec![false; t];
    for &id in &s {
        removed[id] = true;
    }
    let from_u = reach(shape, shape.u(), &removed);
    let left: Vec<usize> = (0..t).filter(|&id| from_u[id]).collect();
    let right: Vec<usize> = (0..t).filter(|&id| !from_u[id] && !removed[id]).collect();
    let in_left = |id: usize| from_u[id];

    let names =
        |ids: &[usize]| -> Vec<String> { ids.iter().map(|&i| shape.name(i).to_string()).collect() };
    let options = ShapeOptions {
        allow_isolated_middle: true,
        ..ShapeOptions::default()
    };

    // H_L: U(H) first, then the rest of L ∪ S as middle vertices.
    let mut left_ids: Vec<usize> = shape.u().to_vec();
    left_ids.extend(left.iter().chain(&s).copied().filter(|id| !shape.in_u(*id)));
    let left_edges: Vec<(String, String)> = shape
        .edges()
        .iter()
        .filter(|&&(a, b)| in_left(a) || in_left(b))
        .map(|&(a, b)| (shape.name(a).to_string(), shape.name(b).to_string()))
        .collect();
    let h_left = ShapeGraph::from_document(
        &ShapeDocument {
            u: names(shape.u()),
            v: vec![],
            w: names(&left_ids[shape.x()..]),
            edges: left_edges,
            intersection_mode: false,
        },
        &options,
    )?;

    // H_R: V(H) first, then the rest of R ∪ S as middle vertices.
    let mut right_ids: Vec<usize> = shape.v().to_vec();
    right_ids.extend(
        right
            .iter()
            .chain(&s)
            .copied()
            .filter(|id| !shape.in_v(*id)),
    );
    let right_edges: Vec<(String, String)> = shape
        .edges()
        .iter()
        .filter(|&&(a, b)| !(in_left(a) || in_left(b)))
        .map(|&(a, b)| (shape.name(a).to_string(), shape.name(b).to_string()))
        .collect();
    let h_right = ShapeGraph::from_document(
        &ShapeDocument {
            u: vec![],
            v: names(shape.v()),
            w: names(&right_ids[shape.y()..]),
            edges: right_edges,
            intersection_mode: false,
        },
        &options,
    )?;

    Ok(DecompositionPieces {
        l: left.len(),
        q: s.len(),
        r_count: right.len(),
        separator: s,
        left,
        right,
        h_left,
        h_right,
        left_ids,
        right_ids,
    })
}

/// Rebuilds `R_{H,P}` as `Σ u_p v_pᵀ` over all placements `p` of the
/// separator vertices inside their cells, where `u_p` comes from `H_L` and
/// `v_p` from `H_R`. Returns `(direct, reconstructed)`.
pub fn factored_reconstruction(
    graph: &InputGraph,
    shape: &ShapeGraph,
    pieces: &DecompositionPieces,
    partition: &Partition,
    cap: u128,
) -> Result<(DenseMatrix, DenseMatrix)> {
    let n = graph.n();
    let direct = GraphMatrix::partitioned(shape, graph, partition.clone())?.to_dense(cap)?;
    let (rows, cols) = (direct.rows(), direct.cols());
    let mut acc = DenseMatrix::zeros(rows, cols);

    let cells: Vec<Vec<usize>> = pieces
        .separator
        .iter()
        .map(|&s| partition.cell(s))
        .collect();
    let placements: u128 = cells.iter().map(|c| c.len() as u128).product();
    cap_check("separator placements", placements, cap)?;
    if cells.iter().any(|c| c.is_empty()) {
        return Ok((direct, acc));
    }

    let side_labels = |ids: &[usize], place: &[usize]| -> Result<Partition> {
        let junk = ids.len();
        let labels = (0..n)
            .map(|c| {
                let h = partition.label(c);
                match ids.iter().position(|&id| id == h) {
                    Some(local) => match pieces.separator.iter().position(|&s| s == h) {
                        Some(k) if place[k] != c => junk,
                        _ => local,
                    },
                    None => junk,
                }
            })
            .collect();
        Partition::new(labels, junk + 1)
    };

    let mut idx = vec![0usize; cells.len()];
    loop {
        let place: Vec<usize> = idx.iter().zip(&cells).map(|(&i, c)| c[i]).collect();
        let pl = side_labels(&pieces.left_ids, &place)?;
        let pr = side_labels(&pieces.right_ids, &place)?;
        let u = GraphMatrix::partitioned(&pieces.h_left, graph, pl)?.to_dense(cap)?;
        let v = GraphMatrix::partitioned(&pieces.h_right, graph, pr)?.to_dense(cap)?;
        for i in 0..rows {
            let ui = u.get(i, 0);
            if ui == 0 {
                continue;
            }
            for j in 0..cols {
                let vj = v.get(0, j);
                if vj != 0 {
                    let cur = acc.get(i, j);
                    let next = ui
                        .checked_mul(vj)
                        .and_then(|p| cur.checked_add(p))
                        .ok_or_else(|| Error::Overflow("factored reconstruction".into()))?;
                    acc.set(i, j, next);
                }
            }
        }
        // Odometer over placements.
        let mut k = 0;
        while k < idx.len() {
            idx[k] += 1;
            if idx[k] < cells[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == idx.len() {
            break;
        }
    }
    Ok((direct, acc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::gmatrix::binomial;
    use crate::spectral::frobenius_norm;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_edge_witness_gives_n_minus_one() {
        let h = catalog::single_edge();
        for seed in 0..5 {
            let g = InputGraph::sample(10, seed).unwrap();
            let w = build_witness_bipartite(&g, &h, None, None).unwrap();
            assert_eq!(w.cover.len(), 1);
            let out = evaluate_witness(&g, &h, &w).unwrap();
            assert_eq!(out.value, 9);
            let m = GraphMatrix::new(&h, &g).unwrap().to_dense(1 << 20).unwrap();
            assert_eq!(rayleigh(&w.u, &m, &w.v).unwrap(), 9);
        }
    }

    #[test]
    fn single_edge_with_v_cover() {
        let h = catalog::single_edge();
        let g = InputGraph::sample(12, 3).unwrap();
        let v1 = h.id_of("v1").unwrap();
        let targets = WitnessTargets {
            a_s: vec![],
            b_s: vec![4],
        };
        let w = build_witness_bipartite(&g, &h, Some(&[v1]), Some(&targets)).unwrap();
        assert_eq!(w.v.support(), 1);
        assert_eq!(w.v.norm(), 1.0);
        assert_eq!(w.u.support(), 11);
        assert_eq!(evaluate_witness(&g, &h, &w).unwrap().value, 11);
    }

    #[test]
    fn two_cover_supports_are_exact() {
        let h = catalog::two_cover_bipartite();
        for n in 6..=10 {
            let g = InputGraph::sample(n, n as u64).unwrap();
            let w = build_witness_bipartite(&g, &h, None, None).unwrap();
            assert_eq!(
                w.cover,
                vec![h.id_of("u1").unwrap(), h.id_of("u2").unwrap()]
            );
            assert_eq!(w.u.support(), 1);
            assert_eq!(w.v.support() as u128, binomial(n as u64 - 2, 3).unwrap());
            let out = evaluate_witness(&g, &h, &w).unwrap();
            assert_eq!(out.value.unsigned_abs(), binomial(n as u64 - 2, 3).unwrap());
            let m = GraphMatrix::new(&h, &g).unwrap().to_dense(1 << 22).unwrap();
            assert_eq!(rayleigh(&w.u, &m, &w.v).unwrap(), out.value);
        }
    }

    #[test]
    fn edge_classes_partition_the_edges() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let h = catalog::random_bipartite(&mut rng, 4);
            let g = InputGraph::sample(9, rng.random()).unwrap();
            let w = build_witness_bipartite(&g, &h, None, None).unwrap();
            let mut all: Vec<_> = w
                .e_l
                .iter()
                .chain(&w.e_m)
                .chain(&w.e_r)
                .map(|&(a, b)| (a.min(b), a.max(b)))
                .collect();
            all.sort_unstable();
            assert_eq!(all, h.edges());
            // Brute-force check of uᵀRv against the explicit matrix.
            let m = GraphMatrix::new(&h, &g).unwrap().to_dense(1 << 24).unwrap();
            let direct = rayleigh(&w.u, &m, &w.v).unwrap();
            assert_eq!(direct, evaluate_witness(&g, &h, &w).unwrap().value);
        }
    }

    #[test]
    fn target_validation() {
        let h = catalog::single_edge();
        let g = InputGraph::sample(5, 0).unwrap();
        let u1 = h.id_of("u1").unwrap();
        let bad_size = WitnessTargets {
            a_s: vec![],
            b_s: vec![1],
        };
        assert!(build_witness_bipartite(&g, &h, Some(&[u1]), Some(&bad_size)).is_err());
        let out_of_range = WitnessTargets {
            a_s: vec![7],
            b_s: vec![],
        };
        assert!(build_witness_bipartite(&g, &h, Some(&[u1]), Some(&out_of_range)).is_err());
        let both = [u1, h.id_of("v1").unwrap()];
        let clash = WitnessTargets {
            a_s: vec![2],
            b_s: vec![2],
        };
        assert!(build_witness_bipartite(&g, &h, Some(&both), Some(&clash)).is_err());
        assert!(matches!(
            build_witness_bipartite(&g, &catalog::middle_path(), None, None),
            Err(Error::NotBipartite(_))
        ));
    }

    #[test]
    fn rayleigh_zero_and_mismatch() {
        let m = DenseMatrix::from_fn(3, 4, |i, j| (i * 4 + j) as i64);
        assert_eq!(
            rayleigh(&SparseVector::zeros(3), &m, &SparseVector::zeros(4)).unwrap(),
            0
        );
        assert!(rayleigh(&SparseVector::zeros(4), &m, &SparseVector::zeros(4)).is_err());
    }

    #[test]
    fn inner_product_is_frobenius_squared() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let (r, c) = (rng.random_range(1..8), rng.random_range(1..8));
            let m = DenseMatrix::from_fn(r, c, |_, _| rng.random_range(-5..=5));
            let ip = matrix_inner_product(&m, &m).unwrap();
            let fr = frobenius_norm(&m);
            assert!(((ip as f64).sqrt() - fr).abs() < 1e-9);
            assert_eq!(
                matrix_inner_product(&m, &DenseMatrix::zeros(r, c)).unwrap(),
                0
            );
        }
        assert!(
            matrix_inner_product(&DenseMatrix::zeros(2, 3), &DenseMatrix::zeros(3, 2)).is_err()
        );
    }

    #[test]
    fn inner_product_of_two_shapes_matches_entrywise_sum() {
        let g = InputGraph::sample(8, 4).unwrap();
        let h1 = catalog::single_edge();
        let h2 = catalog::middle_path();
        let m1 = GraphMatrix::new(&h1, &g).unwrap();
        let m2 = GraphMatrix::new(&h2, &g).unwrap();
        let (d1, d2) = (m1.to_dense(1 << 20).unwrap(), m2.to_dense(1 << 20).unwrap());
        let mut brute = 0i128;
        for i in 0..d1.rows() {
            for j in 0..d1.cols() {
                brute += d1.get(i, j) as i128 * d2.get(i, j) as i128;
            }
        }
        assert_eq!(matrix_inner_product(&m1, &m2).unwrap(), brute);
        assert_eq!(d1.inner_product(&d2).unwrap(), brute);
    }

    #[test]
    fn f_sum_examples() {
        let iso = ShapeGraph::new(&["u1", "u2"], &["v1"], &[], &[]).unwrap();
        let g = InputGraph::sample(7, 1).unwrap();
        // Compatible pairs: 2-subsets times vertices outside them.
        assert_eq!(f_sum(&g, &iso, 1 << 20).unwrap(), 21 * 5);
        let edge_sum: i128 = (0..7)
            .flat_map(|a| (0..7).map(move |b| (a, b)))
            .filter(|(a, b)| a != b)
            .map(|(a, b)| g.sign(a, b) as i128)
            .sum();
        assert_eq!(
            f_sum(&g, &catalog::single_edge(), 1 << 20).unwrap(),
            edge_sum
        );
        assert!(f_sum(&g, &catalog::single_edge(), 10).is_err());
    }

    #[test]
    fn path_decomposition() {
        let h = catalog::middle_path();
        let w1 = h.id_of("w1").unwrap();
        let d = decompose_shape(&h, &[w1]).unwrap();
        assert_eq!((d.l, d.q, d.r_count), (1, 1, 1));
        assert_eq!(d.h_left.edges().len(), 1);
        assert_eq!(d.h_right.edges().len(), 1);
        assert_eq!(
            d.h_left
                .names_of(&[d.h_left.edges()[0].0, d.h_left.edges()[0].1]),
            vec!["u1", "w1"]
        );
        assert_eq!(
            d.h_right
                .names_of(&[d.h_right.edges()[0].0, d.h_right.edges()[0].1]),
            vec!["v1", "w1"]
        );
        assert!(matches!(
            decompose_shape(&h, &[]),
            Err(Error::NotASeparator(_))
        ));
    }

    #[test]
    fn cover_inside_u_puts_every_edge_right() {
        let h = catalog::two_cover_bipartite();
        let s = h.ids_of(&["u1", "u2"]).unwrap();
        let d = decompose_shape(&h, &s).unwrap();
        assert_eq!(d.l, 0);
        assert!(d.h_left.edges().is_empty());
        assert_eq!(d.h_right.edges().len(), h.edges().len());
        assert_eq!(d.l + d.q + d.r_count, h.t());
    }

    fn check_reconstruction(h: &ShapeGraph, sep: &[&str], n: usize, seed: u64) {
        let s = h.ids_of(sep).unwrap();
        let d = decompose_shape(h, &s).unwrap();
        assert_eq!(d.l + d.q + d.r_count, h.t());
        let g = InputGraph::sample(n, seed).unwrap();
        let labels = (0..n).map(|v| v % h.t()).collect();
        let p = Partition::new(labels, h.t()).unwrap();
        let (direct, rebuilt) = factored_reconstruction(&g, h, &d, &p, 1 << 24).unwrap();
        assert!(!direct.is_zero());
        assert_eq!(direct, rebuilt);
        let p = Partition::uniform(n, h.t(), seed).unwrap();
        let (direct, rebuilt) = factored_reconstruction(&g, h, &d, &p, 1 << 24).unwrap();
        assert_eq!(direct, rebuilt);
    }

    #[test]
    fn factored_reconstruction_matches() {
        check_reconstruction(&catalog::middle_path(), &["w1"], 7, 1);
        check_reconstruction(&catalog::separator_example(), &["u1", "w2"], 8, 2);
        check_reconstruction(&catalog::separator_example(), &["u1", "w2"], 13, 3);
        check_reconstruction(&catalog::separator_example(), &["v1", "w2"], 12, 4);
        check_reconstruction(&catalog::seven_vertex(), &["u2", "w1"], 11, 5);
        check_reconstruction(&catalog::two_cover_bipartite(), &["u1", "u2"], 10, 6);
    }
}
