//! Graph matrices `R_H` and their partitioned restrictions.
//!
//! Rows are indexed by increasing `x`-subsets `A` of the input vertices and
//! columns by increasing `y`-subsets `B`, both in colex rank order. The entry
//! `R_H(A, B)` sums `χ_{H,A,B,C}` over ordered tuples `C` of distinct
//! vertices outside `A ∪ B`, where `u_i ↦ a_i`, `v_j ↦ b_j`, `w_k ↦ c_k`.
//! A pair `(A, B)` is compatible iff `a_i = b_j` exactly when `u_i = v_j`;
//! incompatible pairs give 0.
//!
//! In partitioned mode shape vertex `h` (internal id) may only map into cell
//! `h` of the partition.

mod index;
mod partition;

pub use index::{binomial, next_colex, IndexScheme, SubsetIter};
pub use partition::{all_partitions, AllPartitions, Partition};

use rayon::prelude::*;

use crate::error::{cap_check, Error, Result};
use crate::linalg::{check_len, DenseMatrix, IntegerMatrix, LinearOperator, RealMatrix};
use crate::rgraph::InputGraph;
use crate::shape::ShapeGraph;

/// Default limit on the number of entries of a materialized matrix.
pub const DEFAULT_CAP_ENTRIES: u128 = 10_000_000;

const MAX_EVAL_VERTICES: usize = 32;

/// `R_H` (or `R_{H,V_1..V_t}`) over a fixed input graph, evaluated on demand.
#[derive(Debug, Clone)]
pub struct GraphMatrix<'g> {
    shape: ShapeGraph,
    graph: &'g InputGraph,
    partition: Option<Partition>,
    rows: IndexScheme,
    cols: IndexScheme,
    // Edges with both endpoints in U ∪ V.
    fixed_edges: Vec<(usize, usize)>,
    // For the k-th middle vertex: its neighbours among U ∪ V ∪ {w_0..w_{k−1}}.
    w_back: Vec<Vec<usize>>,
    // Candidate vertices for each middle vertex, in ascending order.
    w_candidates: Vec<Vec<usize>>,
    // Bitset of vertices the last middle vertex may use.
    last_mask: Vec<u64>,
}

/// Per-entry working storage.
struct Scratch {
    img: [usize; MAX_EVAL_VERTICES],
    used: Vec<u64>,
    parity: Vec<u64>,
}

/// `R_{H,V_1..V_t}` for the given partition.
pub fn build_partitioned<'g>(
    shape: &ShapeGraph,
    graph: &'g InputGraph,
    partition: Partition,
) -> Result<GraphMatrix<'g>> {
    GraphMatrix::partitioned(shape, graph, partition)
}

impl<'g> GraphMatrix<'g> {
    pub fn new(shape: &ShapeGraph, graph: &'g InputGraph) -> Result<Self> {
        Self::build(shape, graph, None)
    }

    pub fn partitioned(
        shape: &ShapeGraph,
        graph: &'g InputGraph,
        partition: Partition,
    ) -> Result<Self> {
        if partition.n() != graph.n() {
            return Err(Error::InvalidArgument(format!(
                "partition labels {} vertices but the graph has {}",
                partition.n(),
                graph.n()
            )));
        }
        if partition.parts() < shape.t() {
            return Err(Error::InvalidArgument(format!(
                "partition has {} parts but the shape has {} vertices",
                partition.parts(),
                shape.t()
            )));
        }
        Self::build(shape, graph, Some(partition))
    }

    fn build(
        shape: &ShapeGraph,
        graph: &'g InputGraph,
        partition: Option<Partition>,
    ) -> Result<Self> {
        let n = graph.n();
        if shape.t() > MAX_EVAL_VERTICES {
            return Err(Error::CapExceeded {
                what: "shape vertices for matrix evaluation".into(),
                size: shape.t() as u128,
                cap: MAX_EVAL_VERTICES as u128,
            });
        }
        let z = shape.z() as u32;
        let terms = (n as u128)
            .checked_pow(z)
            .filter(|&v| v <= i64::MAX as u128);
        if terms.is_none() {
            return Err(Error::Overflow(format!(
                "n^z = {n}^{z} middle-vertex tuples exceed 64-bit entry range"
            )));
        }

        let rows = IndexScheme::new(n, shape.x())?;
        let cols = IndexScheme::new(n, shape.y())?;
        let boundary = |id: usize| !shape.in_w(id);
        let fixed_edges = shape
            .edges()
            .iter()
            .copied()
            .filter(|&(a, b)| boundary(a) && boundary(b))
            .collect();
        let w = shape.w();
        let w_back = w
            .iter()
            .enumerate()
            .map(|(k, &id)| {
                shape
                    .neighbors(id)
                    .iter()
                    .copied()
                    .filter(|&nb| boundary(nb) || w[..k].contains(&nb))
                    .collect()
            })
            .collect();
        let w_candidates = w
            .iter()
            .map(|&id| match &partition {
                Some(p) => p.cell(id),
                None => (0..n).collect(),
            })
            .collect();
        let words = graph.words_per_row();
        let last_mask = match (&partition, w.last()) {
            (Some(p), Some(&id)) => p.mask(id).to_vec(),
            _ => {
                let mut m = vec![0u64; words];
                for v in 0..n {
                    m[v / 64] |= 1 << (v % 64);
                }
                m
            }
        };
        Ok(GraphMatrix {
            shape: shape.clone(),
            graph,
            partition,
            rows,
            cols,
            fixed_edges,
            w_back,
            w_candidates,
            last_mask,
        })
    }

    pub fn shape(&self) -> &ShapeGraph {
        &self.shape
    }
    pub fn graph(&self) -> &'g InputGraph {
        self.graph
    }
    pub fn partition(&self) -> Option<&Partition> {
        self.partition.as_ref()
    }
    pub fn row_scheme(&self) -> &IndexScheme {
        &self.rows
    }
    pub fn col_scheme(&self) -> &IndexScheme {
        &self.cols
    }
    /// `(C(n, x), C(n, y))`.
    pub fn dims(&self) -> (usize, usize) {
        (self.rows.len(), self.cols.len())
    }
    pub fn entry_count(&self) -> u128 {
        self.rows.len() as u128 * self.cols.len() as u128
    }

    fn scratch(&self) -> Scratch {
        Scratch {
            img: [0; MAX_EVAL_VERTICES],
            used: vec![0; self.graph.words_per_row()],
            parity: vec![0; self.graph.words_per_row()],
        }
    }

    /// `R(A, B)` for increasing subsets `A`, `B`.
    pub fn entry(&self, a: &[usize], b: &[usize]) -> Result<i64> {
        self.rows.validate(a)?;
        self.cols.validate(b)?;
        Ok(self.eval(a, b, &mut self.scratch()))
    }

    /// Entry by row and column rank.
    pub fn entry_by_rank(&self, i: usize, j: usize) -> i64 {
        let a = self.rows.unrank(i);
        let b = self.cols.unrank(j);
        self.eval(&a, &b, &mut self.scratch())
    }

    fn eval(&self, a: &[usize], b: &[usize], s: &mut Scratch) -> i64 {
        let shape = &self.shape;
        let x = shape.x();
        s.img[..x].copy_from_slice(a);
        for (j, &vid) in shape.v().iter().enumerate() {
            if vid < x {
                if b[j] != a[vid] {
                    return 0;
                }
            } else {
                if a.contains(&b[j]) {
                    return 0;
                }
                s.img[vid] = b[j];
            }
        }
        if let Some(p) = &self.partition {
            let boundary = x + shape.y() - shape.r();
            if (0..boundary).any(|h| p.label(s.img[h]) != h) {
                return 0;
            }
        }
        let g = self.graph;
        let mut sign = 1;
        for &(p, q) in &self.fixed_edges {
            sign *= g.sign(s.img[p], s.img[q]);
        }
        if shape.z() == 0 {
            return sign;
        }
        for &v in a.iter().chain(b) {
            s.used[v / 64] |= 1 << (v % 64);
        }
        let total = self.sum_middle(0, sign, s);
        for &v in a.iter().chain(b) {
            s.used[v / 64] &= !(1 << (v % 64));
        }
        total
    }

    fn sum_middle(&self, k: usize, sign: i64, s: &mut Scratch) -> i64 {
        let w = self.shape.w();
        let g = self.graph;
        if k + 1 == w.len() {
            // Closed form for the last middle vertex: bit c of `parity` is the
            // parity of its neighbours' images adjacent to c.
            let back = &self.w_back[k];
            s.parity.iter_mut().for_each(|p| *p = 0);
            for &nb in back {
                for (p, r) in s.parity.iter_mut().zip(g.row(s.img[nb])) {
                    *p ^= r;
                }
            }
            let even = back.len() % 2 == 0;
            let mut allowed_count = 0i64;
            let mut positive = 0i64;
            for ((&m, &u), &p) in self.last_mask.iter().zip(&s.used).zip(&s.parity) {
                let allowed = m & !u;
                let plus = if even { !p } else { p };
                allowed_count += allowed.count_ones() as i64;
                positive += (allowed & plus).count_ones() as i64;
            }
            return sign * (2 * positive - allowed_count);
        }
        let id = w[k];
        let mut total = 0;
        for &c in &self.w_candidates[k] {
            if (s.used[c / 64] >> (c % 64)) & 1 == 1 {
                continue;
            }
            let mut sc = sign;
            for &nb in &self.w_back[k] {
                sc *= g.sign(c, s.img[nb]);
            }
            s.img[id] = c;
            s.used[c / 64] |= 1 << (c % 64);
            total += self.sum_middle(k + 1, sc, s);
            s.used[c / 64] &= !(1 << (c % 64));
        }
        total
    }

    /// Computes `f(j, entry)` for every column of row `i` in rank order.
    fn for_row(&self, i: usize, s: &mut Scratch, mut f: impl FnMut(usize, i64)) {
        let a = self.rows.unrank(i);
        self.for_cols(&a, 0, self.cols.len(), s, &mut f);
    }

    fn for_cols(
        &self,
        a: &[usize],
        start: usize,
        end: usize,
        s: &mut Scratch,
        f: &mut impl FnMut(usize, i64),
    ) {
        if start >= end {
            return;
        }
        let n = self.graph.n();
        let mut b = self.cols.unrank(start);
        for j in start..end {
            f(j, self.eval(a, &b, s));
            if j + 1 < end {
                next_colex(&mut b, n);
            }
        }
    }

    /// Materializes the matrix, refusing if it has more than `cap` entries.
    pub fn to_dense(&self, cap: u128) -> Result<DenseMatrix> {
        cap_check("explicit matrix entries", self.entry_count(), cap)?;
        let (rows, cols) = self.dims();
        let data: Vec<Vec<i64>> = (0..rows)
            .into_par_iter()
            .map_init(
                || self.scratch(),
                |s, i| {
                    let mut row = Vec::with_capacity(cols);
                    self.for_row(i, s, |_, e| row.push(e));
                    row
                },
            )
            .collect();
        DenseMatrix::from_vec(rows, cols, data.concat())
    }

    /// Materializes as `f64`, refusing if it has more than `cap` entries.
    pub fn to_real(&self, cap: u128) -> Result<RealMatrix> {
        Ok(self.to_dense(cap)?.to_real())
    }

    /// Exact product with an integer vector, streamed without materializing.
    pub fn matvec_exact(&self, w: &[i64]) -> Result<Vec<i128>> {
        check_len(self.cols.len(), w.len())?;
        (0..self.rows.len())
            .into_par_iter()
            .map_init(
                || self.scratch(),
                |s, i| {
                    let mut acc: Option<i128> = Some(0);
                    self.for_row(i, s, |j, e| {
                        if e != 0 && w[j] != 0 {
                            acc = acc.and_then(|a| a.checked_add(e as i128 * w[j] as i128));
                        }
                    });
                    acc.ok_or_else(|| Error::Overflow("graph matrix product".into()))
                },
            )
            .collect()
    }

    /// Exact `uᵀ R v` for sparse `u`, `v` given as `(rank, value)` pairs.
    pub fn bilinear_sparse(&self, u: &[(usize, i64)], v: &[(usize, i64)]) -> Result<i128> {
        let rows = self.rows.len();
        let cols = self.cols.len();
        if let Some(&(i, _)) = u.iter().find(|&&(i, _)| i >= rows) {
            return Err(Error::DimensionMismatch {
                expected: rows,
                got: i + 1,
            });
        }
        if let Some(&(j, _)) = v.iter().find(|&&(j, _)| j >= cols) {
            return Err(Error::DimensionMismatch {
                expected: cols,
                got: j + 1,
            });
        }
        let left: Vec<(Vec<usize>, i64)> = u
            .iter()
            .filter(|&&(_, val)| val != 0)
            .map(|&(i, val)| (self.rows.unrank(i), val))
            .collect();
        let partial: Vec<Option<i128>> = v
            .par_iter()
            .map_init(
                || (self.scratch(), vec![0usize; self.cols.k()]),
                |(s, b), &(j, vj)| {
                    if vj == 0 {
                        return Some(0);
                    }
                    self.cols.unrank_into(j, b);
                    let mut acc: i128 = 0;
                    for (a, ui) in &left {
                        let e = self.eval(a, b, s) as i128;
                        acc =
                            acc.checked_add(e.checked_mul(*ui as i128)?.checked_mul(vj as i128)?)?;
                    }
                    Some(acc)
                },
            )
            .collect();
        partial
            .into_iter()
            .try_fold(0i128, |acc, p| acc.checked_add(p?))
            .ok_or_else(|| Error::Overflow("sparse bilinear form".into()))
    }

    /// Sum of all entries.
    pub fn entry_sum(&self) -> Result<i128> {
        let ones = vec![1i64; self.cols.len()];
        let row_sums = self.matvec_exact(&ones)?;
        row_sums
            .into_iter()
            .try_fold(0i128, |acc, v| acc.checked_add(v))
            .ok_or_else(|| Error::Overflow("entry sum".into()))
    }
}

impl IntegerMatrix for GraphMatrix<'_> {
    fn nrows(&self) -> usize {
        self.rows.len()
    }
    fn ncols(&self) -> usize {
        self.cols.len()
    }
    fn entry_at(&self, i: usize, j: usize) -> i64 {
        self.entry_by_rank(i, j)
    }
}

impl LinearOperator for GraphMatrix<'_> {
    fn nrows(&self) -> usize {
        self.rows.len()
    }
    fn ncols(&self) -> usize {
        self.cols.len()
    }

    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.cols.len(), x.len())?;
        Ok((0..self.rows.len())
            .into_par_iter()
            .map_init(
                || self.scratch(),
                |s, i| {
                    let mut acc = 0.0;
                    self.for_row(i, s, |j, e| {
                        if e != 0 {
                            acc += e as f64 * x[j];
                        }
                    });
                    acc
                },
            )
            .collect())
    }

    fn apply_transpose(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_len(self.rows.len(), y.len())?;
        let cols = self.cols.len();
        let blocks = (rayon::current_num_threads() * 4).clamp(1, cols.max(1));
        let width = cols.div_ceil(blocks).max(1);
        let parts: Vec<Vec<f64>> = (0..cols.div_ceil(width))
            .into_par_iter()
            .map(|blk| {
                let start = blk * width;
                let end = (start + width).min(cols);
                let mut out = vec![0.0; end - start];
                let mut s = self.scratch();
                let mut a = vec![0; self.rows.k()];
                for (i, &yi) in y.iter().enumerate() {
                    self.rows.unrank_into(i, &mut a);
                    self.for_cols(&a, start, end, &mut s, &mut |j, e| {
                        if e != 0 {
                            out[j - start] += e as f64 * yi;
                        }
                    });
                }
                out
            })
            .collect();
        Ok(parts.concat())
    }
}

/// Evaluates `χ_{H,A,B,C}` directly from its definition.
pub fn chi_embed(
    graph: &InputGraph,
    shape: &ShapeGraph,
    a: &[usize],
    b: &[usize],
    c: &[usize],
) -> Result<i64> {
    let n = graph.n();
    IndexScheme::new(n, shape.x())?.validate(a)?;
    IndexScheme::new(n, shape.y())?.validate(b)?;
    check_len(shape.z(), c.len())?;
    let mut img = vec![usize::MAX; shape.t()];
    img[..shape.x()].copy_from_slice(a);
    for (j, &vid) in shape.v().iter().enumerate() {
        if vid < shape.x() {
            if b[j] != a[vid] {
                return Err(Error::InvalidArgument(format!(
                    "b_{} must equal a_{} for the shared vertex '{}'",
                    j + 1,
                    vid + 1,
                    shape.name(vid)
                )));
            }
        } else if a.contains(&b[j]) {
            return Err(Error::InvalidArgument(format!(
                "b_{} = {} collides with A although v_{} is not in U",
                j + 1,
                b[j],
                j + 1
            )));
        } else {
            img[vid] = b[j];
        }
    }
    for (k, &cv) in c.iter().enumerate() {
        if cv >= n {
            return Err(Error::InvalidArgument(format!(
                "c_{} = {cv} out of range",
                k + 1
            )));
        }
        if a.contains(&cv) || b.contains(&cv) || c[..k].contains(&cv) {
            return Err(Error::InvalidArgument(format!(
                "C must consist of distinct vertices outside A ∪ B (c_{} = {cv})",
                k + 1
            )));
        }
        img[shape.w()[k]] = cv;
    }
    let mapped: Vec<(usize, usize)> = shape
        .edges()
        .iter()
        .map(|&(p, q)| (img[p], img[q]))
        .collect();
    graph.chi(&mapped)
}

/// `Σ_k c_k · R_{H_k}` over a common input graph.
pub struct LinearCombination<'g> {
    terms: Vec<(f64, GraphMatrix<'g>)>,
}

impl<'g> LinearCombination<'g> {
    pub fn new(terms: Vec<(f64, GraphMatrix<'g>)>) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty linear combination".into()))?
            .1
            .dims();
        for (_, m) in &terms {
            if m.dims() != first {
                return Err(Error::DimensionMismatch {
                    expected: first.0 * first.1,
                    got: m.dims().0 * m.dims().1,
                });
            }
        }
        Ok(LinearCombination { terms })
    }

    pub fn terms(&self) -> &[(f64, GraphMatrix<'g>)] {
        &self.terms
    }
}

impl LinearOperator for LinearCombination<'_> {
    fn nrows(&self) -> usize {
        self.terms[0].1.dims().0
    }
    fn ncols(&self) -> usize {
        self.terms[0].1.dims().1
    }
    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.nrows()];
        for (c, m) in &self.terms {
            for (o, v) in out.iter_mut().zip(m.apply(x)?) {
                *o += c * v;
            }
        }
        Ok(out)
    }
    fn apply_transpose(&self, y: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.ncols()];
        for (c, m) in &self.terms {
            for (o, v) in out.iter_mut().zip(m.apply_transpose(y)?) {
                *o += c * v;
            }
        }
        Ok(out)
    }
}

/// Checks `Σ_P t^t · R_{H,P} = t^n · R_H` over all `t^n` partitions into
/// `t = |V(H)|` parts. Returns the two sides.
pub fn partition_average_exact(
    shape: &ShapeGraph,
    graph: &InputGraph,
    cap: u128,
) -> Result<(DenseMatrix, DenseMatrix)> {
    let t = shape.t();
    let n = graph.n();
    let count = (t as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    cap_check("partitions to enumerate", count, cap)?;
    let full = GraphMatrix::new(shape, graph)?.to_dense(cap)?;
    let tt = (t as i64)
        .checked_pow(t as u32)
        .ok_or_else(|| Error::Overflow("t^t".into()))?;
    let tn = (t as i64)
        .checked_pow(n as u32)
        .ok_or_else(|| Error::Overflow("t^n".into()))?;
    let mut acc = DenseMatrix::zeros(full.rows(), full.cols());
    for p in all_partitions(n, t) {
        let part = GraphMatrix::partitioned(shape, graph, p)?.to_dense(cap)?;
        acc.add_assign_checked(&part)?;
    }
    Ok((acc.scaled(tt)?, full.scaled(tn)?))
}
