//! Exact expected trace moments by exhaustive enumeration.
//!
//! Expanding `tr((R Rᵀ)^k)` gives a sum over index blocks
//! `A^(0), C^(0), B^(0), C^(1), A^(1), C^(2), B^(1), C^(3), …` where factor
//! `2j` is `χ_{H, A^(j), B^(j), C^(2j)}` and factor `2j+1` is
//! `χ_{H, A^(j+1), B^(j), C^(2j+1)}` (indices of `A` mod `k`). Each term is a
//! product of edge variables, so its expectation is 1 if every pair of the
//! input graph occurs an even number of times and 0 otherwise.

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{cap_check, Error, Result};
use crate::gmatrix::{IndexScheme, Partition};
use crate::rgraph::pair_index;
use crate::shape::ShapeGraph;

pub const DEFAULT_ENUMERATION_CAP: u128 = 1_000_000_000;
pub const DEFAULT_PATTERN_STEP_CAP: u64 = 50_000_000;
pub const MAX_K: usize = 4;

/// Which counting bound applies to a configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountRegime {
    /// Single-edge shape without partition: `(b, c) = (2k, k − 1)`.
    SingleEdge,
    /// Bipartite shape, partitioned: `(b, c) = (tk, q(k − 1))`.
    BipartitePartitioned,
    /// General shape, partitioned: `(b, c) = ((t + z)k, q(k − 1) + zk)`.
    GeneralPartitioned,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountBound {
    pub regime: CountRegime,
    pub b: u64,
    pub c: u64,
    /// `C(b, c) · n^{b−c} · (b − c)^c`.
    pub value: BigUint,
    /// `b^{2c} · n^{b−c}`.
    pub corollary: BigUint,
}

impl CountBound {
    pub fn new(regime: CountRegime, b: u64, c: u64, n: u64) -> Self {
        let nn = BigUint::from(n).pow((b - c) as u32);
        let choose = (0..c).fold(BigUint::from(1u32), |acc, i| acc * (b - i) / (i + 1));
        let value = choose * &nn * BigUint::from(b - c).pow(c as u32);
        let corollary = BigUint::from(b).pow(2 * c as u32) * nn;
        CountBound {
            regime,
            b,
            c,
            value,
            corollary,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentCount {
    pub n: usize,
    pub k: usize,
    pub partition_mode: bool,
    /// `E[tr((R Rᵀ)^k)]`.
    pub expected_trace: BigUint,
    /// Index assignments whose term has nonzero expectation. Every such term
    /// has expectation exactly 1, so this equals `expected_trace`.
    pub nonzero_terms: BigUint,
    /// Counting bound for the regime, when one applies.
    pub bound: Option<CountBound>,
}

/// Bound regime for `(shape, partitioned?)`, if any.
pub fn count_bound(
    shape: &ShapeGraph,
    n: usize,
    k: usize,
    partitioned: bool,
) -> Option<CountBound> {
    let (t, z, k64) = (shape.t() as u64, shape.z() as u64, k as u64);
    if shape.r() > 0 {
        return None;
    }
    if !partitioned {
        let single_edge = shape.x() == 1 && shape.y() == 1 && z == 0 && shape.edges().len() == 1;
        return single_edge
            .then(|| CountBound::new(CountRegime::SingleEdge, 2 * k64, k64 - 1, n as u64));
    }
    let q = shape.separator_size() as u64;
    if z == 0 {
        Some(CountBound::new(
            CountRegime::BipartitePartitioned,
            t * k64,
            q * (k64 - 1),
            n as u64,
        ))
    } else {
        Some(CountBound::new(
            CountRegime::GeneralPartitioned,
            (t + z) * k64,
            q * (k64 - 1) + z * k64,
            n as u64,
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BlockKind {
    A,
    B,
    C,
}

/// Layout of the index blocks and the factors that read them.
struct Layout {
    kinds: Vec<BlockKind>,
    // For each factor: block positions of its A, B and C (C absent when z = 0).
    factors: Vec<(usize, usize, Option<usize>)>,
}

impl Layout {
    fn new(k: usize, z: usize) -> Self {
        let per = if z > 0 { 4 } else { 2 };
        let mut kinds = Vec::new();
        for _ in 0..k {
            if z > 0 {
                kinds.extend([BlockKind::A, BlockKind::C, BlockKind::B, BlockKind::C]);
            } else {
                kinds.extend([BlockKind::A, BlockKind::B]);
            }
        }
        let a_pos = |j: usize| per * (j % k);
        let b_pos = |j: usize| per * j + if z > 0 { 2 } else { 1 };
        let c_pos = |f: usize| per * (f / 2) + if f % 2 == 0 { 1 } else { 3 };
        let factors = (0..2 * k)
            .map(|f| {
                let j = f / 2;
                let a = if f % 2 == 0 { a_pos(j) } else { a_pos(j + 1) };
                (a, b_pos(j), (z > 0).then(|| c_pos(f)))
            })
            .collect();
        Layout { kinds, factors }
    }
}

/// Work scheduled once a block is assigned.
#[derive(Default, Clone)]
struct Schedule {
    // (factor, shape vertex p, shape vertex q) edges completed at this block.
    edges: Vec<(usize, usize, usize)>,
    // Factors whose A/B compatibility becomes checkable.
    compat: Vec<usize>,
    // (factor, other block) pairs whose disjointness from C becomes checkable.
    disjoint: Vec<(usize, usize)>,
}

struct Enumerator<'a> {
    shape: &'a ShapeGraph,
    n: usize,
    layout: Layout,
    candidates: Vec<Vec<Vec<usize>>>,
    schedule: Vec<Schedule>,
    remaining_after: Vec<usize>,
}

impl<'a> Enumerator<'a> {
    fn new(
        shape: &'a ShapeGraph,
        n: usize,
        k: usize,
        partition: Option<&Partition>,
    ) -> Result<Self> {
        let layout = Layout::new(k, shape.z());
        let in_cell = |v: usize, id: usize| partition.is_none_or(|p| p.label(v) == id);
        let a_list: Vec<Vec<usize>> = IndexScheme::new(n, shape.x())?
            .iter()
            .filter(|a| a.iter().enumerate().all(|(i, &v)| in_cell(v, shape.u()[i])))
            .collect();
        let b_list: Vec<Vec<usize>> = IndexScheme::new(n, shape.y())?
            .iter()
            .filter(|b| b.iter().enumerate().all(|(j, &v)| in_cell(v, shape.v()[j])))
            .collect();
        let c_list = ordered_tuples(n, shape.z(), &|k, v| in_cell(v, shape.w()[k]));
        let candidates = layout
            .kinds
            .iter()
            .map(|kind| match kind {
                BlockKind::A => a_list.clone(),
                BlockKind::B => b_list.clone(),
                BlockKind::C => c_list.clone(),
            })
            .collect();

        let blocks = layout.kinds.len();
        let mut schedule = vec![Schedule::default(); blocks];
        for (f, &(a, b, c)) in layout.factors.iter().enumerate() {
            schedule[a.max(b)].compat.push(f);
            if let Some(c) = c {
                schedule[a.max(c)].disjoint.push((f, a));
                schedule[b.max(c)].disjoint.push((f, b));
            }
            for &(p, q) in shape.edges() {
                let at =
                    Self::block_of(shape, (a, b, c), p).max(Self::block_of(shape, (a, b, c), q));
                schedule[at].edges.push((f, p, q));
            }
        }
        let mut remaining_after = vec![0; blocks];
        let mut acc = 0;
        for blk in (0..blocks).rev() {
            remaining_after[blk] = acc;
            acc += schedule[blk].edges.len();
        }
        Ok(Enumerator {
            shape,
            n,
            layout,
            candidates,
            schedule,
            remaining_after,
        })
    }

    fn block_of(shape: &ShapeGraph, (a, b, c): (usize, usize, Option<usize>), id: usize) -> usize {
        if shape.in_u(id) {
            a
        } else if shape.in_v(id) {
            b
        } else {
            c.expect("middle vertex implies a C block")
        }
    }

    fn image(&self, choice: &[usize], factor: usize, id: usize) -> usize {
        let (a, b, c) = self.layout.factors[factor];
        let shape = self.shape;
        if let Some(i) = shape.u_position(id) {
            self.candidates[a][choice[a]][i]
        } else if let Some(j) = shape.v_position(id) {
            self.candidates[b][choice[b]][j]
        } else {
            let c = c.expect("middle vertex implies a C block");
            self.candidates[c][choice[c]][shape.w_position(id).expect("middle vertex")]
        }
    }

    fn worst_case(&self) -> u128 {
        self.candidates
            .iter()
            .fold(1u128, |acc, c| acc.saturating_mul(c.len() as u128))
    }

    fn block_ok(&self, blk: usize, choice: &[usize]) -> bool {
        let shape = self.shape;
        let s = &self.schedule[blk];
        for &f in &s.compat {
            let (a, b, _) = self.layout.factors[f];
            let av = &self.candidates[a][choice[a]];
            let bv = &self.candidates[b][choice[b]];
            for (j, &vid) in shape.v().iter().enumerate() {
                let ok = if vid < shape.x() {
                    bv[j] == av[vid]
                } else {
                    !av.contains(&bv[j])
                };
                if !ok {
                    return false;
                }
            }
        }
        for &(f, other) in &s.disjoint {
            let c = self.layout.factors[f].2.expect("disjointness needs C");
            let cv = &self.candidates[c][choice[c]];
            let ov = &self.candidates[other][choice[other]];
            if cv.iter().any(|v| ov.contains(v)) {
                return false;
            }
        }
        true
    }

    fn toggle(&self, blk: usize, choice: &[usize], parity: &mut [u64], odd: &mut usize) {
        for &(f, p, q) in &self.schedule[blk].edges {
            let idx = pair_index(self.n, self.image(choice, f, p), self.image(choice, f, q));
            let bit = 1u64 << (idx % 64);
            parity[idx / 64] ^= bit;
            if parity[idx / 64] & bit != 0 {
                *odd += 1;
            } else {
                *odd -= 1;
            }
        }
    }

    fn count_from(
        &self,
        blk: usize,
        choice: &mut Vec<usize>,
        parity: &mut [u64],
        odd: &mut usize,
    ) -> u128 {
        if blk == self.layout.kinds.len() {
            return u128::from(*odd == 0);
        }
        let mut total = 0;
        for idx in 0..self.candidates[blk].len() {
            choice[blk] = idx;
            if !self.block_ok(blk, choice) {
                continue;
            }
            self.toggle(blk, choice, parity, odd);
            if *odd <= self.remaining_after[blk] {
                total += self.count_from(blk + 1, choice, parity, odd);
            }
            self.toggle(blk, choice, parity, odd);
        }
        total
    }

    fn count(&self) -> u128 {
        let blocks = self.layout.kinds.len();
        let words = crate::rgraph::pair_count(self.n).div_ceil(64).max(1);
        (0..self.candidates[0].len())
            .into_par_iter()
            .map(|first| {
                let mut choice = vec![0; blocks];
                let mut parity = vec![0u64; words];
                let mut odd = 0;
                choice[0] = first;
                if !self.block_ok(0, &choice) {
                    return 0;
                }
                self.toggle(0, &choice, &mut parity, &mut odd);
                if odd > self.remaining_after[0] {
                    return 0;
                }
                self.count_from(1, &mut choice, &mut parity, &mut odd)
            })
            .sum()
    }
}

fn ordered_tuples(n: usize, z: usize, allowed: &dyn Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    fn rec(
        n: usize,
        z: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        allowed: &dyn Fn(usize, usize) -> bool,
    ) {
        if cur.len() == z {
            out.push(cur.clone());
            return;
        }
        for v in 0..n {
            if !cur.contains(&v) && allowed(cur.len(), v) {
                cur.push(v);
                rec(n, z, cur, out, allowed);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(n, z, &mut Vec::new(), &mut out, allowed);
    out
}

/// Exact `E[tr((R Rᵀ)^k)]` for `R = R_H` (or `R_{H,V_1..V_t}` when a
/// partition is given) over `G(n, 1/2)`.
pub fn expected_trace_moment_exact(
    shape: &ShapeGraph,
    n: usize,
    k: usize,
    partition: Option<&Partition>,
    cap: u128,
) -> Result<MomentCount> {
    if k == 0 || k > MAX_K {
        return Err(Error::InvalidArgument(format!(
            "k must be in 1..={MAX_K}, got {k}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if let Some(p) = partition {
        if p.n() != n || p.parts() < shape.t() {
            return Err(Error::InvalidArgument(
                "partition must label all n vertices with at least t parts".into(),
            ));
        }
    }
    let e = Enumerator::new(shape, n, k, partition)?;
    cap_check("moment enumeration steps", e.worst_case(), cap)?;
    let count = BigUint::from(e.count());
    Ok(MomentCount {
        n,
        k,
        partition_mode: partition.is_some(),
        expected_trace: count.clone(),
        nonzero_terms: count,
        bound: count_bound(shape, n, k, partition.is_some()),
    })
}

/// Number of index assignments with nonzero expectation.
pub fn nonzero_term_count(
    shape: &ShapeGraph,
    n: usize,
    k: usize,
    partition: Option<&Partition>,
    cap: u128,
) -> Result<BigUint> {
    Ok(expected_trace_moment_exact(shape, n, k, partition, cap)?.nonzero_terms)
}

/// All restricted growth strings of length `len` (set partitions of `len`
/// labelled slots, block labels in order of first appearance).
fn growth_strings(len: usize) -> Vec<Vec<usize>> {
    fn rec(len: usize, cur: &mut Vec<usize>, max: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for label in 0..=max {
            cur.push(label);
            rec(len, cur, max.max(label + 1), out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(len, &mut Vec::new(), 0, &mut out);
    out
}

/// Minimum number of forced equalities (slots minus distinct values) over
/// all index assignments of `tr((R Rᵀ)^k)` with nonzero expectation.
///
/// In partition mode values of different shape vertices live in disjoint
/// cells, so only copies of the same shape vertex may coincide and the
/// search runs over one set partition of copies per shape vertex. Otherwise
/// the search runs over set partitions of all slots subject to block
/// distinctness, `A`/`B`/`C` disjointness within each factor, and the
/// increasing order of every `A` and `B` block. Only equality patterns are
/// enumerated: any realizable pattern is realized by some assignment once
/// `n` is at least the number of slots.
pub fn min_constraint_edges(
    shape: &ShapeGraph,
    k: usize,
    partition_mode: bool,
    step_cap: u64,
) -> Result<usize> {
    if k == 0 || k > MAX_K {
        return Err(Error::InvalidArgument(format!(
            "k must be in 1..={MAX_K}, got {k}"
        )));
    }
    if shape.r() > 0 {
        return Err(Error::Unsupported(
            "constraint-edge search does not handle shapes with U ∩ V nonempty".into(),
        ));
    }
    if partition_mode {
        partitioned_min(shape, k, step_cap)
    } else {
        PatternSearch::new(shape, k).run(step_cap)
    }
}

fn copy_index(shape: &ShapeGraph, k: usize, id: usize, factor: usize) -> usize {
    let j = factor / 2;
    if shape.in_u(id) {
        if factor % 2 == 0 {
            j
        } else {
            (j + 1) % k
        }
    } else if shape.in_v(id) {
        j
    } else {
        factor
    }
}

fn partitioned_min(shape: &ShapeGraph, k: usize, step_cap: u64) -> Result<usize> {
    let t = shape.t();
    let copies: Vec<usize> = (0..t)
        .map(|id| if shape.in_w(id) { 2 * k } else { k })
        .collect();
    let options: Vec<Vec<Vec<usize>>> = copies.iter().map(|&c| growth_strings(c)).collect();
    let cost_of = |g: &Vec<usize>| g.len() - (g.iter().max().map_or(0, |m| m + 1));
    let mut best = usize::MAX;
    let mut steps = 0u64;
    let mut chosen: Vec<usize> = vec![0; t];

    #[allow(clippy::too_many_arguments)]
    fn rec(
        shape: &ShapeGraph,
        k: usize,
        id: usize,
        cost: usize,
        chosen: &mut Vec<usize>,
        options: &[Vec<Vec<usize>>],
        cost_of: &dyn Fn(&Vec<usize>) -> usize,
        best: &mut usize,
        steps: &mut u64,
        step_cap: u64,
    ) -> Result<()> {
        *steps += 1;
        if *steps > step_cap {
            return Err(Error::CapExceeded {
                what: "constraint-edge search steps".into(),
                size: *steps as u128,
                cap: step_cap as u128,
            });
        }
        if cost >= *best {
            return Ok(());
        }
        if id == shape.t() {
            let mut keys: Vec<(usize, usize, usize, usize)> = Vec::new();
            for f in 0..2 * k {
                for &(p, q) in shape.edges() {
                    let lp = options[p][chosen[p]][copy_index(shape, k, p, f)];
                    let lq = options[q][chosen[q]][copy_index(shape, k, q, f)];
                    keys.push((p, lp, q, lq));
                }
            }
            keys.sort_unstable();
            if all_runs_even(&keys) {
                *best = cost;
            }
            return Ok(());
        }
        for (i, g) in options[id].iter().enumerate() {
            chosen[id] = i;
            rec(
                shape,
                k,
                id + 1,
                cost + cost_of(g),
                chosen,
                options,
                cost_of,
                best,
                steps,
                step_cap,
            )?;
        }
        Ok(())
    }

    rec(
        shape,
        k,
        0,
        0,
        &mut chosen,
        &options,
        &cost_of,
        &mut best,
        &mut steps,
        step_cap,
    )?;
    Ok(best)
}

fn all_runs_even<T: PartialEq>(sorted: &[T]) -> bool {
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        if (j - i) % 2 == 1 {
            return false;
        }
        i = j;
    }
    true
}

/// Set-partition search over all slots for the unpartitioned case.
struct PatternSearch<'a> {
    shape: &'a ShapeGraph,
    k: usize,
    layout: Layout,
    // Block of each slot and position inside its block.
    slot_block: Vec<usize>,
    slot_pos: Vec<usize>,
    block_start: Vec<usize>,
    // Slot pairs that must receive different values.
    conflicts: Vec<Vec<usize>>,
}

impl<'a> PatternSearch<'a> {
    fn new(shape: &'a ShapeGraph, k: usize) -> Self {
        let layout = Layout::new(k, shape.z());
        let size = |kind: BlockKind| match kind {
            BlockKind::A => shape.x(),
            BlockKind::B => shape.y(),
            BlockKind::C => shape.z(),
        };
        let mut slot_block = Vec::new();
        let mut slot_pos = Vec::new();
        let mut block_start = Vec::new();
        for (blk, &kind) in layout.kinds.iter().enumerate() {
            block_start.push(slot_block.len());
            for pos in 0..size(kind) {
                slot_block.push(blk);
                slot_pos.push(pos);
            }
        }
        let slots = slot_block.len();
        let mut conflicts = vec![Vec::new(); slots];
        let mut forbid = |s1: usize, s2: usize| {
            if s1 != s2 {
                let (lo, hi) = (s1.min(s2), s1.max(s2));
                if !conflicts[hi].contains(&lo) {
                    conflicts[hi].push(lo);
                }
            }
        };
        let slots_of = |blk: usize| {
            let start = block_start[blk];
            start..start + size(layout.kinds[blk])
        };
        for blk in 0..layout.kinds.len() {
            for s1 in slots_of(blk) {
                for s2 in slots_of(blk) {
                    forbid(s1, s2);
                }
            }
        }
        for &(a, b, c) in &layout.factors {
            let mut members: Vec<usize> = slots_of(a).chain(slots_of(b)).collect();
            if let Some(c) = c {
                members.extend(slots_of(c));
            }
            for &s1 in &members {
                for &s2 in &members {
                    forbid(s1, s2);
                }
            }
        }
        PatternSearch {
            shape,
            k,
            layout,
            slot_block,
            slot_pos,
            block_start,
            conflicts,
        }
    }

    fn slot_of(&self, factor: usize, id: usize) -> usize {
        let (a, b, c) = self.layout.factors[factor];
        let shape = self.shape;
        if let Some(i) = shape.u_position(id) {
            self.block_start[a] + i
        } else if let Some(j) = shape.v_position(id) {
            self.block_start[b] + j
        } else {
            self.block_start[c.expect("middle vertex implies a C block")]
                + shape.w_position(id).expect("middle")
        }
    }

    fn order_consistent(&self, labels: &[usize], classes: usize) -> bool {
        // Edges class(a_i) -> class(a_{i+1}) inside A and B blocks must be acyclic.
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); classes];
        let mut indeg = vec![0usize; classes];
        for s in 1..labels.len() {
            let blk = self.slot_block[s];
            if self.layout.kinds[blk] != BlockKind::C
                && self.slot_block[s - 1] == blk
                && self.slot_pos[s] > 0
            {
                out[labels[s - 1]].push(labels[s]);
                indeg[labels[s]] += 1;
            }
        }
        let mut stack: Vec<usize> = (0..classes).filter(|&c| indeg[c] == 0).collect();
        let mut seen = 0;
        while let Some(c) = stack.pop() {
            seen += 1;
            for &d in &out[c] {
                indeg[d] -= 1;
                if indeg[d] == 0 {
                    stack.push(d);
                }
            }
        }
        seen == classes
    }

    fn parity_ok(&self, labels: &[usize]) -> bool {
        let mut keys: Vec<(usize, usize)> = Vec::new();
        for f in 0..2 * self.k {
            for &(p, q) in self.shape.edges() {
                let lp = labels[self.slot_of(f, p)];
                let lq = labels[self.slot_of(f, q)];
                keys.push((lp.min(lq), lp.max(lq)));
            }
        }
        keys.sort_unstable();
        all_runs_even(&keys)
    }

    fn run(&self, step_cap: u64) -> Result<usize> {
        let slots = self.slot_block.len();
        let mut labels = vec![0usize; slots];
        let mut best = usize::MAX;
        let mut steps = 0u64;
        self.rec(0, 0, &mut labels, &mut best, &mut steps, step_cap)?;
        Ok(best)
    }

    fn rec(
        &self,
        slot: usize,
        classes: usize,
        labels: &mut Vec<usize>,
        best: &mut usize,
        steps: &mut u64,
        step_cap: u64,
    ) -> Result<()> {
        *steps += 1;
        if *steps > step_cap {
            return Err(Error::CapExceeded {
                what: "constraint-edge search steps".into(),
                size: *steps as u128,
                cap: step_cap as u128,
            });
        }
        let cost = slot - classes;
        if cost >= *best {
            return Ok(());
        }
        if slot == labels.len() {
            if self.order_consistent(labels, classes) && self.parity_ok(labels) {
                *best = cost;
            }
            return Ok(());
        }
        // Fresh value first: low-cost patterns are reached early.
        for label in std::iter::once(classes).chain(0..classes) {
            if self.conflicts[slot].iter().any(|&s| labels[s] == label) {
                continue;
            }
            labels[slot] = label;
            let next = if label == classes {
                classes + 1
            } else {
                classes
            };
            self.rec(slot + 1, next, labels, best, steps, step_cap)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn single_edge_small_cases() {
        let h = catalog::single_edge();
        for n in 2..=6 {
            let m = expected_trace_moment_exact(&h, n, 1, None, DEFAULT_ENUMERATION_CAP).unwrap();
            assert_eq!(m.expected_trace, BigUint::from((n * (n - 1)) as u64));
        }
        let m = expected_trace_moment_exact(&h, 3, 2, None, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(m.expected_trace, BigUint::from(18u32));
        let bound = m.bound.unwrap();
        assert_eq!(bound.corollary, BigUint::from(432u32));
        assert!(m.nonzero_terms <= bound.value && bound.value <= bound.corollary);
    }

    #[test]
    fn too_few_vertices_gives_zero() {
        let h = catalog::middle_path();
        let m = expected_trace_moment_exact(&h, 2, 1, None, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(m.expected_trace, BigUint::from(0u32));
    }

    #[test]
    fn k_one_counts_compatible_pairs() {
        let h = catalog::two_cover_bipartite();
        let n = 6;
        let m = expected_trace_moment_exact(&h, n, 1, None, DEFAULT_ENUMERATION_CAP).unwrap();
        // Disjoint (A, B) with |A| = 2, |B| = 3: C(6,2)·C(4,3).
        assert_eq!(m.expected_trace, BigUint::from(60u32));
    }

    #[test]
    fn partitioned_single_edge_k_one() {
        let h = catalog::single_edge();
        let p = Partition::new(vec![0, 1, 0, 1, 1, 0, 0], 2).unwrap();
        let m = expected_trace_moment_exact(&h, 7, 1, Some(&p), DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(m.expected_trace, BigUint::from(12u32));
        assert!(m.partition_mode);
    }

    #[test]
    fn caps_and_arguments() {
        let h = catalog::single_edge();
        assert!(matches!(
            expected_trace_moment_exact(&h, 6, 3, None, 10),
            Err(Error::CapExceeded { .. })
        ));
        assert!(expected_trace_moment_exact(&h, 6, 0, None, 10).is_err());
        assert!(expected_trace_moment_exact(&h, 6, 5, None, 10).is_err());
        assert!(min_constraint_edges(&catalog::shared_endpoint(), 2, true, 1000).is_err());
        assert!(matches!(
            min_constraint_edges(&catalog::separator_example(), 2, false, 1000),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn growth_strings_are_bell_numbers() {
        let counts: Vec<usize> = (1..=6).map(|l| growth_strings(l).len()).collect();
        assert_eq!(counts, vec![1, 2, 5, 15, 52, 203]);
    }

    #[test]
    fn constraint_minimum_single_edge() {
        let h = catalog::single_edge();
        for k in 1..=3 {
            assert_eq!(
                min_constraint_edges(&h, k, false, DEFAULT_PATTERN_STEP_CAP).unwrap(),
                k - 1
            );
            assert_eq!(
                min_constraint_edges(&h, k, true, DEFAULT_PATTERN_STEP_CAP).unwrap(),
                k - 1
            );
        }
    }

    #[test]
    fn constraint_minimum_partitioned_shapes() {
        let h = catalog::two_cover_bipartite();
        assert_eq!(
            min_constraint_edges(&h, 2, true, DEFAULT_PATTERN_STEP_CAP).unwrap(),
            2
        );
        assert_eq!(
            min_constraint_edges(&h, 3, true, DEFAULT_PATTERN_STEP_CAP).unwrap(),
            4
        );
        let h = catalog::separator_example();
        assert_eq!(
            min_constraint_edges(&h, 2, true, DEFAULT_PATTERN_STEP_CAP).unwrap(),
            8
        );
        let h = catalog::middle_path();
        assert_eq!(
            min_constraint_edges(&h, 2, true, DEFAULT_PATTERN_STEP_CAP).unwrap(),
            3
        );
        assert_eq!(
            min_constraint_edges(&h, 2, false, DEFAULT_PATTERN_STEP_CAP).unwrap(),
            3
        );
    }

    #[test]
    fn count_bound_values() {
        // C(4,1)·3³·3¹ = 324 for (b, c) = (4, 1), n = 3.
        let b = CountBound::new(CountRegime::SingleEdge, 4, 1, 3);
        assert_eq!(b.value, BigUint::from(324u32));
        assert!(count_bound(&catalog::two_cover_bipartite(), 5, 2, false).is_none());
        let b = count_bound(&catalog::separator_example(), 5, 2, true).unwrap();
        assert_eq!(
            (b.regime, b.b, b.c),
            (CountRegime::GeneralPartitioned, 22, 8)
        );
    }
}
