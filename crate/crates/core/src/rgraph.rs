//! Random input graphs `G ~ G(n, 1/2)` and their ±1 edge variables.
//!
//! Vertices are `0..n`. The unordered pair `{i, j}` with `i < j` has pair
//! index `i·n − i(i+1)/2 + (j − i − 1)`; its presence bit is bit `p % 64` of
//! the `p / 64`-th `u64` drawn from `ChaCha8Rng::seed_from_u64(seed)`. ChaCha
//! is a counter-mode generator, so every bit is a pure function of
//! `(seed, pair index)`.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// An undirected simple graph on `0..n`, stored as one adjacency bitset per
/// vertex (`rows[i]` bit `j` set iff `i ~ j`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputGraph {
    n: usize,
    words: usize,
    rows: Vec<u64>,
    seed: Option<u64>,
}

pub fn sample_input_graph(n: usize, seed: u64) -> Result<InputGraph> {
    InputGraph::sample(n, seed)
}

/// Number of unordered pairs `n(n−1)/2`.
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Index of the unordered pair `{i, j}` (`i != j`) in the upper-triangular order.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    a * n - a * (a + 1) / 2 + (b - a - 1)
}

impl InputGraph {
    pub fn sample(n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("input graph needs n >= 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let total = pair_count(n);
        let mut bits = vec![0u64; total.div_ceil(64)];
        for word in bits.iter_mut() {
            *word = rng.next_u64();
        }
        let mut g = Self::empty_inner(n);
        let mut p = 0usize;
        for i in 0..n {
            for j in (i + 1)..n {
                if (bits[p / 64] >> (p % 64)) & 1 == 1 {
                    g.set(i, j);
                }
                p += 1;
            }
        }
        g.seed = Some(seed);
        Ok(g)
    }

    /// Edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("input graph needs n >= 1".into()));
        }
        Ok(Self::empty_inner(n))
    }

    fn empty_inner(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        InputGraph {
            n,
            words,
            rows: vec![0; n * words],
            seed: None,
        }
    }

    /// Builds a graph from an explicit edge list.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n)?;
        for &(i, j) in edges {
            g.check_pair(i, j)?;
            g.set(i, j);
        }
        Ok(g)
    }

    fn set(&mut self, i: usize, j: usize) {
        self.rows[i * self.words + j / 64] |= 1 << (j % 64);
        self.rows[j * self.words + i / 64] |= 1 << (i % 64);
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        if i >= self.n || j >= self.n {
            return Err(Error::InvalidArgument(format!(
                "vertex pair ({i}, {j}) out of range for n = {}",
                self.n
            )));
        }
        if i == j {
            return Err(Error::InvalidArgument(format!(
                "self-loop query at vertex {i}"
            )));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The sampling seed, or `None` for graphs that were loaded or built by hand.
    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Number of `u64` words in each adjacency row.
    pub fn words_per_row(&self) -> usize {
        self.words
    }

    /// Adjacency bitset of vertex `i`; bits at or beyond `n` are zero.
    pub fn row(&self, i: usize) -> &[u64] {
        &self.rows[i * self.words..(i + 1) * self.words]
    }

    #[inline]
    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        (self.rows[i * self.words + j / 64] >> (j % 64)) & 1 == 1
    }

    /// Unchecked edge variable: `+1` if adjacent, `−1` otherwise.
    #[inline]
    pub fn sign(&self, i: usize, j: usize) -> i64 {
        if self.adjacent(i, j) {
            1
        } else {
            -1
        }
    }

    /// Edge variable of the pair `{i, j}`.
    pub fn edge_variable(&self, i: usize, j: usize) -> Result<i64> {
        self.check_pair(i, j)?;
        Ok(self.sign(i, j))
    }

    /// Character `χ_E`: product of edge variables over `edges`.
    pub fn chi(&self, edges: &[(usize, usize)]) -> Result<i64> {
        let mut value = 1;
        for &(i, j) in edges {
            value *= self.edge_variable(i, j)?;
        }
        Ok(value)
    }

    pub fn edge_count(&self) -> usize {
        self.rows
            .iter()
            .map(|w| w.count_ones() as usize)
            .sum::<usize>()
            / 2
    }

    /// Fraction of the `n(n−1)/2` pairs that are edges; 0 when `n = 1`.
    pub fn edge_density(&self) -> f64 {
        let pairs = pair_count(self.n);
        if pairs == 0 {
            0.0
        } else {
            self.edge_count() as f64 / pairs as f64
        }
    }

    /// Graph with vertex `i` renamed to `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: perm.len(),
            });
        }
        let mut seen = vec![false; self.n];
        for &p in perm {
            if p >= self.n || seen[p] {
                return Err(Error::InvalidArgument(
                    "relabel map is not a permutation".into(),
                ));
            }
            seen[p] = true;
        }
        let mut g = Self::empty_inner(self.n);
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self.adjacent(i, j) {
                    g.set(perm[i], perm[j]);
                }
            }
        }
        Ok(g)
    }

    /// Serializes as an 8-byte little-endian `n` followed by the
    /// upper-triangular pair bits in row-major order, least significant bit
    /// first within each byte.
    pub fn dump(&self) -> Vec<u8> {
        let total = pair_count(self.n);
        let mut out = Vec::with_capacity(8 + total.div_ceil(8));
        out.extend_from_slice(&(self.n as u64).to_le_bytes());
        let mut bytes = vec![0u8; total.div_ceil(8)];
        let mut p = 0;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self.adjacent(i, j) {
                    bytes[p / 8] |= 1 << (p % 8);
                }
                p += 1;
            }
        }
        out.extend_from_slice(&bytes);
        out
    }

    pub fn load(data: &[u8]) -> Result<Self> {
        let header: [u8; 8] = data
            .get(..8)
            .and_then(|h| h.try_into().ok())
            .ok_or_else(|| Error::InvalidArgument("graph dump shorter than its header".into()))?;
        let n = usize::try_from(u64::from_le_bytes(header))
            .map_err(|_| Error::InvalidArgument("graph dump vertex count too large".into()))?;
        let total = pair_count(n);
        let body = &data[8..];
        if body.len() != total.div_ceil(8) {
            return Err(Error::InvalidArgument(format!(
                "graph dump body has {} bytes, expected {}",
                body.len(),
                total.div_ceil(8)
            )));
        }
        let mut g = Self::empty(n)?;
        let mut p = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                if (body[p / 8] >> (p % 8)) & 1 == 1 {
                    g.set(i, j);
                }
                p += 1;
            }
        }
        Ok(g)
    }
}
