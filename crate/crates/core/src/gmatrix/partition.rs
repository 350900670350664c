//! Vertex partitions `V_1, …, V_t` of the input graph, one label per vertex.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Assignment of every input vertex to one of `parts` cells. Cell `h`
/// receives shape vertex `h` (internal id order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    labels: Vec<usize>,
    parts: usize,
    masks: Vec<Vec<u64>>,
}

impl Partition {
    pub fn new(labels: Vec<usize>, parts: usize) -> Result<Self> {
        if parts == 0 {
            return Err(Error::InvalidArgument(
                "partition needs at least one part".into(),
            ));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= parts) {
            return Err(Error::InvalidArgument(format!(
                "part label {bad} out of range for {parts} parts"
            )));
        }
        let words = labels.len().div_ceil(64).max(1);
        let mut masks = vec![vec![0u64; words]; parts];
        for (v, &l) in labels.iter().enumerate() {
            masks[l][v / 64] |= 1 << (v % 64);
        }
        Ok(Partition {
            labels,
            parts,
            masks,
        })
    }

    /// i.i.d. uniform label per vertex.
    pub fn uniform(n: usize, parts: usize, seed: u64) -> Result<Self> {
        if parts == 0 {
            return Err(Error::InvalidArgument(
                "partition needs at least one part".into(),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let labels = (0..n).map(|_| rng.random_range(0..parts)).collect();
        Self::new(labels, parts)
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }
    pub fn parts(&self) -> usize {
        self.parts
    }
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }
    #[inline]
    pub fn label(&self, v: usize) -> usize {
        self.labels[v]
    }
    /// Bitset of the vertices in cell `part`.
    pub fn mask(&self, part: usize) -> &[u64] {
        &self.masks[part]
    }
    pub fn cell_size(&self, part: usize) -> usize {
        self.masks[part]
            .iter()
            .map(|w| w.count_ones() as usize)
            .sum()
    }
    pub fn cell(&self, part: usize) -> Vec<usize> {
        (0..self.n()).filter(|&v| self.labels[v] == part).collect()
    }
}

/// Iterator over all `parts^n` labelings, in lexicographic label order with
/// vertex 0 most significant.
pub struct AllPartitions {
    labels: Vec<usize>,
    parts: usize,
    done: bool,
}

pub fn all_partitions(n: usize, parts: usize) -> AllPartitions {
    AllPartitions {
        labels: vec![0; n],
        parts,
        done: parts == 0,
    }
}

impl Iterator for AllPartitions {
    type Item = Partition;
    fn next(&mut self) -> Option<Partition> {
        if self.done {
            return None;
        }
        let out = Partition::new(self.labels.clone(), self.parts).ok();
        let mut i = self.labels.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.labels[i] += 1;
            if self.labels[i] < self.parts {
                break;
            }
            self.labels[i] = 0;
        }
        out
    }
}
