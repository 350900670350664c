//! Colexicographic ranking of increasing subsets (combinatorial number
//! system): `rank({a_0 < … < a_{k−1}}) = Σ_i C(a_i, i + 1)`.

use crate::error::{Error, Result};

/// Exact binomial coefficient, `None` on `u128` overflow.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) after the multiplication.
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// Bijection between increasing `k`-subsets of `0..n` and `0..C(n, k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexScheme {
    n: usize,
    k: usize,
    len: usize,
    // table[j][m] = C(m, j + 1) for m in 0..=n
    table: Vec<Vec<usize>>,
}

impl IndexScheme {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        let len = binomial(n as u64, k as u64)
            .and_then(|v| usize::try_from(v).ok())
            .ok_or_else(|| Error::Overflow(format!("C({n}, {k}) does not fit in usize")))?;
        let table = (0..k)
            .map(|j| {
                (0..=n)
                    .map(|m| binomial(m as u64, j as u64 + 1).unwrap_or(0) as usize)
                    .collect()
            })
            .collect();
        Ok(IndexScheme { n, k, len, table })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn k(&self) -> usize {
        self.k
    }
    /// Number of subsets, `C(n, k)`.
    pub fn len(&self) -> usize {
        self.len
    }
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Checks that `subset` is strictly increasing, of size `k`, inside `0..n`.
    pub fn validate(&self, subset: &[usize]) -> Result<()> {
        if subset.len() != self.k {
            return Err(Error::DimensionMismatch {
                expected: self.k,
                got: subset.len(),
            });
        }
        if subset.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(format!(
                "subset {subset:?} is not strictly increasing"
            )));
        }
        if subset.last().is_some_and(|&v| v >= self.n) {
            return Err(Error::InvalidArgument(format!(
                "subset {subset:?} leaves 0..{}",
                self.n
            )));
        }
        Ok(())
    }

    /// Rank of a valid subset (see [`IndexScheme::validate`]).
    pub fn rank(&self, subset: &[usize]) -> usize {
        subset
            .iter()
            .enumerate()
            .map(|(i, &a)| self.table[i][a])
            .sum()
    }

    pub fn try_rank(&self, subset: &[usize]) -> Result<usize> {
        self.validate(subset)?;
        Ok(self.rank(subset))
    }

    /// Writes the subset of rank `r` into `out` (length `k`).
    pub fn unrank_into(&self, mut r: usize, out: &mut [usize]) {
        debug_assert!(r < self.len.max(1));
        let mut hi = self.n;
        for i in (0..self.k).rev() {
            let row = &self.table[i];
            // Largest a < hi with C(a, i + 1) <= r.
            let a = row[..hi].partition_point(|&c| c <= r) - 1;
            out[i] = a;
            r -= row[a];
            hi = a;
        }
    }

    pub fn unrank(&self, r: usize) -> Vec<usize> {
        let mut out = vec![0; self.k];
        self.unrank_into(r, &mut out);
        out
    }

    /// All subsets in rank order.
    pub fn iter(&self) -> SubsetIter {
        SubsetIter {
            n: self.n,
            current: (0..self.k).collect(),
            done: self.len == 0,
        }
    }
}

/// Iterator over increasing subsets in colexicographic order.
pub struct SubsetIter {
    n: usize,
    current: Vec<usize>,
    done: bool,
}

/// Advances `subset` to its colex successor within `0..n`; false when exhausted.
pub fn next_colex(subset: &mut [usize], n: usize) -> bool {
    let k = subset.len();
    for i in 0..k {
        let limit = if i + 1 < k { subset[i + 1] } else { n };
        if subset[i] + 1 < limit {
            subset[i] += 1;
            for (j, slot) in subset.iter_mut().take(i).enumerate() {
                *slot = j;
            }
            return true;
        }
    }
    false
}

impl Iterator for SubsetIter {
    type Item = Vec<usize>;
    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        self.done = !next_colex(&mut self.current, self.n);
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), Some(10));
        assert_eq!(binomial(3, 5), Some(0));
        assert_eq!(binomial(0, 0), Some(1));
        assert_eq!(binomial(254, 3), Some(2_699_004));
    }

    #[test]
    fn iteration_matches_rank_order() {
        let s = IndexScheme::new(7, 3).unwrap();
        let all: Vec<_> = s.iter().collect();
        assert_eq!(all.len(), 35);
        for (r, subset) in all.iter().enumerate() {
            assert_eq!(s.rank(subset), r);
            assert_eq!(&s.unrank(r), subset);
        }
    }

    #[test]
    fn empty_and_degenerate_schemes() {
        let s = IndexScheme::new(4, 0).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![Vec::<usize>::new()]);
        let s = IndexScheme::new(2, 3).unwrap();
        assert!(s.is_empty());
        assert_eq!(s.iter().count(), 0);
    }

    #[test]
    fn validation() {
        let s = IndexScheme::new(5, 2).unwrap();
        assert!(s.try_rank(&[1, 1]).is_err());
        assert!(s.try_rank(&[3, 1]).is_err());
        assert!(s.try_rank(&[1, 5]).is_err());
        assert!(s.try_rank(&[1]).is_err());
        assert_eq!(s.try_rank(&[0, 1]).unwrap(), 0);
    }

    proptest! {
        #[test]
        fn rank_unrank_bijection(n in 1usize..40, k in 0usize..5, seed in any::<u64>()) {
            let s = IndexScheme::new(n, k).unwrap();
            prop_assume!(!s.is_empty());
            let r = (seed % s.len() as u64) as usize;
            let subset = s.unrank(r);
            prop_assert!(s.validate(&subset).is_ok());
            prop_assert_eq!(s.rank(&subset), r);
        }
    }
}
