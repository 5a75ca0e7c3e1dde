use serde::Serialize;

use crate::error::{Error, Result};

/// `n` rankings over `m` candidates, stored row-major. Position 0 of each
/// ranking is the voter's top choice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VoteProfile {
    n: usize,
    m: usize,
    order: Vec<u32>,
    pub seed: Option<u64>,
}

impl VoteProfile {
    pub fn new(m: usize, rankings: &[Vec<usize>]) -> Result<Self> {
        let mut order = Vec::with_capacity(rankings.len() * m);
        for (i, r) in rankings.iter().enumerate() {
            if !is_permutation(r.iter().copied(), m) {
                return Err(Error::Dimension(format!("ranking {i} is not a permutation of 0..{m}")));
            }
            order.extend(r.iter().map(|&c| c as u32));
        }
        Ok(Self { n: rankings.len(), m, order, seed: None })
    }

    /// Wraps a flat buffer produced by a sampler. The caller guarantees
    /// every row is a permutation.
    pub(crate) fn from_flat(m: usize, order: Vec<u32>) -> Self {
        debug_assert_eq!(order.len() % m.max(1), 0);
        let n = order.len().checked_div(m).unwrap_or(0);
        Self { n, m, order, seed: None }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn ranking(&self, voter: usize) -> &[u32] {
        &self.order[voter * self.m..(voter + 1) * self.m]
    }

    pub fn top(&self, voter: usize) -> usize {
        self.order[voter * self.m] as usize
    }

    pub fn rankings(&self) -> impl Iterator<Item = &[u32]> {
        self.order.chunks_exact(self.m)
    }

    pub(crate) fn flat_mut(&mut self) -> &mut [u32] {
        &mut self.order
    }
}

pub(crate) fn is_permutation(items: impl Iterator<Item = usize>, m: usize) -> bool {
    let mut seen = vec![false; m];
    let mut count = 0;
    for c in items {
        if c >= m || std::mem::replace(&mut seen[c], true) {
            return false;
        }
        count += 1;
    }
    count == m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_permutations() {
        assert!(VoteProfile::new(3, &[vec![0, 1, 2], vec![2, 1, 0]]).is_ok());
        assert!(VoteProfile::new(3, &[vec![0, 1, 1]]).is_err());
        assert!(VoteProfile::new(3, &[vec![0, 1]]).is_err());
        assert!(VoteProfile::new(3, &[vec![0, 1, 3]]).is_err());
    }

    #[test]
    fn accessors() {
        let p = VoteProfile::new(3, &[vec![1, 0, 2], vec![2, 0, 1]]).unwrap();
        assert_eq!(p.n(), 2);
        assert_eq!(p.top(1), 2);
        assert_eq!(p.ranking(0), &[1, 0, 2]);
        assert_eq!(p.rankings().count(), 2);
    }
}
