//! Occupation-number basis of the truncated bosonic Fock space.
//!
//! States are occupation vectors (n_1, ..., n_M) with sum n_j <= nmax,
//! enumerated in graded lexicographic order: ascending total particle
//! number, then ascending lexicographic within each shell. The order is
//! deterministic, and within a shell it depends only on (M, n), so shells
//! of bases with different cutoffs align entry for entry.

use std::collections::HashMap;

use crate::error::{Error, Result};

pub const DEFAULT_STATE_BUDGET: usize = 20_000_000;

#[derive(Debug)]
pub struct FockBasis {
    n_modes: usize,
    nmax: usize,
    occupations: Vec<Vec<u32>>,
    totals: Vec<u32>,
    shell_offsets: Vec<usize>, // len nmax + 2
    index: HashMap<Vec<u32>, usize>,
}

/// C(n + m - 1, n): number of occupation vectors of total n over m modes.
pub fn shell_dimension(n_modes: usize, total: usize) -> usize {
    binomial(n_modes + total - 1, total)
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

fn push_compositions(total: u32, slot: usize, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if slot + 1 == current.len() {
        current[slot] = total;
        out.push(current.clone());
        return;
    }
    for head in 0..=total {
        current[slot] = head;
        push_compositions(total - head, slot + 1, current, out);
    }
}

impl FockBasis {
    pub fn new(n_modes: usize, nmax: usize) -> Result<Self> {
        Self::with_budget(n_modes, nmax, DEFAULT_STATE_BUDGET)
    }

    pub fn with_budget(n_modes: usize, nmax: usize, budget: usize) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::InvalidParameter("need at least one mode".into()));
        }
        let count: usize = (0..=nmax).map(|n| shell_dimension(n_modes, n)).sum();
        if count > budget {
            return Err(Error::MemoryBudget { requested: count, budget });
        }
        let mut occupations = Vec::with_capacity(count);
        let mut shell_offsets = Vec::with_capacity(nmax + 2);
        let mut current = vec![0u32; n_modes];
        for n in 0..=nmax {
            shell_offsets.push(occupations.len());
            push_compositions(n as u32, 0, &mut current, &mut occupations);
        }
        shell_offsets.push(occupations.len());
        let totals = occupations
            .iter()
            .map(|occ| occ.iter().sum::<u32>())
            .collect();
        let index = occupations
            .iter()
            .enumerate()
            .map(|(i, occ)| (occ.clone(), i))
            .collect();
        Ok(FockBasis {
            n_modes,
            nmax,
            occupations,
            totals,
            shell_offsets,
            index,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn nmax(&self) -> usize {
        self.nmax
    }

    pub fn len(&self) -> usize {
        self.occupations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.occupations.is_empty()
    }

    pub fn occupation(&self, i: usize) -> &[u32] {
        &self.occupations[i]
    }

    pub fn total(&self, i: usize) -> usize {
        self.totals[i] as usize
    }

    pub fn index_of(&self, occ: &[u32]) -> Option<usize> {
        self.index.get(occ).copied()
    }

    /// Index range [start, end) of the shell with total particle number n.
    pub fn shell_range(&self, n: usize) -> std::ops::Range<usize> {
        self.shell_offsets[n]..self.shell_offsets[n + 1]
    }

    pub fn shell_dim(&self, n: usize) -> usize {
        self.shell_offsets[n + 1] - self.shell_offsets[n]
    }

    /// Index of the vacuum state.
    pub fn vacuum_index(&self) -> usize {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_count_formula() {
        let b = FockBasis::new(3, 4).unwrap();
        let expect: usize = (0..=4).map(|n| binomial(3 + n - 1, n)).sum();
        assert_eq!(b.len(), expect);
        assert_eq!(expect, binomial(3 + 4, 4)); // hockey stick
    }

    #[test]
    fn index_round_trips() {
        let b = FockBasis::new(4, 5).unwrap();
        for i in 0..b.len() {
            assert_eq!(b.index_of(b.occupation(i)), Some(i));
        }
    }

    #[test]
    fn graded_lex_order() {
        let b = FockBasis::new(2, 2).unwrap();
        let want: Vec<Vec<u32>> = vec![
            vec![0, 0],
            vec![0, 1],
            vec![1, 0],
            vec![0, 2],
            vec![1, 1],
            vec![2, 0],
        ];
        for (i, w) in want.iter().enumerate() {
            assert_eq!(b.occupation(i), w.as_slice());
        }
    }

    #[test]
    fn shells_align_across_cutoffs() {
        let small = FockBasis::new(3, 2).unwrap();
        let big = FockBasis::new(3, 6).unwrap();
        for n in 0..=2 {
            let rs = small.shell_range(n);
            let rb = big.shell_range(n);
            assert_eq!(rs.len(), rb.len());
            for (i, j) in rs.zip(rb) {
                assert_eq!(small.occupation(i), big.occupation(j));
            }
        }
    }

    #[test]
    fn budget_guard() {
        assert!(matches!(
            FockBasis::with_budget(6, 30, 1000),
            Err(Error::MemoryBudget { .. })
        ));
    }
}
