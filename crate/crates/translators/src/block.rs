//! Partitioning of 1-based positions `1..=n` into contiguous blocks of size
//! `⌈n^ε⌉`. Every block-structured construction in this crate derives its
//! key space from a [`BlockPlan`].

use crate::error::TranslateError;
use automata::BlockRole;
use mrc_core::{ceil_pow, Rational};

/// The block decomposition of `n` positions for a split exponent `ε`:
/// `block_size = ⌈n^ε⌉` and `block_count = ⌈n / block_size⌉`. Inputs of
/// length 0 or 1 form a single (possibly empty) block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockPlan {
    n: usize,
    epsilon: Rational,
    block_size: usize,
    block_count: usize,
}

impl BlockPlan {
    /// Requires `0 < ε < 1`.
    pub fn new(n: usize, epsilon: Rational) -> Result<Self, TranslateError> {
        if epsilon.is_zero() || !epsilon.is_proper() {
            return Err(TranslateError::Invalid(format!(
                "split exponent must lie strictly between 0 and 1, got {epsilon}"
            )));
        }
        let (block_size, block_count) = if n <= 1 {
            (n, 1)
        } else {
            let b = ceil_pow(n as u64, &epsilon) as usize;
            (b, n.div_ceil(b))
        };
        Ok(BlockPlan {
            n,
            epsilon,
            block_size,
            block_count,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn epsilon(&self) -> Rational {
        self.epsilon
    }

    /// `b = ⌈n^ε⌉` (and `n` itself for `n ≤ 1`).
    pub fn block_size(&self) -> usize {
        self.block_size
    }

    /// `K = ⌈n / b⌉`, at least 1.
    pub fn block_count(&self) -> usize {
        self.block_count
    }

    /// The 1-based block index holding 1-based position `i ∈ 1..=n`.
    pub fn block_of_position(&self, i: usize) -> usize {
        debug_assert!(i >= 1 && i <= self.n, "position {i} outside 1..={}", self.n);
        if self.block_size == 0 {
            1
        } else {
            i.div_ceil(self.block_size)
        }
    }

    /// Inclusive 1-based position range of block `j ∈ 1..=K`. Empty for the
    /// single block of `n = 0` (returned as `(1, 0)`).
    pub fn block_range(&self, j: usize) -> (usize, usize) {
        debug_assert!(
            j >= 1 && j <= self.block_count,
            "block {j} outside 1..={}",
            self.block_count
        );
        let start = (j - 1) * self.block_size + 1;
        let end = (j * self.block_size).min(self.n);
        (start, end)
    }

    /// Number of positions in block `j`.
    pub fn block_len(&self, j: usize) -> usize {
        let (start, end) = self.block_range(j);
        if end < start {
            0
        } else {
            end - start + 1
        }
    }

    /// Where block `j` sits relative to the input's end-markers.
    pub fn role_of_block(&self, j: usize) -> BlockRole {
        let k = self.block_count;
        if k == 1 {
            BlockRole::Whole
        } else if j == 1 {
            BlockRole::Leftmost
        } else if j == k {
            BlockRole::Rightmost
        } else {
            BlockRole::Interior
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: u64, d: u64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    #[test]
    fn partition_invariants_hold_across_sizes_and_exponents() {
        for &(en, ed) in &[(1u64, 4u64), (1, 2), (3, 4)] {
            let eps = rat(en, ed);
            let complement = rat(ed - en, ed);
            for n in 0usize..=600 {
                let plan = BlockPlan::new(n, eps).unwrap();
                let b = plan.block_size();
                let k = plan.block_count();
                assert!(k >= 1);
                assert!(k * b >= n, "n={n} b={b} k={k}");
                let k_bound = ceil_pow(n.max(1) as u64, &complement) as usize + 1;
                assert!(k <= k_bound, "n={n} eps={eps} k={k} bound={k_bound}");
                // Blocks tile 1..=n exactly, in order, all full except the last.
                let mut next = 1usize;
                for j in 1..=k {
                    let (start, end) = plan.block_range(j);
                    assert_eq!(start, next);
                    if j < k {
                        assert_eq!(plan.block_len(j), b);
                    }
                    for i in start..=end {
                        assert_eq!(plan.block_of_position(i), j);
                    }
                    next = end + 1;
                }
                assert_eq!(next, n + 1);
            }
        }
    }

    #[test]
    fn tiny_inputs_form_one_block() {
        let eps = rat(1, 2);
        let empty = BlockPlan::new(0, eps).unwrap();
        assert_eq!(empty.block_count(), 1);
        assert_eq!(empty.block_size(), 0);
        assert_eq!(empty.block_range(1), (1, 0));
        assert_eq!(empty.block_len(1), 0);
        assert_eq!(empty.role_of_block(1), BlockRole::Whole);

        let one = BlockPlan::new(1, eps).unwrap();
        assert_eq!(one.block_count(), 1);
        assert_eq!(one.block_size(), 1);
        assert_eq!(one.block_range(1), (1, 1));
    }

    #[test]
    fn roles_cover_both_markers() {
        let plan = BlockPlan::new(16, rat(1, 2)).unwrap();
        assert_eq!(plan.block_count(), 4);
        assert_eq!(plan.role_of_block(1), BlockRole::Leftmost);
        assert_eq!(plan.role_of_block(2), BlockRole::Interior);
        assert_eq!(plan.role_of_block(3), BlockRole::Interior);
        assert_eq!(plan.role_of_block(4), BlockRole::Rightmost);
    }

    #[test]
    fn degenerate_exponents_are_rejected() {
        assert!(BlockPlan::new(8, Rational::from_integer(0)).is_err());
        assert!(BlockPlan::new(8, Rational::from_integer(1)).is_err());
        assert!(BlockPlan::new(8, Rational::from_integer(2)).is_err());
    }
}
