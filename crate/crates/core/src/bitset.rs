//! Word-level operations on hyperplane bitsets.

/// `popcount(a & !b)`.
#[inline]
pub(crate) fn count_and_not(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x & !y).count_ones()).sum()
}

/// `a & !b != 0`.
#[inline]
pub(crate) fn any_and_not(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).any(|(x, y)| x & !y != 0)
}
