//! Multi-indices of the 3D tensor-product basis and their canonical ordering.
//!
//! Indices are ordered by total degree first and lexicographically (ascending
//! in `(k1, k2, k3)`) within a degree, so `(0,0,0)` has rank 0 and
//! `(0,0,1)`, `(0,1,0)`, `(1,0,0)` have ranks 1, 2, 3. Because of the graded
//! ordering, the coefficients of degree at most `n` always form the prefix of
//! length [`term_count`]`(n)`, which makes order changes a resize.

/// A velocity multi-index `(k1, k2, k3)`.
pub type MultiIndex = [u32; 3];

/// Number of multi-indices with total degree at most `n`.
pub const fn term_count(n: u32) -> usize {
    let n = n as usize;
    (n + 1) * (n + 2) * (n + 3) / 6
}

/// Total degree `k1 + k2 + k3`.
pub const fn degree(k: MultiIndex) -> u32 {
    k[0] + k[1] + k[2]
}

/// Position of `k` in the canonical ordering.
pub fn rank(k: MultiIndex) -> usize {
    let d = degree(k) as usize;
    let k1 = k[0] as usize;
    let below = if d == 0 { 0 } else { term_count(d as u32 - 1) };
    below + k1 * (d + 1) - k1 * (k1.saturating_sub(1)) / 2 + k[1] as usize
}

/// Inverse of [`rank`].
pub fn unrank(r: usize) -> MultiIndex {
    let mut d = 0u32;
    while term_count(d) <= r {
        d += 1;
    }
    let mut off = r - if d == 0 { 0 } else { term_count(d - 1) };
    let mut k1 = 0u32;
    loop {
        let block = (d - k1 + 1) as usize;
        if off < block {
            break;
        }
        off -= block;
        k1 += 1;
    }
    let k2 = off as u32;
    [k1, k2, d - k1 - k2]
}

/// All multi-indices of degree at most `order`, in canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSet {
    order: u32,
    indices: Vec<MultiIndex>,
}

impl IndexSet {
    pub fn new(order: u32) -> Self {
        let indices = (0..term_count(order)).map(unrank).collect();
        IndexSet { order, indices }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn get(&self, r: usize) -> MultiIndex {
        self.indices[r]
    }

    /// Rank of `k` if it belongs to the set.
    pub fn position(&self, k: MultiIndex) -> Option<usize> {
        (degree(k) <= self.order).then(|| rank(k))
    }

    /// Rank of `k + e_axis` if it stays inside the set.
    pub fn raised(&self, r: usize, axis: usize) -> Option<usize> {
        let mut k = self.indices[r];
        k[axis] += 1;
        self.position(k)
    }

    /// Rank of `k - e_axis` if `k[axis] > 0`.
    pub fn lowered(&self, r: usize, axis: usize) -> Option<usize> {
        let mut k = self.indices[r];
        if k[axis] == 0 {
            return None;
        }
        k[axis] -= 1;
        Some(rank(k))
    }

    /// First rank of degree `d` (equal to `term_count(d - 1)`).
    pub fn degree_start(d: u32) -> usize {
        if d == 0 {
            0
        } else {
            term_count(d - 1)
        }
    }
}
