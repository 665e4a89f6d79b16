//! Sample-and-query access over a vector `v`.
//!
//! A complete binary tree whose leaves hold `v(i)²` (and the sign of `v(i)`)
//! and whose internal nodes hold the sum of their children. The root therefore
//! holds `‖v‖²`, an entry update rewrites one root-to-leaf path, and a sample
//! with probability `v(i)² / ‖v‖²` is one descent from the root.
//!
//! Nodes are laid out flat: node `j` has children `2j + 1` and `2j + 2`, and
//! leaf `i` lives at `capacity − 1 + i`. The leaf count is padded to a power of
//! two with zero-weight leaves.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SampleTree {
    capacity: usize,
    weights: Vec<f64>,
    negative: Vec<bool>,
    len: usize,
}

impl SampleTree {
    /// Builds the tree over `values`, storing `values[i]²` at leaf `i`.
    pub fn build(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput(pos));
        }
        let mut tree = Self::with_len(values.len());
        let base = tree.capacity - 1;
        for (i, &v) in values.iter().enumerate() {
            tree.weights[base + i] = v * v;
            tree.negative[i] = v.is_sign_negative();
        }
        tree.rebuild_internal();
        Ok(tree)
    }

    /// Builds the tree directly from leaf weights (already squared, so nonnegative).
    ///
    /// Used for squared norms, where taking a square root only to square it
    /// again would perturb the weights.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if let Some(pos) = weights.iter().position(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::NonFiniteInput(pos));
        }
        let mut tree = Self::with_len(weights.len());
        let base = tree.capacity - 1;
        tree.weights[base..base + weights.len()].copy_from_slice(weights);
        tree.rebuild_internal();
        Ok(tree)
    }

    fn with_len(len: usize) -> Self {
        let capacity = len.next_power_of_two();
        Self {
            capacity,
            weights: vec![0.0; 2 * capacity - 1],
            negative: vec![false; len],
            len,
        }
    }

    fn rebuild_internal(&mut self) {
        for j in (0..self.capacity - 1).rev() {
            self.weights[j] = self.weights[2 * j + 1] + self.weights[2 * j + 2];
        }
    }

    /// Sets entry `i` to `value` and recomputes its ancestors from their children.
    ///
    /// Returns the number of ancestors recomputed, always `log₂ capacity`.
    pub fn update(&mut self, i: usize, value: f64) -> Result<usize> {
        if i >= self.len {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.len,
            });
        }
        if !value.is_finite() {
            return Err(Error::NonFiniteInput(i));
        }
        let mut node = self.capacity - 1 + i;
        self.weights[node] = value * value;
        self.negative[i] = value.is_sign_negative();
        let mut touched = 0;
        while node > 0 {
            node = (node - 1) / 2;
            self.weights[node] = self.weights[2 * node + 1] + self.weights[2 * node + 2];
            touched += 1;
        }
        Ok(touched)
    }

    /// `‖v‖²`.
    #[inline]
    pub fn total(&self) -> f64 {
        self.weights[0]
    }

    /// Leaf weight `v(i)²`.
    pub fn weight(&self, i: usize) -> f64 {
        assert!(i < self.len, "leaf {i} out of range for length {}", self.len);
        self.weights[self.capacity - 1 + i]
    }

    /// `-1.0` or `1.0` according to the sign of the stored entry.
    pub fn sign(&self, i: usize) -> f64 {
        if self.negative[i] {
            -1.0
        } else {
            1.0
        }
    }

    /// Reads back entry `i` as `sign · √weight`.
    pub fn value(&self, i: usize) -> f64 {
        self.sign(i) * libm::sqrt(self.weight(i))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Levels between root and leaves.
    pub fn depth(&self) -> usize {
        self.capacity.trailing_zeros() as usize
    }

    #[cfg(test)]
    pub(crate) fn node_weights(&self) -> &[f64] {
        &self.weights
    }

    /// Draws leaf `i` with probability `v(i)² / ‖v‖²`.
    ///
    /// One fresh uniform variate per level: at each node the walk goes left
    /// iff `u · weight(node) < weight(left)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<usize> {
        if self.total().is_nan() || self.total() <= 0.0 {
            return Err(Error::ZeroMass);
        }
        let mut node = 0;
        while node < self.capacity - 1 {
            let left = 2 * node + 1;
            let right = left + 1;
            let u: f64 = rng.random();
            let go_left = u * self.weights[node] < self.weights[left];
            // Rounding in u · weight can land on a zero-weight child; never take it.
            node = match (go_left, self.weights[left] > 0.0, self.weights[right] > 0.0) {
                (true, true, _) | (false, true, false) => left,
                _ => right,
            };
        }
        Ok(node - (self.capacity - 1))
    }
}
