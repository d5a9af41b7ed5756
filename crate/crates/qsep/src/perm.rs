//! Qubit permutations and the canonical bipartition enumeration.
//!
//! A permutation π of qubit labels 1..=n acts on a state by moving the basis
//! bit at position p to position π(p) for every p. Positions follow the
//! layout of [`crate::state`]: qubit 1 is the most significant bit of the
//! basis index.
//!
//! A [`Bipartition`] is the canonical representative of an unordered split
//! of the labels into a subset and its complement, together with the "mover"
//! permutation that carries the subset onto the leading positions. Testing
//! every canonical bipartition — there are 2^{n−1} − 1 of them — is exactly
//! the search the product-state decision requires.

use serde::Serialize;
use thiserror::Error;

use crate::state::{PureState, QubitLabelSet};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PermError {
    #[error("permutation mapping is empty")]
    EmptyMapping,

    /// The mapping is not a bijection on 1..=n.
    #[error("mapping entry {value} at position {position} is not a valid bijection image")]
    NotABijection { position: usize, value: usize },

    /// Permutation and state act on different qubit counts.
    #[error("permutation on {perm} qubits applied to object on {object} qubits")]
    SizeMismatch { perm: usize, object: usize },

    #[error("qubit label {label} out of range for {n} qubits")]
    LabelOutOfRange { label: usize, n: usize },

    /// A bipartition needs a non-empty complement.
    #[error("subset covers all qubit labels")]
    EmptyComplement,

    /// Bipartition machinery needs at least two qubits.
    #[error("need at least 2 qubits, got {0}")]
    TooFewQubits(usize),
}

/// A bijection π on qubit labels 1..=n, stored as the one-based image list
/// `mapping[p−1] = π(p)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct QubitPermutation {
    mapping: Vec<usize>,
}

impl QubitPermutation {
    pub fn identity(n: usize) -> QubitPermutation {
        QubitPermutation {
            mapping: (1..=n).collect(),
        }
    }

    /// Build from the one-based image list, validating bijectivity.
    pub fn from_mapping(mapping: Vec<usize>) -> Result<QubitPermutation, PermError> {
        if mapping.is_empty() {
            return Err(PermError::EmptyMapping);
        }
        let n = mapping.len();
        let mut seen = vec![false; n + 1];
        for (idx, &value) in mapping.iter().enumerate() {
            if value == 0 || value > n || seen[value] {
                return Err(PermError::NotABijection {
                    position: idx + 1,
                    value,
                });
            }
            seen[value] = true;
        }
        Ok(QubitPermutation { mapping })
    }

    /// The transposition of labels `a` and `b` on n qubits.
    pub fn transposition(n: usize, a: usize, b: usize) -> Result<QubitPermutation, PermError> {
        for label in [a, b] {
            if label == 0 || label > n {
                return Err(PermError::LabelOutOfRange { label, n });
            }
        }
        let mut mapping: Vec<usize> = (1..=n).collect();
        mapping.swap(a - 1, b - 1);
        Ok(QubitPermutation { mapping })
    }

    pub fn n(&self) -> usize {
        self.mapping.len()
    }

    /// π(p) for a one-based position p.
    pub fn map(&self, p: usize) -> usize {
        self.mapping[p - 1]
    }

    /// The one-based image list, the form permutations take in reports.
    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    pub fn is_identity(&self) -> bool {
        self.mapping.iter().enumerate().all(|(i, &v)| v == i + 1)
    }

    /// Composition `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &QubitPermutation) -> Result<QubitPermutation, PermError> {
        if self.n() != other.n() {
            return Err(PermError::SizeMismatch {
                perm: self.n(),
                object: other.n(),
            });
        }
        let mapping = (1..=self.n()).map(|p| self.map(other.map(p))).collect();
        Ok(QubitPermutation { mapping })
    }

    pub fn inverse(&self) -> QubitPermutation {
        let mut mapping = vec![0usize; self.n()];
        for (p, &image) in self.mapping.iter().enumerate() {
            mapping[image - 1] = p + 1;
        }
        QubitPermutation { mapping }
    }

    /// Act on a state: the amplitude of ∣k⟩ moves to the index whose bit at
    /// position π(p) is k's bit at position p. The result is the coefficient
    /// vector of the permuted state; its L2 norm is exactly preserved.
    pub fn apply(&self, s: &PureState) -> Result<PureState, PermError> {
        let n = s.n();
        if n != self.n() {
            return Err(PermError::SizeMismatch {
                perm: self.n(),
                object: n,
            });
        }
        // Shift table: bit of position p lives at index bit n − p.
        let shifts: Vec<(u32, u32)> = (1..=n)
            .map(|p| ((n - p) as u32, (n - self.map(p)) as u32))
            .collect();
        let mut out = vec![num_complex::Complex64::ZERO; s.dim()];
        for (k, amp) in s.amplitudes().iter().enumerate() {
            let mut m = 0usize;
            for &(from, to) in &shifts {
                m |= ((k >> from) & 1) << to;
            }
            out[m] = *amp;
        }
        Ok(PureState::from_parts_unchecked(n, out))
    }
}

impl std::fmt::Display for QubitPermutation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.mapping.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

/// Canonical representative of an unordered split of 1..=n into a subset
/// and its complement.
///
/// Of the two sides the smaller is `left`; ties at n/2 are broken by
/// requiring label 1 in `left`. The `mover` permutation carries the left
/// labels, in ascending order, onto positions 1..=|left| and the right
/// labels, in ascending order, onto the remaining positions, so that the
/// prefix-split decision applies to the moved state.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Bipartition {
    left: QubitLabelSet,
    right: QubitLabelSet,
    mover: QubitPermutation,
}

impl Bipartition {
    /// Canonicalize `subset` (or its complement) into a bipartition of
    /// 1..=n.
    pub fn new(subset: &QubitLabelSet, n: usize) -> Result<Bipartition, PermError> {
        if n < 2 {
            return Err(PermError::TooFewQubits(n));
        }
        if let Some(&label) = subset.labels().iter().find(|&&l| l == 0 || l > n) {
            return Err(PermError::LabelOutOfRange { label, n });
        }
        if subset.len() == n {
            return Err(PermError::EmptyComplement);
        }
        let complement: Vec<usize> = (1..=n).filter(|l| !subset.contains(*l)).collect();
        let take_subset = match subset.len().cmp(&complement.len()) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            std::cmp::Ordering::Equal => subset.contains(1),
        };
        let (left_labels, right_labels) = if take_subset {
            (subset.labels().to_vec(), complement)
        } else {
            (complement, subset.labels().to_vec())
        };
        Ok(Bipartition::from_canonical_parts(left_labels, right_labels, n))
    }

    /// Build directly from a canonical left side (callers guarantee
    /// |left| ≤ n/2 with the tie rule).
    fn from_canonical_parts(left: Vec<usize>, right: Vec<usize>, n: usize) -> Bipartition {
        let mut mapping = vec![0usize; n];
        for (pos, &label) in left.iter().chain(right.iter()).enumerate() {
            mapping[label - 1] = pos + 1;
        }
        Bipartition {
            left: QubitLabelSet::new(left, n).expect("canonical left side is valid"),
            right: QubitLabelSet::new(right, n).expect("canonical right side is valid"),
            mover: QubitPermutation { mapping },
        }
    }

    pub fn left(&self) -> &QubitLabelSet {
        &self.left
    }

    pub fn right(&self) -> &QubitLabelSet {
        &self.right
    }

    pub fn mover(&self) -> &QubitPermutation {
        &self.mover
    }

    /// |left|, the prefix width at which the moved state is tested.
    pub fn width(&self) -> usize {
        self.left.len()
    }

    pub fn n(&self) -> usize {
        self.mover.n()
    }

    /// Basis-index mask of the left labels (qubit p at bit n−p).
    pub(crate) fn left_index_mask(&self) -> u64 {
        self.left.index_mask(self.n())
    }
}

impl std::fmt::Display for Bipartition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}|{}", self.left, self.right)
    }
}

/// Number of canonical bipartitions of n qubits: D = 2^{n−1} − 1.
pub fn bipartition_count(n: usize) -> Result<u64, PermError> {
    if n < 2 {
        return Err(PermError::TooFewQubits(n));
    }
    Ok((1u64 << (n - 1)) - 1)
}

/// Number of distinct permuted coefficient vectors a full scan must
/// examine in the worst case: 2^{n−1} − (n−1). All n−1 splits with a
/// prefix side share the single identity-permuted vector; every other
/// bipartition contributes its own.
pub fn permutation_budget(n: usize) -> Result<u64, PermError> {
    if n < 2 {
        return Err(PermError::TooFewQubits(n));
    }
    Ok((1u64 << (n - 1)) - (n as u64 - 1))
}

/// Lazily enumerate the canonical bipartitions of n qubits in scan order:
/// ascending |left|, then lexicographic on the left labels. Splits with a
/// prefix left side carry the identity mover.
pub fn bipartitions(n: usize) -> impl Iterator<Item = Bipartition> {
    BipartitionIter::new(n)
}

/// All canonical bipartitions, materialized in scan order. The list has
/// exactly 2^{n−1} − 1 entries.
pub fn enumerate_bipartitions(n: usize) -> Result<Vec<Bipartition>, PermError> {
    if n < 2 {
        return Err(PermError::TooFewQubits(n));
    }
    Ok(bipartitions(n).collect())
}

struct BipartitionIter {
    n: usize,
    width: usize,
    /// Next left-labels combination at the current width, or None when the
    /// width is exhausted.
    current: Option<Vec<usize>>,
}

impl BipartitionIter {
    fn new(n: usize) -> BipartitionIter {
        let (width, current) = if n < 2 {
            (1, None)
        } else {
            (1, Some(vec![1]))
        };
        BipartitionIter { n, width, current }
    }

    /// Advance `labels` to the lexicographically next w-combination of
    /// 1..=n, returning false when exhausted.
    fn next_combination(labels: &mut [usize], n: usize) -> bool {
        let w = labels.len();
        let mut i = w;
        while i > 0 {
            i -= 1;
            if labels[i] < n - (w - 1 - i) {
                labels[i] += 1;
                for j in i + 1..w {
                    labels[j] = labels[j - 1] + 1;
                }
                return true;
            }
        }
        false
    }
}

impl Iterator for BipartitionIter {
    type Item = Bipartition;

    fn next(&mut self) -> Option<Bipartition> {
        let n = self.n;
        let left = self.current.take()?;
        // At width n/2 only subsets containing label 1 are canonical; in
        // lexicographic order those are exactly the combinations starting
        // with 1, so the width ends as soon as the leading label moves.
        let mut next = left.clone();
        let exhausted = !Self::next_combination(&mut next, n)
            || (2 * self.width == n && next[0] != 1);
        if exhausted {
            self.width += 1;
            // Width n/2 starts at {1, 2, ..}, which contains 1.
            self.current = if 2 * self.width <= n {
                Some((1..=self.width).collect())
            } else {
                None
            };
        } else {
            self.current = Some(next);
        }
        let right: Vec<usize> = (1..=n).filter(|l| !left.contains(l)).collect();
        Some(Bipartition::from_canonical_parts(left, right, n))
    }
}
