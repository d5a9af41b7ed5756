//! Seeded random states and product assemblies, used by tests and the CLI's
//! `product-random` generator.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::factor::{assemble, FactorError};
use crate::perm::QubitPermutation;
use crate::state::{PureState, QubitLabelSet};

/// A unit-norm state with independent complex-normal amplitudes; such
/// states are uniformly distributed on the sphere.
pub fn random_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> PureState {
    let amps: Vec<Complex64> = (0..1usize << n)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    PureState::new(n, amps)
        .expect("normal amplitudes are finite and non-zero")
        .normalized()
}

/// A random product state with one independent random factor per block of
/// `partition`; the blocks must partition 1..=n.
pub fn random_product<R: Rng + ?Sized>(
    partition: &[Vec<usize>],
    rng: &mut R,
) -> Result<PureState, FactorError> {
    let n: usize = partition.iter().map(|b| b.len()).sum();
    let mut parts = Vec::with_capacity(partition.len());
    for block in partition {
        let set = QubitLabelSet::new(block.iter().copied(), n)
            .map_err(|_| invalid_block_error(block, n))?;
        let state = random_state(set.len(), rng);
        parts.push((set, state));
    }
    assemble(&parts)
}

fn invalid_block_error(block: &[usize], n: usize) -> FactorError {
    match block.iter().find(|&&l| l == 0 || l > n) {
        Some(&label) => FactorError::LabelOutOfRange { label, n },
        None if block.is_empty() => FactorError::EmptyPartition,
        None => FactorError::DuplicateLabel(block[0]),
    }
}

/// A uniformly random permutation of n qubit labels (Fisher-Yates).
pub fn random_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> QubitPermutation {
    let mut mapping: Vec<usize> = (1..=n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        mapping.swap(i, j);
    }
    QubitPermutation::from_mapping(mapping).expect("shuffle preserves bijectivity")
}
