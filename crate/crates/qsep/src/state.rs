//! n-qubit pure states as coefficient vectors.
//!
//! A pure state of n qubits is stored as its 2^n complex amplitudes in
//! ascending basis order. Qubit 1 is the most significant bit of the basis
//! index, so entry k holds the coefficient of ∣k⟩ where the n-bit binary
//! expansion of k lists the qubits left to right. Under this layout the
//! coefficient vector of ∣φ⟩ on qubits 1..i tensored with ∣ϕ⟩ on qubits
//! i+1..n is exactly the Kronecker product of the two factor vectors, which
//! is what the block-proportionality machinery in [`crate::block`] exploits.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

/// Hard cap on the supported qubit count. 2^32 amplitudes is far beyond
/// available memory; the bound keeps index arithmetic comfortably in range.
pub const MAX_QUBITS: usize = 32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StateError {
    /// A state needs at least one qubit.
    #[error("qubit count must be at least 1")]
    NoQubits,

    #[error("qubit count {0} exceeds the supported maximum of {MAX_QUBITS}")]
    TooManyQubits(usize),

    /// The amplitude sequence does not have length 2^n.
    #[error("expected {expected} amplitudes for {n} qubits, got {got}")]
    LengthMismatch {
        n: usize,
        expected: usize,
        got: usize,
    },

    /// The zero vector is not a state.
    #[error("all amplitudes are zero")]
    ZeroVector,

    /// Amplitudes must have a finite norm.
    #[error("amplitudes contain a non-finite value")]
    NonFinite,

    /// A named-state constructor was called below its minimum qubit count.
    #[error("{what} requires at least {min} qubits, got {got}")]
    TooFewQubits {
        what: &'static str,
        min: usize,
        got: usize,
    },

    /// Dicke excitation number out of range.
    #[error("excitation number {i} out of range for {n} qubits")]
    WeightOutOfRange { i: usize, n: usize },

    /// Qubit label outside 1..=n.
    #[error("qubit label {label} out of range for {n} qubits")]
    LabelOutOfRange { label: usize, n: usize },

    #[error("duplicate qubit label {0}")]
    DuplicateLabel(usize),

    #[error("qubit label set is empty")]
    EmptyLabelSet,
}

/// An n-qubit pure state: the qubit count and the 2^n coefficients of the
/// computational basis kets in ascending index order.
///
/// States are immutable after construction; every operation on them is a
/// pure function returning a new value. Arbitrary non-zero vectors are
/// accepted — normalization is applied by the named-state constructors but
/// never imposed on caller-supplied amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    n: usize,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Build a state from its coefficient vector, stored verbatim.
    pub fn new(n: usize, amplitudes: Vec<Complex64>) -> Result<Self, StateError> {
        if n == 0 {
            return Err(StateError::NoQubits);
        }
        if n > MAX_QUBITS {
            return Err(StateError::TooManyQubits(n));
        }
        let expected = 1usize << n;
        if amplitudes.len() != expected {
            return Err(StateError::LengthMismatch {
                n,
                expected,
                got: amplitudes.len(),
            });
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(StateError::NonFinite);
        }
        // The squared norm must be a usable finite positive number: entries
        // so small that it underflows to zero behave as the zero vector
        // everywhere downstream, and entries so large that it overflows
        // break the "finite norm" invariant just as NaN would.
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if norm_sqr == 0.0 {
            return Err(StateError::ZeroVector);
        }
        if !norm_sqr.is_finite() {
            return Err(StateError::NonFinite);
        }
        Ok(PureState { n, amplitudes })
    }

    /// Internal constructor for values already known to satisfy the
    /// invariants (e.g. permutations of a valid state).
    pub(crate) fn from_parts_unchecked(n: usize, amplitudes: Vec<Complex64>) -> Self {
        debug_assert_eq!(amplitudes.len(), 1usize << n);
        debug_assert!(amplitudes.iter().any(|a| a.re != 0.0 || a.im != 0.0));
        PureState { n, amplitudes }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// 2^n, the length of the coefficient vector.
    pub fn dim(&self) -> usize {
        1usize << self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, k: usize) -> Complex64 {
        self.amplitudes[k]
    }

    /// L2 norm of the coefficient vector.
    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// The same state scaled to unit L2 norm.
    pub fn normalized(&self) -> PureState {
        let norm = self.norm();
        PureState {
            n: self.n,
            amplitudes: self.amplitudes.iter().map(|a| a / norm).collect(),
        }
    }

    /// Tensor product. `self`'s qubits become 1..n_a of the result and
    /// `other`'s become n_a+1..n_a+n_b, so the resulting coefficient vector
    /// is the Kronecker product of the operands' coefficient vectors:
    /// entry j·2^{n_b} + k equals a_j·b_k.
    pub fn tensor(&self, other: &PureState) -> Result<PureState, StateError> {
        let n = self.n + other.n;
        if n > MAX_QUBITS {
            return Err(StateError::TooManyQubits(n));
        }
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        Ok(PureState { n, amplitudes })
    }

    /// (∣0…0⟩ + ∣1…1⟩)/√2 on n ≥ 2 qubits.
    pub fn ghz(n: usize) -> Result<PureState, StateError> {
        if n < 2 {
            return Err(StateError::TooFewQubits {
                what: "GHZ",
                min: 2,
                got: n,
            });
        }
        check_qubit_count(n)?;
        let dim = 1usize << n;
        let mut amplitudes = vec![Complex64::ZERO; dim];
        let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        amplitudes[0] = a;
        amplitudes[dim - 1] = a;
        Ok(PureState { n, amplitudes })
    }

    /// The W state on n ≥ 2 qubits: the equal superposition of all kets of
    /// Hamming weight one.
    pub fn w(n: usize) -> Result<PureState, StateError> {
        if n < 2 {
            return Err(StateError::TooFewQubits {
                what: "W",
                min: 2,
                got: n,
            });
        }
        PureState::dicke(1, n)
    }

    /// The Dicke state with `i` excitations: the equal-amplitude
    /// superposition of all n-qubit basis kets of Hamming weight `i`,
    /// normalized to 1/√C(n,i) per ket.
    pub fn dicke(i: usize, n: usize) -> Result<PureState, StateError> {
        if n == 0 {
            return Err(StateError::NoQubits);
        }
        check_qubit_count(n)?;
        if i > n {
            return Err(StateError::WeightOutOfRange { i, n });
        }
        let dim = 1usize << n;
        let amp = Complex64::new(1.0 / (binomial(n, i) as f64).sqrt(), 0.0);
        let mut amplitudes = vec![Complex64::ZERO; dim];
        for (k, slot) in amplitudes.iter_mut().enumerate() {
            if k.count_ones() as usize == i {
                *slot = amp;
            }
        }
        Ok(PureState { n, amplitudes })
    }

    /// Normalized sum of the one-excitation and (n−1)-excitation Dicke
    /// states on n ≥ 3 qubits; every ket of Hamming weight 1 or n−1 carries
    /// amplitude 1/√(2n).
    pub fn dw(n: usize) -> Result<PureState, StateError> {
        if n < 3 {
            return Err(StateError::TooFewQubits {
                what: "DW",
                min: 3,
                got: n,
            });
        }
        check_qubit_count(n)?;
        let dim = 1usize << n;
        let amp = Complex64::new(1.0 / (2.0 * n as f64).sqrt(), 0.0);
        let mut amplitudes = vec![Complex64::ZERO; dim];
        for (k, slot) in amplitudes.iter_mut().enumerate() {
            let w = k.count_ones() as usize;
            if w == 1 || w == n - 1 {
                *slot = amp;
            }
        }
        Ok(PureState { n, amplitudes })
    }

    /// Normalized sum of the GHZ and W states on n ≥ 2 qubits.
    pub fn ghz_plus_w(n: usize) -> Result<PureState, StateError> {
        let ghz = PureState::ghz(n)?;
        let w = PureState::w(n)?;
        // GHZ and W have disjoint support for n ≥ 2, so the sum has norm √2.
        let amplitudes = ghz
            .amplitudes
            .iter()
            .zip(&w.amplitudes)
            .map(|(a, b)| (a + b) * std::f64::consts::FRAC_1_SQRT_2)
            .collect();
        Ok(PureState { n, amplitudes })
    }

    /// The three-qubit state (∣001⟩ + ∣010⟩ + ∣100⟩ + ∣111⟩)/2.
    pub fn zeta3() -> PureState {
        let h = Complex64::new(0.5, 0.0);
        let z = Complex64::ZERO;
        PureState {
            n: 3,
            amplitudes: vec![z, h, h, z, h, z, z, h],
        }
    }
}

fn check_qubit_count(n: usize) -> Result<(), StateError> {
    if n > MAX_QUBITS {
        Err(StateError::TooManyQubits(n))
    } else {
        Ok(())
    }
}

/// Binomial coefficient C(n, k) for n ≤ 32.
pub(crate) fn binomial(n: usize, k: usize) -> u64 {
    let k = k.min(n - k);
    let mut acc = 1u64;
    for j in 0..k {
        acc = acc * (n - j) as u64 / (j + 1) as u64;
    }
    acc
}

/// A non-empty sorted set of distinct qubit labels drawn from 1..=n.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct QubitLabelSet {
    labels: Vec<usize>,
}

impl QubitLabelSet {
    /// Build a label set, sorting the input and rejecting duplicates,
    /// out-of-range labels and the empty set.
    pub fn new(labels: impl IntoIterator<Item = usize>, n: usize) -> Result<Self, StateError> {
        let mut labels: Vec<usize> = labels.into_iter().collect();
        labels.sort_unstable();
        if labels.is_empty() {
            return Err(StateError::EmptyLabelSet);
        }
        for pair in labels.windows(2) {
            if pair[0] == pair[1] {
                return Err(StateError::DuplicateLabel(pair[0]));
            }
        }
        for &label in &labels {
            if label == 0 || label > n {
                return Err(StateError::LabelOutOfRange { label, n });
            }
        }
        Ok(QubitLabelSet { labels })
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn contains(&self, label: usize) -> bool {
        self.labels.binary_search(&label).is_ok()
    }

    pub fn min_label(&self) -> usize {
        self.labels[0]
    }

    /// Bit mask of the labels' positions in an n-qubit basis index
    /// (qubit p sits at bit n−p).
    pub(crate) fn index_mask(&self, n: usize) -> u64 {
        self.labels
            .iter()
            .fold(0u64, |m, &label| m | (1u64 << (n - label)))
    }
}

impl std::fmt::Display for QubitLabelSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (i, label) in self.labels.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{label}")?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn re_vec(xs: &[f64]) -> Vec<Complex64> {
        xs.iter().map(|&x| c(x, 0.0)).collect()
    }

    #[test]
    fn basis_ket_construction() {
        let s = PureState::new(2, re_vec(&[1.0, 0.0, 0.0, 0.0])).unwrap();
        assert_eq!(s.n(), 2);
        assert_eq!(s.dim(), 4);
        assert_eq!(s.amplitude(0), c(1.0, 0.0));
    }

    #[test]
    fn length_mismatch_rejected() {
        let err = PureState::new(2, re_vec(&[1.0, 0.0, 0.0])).unwrap_err();
        assert_eq!(
            err,
            StateError::LengthMismatch {
                n: 2,
                expected: 4,
                got: 3
            }
        );
    }

    #[test]
    fn zero_vector_and_zero_qubits_rejected() {
        assert_eq!(
            PureState::new(1, re_vec(&[0.0, 0.0])).unwrap_err(),
            StateError::ZeroVector
        );
        assert_eq!(PureState::new(0, re_vec(&[1.0])).unwrap_err(), StateError::NoQubits);
    }

    #[test]
    fn non_finite_rejected() {
        assert_eq!(
            PureState::new(1, vec![c(1.0, 0.0), c(f64::NAN, 0.0)]).unwrap_err(),
            StateError::NonFinite
        );
        // Finite entries whose squared norm overflows are just as unusable.
        assert_eq!(
            PureState::new(1, vec![c(1e200, 0.0), c(0.0, 0.0)]).unwrap_err(),
            StateError::NonFinite
        );
    }

    #[test]
    fn underflowing_norm_counts_as_zero() {
        assert_eq!(
            PureState::new(1, vec![c(1e-300, 0.0), c(0.0, 1e-300)]).unwrap_err(),
            StateError::ZeroVector
        );
    }

    #[test]
    fn amplitudes_stored_verbatim() {
        // Round trip: read back in order, no normalization.
        let amps: Vec<Complex64> = (0..8).map(|k| c(k as f64 + 0.5, -(k as f64))).collect();
        let s = PureState::new(3, amps.clone()).unwrap();
        assert_eq!(s.amplitudes(), &amps[..]);
    }

    #[test]
    fn tensor_of_single_qubit_states() {
        let a = PureState::new(1, vec![c(1.0, 2.0), c(-0.5, 0.25)]).unwrap();
        let b = PureState::new(1, vec![c(0.75, 0.0), c(0.0, -3.0)]).unwrap();
        let t = a.tensor(&b).unwrap();
        let expected = [
            a.amplitude(0) * b.amplitude(0),
            a.amplitude(0) * b.amplitude(1),
            a.amplitude(1) * b.amplitude(0),
            a.amplitude(1) * b.amplitude(1),
        ];
        assert_eq!(t.amplitudes(), &expected[..]);
    }

    #[test]
    fn tensor_with_zero_ket_prefixes() {
        let zero = PureState::new(1, re_vec(&[1.0, 0.0])).unwrap();
        let s = PureState::new(2, re_vec(&[0.1, 0.2, 0.3, 0.4])).unwrap();
        let t = zero.tensor(&s).unwrap();
        assert_eq!(&t.amplitudes()[..4], s.amplitudes());
        assert!(t.amplitudes()[4..].iter().all(|a| *a == Complex64::ZERO));
    }

    #[test]
    fn tensor_is_associative() {
        let a = PureState::new(1, vec![c(1.0, 1.0), c(2.0, -1.0)]).unwrap();
        let b = PureState::new(1, vec![c(0.5, 0.0), c(-1.5, 2.0)]).unwrap();
        let d = PureState::new(2, vec![c(3.0, 0.0), c(0.0, 1.0), c(1.0, -1.0), c(2.0, 2.0)]).unwrap();
        let left = a.tensor(&b).unwrap().tensor(&d).unwrap();
        let right = a.tensor(&b.tensor(&d).unwrap()).unwrap();
        assert_eq!(left, right);
    }

    #[test]
    fn ghz3_coefficients() {
        let s = PureState::ghz(3).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(s.amplitudes(), &re_vec(&[r, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, r])[..]);
    }

    #[test]
    fn w3_coefficients() {
        let s = PureState::w(3).unwrap();
        let r = 1.0 / 3f64.sqrt();
        assert_eq!(s.amplitudes(), &re_vec(&[0.0, r, r, 0.0, r, 0.0, 0.0, 0.0])[..]);
    }

    #[test]
    fn dicke_zero_is_all_zeros_ket() {
        let s = PureState::dicke(0, 4).unwrap();
        assert_eq!(s.amplitude(0), c(1.0, 0.0));
        assert!(s.amplitudes()[1..].iter().all(|a| *a == Complex64::ZERO));
    }

    #[test]
    fn dicke_support_and_norm() {
        let s = PureState::dicke(2, 5).unwrap();
        let support: usize = s
            .amplitudes()
            .iter()
            .filter(|a| **a != Complex64::ZERO)
            .count();
        assert_eq!(support, 10); // C(5,2)
        assert!((s.norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn dw3_coefficients() {
        let s = PureState::dw(3).unwrap();
        let r = 1.0 / 6f64.sqrt();
        assert_eq!(s.amplitudes(), &re_vec(&[0.0, r, r, r, r, r, r, 0.0])[..]);
    }

    #[test]
    fn zeta3_coefficients() {
        let s = PureState::zeta3();
        for (k, a) in s.amplitudes().iter().enumerate() {
            if matches!(k, 1 | 2 | 4 | 7) {
                assert_eq!(*a, c(0.5, 0.0));
            } else {
                assert_eq!(*a, Complex64::ZERO);
            }
        }
        assert!((s.norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn named_states_are_unit_norm() {
        for n in 2..=8 {
            assert!((PureState::ghz(n).unwrap().norm() - 1.0).abs() <= 1e-12);
            assert!((PureState::w(n).unwrap().norm() - 1.0).abs() <= 1e-12);
            assert!((PureState::ghz_plus_w(n).unwrap().norm() - 1.0).abs() <= 1e-12);
            for i in 0..=n {
                assert!((PureState::dicke(i, n).unwrap().norm() - 1.0).abs() <= 1e-12);
            }
            if n >= 3 {
                assert!((PureState::dw(n).unwrap().norm() - 1.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn named_state_parameter_checks() {
        assert!(PureState::ghz(1).is_err());
        assert!(PureState::w(1).is_err());
        assert!(PureState::dw(2).is_err());
        assert!(matches!(
            PureState::dicke(5, 4).unwrap_err(),
            StateError::WeightOutOfRange { i: 5, n: 4 }
        ));
    }

    #[test]
    fn label_set_validation() {
        let s = QubitLabelSet::new([3, 1], 4).unwrap();
        assert_eq!(s.labels(), &[1, 3]);
        assert_eq!(s.to_string(), "{1,3}");
        assert!(s.contains(3) && !s.contains(2));
        assert_eq!(
            QubitLabelSet::new([1, 1], 4).unwrap_err(),
            StateError::DuplicateLabel(1)
        );
        assert_eq!(
            QubitLabelSet::new([5], 4).unwrap_err(),
            StateError::LabelOutOfRange { label: 5, n: 4 }
        );
        assert_eq!(
            QubitLabelSet::new([], 4).unwrap_err(),
            StateError::EmptyLabelSet
        );
    }

    #[test]
    fn label_set_index_mask() {
        // Qubit 1 is the MSB: label 1 on n=3 occupies bit 2.
        let s = QubitLabelSet::new([1, 3], 3).unwrap();
        assert_eq!(s.index_mask(3), 0b101);
    }

    #[test]
    fn binomial_small_values() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(10, 5), 252);
        assert_eq!(binomial(4, 0), 1);
        assert_eq!(binomial(32, 16), 601080390);
    }
}
