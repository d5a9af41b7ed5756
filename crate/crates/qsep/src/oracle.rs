//! Independent separability oracle based on vanishing 2×2 minors.
//!
//! Reshaping a coefficient vector at split width i into a 2^i × 2^{n−i}
//! matrix turns the bipartite product question into a rank question: the
//! cut is separable exactly when the matrix has rank one, i.e. when every
//! 2×2 minor vanishes. This module shares the bipartition enumeration with
//! the main pipeline but deliberately none of the proportionality code, so
//! agreement between the two is a genuine cross-check. It backs the test
//! suite and the CLI's verify mode; the block test remains the primary
//! method.

use num_complex::Complex64;
use thiserror::Error;

use crate::perm::{bipartitions, PermError};
use crate::state::PureState;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("matrix shape {rows}x{cols} is degenerate")]
    DegenerateShape { rows: usize, cols: usize },

    #[error("matrix shape {rows}x{cols} does not hold {len} entries")]
    ShapeMismatch { rows: usize, cols: usize, len: usize },

    #[error("split width {i} out of range for {n} qubits")]
    WidthOutOfRange { i: usize, n: usize },

    #[error("need at least 2 qubits, got {0}")]
    TooFewQubits(usize),

    #[error(transparent)]
    Perm(#[from] PermError),
}

/// A coefficient vector reshaped row-major into rows × cols, with entry
/// (j, k) = c_{j·cols + k}. Rows are exactly the split's block vectors.
#[derive(Clone, Debug)]
pub struct CoefficientMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl CoefficientMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self, OracleError> {
        if rows < 1 || cols < 1 {
            return Err(OracleError::DegenerateShape { rows, cols });
        }
        if rows * cols != entries.len() {
            return Err(OracleError::ShapeMismatch {
                rows,
                cols,
                len: entries.len(),
            });
        }
        Ok(CoefficientMatrix { rows, cols, entries })
    }

    /// Reshape `s` at split width `i` into 2^i rows of length 2^{n−i}.
    pub fn from_state(s: &PureState, i: usize) -> Result<Self, OracleError> {
        let n = s.n();
        if i < 1 || i >= n {
            return Err(OracleError::WidthOutOfRange { i, n });
        }
        CoefficientMatrix::new(1 << i, 1 << (n - i), s.amplitudes().to_vec())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, j: usize, k: usize) -> Complex64 {
        self.entries[j * self.cols + k]
    }
}

/// True when every 2×2 minor of the matrix vanishes within tol·‖m‖², i.e.
/// when the matrix is rank one and the corresponding bipartite cut is
/// separable. The threshold is quadratic in the matrix norm to match the
/// bilinear form of a determinant.
pub fn minor_test(m: &CoefficientMatrix, tol: f64) -> bool {
    let norm_sqr: f64 = m.entries.iter().map(|x| x.norm_sqr()).sum();
    let tau = tol * norm_sqr;
    for j in 0..m.rows {
        for jj in j + 1..m.rows {
            for k in 0..m.cols {
                for kk in k + 1..m.cols {
                    let minor = m.entry(j, k) * m.entry(jj, kk) - m.entry(j, kk) * m.entry(jj, k);
                    if minor.norm() > tau {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// True when the minor test fails at every canonical bipartition, i.e. the
/// state is genuinely entangled according to the oracle.
pub fn oracle_verdict(s: &PureState, tol: f64) -> Result<bool, OracleError> {
    let n = s.n();
    if n < 2 {
        return Err(OracleError::TooFewQubits(n));
    }
    for bp in bipartitions(n) {
        let moved = bp.mover().apply(s)?;
        let m = CoefficientMatrix::from_state(&moved, bp.width())?;
        if minor_test(&m, tol) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::PureState;

    const TOL: f64 = 1e-9;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn bell() -> PureState {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(2, vec![c(r, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(r, 0.0)]).unwrap()
    }

    fn random_state_for_test(n: usize, seed: u64) -> PureState {
        let mut x = seed | 1;
        let mut step = || {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            (x as f64 / u64::MAX as f64) - 0.5
        };
        let amps: Vec<Complex64> = (0..1usize << n).map(|_| c(step(), step())).collect();
        PureState::new(n, amps).unwrap()
    }

    #[test]
    fn bell_matrix_has_a_non_vanishing_minor() {
        let m = CoefficientMatrix::from_state(&bell(), 1).unwrap();
        assert!(!minor_test(&m, TOL)); // determinant 1/2
    }

    #[test]
    fn rank_one_outer_product_passes() {
        let u = [c(1.0, 0.5), c(-2.0, 0.0), c(0.3, 0.3)];
        let v = [c(0.7, -0.1), c(0.0, 2.0)];
        let entries: Vec<Complex64> = u.iter().flat_map(|a| v.iter().map(move |b| a * b)).collect();
        let m = CoefficientMatrix::new(3, 2, entries).unwrap();
        assert!(minor_test(&m, TOL));
    }

    #[test]
    fn bell_pair_product_cut_structure() {
        // Two Bell pairs side by side: separable across the pair boundary,
        // inseparable across any cut that splits a pair.
        let s = bell().tensor(&bell()).unwrap();
        let at_pair_boundary = CoefficientMatrix::from_state(&s, 2).unwrap();
        assert!(minor_test(&at_pair_boundary, TOL));
        let within_pairs = CoefficientMatrix::from_state(&s, 1).unwrap();
        assert!(!minor_test(&within_pairs, TOL));
    }

    #[test]
    fn shape_validation() {
        assert!(matches!(
            CoefficientMatrix::new(0, 4, vec![]),
            Err(OracleError::DegenerateShape { .. })
        ));
        assert!(matches!(
            CoefficientMatrix::new(2, 2, vec![Complex64::ZERO; 3]),
            Err(OracleError::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn ghz3_is_entangled_by_minors() {
        assert!(oracle_verdict(&PureState::ghz(3).unwrap(), TOL).unwrap());
    }

    #[test]
    fn zero_prefixed_ghz_is_not_genuinely_entangled() {
        let zero = PureState::new(1, vec![c(1.0, 0.0), Complex64::ZERO]).unwrap();
        let s = zero.tensor(&PureState::ghz(3).unwrap()).unwrap();
        assert!(!oracle_verdict(&s, TOL).unwrap());
    }

    #[test]
    fn generic_states_are_entangled() {
        for seed in 0..200u64 {
            let s = random_state_for_test(5, 40_000 + seed);
            assert!(oracle_verdict(&s, TOL).unwrap(), "seed {seed}");
        }
    }

    #[test]
    fn single_qubit_rejected() {
        let s = PureState::new(1, vec![c(1.0, 0.0), Complex64::ZERO]).unwrap();
        assert_eq!(oracle_verdict(&s, TOL).unwrap_err(), OracleError::TooFewQubits(1));
    }
}
