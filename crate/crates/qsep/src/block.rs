//! Block views of coefficient vectors, the proportionality test between
//! complex vectors, and the explicit construction of tensor factors across
//! a prefix split.
//!
//! Splitting a 2^n-entry coefficient vector at width i stacks it into 2^i
//! contiguous blocks of length 2^{n−i}. The vector is a tensor product of a
//! 2^i-dimensional and a 2^{n−i}-dimensional vector exactly when every
//! non-zero block is proportional to a common non-zero reference block; the
//! per-block ratios then *are* the leading factor, and the normalized
//! reference block is the trailing factor.
//!
//! Proportionality of two vectors is decided by the scale-invariant
//! cross-product criterion: u and v are proportional when every
//! |u_j·v_m − u_m·v_j| is at most tol·‖u‖·‖v‖. A zero vector counts as
//! proportional to any non-zero vector (ratio 0), and a block is treated as
//! numerically zero when its norm is at most tol times the norm of the full
//! vector.

use num_complex::Complex64;
use thiserror::Error;

use crate::state::PureState;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BlockError {
    #[error("split width {i} out of range 1..={max} for {n} qubits")]
    WidthOutOfRange { i: usize, n: usize, max: usize },

    #[error("vectors have different lengths ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    /// Both vectors are numerically zero, so there is no reference to test
    /// against.
    #[error("both vectors are zero; proportionality needs a non-zero reference")]
    BothZero,

    #[error("expected a 2-qubit state, got {0} qubits")]
    NotTwoQubits(usize),
}

/// View of a coefficient vector as 2^i stacked blocks of length 2^{n−i}.
/// Block ℓ starts at index ℓ·2^{n−i}; concatenating the blocks in order
/// reproduces the source amplitudes exactly.
#[derive(Clone, Copy, Debug)]
pub struct BlockMatrix<'a> {
    amps: &'a [Complex64],
    width: usize,
    block_len: usize,
}

impl<'a> BlockMatrix<'a> {
    /// Split `s` at width `i`, with 1 ≤ i ≤ n−1.
    pub fn new(s: &'a PureState, i: usize) -> Result<BlockMatrix<'a>, BlockError> {
        let n = s.n();
        if i < 1 || i >= n {
            return Err(BlockError::WidthOutOfRange { i, n, max: n.saturating_sub(1) });
        }
        Ok(BlockMatrix {
            amps: s.amplitudes(),
            width: i,
            block_len: 1usize << (n - i),
        })
    }

    /// The split width i.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn num_blocks(&self) -> usize {
        1usize << self.width
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    /// Block ℓ as a slice of the source amplitudes.
    pub fn block(&self, l: usize) -> &'a [Complex64] {
        &self.amps[l * self.block_len..(l + 1) * self.block_len]
    }

    pub fn blocks(&self) -> impl Iterator<Item = &'a [Complex64]> {
        self.amps.chunks_exact(self.block_len)
    }
}

/// Outcome of the proportionality test between two equal-length vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct Proportionality {
    pub proportional: bool,
    /// Least-squares ratio k with v ≈ k·u, present when `proportional` and
    /// the reference u is non-zero.
    pub ratio: Option<Complex64>,
    /// Entry index pair (j, m) carrying the largest cross-product magnitude
    /// found, present when not proportional.
    pub witness: Option<(usize, usize)>,
    /// Largest |u_j·v_m − u_m·v_j| encountered by the test.
    pub residual: f64,
}

/// Decide whether `v` is proportional to `u` within the relative tolerance
/// `tol`. The decision is symmetric in the operands; the ratio is reported
/// for the direction v = k·u.
pub fn proportional(
    u: &[Complex64],
    v: &[Complex64],
    tol: f64,
) -> Result<Proportionality, BlockError> {
    if u.len() != v.len() {
        return Err(BlockError::LengthMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    let u_norm_sqr = norm_sqr_of(u);
    let v_norm_sqr = norm_sqr_of(v);
    if u_norm_sqr == 0.0 && v_norm_sqr == 0.0 {
        return Err(BlockError::BothZero);
    }
    if v_norm_sqr == 0.0 {
        return Ok(Proportionality {
            proportional: true,
            ratio: Some(Complex64::ZERO),
            witness: None,
            residual: 0.0,
        });
    }
    if u_norm_sqr == 0.0 {
        // Zero reference: the decision is symmetric (u = 0·v) but no k
        // satisfies v = k·0.
        return Ok(Proportionality {
            proportional: true,
            ratio: None,
            witness: None,
            residual: 0.0,
        });
    }
    let pivot = argmax_abs(u);
    match cross_test(u, u_norm_sqr, pivot, v, v_norm_sqr, tol) {
        PairTest::Pass { ratio, max_cross } => Ok(Proportionality {
            proportional: true,
            ratio: Some(ratio),
            witness: None,
            residual: max_cross,
        }),
        PairTest::Fail { witness, max_cross } => Ok(Proportionality {
            proportional: false,
            ratio: None,
            witness: Some(witness),
            residual: max_cross,
        }),
    }
}

/// Explicit tensor factors of a coefficient vector split at prefix width i:
/// C = v1 ⊗ v2 within the reported residual.
#[derive(Clone, Debug)]
pub struct SplitFactors {
    /// The 2^i leading-part coefficients. The entry at `reference_block`
    /// carries the norm of the reference block and the phase that
    /// compensates the rotation applied to `v2`.
    pub v1: Vec<Complex64>,
    /// Unit-norm trailing-part coefficients, leading non-zero entry rotated
    /// real positive.
    pub v2: Vec<Complex64>,
    /// Index of the first numerically non-zero block, used as reference.
    pub reference_block: u64,
    /// Relative reconstruction error ‖C − v1⊗v2‖ / ‖C‖.
    pub residual: f64,
}

/// Evidence that a split fails: a non-proportional block pair and the entry
/// pair with the largest cross product found.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockWitness {
    /// (reference block, offending block).
    pub blocks: (u64, u64),
    /// Entry index pair within the blocks.
    pub entries: (usize, usize),
    /// The largest cross-product magnitude found for the pair.
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub enum SplitOutcome {
    Split(SplitFactors),
    NotProportional(BlockWitness),
}

impl SplitOutcome {
    pub fn is_split(&self) -> bool {
        matches!(self, SplitOutcome::Split(_))
    }

    pub fn factors(&self) -> Option<&SplitFactors> {
        match self {
            SplitOutcome::Split(f) => Some(f),
            SplitOutcome::NotProportional(_) => None,
        }
    }
}

/// Try to decompose `s` at prefix width `i`: succeeds, returning the
/// factors, exactly when every non-zero block is proportional to the first
/// non-zero block. On success ‖C − v1⊗v2‖ ≤ tol·‖C‖.
pub fn decompose_at(s: &PureState, i: usize, tol: f64) -> Result<SplitOutcome, BlockError> {
    let n = s.n();
    if i < 1 || i >= n {
        return Err(BlockError::WidthOutOfRange { i, n, max: n.saturating_sub(1) });
    }
    let src = BlockSource::Contiguous {
        amps: s.amplitudes(),
        block_len: 1usize << (n - i),
    };
    let total_norm_sqr: f64 = s.amplitudes().iter().map(|a| a.norm_sqr()).sum();
    Ok(decompose_source(&src, total_norm_sqr, tol))
}

/// Closed-form two-qubit product test: ∣c0·c3 − c1·c2∣ ≤ tol·‖C‖².
pub fn two_qubit_product_test(s: &PureState, tol: f64) -> Result<bool, BlockError> {
    if s.n() != 2 {
        return Err(BlockError::NotTwoQubits(s.n()));
    }
    let a = s.amplitudes();
    let cross = (a[0] * a[3] - a[1] * a[2]).norm();
    let norm_sqr: f64 = a.iter().map(|x| x.norm_sqr()).sum();
    Ok(cross <= tol * norm_sqr)
}

// ---------------------------------------------------------------------------
// Shared decomposition core.
//
// The same block logic runs in two settings: contiguous prefix splits of a
// materialized vector, and virtual prefix splits of a mover-permuted vector
// addressed directly in the original amplitudes through bit masks. Keeping
// one implementation guarantees the two paths decide identically.

/// Iterate x over all submasks of `mask` in ascending packed order,
/// starting at 0. Visits 2^popcount values.
#[inline]
pub(crate) fn for_each_submask(mask: u64, mut f: impl FnMut(u64)) {
    let mut x = 0u64;
    loop {
        f(x);
        x = x.wrapping_sub(mask) & mask;
        if x == 0 {
            break;
        }
    }
}

pub(crate) enum BlockSource<'a> {
    /// Block ℓ is amps[ℓ·block_len .. (ℓ+1)·block_len].
    Contiguous {
        amps: &'a [Complex64],
        block_len: usize,
    },
    /// Virtual prefix split of the permuted vector for a qubit-subset cut:
    /// block r holds amps[r_sub | c_sub], where r_sub is the r-th submask of
    /// `left_mask` and c_sub runs over submasks of `right_mask`, both in
    /// ascending packed order. This reproduces, entry for entry and in the
    /// same order, the contiguous blocks of the state permuted by the cut's
    /// mover.
    Cut {
        amps: &'a [Complex64],
        left_mask: u64,
        right_mask: u64,
    },
}

impl BlockSource<'_> {
    fn num_blocks(&self) -> usize {
        match self {
            BlockSource::Contiguous { amps, block_len } => amps.len() / block_len,
            BlockSource::Cut { left_mask, .. } => 1usize << left_mask.count_ones(),
        }
    }

    fn block_len(&self) -> usize {
        match self {
            BlockSource::Contiguous { block_len, .. } => *block_len,
            BlockSource::Cut { right_mask, .. } => 1usize << right_mask.count_ones(),
        }
    }

    fn block_norms_sqr(&self) -> Vec<f64> {
        match self {
            BlockSource::Contiguous { amps, block_len } => amps
                .chunks_exact(*block_len)
                .map(|b| b.iter().map(|a| a.norm_sqr()).sum())
                .collect(),
            BlockSource::Cut {
                amps,
                left_mask,
                right_mask,
            } => {
                let mut out = Vec::with_capacity(self.num_blocks());
                for_each_submask(*left_mask, |r_sub| {
                    let mut acc = 0.0f64;
                    for_each_submask(*right_mask, |c_sub| {
                        acc += amps[(r_sub | c_sub) as usize].norm_sqr();
                    });
                    out.push(acc);
                });
                out
            }
        }
    }

    /// Block `l` as a slice: borrowed directly when contiguous, gathered
    /// into `buf` otherwise.
    fn block<'b>(&'b self, l: usize, buf: &'b mut Vec<Complex64>) -> &'b [Complex64] {
        match self {
            BlockSource::Contiguous { amps, block_len } => {
                &amps[l * block_len..(l + 1) * block_len]
            }
            BlockSource::Cut {
                amps,
                left_mask,
                right_mask,
            } => {
                let r_sub = nth_submask(*left_mask, l as u64);
                buf.clear();
                buf.reserve(self.block_len());
                for_each_submask(*right_mask, |c_sub| {
                    buf.push(amps[(r_sub | c_sub) as usize]);
                });
                &buf[..]
            }
        }
    }
}

/// The submask of `mask` whose packed value is `packed` (bit j of `packed`
/// goes to the j-th lowest set bit of `mask`).
#[inline]
fn nth_submask(mask: u64, packed: u64) -> u64 {
    let mut out = 0u64;
    let mut remaining = mask;
    let mut bit = 0u32;
    while remaining != 0 {
        let low = remaining & remaining.wrapping_neg();
        if (packed >> bit) & 1 == 1 {
            out |= low;
        }
        remaining ^= low;
        bit += 1;
    }
    out
}

pub(crate) fn decompose_source(
    src: &BlockSource<'_>,
    total_norm_sqr: f64,
    tol: f64,
) -> SplitOutcome {
    let nb = src.num_blocks();
    let norms_sqr = src.block_norms_sqr();
    let zero_thresh_sqr = tol * tol * total_norm_sqr;

    let reference = norms_sqr
        .iter()
        .position(|&ns| ns > zero_thresh_sqr)
        .unwrap_or_else(|| argmax_f64(&norms_sqr));
    let mut ref_buf = Vec::new();
    let u = src.block(reference, &mut ref_buf);
    let u_norm_sqr = norms_sqr[reference];
    let pivot = argmax_abs(u);

    let mut ratios = vec![Complex64::ZERO; nb];
    ratios[reference] = Complex64::ONE;
    let mut buf = Vec::new();
    for l in 0..nb {
        if l == reference || norms_sqr[l] <= zero_thresh_sqr {
            continue;
        }
        let v = src.block(l, &mut buf);
        match cross_test(u, u_norm_sqr, pivot, v, norms_sqr[l], tol) {
            PairTest::Pass { ratio, .. } => ratios[l] = ratio,
            PairTest::Fail { witness, max_cross } => {
                return SplitOutcome::NotProportional(BlockWitness {
                    blocks: (reference as u64, l as u64),
                    entries: witness,
                    residual: max_cross,
                });
            }
        }
    }

    // Assemble the factors: v2 is the normalized reference block with its
    // leading non-zero entry rotated real positive; the compensating phase
    // multiplies the reference coefficient so that v1 ⊗ v2 still matches C.
    let u_norm = u_norm_sqr.sqrt();
    let mut v2: Vec<Complex64> = u.iter().map(|x| x / u_norm).collect();
    let lead = v2
        .iter()
        .position(|x| x.norm() > tol)
        .unwrap_or_else(|| argmax_abs(&v2));
    let phase = v2[lead] / v2[lead].norm();
    let conj_phase = phase.conj();
    for x in &mut v2 {
        *x *= conj_phase;
    }
    let a_ref = phase * u_norm;
    let v1: Vec<Complex64> = ratios.iter().map(|k| k * a_ref).collect();

    let mut err_sqr = 0.0f64;
    let mut worst = (0usize, -1.0f64);
    for (l, &a) in v1.iter().enumerate() {
        let b = src.block(l, &mut buf);
        let block_err: f64 = b
            .iter()
            .zip(&v2)
            .map(|(x, y)| (x - a * y).norm_sqr())
            .sum();
        err_sqr += block_err;
        if l != reference && block_err > worst.1 {
            worst = (l, block_err);
        }
    }
    let residual = (err_sqr / total_norm_sqr).sqrt();
    if residual > tol && nb > 1 {
        // Right at the decision boundary the pairwise tests can pass while
        // the assembled product still misses C by more than the tolerance;
        // refuse the factorization and report the worst block.
        let v = src.block(worst.0, &mut buf);
        let (max_cross, entries) = pivot_row_max(u, pivot, v);
        return SplitOutcome::NotProportional(BlockWitness {
            blocks: (reference as u64, worst.0 as u64),
            entries,
            residual: max_cross.max(residual),
        });
    }

    SplitOutcome::Split(SplitFactors {
        v1,
        v2,
        reference_block: reference as u64,
        residual,
    })
}

enum PairTest {
    Pass { ratio: Complex64, max_cross: f64 },
    Fail { witness: (usize, usize), max_cross: f64 },
}

/// Cross-product proportionality of `v` against the non-zero reference `u`,
/// at threshold τ = tol·‖u‖·‖v‖.
///
/// One pass over the pivot row computes X_m = |u_p·v_m − u_m·v_p| with p
/// the largest-modulus entry of u. Since
/// |u_j·v_m − u_m·v_j| ≤ (|u_j|·X_m + |u_m|·X_j)/|u_p| ≤ 2·max X,
/// max X > τ certifies failure and 2·max X ≤ τ certifies that every pair
/// passes; only the band in between needs the exact all-pairs scan.
fn cross_test(
    u: &[Complex64],
    u_norm_sqr: f64,
    pivot: usize,
    v: &[Complex64],
    v_norm_sqr: f64,
    tol: f64,
) -> PairTest {
    let tau = tol * (u_norm_sqr * v_norm_sqr).sqrt();
    let up = u[pivot];
    let vp = v[pivot];
    let mut max_sqr = -1.0f64;
    let mut arg = 0usize;
    let mut dot = Complex64::ZERO;
    for (t, (&ut, &vt)) in u.iter().zip(v).enumerate() {
        let d = up * vt - ut * vp;
        let ds = d.norm_sqr();
        if ds > max_sqr {
            max_sqr = ds;
            arg = t;
        }
        dot += ut.conj() * vt;
    }
    let max_cross = max_sqr.max(0.0).sqrt();
    let ratio = dot / u_norm_sqr;
    if max_cross > tau {
        PairTest::Fail {
            witness: ordered(pivot, arg),
            max_cross,
        }
    } else if 2.0 * max_cross <= tau {
        PairTest::Pass { ratio, max_cross }
    } else {
        let (exact_max, pair) = exact_cross_scan(u, v);
        if exact_max > tau {
            PairTest::Fail {
                witness: pair,
                max_cross: exact_max,
            }
        } else {
            PairTest::Pass {
                ratio,
                max_cross: exact_max,
            }
        }
    }
}

/// Exhaustive cross-product maximum over all entry pairs.
fn exact_cross_scan(u: &[Complex64], v: &[Complex64]) -> (f64, (usize, usize)) {
    let mut max_sqr = -1.0f64;
    let mut pair = (0usize, usize::from(u.len() > 1));
    for j in 0..u.len() {
        for m in j + 1..u.len() {
            let ds = (u[j] * v[m] - u[m] * v[j]).norm_sqr();
            if ds > max_sqr {
                max_sqr = ds;
                pair = (j, m);
            }
        }
    }
    (max_sqr.max(0.0).sqrt(), pair)
}

/// Largest cross product against the pivot row only.
fn pivot_row_max(u: &[Complex64], pivot: usize, v: &[Complex64]) -> (f64, (usize, usize)) {
    let up = u[pivot];
    let vp = v[pivot];
    let mut max_sqr = -1.0f64;
    let mut arg = 0usize;
    for (t, (&ut, &vt)) in u.iter().zip(v).enumerate() {
        let ds = (up * vt - ut * vp).norm_sqr();
        if ds > max_sqr {
            max_sqr = ds;
            arg = t;
        }
    }
    (max_sqr.max(0.0).sqrt(), ordered(pivot, arg))
}

fn ordered(a: usize, b: usize) -> (usize, usize) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn norm_sqr_of(xs: &[Complex64]) -> f64 {
    xs.iter().map(|x| x.norm_sqr()).sum()
}

fn argmax_abs(xs: &[Complex64]) -> usize {
    let mut best = 0usize;
    let mut best_sqr = -1.0f64;
    for (t, x) in xs.iter().enumerate() {
        let s = x.norm_sqr();
        if s > best_sqr {
            best_sqr = s;
            best = t;
        }
    }
    best
}

fn argmax_f64(xs: &[f64]) -> usize {
    let mut best = 0usize;
    let mut best_val = f64::NEG_INFINITY;
    for (t, &x) in xs.iter().enumerate() {
        if x > best_val {
            best_val = x;
            best = t;
        }
    }
    best
}
