//! Decide whether an n-qubit pure state is a product state or genuinely
//! entangled, and construct the explicit finest factorization when one
//! exists.
//!
//! The decision rests on a single primitive: a coefficient vector splits as
//! a tensor product across a prefix at width i exactly when, viewed as 2^i
//! stacked blocks, all of its non-zero blocks are mutually proportional.
//! Prefix splits of permuted copies of the state cover every unordered
//! bipartition of the qubits, so a state is genuinely entangled exactly when
//! all 2^{n−1} − 1 canonical cuts fail the proportionality test — and when
//! some cut passes, the block ratios hand back the factors explicitly,
//! which recursion refines into the finest decomposition.
//!
//! Modules:
//! - [`state`]: coefficient vectors, named states, tensor composition;
//! - [`perm`]: qubit permutations and the canonical bipartition enumeration;
//! - [`block`]: block views, proportionality, factor construction at a cut;
//! - [`factor`]: the search/recursion driver and report types;
//! - [`oracle`]: an independent minor-based cross-check;
//! - [`io`]: the JSON state-file format;
//! - [`random`]: seeded random states and products.
//!
//! # Example
//!
//! ```
//! use qsep::{full_factorize, FactorizeOptions, PureState, Verdict};
//!
//! let ghz = PureState::ghz(3).unwrap();
//! let report = full_factorize(&ghz, FactorizeOptions::default());
//! assert_eq!(report.verdict, Verdict::GenuinelyEntangled);
//! assert_eq!(report.certificate.len(), 3); // one witness per bipartition
//!
//! // A product of two GHZ states factors back into its parts.
//! let product = ghz.tensor(&PureState::ghz(2).unwrap()).unwrap();
//! let report = full_factorize(&product, FactorizeOptions::default());
//! assert_eq!(report.verdict, Verdict::Product);
//! assert_eq!(report.factors.len(), 2);
//! assert_eq!(report.factors[0].qubits.labels(), &[1, 2, 3]);
//! ```

pub mod block;
pub mod factor;
pub mod io;
pub mod oracle;
pub mod perm;
pub mod random;
pub mod state;

/// Default relative tolerance for proportionality and residual checks.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

pub use block::{
    decompose_at, proportional, two_qubit_product_test, BlockError, BlockMatrix, BlockWitness,
    Proportionality, SplitFactors, SplitOutcome,
};
pub use factor::{
    assemble, find_split, full_factorize, is_genuinely_entangled, reconstruct, CutWitness,
    EntanglementCheck, Factor, FactorError, FactorizationReport, FactorizeOptions, SplitSearch,
    Verdict,
};
pub use io::{read_state, write_state, IoError, StateFile};
pub use oracle::{minor_test, oracle_verdict, CoefficientMatrix, OracleError};
pub use perm::{
    bipartition_count, bipartitions, enumerate_bipartitions, permutation_budget, Bipartition,
    PermError, QubitPermutation,
};
pub use state::{PureState, QubitLabelSet, StateError, MAX_QUBITS};
