//! Acceptance suite: one test per criterion, each printing a PASS line with
//! its measured numbers (run with `--nocapture` to see them).

use std::time::Instant;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qsep::{
    decompose_at, enumerate_bipartitions, full_factorize, is_genuinely_entangled, minor_test,
    oracle_verdict, permutation_budget, random::random_product, random::random_state, reconstruct,
    two_qubit_product_test, BlockMatrix, CoefficientMatrix, FactorizeOptions, PureState,
    QubitLabelSet, QubitPermutation, Verdict, DEFAULT_TOLERANCE,
};

const TOL: f64 = DEFAULT_TOLERANCE;

fn opts() -> FactorizeOptions {
    FactorizeOptions::default()
}

fn pass(num: usize, name: &str, detail: String) {
    println!("ACCEPTANCE {num} ({name}): PASS [{detail}]");
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn max_abs_diff(a: &PureState, b: &PureState) -> f64 {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[test]
fn criterion_1_count_reproduction() {
    let started = Instant::now();
    let expected_d: [u64; 9] = [1, 3, 7, 15, 31, 63, 127, 255, 511];
    for (n, &d) in (2..=10).zip(expected_d.iter()) {
        assert_eq!(enumerate_bipartitions(n).unwrap().len() as u64, d, "D at n={n}");
        assert_eq!(
            permutation_budget(n).unwrap(),
            (1u64 << (n - 1)) - (n as u64 - 1),
            "budget at n={n}"
        );
    }
    assert_eq!(permutation_budget(3).unwrap(), 2);
    assert_eq!(permutation_budget(4).unwrap(), 5);
    assert_eq!(permutation_budget(5).unwrap(), 12);
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    pass(
        1,
        "count reproduction",
        format!("D(2..10) and budgets exact in {elapsed:.2?}"),
    );
}

#[test]
fn criterion_2_reference_block_vectors() {
    let r2 = std::f64::consts::FRAC_1_SQRT_2;
    let r3 = 1.0 / 3f64.sqrt();
    let cases: [(PureState, [f64; 4], [f64; 4]); 3] = [
        (
            PureState::ghz(3).unwrap(),
            [r2, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, r2],
        ),
        (
            PureState::w(3).unwrap(),
            [0.0, r3, r3, 0.0],
            [r3, 0.0, 0.0, 0.0],
        ),
        (
            PureState::zeta3(),
            [0.0, 0.5, 0.5, 0.0],
            [0.5, 0.0, 0.0, 0.5],
        ),
    ];
    for (state, first, second) in &cases {
        let bm = BlockMatrix::new(state, 1).unwrap();
        for (entry, expected) in bm.block(0).iter().zip(first) {
            assert!((entry - c(*expected, 0.0)).norm() <= 1e-12);
        }
        for (entry, expected) in bm.block(1).iter().zip(second) {
            assert!((entry - c(*expected, 0.0)).norm() <= 1e-12);
        }
        let check = is_genuinely_entangled(state, opts()).unwrap();
        assert!(check.genuinely_entangled);
        assert_eq!(check.certificate.len(), 3);
    }
    pass(
        2,
        "reference block vectors",
        "GHZ/W/zeta block pairs within 1e-12; all three genuinely entangled".into(),
    );
}

#[test]
fn criterion_3_named_entangled_states() {
    let mut worst = (0.0f64, String::new());
    for n in 3..=8usize {
        let mut states: Vec<(String, PureState)> = vec![
            (format!("ghz({n})"), PureState::ghz(n).unwrap()),
            (format!("w({n})"), PureState::w(n).unwrap()),
            (format!("dw({n})"), PureState::dw(n).unwrap()),
            (format!("ghz+w({n})"), PureState::ghz_plus_w(n).unwrap()),
        ];
        if n == 5 {
            let d2 = PureState::dicke(2, 5).unwrap();
            let d3 = PureState::dicke(3, 5).unwrap();
            let sum: Vec<Complex64> = d2
                .amplitudes()
                .iter()
                .zip(d3.amplitudes())
                .map(|(a, b)| a + b)
                .collect();
            let s = PureState::new(5, sum).unwrap().normalized();
            states.push(("dicke(2,5)+dicke(3,5)".into(), s));
        }
        for (name, state) in states {
            let started = Instant::now();
            let check = is_genuinely_entangled(&state, opts()).unwrap();
            let elapsed = started.elapsed().as_secs_f64();
            assert!(check.genuinely_entangled, "{name} must be genuinely entangled");
            assert!(elapsed < 5.0, "{name} took {elapsed:.3}s");
            if elapsed > worst.0 {
                worst = (elapsed, name);
            }
        }
    }
    pass(
        3,
        "named entangled states",
        format!("all verdicts true; slowest {} at {:.3}s", worst.1, worst.0),
    );
}

/// All partitions of 1..=n into at least two blocks, via restricted growth
/// strings.
fn partition_shapes(n: usize) -> Vec<Vec<Vec<usize>>> {
    fn rec(a: &mut Vec<usize>, max_used: usize, n: usize, out: &mut Vec<Vec<Vec<usize>>>) {
        if a.len() == n {
            let blocks = max_used + 1;
            if blocks < 2 {
                return;
            }
            let mut shape = vec![Vec::new(); blocks];
            for (i, &b) in a.iter().enumerate() {
                shape[b].push(i + 1);
            }
            out.push(shape);
            return;
        }
        for b in 0..=max_used + 1 {
            a.push(b);
            rec(a, max_used.max(b), n, out);
            a.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut vec![0], 0, n, &mut out);
    out
}

#[test]
fn criterion_4_product_round_trip() {
    let started = Instant::now();
    let reps = 200u64;
    let mut runs = 0u64;
    let mut worst_residual = 0.0f64;
    for n in 2..=7usize {
        for (shape_idx, shape) in partition_shapes(n).iter().enumerate() {
            let mut rng =
                ChaCha8Rng::seed_from_u64((n as u64) << 32 | (shape_idx as u64) << 8 | 7);
            for _ in 0..reps {
                let s = random_product(shape, &mut rng).unwrap();
                let report = full_factorize(&s, opts());
                assert_eq!(
                    report.verdict,
                    Verdict::Product,
                    "n={n} shape {shape:?} must factor"
                );
                // Recovered partition refines or equals the construction.
                for f in &report.factors {
                    let containers = shape
                        .iter()
                        .filter(|block| f.qubits.labels().iter().all(|l| block.contains(l)))
                        .count();
                    assert_eq!(
                        containers, 1,
                        "factor {:?} not inside one construction block of {shape:?}",
                        f.qubits.labels()
                    );
                }
                let rebuilt = reconstruct(&report).unwrap();
                let residual = max_abs_diff(&rebuilt, &s);
                assert!(
                    residual <= 1e-9,
                    "reconstruction residual {residual} for shape {shape:?}"
                );
                worst_residual = worst_residual.max(residual);
                runs += 1;
            }
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 60.0, "took {elapsed:.1}s");
    pass(
        4,
        "product round trip",
        format!("{runs} factorizations, worst residual {worst_residual:.2e}, {elapsed:.1}s"),
    );
}

#[test]
fn criterion_5_oracle_equivalence() {
    let mut cut_checks = 0u64;
    let mut states_checked = 0u64;
    for n in 2..=6usize {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5EED + n as u64);
        let mut corpus: Vec<PureState> = Vec::new();
        // 200 random products over assorted shapes.
        let shapes = partition_shapes(n);
        for rep in 0..200 {
            let shape = &shapes[rep % shapes.len()];
            corpus.push(random_product(shape, &mut rng).unwrap());
        }
        // 150 generic random states.
        for _ in 0..150 {
            corpus.push(random_state(n, &mut rng));
        }
        // 50 named and structured states.
        let mut named: Vec<PureState> = vec![
            PureState::ghz(n).unwrap(),
            PureState::w(n).unwrap(),
            PureState::ghz_plus_w(n).unwrap(),
        ];
        for i in 0..=n {
            named.push(PureState::dicke(i, n).unwrap());
        }
        if n >= 3 {
            named.push(PureState::dw(n).unwrap());
            let zero = PureState::new(1, vec![Complex64::ONE, Complex64::ZERO]).unwrap();
            named.push(zero.tensor(&PureState::ghz(n - 1).unwrap()).unwrap());
        }
        if n == 3 {
            named.push(PureState::zeta3());
        }
        for k in 0..50 {
            corpus.push(named[k % named.len()].clone());
        }

        for s in &corpus {
            for bp in enumerate_bipartitions(n).unwrap() {
                let moved = bp.mover().apply(s).unwrap();
                let split = decompose_at(&moved, bp.width(), TOL).unwrap().is_split();
                let minors =
                    minor_test(&CoefficientMatrix::from_state(&moved, bp.width()).unwrap(), TOL);
                assert_eq!(split, minors, "cut {bp} disagrees on n={n}");
                cut_checks += 1;
            }
            let ours = is_genuinely_entangled(s, opts()).unwrap().genuinely_entangled;
            let oracle = oracle_verdict(s, TOL).unwrap();
            assert_eq!(ours, oracle, "verdict disagrees on n={n}");
            states_checked += 1;
        }
    }
    assert_eq!(states_checked, 2000);
    pass(
        5,
        "oracle equivalence",
        format!("{states_checked} states, {cut_checks} cut-level comparisons, 0 disagreements"),
    );
}

#[test]
fn criterion_6_two_qubit_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x2B);
    for rep in 0..1000 {
        let s = random_state(2, &mut rng);
        let closed = two_qubit_product_test(&s, TOL).unwrap();
        let split = decompose_at(&s, 1, TOL).unwrap().is_split();
        assert_eq!(closed, split, "disagreement at rep {rep}");
    }
    pass(
        6,
        "two-qubit closed form",
        "1000 random states, closed form matches the decomposition everywhere".into(),
    );
}

#[test]
fn criterion_7_middle_factor_regression() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xCA5E3);
    let mut runs = 0;
    while runs < 50 {
        let single = random_state(1, &mut rng);
        let pair = random_state(2, &mut rng);
        let p = pair.amplitudes();
        // Keep clearly away from the within-pair product boundary.
        if (p[1] * p[2] - p[0] * p[3]).norm() < 0.05 {
            continue;
        }
        let s = qsep::assemble(&[
            (QubitLabelSet::new([2], 3).unwrap(), single.clone()),
            (QubitLabelSet::new([1, 3], 3).unwrap(), pair.clone()),
        ])
        .unwrap();
        // Not decomposable at any prefix width without a permutation.
        for width in 1..=2 {
            assert!(
                !decompose_at(&s, width, TOL).unwrap().is_split(),
                "raw prefix split must fail at width {width}"
            );
        }
        // Decomposable after swapping qubits 1 and 2.
        let swapped = QubitPermutation::transposition(3, 1, 2)
            .unwrap()
            .apply(&s)
            .unwrap();
        assert!(decompose_at(&swapped, 1, TOL).unwrap().is_split());
        // The scan reports the same split.
        match qsep::find_split(&s, opts()).unwrap() {
            qsep::SplitSearch::Found { bipartition, .. } => {
                assert_eq!(bipartition.left().labels(), &[2]);
                assert_eq!(bipartition.right().labels(), &[1, 3]);
                assert_eq!(bipartition.mover().mapping(), &[2, 1, 3]);
            }
            qsep::SplitSearch::NoSplit { .. } => panic!("product state must split"),
        }
        runs += 1;
    }
    pass(
        7,
        "middle-factor regression",
        "50 random middle-qubit products: prefix fails, swap succeeds, split {2}|{1,3}".into(),
    );
}

fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..rest.len() {
            let v = rest.remove(i);
            prefix.push(v);
            rec(prefix, rest, out);
            prefix.pop();
            rest.insert(i, v);
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut (1..=n).collect(), &mut out);
    out
}

#[test]
fn criterion_8_symmetric_state_invariance() {
    let mut checks = 0u64;
    for n in 2..=6usize {
        let mut states = vec![PureState::ghz(n).unwrap(), PureState::w(n).unwrap()];
        for i in 0..=n {
            states.push(PureState::dicke(i, n).unwrap());
        }
        if n >= 3 {
            states.push(PureState::dw(n).unwrap());
        }
        for mapping in all_permutations(n) {
            let pi = QubitPermutation::from_mapping(mapping).unwrap();
            for s in &states {
                // Bitwise equality: symmetric states are exactly invariant.
                assert_eq!(pi.apply(s).unwrap(), *s);
                checks += 1;
            }
        }
    }
    pass(
        8,
        "symmetric-state invariance",
        format!("{checks} permutation applications, all exactly invariant"),
    );
}

#[test]
fn criterion_9_desk_scale_performance() {
    let s = PureState::ghz(16).unwrap();
    let started = Instant::now();
    let check = is_genuinely_entangled(&s, opts()).unwrap();
    let elapsed = started.elapsed().as_secs_f64();
    assert!(check.genuinely_entangled);
    assert_eq!(check.splits_examined, 32_767);
    assert_eq!(check.certificate.len(), 32_767);
    assert!(elapsed < 30.0, "ghz(16) scan took {elapsed:.1}s");
    pass(
        9,
        "desk-scale performance",
        format!("ghz(16): 65536 amplitudes, 32767 bipartitions in {elapsed:.2}s single-threaded"),
    );
}
