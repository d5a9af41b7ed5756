//! `qsep` — product-state vs genuine-entanglement analysis of n-qubit pure
//! states from JSON coefficient-vector files.
//!
//! Exit codes: 0 product, 1 genuinely entangled, 2 error, 3 verify-mode
//! disagreement between the block method and the minor oracle.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qsep::{
    full_factorize, oracle_verdict, random::random_product, read_state, write_state,
    FactorizationReport, FactorizeOptions, PureState, Verdict,
};

#[derive(Parser)]
#[command(
    name = "qsep",
    about = "Decide whether an n-qubit pure state is a product state or genuinely entangled",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a state file: verdict, factor partition or certificate.
    Analyze {
        /// JSON state file: {"n": <int>, "amplitudes": [[re, im], ...]}.
        state: PathBuf,
        #[command(flatten)]
        flags: AnalysisFlags,
    },
    /// Analyze and additionally write each factor to its own state file.
    Factorize {
        state: PathBuf,
        #[command(flatten)]
        flags: AnalysisFlags,
    },
    /// Write a named or randomly generated state file.
    Generate {
        #[command(subcommand)]
        kind: GenerateKind,
    },
    /// Print per-n scan counts and a timed entangled-verdict scan.
    Bench {
        /// First qubit count.
        #[arg(long, default_value_t = 2)]
        from: usize,
        /// Last qubit count.
        #[arg(long, default_value_t = 10)]
        to: usize,
        #[command(flatten)]
        flags: AnalysisFlags,
    },
}

#[derive(Args)]
struct AnalysisFlags {
    /// Relative tolerance for proportionality, zero blocks and residuals.
    #[arg(long = "tol", default_value_t = qsep::DEFAULT_TOLERANCE)]
    tolerance: f64,
    /// Cross-check the verdict against the independent minor-based oracle.
    #[arg(long)]
    verify: bool,
    /// Scan bipartitions in parallel (the result is deterministic).
    #[arg(long)]
    parallel: bool,
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report to this path instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Refuse states with more qubits than this.
    #[arg(long = "max-n", default_value_t = 24)]
    max_n: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum GenerateKind {
    /// (|0…0> + |1…1>)/sqrt(2).
    Ghz(NamedArgs),
    /// Equal superposition of the Hamming-weight-1 kets.
    W(NamedArgs),
    /// Equal superposition of the Hamming-weight-i kets.
    Dicke {
        #[arg(long)]
        n: usize,
        /// Excitation number.
        #[arg(long)]
        i: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Normalized sum of the weight-1 and weight-(n-1) Dicke states.
    Dw(NamedArgs),
    /// Normalized sum of the GHZ and W states.
    Ghzw(NamedArgs),
    /// The three-qubit state (|001> + |010> + |100> + |111>)/2.
    Zeta {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Seeded random product state over a known partition, with a sidecar
    /// file recording the ground truth.
    ProductRandom {
        /// Partition of the qubit labels, e.g. "1,3|2,4".
        #[arg(long)]
        partition: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct NamedArgs {
    /// Qubit count.
    #[arg(long)]
    n: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Everything a report consumer needs, in one JSON object (see
/// schema/report.schema.json).
#[derive(Serialize)]
struct CliReport {
    n: usize,
    norm: f64,
    tolerance: f64,
    #[serde(flatten)]
    analysis: FactorizationReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_verdict: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    methods_agree: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    factor_files: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reconstruction_residual: Option<f64>,
}

fn main() -> std::process::ExitCode {
    match run(Cli::parse()) {
        Ok(code) => std::process::ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Analyze { state, flags } => analyze(&state, &flags, false),
        Command::Factorize { state, flags } => analyze(&state, &flags, true),
        Command::Generate { kind } => generate(kind),
        Command::Bench { from, to, flags } => bench(from, to, &flags),
    }
}

fn validate_flags(flags: &AnalysisFlags) -> Result<()> {
    if !(flags.tolerance > 0.0 && flags.tolerance <= 1e-2) {
        bail!(
            "--tol must lie in (0, 1e-2], got {}",
            flags.tolerance
        );
    }
    if flags.max_n > 24 {
        eprintln!(
            "warning: --max-n {} admits states of up to {} amplitudes; memory grows as 2^n",
            flags.max_n,
            1u64 << flags.max_n.min(63)
        );
    }
    Ok(())
}

fn analyze(state_path: &Path, flags: &AnalysisFlags, write_factors: bool) -> Result<u8> {
    validate_flags(flags)?;
    let state = read_state(state_path).with_context(|| format!("loading {}", state_path.display()))?;
    if state.n() > flags.max_n {
        bail!(
            "state has {} qubits, above the --max-n limit of {}",
            state.n(),
            flags.max_n
        );
    }
    let options = FactorizeOptions {
        tolerance: flags.tolerance,
        parallel: flags.parallel,
    };
    let analysis = full_factorize(&state, options);
    let verdict = analysis.verdict;

    let mut report = CliReport {
        n: state.n(),
        norm: state.norm(),
        tolerance: flags.tolerance,
        analysis,
        oracle_verdict: None,
        methods_agree: None,
        factor_files: None,
        reconstruction_residual: None,
    };

    let mut disagreement = false;
    if flags.verify {
        if state.n() >= 2 {
            let oracle = oracle_verdict(&state, flags.tolerance)?;
            let ours = verdict == Verdict::GenuinelyEntangled;
            report.oracle_verdict = Some(oracle);
            report.methods_agree = Some(oracle == ours);
            if oracle != ours {
                disagreement = true;
                eprintln!(
                    "VERIFY FAILED: block method says {}, minor oracle says {}",
                    verdict_word(verdict),
                    if oracle { "genuinely entangled" } else { "product" }
                );
            }
        } else {
            report.oracle_verdict = Some(false);
            report.methods_agree = Some(true);
        }
    }

    if write_factors {
        if verdict == Verdict::Product {
            if state.n() == 1 {
                eprintln!("warning: single-qubit state, nothing to split");
            }
            let mut files = Vec::new();
            for (k, factor) in report.analysis.factors.iter().enumerate() {
                let path = factor_file_path(state_path, k + 1);
                write_state(&path, &factor.state)
                    .with_context(|| format!("writing {}", path.display()))?;
                files.push(path.display().to_string());
            }
            let rebuilt = qsep::reconstruct(&report.analysis)?;
            let residual = max_abs_diff(&rebuilt, &state);
            report.factor_files = Some(files);
            report.reconstruction_residual = Some(residual);
        } else {
            report.factor_files = Some(Vec::new());
        }
    }

    let rendered = match flags.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report)?;
            s.push('\n');
            s
        }
        Format::Text => render_text(&report),
    };
    emit(flags.out.as_deref(), &rendered)?;

    Ok(if disagreement {
        3
    } else if verdict == Verdict::GenuinelyEntangled {
        1
    } else {
        0
    })
}

fn factor_file_path(state_path: &Path, k: usize) -> PathBuf {
    let stem = state_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "state".into());
    let name = format!("{stem}.factor-{k}.json");
    state_path.with_file_name(name)
}

fn verdict_word(v: Verdict) -> &'static str {
    match v {
        Verdict::Product => "product",
        Verdict::GenuinelyEntangled => "genuinely entangled",
    }
}

fn render_text(report: &CliReport) -> String {
    let mut out = String::new();
    let a = &report.analysis;
    let _ = writeln!(
        out,
        "state: n={}, {} amplitudes, norm {:.12}",
        report.n,
        1usize << report.n,
        report.norm
    );
    let _ = writeln!(out, "tolerance: {:e}", report.tolerance);
    match a.verdict {
        Verdict::Product => {
            let partition: Vec<String> = a.factors.iter().map(|f| f.qubits.to_string()).collect();
            let _ = writeln!(out, "verdict: PRODUCT: {}", partition.join(" ⊗ "));
            let _ = writeln!(out, "factors:");
            for f in &a.factors {
                let _ = writeln!(out, "  {}: {} amplitudes", f.qubits, f.state.dim());
            }
            let _ = writeln!(out, "max split residual: {:.3e}", a.residual);
        }
        Verdict::GenuinelyEntangled => {
            let _ = writeln!(out, "verdict: GENUINELY ENTANGLED");
            let _ = writeln!(out, "certificate: {} failing bipartitions", a.certificate.len());
            const SHOW: usize = 16;
            for w in a.certificate.iter().take(SHOW) {
                let _ = writeln!(
                    out,
                    "  {} mover {}: blocks ({},{}), entries ({},{}), cross {:.3e}",
                    w.bipartition,
                    w.bipartition.mover(),
                    w.blocks.0,
                    w.blocks.1,
                    w.entries.0,
                    w.entries.1,
                    w.residual
                );
            }
            if a.certificate.len() > SHOW {
                let _ = writeln!(
                    out,
                    "  ... and {} more (use --format json for the full list)",
                    a.certificate.len() - SHOW
                );
            }
        }
    }
    let _ = writeln!(
        out,
        "bipartitions examined: {} of {} (permutation budget {})",
        a.splits_examined, a.bipartition_count, a.permutation_budget
    );
    if let Some(files) = &report.factor_files {
        for f in files {
            let _ = writeln!(out, "factor file: {f}");
        }
    }
    if let Some(residual) = report.reconstruction_residual {
        let _ = writeln!(out, "reconstruction residual: {residual:.3e}");
    }
    if let (Some(oracle), Some(agree)) = (report.oracle_verdict, report.methods_agree) {
        let _ = writeln!(
            out,
            "oracle verdict: {} ({})",
            if oracle { "genuinely entangled" } else { "product" },
            if agree { "methods agree" } else { "METHODS DISAGREE" }
        );
    }
    out
}

fn emit(out: Option<&Path>, rendered: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, rendered)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{rendered}"),
    }
    Ok(())
}

fn generate(kind: GenerateKind) -> Result<u8> {
    let (state, out, sidecar): (PureState, Option<PathBuf>, Option<(PathBuf, String)>) = match kind
    {
        GenerateKind::Ghz(args) => (PureState::ghz(args.n)?, args.out, None),
        GenerateKind::W(args) => (PureState::w(args.n)?, args.out, None),
        GenerateKind::Dicke { n, i, out } => (PureState::dicke(i, n)?, out, None),
        GenerateKind::Dw(args) => (PureState::dw(args.n)?, args.out, None),
        GenerateKind::Ghzw(args) => (PureState::ghz_plus_w(args.n)?, args.out, None),
        GenerateKind::Zeta { out } => (PureState::zeta3(), out, None),
        GenerateKind::ProductRandom {
            partition,
            seed,
            out,
        } => {
            let blocks = parse_partition(&partition)?;
            let mut rng = seeded_rng(seed);
            let state = random_product(&blocks, &mut rng)?;
            let truth = serde_json::json!({ "partition": blocks, "seed": seed });
            let sidecar = out.as_ref().map(|path| {
                (
                    sidecar_path(path),
                    format!("{}\n", serde_json::to_string(&truth).expect("valid json")),
                )
            });
            if out.is_none() {
                eprintln!("note: no --out given, ground-truth sidecar not written");
            }
            (state, out, sidecar)
        }
    };

    match &out {
        Some(path) => {
            write_state(path, &state).with_context(|| format!("writing {}", path.display()))?
        }
        None => {
            let file = qsep::StateFile::from(&state);
            println!("{}", serde_json::to_string(&file)?);
        }
    }
    if let Some((path, contents)) = sidecar {
        std::fs::write(&path, contents)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(0)
}

fn sidecar_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "state".into());
    out.with_file_name(format!("{stem}.truth.json"))
}

fn parse_partition(pattern: &str) -> Result<Vec<Vec<usize>>> {
    let mut blocks = Vec::new();
    for part in pattern.split('|') {
        let mut block = Vec::new();
        for item in part.split(',') {
            let item = item.trim();
            if item.is_empty() {
                bail!("empty label in partition {pattern:?}");
            }
            block.push(
                item.parse::<usize>()
                    .with_context(|| format!("bad label {item:?} in partition {pattern:?}"))?,
            );
        }
        blocks.push(block);
    }
    if blocks.is_empty() {
        bail!("empty partition");
    }
    Ok(blocks)
}

/// Small deterministic RNG wrapper so `generate` stays reproducible.
fn seeded_rng(seed: u64) -> impl rand::Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Serialize)]
struct BenchRow {
    n: usize,
    bipartitions: u64,
    permutation_budget: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    generalized_concurrences: Option<u64>,
    ghz_scan_ms: f64,
}

/// Generalized-concurrence counts quoted for comparison (qubit counts 2-10).
const CONCURRENCE_COUNTS: [u64; 9] = [
    2, 18, 112, 600, 2976, 14112, 65024, 293760, 1308160,
];

fn bench(from: usize, to: usize, flags: &AnalysisFlags) -> Result<u8> {
    validate_flags(flags)?;
    if from < 2 || from > to {
        bail!("need 2 <= from <= to, got {from}..{to}");
    }
    if to > flags.max_n {
        bail!("--to {to} above the --max-n limit of {}", flags.max_n);
    }
    let options = FactorizeOptions {
        tolerance: flags.tolerance,
        parallel: flags.parallel,
    };
    let mut rows = Vec::new();
    for n in from..=to {
        let ghz = PureState::ghz(n)?;
        let started = Instant::now();
        let check = qsep::is_genuinely_entangled(&ghz, options)?;
        let ghz_scan_ms = started.elapsed().as_secs_f64() * 1e3;
        if !check.genuinely_entangled {
            bail!("ghz({n}) unexpectedly reported separable");
        }
        rows.push(BenchRow {
            n,
            bipartitions: qsep::bipartition_count(n)?,
            permutation_budget: qsep::permutation_budget(n)?,
            generalized_concurrences: n
                .checked_sub(2)
                .and_then(|idx| CONCURRENCE_COUNTS.get(idx))
                .copied(),
            ghz_scan_ms,
        });
    }

    let rendered = match flags.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&rows)?;
            s.push('\n');
            s
        }
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "{:>3} {:>12} {:>12} {:>12} {:>12}", "n", "D", "budget", "Q", "ghz scan");
            for r in &rows {
                let q = r
                    .generalized_concurrences
                    .map(|q| q.to_string())
                    .unwrap_or_else(|| "-".into());
                let _ = writeln!(
                    out,
                    "{:>3} {:>12} {:>12} {:>12} {:>9.2} ms",
                    r.n, r.bipartitions, r.permutation_budget, q, r.ghz_scan_ms
                );
            }
            out
        }
    };
    emit(flags.out.as_deref(), &rendered)?;
    Ok(0)
}

fn max_abs_diff(a: &PureState, b: &PureState) -> f64 {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
