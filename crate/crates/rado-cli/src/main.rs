//! `rado` — train and benchmark boosters on Rademacher observations,
//! release rado sets (uniform, fixed-support, exhaustive, or
//! differentially private), and probe what a release leaks.
//!
//! Exit codes: 0 success, 2 input error, 3 numeric failure, 4 the private
//! sampler ran out of draw budget.

use std::fs::File;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rado_core::dataset::{load_csv, Dataset, LabelColumn, PositiveRule};
use rado_core::error::{Error, Result};
use rado_core::harness::{
    run_cv_experiment, run_noise_sweep, train_full, Algorithm, ExperimentSpec, NoiseSweepSpec,
    RadoStrategy, DEFAULT_MAX_RADOS,
};
use rado_core::losses::{equivalence_gap_exact, LinearModel};
use rado_core::privacy::{dpfreal, DpFeatureConfig};
use rado_core::rado::{
    enumerate_all_signatures, sample_fixed_support_signatures, sample_uniform_signatures,
    Provenance, RadoSet, Signature,
};
use rado_core::reconstruction::{hausdorff, recover_edges, signatures_to_selection};
use rado_core::seed::mix;
use rado_core::tolerances::{EQUIVALENCE_GAP_ABS, ENUMERATION_LIMIT_LOG2};

#[derive(Parser)]
#[command(
    name = "rado",
    version,
    about = "Learning and private data release with Rademacher observations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train on the full dataset and emit the model as JSON.
    Train(TrainArgs),
    /// Stratified cross-validated benchmark; emits result JSON.
    Bench(BenchArgs),
    /// Gaussian-noise sweep over the rados; emits summary (and raw) CSV.
    Sweep(SweepArgs),
    /// Rado-set utilities.
    #[command(subcommand)]
    Rado(RadoCmd),
    /// Release n rados that are ε-differentially private in one boolean
    /// feature (interval rejection sampling).
    DpSample(DpSampleArgs),
    /// Recover edge vectors from released rados and their signatures.
    Reconstruct(ReconstructArgs),
    /// Loss identities.
    #[command(subcommand)]
    Losses(LossesCmd),
}

#[derive(Subcommand)]
enum RadoCmd {
    /// Generate a rado set from a dataset and write it as CSV.
    Gen(GenArgs),
}

#[derive(Subcommand)]
enum LossesCmd {
    /// Verify that the exhaustive exponential rado risk reproduces the
    /// logistic loss on random instances (or on --data).
    Check(LossesCheckArgs),
}

/// Flags shared by every command that reads a labeled CSV.
#[derive(Args)]
struct DataArgs {
    /// Input CSV; one column holds the label, the rest are numeric.
    #[arg(long)]
    data: PathBuf,
    /// Label column, by header name or 0-based index.
    #[arg(long = "label-col", default_value = "label")]
    label_col: String,
    /// Cells mapped to +1: a comma-separated value set, or ">x" for a
    /// numeric threshold.
    #[arg(long, default_value = "1")]
    positive: String,
}

impl DataArgs {
    fn load(&self) -> Result<Dataset> {
        load_csv(
            &self.data,
            &LabelColumn::parse(&self.label_col),
            &PositiveRule::parse(&self.positive)?,
        )
    }
}

/// Flags shared by the training-style commands.
#[derive(Args)]
struct SpecArgs {
    /// Learner: "radoboost" (rado space) or "adaboost-ss" (example space).
    #[arg(long, default_value = "radoboost")]
    algo: String,
    /// Boosting rounds.
    #[arg(long = "T", default_value_t = 1000)]
    rounds: usize,
    /// Rados per training set; default min(1000, ⌊m/2⌋).
    #[arg(long)]
    n: Option<usize>,
    /// Rado source: uniform | support=F | dp:J,EPS | all.
    #[arg(long = "rado", default_value = "uniform")]
    strategy: String,
    /// Weak learner: strong | clamped[:floor] | median | lambda:x.
    #[arg(long, default_value = "strong")]
    weak: String,
    /// Leveraging divisor κ ≥ 1.
    #[arg(long, default_value_t = 1.0)]
    kappa: f64,
    /// Master seed; everything downstream derives from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Keep features at their raw scale (skip max-abs column scaling).
    #[arg(long = "no-scale", default_value_t = false)]
    no_scale: bool,
}

impl SpecArgs {
    fn spec(&self, folds: usize) -> Result<ExperimentSpec> {
        let mut spec = ExperimentSpec::new(Algorithm::parse(&self.algo)?);
        spec.strategy = RadoStrategy::parse(&self.strategy)?;
        spec.rounds = self.rounds;
        spec.n_rados = self.n;
        spec.weak = rado_core::boosting::WeakLearnerKind::parse(&self.weak)?;
        spec.kappa = self.kappa;
        spec.folds = folds;
        spec.seed = self.seed;
        spec.max_abs_scale = !self.no_scale;
        if let RadoStrategy::DpFeature { epsilon, .. } = spec.strategy {
            warn_weak_epsilon(epsilon);
        }
        Ok(spec)
    }
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    spec: SpecArgs,
    /// Model JSON path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    spec: SpecArgs,
    /// Stratified folds.
    #[arg(long, default_value_t = 10)]
    folds: usize,
    /// Result JSON path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long, default_value_t = 10)]
    folds: usize,
    /// Comma-separated Gaussian noise levels, e.g. "0,0.5,1".
    #[arg(long)]
    sigmas: String,
    /// Noisy re-draws per level.
    #[arg(long, default_value_t = 1)]
    repeats: usize,
    /// Summary CSV path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Optional per-run CSV (one row per σ × repeat × algorithm).
    #[arg(long = "runs-out")]
    runs_out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Rado source: uniform | support=F | dp:J,EPS | all.
    #[arg(long = "rado", default_value = "uniform")]
    strategy: String,
    /// Rados to generate; default min(1000, ⌊m/2⌋). Ignored by "all".
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output rado CSV.
    #[arg(long)]
    out: PathBuf,
    /// Also write the generating signatures (needed to reconstruct).
    #[arg(long = "signatures-out")]
    signatures_out: Option<PathBuf>,
}

#[derive(Args)]
struct DpSampleArgs {
    #[command(flatten)]
    data: DataArgs,
    /// 0-based index of the protected boolean feature.
    #[arg(long = "j-star")]
    j_star: usize,
    /// Per-rado privacy budget ε.
    #[arg(long)]
    epsilon: f64,
    /// Rados to release.
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output rado CSV.
    #[arg(long)]
    out: PathBuf,
    /// Release ledger JSON (window, draws, budget, ε-spend); stdout when
    /// absent.
    #[arg(long = "meta-out")]
    meta_out: Option<PathBuf>,
    /// Also write the accepted signatures.
    #[arg(long = "signatures-out")]
    signatures_out: Option<PathBuf>,
}

#[derive(Args)]
struct ReconstructArgs {
    /// Rado CSV (as written by `rado gen` / `dp-sample`).
    #[arg(long)]
    rados: PathBuf,
    /// Signature CSV (as written with --signatures-out).
    #[arg(long)]
    signatures: PathBuf,
    #[command(flatten)]
    data: DataArgs,
    /// Recovered-edge CSV path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LossesCheckArgs {
    /// Verify on this dataset instead of random instances (m ≤ 20).
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long = "label-col", default_value = "label")]
    label_col: String,
    #[arg(long, default_value = "1")]
    positive: String,
    /// Random instances to draw (ignored with --data).
    #[arg(long, default_value_t = 50)]
    cases: usize,
    /// Random models per instance.
    #[arg(long, default_value_t = 5)]
    models: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli.command) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Train(args) => cmd_train(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Rado(RadoCmd::Gen(args)) => cmd_gen(args),
        Command::DpSample(args) => cmd_dp_sample(args),
        Command::Reconstruct(args) => cmd_reconstruct(args),
        Command::Losses(LossesCmd::Check(args)) => cmd_losses_check(args),
    }
}

fn warn_weak_epsilon(epsilon: f64) {
    if epsilon > 1.0 {
        eprintln!(
            "warning: ε = {epsilon} > 1 gives only a weak formal guarantee; \
             the release is near-deterministic in the protected feature"
        );
    }
}

fn write_text(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        }),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn cmd_train(args: TrainArgs) -> Result<()> {
    let started = Instant::now();
    let dataset = args.data.load()?;
    let model = train_full(&dataset, &args.spec.spec(10)?)?;
    write_text(&args.out, &model.to_json()?)?;
    eprintln!("train finished in {:.2?}", started.elapsed());
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    let started = Instant::now();
    let dataset = args.data.load()?;
    let result = run_cv_experiment(&dataset, &args.spec.spec(args.folds)?)?;
    write_text(&args.out, &result.to_json()?)?;
    eprintln!(
        "bench finished in {:.2?}: mean {:.2}% ± {:.2}",
        started.elapsed(),
        result.mean_error,
        result.std_error
    );
    Ok(())
}

fn parse_sigmas(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("noise level \"{s}\" is not numeric")))
        })
        .collect()
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let started = Instant::now();
    let dataset = args.data.load()?;
    let sweep = NoiseSweepSpec {
        base: args.spec.spec(args.folds)?,
        sigmas: parse_sigmas(&args.sigmas)?,
        repeats: args.repeats,
    };
    let result = run_noise_sweep(&dataset, &sweep)?;
    match &args.out {
        Some(path) => {
            let file = File::create(path).map_err(io_err(path))?;
            result.write_summary_csv(file)?;
        }
        None => result.write_summary_csv(std::io::stdout().lock())?,
    }
    if let Some(path) = &args.runs_out {
        let file = File::create(path).map_err(io_err(path))?;
        result.write_runs_csv(file)?;
    }
    eprintln!("sweep finished in {:.2?}", started.elapsed());
    Ok(())
}

fn default_n(m: usize) -> usize {
    DEFAULT_MAX_RADOS.min(m / 2).max(1)
}

fn save_signatures(path: &Path, signatures: &[Signature]) -> Result<()> {
    let m = match signatures.first() {
        Some(s) => s.len(),
        None => return Err(Error::InvalidInput("no signatures to save".into())),
    };
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    let header: Vec<String> = (1..=m).map(|i| format!("s_{i}")).collect();
    writer
        .write_record(&header)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    for sig in signatures {
        let rec: Vec<String> = sig.entries().iter().map(|v| v.to_string()).collect();
        writer
            .write_record(&rec)
            .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    }
    writer.flush().map_err(io_err(path))
}

fn load_signatures(path: &Path) -> Result<Vec<Signature>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    let mut signatures = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            row: idx + 2,
            column: "-".into(),
            message: e.to_string(),
        })?;
        let entries = record
            .iter()
            .map(|cell| {
                cell.parse::<i8>().map_err(|_| Error::Parse {
                    path: path.to_path_buf(),
                    row: idx + 2,
                    column: "-".into(),
                    message: format!("\"{cell}\" is not ±1"),
                })
            })
            .collect::<Result<Vec<i8>>>()?;
        signatures.push(Signature::new(entries)?);
    }
    if signatures.is_empty() {
        return Err(Error::EmptyData {
            path: path.to_path_buf(),
        });
    }
    Ok(signatures)
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    let dataset = args.data.load()?;
    let m = dataset.m();
    let n = args.n.unwrap_or_else(|| default_n(m));
    let strategy = RadoStrategy::parse(&args.strategy)?;
    // The generation seed is mixed exactly like a benchmark's training
    // run, so `rado gen` reproduces what `train` consumed.
    let rado_seed = mix(args.seed, "train-rado", 0);
    let (signatures, provenance) = match strategy {
        RadoStrategy::Uniform => (
            sample_uniform_signatures(m, n, rado_seed)?,
            Provenance::Uniform { seed: rado_seed },
        ),
        RadoStrategy::FixedSupportFraction(f) => {
            let m_star = ((f * m as f64).round() as usize).clamp(1, m);
            (
                sample_fixed_support_signatures(&dataset.labels(), m_star, n, rado_seed)?,
                Provenance::FixedSupport {
                    m_star,
                    seed: rado_seed,
                },
            )
        }
        RadoStrategy::DpFeature { j_star, epsilon } => {
            warn_weak_epsilon(epsilon);
            let sample = dpfreal(
                &dataset,
                &DpFeatureConfig {
                    j_star,
                    epsilon,
                    n,
                    seed: rado_seed,
                },
            )?;
            sample.rado_set.save_csv(&args.out)?;
            if let Some(sig_path) = &args.signatures_out {
                save_signatures(sig_path, &sample.signatures)?;
            }
            eprintln!(
                "released {} private rados after {} draws",
                sample.meta.n, sample.meta.n_draws
            );
            return Ok(());
        }
        RadoStrategy::All => (
            enumerate_all_signatures(m, ENUMERATION_LIMIT_LOG2)?,
            Provenance::Exhaustive,
        ),
    };
    let set = RadoSet::from_signatures(&dataset, &signatures, provenance)?;
    set.save_csv(&args.out)?;
    if let Some(sig_path) = &args.signatures_out {
        save_signatures(sig_path, &signatures)?;
    }
    eprintln!("wrote {} rados of dimension {}", set.n(), set.d());
    Ok(())
}

fn cmd_dp_sample(args: DpSampleArgs) -> Result<()> {
    let started = Instant::now();
    warn_weak_epsilon(args.epsilon);
    let dataset = args.data.load()?;
    let sample = dpfreal(
        &dataset,
        &DpFeatureConfig {
            j_star: args.j_star,
            epsilon: args.epsilon,
            n: args.n,
            seed: args.seed,
        },
    )?;
    sample.rado_set.save_csv(&args.out)?;
    if let Some(sig_path) = &args.signatures_out {
        save_signatures(sig_path, &sample.signatures)?;
    }
    let meta = serde_json::to_string_pretty(&sample.meta)
        .map_err(|e| Error::Numeric(format!("meta serialization failed: {e}")))?;
    write_text(&args.meta_out, &meta)?;
    eprintln!(
        "dp-sample finished in {:.2?}: {} accepted / {} drawn",
        started.elapsed(),
        sample.meta.n,
        sample.meta.n_draws
    );
    Ok(())
}

fn cmd_reconstruct(args: ReconstructArgs) -> Result<()> {
    let dataset = args.data.load()?;
    let rado_set = RadoSet::load_csv(&args.rados)?;
    let signatures = load_signatures(&args.signatures)?;
    let selection = signatures_to_selection(&signatures, &dataset.labels())?;
    let recovery = recover_edges(&rado_set, &selection)?;

    let mut csv_text = String::new();
    csv_text.push_str(&dataset.feature_names().join(","));
    csv_text.push('\n');
    for row in &recovery.edges {
        let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        csv_text.push_str(&cells.join(","));
        csv_text.push('\n');
    }
    match &args.out {
        Some(path) => std::fs::write(path, &csv_text).map_err(io_err(path))?,
        None => print!("{csv_text}"),
    }

    let truth: Vec<Vec<f64>> = dataset.examples().iter().map(|e| e.edge_vector()).collect();
    let gap = hausdorff(&recovery.edges, &truth)?;
    let summary = serde_json::json!({
        "rank": recovery.rank,
        "residual": recovery.residual,
        "hausdorff_to_true_edges": gap,
    });
    if args.out.is_some() {
        println!("{summary:#}");
    } else {
        eprintln!("{summary:#}");
    }
    Ok(())
}

fn cmd_losses_check(args: LossesCheckArgs) -> Result<()> {
    use rado_core::dataset::Example;
    // Self-contained xorshift stream; the check needs variety, not
    // statistical quality, and this keeps the CLI free of rand.
    let mut state = args.seed.wrapping_mul(2862933555777941757).wrapping_add(1);
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    let mut uniform = move |lo: f64, hi: f64| {
        let u = (next() >> 11) as f64 / (1u64 << 53) as f64;
        lo + (hi - lo) * u
    };

    let mut worst = 0.0f64;
    let mut cases = 0usize;
    if let Some(path) = &args.data {
        let dataset = load_csv(
            path,
            &LabelColumn::parse(&args.label_col),
            &PositiveRule::parse(&args.positive)?,
        )?;
        for _ in 0..args.models.max(1) {
            let theta: Vec<f64> = (0..dataset.d()).map(|_| uniform(-1.5, 1.5)).collect();
            let gap = equivalence_gap_exact(&dataset, &LinearModel { theta }, 20)?;
            worst = worst.max(gap);
            cases += 1;
        }
    } else {
        for _ in 0..args.cases.max(1) {
            let m = 1 + (next() % 12) as usize;
            let d = 1 + (next() % 6) as usize;
            let examples: Vec<Example> = (0..m)
                .map(|_| {
                    let x: Vec<f64> = (0..d).map(|_| uniform(-2.0, 2.0)).collect();
                    let y = if next() & 1 == 1 { 1 } else { -1 };
                    Example::new(x, y)
                })
                .collect::<Result<Vec<_>>>()?;
            let dataset = Dataset::new(examples)?;
            for _ in 0..args.models.max(1) {
                let theta: Vec<f64> = (0..d).map(|_| uniform(-1.5, 1.5)).collect();
                let gap = equivalence_gap_exact(&dataset, &LinearModel { theta }, 12)?;
                worst = worst.max(gap);
                cases += 1;
            }
        }
    }

    let pass = worst <= EQUIVALENCE_GAP_ABS;
    let report = serde_json::json!({
        "cases": cases,
        "worst_gap": worst,
        "tolerance": EQUIVALENCE_GAP_ABS,
        "pass": pass,
    });
    println!("{report:#}");
    if pass {
        Ok(())
    } else {
        Err(Error::Numeric(format!(
            "loss identity violated: worst gap {worst:.3e} > {EQUIVALENCE_GAP_ABS:.1e}"
        )))
    }
}
