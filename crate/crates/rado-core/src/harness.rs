//! Experiment driver: stratified cross-validation benchmarks, full-data
//! training runs, and robustness sweeps over Gaussian rado noise.
//!
//! Error rates are reported in **percent**. The model evaluated on each
//! test fold is the best prefix of the boosting run — the earliest round
//! minimizing the run's own training objective — mirroring how iteration
//! counts are usually chosen when no validation split is available.

use std::io::Write;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baseline::adaboost_ss;
use crate::boosting::{radoboost, BoostConfig, BoostRun, BoostTrace, WeakLearnerKind};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::losses::{zero_one_error, LinearModel};
use crate::privacy::{dpfreal, gaussian_noisify, DpFeatureConfig};
use crate::rado::{
    enumerate_all_rados, sample_fixed_support_signatures, sample_uniform_signatures, Provenance,
    RadoSet,
};
use crate::seed::mix;
use crate::tolerances::ENUMERATION_LIMIT_LOG2;

/// Largest rado sample a benchmark draws per fold when none is requested;
/// smaller training splits fall back to ⌊m/2⌋.
pub const DEFAULT_MAX_RADOS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Algorithm {
    RadoBoost,
    AdaBoostSS,
}

impl Algorithm {
    pub fn parse(text: &str) -> Result<Self> {
        match text.trim() {
            "radoboost" => Ok(Algorithm::RadoBoost),
            "adaboost-ss" => Ok(Algorithm::AdaBoostSS),
            other => Err(Error::InvalidInput(format!(
                "unknown algorithm \"{other}\" (radoboost | adaboost-ss)"
            ))),
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Algorithm::RadoBoost => write!(f, "radoboost"),
            Algorithm::AdaBoostSS => write!(f, "adaboost-ss"),
        }
    }
}

/// How the per-fold rado set is produced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RadoStrategy {
    /// n iid uniform signatures.
    Uniform,
    /// n signatures of fixed support ⌈f·m⌋ (fraction of the training
    /// split, rounded, at least 1).
    FixedSupportFraction(f64),
    /// Rejection-sampled release that protects one boolean feature.
    DpFeature { j_star: usize, epsilon: f64 },
    /// Every signature (only for tiny training splits).
    All,
}

impl RadoStrategy {
    /// CLI syntax: `uniform`, `support=0.5`, `dp:3,1.0`, `all`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        match t {
            "uniform" => return Ok(RadoStrategy::Uniform),
            "all" => return Ok(RadoStrategy::All),
            _ => {}
        }
        if let Some(rest) = t.strip_prefix("support=") {
            let f: f64 = rest
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad support fraction \"{rest}\"")))?;
            if !(f > 0.0 && f <= 1.0) {
                return Err(Error::InvalidInput(format!(
                    "support fraction {f} outside (0, 1]"
                )));
            }
            return Ok(RadoStrategy::FixedSupportFraction(f));
        }
        if let Some(rest) = t.strip_prefix("dp:") {
            let (j, eps) = rest.split_once(',').ok_or_else(|| {
                Error::InvalidInput(format!("expected dp:FEATURE,EPSILON, got \"{t}\""))
            })?;
            let j_star: usize = j
                .trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad protected feature \"{j}\"")))?;
            let epsilon: f64 = eps
                .trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad epsilon \"{eps}\"")))?;
            return Ok(RadoStrategy::DpFeature { j_star, epsilon });
        }
        Err(Error::InvalidInput(format!(
            "unknown rado strategy \"{text}\" (uniform | support=F | dp:J,EPS | all)"
        )))
    }
}

impl std::fmt::Display for RadoStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RadoStrategy::Uniform => write!(f, "uniform"),
            RadoStrategy::FixedSupportFraction(frac) => write!(f, "support={frac}"),
            RadoStrategy::DpFeature { j_star, epsilon } => write!(f, "dp:{j_star},{epsilon}"),
            RadoStrategy::All => write!(f, "all"),
        }
    }
}

/// Everything a benchmark run depends on. Serialized into results so a
/// result file identifies its own configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub algo: Algorithm,
    /// Ignored by the example-space baseline.
    pub strategy: RadoStrategy,
    pub rounds: usize,
    /// Rados per fold; `None` = min(1000, ⌊m_train/2⌋).
    pub n_rados: Option<usize>,
    pub weak: WeakLearnerKind,
    pub kappa: f64,
    pub folds: usize,
    pub seed: u64,
    /// Divide each feature by its max absolute value over the full
    /// dataset before folding (boolean columns are unchanged).
    pub max_abs_scale: bool,
}

impl ExperimentSpec {
    pub fn new(algo: Algorithm) -> ExperimentSpec {
        ExperimentSpec {
            algo,
            strategy: RadoStrategy::Uniform,
            rounds: 1000,
            n_rados: None,
            weak: WeakLearnerKind::Strong,
            kappa: 1.0,
            folds: 10,
            seed: 0,
            max_abs_scale: true,
        }
    }

    fn boost_config(&self) -> BoostConfig {
        let mut config = BoostConfig::new(self.rounds);
        config.kappa = self.kappa;
        config.weak = self.weak;
        config
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldOutcome {
    pub fold: usize,
    /// Held-out zero-one error, in percent.
    pub test_error: f64,
    /// Earliest round minimizing the training objective (1-based).
    pub best_iterate: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub schema_version: u32,
    pub spec: ExperimentSpec,
    pub per_fold: Vec<FoldOutcome>,
    /// Mean held-out error over folds, percent.
    pub mean_error: f64,
    /// Population standard deviation over folds, percent.
    pub std_error: f64,
    /// Not serialized: timing is environment noise, and result files must
    /// be byte-identical across identical runs.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl ExperimentResult {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self)
            .map_err(|e| Error::Numeric(format!("result serialization failed: {e}")))
    }
}

/// Earliest 1-based index of the minimum, or 0 for an empty curve.
pub fn best_iterate(objective: &[f64]) -> usize {
    let mut best_t = 0usize;
    let mut best = f64::INFINITY;
    for (i, v) in objective.iter().enumerate() {
        if *v < best {
            best = *v;
            best_t = i + 1;
        }
    }
    best_t
}

/// The model after round `t_star`: sum of the first `t_star` leveraging
/// steps. `t_star = 0` gives the zero model.
pub fn prefix_model(trace: &BoostTrace, t_star: usize, d: usize) -> LinearModel {
    let mut model = LinearModel::zeros(d);
    for rec in trace.records.iter().take(t_star) {
        model.theta[rec.feature] += rec.alpha;
    }
    model
}

/// Build the rado set one fold trains on.
fn build_rados(train: &Dataset, spec: &ExperimentSpec, rado_seed: u64) -> Result<RadoSet> {
    let n = match spec.n_rados {
        Some(0) => return Err(Error::InvalidInput("n_rados must be ≥ 1".into())),
        Some(n) => n,
        None => DEFAULT_MAX_RADOS.min(train.m() / 2).max(1),
    };
    match spec.strategy {
        RadoStrategy::Uniform => {
            let sigs = sample_uniform_signatures(train.m(), n, rado_seed)?;
            RadoSet::from_signatures(train, &sigs, Provenance::Uniform { seed: rado_seed })
        }
        RadoStrategy::FixedSupportFraction(f) => {
            let m_star = ((f * train.m() as f64).round() as usize).clamp(1, train.m());
            let sigs = sample_fixed_support_signatures(&train.labels(), m_star, n, rado_seed)?;
            RadoSet::from_signatures(
                train,
                &sigs,
                Provenance::FixedSupport {
                    m_star,
                    seed: rado_seed,
                },
            )
        }
        RadoStrategy::DpFeature { j_star, epsilon } => {
            let sample = dpfreal(
                train,
                &DpFeatureConfig {
                    j_star,
                    epsilon,
                    n,
                    seed: rado_seed,
                },
            )?;
            Ok(sample.rado_set)
        }
        RadoStrategy::All => enumerate_all_rados(train, ENUMERATION_LIMIT_LOG2),
    }
}

fn run_one(
    train: &Dataset,
    spec: &ExperimentSpec,
    rado_seed: u64,
    noise: Option<(f64, u64)>,
) -> Result<BoostRun> {
    let config = spec.boost_config();
    match spec.algo {
        Algorithm::AdaBoostSS => adaboost_ss(train, &config),
        Algorithm::RadoBoost => {
            let mut rados = build_rados(train, spec, rado_seed)?;
            if let Some((sigma, noise_seed)) = noise {
                rados = gaussian_noisify(&rados, sigma, noise_seed)?;
            }
            radoboost(&rados, &config)
        }
    }
}

fn run_cv(
    dataset: &Dataset,
    spec: &ExperimentSpec,
    noise: Option<(f64, u64)>,
) -> Result<ExperimentResult> {
    let started = Instant::now();
    let ds = if spec.max_abs_scale {
        dataset.max_abs_scaled()
    } else {
        dataset.clone()
    };
    let plan = ds.stratified_folds(spec.folds, mix(spec.seed, "folds", 0))?;

    let per_fold: Vec<FoldOutcome> = (0..spec.folds)
        .into_par_iter()
        .map(|fold| -> Result<FoldOutcome> {
            let (train, test) = ds.split(&plan, fold)?;
            let fold_noise =
                noise.map(|(sigma, seed)| (sigma, mix(seed, "noise-fold", fold as u64)));
            let run = run_one(&train, spec, mix(spec.seed, "rado", fold as u64), fold_noise)?;
            let t_star = best_iterate(&run.trace.objective);
            let model = prefix_model(&run.trace, t_star, ds.d());
            Ok(FoldOutcome {
                fold,
                test_error: 100.0 * zero_one_error(&test, &model)?,
                best_iterate: t_star,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let k = per_fold.len() as f64;
    let mean = per_fold.iter().map(|f| f.test_error).sum::<f64>() / k;
    let var = per_fold
        .iter()
        .map(|f| (f.test_error - mean) * (f.test_error - mean))
        .sum::<f64>()
        / k;
    Ok(ExperimentResult {
        schema_version: 1,
        spec: spec.clone(),
        per_fold,
        mean_error: mean,
        std_error: var.sqrt(),
        wall_time: started.elapsed(),
    })
}

/// Stratified k-fold benchmark of the configured learner.
pub fn run_cv_experiment(dataset: &Dataset, spec: &ExperimentSpec) -> Result<ExperimentResult> {
    run_cv(dataset, spec, None)
}

/// A model trained on the full dataset, exported with enough context to
/// score new data: θ is the best-prefix model, and the trailing fields
/// say which round it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub schema_version: u32,
    pub d: usize,
    pub theta: Vec<f64>,
    pub algorithm: String,
    pub strategy: String,
    pub weak: String,
    pub kappa: f64,
    pub rounds_run: usize,
    pub best_iterate: usize,
    /// Training objective at the best iterate (log scale).
    pub objective_at_best: f64,
    /// Training objective after the final round (log scale).
    pub final_objective: f64,
}

impl TrainedModel {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self)
            .map_err(|e| Error::Numeric(format!("model serialization failed: {e}")))
    }
}

/// Train on every example (no folding) and export the best-prefix model.
pub fn train_full(dataset: &Dataset, spec: &ExperimentSpec) -> Result<TrainedModel> {
    let ds = if spec.max_abs_scale {
        dataset.max_abs_scaled()
    } else {
        dataset.clone()
    };
    let run = run_one(&ds, spec, mix(spec.seed, "train-rado", 0), None)?;
    let t_star = best_iterate(&run.trace.objective);
    let model = prefix_model(&run.trace, t_star, ds.d());
    Ok(TrainedModel {
        schema_version: 1,
        d: ds.d(),
        theta: model.theta,
        algorithm: spec.algo.to_string(),
        strategy: spec.strategy.to_string(),
        weak: spec.weak.to_string(),
        kappa: spec.kappa,
        rounds_run: spec.rounds,
        best_iterate: t_star,
        objective_at_best: run.trace.objective[t_star.saturating_sub(1)],
        final_objective: *run.trace.objective.last().expect("rounds ≥ 1"),
    })
}

/// Robustness sweep: rerun the benchmark with iid Gaussian noise of each
/// scale added to every rado coordinate, against the no-noise
/// example-space baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSweepSpec {
    pub base: ExperimentSpec,
    pub sigmas: Vec<f64>,
    pub repeats: usize,
}

/// One benchmark run inside the sweep (one noise scale, one repeat).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRunRow {
    pub sigma: f64,
    pub repeat: usize,
    pub algorithm: String,
    pub mean_error: f64,
    pub std_error: f64,
}

/// Per-scale aggregate: the swept learner and the baseline side by side.
/// `delta_perr` is the swept learner's mean error minus the baseline's,
/// in percentage points (0 on baseline rows).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummaryRow {
    pub sigma: f64,
    pub algorithm: String,
    pub strategy: String,
    pub weak: String,
    pub mean_error: f64,
    pub std_error: f64,
    pub delta_perr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub runs: Vec<SweepRunRow>,
    pub summary: Vec<SweepSummaryRow>,
}

/// Run the sweep. The cross-validation seed is the same for every cell —
/// folds and rado draws are paired across noise scales, so σ = 0
/// reproduces the plain benchmark exactly and differences are noise
/// effects, not resampling effects. Only the noise stream varies with
/// (scale index, repeat).
pub fn run_noise_sweep(dataset: &Dataset, sweep: &NoiseSweepSpec) -> Result<SweepResult> {
    if sweep.sigmas.is_empty() {
        return Err(Error::InvalidInput("no noise scales to sweep".into()));
    }
    if sweep.repeats == 0 {
        return Err(Error::InvalidInput("repeats must be ≥ 1".into()));
    }
    if sweep.sigmas.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
        return Err(Error::InvalidInput(
            "noise scales must be finite and ≥ 0".into(),
        ));
    }

    let mut baseline_spec = sweep.base.clone();
    baseline_spec.algo = Algorithm::AdaBoostSS;
    let baseline = run_cv(dataset, &baseline_spec, None)?;
    let swept_is_baseline = sweep.base.algo == Algorithm::AdaBoostSS;

    let mut runs = Vec::new();
    let mut summary = Vec::new();
    for (si, &sigma) in sweep.sigmas.iter().enumerate() {
        let mut means = Vec::with_capacity(sweep.repeats);
        for rep in 0..sweep.repeats {
            let result = if swept_is_baseline {
                baseline.clone()
            } else {
                let noise_seed = mix(
                    mix(sweep.base.seed, "noise-sigma", si as u64),
                    "noise-rep",
                    rep as u64,
                );
                run_cv(dataset, &sweep.base, Some((sigma, noise_seed)))?
            };
            means.push(result.mean_error);
            runs.push(SweepRunRow {
                sigma,
                repeat: rep,
                algorithm: sweep.base.algo.to_string(),
                mean_error: result.mean_error,
                std_error: result.std_error,
            });
            // The paired baseline next to every swept run, so Δperr is
            // recomputable from the per-run rows alone. Example-space
            // training never sees rado noise, so the row repeats the one
            // baseline result.
            if !swept_is_baseline {
                runs.push(SweepRunRow {
                    sigma,
                    repeat: rep,
                    algorithm: baseline_spec.algo.to_string(),
                    mean_error: baseline.mean_error,
                    std_error: baseline.std_error,
                });
            }
        }
        let r = means.len() as f64;
        let mean = means.iter().sum::<f64>() / r;
        let var = means.iter().map(|m| (m - mean) * (m - mean)).sum::<f64>() / r;
        summary.push(SweepSummaryRow {
            sigma,
            algorithm: sweep.base.algo.to_string(),
            strategy: sweep.base.strategy.to_string(),
            weak: sweep.base.weak.to_string(),
            mean_error: mean,
            std_error: var.sqrt(),
            delta_perr: if swept_is_baseline {
                0.0
            } else {
                mean - baseline.mean_error
            },
        });
        if !swept_is_baseline {
            summary.push(SweepSummaryRow {
                sigma,
                algorithm: baseline_spec.algo.to_string(),
                strategy: "examples".into(),
                weak: baseline_spec.weak.to_string(),
                mean_error: baseline.mean_error,
                std_error: baseline.std_error,
                delta_perr: 0.0,
            });
        }
    }
    Ok(SweepResult { runs, summary })
}

impl SweepResult {
    /// `sigma,algorithm,strategy,weak,mean_error,std_error,delta_perr`.
    pub fn write_summary_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record([
            "sigma",
            "algorithm",
            "strategy",
            "weak",
            "mean_error",
            "std_error",
            "delta_perr",
        ])
        .and_then(|()| {
            self.summary.iter().try_for_each(|row| {
                w.write_record([
                    row.sigma.to_string(),
                    row.algorithm.clone(),
                    row.strategy.clone(),
                    row.weak.clone(),
                    row.mean_error.to_string(),
                    row.std_error.to_string(),
                    row.delta_perr.to_string(),
                ])
            })
        })
        .and_then(|()| w.flush().map_err(csv::Error::from))
        .map_err(|e| Error::InvalidInput(format!("summary write failed: {e}")))
    }

    /// `sigma,repeat,algorithm,mean_error,std_error` — one row per run.
    pub fn write_runs_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["sigma", "repeat", "algorithm", "mean_error", "std_error"])
            .and_then(|()| {
                self.runs.iter().try_for_each(|row| {
                    w.write_record([
                        row.sigma.to_string(),
                        row.repeat.to_string(),
                        row.algorithm.clone(),
                        row.mean_error.to_string(),
                        row.std_error.to_string(),
                    ])
                })
            })
            .and_then(|()| w.flush().map_err(csv::Error::from))
            .map_err(|e| Error::InvalidInput(format!("runs write failed: {e}")))
    }
}
