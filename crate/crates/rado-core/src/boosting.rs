//! Boosting over a rado set.
//!
//! Each round a weak learner picks one feature (a rado coordinate), the
//! normalized weighted edge of that column is leveraged into a model
//! update, and the distribution over rados is re-weighted multiplicatively.
//! The exponential rado risk of the output obeys the potential bound
//! `risk(θ_T) ≤ Π_t √(1 − r_t²)` when edges are used unmodified.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::losses::{log_sum_exp, LinearModel};
use crate::rado::RadoSet;
use crate::tolerances::{EDGE_FLOOR, R_CLIP_MARGIN};

/// Weak-learner policies for picking the round's feature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum WeakLearnerKind {
    /// Maximize |edge| (ties to the lowest index).
    Strong,
    /// Same selection as [`WeakLearnerKind::Strong`], but the edge fed to
    /// leveraging and the weight update is floored:
    /// `r ← sign(r)·max(floor, |r|)`.
    ClampedStrong { floor: f64 },
    /// Pick the feature whose |edge| is the lower median of the usable
    /// columns' |edge| values.
    MedianPrudential,
    /// Maximize |edge| among features with |edge| ≤ lambda.
    LambdaPrudential { lambda: f64 },
}

impl WeakLearnerKind {
    /// CLI syntax: `strong`, `clamped`, `clamped:0.2`, `median`,
    /// `lambda:0.8`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if t == "strong" {
            return Ok(WeakLearnerKind::Strong);
        }
        if t == "median" {
            return Ok(WeakLearnerKind::MedianPrudential);
        }
        if t == "clamped" {
            return Ok(WeakLearnerKind::ClampedStrong { floor: EDGE_FLOOR });
        }
        if let Some(rest) = t.strip_prefix("clamped:") {
            let floor: f64 = rest
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad clamp floor \"{rest}\"")))?;
            return Ok(WeakLearnerKind::ClampedStrong { floor });
        }
        if let Some(rest) = t.strip_prefix("lambda:") {
            let lambda: f64 = rest
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad lambda \"{rest}\"")))?;
            return Ok(WeakLearnerKind::LambdaPrudential { lambda });
        }
        Err(Error::InvalidInput(format!(
            "unknown weak learner \"{text}\" (strong | clamped[:f] | median | lambda:x)"
        )))
    }

    pub(crate) fn validate(&self) -> Result<()> {
        match *self {
            WeakLearnerKind::ClampedStrong { floor } if !(0.0..1.0).contains(&floor) => Err(
                Error::InvalidInput(format!("clamp floor {floor} outside [0, 1)")),
            ),
            WeakLearnerKind::LambdaPrudential { lambda } if !(lambda > 0.0) => Err(
                Error::InvalidInput(format!("lambda {lambda} must be positive")),
            ),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for WeakLearnerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeakLearnerKind::Strong => write!(f, "strong"),
            WeakLearnerKind::ClampedStrong { floor } => write!(f, "clamped:{floor}"),
            WeakLearnerKind::MedianPrudential => write!(f, "median"),
            WeakLearnerKind::LambdaPrudential { lambda } => write!(f, "lambda:{lambda}"),
        }
    }
}

/// Knobs for one boosting run (shared by the rado loop and the
/// example-space baseline).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostConfig {
    /// Number of rounds T.
    pub rounds: usize,
    /// Leveraging divisor κ ≥ 1; doubling κ exactly halves every step.
    pub kappa: f64,
    pub weak: WeakLearnerKind,
    /// Edges are clipped to ±r_clip before leveraging so fully correlated
    /// columns give finite steps.
    pub r_clip: f64,
    /// Keep a per-round snapshot of the weight vector in the trace.
    pub record_weights: bool,
}

impl BoostConfig {
    pub fn new(rounds: usize) -> BoostConfig {
        BoostConfig {
            rounds,
            kappa: 1.0,
            weak: WeakLearnerKind::Strong,
            r_clip: 1.0 - R_CLIP_MARGIN,
            record_weights: false,
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.rounds == 0 {
            return Err(Error::InvalidInput("rounds must be ≥ 1".into()));
        }
        if !(self.kappa >= 1.0) {
            return Err(Error::InvalidInput(format!(
                "kappa {} must be ≥ 1",
                self.kappa
            )));
        }
        if !(self.r_clip > 0.0 && self.r_clip < 1.0) {
            return Err(Error::InvalidInput(format!(
                "r_clip {} outside (0, 1)",
                self.r_clip
            )));
        }
        self.weak.validate()
    }
}

/// One boosting round as it happened: the chosen feature, the edge
/// actually used (post clip/floor) and the leveraging step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    /// 1-based round number.
    pub t: usize,
    pub feature: usize,
    pub r: f64,
    pub alpha: f64,
}

/// Full record of a run. `objective[t−1]` is the log exponential risk of
/// the prefix model after round t, on the training objects.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostTrace {
    pub records: Vec<IterationRecord>,
    pub objective: Vec<f64>,
    /// Post-update weight snapshots, when requested.
    pub weights: Option<Vec<Vec<f64>>>,
}

/// A trained model together with how it was reached.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostRun {
    pub model: LinearModel,
    pub trace: BoostTrace,
}

/// `π_{*k} = max_j |π_{jk}|`, the column normalizer.
pub fn column_max_abs(rados: &RadoSet, k: usize) -> Result<f64> {
    if k >= rados.d() {
        return Err(Error::InvalidInput(format!(
            "feature {k} out of range (d = {})",
            rados.d()
        )));
    }
    Ok(rados
        .rados()
        .iter()
        .map(|r| r.values()[k].abs())
        .fold(0.0f64, f64::max))
}

/// The weighted normalized edge `r = (1/π_{*k})·Σ_j w_j·π_{jk}`; always in
/// [−1, 1] up to rounding. Errs on an identically zero column.
pub fn normalized_edge(rados: &RadoSet, weights: &[f64], k: usize) -> Result<f64> {
    check_weights(rados, weights)?;
    let pi_star = column_max_abs(rados, k)?;
    if pi_star == 0.0 {
        return Err(Error::ZeroColumn { feature: k });
    }
    let sum: f64 = rados
        .rados()
        .iter()
        .zip(weights)
        .map(|(r, w)| w * r.values()[k])
        .sum();
    Ok(sum / pi_star)
}

/// Leveraging step `α = log((1+r)/(1−r)) / (2·κ·π_*)`. The caller clips
/// r away from ±1 first.
pub fn leveraging(r: f64, pi_star: f64, kappa: f64) -> Result<f64> {
    if !(r > -1.0 && r < 1.0) {
        return Err(Error::InvalidInput(format!("edge {r} outside (−1, 1)")));
    }
    if !(pi_star > 0.0) {
        return Err(Error::InvalidInput(format!(
            "column normalizer {pi_star} must be positive"
        )));
    }
    if !(kappa >= 1.0) {
        return Err(Error::InvalidInput(format!("kappa {kappa} must be ≥ 1")));
    }
    // Written so that scaling κ by a power of two rescales α bit-exactly.
    Ok(0.5 * ((1.0 + r) / (1.0 - r)).ln() / (kappa * pi_star))
}

/// Multiplicative re-weighting `w_j ← w_j·(1 − r·π_{jk}/π_{*k})/(1 − r²)`,
/// renormalized onto the simplex. The formula is already mass-preserving
/// when `r` is the exact column edge; the renormalization keeps the
/// invariant when a floored or clipped edge is fed in instead.
pub fn weight_update(weights: &[f64], rados: &RadoSet, k: usize, r: f64) -> Result<Vec<f64>> {
    check_weights(rados, weights)?;
    if !(r > -1.0 && r < 1.0) {
        return Err(Error::InvalidInput(format!("edge {r} outside (−1, 1)")));
    }
    let pi_star = column_max_abs(rados, k)?;
    if pi_star == 0.0 {
        return Err(Error::ZeroColumn { feature: k });
    }
    let denom = 1.0 - r * r;
    let mut out: Vec<f64> = rados
        .rados()
        .iter()
        .zip(weights)
        .map(|(rado, w)| w * (1.0 - r * rado.values()[k] / pi_star) / denom)
        .collect();
    let sum: f64 = out.iter().sum();
    if !(sum > 0.0) || !sum.is_finite() {
        return Err(Error::Numeric(format!(
            "weight update produced total mass {sum}"
        )));
    }
    for w in &mut out {
        *w /= sum;
    }
    Ok(out)
}

/// Pick the round's feature. Columns with `π_{*k} = 0` are never usable;
/// ties always break to the lowest feature index.
pub fn weak_pick(rados: &RadoSet, weights: &[f64], kind: &WeakLearnerKind) -> Result<usize> {
    kind.validate()?;
    check_weights(rados, weights)?;
    let mut edges: Vec<(usize, f64)> = Vec::new();
    for k in 0..rados.d() {
        if column_max_abs(rados, k)? > 0.0 {
            edges.push((k, normalized_edge(rados, weights, k)?));
        }
    }
    pick_policy(&edges, kind)
}

/// Apply a selection policy to `(feature, edge)` pairs listed in ascending
/// feature order. Shared between the rado loop and the example-space
/// baseline, so both sides break ties and take medians identically.
pub(crate) fn pick_policy(edges: &[(usize, f64)], kind: &WeakLearnerKind) -> Result<usize> {
    if edges.is_empty() {
        return Err(Error::NoUsableFeature);
    }
    match *kind {
        WeakLearnerKind::Strong | WeakLearnerKind::ClampedStrong { .. } => {
            Ok(argmax_abs(edges.iter().copied()))
        }
        WeakLearnerKind::MedianPrudential => {
            let mut by_abs: Vec<(f64, usize)> =
                edges.iter().map(|&(k, r)| (r.abs(), k)).collect();
            by_abs.sort_by(|a, b| a.partial_cmp(b).expect("edges are finite"));
            // Lower median: element (u−1)/2 of the ascending order.
            Ok(by_abs[(by_abs.len() - 1) / 2].1)
        }
        WeakLearnerKind::LambdaPrudential { lambda } => {
            let feasible: Vec<(usize, f64)> = edges
                .iter()
                .copied()
                .filter(|&(_, r)| r.abs() <= lambda)
                .collect();
            if feasible.is_empty() {
                return Err(Error::EmptyFeasibleSet { lambda });
            }
            Ok(argmax_abs(feasible.into_iter()))
        }
    }
}

fn argmax_abs(edges: impl Iterator<Item = (usize, f64)>) -> usize {
    let mut best_k = usize::MAX;
    let mut best = f64::NEG_INFINITY;
    for (k, r) in edges {
        if r.abs() > best {
            best = r.abs();
            best_k = k;
        }
    }
    best_k
}

/// Run the boosting loop with the configured weak learner.
pub fn radoboost(rados: &RadoSet, config: &BoostConfig) -> Result<BoostRun> {
    run_loop(rados, config, None)
}

/// Replay a run with a forced feature sequence (one entry per round).
/// Edges, steps and weights are recomputed as usual; only selection is
/// overridden. Useful for paired comparisons across κ.
pub fn radoboost_with_picks(
    rados: &RadoSet,
    config: &BoostConfig,
    picks: &[usize],
) -> Result<BoostRun> {
    if picks.len() != config.rounds {
        return Err(Error::InvalidInput(format!(
            "{} forced picks for {} rounds",
            picks.len(),
            config.rounds
        )));
    }
    run_loop(rados, config, Some(picks))
}

fn run_loop(rados: &RadoSet, config: &BoostConfig, picks: Option<&[usize]>) -> Result<BoostRun> {
    config.validate()?;
    let n = rados.n();
    let d = rados.d();
    let mut weights = vec![1.0 / n as f64; n];
    let mut theta = vec![0.0f64; d];
    // Incrementally maintained θᵀπ_j, so the per-round objective is O(n).
    let mut scores = vec![0.0f64; n];
    let mut neg_scores = vec![0.0f64; n];
    let ln_n = (n as f64).ln();

    let mut records = Vec::with_capacity(config.rounds);
    let mut objective = Vec::with_capacity(config.rounds);
    let mut snapshots = config.record_weights.then(Vec::new);

    for t in 1..=config.rounds {
        let k = match picks {
            Some(p) => {
                let k = p[t - 1];
                if k >= d {
                    return Err(Error::InvalidInput(format!(
                        "forced pick {k} out of range (d = {d})"
                    )));
                }
                if column_max_abs(rados, k)? == 0.0 {
                    return Err(Error::ZeroColumn { feature: k });
                }
                k
            }
            None => weak_pick(rados, &weights, &config.weak)?,
        };
        let pi_star = column_max_abs(rados, k)?;
        let mut r = normalized_edge(rados, &weights, k)?;
        r = r.clamp(-config.r_clip, config.r_clip);
        if let WeakLearnerKind::ClampedStrong { floor } = config.weak {
            // An exactly-zero edge keeps no sign to clamp toward.
            if r != 0.0 {
                r = r.signum() * floor.max(r.abs());
            }
        }
        let alpha = leveraging(r, pi_star, config.kappa)?;
        weights = weight_update(&weights, rados, k, r)?;
        theta[k] += alpha;
        for (j, rado) in rados.rados().iter().enumerate() {
            scores[j] += alpha * rado.values()[k];
            neg_scores[j] = -scores[j];
        }
        objective.push(log_sum_exp(&neg_scores) - ln_n);
        records.push(IterationRecord {
            t,
            feature: k,
            r,
            alpha,
        });
        if let Some(s) = snapshots.as_mut() {
            s.push(weights.clone());
        }
    }

    Ok(BoostRun {
        model: LinearModel { theta },
        trace: BoostTrace {
            records,
            objective,
            weights: snapshots,
        },
    })
}

fn check_weights(rados: &RadoSet, weights: &[f64]) -> Result<()> {
    if weights.len() != rados.n() {
        return Err(Error::InvalidInput(format!(
            "{} weights for {} rados",
            weights.len(),
            rados.n()
        )));
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::InvalidInput(
            "weights must be finite and nonnegative".into(),
        ));
    }
    Ok(())
}
