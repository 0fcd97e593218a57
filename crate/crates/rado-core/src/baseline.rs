//! Example-space boosting baseline.
//!
//! The same round structure as the rado loop — pick a feature, leverage
//! its normalized weighted edge, re-weight multiplicatively — but run
//! directly on labeled examples. The two loops are bridged by an exact
//! identity: pushing a rado distribution through the signature matrix
//! yields example weights whose edge matches the rado edge up to the
//! `x_{*k}/π_{*k}` rescaling (see
//! [`tests::rado_edge_equals_mapped_example_edge`]).

use crate::boosting::{pick_policy, BoostConfig, BoostRun, BoostTrace, IterationRecord, WeakLearnerKind};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::losses::{log_sum_exp, LinearModel};

/// `x_{*k} = max_i |x_{ik}|`, the per-feature normalizer.
pub fn feature_max_abs(dataset: &Dataset, k: usize) -> Result<f64> {
    if k >= dataset.d() {
        return Err(Error::InvalidInput(format!(
            "feature {k} out of range (d = {})",
            dataset.d()
        )));
    }
    Ok(dataset
        .examples()
        .iter()
        .map(|e| e.features()[k].abs())
        .fold(0.0f64, f64::max))
}

/// The label-weighted normalized edge `r = (1/x_{*k})·Σ_i w_i·y_i·x_{ik}`.
/// Errs on an identically zero column.
pub fn example_edge(dataset: &Dataset, weights: &[f64], k: usize) -> Result<f64> {
    check_weights(dataset, weights)?;
    let x_star = feature_max_abs(dataset, k)?;
    if x_star == 0.0 {
        return Err(Error::ZeroColumn { feature: k });
    }
    let sum: f64 = dataset
        .examples()
        .iter()
        .zip(weights)
        .map(|(e, w)| w * f64::from(e.label()) * e.features()[k])
        .sum();
    Ok(sum / x_star)
}

/// Pick the round's feature from example edges, under the same policies
/// and tie-breaking as the rado-side picker.
pub fn weak_pick_examples(
    dataset: &Dataset,
    weights: &[f64],
    kind: &WeakLearnerKind,
) -> Result<usize> {
    kind.validate()?;
    check_weights(dataset, weights)?;
    let mut edges: Vec<(usize, f64)> = Vec::new();
    for k in 0..dataset.d() {
        if feature_max_abs(dataset, k)? > 0.0 {
            edges.push((k, example_edge(dataset, weights, k)?));
        }
    }
    pick_policy(&edges, kind)
}

/// Boosting on examples: leveraging reuses the rado-side step formula with
/// `x_{*k}` as the normalizer, and the weight update is the classical
/// exponential one, `w_i ← w_i·exp(−α·y_i·x_{iι})`, renormalized.
pub fn adaboost_ss(dataset: &Dataset, config: &BoostConfig) -> Result<BoostRun> {
    config.validate()?;
    let m = dataset.m();
    let d = dataset.d();
    let mut weights = vec![1.0 / m as f64; m];
    let mut theta = vec![0.0f64; d];
    // y_i·θᵀx_i per example, maintained incrementally for the objective.
    let mut margins = vec![0.0f64; m];
    let mut neg_margins = vec![0.0f64; m];
    let ln_m = (m as f64).ln();

    let mut records = Vec::with_capacity(config.rounds);
    let mut objective = Vec::with_capacity(config.rounds);
    let mut snapshots = config.record_weights.then(Vec::new);

    for t in 1..=config.rounds {
        let k = weak_pick_examples(dataset, &weights, &config.weak)?;
        let x_star = feature_max_abs(dataset, k)?;
        let mut r = example_edge(dataset, &weights, k)?;
        r = r.clamp(-config.r_clip, config.r_clip);
        if let WeakLearnerKind::ClampedStrong { floor } = config.weak {
            if r != 0.0 {
                r = r.signum() * floor.max(r.abs());
            }
        }
        let alpha = crate::boosting::leveraging(r, x_star, config.kappa)?;
        let mut total = 0.0;
        for (w, e) in weights.iter_mut().zip(dataset.examples()) {
            *w *= (-alpha * f64::from(e.label()) * e.features()[k]).exp();
            total += *w;
        }
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::Numeric(format!(
                "example re-weighting produced total mass {total}"
            )));
        }
        for w in &mut weights {
            *w /= total;
        }
        theta[k] += alpha;
        for (i, e) in dataset.examples().iter().enumerate() {
            margins[i] += alpha * f64::from(e.label()) * e.features()[k];
            neg_margins[i] = -margins[i];
        }
        objective.push(log_sum_exp(&neg_margins) - ln_m);
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

fn check_weights(dataset: &Dataset, weights: &[f64]) -> Result<()> {
    if weights.len() != dataset.m() {
        return Err(Error::InvalidInput(format!(
            "{} weights for {} examples",
            weights.len(),
            dataset.m()
        )));
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::InvalidInput(
            "weights must be finite and nonnegative".into(),
        ));
    }
    Ok(())
}
