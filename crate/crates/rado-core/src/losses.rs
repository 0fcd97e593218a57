//! Surrogate losses over examples and over rado sets, kept in log space.
//!
//! The central identity: the per-example logistic loss of a linear model
//! equals `log 2 + (1/m)·log` of the exponential rado risk taken over the
//! exhaustive signature set. Sampled rado sets approximate it.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rado::{enumerate_all_rados, RadoSet};

/// A linear classifier `x ↦ sign(θᵀx)`; ties count as errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub theta: Vec<f64>,
}

impl LinearModel {
    pub fn zeros(d: usize) -> LinearModel {
        LinearModel {
            theta: vec![0.0; d],
        }
    }

    pub fn d(&self) -> usize {
        self.theta.len()
    }

    pub fn score(&self, x: &[f64]) -> f64 {
        self.theta.iter().zip(x).map(|(t, v)| t * v).sum()
    }
}

/// `log Σ exp(v)` with the max shifted out; empty input gives −∞.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let mx = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if mx == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if mx.is_infinite() {
        return mx;
    }
    let sum: f64 = values.iter().map(|v| (v - mx).exp()).sum();
    mx + sum.ln()
}

/// `log(1 + e^{−z})` without overflow for any `z`.
#[inline]
fn softplus_neg(z: f64) -> f64 {
    // log(1 + e^{−z}) = log1p(e^{−|z|}) + max(0, −z)
    (-z.abs()).exp().ln_1p() + (-z).max(0.0)
}

/// Mean logistic loss `(1/m)·Σ log(1 + exp(−y·θᵀx))`.
pub fn logloss(dataset: &Dataset, model: &LinearModel) -> Result<f64> {
    check_dim(dataset.d(), model)?;
    let sum: f64 = dataset
        .examples()
        .iter()
        .map(|e| softplus_neg(e.label() as f64 * model.score(e.features())))
        .sum();
    Ok(sum / dataset.m() as f64)
}

/// Gradient of [`logloss`] in θ:
/// `(1/m)·Σ −y·x·sigmoid(−y·θᵀx)`.
pub fn logloss_gradient(dataset: &Dataset, model: &LinearModel) -> Result<Vec<f64>> {
    check_dim(dataset.d(), model)?;
    let mut grad = vec![0.0f64; model.d()];
    for e in dataset.examples() {
        let y = e.label() as f64;
        let z = y * model.score(e.features());
        // sigmoid(−z), branch-stable.
        let s = if z >= 0.0 {
            let t = (-z).exp();
            t / (1.0 + t)
        } else {
            1.0 / (1.0 + z.exp())
        };
        for (k, x) in e.features().iter().enumerate() {
            grad[k] -= y * x * s;
        }
    }
    let m = dataset.m() as f64;
    for g in &mut grad {
        *g /= m;
    }
    Ok(grad)
}

/// `log[(1/n)·Σ_j exp(−θᵀπ_j)]`, the exponential rado risk in log scale.
/// Never overflows; this is the form the rest of the crate composes with.
pub fn log_exp_rado_risk(rados: &RadoSet, model: &LinearModel) -> Result<f64> {
    check_dim(rados.d(), model)?;
    let exponents: Vec<f64> = rados
        .rados()
        .iter()
        .map(|r| -model.score(r.values()))
        .collect();
    Ok(log_sum_exp(&exponents) - (rados.n() as f64).ln())
}

/// The exponential rado risk on the linear scale. Errs when any exponent
/// `|θᵀπ|` exceeds 700 (the caller demanded a scale that cannot hold it);
/// use [`log_exp_rado_risk`] instead in that regime.
pub fn exp_rado_risk(rados: &RadoSet, model: &LinearModel) -> Result<f64> {
    check_dim(rados.d(), model)?;
    let mut sum = 0.0f64;
    for r in rados.rados() {
        let e = -model.score(r.values());
        if e.abs() > 700.0 {
            return Err(Error::Numeric(format!(
                "exp-rado-risk exponent {e:.3e} exceeds the linear-scale range; \
                 use the log form"
            )));
        }
        sum += e.exp();
    }
    Ok(sum / rados.n() as f64)
}

/// `log 2 + (1/m)·log[(1/n)·Σ exp(−θᵀπ)]` over the given rado set;
/// `m` is the sample size the rados were computed from.
pub fn logistic_rado_risk(rados: &RadoSet, model: &LinearModel, m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidInput("sample size m = 0".into()));
    }
    Ok(2.0f64.ln() + log_exp_rado_risk(rados, model)? / m as f64)
}

/// |logloss − logistic rado risk| over the exhaustive signature set.
/// Zero up to rounding, for every dataset and model.
pub fn equivalence_gap_exact(dataset: &Dataset, model: &LinearModel, limit: usize) -> Result<f64> {
    let all = enumerate_all_rados(dataset, limit)?;
    let lhs = logloss(dataset, model)?;
    let rhs = logistic_rado_risk(&all, model, dataset.m())?;
    Ok((lhs - rhs).abs())
}

/// Signed gap `logloss − logistic rado risk` over a sampled rado set.
pub fn equivalence_gap_sampled(
    dataset: &Dataset,
    model: &LinearModel,
    rados: &RadoSet,
) -> Result<f64> {
    let lhs = logloss(dataset, model)?;
    let rhs = logistic_rado_risk(rados, model, dataset.m())?;
    Ok(lhs - rhs)
}

/// Fraction of examples with `y·θᵀx ≤ 0` (a zero score is an error).
pub fn zero_one_error(dataset: &Dataset, model: &LinearModel) -> Result<f64> {
    check_dim(dataset.d(), model)?;
    let wrong = dataset
        .examples()
        .iter()
        .filter(|e| e.label() as f64 * model.score(e.features()) <= 0.0)
        .count();
    Ok(wrong as f64 / dataset.m() as f64)
}

fn check_dim(d: usize, model: &LinearModel) -> Result<()> {
    if model.d() != d {
        return Err(Error::InvalidInput(format!(
            "model dimension {} vs data dimension {d}",
            model.d()
        )));
    }
    Ok(())
}
