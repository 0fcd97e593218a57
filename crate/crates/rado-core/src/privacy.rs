//! Differential privacy for rado release.
//!
//! Two mechanisms:
//!
//! * **Protected-feature sampling** — draw signatures uniformly and keep a
//!   rado only when its coordinate on one boolean feature lands inside an
//!   interval whose margins are set by the privacy parameter ε. Each kept
//!   rado is ε-differentially-private in the protected feature, so a batch
//!   of n spends n·ε by composition.
//! * **Gaussian noising** — add iid N(0, ς²) noise to every coordinate of
//!   an already-built rado set.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rado::{compute_rado, Provenance, RadoSet, Signature};

/// Tail mass η used when sizing the rejection-sampling draw budget.
pub const REJECTION_ETA: f64 = 1e-3;

/// The draw budget is the high-probability bound times this factor.
pub const BUDGET_SAFETY_FACTOR: u64 = 10;

/// Acceptance parameter `β = 1/(1 + e^{ε/2})`. Decreases from 1/2 (no
/// privacy margin) toward 0 as ε grows.
pub fn dp_beta(epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidInput(format!(
            "epsilon {epsilon} must be positive"
        )));
    }
    Ok(1.0 / (1.0 + (epsilon / 2.0).exp()))
}

/// Acceptance window for the protected coordinate.
///
/// `lo` may exceed `hi` (an empty window) when β(m+1) > m/2, i.e. for very
/// small ε; sampling then never accepts and exhausts its budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DpInterval {
    /// Count of examples with `y_i·x_{i,j*} = +1`.
    pub m_plus: usize,
    pub lo: f64,
    pub hi: f64,
}

impl DpInterval {
    pub fn contains(&self, value: f64) -> bool {
        self.lo <= value && value <= self.hi
    }
}

/// Build the acceptance window `[m⁺ − m + β(m+1), m⁺ − β(m+1)]` for a
/// boolean (0/1) feature column.
pub fn dp_interval(dataset: &Dataset, j_star: usize, beta: f64) -> Result<DpInterval> {
    if j_star >= dataset.d() {
        return Err(Error::InvalidInput(format!(
            "protected feature {j_star} out of range (d = {})",
            dataset.d()
        )));
    }
    if !(beta > 0.0 && beta < 0.5) {
        return Err(Error::InvalidInput(format!(
            "beta {beta} outside (0, 1/2)"
        )));
    }
    let mut m_plus = 0usize;
    for (i, e) in dataset.examples().iter().enumerate() {
        let x = e.features()[j_star];
        if x != 0.0 && x != 1.0 {
            return Err(Error::NonBooleanFeature {
                feature: j_star,
                row: i + 1,
                value: x,
            });
        }
        if f64::from(e.label()) * x == 1.0 {
            m_plus += 1;
        }
    }
    let m = dataset.m() as f64;
    let margin = beta * (m + 1.0);
    Ok(DpInterval {
        m_plus,
        lo: m_plus as f64 - m + margin,
        hi: m_plus as f64 - margin,
    })
}

/// The rado coordinate the acceptance test inspects:
/// `π_{σ,j*} = Σ_{i: σ_i = y_i} y_i·x_{i,j*}`.
pub fn protected_coordinate(dataset: &Dataset, j_star: usize, sig: &Signature) -> Result<f64> {
    if j_star >= dataset.d() {
        return Err(Error::InvalidInput(format!(
            "protected feature {j_star} out of range (d = {})",
            dataset.d()
        )));
    }
    Ok(compute_rado(dataset, sig)?.values()[j_star])
}

/// Binary relative entropy `p·log(p/q) + (1−p)·log((1−p)/(1−q))`, with
/// p, q restricted to the open unit interval.
pub fn bit_entropy_divergence(p: f64, q: f64) -> Result<f64> {
    for (name, v) in [("p", p), ("q", q)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::InvalidInput(format!("{name} = {v} outside (0, 1)")));
        }
    }
    Ok(p * (p / q).ln() + (1.0 - p) * ((1.0 - p) / (1.0 - q)).ln())
}

/// High-probability bound (tail mass ≤ η) on the number of uniform draws
/// needed to accept n rados, assuming the protected column takes its edge
/// values. Small requests are free (`n` draws suffice) below the pivot
/// `n*_η = η(1 − e^{2β−1})/(4β)`; beyond it the acceptance rate governs a
/// logarithmic repetition factor.
pub fn rejection_bound(m: usize, beta: f64, n: usize, eta: f64) -> Result<u64> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidInput(format!(
            "need m ≥ 1 and n ≥ 1 (got m = {m}, n = {n})"
        )));
    }
    if !(beta > 0.0 && beta < 0.5) {
        return Err(Error::InvalidInput(format!(
            "beta {beta} outside (0, 1/2)"
        )));
    }
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::InvalidInput(format!("eta {eta} outside (0, 1)")));
    }
    let n_pivot = eta * (1.0 - (2.0 * beta - 1.0).exp()) / (4.0 * beta);
    if (n as f64) <= n_pivot {
        return Ok(n as u64);
    }
    let per_batch = (m as f64) * bit_entropy_divergence(1.0 - beta, 0.5)?;
    let repeats = ((n as f64 / n_pivot).ln() / per_batch).ceil();
    if !repeats.is_finite() || repeats > u64::MAX as f64 {
        return Ok(u64::MAX);
    }
    Ok((n as u64).saturating_mul(repeats as u64))
}

/// How a protected-feature sample was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DpRadoMeta {
    pub j_star: usize,
    pub epsilon: f64,
    pub beta: f64,
    pub m_plus: usize,
    pub interval_lo: f64,
    pub interval_hi: f64,
    /// Rados requested and delivered.
    pub n: usize,
    /// Uniform signatures actually drawn.
    pub n_draws: u64,
    /// Draw ceiling that was in force.
    pub budget: u64,
    /// Sequential-composition spend across the released batch.
    pub epsilon_total: f64,
    pub delta_note: String,
}

/// A released batch: the rados, the signatures that generated them (kept
/// for experiments; a real release would discard them), and the ledger.
#[derive(Debug, Clone)]
pub struct DpSample {
    pub rado_set: RadoSet,
    pub signatures: Vec<Signature>,
    pub meta: DpRadoMeta,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DpFeatureConfig {
    pub j_star: usize,
    pub epsilon: f64,
    /// Rados to accept.
    pub n: usize,
    pub seed: u64,
}

/// Rejection-sample n rados that are each ε-differentially-private in the
/// boolean feature `j_star`. Draws uniform signatures from a ChaCha stream
/// and keeps those whose protected coordinate falls in the acceptance
/// window; gives up with [`Error::DrawBudget`] once the budget — the
/// η = 10⁻³ high-probability bound times a safety factor of 10 — is spent.
pub fn dpfreal(dataset: &Dataset, config: &DpFeatureConfig) -> Result<DpSample> {
    if config.n == 0 {
        return Err(Error::InvalidInput("need n ≥ 1 rados".into()));
    }
    let beta = dp_beta(config.epsilon)?;
    let interval = dp_interval(dataset, config.j_star, beta)?;
    let budget = rejection_bound(dataset.m(), beta, config.n, REJECTION_ETA)?
        .saturating_mul(BUDGET_SAFETY_FACTOR);

    let m = dataset.m();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut signatures = Vec::with_capacity(config.n);
    let mut rados = Vec::with_capacity(config.n);
    let mut n_draws = 0u64;
    while signatures.len() < config.n && n_draws < budget {
        let entries: Vec<i8> = (0..m)
            .map(|_| if rng.random::<bool>() { 1 } else { -1 })
            .collect();
        n_draws += 1;
        let sig = Signature::new(entries)?;
        let rado = compute_rado(dataset, &sig)?;
        if interval.contains(rado.values()[config.j_star]) {
            signatures.push(sig);
            rados.push(rado);
        }
    }
    if signatures.len() < config.n {
        return Err(Error::DrawBudget {
            drawn: n_draws,
            budget,
            accepted: signatures.len(),
            needed: config.n,
        });
    }

    let rado_set = RadoSet::new(
        rados,
        Provenance::DpFeature {
            j_star: config.j_star,
            epsilon: config.epsilon,
            seed: config.seed,
        },
    )?;
    let meta = DpRadoMeta {
        j_star: config.j_star,
        epsilon: config.epsilon,
        beta,
        m_plus: interval.m_plus,
        interval_lo: interval.lo,
        interval_hi: interval.hi,
        n: config.n,
        n_draws,
        budget,
        epsilon_total: config.n as f64 * config.epsilon,
        delta_note: "per-rado δ = O(m^(-5/2)); batch composes to (n·ε, n·δ)".into(),
    };
    Ok(DpSample {
        rado_set,
        signatures,
        meta,
    })
}

/// Calibrated Gaussian scale `ς = √(2·log(1.25/δ))·Δ₂/ε` for (ε, δ)
/// privacy of a query with ℓ₂ sensitivity Δ₂.
pub fn gaussian_sigma(epsilon: f64, delta: f64, sensitivity: f64) -> Result<f64> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidInput(format!(
            "epsilon {epsilon} must be positive"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidInput(format!("delta {delta} outside (0, 1)")));
    }
    if !(sensitivity > 0.0) {
        return Err(Error::InvalidInput(format!(
            "sensitivity {sensitivity} must be positive"
        )));
    }
    Ok((2.0 * (1.25 / delta).ln()).sqrt() * sensitivity / epsilon)
}

/// Add iid N(0, ς²) noise to every coordinate (rados in order, coordinates
/// ascending within each rado). ς = 0 returns the input bit-for-bit
/// without touching the generator. Support sizes and provenance carry
/// over: noising is post-processing of an already-released set.
pub fn gaussian_noisify(rados: &RadoSet, sigma: f64, seed: u64) -> Result<RadoSet> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidInput(format!(
            "noise scale {sigma} must be finite and ≥ 0"
        )));
    }
    if sigma == 0.0 {
        return Ok(rados.clone());
    }
    let normal = Normal::new(0.0, sigma)
        .map_err(|e| Error::Numeric(format!("bad noise scale {sigma}: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noisy = rados
        .rados()
        .iter()
        .map(|r| {
            let values: Vec<f64> = r
                .values()
                .iter()
                .map(|v| v + normal.sample(&mut rng))
                .collect();
            crate::rado::Rado::new(values, r.support_size())
        })
        .collect::<Result<Vec<_>>>()?;
    RadoSet::new(noisy, rados.provenance().clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Example;
    use crate::rado::enumerate_all_signatures;
    use approx::assert_relative_eq;

    fn boolean_dataset(xs: &[f64], ys: &[i8]) -> Dataset {
        Dataset::new(
            xs.iter()
                .zip(ys)
                .map(|(x, y)| Example::new(vec![*x, 0.5 * x - 1.0], *y).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn beta_frozen_values() {
        assert_relative_eq!(
            dp_beta(2.0).unwrap(),
            0.268_941_421_369_995_1,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            dp_beta(50.0).unwrap(),
            1.388_794_386_477_114_4e-11,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            dp_beta(1.0).unwrap(),
            0.377_540_668_798_145_4,
            max_relative = 1e-15
        );
        // No-privacy limit: β → 1/2 as ε → 0⁺.
        assert_relative_eq!(dp_beta(1e-12).unwrap(), 0.5, epsilon = 1e-12);
        assert!(dp_beta(0.0).is_err());
        assert!(dp_beta(-1.0).is_err());
    }

    #[test]
    fn divergence_frozen_value_and_domain() {
        assert_relative_eq!(
            bit_entropy_divergence(0.9, 0.5).unwrap(),
            0.368_064_207_168_497_14,
            max_relative = 1e-15
        );
        assert_eq!(bit_entropy_divergence(0.3, 0.3).unwrap(), 0.0);
        assert!(bit_entropy_divergence(0.0, 0.5).is_err());
        assert!(bit_entropy_divergence(0.5, 1.0).is_err());
    }

    #[test]
    fn gaussian_sigma_frozen_value_and_domain() {
        assert_relative_eq!(
            gaussian_sigma(1.0, 1e-5, 1.0).unwrap(),
            4.844_805_262_605_389,
            max_relative = 1e-15
        );
        assert!(gaussian_sigma(0.0, 1e-5, 1.0).is_err());
        assert!(gaussian_sigma(1.0, 1.0, 1.0).is_err());
        assert!(gaussian_sigma(1.0, 1e-5, 0.0).is_err());
    }

    #[test]
    fn interval_hand_case() {
        // x_{j*} = (1,1,1,1,0), y = (1,1,1,−1,1) → m⁺ = 3; β = 0.2:
        // lo = 3 − 5 + 0.2·6 = −0.8, hi = 3 − 1.2 = 1.8.
        let ds = boolean_dataset(&[1.0, 1.0, 1.0, 1.0, 0.0], &[1, 1, 1, -1, 1]);
        let iv = dp_interval(&ds, 0, 0.2).unwrap();
        assert_eq!(iv.m_plus, 3);
        assert_relative_eq!(iv.lo, -0.8, max_relative = 1e-12);
        assert_relative_eq!(iv.hi, 1.8, max_relative = 1e-12);
        assert!(iv.contains(0.0) && iv.contains(1.0) && !iv.contains(2.0));
    }

    #[test]
    fn interval_empties_under_strong_privacy() {
        // β(m+1) > m/2 leaves lo above hi: nothing can be accepted.
        let ds = boolean_dataset(&[1.0, 0.0, 1.0], &[1, -1, 1]);
        let beta = dp_beta(1e-6).unwrap();
        let iv = dp_interval(&ds, 0, beta).unwrap();
        assert!(iv.lo > iv.hi);
    }

    #[test]
    fn interval_approaches_full_range_as_epsilon_grows() {
        let ds = boolean_dataset(&[1.0, 1.0, 0.0, 1.0], &[1, -1, 1, 1]);
        let iv = dp_interval(&ds, 0, dp_beta(80.0).unwrap()).unwrap();
        assert_relative_eq!(iv.lo, iv.m_plus as f64 - 4.0, epsilon = 1e-9);
        assert_relative_eq!(iv.hi, iv.m_plus as f64, epsilon = 1e-9);
    }

    #[test]
    fn non_boolean_column_is_rejected() {
        let ds = boolean_dataset(&[1.0, 0.5, 0.0], &[1, 1, -1]);
        match dp_interval(&ds, 0, 0.3) {
            Err(Error::NonBooleanFeature { feature, row, value }) => {
                assert_eq!((feature, row), (0, 2));
                assert_eq!(value, 0.5);
            }
            other => panic!("expected NonBooleanFeature, got {other:?}"),
        }
    }

    /// Every signature of a small instance, checked against a literal
    /// restatement of the acceptance rule.
    #[test]
    fn acceptance_matches_brute_force_oracle() {
        let xs = [1.0, 0.0, 1.0, 1.0, 0.0, 1.0, 1.0, 0.0, 1.0, 1.0];
        let ys = [1, -1, 1, 1, 1, -1, -1, 1, 1, -1];
        let ds = boolean_dataset(&xs, &ys);
        let beta = dp_beta(1.5).unwrap();
        let iv = dp_interval(&ds, 0, beta).unwrap();

        let m = ds.m();
        let m_plus_oracle = xs
            .iter()
            .zip(&ys)
            .filter(|(x, y)| f64::from(**y) * **x == 1.0)
            .count();
        assert_eq!(iv.m_plus, m_plus_oracle);

        let mut accepted = 0usize;
        for sig in enumerate_all_signatures(m, 20).unwrap() {
            let coord = protected_coordinate(&ds, 0, &sig).unwrap();
            // Oracle: recompute the coordinate and the window from scratch.
            let mut s = 0.0;
            for (i, (x, y)) in xs.iter().zip(&ys).enumerate() {
                if sig.entries()[i] == *y {
                    s += f64::from(*y) * *x;
                }
            }
            let lo = m_plus_oracle as f64 - m as f64 + beta * (m as f64 + 1.0);
            let hi = m_plus_oracle as f64 - beta * (m as f64 + 1.0);
            assert_eq!(coord, s, "coordinate mismatch");
            assert_eq!(
                iv.contains(coord),
                lo <= s && s <= hi,
                "acceptance mismatch at coordinate {s}"
            );
            if iv.contains(coord) {
                accepted += 1;
            }
        }
        assert!(accepted > 0, "oracle instance should accept something");
    }

    #[test]
    fn sampler_is_deterministic_and_honors_the_window() {
        let m = 30;
        let xs: Vec<f64> = (0..m).map(|i| f64::from(i % 2 == 0)).collect();
        let ys: Vec<i8> = (0..m).map(|i| if i % 3 == 0 { -1 } else { 1 }).collect();
        let ds = boolean_dataset(&xs, &ys);
        let config = DpFeatureConfig {
            j_star: 0,
            epsilon: 8.0,
            n: 12,
            seed: 99,
        };
        let a = dpfreal(&ds, &config).unwrap();
        let b = dpfreal(&ds, &config).unwrap();
        assert_eq!(a.signatures, b.signatures);
        assert_eq!(a.meta, b.meta);
        for (ra, rb) in a.rado_set.rados().iter().zip(b.rado_set.rados()) {
            for (va, vb) in ra.values().iter().zip(rb.values()) {
                assert_eq!(va.to_bits(), vb.to_bits());
            }
        }

        let iv = dp_interval(&ds, 0, a.meta.beta).unwrap();
        for sig in &a.signatures {
            let coord = protected_coordinate(&ds, 0, sig).unwrap();
            assert!(iv.contains(coord));
        }
        assert!(a.meta.n_draws >= 12);
        assert_relative_eq!(a.meta.epsilon_total, 12.0 * 8.0);

        let other = dpfreal(
            &ds,
            &DpFeatureConfig {
                seed: 100,
                ..config
            },
        )
        .unwrap();
        assert_ne!(a.signatures, other.signatures);
    }

    #[test]
    fn starved_sampler_reports_its_budget() {
        // All-ones protected column, all-positive labels, m = 11, ε = 1/2:
        // the window (5.2539, 5.7461) contains no integer, so nothing is
        // ever accepted and the budget — 378·10 draws — is exhausted.
        let ds = boolean_dataset(&[1.0; 11], &[1; 11]);
        let config = DpFeatureConfig {
            j_star: 0,
            epsilon: 0.5,
            n: 3,
            seed: 1,
        };
        match dpfreal(&ds, &config) {
            Err(Error::DrawBudget {
                drawn,
                budget,
                accepted,
                needed,
            }) => {
                assert_eq!(budget, 3_780);
                assert_eq!(drawn, 3_780);
                assert_eq!(accepted, 0);
                assert_eq!(needed, 3);
            }
            other => panic!("expected DrawBudget, got {other:?}"),
        }
    }

    #[test]
    fn rejection_bound_frozen_value_and_monotonicity() {
        let beta = dp_beta(1.0).unwrap();
        assert_eq!(rejection_bound(200, beta, 50, 0.05).unwrap(), 100);
        let b50 = rejection_bound(200, beta, 50, 1e-3).unwrap();
        let b100 = rejection_bound(200, beta, 100, 1e-3).unwrap();
        assert!(b100 > b50, "more rados cannot need fewer draws");
        let wide = rejection_bound(50, beta, 50, 1e-3).unwrap();
        let tall = rejection_bound(400, beta, 50, 1e-3).unwrap();
        assert!(tall <= wide, "larger supports concentrate acceptance");
        assert!(rejection_bound(0, beta, 1, 0.5).is_err());
        assert!(rejection_bound(10, 0.7, 1, 0.5).is_err());
        assert!(rejection_bound(10, beta, 1, 0.0).is_err());
    }

    #[test]
    fn zero_noise_is_bit_identical() {
        let ds = boolean_dataset(&[1.0, 0.0, 1.0, 1.0], &[1, -1, 1, -1]);
        let sigs = crate::rado::sample_uniform_signatures(4, 6, 7).unwrap();
        let set =
            RadoSet::from_signatures(&ds, &sigs, Provenance::Uniform { seed: 7 }).unwrap();
        let out = gaussian_noisify(&set, 0.0, 123).unwrap();
        for (a, b) in set.rados().iter().zip(out.rados()) {
            assert_eq!(a.support_size(), b.support_size());
            for (va, vb) in a.values().iter().zip(b.values()) {
                assert_eq!(va.to_bits(), vb.to_bits());
            }
        }
        assert_eq!(format!("{}", out.provenance()), format!("{}", set.provenance()));
    }

    #[test]
    fn noise_moments_match_the_scale() {
        let ds = boolean_dataset(&[1.0, 0.0, 1.0, 1.0, 0.0], &[1, -1, 1, -1, 1]);
        let sigs = crate::rado::sample_uniform_signatures(5, 5_000, 3).unwrap();
        let set =
            RadoSet::from_signatures(&ds, &sigs, Provenance::Uniform { seed: 3 }).unwrap();
        let sigma = 2.0;
        let noisy = gaussian_noisify(&set, sigma, 42).unwrap();
        let mut deltas = Vec::new();
        for (a, b) in set.rados().iter().zip(noisy.rados()) {
            for (va, vb) in a.values().iter().zip(b.values()) {
                deltas.push(vb - va);
            }
        }
        let n = deltas.len() as f64;
        let mean = deltas.iter().sum::<f64>() / n;
        let var = deltas.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / n;
        assert!(
            mean.abs() <= 4.0 * sigma / n.sqrt(),
            "noise mean {mean} too far from 0"
        );
        assert_relative_eq!(var.sqrt(), sigma, max_relative = 0.05);
    }

    #[test]
    fn vanishing_noise_barely_moves_values() {
        let ds = boolean_dataset(&[1.0, 1.0, 0.0], &[1, -1, 1]);
        let sigs = crate::rado::sample_uniform_signatures(3, 4, 9).unwrap();
        let set =
            RadoSet::from_signatures(&ds, &sigs, Provenance::Uniform { seed: 9 }).unwrap();
        let noisy = gaussian_noisify(&set, 1e-300, 5).unwrap();
        for (a, b) in set.rados().iter().zip(noisy.rados()) {
            for (va, vb) in a.values().iter().zip(b.values()) {
                assert!((va - vb).abs() <= 1e-290);
            }
        }
        assert!(gaussian_noisify(&set, -1.0, 5).is_err());
        assert!(gaussian_noisify(&set, f64::NAN, 5).is_err());
    }
}
