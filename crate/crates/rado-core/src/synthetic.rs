//! Deterministic surrogate datasets.
//!
//! Three generators shaped like classic small UCI benchmarks (same sizes,
//! class balances, feature ranges and the qualitative structure that
//! drives classifier behavior), built from fixed ChaCha streams so every
//! build of the crate produces byte-identical data. They stand in for the
//! originals in tests and in the committed `data/` files; they are not
//! the original measurements.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};

use crate::dataset::{Dataset, Example};

/// Survival-study shape: 306 examples, 3 integer-valued features
/// (age, calendar year offset, node count), 225 positive (survived) to 81
/// negative. The only informative feature is the node count, and weakly:
/// a linear score through the origin lands in the mid-twenties percent
/// error, close to the majority rate.
pub fn haberman_surrogate() -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(0x4841_4245);
    let mut examples = Vec::with_capacity(306);
    let age_pos = Normal::<f64>::new(52.0, 9.8).unwrap();
    let age_neg = Normal::<f64>::new(53.7, 10.1).unwrap();
    let nodes_pos = Exp::<f64>::new(1.0 / 2.2).unwrap();
    let nodes_neg_low = Exp::<f64>::new(1.0 / 2.0).unwrap();
    let nodes_neg_high = Exp::<f64>::new(1.0 / 9.0).unwrap();
    for _ in 0..225 {
        let age = age_pos.sample(&mut rng).round().clamp(30.0, 77.0);
        let year = 58.0 + f64::from(rng.random_range(0..12u8));
        let nodes = nodes_pos.sample(&mut rng).round().clamp(0.0, 30.0);
        examples.push(Example::new(vec![age, year, nodes], 1).unwrap());
    }
    for _ in 0..81 {
        let age = age_neg.sample(&mut rng).round().clamp(34.0, 83.0);
        let year = 58.0 + f64::from(rng.random_range(0..12u8));
        let nodes = if rng.random_range(0.0..1.0) < 0.25 {
            nodes_neg_low.sample(&mut rng)
        } else {
            nodes_neg_high.sample(&mut rng)
        }
        .round()
        .clamp(0.0, 52.0);
        examples.push(Example::new(vec![age, year, nodes], -1).unwrap());
    }
    Dataset::with_feature_names(
        examples,
        vec!["age".into(), "year".into(), "nodes".into()],
    )
    .unwrap()
}

/// Donation-history shape: 748 examples, 4 features (recency, frequency,
/// volume, tenure) with the volume column an exact 250× multiple of the
/// frequency column, 178 positive (donated again) to 570 negative. The
/// negative class is bimodal in recency — long-lapsed donors plus a
/// recently-active-but-stopped group — so no through-origin direction
/// separates well and linear scores sit far above the majority rate.
pub fn transfusion_surrogate() -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5452_414e);
    let mut examples = Vec::with_capacity(748);
    let rec_pos = Exp::<f64>::new(1.0).unwrap();
    let freq_pos = Exp::<f64>::new(1.0 / 13.0).unwrap();
    let rec_neg_long = Exp::<f64>::new(1.0 / 12.0).unwrap();
    let freq_neg_long = Exp::<f64>::new(1.0 / 2.0).unwrap();
    let tenure_pos = Normal::<f64>::new(60.0, 12.0).unwrap();
    let tenure_neg_long = Normal::<f64>::new(12.0, 3.0).unwrap();
    // An active-donor profile; positives are drawn from it directly.
    let profile = |rng: &mut ChaCha8Rng| {
        let recency = 1.0 + rec_pos.sample(rng);
        let frequency = 7.0 + freq_pos.sample(rng);
        let tenure = tenure_pos.sample(rng);
        (recency, frequency, tenure)
    };
    for _ in 0..178 {
        let (rec, freq, ten) = profile(&mut rng);
        let recency = rec.round().clamp(0.0, 16.0);
        let frequency = freq.round().clamp(1.0, 50.0);
        let tenure = ten.round().clamp(2.0, 98.0);
        examples.push(
            Example::new(vec![recency, frequency, 250.0 * frequency, tenure], 1).unwrap(),
        );
    }
    // 290 negatives sit on the same rays as the positives, just closer to
    // the origin (lower-volume donors who stopped): no direction through
    // the origin tells them apart, and the positives' larger mass × radius
    // pulls margin-loss optima to mark the whole ray positive.
    for _ in 0..290 {
        let (rec, freq, ten) = profile(&mut rng);
        let gamma = rng.random_range(0.22..0.45);
        let recency = (gamma * rec).round().clamp(0.0, 16.0);
        let frequency = (gamma * freq).round().clamp(1.0, 50.0);
        let tenure = (gamma * ten).round().clamp(2.0, 98.0);
        examples.push(
            Example::new(vec![recency, frequency, 250.0 * frequency, tenure], -1).unwrap(),
        );
    }
    // 280 long-lapsed negatives: high recency, low activity.
    for _ in 0..280 {
        let recency = (16.0 + rec_neg_long.sample(&mut rng)).round().clamp(10.0, 74.0);
        let frequency = (1.0 + freq_neg_long.sample(&mut rng)).round().clamp(1.0, 44.0);
        let tenure = tenure_neg_long.sample(&mut rng).round().clamp(2.0, 98.0);
        examples.push(
            Example::new(vec![recency, frequency, 250.0 * frequency, tenure], -1).unwrap(),
        );
    }
    Dataset::with_feature_names(
        examples,
        vec![
            "recency".into(),
            "frequency".into(),
            "monetary".into(),
            "tenure".into(),
        ],
    )
    .unwrap()
}

/// Forgery-detection shape: 1372 examples, 4 continuous features, 762
/// positive (genuine) to 610 negative. The classes are near-separable
/// blobs, but the positive class carries a skewed subcluster placed so
/// the class-mean direction is rotated away from the best separator:
/// example-space boosting reaches a few percent error while a model aimed
/// along aggregate statistics loses roughly an extra ten points.
pub fn banknote_surrogate() -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(0x424e_4b54);
    let mut examples = Vec::with_capacity(1372);
    let unit = Normal::<f64>::new(0.0, 1.0).unwrap();
    // Variance and skewness share a strong latent factor, so the low-error
    // separator must cancel it (a correlated valley that per-coordinate
    // updates descend slowly), while the aggregate class-mean direction
    // leans on the raw variance/kurtosis gaps and errs far more often.
    let sample = |rng: &mut ChaCha8Rng, s: f64| {
        let z = unit.sample(rng);
        let x0 = 1.05 * s + 2.1 * z + 0.25 * unit.sample(rng);
        let x1 = -0.55 * s + 4.2 * z + 0.5 * unit.sample(rng);
        let x2 = -0.8 * s + 2.2 * unit.sample(rng);
        let x3 = -1.2 + 2.0 * unit.sample(rng);
        vec![x0, x1, x2, x3]
    };
    for _ in 0..762 {
        let x = sample(&mut rng, 1.0);
        examples.push(Example::new(x, 1).unwrap());
    }
    for _ in 0..610 {
        let x = sample(&mut rng, -1.0);
        examples.push(Example::new(x, -1).unwrap());
    }
    Dataset::with_feature_names(
        examples,
        vec![
            "variance".into(),
            "skewness".into(),
            "kurtosis".into(),
            "entropy".into(),
        ],
    )
    .unwrap()
}
