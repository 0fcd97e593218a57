//! Acceptance gate: one test per criterion, each printing a single
//! `acceptance NN (<label>): pass|fail` line before asserting. Tolerances
//! come from [`rado_core::tolerances`]; nothing here is tuned per-run.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rado_core::baseline::adaboost_ss;
use rado_core::boosting::{radoboost, radoboost_with_picks, BoostConfig, BoostRun};
use rado_core::dataset::{Dataset, Example, LabelColumn, PositiveRule};
use rado_core::error::Error;
use rado_core::harness::{
    run_cv_experiment, run_noise_sweep, Algorithm, ExperimentSpec, NoiseSweepSpec,
};
use rado_core::losses::{
    equivalence_gap_exact, exp_rado_risk, logloss, logloss_gradient, LinearModel,
};
use rado_core::privacy::{dp_beta, dp_interval, dpfreal, rejection_bound, DpFeatureConfig};
use rado_core::rado::{
    compute_rado, sample_uniform_signatures, Provenance, Rado, RadoSet, Signature,
};
use rado_core::reconstruction::{
    ambiguity_witness, hausdorff, recover_edges, signatures_to_selection,
};
use rado_core::tolerances::{
    reference, BOUND_SLACK_ABS, EQUIVALENCE_GAP_ABS, GRADIENT_REL, RADO_PRESERVE_ABS,
    RECOVERY_REL, SWEEP_CONSISTENCY_ABS, WEIGHT_SIMPLEX_ABS,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Print the per-criterion verdict line, then enforce it.
fn gate(number: u32, label: &str, ok: bool) {
    println!(
        "acceptance {number:02} ({label}): {}",
        if ok { "pass" } else { "fail" }
    );
    assert!(ok, "acceptance criterion {number:02} ({label}) failed");
}

fn random_dataset(rng: &mut ChaCha8Rng, m: usize, d: usize) -> Dataset {
    loop {
        let examples: Vec<Example> = (0..m)
            .map(|_| {
                let x: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..2.0)).collect();
                let y = if rng.random::<bool>() { 1 } else { -1 };
                Example::new(x, y).unwrap()
            })
            .collect();
        // Retry the rare all-one-class draw so stratified users stay happy.
        let ds = Dataset::new(examples).unwrap();
        let (pos, neg) = ds.class_counts();
        if m == 1 || (pos > 0 && neg > 0) {
            return ds;
        }
    }
}

fn random_model(rng: &mut ChaCha8Rng, d: usize) -> LinearModel {
    LinearModel {
        theta: (0..d).map(|_| rng.random_range(-1.5..1.5)).collect(),
    }
}

fn random_rado_set(rng: &mut ChaCha8Rng, n: usize, d: usize) -> RadoSet {
    let rados: Vec<Rado> = (0..n)
        .map(|_| {
            let v: Vec<f64> = (0..d).map(|_| rng.random_range(-3.0..3.0)).collect();
            Rado::new(v, 1).unwrap()
        })
        .collect();
    RadoSet::new(rados, Provenance::Uniform { seed: 0 }).unwrap()
}

fn data_file(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn load_surrogate(name: &str) -> Dataset {
    rado_core::dataset::load_csv(
        data_file(name),
        &LabelColumn::Name("label".into()),
        &PositiveRule::parse("1").unwrap(),
    )
    .unwrap()
}

/// 1 — the exhaustive exponential rado risk reproduces the logistic loss.
#[test]
fn criterion_01_loss_equivalence_identity() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC0_0001);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let m = rng.random_range(1..=12);
        let d = rng.random_range(1..=6);
        let ds = random_dataset(&mut rng, m, d);
        for _ in 0..5 {
            let model = random_model(&mut rng, d);
            let gap = equivalence_gap_exact(&ds, &model, 12).unwrap();
            worst = worst.max(gap);
        }
    }
    let elapsed = started.elapsed();
    let ok = worst <= EQUIVALENCE_GAP_ABS && elapsed < Duration::from_secs(10);
    println!("  worst identity gap {worst:.3e} over 250 cases in {elapsed:.2?}");
    gate(1, "loss equivalence identity", ok);
}

/// 2 — the training risk obeys the per-round potential product, and the
/// weak-learning rate bound whenever every edge clears a margin γ.
#[test]
fn criterion_02_boosting_potential_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC0_0002);
    let mut ok = true;
    let mut rate_checked = 0usize;
    for _ in 0..100 {
        let n = rng.random_range(2..=50);
        let d = rng.random_range(1..=10);
        let t = rng.random_range(1..=200);
        let rados = random_rado_set(&mut rng, n, d);
        let run = radoboost(&rados, &BoostConfig::new(t)).unwrap();
        let risk = exp_rado_risk(&rados, &run.model).unwrap();
        let product: f64 = run
            .trace
            .records
            .iter()
            .map(|rec| (1.0 - rec.r * rec.r).sqrt())
            .product();
        ok &= risk <= product + BOUND_SLACK_ABS;
        let gamma = run
            .trace
            .records
            .iter()
            .map(|rec| rec.r.abs())
            .fold(f64::INFINITY, f64::min);
        if gamma > 0.0 {
            rate_checked += 1;
            let rate = (-(t as f64) * gamma * gamma / 2.0).exp();
            ok &= risk <= rate + BOUND_SLACK_ABS;
        }
    }
    println!("  100 runs; rate bound exercised on {rate_checked} (margin > 0)");
    gate(2, "boosting potential bound", ok);
}

/// 3 — weight vectors stay on the simplex for both boosting loops.
#[test]
fn criterion_03_weight_simplex() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC0_0003);
    let check = |run: &BoostRun| -> bool {
        run.trace.weights.as_ref().unwrap().iter().all(|row| {
            row.iter().all(|w| *w >= -WEIGHT_SIMPLEX_ABS)
                && (row.iter().sum::<f64>() - 1.0).abs() <= WEIGHT_SIMPLEX_ABS
        })
    };
    let mut ok = true;
    for _ in 0..20 {
        let mut config = BoostConfig::new(rng.random_range(1..=60));
        config.record_weights = true;
        let (n, d) = (rng.random_range(2..=30), rng.random_range(1..=6));
        let rados = random_rado_set(&mut rng, n, d);
        ok &= check(&radoboost(&rados, &config).unwrap());
        let (m, d) = (rng.random_range(2..=30), rng.random_range(1..=6));
        let ds = random_dataset(&mut rng, m, d);
        ok &= check(&adaboost_ss(&ds, &config).unwrap());
    }
    gate(3, "weight simplex invariant", ok);
}

/// 4 — κ ∈ {1,2,4} rescales the final model by exactly 1/κ, bitwise.
#[test]
fn criterion_04_kappa_linearity() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC0_0004);
    let mut ok = true;
    for _ in 0..10 {
        let (n, d) = (rng.random_range(4..=30), rng.random_range(2..=8));
        let rados = random_rado_set(&mut rng, n, d);
        let base = radoboost(&rados, &BoostConfig::new(40)).unwrap();
        let picks: Vec<usize> = base.trace.records.iter().map(|rec| rec.feature).collect();
        for kappa in [2.0f64, 4.0] {
            let mut config = BoostConfig::new(40);
            config.kappa = kappa;
            let scaled = radoboost_with_picks(&rados, &config, &picks).unwrap();
            ok &= scaled
                .model
                .theta
                .iter()
                .zip(&base.model.theta)
                .all(|(s, b)| s.to_bits() == (b / kappa).to_bits());
        }
    }
    gate(4, "kappa step linearity", ok);
}

/// 5 — the private sampler accepts exactly the brute-force signature set.
#[test]
fn criterion_05_dp_sampler_exactness() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC0_0005);
    let mut ok = true;
    for m in [8usize, 12, 16] {
        let epsilon = 4.0;
        let beta = dp_beta(epsilon).unwrap();
        // Mixed 0/1 protected column; two free real features. Redraw the
        // rare dataset whose acceptance window holds no signature at all
        // (the starvation path is covered by unit tests); the window /
        // brute-force agreement is still checked on every draw.
        let (ds, brute) = loop {
            let examples: Vec<Example> = (0..m)
                .map(|_| {
                    let x = vec![
                        f64::from(rng.random::<bool>()),
                        rng.random_range(-2.0..2.0),
                        rng.random_range(-2.0..2.0),
                    ];
                    Example::new(x, if rng.random::<bool>() { 1 } else { -1 }).unwrap()
                })
                .collect();
            let ds = Dataset::new(examples).unwrap();
            let interval = dp_interval(&ds, 0, beta).unwrap();

            // Brute force over all 2^m signatures, recomputing the window
            // bounds literally from m⁺, m and β.
            let m_plus = ds
                .examples()
                .iter()
                .filter(|e| f64::from(e.label()) * e.features()[0] == 1.0)
                .count() as f64;
            let margin = beta * (m as f64 + 1.0);
            let (lo, hi) = (m_plus - m as f64 + margin, m_plus - margin);
            let mut brute = std::collections::BTreeSet::new();
            for c in 0..(1u64 << m) {
                let sig = Signature::from_index(c, m).unwrap();
                let coord = compute_rado(&ds, &sig).unwrap().values()[0];
                let brute_in = coord >= lo && coord <= hi;
                ok &= brute_in == interval.contains(coord);
                if brute_in {
                    brute.insert(c);
                }
            }
            if !brute.is_empty() {
                break (ds, brute);
            }
        };

        // Every signature the sampler released is in the brute-force set.
        let sample = dpfreal(
            &ds,
            &DpFeatureConfig {
                j_star: 0,
                epsilon,
                n: 64,
                seed: 17,
            },
        )
        .unwrap();
        for sig in &sample.signatures {
            let mut index = 0u64;
            for (i, s) in sig.entries().iter().enumerate() {
                if *s == 1 {
                    index |= 1 << (m - 1 - i);
                }
            }
            ok &= brute.contains(&index);
        }

        // Acceptance rate agrees with the counting measure |Σ|/2^m.
        let measure = brute.len() as f64 / (1u64 << m) as f64;
        let draws = sample.meta.n_draws as f64;
        let se = (measure * (1.0 - measure) / draws).sqrt().max(1e-12);
        let observed = sample.meta.n as f64 / draws;
        ok &= (observed - measure).abs() <= 6.0 * se + 1.0 / draws;
        println!(
            "  m={m}: |Σ|/2^m = {measure:.4}, observed {observed:.4} over {draws} draws"
        );
    }
    gate(5, "dp sampler exactness", ok);
}

/// 6 — the η = 0.05 draw bound holds in at least 19 of 20 seeded runs.
#[test]
fn criterion_06_rejection_draw_bound() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC0_0006);
    let m = 200;
    let n = 50;
    let epsilon = 1.0;
    let beta = dp_beta(epsilon).unwrap();
    let bound = rejection_bound(m, beta, n, 0.05).unwrap();
    let mut exceeded = 0usize;
    for seed in 0..20u64 {
        // Fresh labels per run; the protected column is identically 1 so
        // every example contributes ±1 to the watched coordinate.
        let examples: Vec<Example> = (0..m)
            .map(|_| {
                let x = vec![1.0, rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
                Example::new(x, if rng.random::<bool>() { 1 } else { -1 }).unwrap()
            })
            .collect();
        let ds = Dataset::new(examples).unwrap();
        let sample = dpfreal(
            &ds,
            &DpFeatureConfig {
                j_star: 0,
                epsilon,
                n,
                seed,
            },
        )
        .unwrap();
        if sample.meta.n_draws > bound {
            exceeded += 1;
        }
    }
    let elapsed = started.elapsed();
    println!("  bound {bound} draws; exceeded in {exceeded}/20 runs; {elapsed:.2?}");
    gate(
        6,
        "rejection draw bound",
        exceeded <= 1 && elapsed < Duration::from_secs(30),
    );
}

/// 7 — edges are recovered through the normal equations from n ≥ m
/// full-rank rados, and n = m − 1 reports underdetermination.
#[test]
fn criterion_07_reconstruction_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC0_0007);
    let (m, d) = (6usize, 3usize);
    let ds = random_dataset(&mut rng, m, d);
    let labels = ds.labels();

    // Draw 10 signatures, retrying the seed until their selection matrix
    // has full rank (the criterion's stated precondition).
    let mut recovered = None;
    for seed in 0..50u64 {
        let sigs = sample_uniform_signatures(m, 10, seed).unwrap();
        let selection = signatures_to_selection(&sigs, &labels).unwrap();
        let rados: Vec<Rado> = sigs
            .iter()
            .map(|s| compute_rado(&ds, s).unwrap())
            .collect();
        let set = RadoSet::new(rados, Provenance::Uniform { seed }).unwrap();
        match recover_edges(&set, &selection) {
            Ok(rec) => {
                recovered = Some(rec);
                break;
            }
            Err(Error::Underdetermined { .. }) => continue,
            Err(other) => panic!("unexpected recovery failure: {other}"),
        }
    }
    let recovery = recovered.expect("no full-rank draw in 50 seeds");
    let mut ok = recovery.rank == m && recovery.residual <= RECOVERY_REL;
    for (row, example) in recovery.edges.iter().zip(ds.examples()) {
        let truth = example.edge_vector();
        let err: f64 = row
            .iter()
            .zip(&truth)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let scale = truth.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
        ok &= err / scale <= RECOVERY_REL;
    }

    // m − 1 rados must refuse rather than guess.
    let sigs = sample_uniform_signatures(m, m - 1, 3).unwrap();
    let selection = signatures_to_selection(&sigs, &labels).unwrap();
    let rados: Vec<Rado> = sigs
        .iter()
        .map(|s| compute_rado(&ds, s).unwrap())
        .collect();
    let set = RadoSet::new(rados, Provenance::Uniform { seed: 3 }).unwrap();
    ok &= matches!(
        recover_edges(&set, &selection),
        Err(Error::Underdetermined { .. })
    );
    gate(7, "reconstruction round trip", ok);
}

/// 8 — the split construction changes the example set without moving any
/// rado.
#[test]
fn criterion_08_ambiguity_witness() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC0_0008);
    let mut ok = true;
    for _ in 0..20 {
        let m = rng.random_range(3..=8);
        let d = rng.random_range(2..=5);
        let ds = random_dataset(&mut rng, m, d);
        let split = rng.random_range(0..m);
        let witness = ambiguity_witness(&ds, split, 0.5).unwrap();

        for seed in 0..10u64 {
            for sig in sample_uniform_signatures(m, 4, 1000 + seed).unwrap() {
                let parent = compute_rado(&ds, &sig).unwrap();
                let lifted = witness.lift_signature(&sig).unwrap();
                let child = compute_rado(&witness.dataset, &lifted).unwrap();
                ok &= parent
                    .values()
                    .iter()
                    .zip(child.values())
                    .all(|(a, b)| (a - b).abs() <= RADO_PRESERVE_ABS);
            }
        }

        let parent_edges: Vec<Vec<f64>> =
            ds.examples().iter().map(|e| e.edge_vector()).collect();
        let child_edges: Vec<Vec<f64>> = witness
            .dataset
            .examples()
            .iter()
            .map(|e| e.edge_vector())
            .collect();
        ok &= hausdorff(&parent_edges, &child_edges).unwrap() > 0.0;
    }
    gate(8, "ambiguity witness", ok);
}

/// 9 — desk-scale benchmark reproduction on the committed surrogate data.
#[test]
fn criterion_09_benchmark_reproduction() {
    let started = Instant::now();
    let haberman = load_surrogate("haberman_surrogate.csv");
    let transfusion = load_surrogate("transfusion_surrogate.csv");
    let banknote = load_surrogate("banknote_surrogate.csv");

    let rado_spec = ExperimentSpec::new(Algorithm::RadoBoost);
    let ada_spec = ExperimentSpec::new(Algorithm::AdaBoostSS);

    let hab = run_cv_experiment(&haberman, &rado_spec).unwrap().mean_error;
    let tra = run_cv_experiment(&transfusion, &rado_spec).unwrap().mean_error;
    let ban_rado = run_cv_experiment(&banknote, &rado_spec).unwrap().mean_error;
    let ban_ada = run_cv_experiment(&banknote, &ada_spec).unwrap().mean_error;
    let elapsed = started.elapsed();

    println!(
        "  haberman {hab:.2}% (ref {}), transfusion {tra:.2}% (ref {}), \
         banknote {ban_rado:.2}% vs baseline {ban_ada:.2}% (refs {} / {}); {elapsed:.2?}",
        reference::HABERMAN_RADOBOOST_ERR,
        reference::TRANSFUSION_RADOBOOST_ERR,
        reference::BANKNOTE_RADOBOOST_ERR,
        reference::BANKNOTE_ADABOOST_ERR,
    );
    let ok = (hab - reference::HABERMAN_RADOBOOST_ERR).abs() <= reference::MEAN_ERR_WINDOW
        && (tra - reference::TRANSFUSION_RADOBOOST_ERR).abs() <= reference::MEAN_ERR_WINDOW
        && ban_rado - ban_ada >= reference::BANKNOTE_ORDERING_MARGIN
        && elapsed < Duration::from_secs(600);
    gate(9, "benchmark reproduction", ok);
}

/// 10 — the ς = 0 sweep row equals the plain benchmark, and Δperr rows are
/// recomputable from the emitted per-run rows.
#[test]
fn criterion_10_noise_sweep_consistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC0_000A);
    let ds = random_dataset(&mut rng, 80, 3);
    let mut base = ExperimentSpec::new(Algorithm::RadoBoost);
    base.rounds = 60;
    base.folds = 5;
    base.seed = 7;
    let sweep = run_noise_sweep(
        &ds,
        &NoiseSweepSpec {
            base: base.clone(),
            sigmas: vec![0.0, 0.3],
            repeats: 2,
        },
    )
    .unwrap();

    let plain = run_cv_experiment(&ds, &base).unwrap();
    let zero_row = sweep
        .summary
        .iter()
        .find(|row| row.sigma == 0.0 && row.algorithm == "radoboost")
        .unwrap();
    let mut ok = (zero_row.mean_error - plain.mean_error).abs() <= SWEEP_CONSISTENCY_ABS;

    for row in &sweep.summary {
        let mean_of = |algo: &str, sigma: f64| {
            let vals: Vec<f64> = sweep
                .runs
                .iter()
                .filter(|r| r.algorithm == algo && r.sigma == sigma)
                .map(|r| r.mean_error)
                .collect();
            vals.iter().sum::<f64>() / vals.len() as f64
        };
        let expected = if row.strategy == "examples" {
            0.0
        } else {
            mean_of("radoboost", row.sigma) - mean_of("adaboost-ss", row.sigma)
        };
        ok &= (row.delta_perr - expected).abs() <= SWEEP_CONSISTENCY_ABS;
    }
    gate(10, "noise sweep consistency", ok);
}

/// 11 — analytic logistic gradient matches central finite differences.
#[test]
fn criterion_11_gradient_check() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC0_000B);
    let mut ok = true;
    for _ in 0..20 {
        let m = rng.random_range(2..=12);
        let d = rng.random_range(1..=5);
        let ds = random_dataset(&mut rng, m, d);
        let model = random_model(&mut rng, d);
        let analytic = logloss_gradient(&ds, &model).unwrap();
        let mut numeric = vec![0.0; d];
        for k in 0..d {
            let h = 1e-6 * model.theta[k].abs().max(1.0);
            let mut up = model.clone();
            up.theta[k] += h;
            let mut down = model.clone();
            down.theta[k] -= h;
            numeric[k] = (logloss(&ds, &up).unwrap() - logloss(&ds, &down).unwrap()) / (2.0 * h);
        }
        let diff: f64 = analytic
            .iter()
            .zip(&numeric)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let scale = analytic.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
        ok &= diff / scale <= GRADIENT_REL;
    }
    gate(11, "logistic gradient check", ok);
}
