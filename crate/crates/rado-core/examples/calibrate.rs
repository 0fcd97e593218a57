//! Calibration probe: 10-fold benchmark of both learners on each
//! surrogate dataset. Used while tuning the generators; kept because it
//! doubles as a quick end-to-end smoke run.

use rado_core::harness::{run_cv_experiment, Algorithm, ExperimentSpec};
use rado_core::synthetic::{banknote_surrogate, haberman_surrogate, transfusion_surrogate};

fn main() {
    for (name, ds) in [
        ("haberman", haberman_surrogate()),
        ("transfusion", transfusion_surrogate()),
        ("banknote", banknote_surrogate()),
    ] {
        for algo in [Algorithm::RadoBoost, Algorithm::AdaBoostSS] {
            let mut spec = ExperimentSpec::new(algo);
            spec.seed = 0;
            let result = run_cv_experiment(&ds, &spec).expect("benchmark run");
            println!(
                "{name:12} {algo:12} mean {:6.2}%  std {:5.2}  best-iterate {:?}",
                result.mean_error,
                result.std_error,
                result
                    .per_fold
                    .iter()
                    .map(|f| f.best_iterate)
                    .collect::<Vec<_>>()
            );
        }
    }
}
