//! Regenerates the committed benchmark CSVs under `data/` from the seeded
//! generators in [`rado_core::synthetic`]. Run from the workspace root:
//!
//! ```text
//! cargo run -p rado-core --example gen_surrogates
//! ```
//!
//! The generators are deterministic, so rerunning this reproduces the files
//! byte for byte.

use std::path::Path;

use rado_core::synthetic::{banknote_surrogate, haberman_surrogate, transfusion_surrogate};

fn main() {
    let out_dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data");
    std::fs::create_dir_all(&out_dir).expect("create data directory");
    for (name, dataset) in [
        ("haberman_surrogate.csv", haberman_surrogate()),
        ("transfusion_surrogate.csv", transfusion_surrogate()),
        ("banknote_surrogate.csv", banknote_surrogate()),
    ] {
        let path = out_dir.join(name);
        dataset.save_csv(&path).expect("write surrogate CSV");
        let (pos, neg) = dataset.class_counts();
        println!(
            "{}  m={} d={} (+{pos}/-{neg})",
            path.display(),
            dataset.m(),
            dataset.d()
        );
    }
}
