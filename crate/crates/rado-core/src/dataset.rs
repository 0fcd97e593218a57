//! Labeled datasets: CSV loading with label mapping, edge vectors, and
//! deterministic stratified fold plans.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

/// One labeled observation: a finite feature vector and a ±1 label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example {
    features: Vec<f64>,
    label: i8,
}

impl Example {
    pub fn new(features: Vec<f64>, label: i8) -> Result<Self> {
        if label != 1 && label != -1 {
            return Err(Error::InvalidInput(format!(
                "label must be +1 or -1, got {label}"
            )));
        }
        if let Some(v) = features.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "feature values must be finite, got {v}"
            )));
        }
        Ok(Example { features, label })
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn label(&self) -> i8 {
        self.label
    }

    /// Edge vector `y·x`: the example as boosting sees it.
    pub fn edge_vector(&self) -> Vec<f64> {
        let y = self.label as f64;
        self.features.iter().map(|x| y * x).collect()
    }
}

/// Maps raw label cells to ±1 when loading a CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PositiveRule {
    /// +1 iff the trimmed cell text is one of these values.
    Values(BTreeSet<String>),
    /// +1 iff the cell parses to a number strictly greater than this.
    GreaterThan(f64),
}

impl PositiveRule {
    /// Parse a rule from CLI text: `">5"` means numeric-greater-than,
    /// anything else is a comma-separated value set.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if let Some(rest) = t.strip_prefix('>') {
            let thr: f64 = rest.trim().parse().map_err(|_| {
                Error::InvalidInput(format!("positive rule \"{t}\": bad threshold \"{rest}\""))
            })?;
            return Ok(PositiveRule::GreaterThan(thr));
        }
        let set: BTreeSet<String> = t
            .split(',')
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect();
        if set.is_empty() {
            return Err(Error::InvalidInput(format!(
                "positive rule \"{text}\" names no values"
            )));
        }
        Ok(PositiveRule::Values(set))
    }

    /// Map one raw label cell to ±1.
    pub fn apply(&self, raw: &str) -> Result<i8> {
        let raw = raw.trim();
        match self {
            PositiveRule::Values(set) => Ok(if set.contains(raw) { 1 } else { -1 }),
            PositiveRule::GreaterThan(thr) => {
                let v: f64 = raw.parse().map_err(|_| {
                    Error::InvalidInput(format!(
                        "label cell \"{raw}\" is not numeric (threshold rule)"
                    ))
                })?;
                Ok(if v > *thr { 1 } else { -1 })
            }
        }
    }
}

/// Selects the label column of a CSV by header name or 0-based position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LabelColumn {
    Name(String),
    Index(usize),
}

impl LabelColumn {
    /// CLI text: a bare integer is a position, anything else a name.
    pub fn parse(text: &str) -> LabelColumn {
        match text.trim().parse::<usize>() {
            Ok(i) => LabelColumn::Index(i),
            Err(_) => LabelColumn::Name(text.trim().to_string()),
        }
    }

    fn resolve(&self, headers: &[String], path: &Path) -> Result<usize> {
        match self {
            LabelColumn::Index(i) if *i < headers.len() => Ok(*i),
            LabelColumn::Index(i) => Err(Error::InvalidInput(format!(
                "{}: label column index {i} out of range ({} columns)",
                path.display(),
                headers.len()
            ))),
            LabelColumn::Name(name) => headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| {
                    Error::InvalidInput(format!(
                        "{}: no column named \"{name}\" (have: {})",
                        path.display(),
                        headers.join(", ")
                    ))
                }),
        }
    }
}

/// An in-memory labeled dataset with uniform dimension `d` and `m ≥ 1`
/// examples. Feature names are kept for round-tripping CSVs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    examples: Vec<Example>,
    feature_names: Vec<String>,
}

impl Dataset {
    pub fn new(examples: Vec<Example>) -> Result<Self> {
        let d = match examples.first() {
            Some(e) => e.features().len(),
            None => return Err(Error::InvalidInput("dataset has no examples".into())),
        };
        let names = (0..d).map(|k| format!("f{k}")).collect();
        Dataset::with_feature_names(examples, names)
    }

    pub fn with_feature_names(examples: Vec<Example>, feature_names: Vec<String>) -> Result<Self> {
        let Some(first) = examples.first() else {
            return Err(Error::InvalidInput("dataset has no examples".into()));
        };
        let d = first.features().len();
        if d == 0 {
            return Err(Error::InvalidInput("examples carry no features".into()));
        }
        if let Some((i, e)) = examples
            .iter()
            .enumerate()
            .find(|(_, e)| e.features().len() != d)
        {
            return Err(Error::InvalidInput(format!(
                "example {i} has {} features, expected {d}",
                e.features().len()
            )));
        }
        if feature_names.len() != d {
            return Err(Error::InvalidInput(format!(
                "{} feature names for dimension {d}",
                feature_names.len()
            )));
        }
        Ok(Dataset {
            examples,
            feature_names,
        })
    }

    /// Number of examples.
    pub fn m(&self) -> usize {
        self.examples.len()
    }

    /// Feature dimension.
    pub fn d(&self) -> usize {
        self.examples[0].features().len()
    }

    pub fn examples(&self) -> &[Example] {
        &self.examples
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn labels(&self) -> Vec<i8> {
        self.examples.iter().map(|e| e.label()).collect()
    }

    /// (#labels = +1, #labels = −1).
    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.examples.iter().filter(|e| e.label() == 1).count();
        (pos, self.examples.len() - pos)
    }

    /// Load an RFC-4180 CSV with a header row. Every non-label column is a
    /// numeric feature (original order preserved); the label column is
    /// mapped to ±1 by `positive`.
    pub fn load_csv(path: &Path, label: &LabelColumn, positive: &PositiveRule) -> Result<Dataset> {
        let io_err = |source| Error::Io {
            path: path.to_path_buf(),
            source,
        };
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| match e.into_kind() {
                csv::ErrorKind::Io(source) => io_err(source),
                other => Error::InvalidInput(format!("{}: {other:?}", path.display())),
            })?;
        let headers: Vec<String> = reader
            .headers()
            .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?
            .iter()
            .map(|h| h.to_string())
            .collect();
        if headers.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "{}: need at least one feature column and one label column",
                path.display()
            )));
        }
        let label_idx = label.resolve(&headers, path)?;
        let feature_names: Vec<String> = headers
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != label_idx)
            .map(|(_, h)| h.clone())
            .collect();

        let parse_err = |row: usize, column: &str, message: String| Error::Parse {
            path: path.to_path_buf(),
            row,
            column: column.to_string(),
            message,
        };

        let mut examples = Vec::new();
        // Data rows are 1-based counting the header as row 1.
        for (rec_idx, record) in reader.records().enumerate() {
            let row = rec_idx + 2;
            let record =
                record.map_err(|e| parse_err(row, "-", e.to_string()))?;
            if record.len() != headers.len() {
                return Err(parse_err(
                    row,
                    "-",
                    format!("{} cells, expected {}", record.len(), headers.len()),
                ));
            }
            let mut features = Vec::with_capacity(headers.len() - 1);
            let mut label_value = 0i8;
            for (col, cell) in record.iter().enumerate() {
                if col == label_idx {
                    label_value = positive
                        .apply(cell)
                        .map_err(|e| parse_err(row, &headers[col], e.to_string()))?;
                } else {
                    let v: f64 = cell.parse().map_err(|_| {
                        parse_err(row, &headers[col], format!("\"{cell}\" is not numeric"))
                    })?;
                    if !v.is_finite() {
                        return Err(parse_err(
                            row,
                            &headers[col],
                            format!("\"{cell}\" is not finite"),
                        ));
                    }
                    features.push(v);
                }
            }
            examples.push(Example::new(features, label_value)?);
        }
        if examples.is_empty() {
            return Err(Error::EmptyData {
                path: path.to_path_buf(),
            });
        }
        Dataset::with_feature_names(examples, feature_names)
    }

    /// Write the dataset back out: feature columns under their names, then
    /// a `label` column holding `1` / `-1`. Loading the result with label
    /// column `"label"` and positive rule `{"1"}` reproduces the dataset.
    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let mut writer = csv::Writer::from_path(path).map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(source) => Error::Io {
                path: path.to_path_buf(),
                source,
            },
            other => Error::InvalidInput(format!("{}: {other:?}", path.display())),
        })?;
        let mut header: Vec<String> = self.feature_names.clone();
        header.push("label".to_string());
        writer
            .write_record(&header)
            .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
        for e in &self.examples {
            let mut rec: Vec<String> = e.features().iter().map(|v| format!("{v}")).collect();
            rec.push(format!("{}", e.label()));
            writer
                .write_record(&rec)
                .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
        }
        writer.flush().map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Per-feature max-abs scaling (optional preprocessing; identically
    /// zero columns are left alone).
    pub fn max_abs_scaled(&self) -> Dataset {
        let d = self.d();
        let mut scale = vec![0.0f64; d];
        for e in &self.examples {
            for (k, v) in e.features().iter().enumerate() {
                scale[k] = scale[k].max(v.abs());
            }
        }
        for s in &mut scale {
            if *s == 0.0 {
                *s = 1.0;
            }
        }
        let examples = self
            .examples
            .iter()
            .map(|e| Example {
                features: e
                    .features()
                    .iter()
                    .enumerate()
                    .map(|(k, v)| v / scale[k])
                    .collect(),
                label: e.label(),
            })
            .collect();
        Dataset {
            examples,
            feature_names: self.feature_names.clone(),
        }
    }

    /// Deterministic stratified k-fold plan: each class is shuffled with a
    /// ChaCha stream derived from `seed`, then dealt into k contiguous
    /// chunks whose sizes differ by at most one; the remainder chunks of
    /// the two classes start at different folds so no fold is left empty.
    pub fn stratified_folds(&self, k: usize, seed: u64) -> Result<FoldPlan> {
        let m = self.m();
        if k < 2 {
            return Err(Error::InvalidInput(format!("need k ≥ 2 folds, got {k}")));
        }
        if k > m {
            return Err(Error::InvalidInput(format!(
                "k = {k} folds exceed m = {m} examples"
            )));
        }
        let (pos, neg) = self.class_counts();
        if pos == 0 || neg == 0 {
            return Err(Error::SingleClass {
                label: if pos == 0 { -1 } else { 1 },
            });
        }

        let mut by_class: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
        for (i, e) in self.examples.iter().enumerate() {
            by_class[if e.label() == 1 { 0 } else { 1 }].push(i);
        }

        let mut assignments = vec![0usize; m];
        let mut offset = 0usize;
        for (c, indices) in by_class.iter_mut().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(seed::mix(seed, "stratified-fold", c as u64));
            indices.shuffle(&mut rng);
            let base = indices.len() / k;
            let rem = indices.len() % k;
            let mut cursor = 0usize;
            for j in 0..k {
                // Remainder chunks rotate by `offset` so the second class
                // tops up the folds the first class left smallest.
                let extra = ((j + k - offset % k) % k < rem) as usize;
                for &i in &indices[cursor..cursor + base + extra] {
                    assignments[i] = j;
                }
                cursor += base + extra;
            }
            offset += rem;
        }

        let plan = FoldPlan { k, assignments };
        for j in 0..k {
            if plan.fold_len(j) == 0 {
                return Err(Error::InvalidInput(format!(
                    "fold {j} is empty (m = {m}, k = {k})"
                )));
            }
        }
        Ok(plan)
    }

    /// Materialize (train, test) datasets for one fold of a plan.
    pub fn split(&self, plan: &FoldPlan, fold: usize) -> Result<(Dataset, Dataset)> {
        if plan.assignments.len() != self.m() {
            return Err(Error::InvalidInput(format!(
                "fold plan covers {} examples, dataset has {}",
                plan.assignments.len(),
                self.m()
            )));
        }
        if fold >= plan.k {
            return Err(Error::InvalidInput(format!(
                "fold {fold} out of range (k = {})",
                plan.k
            )));
        }
        let mut train = Vec::new();
        let mut test = Vec::new();
        for (i, e) in self.examples.iter().enumerate() {
            if plan.assignments[i] == fold {
                test.push(e.clone());
            } else {
                train.push(e.clone());
            }
        }
        Ok((
            Dataset::with_feature_names(train, self.feature_names.clone())?,
            Dataset::with_feature_names(test, self.feature_names.clone())?,
        ))
    }
}

/// Assignment of every example to one of `k` folds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldPlan {
    k: usize,
    assignments: Vec<usize>,
}

impl FoldPlan {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn assignments(&self) -> &[usize] {
        &self.assignments
    }

    pub fn fold_len(&self, fold: usize) -> usize {
        self.assignments.iter().filter(|&&f| f == fold).count()
    }

    /// Indices of the examples held out by `fold`.
    pub fn fold_indices(&self, fold: usize) -> Vec<usize> {
        self.assignments
            .iter()
            .enumerate()
            .filter(|(_, &f)| f == fold)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Convenience loader used by the CLI: path + label selector + rule.
pub fn load_csv(path: impl Into<PathBuf>, label: &LabelColumn, rule: &PositiveRule) -> Result<Dataset> {
    Dataset::load_csv(&path.into(), label, rule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toy(labels: &[i8]) -> Dataset {
        let examples = labels
            .iter()
            .enumerate()
            .map(|(i, &y)| Example::new(vec![i as f64, 1.0], y).unwrap())
            .collect();
        Dataset::new(examples).unwrap()
    }

    #[test]
    fn edge_vector_multiplies_by_label() {
        let e = Example::new(vec![2.0, -3.0], -1).unwrap();
        assert_eq!(e.edge_vector(), vec![-2.0, 3.0]);
        let e = Example::new(vec![2.0, -3.0], 1).unwrap();
        assert_eq!(e.edge_vector(), vec![2.0, -3.0]);
    }

    #[test]
    fn rejects_bad_labels_and_nonfinite_features() {
        assert!(Example::new(vec![1.0], 0).is_err());
        assert!(Example::new(vec![f64::NAN], 1).is_err());
        assert!(Example::new(vec![f64::INFINITY], -1).is_err());
    }

    #[test]
    fn load_csv_threshold_rule() {
        // Two rows, label column B, positive iff > 5 → labels (−1, +1), d = 1.
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        std::fs::write(&path, "A,B\n1.0,5\n2.0,6\n").unwrap();
        let ds = Dataset::load_csv(
            &path,
            &LabelColumn::Name("B".into()),
            &PositiveRule::GreaterThan(5.0),
        )
        .unwrap();
        assert_eq!(ds.m(), 2);
        assert_eq!(ds.d(), 1);
        assert_eq!(ds.labels(), vec![-1, 1]);
        assert_eq!(ds.examples()[0].features(), &[1.0]);
        assert_eq!(ds.feature_names(), &["A".to_string()]);
    }

    #[test]
    fn load_csv_value_set_rule_and_index_column() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        std::fs::write(&path, "cls,x\nyes,1.5\nno,2.5\nyes,3.5\n").unwrap();
        let rule = PositiveRule::parse("yes").unwrap();
        let ds = Dataset::load_csv(&path, &LabelColumn::Index(0), &rule).unwrap();
        assert_eq!(ds.labels(), vec![1, -1, 1]);
        assert_eq!(ds.d(), 1);
    }

    #[test]
    fn load_csv_reports_row_and_column_on_parse_failure() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        std::fs::write(&path, "x,label\n1.0,1\noops,0\n").unwrap();
        let err = Dataset::load_csv(
            &path,
            &LabelColumn::Name("label".into()),
            &PositiveRule::parse("1").unwrap(),
        )
        .unwrap_err();
        match err {
            Error::Parse { row, column, .. } => {
                assert_eq!(row, 3, "1-based counting the header");
                assert_eq!(column, "x");
            }
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn load_csv_rejects_empty_data() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        std::fs::write(&path, "x,label\n").unwrap();
        let err = Dataset::load_csv(
            &path,
            &LabelColumn::Name("label".into()),
            &PositiveRule::parse("1").unwrap(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::EmptyData { .. }));
    }

    #[test]
    fn csv_round_trip_is_identity() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let ds = toy(&[1, -1, 1, 1, -1]);
        ds.save_csv(&path).unwrap();
        let back = Dataset::load_csv(
            &path,
            &LabelColumn::Name("label".into()),
            &PositiveRule::parse("1").unwrap(),
        )
        .unwrap();
        assert_eq!(ds, back);
    }

    #[test]
    fn positive_rule_parsing() {
        assert_eq!(
            PositiveRule::parse("> 5").unwrap(),
            PositiveRule::GreaterThan(5.0)
        );
        assert_eq!(
            PositiveRule::parse("a, b").unwrap(),
            PositiveRule::Values(["a".to_string(), "b".to_string()].into())
        );
        assert!(PositiveRule::parse(">x").is_err());
        assert!(PositiveRule::parse("  ").is_err());
    }

    #[test]
    fn stratified_folds_exact_small_case() {
        // 15 examples (10 positive, 5 negative), k = 5 → every fold gets
        // exactly 2 positives and 1 negative.
        let mut labels = vec![1i8; 10];
        labels.extend_from_slice(&[-1; 5]);
        let ds = toy(&labels);
        let plan = ds.stratified_folds(5, 7).unwrap();
        for j in 0..5 {
            let idx = plan.fold_indices(j);
            let pos = idx.iter().filter(|&&i| ds.labels()[i] == 1).count();
            assert_eq!(pos, 2, "fold {j} positives");
            assert_eq!(idx.len() - pos, 1, "fold {j} negatives");
        }
    }

    #[test]
    fn stratified_folds_deterministic_and_seed_sensitive() {
        let mut labels = vec![1i8; 40];
        labels.extend_from_slice(&[-1; 23]);
        let ds = toy(&labels);
        let a = ds.stratified_folds(10, 123).unwrap();
        let b = ds.stratified_folds(10, 123).unwrap();
        assert_eq!(a, b, "same seed must reproduce the same plan");
        let c = ds.stratified_folds(10, 124).unwrap();
        assert_ne!(a, c, "different seeds should shuffle differently");
    }

    #[test]
    fn stratified_folds_class_balance_within_one() {
        let mut labels = vec![1i8; 225];
        labels.extend_from_slice(&[-1; 81]);
        let ds = toy(&labels);
        let plan = ds.stratified_folds(10, 42).unwrap();
        for j in 0..10 {
            let idx = plan.fold_indices(j);
            assert!(
                idx.len() == 30 || idx.len() == 31,
                "306 examples over 10 folds give sizes 30/31, got {}",
                idx.len()
            );
            let pos = idx.iter().filter(|&&i| ds.labels()[i] == 1).count() as f64;
            let expect = 225.0 * idx.len() as f64 / 306.0;
            assert!(
                (pos - expect).abs() <= 1.0 + 1e-9,
                "fold {j}: {pos} positives vs proportional {expect}"
            );
        }
    }

    #[test]
    fn stratified_folds_no_empty_fold_when_classes_are_small() {
        // 3 positives + 2 negatives over 4 folds: remainder rotation must
        // keep every fold non-empty.
        let ds = toy(&[1, 1, 1, -1, -1]);
        let plan = ds.stratified_folds(4, 9).unwrap();
        for j in 0..4 {
            assert!(plan.fold_len(j) >= 1, "fold {j} empty");
        }
    }

    #[test]
    fn stratified_folds_rejections() {
        let ds = toy(&[1, 1, -1]);
        assert!(matches!(
            ds.stratified_folds(1, 0),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            ds.stratified_folds(4, 0),
            Err(Error::InvalidInput(_))
        ));
        let single = toy(&[1, 1, 1]);
        assert!(matches!(
            single.stratified_folds(2, 0),
            Err(Error::SingleClass { label: 1 })
        ));
    }

    #[test]
    fn split_partitions_dataset() {
        let mut labels = vec![1i8; 12];
        labels.extend_from_slice(&[-1; 8]);
        let ds = toy(&labels);
        let plan = ds.stratified_folds(4, 11).unwrap();
        for j in 0..4 {
            let (train, test) = ds.split(&plan, j).unwrap();
            assert_eq!(train.m() + test.m(), ds.m());
            assert_eq!(test.m(), plan.fold_len(j));
        }
    }

    #[test]
    fn max_abs_scaling_bounds_features() {
        let ds = Dataset::new(vec![
            Example::new(vec![10.0, 0.0], 1).unwrap(),
            Example::new(vec![-5.0, 0.0], -1).unwrap(),
        ])
        .unwrap();
        let scaled = ds.max_abs_scaled();
        assert_eq!(scaled.examples()[0].features(), &[1.0, 0.0]);
        assert_eq!(scaled.examples()[1].features(), &[-0.5, 0.0]);
    }

    proptest! {
        #[test]
        fn edge_vector_flips_with_label(xs in proptest::collection::vec(-1e6f64..1e6, 1..8)) {
            let pos = Example::new(xs.clone(), 1).unwrap();
            let neg = Example::new(xs, -1).unwrap();
            let flipped: Vec<f64> = neg.edge_vector().iter().map(|v| -v).collect();
            prop_assert_eq!(pos.edge_vector(), flipped);
        }

        #[test]
        fn folds_partition_exactly(
            pos in 2usize..40,
            neg in 2usize..40,
            k in 2usize..6,
            s in 0u64..1000,
        ) {
            prop_assume!(k <= pos + neg);
            let mut labels = vec![1i8; pos];
            labels.extend(std::iter::repeat(-1i8).take(neg));
            let ds = toy(&labels);
            let plan = ds.stratified_folds(k, s).unwrap();
            // Every example lands in exactly one fold and folds cover all.
            let total: usize = (0..k).map(|j| plan.fold_len(j)).sum();
            prop_assert_eq!(total, pos + neg);
            for j in 0..k {
                prop_assert!(plan.fold_len(j) >= 1, "fold {} empty", j);
            }
        }
    }
}
