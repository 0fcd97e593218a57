//! Rademacher observations: signatures over a labeled sample and the
//! aggregate vectors they induce.
//!
//! For a signature `σ ∈ {−1,+1}^m`, the observation is
//! `π_σ = Σ_{i: σ_i = y_i} y_i·x_i`, equivalently `½·Σ_i (σ_i + y_i)·x_i`.
//! The agreement count `|{i: σ_i = y_i}|` is the support size. `σ = y`
//! recovers `m` times the mean operator, `σ = −y` the zero vector.

use std::fmt;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// A ±1 assignment per training example.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature(Vec<i8>);

impl Signature {
    pub fn new(entries: Vec<i8>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidInput("signature has no entries".into()));
        }
        if let Some(v) = entries.iter().find(|&&v| v != 1 && v != -1) {
            return Err(Error::InvalidInput(format!(
                "signature entries must be ±1, got {v}"
            )));
        }
        Ok(Signature(entries))
    }

    /// The `index`-th signature of length `m` in lexicographic order with
    /// −1 < +1: bit `m−1−i` of `index` (most significant bit first) gives
    /// entry `i`.
    pub fn from_index(index: u64, m: usize) -> Result<Self> {
        if m == 0 || m > 63 {
            return Err(Error::InvalidInput(format!(
                "signature length {m} out of range 1..=63"
            )));
        }
        if index >> m != 0 {
            return Err(Error::InvalidInput(format!(
                "signature index {index} out of range for m = {m}"
            )));
        }
        let entries = (0..m)
            .map(|i| if (index >> (m - 1 - i)) & 1 == 1 { 1 } else { -1 })
            .collect();
        Ok(Signature(entries))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[i8] {
        &self.0
    }

    /// Entries negated: the complementary signature.
    pub fn negated(&self) -> Signature {
        Signature(self.0.iter().map(|v| -v).collect())
    }

    /// Number of examples the signature agrees with: `|{i: σ_i = y_i}|`.
    pub fn support_size(&self, labels: &[i8]) -> Result<usize> {
        if labels.len() != self.0.len() {
            return Err(Error::InvalidInput(format!(
                "signature length {} vs {} labels",
                self.0.len(),
                labels.len()
            )));
        }
        Ok(self
            .0
            .iter()
            .zip(labels)
            .filter(|(s, y)| s == y)
            .count())
    }
}

/// One Rademacher observation: aggregate values plus its support size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rado {
    values: Vec<f64>,
    support_size: usize,
}

impl Rado {
    pub fn new(values: Vec<f64>, support_size: usize) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("rado has no values".into()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "rado values must be finite, got {v}"
            )));
        }
        Ok(Rado {
            values,
            support_size,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn support_size(&self) -> usize {
        self.support_size
    }
}

/// How a rado set was produced; carried through CSV output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Provenance {
    /// All 2^m signatures in lexicographic order.
    Exhaustive,
    /// i.i.d. uniform signatures.
    Uniform { seed: u64 },
    /// Uniform among signatures of fixed support size.
    FixedSupport { m_star: usize, seed: u64 },
    /// Differentially private release protecting one feature.
    DpFeature { j_star: usize, epsilon: f64, seed: u64 },
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Exhaustive => write!(f, "exhaustive"),
            Provenance::Uniform { seed } => write!(f, "uniform(seed={seed})"),
            Provenance::FixedSupport { m_star, seed } => {
                write!(f, "support(m_star={m_star},seed={seed})")
            }
            Provenance::DpFeature {
                j_star,
                epsilon,
                seed,
            } => write!(f, "dp(j_star={j_star},eps={epsilon},seed={seed})"),
        }
    }
}

/// A set of rados of uniform dimension, tagged with provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadoSet {
    rados: Vec<Rado>,
    provenance: Provenance,
}

impl RadoSet {
    pub fn new(rados: Vec<Rado>, provenance: Provenance) -> Result<Self> {
        let d = match rados.first() {
            Some(r) => r.values().len(),
            None => return Err(Error::InvalidInput("rado set is empty".into())),
        };
        if let Some((j, r)) = rados
            .iter()
            .enumerate()
            .find(|(_, r)| r.values().len() != d)
        {
            return Err(Error::InvalidInput(format!(
                "rado {j} has dimension {}, expected {d}",
                r.values().len()
            )));
        }
        Ok(RadoSet { rados, provenance })
    }

    /// Compute the rados of `signatures` over `dataset`.
    pub fn from_signatures(
        dataset: &Dataset,
        signatures: &[Signature],
        provenance: Provenance,
    ) -> Result<Self> {
        let rados = signatures
            .iter()
            .map(|s| compute_rado(dataset, s))
            .collect::<Result<Vec<_>>>()?;
        RadoSet::new(rados, provenance)
    }

    pub fn n(&self) -> usize {
        self.rados.len()
    }

    pub fn d(&self) -> usize {
        self.rados[0].values().len()
    }

    pub fn rados(&self) -> &[Rado] {
        &self.rados
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Value of rado `j` at feature `k`.
    pub fn value(&self, j: usize, k: usize) -> f64 {
        self.rados[j].values()[k]
    }

    /// Write one rado per row: `pi_0..pi_{d-1}, support_size, provenance`.
    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let mut writer = csv::Writer::from_path(path).map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(source) => Error::Io {
                path: path.to_path_buf(),
                source,
            },
            other => Error::InvalidInput(format!("{}: {other:?}", path.display())),
        })?;
        let mut header: Vec<String> = (0..self.d()).map(|k| format!("pi_{k}")).collect();
        header.push("support_size".into());
        header.push("provenance".into());
        writer
            .write_record(&header)
            .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
        let prov = self.provenance.to_string();
        for r in &self.rados {
            let mut rec: Vec<String> = r.values().iter().map(|v| format!("{v}")).collect();
            rec.push(format!("{}", r.support_size()));
            rec.push(prov.clone());
            writer
                .write_record(&rec)
                .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
        }
        writer.flush().map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Read a rado-set CSV written by [`RadoSet::save_csv`]. The
    /// provenance column is kept as an opaque tag (`Exhaustive` when it
    /// cannot be interpreted); values and support sizes are what matter.
    pub fn load_csv(path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| match e.into_kind() {
                csv::ErrorKind::Io(source) => Error::Io {
                    path: path.to_path_buf(),
                    source,
                },
                other => Error::InvalidInput(format!("{}: {other:?}", path.display())),
            })?;
        let headers: Vec<String> = reader
            .headers()
            .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?
            .iter()
            .map(|h| h.to_string())
            .collect();
        let support_col = headers
            .iter()
            .position(|h| h == "support_size")
            .ok_or_else(|| {
                Error::InvalidInput(format!("{}: missing support_size column", path.display()))
            })?;
        let d = support_col;
        if d == 0 {
            return Err(Error::InvalidInput(format!(
                "{}: no value columns before support_size",
                path.display()
            )));
        }
        let mut rados = Vec::new();
        for (rec_idx, record) in reader.records().enumerate() {
            let row = rec_idx + 2;
            let record = record.map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                row,
                column: "-".into(),
                message: e.to_string(),
            })?;
            let mut values = Vec::with_capacity(d);
            for k in 0..d {
                let cell = record.get(k).unwrap_or("");
                let v: f64 = cell.parse().map_err(|_| Error::Parse {
                    path: path.to_path_buf(),
                    row,
                    column: headers[k].clone(),
                    message: format!("\"{cell}\" is not numeric"),
                })?;
                values.push(v);
            }
            let support: usize = record
                .get(support_col)
                .unwrap_or("")
                .parse()
                .map_err(|_| Error::Parse {
                    path: path.to_path_buf(),
                    row,
                    column: "support_size".into(),
                    message: "not an integer".into(),
                })?;
            rados.push(Rado::new(values, support)?);
        }
        if rados.is_empty() {
            return Err(Error::EmptyData {
                path: path.to_path_buf(),
            });
        }
        RadoSet::new(rados, Provenance::Exhaustive)
    }
}

/// `π_σ = Σ_{i: σ_i = y_i} y_i·x_i`, with the agreement count as support.
pub fn compute_rado(dataset: &Dataset, signature: &Signature) -> Result<Rado> {
    if signature.len() != dataset.m() {
        return Err(Error::InvalidInput(format!(
            "signature length {} vs m = {}",
            signature.len(),
            dataset.m()
        )));
    }
    let d = dataset.d();
    let mut values = vec![0.0f64; d];
    let mut support = 0usize;
    for (e, &s) in dataset.examples().iter().zip(signature.entries()) {
        if s == e.label() {
            support += 1;
            let y = e.label() as f64;
            for (k, x) in e.features().iter().enumerate() {
                values[k] += y * x;
            }
        }
    }
    Rado::new(values, support)
}

/// `μ = (1/m)·Σ_i y_i·x_i`, the mean operator of the sample.
pub fn mean_operator(dataset: &Dataset) -> Vec<f64> {
    let m = dataset.m() as f64;
    let mut mu = vec![0.0f64; dataset.d()];
    for e in dataset.examples() {
        let y = e.label() as f64;
        for (k, x) in e.features().iter().enumerate() {
            mu[k] += y * x;
        }
    }
    for v in &mut mu {
        *v /= m;
    }
    mu
}

/// `n` i.i.d. fair-coin signatures of length `m` from a ChaCha stream.
pub fn sample_uniform_signatures(m: usize, n: usize, seed: u64) -> Result<Vec<Signature>> {
    if m == 0 {
        return Err(Error::InvalidInput("signature length m = 0".into()));
    }
    if n == 0 {
        return Err(Error::InvalidInput("requested n = 0 signatures".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n)
        .map(|_| {
            Signature(
                (0..m)
                    .map(|_| if rng.random::<bool>() { 1i8 } else { -1i8 })
                    .collect(),
            )
        })
        .collect())
}

/// `n` signatures agreeing with `labels` on a uniformly random subset of
/// exactly `m_star` examples (seeded partial Fisher–Yates per draw).
pub fn sample_fixed_support_signatures(
    labels: &[i8],
    m_star: usize,
    n: usize,
    seed: u64,
) -> Result<Vec<Signature>> {
    let m = labels.len();
    if m == 0 {
        return Err(Error::InvalidInput("no labels".into()));
    }
    if m_star > m {
        return Err(Error::InvalidInput(format!(
            "support size {m_star} exceeds m = {m}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidInput("requested n = 0 signatures".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut indices: Vec<usize> = (0..m).collect();
    Ok((0..n)
        .map(|_| {
            let (chosen, _) = indices.partial_shuffle(&mut rng, m_star);
            let mut entries: Vec<i8> = labels.iter().map(|y| -y).collect();
            for &i in chosen.iter() {
                entries[i] = labels[i];
            }
            Signature(entries)
        })
        .collect())
}

/// All 2^m signatures in lexicographic order (−1 < +1). Refused above
/// `2^limit`; pass [`crate::tolerances::ENUMERATION_LIMIT_LOG2`] unless
/// you have a reason.
pub fn enumerate_all_signatures(m: usize, limit: usize) -> Result<Vec<Signature>> {
    if m == 0 {
        return Err(Error::InvalidInput("signature length m = 0".into()));
    }
    if m > limit || m > 63 {
        return Err(Error::EnumerationLimit { m, limit });
    }
    (0..(1u64 << m)).map(|c| Signature::from_index(c, m)).collect()
}

/// The exhaustive rado set of a dataset, in lexicographic signature order.
pub fn enumerate_all_rados(dataset: &Dataset, limit: usize) -> Result<RadoSet> {
    let signatures = enumerate_all_signatures(dataset.m(), limit)?;
    RadoSet::from_signatures(dataset, &signatures, Provenance::Exhaustive)
}
