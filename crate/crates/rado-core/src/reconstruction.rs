//! What rados reveal about the examples behind them.
//!
//! A rado is a selection-weighted sum of edge vectors `e_i = y_i·x_i`:
//! stacking edges into a d×m matrix E and the 0/1 selections into an m×n
//! matrix S gives `Π = E·S` for the d×n matrix of released rados. Whoever
//! knows the signatures can form S; if it has full row rank the edges
//! follow exactly as `E = Π·Sᵀ·(S·Sᵀ)⁻¹`, and this module implements that
//! attack. It also implements the defense-side construction: splitting one
//! example into two children whose edges sum to the original leaves every
//! rado untouched while moving the example set by a positive Hausdorff
//! distance, so rado-identical datasets need not be identical.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::dataset::{Dataset, Example};
use crate::error::{Error, Result};
use crate::rado::{RadoSet, Signature};
use crate::tolerances::RANK_TOL_FACTOR;

/// The m×2^m matrix whose column c is the m-bit binary expansion of c,
/// most significant bit in row 0. Column `signature_column_index(σ, y)`
/// is exactly σ's selection vector against labels y, so `Π = E·G_m·U`
/// for a one-hot U picking released signatures. Memory grows as m·2^m;
/// m is capped at 20.
pub fn build_gm(m: usize) -> Result<Vec<Vec<f64>>> {
    if m == 0 || m > 20 {
        return Err(Error::InvalidInput(format!(
            "binary design matrix needs 1 ≤ m ≤ 20, got {m}"
        )));
    }
    let cols = 1usize << m;
    Ok((0..m)
        .map(|i| {
            (0..cols)
                .map(|c| f64::from(c >> (m - 1 - i) & 1 == 1))
                .collect()
        })
        .collect())
}

/// Index of the G_m column equal to σ's selection vector:
/// `Σ_{i: σ_i = y_i} 2^(m−1−i)`.
pub fn signature_column_index(signature: &Signature, labels: &[i8]) -> Result<u64> {
    let m = signature.len();
    if labels.len() != m {
        return Err(Error::InvalidInput(format!(
            "{} labels for a length-{m} signature",
            labels.len()
        )));
    }
    if m > 63 {
        return Err(Error::InvalidInput(format!(
            "column index overflows u64 for m = {m} > 63"
        )));
    }
    Ok(signature
        .entries()
        .iter()
        .zip(labels)
        .enumerate()
        .filter(|(_, (s, y))| s == y)
        .map(|(i, _)| 1u64 << (m - 1 - i))
        .sum())
}

/// The m×n selection matrix S with `S[i][j] = 1` iff signature j agrees
/// with the label on example i.
pub fn signatures_to_selection(
    signatures: &[Signature],
    labels: &[i8],
) -> Result<Vec<Vec<f64>>> {
    if signatures.is_empty() {
        return Err(Error::InvalidInput("no signatures to select with".into()));
    }
    let m = labels.len();
    for (j, sig) in signatures.iter().enumerate() {
        if sig.len() != m {
            return Err(Error::InvalidInput(format!(
                "signature {j} has length {} but there are {m} labels",
                sig.len()
            )));
        }
    }
    Ok((0..m)
        .map(|i| {
            signatures
                .iter()
                .map(|sig| f64::from(sig.entries()[i] == labels[i]))
                .collect()
        })
        .collect())
}

/// Outcome of the linear-algebra attack.
#[derive(Debug, Clone, PartialEq)]
pub struct Recovery {
    /// Recovered edge vectors, one length-d row per example.
    pub edges: Vec<Vec<f64>>,
    /// ‖E·S − Π‖_F / ‖Π‖_F, the relative reconstruction residual.
    pub residual: f64,
    /// Numerical rank of S·Sᵀ at the time of the solve.
    pub rank: usize,
}

/// Solve `Π = E·S` for the edge matrix. Requires at least m rados whose
/// selection matrix has full row rank; otherwise the system is
/// [`Error::Underdetermined`] and the caller learns the achieved rank.
pub fn recover_edges(rado_set: &RadoSet, selection: &[Vec<f64>]) -> Result<Recovery> {
    let m = selection.len();
    let n = rado_set.n();
    let d = rado_set.d();
    if m == 0 {
        return Err(Error::InvalidInput("empty selection matrix".into()));
    }
    if selection.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidInput(format!(
            "selection rows must all have length n = {n}"
        )));
    }

    let s = DMatrix::from_fn(m, n, |i, j| selection[i][j]);
    let pi = DMatrix::from_fn(d, n, |k, j| rado_set.value(j, k));
    let gram = &s * s.transpose();
    let eig = SymmetricEigen::new(gram);
    let max_eig = eig
        .eigenvalues
        .iter()
        .fold(0.0f64, |acc, &l| acc.max(l.abs()));
    let tol = RANK_TOL_FACTOR * max_eig;
    let rank = eig.eigenvalues.iter().filter(|l| l.abs() > tol).count();
    if n < m || rank < m {
        return Err(Error::Underdetermined { rank, m });
    }

    let inv_diag = DVector::from_iterator(m, eig.eigenvalues.iter().map(|l| 1.0 / l));
    let gram_inv = &eig.eigenvectors * DMatrix::from_diagonal(&inv_diag) * eig.eigenvectors.transpose();
    let e_mat = &pi * s.transpose() * gram_inv;

    let pi_norm = pi.norm();
    let residual = (&e_mat * &s - &pi).norm() / if pi_norm > 0.0 { pi_norm } else { 1.0 };
    let edges = (0..m)
        .map(|i| (0..d).map(|k| e_mat[(k, i)]).collect())
        .collect();
    Ok(Recovery {
        edges,
        residual,
        rank,
    })
}

/// Two-sided Hausdorff distance between point sets under the Euclidean
/// metric: the farthest any point of one set sits from the other set.
pub fn hausdorff(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidInput(
            "Hausdorff distance needs nonempty sets".into(),
        ));
    }
    let d = a[0].len();
    if a.iter().chain(b).any(|p| p.len() != d) {
        return Err(Error::InvalidInput(
            "Hausdorff distance needs points of equal dimension".into(),
        ));
    }
    let directed = |from: &[Vec<f64>], to: &[Vec<f64>]| {
        from.iter()
            .map(|p| {
                to.iter()
                    .map(|q| {
                        p.iter()
                            .zip(q)
                            .map(|(u, v)| (u - v) * (u - v))
                            .sum::<f64>()
                            .sqrt()
                    })
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0f64, f64::max)
    };
    Ok(directed(a, b).max(directed(b, a)))
}

/// A dataset that is rado-equivalent to its parent but not example-equal:
/// one example is split into two children whose edges sum to the parent
/// edge. Both children carry the parent label y, with inputs `y·e*` and
/// `y·(e − e*)` so their edges are `e*` and `e − e*`.
#[derive(Debug, Clone)]
pub struct AmbiguityWitness {
    /// m+1 examples: the first child replaces the parent in place, the
    /// second is appended at the end.
    pub dataset: Dataset,
    pub split_index: usize,
    parent_label: i8,
}

impl AmbiguityWitness {
    /// Extend a parent signature to the child dataset: positions 0..m are
    /// kept (the first child inherits the parent's entry), and the
    /// appended entry selects the second child exactly when the parent
    /// was selected.
    pub fn lift_signature(&self, signature: &Signature) -> Result<Signature> {
        if signature.len() + 1 != self.dataset.m() {
            return Err(Error::InvalidInput(format!(
                "signature of length {} does not match parent size {}",
                signature.len(),
                self.dataset.m() - 1
            )));
        }
        let mut entries = signature.entries().to_vec();
        let selected = entries[self.split_index] == self.parent_label;
        entries.push(if selected {
            self.parent_label
        } else {
            -self.parent_label
        });
        Signature::new(entries)
    }
}

/// Split example `split_index` at fraction `t`: the first child takes edge
/// `t·e`, the second `(1−t)·e`. Any t in [0, 1] preserves every rado;
/// t = 1/2 keeps both children within ‖e‖/2 of the parent.
pub fn ambiguity_witness(dataset: &Dataset, split_index: usize, t: f64) -> Result<AmbiguityWitness> {
    if split_index >= dataset.m() {
        return Err(Error::InvalidInput(format!(
            "split index {split_index} out of range (m = {})",
            dataset.m()
        )));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidInput(format!(
            "split fraction {t} outside [0, 1]"
        )));
    }
    let parent = &dataset.examples()[split_index];
    let y = parent.label();
    let e = parent.edge_vector();
    let child = |edge_scale: f64| -> Result<Example> {
        let x: Vec<f64> = e.iter().map(|v| f64::from(y) * edge_scale * v).collect();
        Example::new(x, y)
    };
    let mut examples = dataset.examples().to_vec();
    examples[split_index] = child(t)?;
    examples.push(child(1.0 - t)?);
    let witness_ds = Dataset::with_feature_names(examples, dataset.feature_names().to_vec())?;
    Ok(AmbiguityWitness {
        dataset: witness_ds,
        split_index,
        parent_label: y,
    })
}
