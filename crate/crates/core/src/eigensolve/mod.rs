//! Smallest eigenpairs of the pencil `A x = λ M x`.

pub mod dense;
pub mod envelope;
pub mod lanczos;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assembly::{BoundaryCondition, SymmetricSparseMatrix};
use crate::linalg::{dot, norm2, DenseMatrix};

pub use envelope::{rcm_ordering, EnvelopeCholesky, Ordering};
pub use lanczos::{block_lanczos, LanczosOptions};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EigenError {
    #[error("matrix is not positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },
    #[error("matrix dimensions do not match")]
    DimensionMismatch,
    #[error("requested {k} eigenpairs of a problem of order {n}")]
    TooManyRequested { k: usize, n: usize },
    #[error("no new search direction after {size} basis vectors")]
    BasisExhausted { size: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    /// Cholesky reduction of `M` and a full dense reduction.
    Dense,
    /// Shift-invert block Lanczos on a sparse envelope factorization.
    ShiftInvert,
    /// Dense up to [`SolverOptions::dense_limit`] free DOFs, shift-invert above.
    #[default]
    Auto,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Dense => "dense",
            Self::ShiftInvert => "shift-invert",
            Self::Auto => "auto",
        }
    }
}

impl std::fmt::Display for SolverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SolverKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dense" => Ok(Self::Dense),
            "shift-invert" | "lanczos" => Ok(Self::ShiftInvert),
            "auto" => Ok(Self::Auto),
            other => Err(format!("unknown solver `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub kind: SolverKind,
    pub dense_limit: usize,
    pub lanczos: LanczosOptions,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            kind: SolverKind::Auto,
            dense_limit: 5000,
            lanczos: LanczosOptions::default(),
        }
    }
}

impl SolverOptions {
    /// Shift 0 for clamped plates and -1 for simply supported ones; both
    /// pencils are positive definite, the negative shift only adds margin.
    pub fn for_bc(bc: BoundaryCondition) -> Self {
        let mut o = Self::default();
        o.lanczos.shift = match bc {
            BoundaryCondition::Clamped => 0.0,
            BoundaryCondition::SimplySupported => -1.0,
        };
        o
    }

    pub fn with_kind(mut self, kind: SolverKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn resolved_kind(&self, order: usize) -> SolverKind {
        match self.kind {
            SolverKind::Auto if order <= self.dense_limit => SolverKind::Dense,
            SolverKind::Auto => SolverKind::ShiftInvert,
            k => k,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverMetadata {
    pub method: SolverKind,
    pub order: usize,
    pub shift: Option<f64>,
    pub ordering: Option<Ordering>,
    pub iterations: usize,
    pub basis_size: usize,
    pub factor_entries: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenResult {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// `M`-normalized, largest-magnitude component positive.
    #[serde(skip)]
    pub eigenvectors: Vec<Vec<f64>>,
    /// `‖A x - λ M x‖ / ‖A x‖` per pair.
    pub residuals: Vec<f64>,
    pub metadata: SolverMetadata,
}

impl EigenResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("eigen result serializes")
    }
}

/// Pairs whose relative residual exceeds this are reported unconverged.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// Relative residuals `‖A x - λ M x‖ / ‖A x‖` of the given pairs.
pub fn residual_report(
    a: &SymmetricSparseMatrix,
    m: &SymmetricSparseMatrix,
    eigenvalues: &[f64],
    eigenvectors: &[Vec<f64>],
) -> Vec<f64> {
    eigenvalues
        .iter()
        .zip(eigenvectors)
        .map(|(&lam, x)| {
            let ax = a.matvec(x);
            let mx = m.matvec(x);
            let r: Vec<f64> = ax.iter().zip(&mx).map(|(p, q)| p - lam * q).collect();
            norm2(&r) / norm2(&ax)
        })
        .collect()
}

/// Rayleigh-quotient refinement, `M`-normalization and a sign convention.
fn polish(
    a: &SymmetricSparseMatrix,
    m: &SymmetricSparseMatrix,
    pairs: Vec<(f64, Vec<f64>)>,
) -> (Vec<f64>, Vec<Vec<f64>>) {
    let mut out: Vec<(f64, Vec<f64>)> = pairs
        .into_iter()
        .map(|(_, mut x)| {
            let mx = m.matvec(&x);
            let xm = dot(&x, &mx);
            let lam = a.bilinear(&x, &x) / xm;
            let big = x.iter().copied().fold(0.0f64, |b, v| if v.abs() > b.abs() { v } else { b });
            let s = big.signum() / xm.sqrt();
            x.iter_mut().for_each(|v| *v *= s);
            (lam, x)
        })
        .collect();
    out.sort_by(|p, q| p.0.total_cmp(&q.0));
    out.into_iter().unzip()
}

fn check(a: &SymmetricSparseMatrix, m: &SymmetricSparseMatrix, k: usize) -> Result<(), EigenError> {
    let n = a.order();
    if m.order() != n {
        return Err(EigenError::DimensionMismatch);
    }
    if k == 0 || k > n {
        return Err(EigenError::TooManyRequested { k, n });
    }
    Ok(())
}

/// The `k` smallest eigenpairs by dense reduction. Intended as the reference
/// path and for small problems.
pub fn smallest_k_dense(
    a: &SymmetricSparseMatrix,
    m: &SymmetricSparseMatrix,
    k: usize,
) -> Result<EigenResult, EigenError> {
    check(a, m, k)?;
    let (vals, vecs) = dense::generalized_smallest_k(a, m, k)?;
    let (eigenvalues, eigenvectors) = polish(a, m, vals.into_iter().zip(vecs).collect());
    let residuals = residual_report(a, m, &eigenvalues, &eigenvectors);
    let small = residuals.iter().all(|&r| r <= RESIDUAL_TOL);
    Ok(EigenResult {
        eigenvalues,
        eigenvectors,
        residuals,
        metadata: SolverMetadata {
            method: SolverKind::Dense,
            order: a.order(),
            shift: None,
            ordering: None,
            iterations: 1,
            basis_size: a.order(),
            factor_entries: a.order() * (a.order() + 1) / 2,
            converged: small,
        },
    })
}

/// Dense generalized eigenproblem for small dense inputs.
pub fn smallest_k_dense_matrices(
    a: &DenseMatrix,
    m: &DenseMatrix,
    k: usize,
) -> Result<EigenResult, EigenError> {
    smallest_k_dense(
        &SymmetricSparseMatrix::from_dense(a),
        &SymmetricSparseMatrix::from_dense(m),
        k,
    )
}

/// The `k` smallest eigenpairs by shift-invert block Lanczos. When the
/// basis limit is hit first, the best available pairs are returned with
/// `metadata.converged == false`.
pub fn smallest_k_shift_invert(
    a: &SymmetricSparseMatrix,
    m: &SymmetricSparseMatrix,
    k: usize,
    opts: &LanczosOptions,
) -> Result<EigenResult, EigenError> {
    check(a, m, k)?;
    let out = block_lanczos(a, m, k, opts)?;
    let (eigenvalues, eigenvectors) =
        polish(a, m, out.eigenvalues.into_iter().zip(out.eigenvectors).collect());
    let residuals = residual_report(a, m, &eigenvalues, &eigenvectors);
    let small = residuals.iter().all(|&r| r <= RESIDUAL_TOL);
    Ok(EigenResult {
        eigenvalues,
        eigenvectors,
        residuals,
        metadata: SolverMetadata {
            method: SolverKind::ShiftInvert,
            order: a.order(),
            shift: Some(opts.shift),
            ordering: Some(opts.ordering),
            iterations: out.iterations,
            basis_size: out.basis_size,
            factor_entries: out.factor_entries,
            converged: out.converged && small,
        },
    })
}

/// Dispatches on [`SolverOptions::kind`].
pub fn solve(
    a: &SymmetricSparseMatrix,
    m: &SymmetricSparseMatrix,
    k: usize,
    opts: &SolverOptions,
) -> Result<EigenResult, EigenError> {
    match opts.resolved_kind(a.order()) {
        SolverKind::Dense => smallest_k_dense(a, m, k),
        _ => smallest_k_shift_invert(a, m, k, &opts.lanczos),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_example() {
        let a = DenseMatrix::from_diagonal(&[2.0, 5.0]);
        let m = DenseMatrix::identity(2);
        let r = smallest_k_dense_matrices(&a, &m, 2).unwrap();
        assert!((r.eigenvalues[0] - 2.0).abs() < 1e-14);
        assert!((r.eigenvalues[1] - 5.0).abs() < 1e-14);
        assert!(r.residuals.iter().all(|&x| x < 1e-15));
        let json = r.to_json();
        assert!(json.contains("\"method\": \"dense\""));
    }

    #[test]
    fn spec_pencils() {
        let a = DenseMatrix::from_diagonal(&[2.0, 2.0]);
        let m = DenseMatrix::from_diagonal(&[2.0, 1.0]);
        let r = smallest_k_dense_matrices(&a, &m, 2).unwrap();
        assert!((r.eigenvalues[0] - 1.0).abs() < 1e-14 && (r.eigenvalues[1] - 2.0).abs() < 1e-14);
        let a = DenseMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        let r = smallest_k_dense_matrices(&a, &DenseMatrix::identity(2), 2).unwrap();
        assert!((r.eigenvalues[0] - 1.0).abs() < 1e-14 && (r.eigenvalues[1] - 3.0).abs() < 1e-14);
        let x = &r.eigenvectors;
        assert!(dot(&x[0], &x[1]).abs() < 1e-14);
    }

    #[test]
    fn residuals_detect_perturbation() {
        let a = SymmetricSparseMatrix::from_dense(&DenseMatrix::from_rows(&[
            vec![2.0, 1.0, 0.0],
            vec![1.0, 3.0, 1.0],
            vec![0.0, 1.0, 4.0],
        ]));
        let m = SymmetricSparseMatrix::from_dense(&DenseMatrix::identity(3));
        let r = smallest_k_dense(&a, &m, 1).unwrap();
        assert!(residual_report(&a, &m, &r.eigenvalues, &r.eigenvectors)[0] < 1e-14);
        let noisy: Vec<f64> = r.eigenvectors[0].iter().enumerate().map(|(i, v)| v + 1e-3 * (i as f64 - 1.0)).collect();
        assert!(residual_report(&a, &m, &r.eigenvalues, &[noisy])[0] > 1e-6);
        assert!(residual_report(&a, &m, &[], &[]).is_empty());
    }

    #[test]
    fn request_validation() {
        let a = SymmetricSparseMatrix::from_dense(&DenseMatrix::identity(3));
        assert!(matches!(
            smallest_k_dense(&a, &a, 4),
            Err(EigenError::TooManyRequested { k: 4, n: 3 })
        ));
        assert!(matches!(smallest_k_dense(&a, &a, 0), Err(EigenError::TooManyRequested { .. })));
    }

    #[test]
    fn auto_resolution() {
        let o = SolverOptions::default();
        assert_eq!(o.resolved_kind(10), SolverKind::Dense);
        assert_eq!(o.resolved_kind(100_000), SolverKind::ShiftInvert);
        assert_eq!(o.with_kind(SolverKind::Dense).resolved_kind(100_000), SolverKind::Dense);
    }
}
