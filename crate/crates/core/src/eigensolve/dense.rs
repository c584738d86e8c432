//! Dense symmetric eigensolvers: Householder tridiagonalization, Sturm
//! bisection for the wanted eigenvalues and inverse iteration for vectors.

use crate::assembly::SymmetricSparseMatrix;
use crate::linalg::{axpy, dot, norm2, DenseMatrix};

use super::envelope::{EnvelopeCholesky, Ordering};
use super::EigenError;

/// Householder reduction of a symmetric matrix to tridiagonal form `T = Q^T C Q`.
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
    reflectors: Vec<(Vec<f64>, f64)>,
}

impl Tridiagonal {
    /// Reads only the lower triangle of `c`.
    pub fn new(mut c: DenseMatrix) -> Self {
        let n = c.rows();
        let mut diag = vec![0.0; n];
        let mut off = vec![0.0; n.saturating_sub(1)];
        let mut reflectors = Vec::with_capacity(n.saturating_sub(2));
        for k in 0..n.saturating_sub(2) {
            let x: Vec<f64> = (k + 1..n).map(|r| c[(r, k)]).collect();
            diag[k] = c[(k, k)];
            let tail = norm2(&x[1..]);
            if tail == 0.0 {
                off[k] = x[0];
                reflectors.push((Vec::new(), 0.0));
                continue;
            }
            let norm = x[0].hypot(tail);
            let alpha = if x[0] > 0.0 { -norm } else { norm };
            let mut v = x;
            v[0] -= alpha;
            let beta = 2.0 / dot(&v, &v);
            off[k] = alpha;
            // S <- H S H on the trailing block, lower triangle only
            let m = n - k - 1;
            let mut p = vec![0.0; m];
            for r in 0..m {
                let row = &c.row(k + 1 + r)[k + 1..k + 2 + r];
                p[r] += dot(&row[..r], &v[..r]) + row[r] * v[r];
                axpy(v[r], &row[..r], &mut p[..r]);
            }
            p.iter_mut().for_each(|x| *x *= beta);
            let kappa = 0.5 * beta * dot(&v, &p);
            let w: Vec<f64> = p.iter().zip(&v).map(|(pi, vi)| pi - kappa * vi).collect();
            for r in 0..m {
                let (vr, wr) = (v[r], w[r]);
                let row = &mut c.row_mut(k + 1 + r)[k + 1..k + 2 + r];
                for ((s, vc), wc) in row.iter_mut().zip(&v[..=r]).zip(&w[..=r]) {
                    *s -= vr * wc + wr * vc;
                }
            }
            reflectors.push((v, beta));
        }
        if n >= 2 {
            diag[n - 2] = c[(n - 2, n - 2)];
            off[n - 2] = c[(n - 1, n - 2)];
        }
        if n >= 1 {
            diag[n - 1] = c[(n - 1, n - 1)];
        }
        Self {
            diag,
            off,
            reflectors,
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Maps an eigenvector of `T` to one of the original matrix.
    pub fn back_transform(&self, y: &mut [f64]) {
        for (k, (v, beta)) in self.reflectors.iter().enumerate().rev() {
            if v.is_empty() {
                continue;
            }
            let seg = &mut y[k + 1..];
            let s = beta * dot(v, seg);
            axpy(-s, v, seg);
        }
    }

    /// Number of eigenvalues strictly below `x` (Sturm count).
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.diag.len() {
            let e2 = if i == 0 { 0.0 } else { self.off[i - 1] * self.off[i - 1] };
            q = self.diag[i] - x - if i == 0 { 0.0 } else { e2 / q };
            if q == 0.0 {
                q = -f64::EPSILON * (self.diag[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// The `k` smallest eigenvalues in ascending order, by bisection.
    pub fn smallest_eigenvalues(&self, k: usize) -> Vec<f64> {
        let (lo0, hi0) = self.gershgorin();
        (0..k.min(self.len()))
            .map(|j| {
                let (mut lo, mut hi) = (lo0, hi0);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if self.count_below(mid) > j {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                0.5 * (lo + hi)
            })
            .collect()
    }

    /// Solves `(T - mu I) y = b` by Gaussian elimination with partial pivoting.
    fn shifted_solve(&self, mu: f64, b: &[f64], pivot_floor: f64) -> Vec<f64> {
        let n = self.len();
        // rows as (a, b, c) on columns (i, i+1, i+2) after elimination
        let mut d: Vec<f64> = self.diag.iter().map(|v| v - mu).collect();
        let mut up: Vec<f64> = self.off.clone();
        let mut up2 = vec![0.0; n];
        let mut lo: Vec<f64> = self.off.clone();
        let mut rhs = b.to_vec();
        for i in 0..n.saturating_sub(1) {
            if lo[i].abs() > d[i].abs() {
                // swap rows i and i+1
                std::mem::swap(&mut d[i], &mut lo[i]);
                std::mem::swap(&mut up[i], &mut d[i + 1]);
                if i + 1 < n - 1 {
                    up2[i] = up[i + 1];
                    up[i + 1] = 0.0;
                }
                rhs.swap(i, i + 1);
            }
            if d[i] == 0.0 {
                d[i] = pivot_floor;
            }
            let f = lo[i] / d[i];
            d[i + 1] -= f * up[i];
            if i + 1 < n - 1 {
                up[i + 1] -= f * up2[i];
            }
            rhs[i + 1] -= f * rhs[i];
        }
        if n > 0 && d[n - 1] == 0.0 {
            d[n - 1] = pivot_floor;
        }
        let mut y = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = rhs[i];
            if i + 1 < n {
                s -= up[i] * y[i + 1];
            }
            if i + 2 < n {
                s -= up2[i] * y[i + 2];
            }
            y[i] = s / d[i];
        }
        y
    }

    /// Eigenvectors of `T` for the given (ascending) eigenvalues by inverse
    /// iteration, orthogonalized against each other.
    pub fn eigenvectors(&self, values: &[f64]) -> Vec<Vec<f64>> {
        let n = self.len();
        let (lo, hi) = self.gershgorin();
        let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
        let floor = f64::EPSILON * scale;
        let mut out: Vec<Vec<f64>> = Vec::with_capacity(values.len());
        for (j, &lam) in values.iter().enumerate() {
            // deterministic start with components of all sizes
            let mut y: Vec<f64> = (0..n)
                .map(|i| 1.0 + ((i * 7919 + j * 104729) % 1009) as f64 / 1009.0)
                .collect();
            let mu = lam + 4.0 * floor * (1 + j) as f64;
            for _ in 0..4 {
                for prev in &out {
                    let c = dot(prev, &y);
                    axpy(-c, prev, &mut y);
                }
                let nrm = norm2(&y);
                y.iter_mut().for_each(|v| *v /= nrm);
                y = self.shifted_solve(mu, &y, floor);
            }
            for _ in 0..2 {
                for prev in &out {
                    let c = dot(prev, &y);
                    axpy(-c, prev, &mut y);
                }
            }
            let nrm = norm2(&y);
            y.iter_mut().for_each(|v| *v /= nrm);
            out.push(y);
        }
        out
    }
}

/// The `k` smallest eigenpairs of a dense symmetric matrix, with
/// orthonormal eigenvectors.
pub fn symmetric_smallest_k(c: DenseMatrix, k: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let t = Tridiagonal::new(c);
    let vals = t.smallest_eigenvalues(k);
    let mut vecs = t.eigenvectors(&vals);
    for v in &mut vecs {
        t.back_transform(v);
    }
    (vals, vecs)
}

/// The `k` smallest eigenpairs of the pencil `(A, M)` with `M` SPD, via
/// `C = L^{-1} A L^{-T}` where `M = L L^T` is factored in reverse
/// Cuthill-McKee order. Eigenvectors are returned `M`-orthonormal.
pub fn generalized_smallest_k(
    a: &SymmetricSparseMatrix,
    m: &SymmetricSparseMatrix,
    k: usize,
) -> Result<(Vec<f64>, Vec<Vec<f64>>), EigenError> {
    let n = a.order();
    if m.order() != n {
        return Err(EigenError::DimensionMismatch);
    }
    let l = EnvelopeCholesky::factor(m, Ordering::Rcm)?;
    let perm = l.permutation();
    let mut b = a.permuted(perm).to_dense();
    l.forward_rows(&mut b);
    let mut c = b.transpose();
    l.forward_rows(&mut c);
    for i in 0..n {
        for j in 0..i {
            c[(i, j)] = 0.5 * (c[(i, j)] + c[(j, i)]);
        }
    }
    let (vals, ys) = symmetric_smallest_k(c, k);
    let vecs = ys
        .iter()
        .map(|y| {
            let xp = l.backward(y);
            let mut x = vec![0.0; n];
            for (new, &old) in perm.iter().enumerate() {
                x[old] = xp[new];
            }
            x
        })
        .collect();
    Ok((vals, vecs))
}
