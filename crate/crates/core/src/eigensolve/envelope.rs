//! Envelope (variable-band) Cholesky factorization with an optional
//! reverse Cuthill-McKee reordering.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::assembly::SymmetricSparseMatrix;
use crate::linalg::dot;

use super::EigenError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ordering {
    Natural,
    #[default]
    Rcm,
}

fn bfs_levels(adj: &[Vec<usize>], start: usize, mask: &[bool]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; adj.len()];
    seen[start] = true;
    let mut levels = vec![vec![start]];
    loop {
        let mut next = Vec::new();
        for &v in levels.last().unwrap() {
            for &w in &adj[v] {
                if mask[w] && !seen[w] {
                    seen[w] = true;
                    next.push(w);
                }
            }
        }
        if next.is_empty() {
            return levels;
        }
        levels.push(next);
    }
}

/// Pseudo-peripheral start node of the component containing `seed`.
fn peripheral_node(adj: &[Vec<usize>], seed: usize, mask: &[bool]) -> usize {
    let mut node = seed;
    let mut depth = bfs_levels(adj, node, mask).len();
    loop {
        let levels = bfs_levels(adj, node, mask);
        let candidate = *levels
            .last()
            .unwrap()
            .iter()
            .min_by_key(|&&v| (adj[v].len(), v))
            .unwrap();
        let d = bfs_levels(adj, candidate, mask).len();
        if d <= depth {
            return node;
        }
        depth = d;
        node = candidate;
    }
}

/// Reverse Cuthill-McKee ordering of the matrix graph; `perm[new] = old`.
pub fn rcm_ordering(s: &SymmetricSparseMatrix) -> Vec<usize> {
    let adj = s.adjacency();
    let n = adj.len();
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let unplaced: Vec<bool> = placed.iter().map(|p| !p).collect();
        let seed = (0..n)
            .filter(|&v| !placed[v])
            .min_by_key(|&v| (adj[v].len(), v))
            .unwrap();
        let start = peripheral_node(&adj, seed, &unplaced);
        let mut queue = VecDeque::from([start]);
        placed[start] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut nbrs: Vec<usize> = adj[v].iter().copied().filter(|&w| !placed[w]).collect();
            nbrs.sort_unstable_by_key(|&w| (adj[w].len(), w));
            nbrs.dedup();
            for w in nbrs {
                placed[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

/// `Σ_i (i - first_i)`: number of off-diagonal envelope entries under `perm`.
pub fn envelope_size(s: &SymmetricSparseMatrix, perm: &[usize]) -> usize {
    let p = s.permuted(perm);
    (0..p.order())
        .map(|i| i - p.row(i).next().map_or(i, |(j, _)| j))
        .sum()
}

/// Factors an SPD matrix in its natural numbering.
pub fn factor_spd(s: &SymmetricSparseMatrix) -> Result<EnvelopeCholesky, EigenError> {
    EnvelopeCholesky::factor(s, Ordering::Natural)
}

/// `P S P^T = L L^T` with `L` stored row by row over its envelope.
#[derive(Debug, Clone)]
pub struct EnvelopeCholesky {
    n: usize,
    perm: Vec<usize>,
    first: Vec<usize>,
    start: Vec<usize>,
    vals: Vec<f64>,
}

impl EnvelopeCholesky {
    pub fn factor(s: &SymmetricSparseMatrix, ordering: Ordering) -> Result<Self, EigenError> {
        let n = s.order();
        let perm = match ordering {
            Ordering::Natural => (0..n).collect(),
            Ordering::Rcm => rcm_ordering(s),
        };
        let p = s.permuted(&perm);
        let first: Vec<usize> = (0..n).map(|i| p.row(i).next().map_or(i, |(j, _)| j)).collect();
        let mut start = Vec::with_capacity(n + 1);
        start.push(0);
        for i in 0..n {
            start.push(start[i] + i - first[i] + 1);
        }
        let mut vals = vec![0.0; start[n]];
        for i in 0..n {
            for (j, v) in p.row(i) {
                vals[start[i] + j - first[i]] = v;
            }
        }
        for i in 0..n {
            let fi = first[i];
            for j in fi..i {
                let fj = first[j];
                let lo = fi.max(fj);
                let (ri, rj) = (start[i], start[j]);
                let s = dot(&vals[ri + lo - fi..ri + j - fi], &vals[rj + lo - fj..rj + j - fj]);
                let djj = vals[rj + j - fj];
                vals[ri + j - fi] = (vals[ri + j - fi] - s) / djj;
            }
            let ri = start[i];
            let row = &vals[ri..ri + i - fi];
            let d = vals[ri + i - fi] - dot(row, row);
            if d <= 0.0 || !d.is_finite() {
                return Err(EigenError::NotPositiveDefinite { pivot: perm[i] });
            }
            vals[ri + i - fi] = d.sqrt();
        }
        Ok(Self {
            n,
            perm,
            first,
            start,
            vals,
        })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// Stored entries of `L`, diagonal included.
    pub fn stored(&self) -> usize {
        self.vals.len()
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    /// Row `i` of `L` from column `first(i)` through the diagonal.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.vals[self.start[i]..self.start[i + 1]]
    }

    /// First stored column of row `i`.
    pub fn first(&self, i: usize) -> usize {
        self.first[i]
    }

    /// `L` as a dense matrix, in the permuted numbering.
    pub fn lower_dense(&self) -> crate::linalg::DenseMatrix {
        let mut l = crate::linalg::DenseMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for (k, v) in self.row(i).iter().enumerate() {
                l[(i, self.first[i] + k)] = *v;
            }
        }
        l
    }

    /// Overwrites each column `x` of `b` (permuted numbering) with `L^{-1} x`.
    pub fn forward_rows(&self, b: &mut crate::linalg::DenseMatrix) {
        let cols = b.cols();
        let mut acc = vec![0.0; cols];
        for i in 0..self.n {
            acc.copy_from_slice(b.row(i));
            let row = self.row(i);
            let fi = self.first[i];
            for (k, &l) in row[..i - fi].iter().enumerate() {
                if l != 0.0 {
                    crate::linalg::axpy(-l, b.row(fi + k), &mut acc);
                }
            }
            let d = row[i - fi];
            for (dst, v) in b.row_mut(i).iter_mut().zip(&acc) {
                *dst = v / d;
            }
        }
    }

    /// `L^{-T} y` in the permuted numbering.
    pub fn backward(&self, y: &[f64]) -> Vec<f64> {
        let mut x = y.to_vec();
        for i in (0..self.n).rev() {
            let row = self.row(i);
            let fi = self.first[i];
            x[i] /= row[i - fi];
            let xi = x[i];
            for (xk, l) in x[fi..i].iter_mut().zip(&row[..i - fi]) {
                *xk -= l * xi;
            }
        }
        x
    }

    /// Solves `S x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut y: Vec<f64> = self.perm.iter().map(|&o| b[o]).collect();
        for i in 0..n {
            let row = self.row(i);
            let fi = self.first[i];
            let s = dot(&row[..i - fi], &y[fi..i]);
            y[i] = (y[i] - s) / row[i - fi];
        }
        let y = self.backward(&y);
        let mut x = vec![0.0; n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }
}
