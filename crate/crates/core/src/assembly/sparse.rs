use std::io::{self, Write};

use crate::linalg::DenseMatrix;

/// Symmetric matrix stored as the lower triangle in compressed rows
/// (columns ascending within a row, diagonal last).
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricSparseMatrix {
    order: usize,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SymmetricSparseMatrix {
    /// Builds from `(row, col, value)` triplets; entries above the diagonal
    /// are mirrored into the lower triangle and duplicates are summed in
    /// input order.
    pub fn from_triplets(order: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut entries: Vec<(usize, usize, usize)> = triplets
            .iter()
            .enumerate()
            .map(|(k, &(i, j, _))| {
                assert!(i < order && j < order, "triplet index out of range");
                if i >= j {
                    (i, j, k)
                } else {
                    (j, i, k)
                }
            })
            .collect();
        entries.sort_unstable();
        let mut row_start = vec![0; order + 1];
        let mut cols = Vec::new();
        let mut vals: Vec<f64> = Vec::new();
        let mut last: Option<(usize, usize)> = None;
        for (i, j, k) in entries {
            if last == Some((i, j)) {
                *vals.last_mut().unwrap() += triplets[k].2;
            } else {
                cols.push(j);
                vals.push(triplets[k].2);
                row_start[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..order {
            row_start[i + 1] += row_start[i];
        }
        Self {
            order,
            row_start,
            cols,
            vals,
        }
    }

    pub fn from_dense(a: &DenseMatrix) -> Self {
        let n = a.rows();
        let mut t = Vec::new();
        for i in 0..n {
            for j in 0..=i {
                if a[(i, j)] != 0.0 {
                    t.push((i, j, a[(i, j)]));
                }
            }
        }
        Self::from_triplets(n, &t)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Stored (lower-triangle) entries.
    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// `(col, value)` pairs of the stored lower part of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_start[i]..self.row_start[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        let range = self.row_start[r]..self.row_start[r + 1];
        match self.cols[range.clone()].binary_search(&c) {
            Ok(k) => self.vals[range.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.order).map(|i| self.get(i, i)).collect()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.order];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.order);
        y.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..self.order {
            let mut acc = 0.0;
            for k in self.row_start[i]..self.row_start[i + 1] {
                let j = self.cols[k];
                let v = self.vals[k];
                acc += v * x[j];
                if j != i {
                    y[j] += v * x[i];
                }
            }
            y[i] += acc;
        }
    }

    /// `x^T S y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        crate::linalg::dot(x, &self.matvec(y))
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.order, self.order);
        for i in 0..self.order {
            for (j, v) in self.row(i) {
                d[(i, j)] = v;
                d[(j, i)] = v;
            }
        }
        d
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, other: &Self, s: f64) -> Self {
        assert_eq!(self.order, other.order);
        let mut t = Vec::with_capacity(self.nnz() + other.nnz());
        for i in 0..self.order {
            t.extend(self.row(i).map(|(j, v)| (i, j, v)));
            t.extend(other.row(i).map(|(j, v)| (i, j, s * v)));
        }
        Self::from_triplets(self.order, &t)
    }

    /// `P S P^T` where `perm[new] = old`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut inv = vec![0; perm.len()];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut t = Vec::with_capacity(self.nnz());
        for i in 0..self.order {
            t.extend(self.row(i).map(|(j, v)| (inv[i], inv[j], v)));
        }
        Self::from_triplets(self.order, &t)
    }

    /// Lower-triangle column indices per row, for graph algorithms.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.order];
        for i in 0..self.order {
            for (j, _) in self.row(i) {
                if j != i {
                    adj[i].push(j);
                    adj[j].push(i);
                }
            }
        }
        adj
    }

    /// Writes the lower triangle in Matrix Market coordinate format (1-based).
    pub fn write_coordinate<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "%%MatrixMarket matrix coordinate real symmetric")?;
        writeln!(w, "{} {} {}", self.order, self.order, self.nnz())?;
        for i in 0..self.order {
            for (j, v) in self.row(i) {
                writeln!(w, "{} {} {:.17e}", i + 1, j + 1, v)?;
            }
        }
        Ok(())
    }
}
