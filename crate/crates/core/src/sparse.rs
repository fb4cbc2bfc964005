//! Compressed sparse row matrices.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Structure hint recorded by whoever built the matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Structure {
    #[default]
    General,
    Symmetric,
    Antisymmetric,
}

/// Square CSR matrix. Column indices are strictly increasing within a row
/// and no explicit zeros are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
    structure: Structure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BandwidthStats {
    /// `max |i - j|` over stored entries.
    pub bandwidth: usize,
    pub nnz: usize,
    /// `sum_i (i - min column of row i)`, counting only rows whose first
    /// entry lies left of the diagonal.
    pub profile: usize,
}

impl CsrMatrix {
    pub fn zeros(dim: usize) -> Self {
        CsrMatrix {
            dim,
            row_ptr: vec![0; dim + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
            structure: Structure::General,
        }
    }

    pub fn identity(dim: usize) -> Self {
        CsrMatrix {
            dim,
            row_ptr: (0..=dim).collect(),
            col_idx: (0..dim).collect(),
            values: vec![1.0; dim],
            structure: Structure::Symmetric,
        }
    }

    /// Builds a matrix from `(row, col, value)` triplets. Duplicates are
    /// summed in input order, so the result does not depend on anything but
    /// the triplet sequence. Entries that sum to exactly zero are dropped.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, f64)>) -> Result<Self> {
        if let Some(&(r, c, _)) = triplets.iter().find(|t| t.0 >= dim || t.1 >= dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: r.max(c) + 1,
            });
        }
        // stable: equal keys keep insertion order
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0; dim + 1];
        let mut col_idx = Vec::with_capacity(triplets.len() / 4);
        let mut values = Vec::with_capacity(triplets.len() / 4);
        let mut k = 0;
        while k < triplets.len() {
            let (r, c, mut v) = triplets[k];
            k += 1;
            while k < triplets.len() && triplets[k].0 == r && triplets[k].1 == c {
                v += triplets[k].2;
                k += 1;
            }
            if v != 0.0 {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
            }
        }
        for r in 0..dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        Ok(CsrMatrix {
            dim,
            row_ptr,
            col_idx,
            values,
            structure: Structure::General,
        })
    }

    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let mut triplets = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            triplets.extend(row.iter().enumerate().map(|(j, &v)| (i, j, v)));
        }
        Self::from_triplets(dim, triplets)
    }

    pub fn with_structure(mut self, structure: Structure) -> Self {
        self.structure = structure;
        self
    }

    pub fn structure(&self) -> Structure {
        self.structure
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        (&self.col_idx[a..b], &self.values[a..b])
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    /// Iterates `(row, col, value)` in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals.iter()).map(move |(&j, &v)| (i, j, v))
        })
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        let mut y = vec![0.0; self.dim];
        self.mul_vec_into(x, &mut y);
        Ok(y)
    }

    /// `y = A x`; lengths must match the dimension.
    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(y.len(), self.dim);
        for (i, yi) in y.iter_mut().enumerate() {
            let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
            let mut s = 0.0;
            for k in a..b {
                s += self.values[k] * x[self.col_idx[k]];
            }
            *yi = s;
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn scaled(&self, s: f64) -> CsrMatrix {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out
    }

    /// `self + other` with the union pattern (exact zeros dropped).
    pub fn add(&self, other: &CsrMatrix) -> Result<CsrMatrix> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let mut row_ptr = vec![0; self.dim + 1];
        let mut col_idx = Vec::with_capacity(self.nnz().max(other.nnz()));
        let mut values = Vec::with_capacity(self.nnz().max(other.nnz()));
        for i in 0..self.dim {
            let (ca, va) = self.row(i);
            let (cb, vb) = other.row(i);
            let (mut p, mut q) = (0, 0);
            while p < ca.len() || q < cb.len() {
                let (c, v) = if q == cb.len() || (p < ca.len() && ca[p] < cb[q]) {
                    p += 1;
                    (ca[p - 1], va[p - 1])
                } else if p == ca.len() || cb[q] < ca[p] {
                    q += 1;
                    (cb[q - 1], vb[q - 1])
                } else {
                    p += 1;
                    q += 1;
                    (ca[p - 1], va[p - 1] + vb[q - 1])
                };
                if v != 0.0 {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptr[i + 1] = col_idx.len();
        }
        Ok(CsrMatrix {
            dim: self.dim,
            row_ptr,
            col_idx,
            values,
            structure: Structure::General,
        })
    }

    pub fn transpose(&self) -> CsrMatrix {
        let triplets = self.entries().map(|(i, j, v)| (j, i, v)).collect();
        CsrMatrix::from_triplets(self.dim, triplets)
            .expect("transpose keeps indices in range")
            .with_structure(self.structure)
    }

    /// `P A P^T`: entry `(i, j)` moves to `(perm[i], perm[j])`.
    pub fn permuted(&self, perm: &[usize]) -> Result<CsrMatrix> {
        if perm.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: perm.len(),
            });
        }
        let triplets = self.entries().map(|(i, j, v)| (perm[i], perm[j], v)).collect();
        Ok(CsrMatrix::from_triplets(self.dim, triplets)?.with_structure(self.structure))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max |A_ij - sign * A_ji|` over the union pattern.
    fn max_mismatch(&self, sign: f64) -> f64 {
        self.entries()
            .map(|(i, j, v)| (v - sign * self.get(j, i)).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_asymmetry(&self) -> f64 {
        self.max_mismatch(1.0)
    }

    pub fn max_antisymmetry_defect(&self) -> f64 {
        self.max_mismatch(-1.0)
    }

    /// Dense boolean occupancy, row-major.
    pub fn pattern(&self) -> Vec<Vec<bool>> {
        let mut out = vec![vec![false; self.dim]; self.dim];
        for (i, j, _) in self.entries() {
            out[i][j] = true;
        }
        out
    }
}

pub fn bandwidth_stats(a: &CsrMatrix) -> BandwidthStats {
    let mut bandwidth = 0;
    let mut profile = 0;
    for i in 0..a.dim() {
        let (cols, _) = a.row(i);
        for &j in cols {
            bandwidth = bandwidth.max(i.abs_diff(j));
        }
        if let Some(&first) = cols.first() {
            profile += i.saturating_sub(first);
        }
    }
    BandwidthStats {
        bandwidth,
        nnz: a.nnz(),
        profile,
    }
}
