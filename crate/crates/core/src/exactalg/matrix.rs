//! Sparse matrices over a prime field.

use rand::Rng;

use super::{AlgError, Field};

/// A sparse vector: strictly increasing indices with nonzero values.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SparseVec {
    pub idx: Vec<u32>,
    pub val: Vec<u32>,
}

impl SparseVec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn nnz(&self) -> usize {
        self.idx.len()
    }

    pub fn is_zero(&self) -> bool {
        self.idx.is_empty()
    }

    /// Builds from a dense slice, dropping zeros.
    pub fn from_dense(d: &[u32]) -> Self {
        let mut s = SparseVec::new();
        for (i, &v) in d.iter().enumerate() {
            if v != 0 {
                s.idx.push(i as u32);
                s.val.push(v);
            }
        }
        s
    }

    /// Builds from unsorted `(index, value)` pairs, summing duplicates.
    pub fn from_pairs(field: &Field, mut pairs: Vec<(u32, u32)>) -> Self {
        pairs.sort_unstable_by_key(|&(i, _)| i);
        let mut s = SparseVec::new();
        for (i, v) in pairs {
            if let Some(&last) = s.idx.last() {
                if last == i {
                    let top = s.val.last_mut().expect("parallel arrays");
                    *top = field.add(*top, v);
                    continue;
                }
            }
            s.idx.push(i);
            s.val.push(v);
        }
        s.retain_nonzero();
        s
    }

    fn retain_nonzero(&mut self) {
        let mut w = 0;
        for r in 0..self.idx.len() {
            if self.val[r] != 0 {
                self.idx[w] = self.idx[r];
                self.val[w] = self.val[r];
                w += 1;
            }
        }
        self.idx.truncate(w);
        self.val.truncate(w);
    }

    pub fn get(&self, i: usize) -> u32 {
        match self.idx.binary_search(&(i as u32)) {
            Ok(pos) => self.val[pos],
            Err(_) => 0,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.idx.iter().zip(self.val.iter()).map(|(&i, &v)| (i as usize, v))
    }

    pub fn to_dense(&self, n: usize) -> Vec<u32> {
        let mut d = vec![0u32; n];
        for (i, v) in self.iter() {
            d[i] = v;
        }
        d
    }

    pub fn scale(&self, field: &Field, c: u32) -> SparseVec {
        if c == 0 {
            return SparseVec::new();
        }
        SparseVec {
            idx: self.idx.clone(),
            val: self.val.iter().map(|&v| field.mul(v, c)).collect(),
        }
    }

    /// `self + c * other`.
    pub fn axpy(&self, field: &Field, c: u32, other: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        let (mut a, mut b) = (0, 0);
        while a < self.idx.len() || b < other.idx.len() {
            let ia = self.idx.get(a).copied().unwrap_or(u32::MAX);
            let ib = other.idx.get(b).copied().unwrap_or(u32::MAX);
            let (i, v) = if ia < ib {
                a += 1;
                (ia, self.val[a - 1])
            } else if ib < ia {
                b += 1;
                (ib, field.mul(c, other.val[b - 1]))
            } else {
                a += 1;
                b += 1;
                (ia, field.add(self.val[a - 1], field.mul(c, other.val[b - 1])))
            };
            if v != 0 {
                out.idx.push(i);
                out.val.push(v);
            }
        }
        out
    }

    pub fn dot_dense(&self, field: &Field, d: &[u32]) -> u32 {
        let mut acc = 0u64;
        let mut cnt = 0;
        for (i, v) in self.iter() {
            acc += u64::from(v) * u64::from(d[i]);
            cnt += 1;
            if cnt == super::field::LAZY_BUDGET {
                acc = u64::from(field.reduce(acc));
                cnt = 0;
            }
        }
        field.reduce(acc)
    }
}

/// A sparse matrix stored by rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    n_rows: usize,
    n_cols: usize,
    rows: Vec<SparseVec>,
}

impl Matrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Matrix { n_rows, n_cols, rows: vec![SparseVec::new(); n_rows] }
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n).map(|i| SparseVec { idx: vec![i as u32], val: vec![1] }).collect();
        Matrix { n_rows: n, n_cols: n, rows }
    }

    /// Builds from sparse rows; panics if an index is out of range.
    pub fn from_rows(n_cols: usize, rows: Vec<SparseVec>) -> Self {
        for r in &rows {
            if let Some(&last) = r.idx.last() {
                assert!((last as usize) < n_cols, "column index out of range");
            }
        }
        Matrix { n_rows: rows.len(), n_cols, rows }
    }

    pub fn from_dense(n_cols: usize, rows: &[Vec<u32>]) -> Self {
        let rows = rows
            .iter()
            .map(|r| {
                assert_eq!(r.len(), n_cols, "ragged dense input");
                SparseVec::from_dense(r)
            })
            .collect();
        Matrix::from_rows(n_cols, rows)
    }

    /// Builds from signed integer rows, reduced into the field.
    pub fn from_i64_rows(field: &Field, rows: &[Vec<i64>]) -> Self {
        let n_cols = rows.first().map_or(0, |r| r.len());
        let dense: Vec<Vec<u32>> =
            rows.iter().map(|r| r.iter().map(|&v| field.from_i64(v)).collect()).collect();
        Matrix::from_dense(n_cols, &dense)
    }

    /// Builds from `(row, col, value)` triplets, summing duplicates.
    pub fn from_triplets(
        field: &Field,
        n_rows: usize,
        n_cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, u32)>,
    ) -> Self {
        let mut buckets: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n_rows];
        for (r, c, v) in triplets {
            assert!(r < n_rows && c < n_cols, "triplet out of range");
            buckets[r].push((c as u32, v));
        }
        let rows = buckets.into_iter().map(|b| SparseVec::from_pairs(field, b)).collect();
        Matrix { n_rows, n_cols, rows }
    }

    /// A random matrix with roughly `density` fraction of nonzero entries.
    pub fn random<R: Rng>(field: &Field, rng: &mut R, n_rows: usize, n_cols: usize, density: f64) -> Self {
        let rows = (0..n_rows)
            .map(|_| {
                let mut s = SparseVec::new();
                for c in 0..n_cols {
                    if rng.gen_bool(density.clamp(0.0, 1.0)) {
                        let v = rng.gen_range(1..field.p()) as u32;
                        s.idx.push(c as u32);
                        s.val.push(v);
                    }
                }
                s
            })
            .collect();
        Matrix { n_rows, n_cols, rows }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(SparseVec::nnz).sum()
    }

    pub fn row(&self, i: usize) -> &SparseVec {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<SparseVec> {
        self.rows
    }

    pub fn push_row(&mut self, r: SparseVec) {
        if let Some(&last) = r.idx.last() {
            assert!((last as usize) < self.n_cols, "column index out of range");
        }
        self.rows.push(r);
        self.n_rows += 1;
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.rows[r].get(c)
    }

    pub fn to_dense(&self) -> Vec<Vec<u32>> {
        self.rows.iter().map(|r| r.to_dense(self.n_cols)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut cols: Vec<SparseVec> = vec![SparseVec::new(); self.n_cols];
        for (r, row) in self.rows.iter().enumerate() {
            for (c, v) in row.iter() {
                cols[c].idx.push(r as u32);
                cols[c].val.push(v);
            }
        }
        Matrix { n_rows: self.n_cols, n_cols: self.n_rows, rows: cols }
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, field: &Field, other: &Matrix) -> Result<Matrix, AlgError> {
        if self.n_cols != other.n_rows {
            return Err(AlgError::DimensionMismatch {
                expected: self.n_cols,
                found: other.n_rows,
            });
        }
        let mut acc = vec![0u64; other.n_cols];
        let mut cnt = vec![0u8; other.n_cols];
        let mut touched: Vec<usize> = Vec::new();
        let rows = self
            .rows
            .iter()
            .map(|row| {
                for (k, a) in row.iter() {
                    for (j, b) in other.rows[k].iter() {
                        if cnt[j] == 0 && acc[j] == 0 {
                            touched.push(j);
                        }
                        acc[j] += u64::from(a) * u64::from(b);
                        cnt[j] += 1;
                        if cnt[j] as usize == super::field::LAZY_BUDGET {
                            acc[j] = u64::from(field.reduce(acc[j]));
                            cnt[j] = 1;
                        }
                    }
                }
                touched.sort_unstable();
                let mut out = SparseVec::new();
                for &j in &touched {
                    let v = field.reduce(acc[j]);
                    acc[j] = 0;
                    cnt[j] = 0;
                    if v != 0 {
                        out.idx.push(j as u32);
                        out.val.push(v);
                    }
                }
                touched.clear();
                out
            })
            .collect();
        Ok(Matrix { n_rows: self.n_rows, n_cols: other.n_cols, rows })
    }

    /// Matrix-vector product with a dense vector.
    pub fn mul_vec(&self, field: &Field, v: &[u32]) -> Result<Vec<u32>, AlgError> {
        if v.len() != self.n_cols {
            return Err(AlgError::DimensionMismatch { expected: self.n_cols, found: v.len() });
        }
        Ok(self.rows.iter().map(|r| r.dot_dense(field, v)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(SparseVec::is_zero)
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hconcat(&self, other: &Matrix) -> Result<Matrix, AlgError> {
        if self.n_rows != other.n_rows {
            return Err(AlgError::DimensionMismatch { expected: self.n_rows, found: other.n_rows });
        }
        let shift = self.n_cols as u32;
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| {
                let mut r = a.clone();
                r.idx.extend(b.idx.iter().map(|&i| i + shift));
                r.val.extend_from_slice(&b.val);
                r
            })
            .collect();
        Ok(Matrix { n_rows: self.n_rows, n_cols: self.n_cols + other.n_cols, rows })
    }

    /// Reverses the column order.
    pub fn reverse_columns(&self) -> Matrix {
        let n = self.n_cols as u32;
        let rows = self
            .rows
            .iter()
            .map(|r| SparseVec {
                idx: r.idx.iter().rev().map(|&i| n - 1 - i).collect(),
                val: r.val.iter().rev().copied().collect(),
            })
            .collect();
        Matrix { n_rows: self.n_rows, n_cols: self.n_cols, rows }
    }
}
