//! Incremental reduced row-echelon builder.
//!
//! Vectors are inserted in batches. A batch is first reduced against the
//! current basis; because that basis is fully reduced, the coefficient of each
//! basis row is simply the batch entry at the row's pivot, so the whole step is
//! a matrix product evaluated with lazily reduced `u64` accumulators. The
//! residuals are then echelonised among themselves and finally the new pivot
//! columns are cleared from the old rows, which keeps the basis fully reduced.
//!
//! Rows start sparse and switch to dense storage once more than a quarter of
//! their entries are nonzero.

use super::field::LAZY_BUDGET;
use super::matrix::SparseVec;
use super::Field;

const NONE: u32 = u32::MAX;
const BATCH: usize = 64;
const TILE: usize = 1024;
const ROW_CHUNK: usize = 32;

/// Storage for one basis row.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Row {
    Sparse(SparseVec),
    Dense(Vec<u32>),
}

impl Row {
    /// Chooses the storage from the fill ratio.
    pub fn from_dense(d: Vec<u32>) -> Row {
        let nnz = d.iter().filter(|&&v| v != 0).count();
        if nnz * 4 > d.len() {
            Row::Dense(d)
        } else {
            Row::Sparse(SparseVec::from_dense(&d))
        }
    }

    pub fn from_sparse(s: SparseVec, n: usize) -> Row {
        if s.nnz() * 4 > n {
            Row::Dense(s.to_dense(n))
        } else {
            Row::Sparse(s)
        }
    }

    pub fn get(&self, i: usize) -> u32 {
        match self {
            Row::Sparse(s) => s.get(i),
            Row::Dense(d) => d[i],
        }
    }

    pub fn nnz(&self) -> usize {
        match self {
            Row::Sparse(s) => s.nnz(),
            Row::Dense(d) => d.iter().filter(|&&v| v != 0).count(),
        }
    }

    pub fn to_dense(&self, n: usize) -> Vec<u32> {
        match self {
            Row::Sparse(s) => s.to_dense(n),
            Row::Dense(d) => d.clone(),
        }
    }

    pub fn to_sparse(&self) -> SparseVec {
        match self {
            Row::Sparse(s) => s.clone(),
            Row::Dense(d) => SparseVec::from_dense(d),
        }
    }

    /// Iterates the nonzero entries.
    pub fn for_each_nonzero(&self, mut f: impl FnMut(usize, u32)) {
        match self {
            Row::Sparse(s) => s.iter().for_each(|(i, v)| f(i, v)),
            Row::Dense(d) => {
                for (i, &v) in d.iter().enumerate() {
                    if v != 0 {
                        f(i, v)
                    }
                }
            }
        }
    }
}

#[inline(always)]
fn axpy_lazy(acc: &mut [u64], c: u64, row: &[u32]) {
    for (x, &y) in acc.iter_mut().zip(row) {
        *x += c * u64::from(y);
    }
}

#[inline]
fn reduce_all(field: &Field, acc: &mut [u64]) {
    for x in acc.iter_mut() {
        *x = u64::from(field.reduce(*x));
    }
}

/// A fully reduced echelon basis under construction.
#[derive(Clone, Debug)]
pub struct EchelonBuilder {
    field: Field,
    n: usize,
    rows: Vec<Row>,
    pivots: Vec<usize>,
    col_row: Vec<u32>,
    pending: Vec<Vec<u64>>,
}

impl EchelonBuilder {
    pub fn new(field: Field, n: usize) -> Self {
        EchelonBuilder {
            field,
            n,
            rows: Vec::new(),
            pivots: Vec::new(),
            col_row: vec![NONE; n],
            pending: Vec::new(),
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    /// Rank of everything inserted so far.
    pub fn rank(&mut self) -> usize {
        self.flush();
        self.rows.len()
    }

    pub fn push_dense(&mut self, v: &[u32]) {
        assert_eq!(v.len(), self.n, "vector length mismatch");
        self.pending.push(v.iter().map(|&x| u64::from(x)).collect());
        if self.pending.len() >= BATCH {
            self.flush();
        }
    }

    pub fn push_sparse(&mut self, v: &SparseVec) {
        let mut acc = vec![0u64; self.n];
        for (i, x) in v.iter() {
            acc[i] = u64::from(x);
        }
        self.pending.push(acc);
        if self.pending.len() >= BATCH {
            self.flush();
        }
    }

    /// Pushes a dense vector with entries already reduced but stored as `u64`.
    pub fn push_acc(&mut self, v: Vec<u64>) {
        assert_eq!(v.len(), self.n, "vector length mismatch");
        self.pending.push(v);
        if self.pending.len() >= BATCH {
            self.flush();
        }
    }

    /// Inserts all pending vectors.
    pub fn flush(&mut self) {
        if self.pending.is_empty() {
            return;
        }
        let batch = std::mem::take(&mut self.pending);
        self.insert_batch(batch);
    }

    /// Reduces `accs` in place against the current basis. Entries must be
    /// reduced residues on input and are reduced residues on output.
    fn reduce_against_basis(&self, accs: &mut [Vec<u64>]) {
        let r = self.rows.len();
        if r == 0 || accs.is_empty() {
            return;
        }
        let f = &self.field;
        let p = f.p();
        // Coefficients are read up front: the basis is fully reduced.
        let mut coef = vec![0u32; accs.len() * r];
        for (b, acc) in accs.iter().enumerate() {
            for (ri, &pc) in self.pivots.iter().enumerate() {
                let v = acc[pc] as u32;
                if v != 0 {
                    coef[b * r + ri] = (p - u64::from(v)) as u32;
                }
            }
        }
        // Sparse rows are applied directly.
        for (ri, row) in self.rows.iter().enumerate() {
            if let Row::Sparse(s) = row {
                for (b, acc) in accs.iter_mut().enumerate() {
                    let c = coef[b * r + ri];
                    if c != 0 {
                        for (i, v) in s.iter() {
                            acc[i] = u64::from(f.reduce(acc[i] + u64::from(c) * u64::from(v)));
                        }
                    }
                }
            }
        }
        let dense: Vec<usize> =
            (0..r).filter(|&ri| matches!(self.rows[ri], Row::Dense(_))).collect();
        if dense.is_empty() {
            return;
        }
        let mut cnt = vec![0usize; accs.len()];
        let mut t0 = 0;
        while t0 < self.n {
            let t1 = (t0 + TILE).min(self.n);
            cnt.iter_mut().for_each(|c| *c = 0);
            for chunk in dense.chunks(ROW_CHUNK) {
                for (b, acc) in accs.iter_mut().enumerate() {
                    let tile = &mut acc[t0..t1];
                    let cb = &coef[b * r..(b + 1) * r];
                    for &ri in chunk {
                        let c = cb[ri];
                        if c == 0 {
                            continue;
                        }
                        if let Row::Dense(d) = &self.rows[ri] {
                            axpy_lazy(tile, u64::from(c), &d[t0..t1]);
                        }
                        cnt[b] += 1;
                        if cnt[b] == LAZY_BUDGET {
                            reduce_all(f, tile);
                            cnt[b] = 0;
                        }
                    }
                }
            }
            for (b, acc) in accs.iter_mut().enumerate() {
                if cnt[b] > 0 {
                    reduce_all(f, &mut acc[t0..t1]);
                }
            }
            t0 = t1;
        }
    }

    fn insert_batch(&mut self, mut accs: Vec<Vec<u64>>) {
        self.reduce_against_basis(&mut accs);
        let f = self.field;
        let n = self.n;
        // Echelonise the residuals among themselves, keeping them mutually reduced.
        let mut new_rows: Vec<Vec<u32>> = Vec::new();
        let mut new_piv: Vec<usize> = Vec::new();
        for acc in accs {
            let mut v: Vec<u64> = acc;
            let mut cnt = 0;
            for (q, row) in new_piv.iter().zip(&new_rows) {
                let c = v[*q] as u32;
                if c != 0 {
                    axpy_lazy(&mut v, f.p() - u64::from(c), row);
                    cnt += 1;
                    if cnt == LAZY_BUDGET {
                        reduce_all(&f, &mut v);
                        cnt = 0;
                    }
                }
            }
            if cnt > 0 {
                reduce_all(&f, &mut v);
            }
            let lead = match v.iter().position(|&x| x != 0) {
                Some(l) => l,
                None => continue,
            };
            let inv = f.inv(v[lead] as u32);
            let row: Vec<u32> = v.iter().map(|&x| f.mul(x as u32, inv)).collect();
            for other in new_rows.iter_mut() {
                let c = other[lead];
                if c != 0 {
                    let nc = f.neg(c);
                    for (x, &y) in other.iter_mut().zip(&row) {
                        *x = f.reduce(u64::from(*x) + u64::from(nc) * u64::from(y));
                    }
                }
            }
            new_rows.push(row);
            new_piv.push(lead);
        }
        if new_rows.is_empty() {
            return;
        }
        // Clear the new pivot columns from the existing rows.
        let p = f.p();
        for row in self.rows.iter_mut() {
            let coefs: Vec<(usize, u64)> = new_piv
                .iter()
                .enumerate()
                .filter_map(|(j, &q)| {
                    let c = row.get(q);
                    (c != 0).then(|| (j, p - u64::from(c)))
                })
                .collect();
            if coefs.is_empty() {
                continue;
            }
            let mut acc: Vec<u64> = match row {
                Row::Dense(d) => d.iter().map(|&x| u64::from(x)).collect(),
                Row::Sparse(s) => {
                    let mut a = vec![0u64; n];
                    for (i, v) in s.iter() {
                        a[i] = u64::from(v);
                    }
                    a
                }
            };
            for chunk in coefs.chunks(LAZY_BUDGET) {
                for &(j, c) in chunk {
                    axpy_lazy(&mut acc, c, &new_rows[j]);
                }
                reduce_all(&f, &mut acc);
            }
            *row = Row::from_dense(acc.into_iter().map(|x| x as u32).collect());
        }
        for (row, q) in new_rows.into_iter().zip(new_piv) {
            self.col_row[q] = self.rows.len() as u32;
            self.pivots.push(q);
            self.rows.push(Row::from_dense(row));
        }
    }

    /// Residual of a dense vector modulo the current span (without inserting).
    pub fn reduce_dense(&mut self, v: &[u32]) -> Vec<u32> {
        self.flush();
        let mut accs = vec![v.iter().map(|&x| u64::from(x)).collect::<Vec<u64>>()];
        self.reduce_against_basis(&mut accs);
        accs.pop().expect("one vector").into_iter().map(|x| x as u32).collect()
    }

    /// Residuals of many vectors, processed in batches.
    pub fn reduce_many(&mut self, vs: Vec<Vec<u32>>) -> Vec<Vec<u32>> {
        self.flush();
        let mut out = Vec::with_capacity(vs.len());
        let mut it = vs.into_iter().peekable();
        while it.peek().is_some() {
            let mut accs: Vec<Vec<u64>> = it
                .by_ref()
                .take(BATCH)
                .map(|v| v.into_iter().map(u64::from).collect())
                .collect();
            self.reduce_against_basis(&mut accs);
            out.extend(accs.into_iter().map(|a| a.into_iter().map(|x| x as u32).collect()));
        }
        out
    }

    /// Row index holding the pivot at column `c`, if any.
    pub fn pivot_row(&mut self, c: usize) -> Option<usize> {
        self.flush();
        let r = self.col_row[c];
        (r != NONE).then_some(r as usize)
    }

    /// Finishes into canonical form: rows sorted by pivot column.
    pub fn finish(mut self) -> (Vec<usize>, Vec<Row>) {
        self.flush();
        let mut order: Vec<usize> = (0..self.rows.len()).collect();
        order.sort_unstable_by_key(|&i| self.pivots[i]);
        let mut rows: Vec<Option<Row>> = self.rows.into_iter().map(Some).collect();
        let pivots = order.iter().map(|&i| self.pivots[i]).collect();
        let rows = order.iter().map(|&i| rows[i].take().expect("each row once")).collect();
        (pivots, rows)
    }
}
