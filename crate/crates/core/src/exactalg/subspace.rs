use super::echelon::{EchelonBuilder, Row};
use super::matrix::{Matrix, SparseVec};
use super::{AlgError, Field};

/// A linear subspace of `F_p^n` held in reduced row-echelon form.
///
/// Two equal subspaces always have identical pivots and rows, so equality of
/// values is equality of subspaces.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    pivots: Vec<usize>,
    rows: Vec<Row>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, pivots: Vec::new(), rows: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        let rows = (0..ambient)
            .map(|i| Row::from_sparse(SparseVec { idx: vec![i as u32], val: vec![1] }, ambient))
            .collect();
        Subspace { ambient, pivots: (0..ambient).collect(), rows }
    }

    pub(crate) fn from_parts(ambient: usize, pivots: Vec<usize>, rows: Vec<Row>) -> Self {
        Subspace { ambient, pivots, rows }
    }

    /// Rebuilds a subspace from stored echelon data, checking that it is
    /// in reduced echelon form over `field`.
    pub fn from_echelon(field: &Field, ambient: usize, pivots: Vec<usize>, rows: Vec<SparseVec>) -> Result<Self, AlgError> {
        if pivots.len() != rows.len() {
            return Err(AlgError::NotEchelon(format!("{} pivots for {} rows", pivots.len(), rows.len())));
        }
        if pivots.windows(2).any(|w| w[0] >= w[1]) || pivots.last().is_some_and(|&c| c >= ambient) {
            return Err(AlgError::NotEchelon("pivots are not increasing inside the ambient space".into()));
        }
        for (r, row) in rows.iter().enumerate() {
            if row.iter().any(|(i, v)| i >= ambient || u64::from(v) >= field.p()) {
                return Err(AlgError::NotEchelon(format!("row {r} has an entry out of range")));
            }
            for (q, &c) in pivots.iter().enumerate() {
                let want = u32::from(q == r);
                if row.get(c) != want {
                    return Err(AlgError::NotEchelon(format!("row {r} at pivot column {c}")));
                }
            }
            if row.iter().next().map(|(i, _)| i) != Some(pivots[r]) {
                return Err(AlgError::NotEchelon(format!("row {r} starts before its pivot")));
            }
        }
        let rows = rows.into_iter().map(|s| Row::from_sparse(s, ambient)).collect();
        Ok(Subspace { ambient, pivots, rows })
    }

    pub fn from_builder(b: EchelonBuilder) -> Self {
        let n = b.ambient();
        let (pivots, rows) = b.finish();
        Subspace { ambient: n, pivots, rows }
    }

    /// Span of sparse generators.
    pub fn span_sparse<'a>(
        field: &Field,
        ambient: usize,
        gens: impl IntoIterator<Item = &'a SparseVec>,
    ) -> Self {
        let mut b = EchelonBuilder::new(*field, ambient);
        for g in gens {
            b.push_sparse(g);
        }
        Subspace::from_builder(b)
    }

    /// Span of dense generators.
    pub fn span_dense<'a>(
        field: &Field,
        ambient: usize,
        gens: impl IntoIterator<Item = &'a Vec<u32>>,
    ) -> Self {
        let mut b = EchelonBuilder::new(*field, ambient);
        for g in gens {
            b.push_dense(g);
        }
        Subspace::from_builder(b)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn pivot_cols(&self) -> &[usize] {
        &self.pivots
    }

    /// Columns that are not pivots, in increasing order.
    pub fn free_cols(&self) -> Vec<usize> {
        let mut is_piv = vec![false; self.ambient];
        for &c in &self.pivots {
            is_piv[c] = true;
        }
        (0..self.ambient).filter(|&c| !is_piv[c]).collect()
    }

    pub fn row(&self, i: usize) -> &Row {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn row_dense(&self, i: usize) -> Vec<u32> {
        self.rows[i].to_dense(self.ambient)
    }

    /// The basis as a sparse matrix, one row per basis vector.
    pub fn basis(&self) -> Matrix {
        Matrix::from_rows(self.ambient, self.rows.iter().map(Row::to_sparse).collect())
    }

    /// An echelon builder seeded with this basis, for further insertions.
    pub fn to_builder(&self, field: &Field) -> EchelonBuilder {
        let mut b = EchelonBuilder::new(*field, self.ambient);
        for r in &self.rows {
            b.push_sparse(&r.to_sparse());
        }
        b
    }

    /// Residual of `v` modulo the subspace; zero exactly when `v` is inside.
    pub fn reduce(&self, field: &Field, v: &[u32]) -> Result<Vec<u32>, AlgError> {
        if v.len() != self.ambient {
            return Err(AlgError::DimensionMismatch { expected: self.ambient, found: v.len() });
        }
        let mut out: Vec<u64> = v.iter().map(|&x| u64::from(x)).collect();
        let p = field.p();
        for (c, row) in self.pivots.iter().zip(&self.rows) {
            let coef = v[*c];
            if coef == 0 {
                continue;
            }
            let nc = p - u64::from(coef);
            row.for_each_nonzero(|i, x| {
                out[i] = u64::from(field.reduce(out[i] + nc * u64::from(x)));
            });
        }
        Ok(out.into_iter().map(|x| x as u32).collect())
    }

    /// Coordinates of `v` in the echelon basis, or `None` when `v` is outside.
    pub fn coordinates(&self, field: &Field, v: &[u32]) -> Result<Option<Vec<u32>>, AlgError> {
        let res = self.reduce(field, v)?;
        if res.iter().any(|&x| x != 0) {
            return Ok(None);
        }
        Ok(Some(self.pivots.iter().map(|&c| v[c]).collect()))
    }

    pub fn contains(&self, field: &Field, v: &[u32]) -> Result<bool, AlgError> {
        Ok(self.reduce(field, v)?.iter().all(|&x| x == 0))
    }

    pub fn contains_sparse(&self, field: &Field, v: &SparseVec) -> Result<bool, AlgError> {
        self.contains(field, &v.to_dense(self.ambient))
    }

    /// `self ⊆ other`.
    pub fn is_subspace_of(&self, field: &Field, other: &Subspace) -> Result<bool, AlgError> {
        for i in 0..self.dim() {
            if !other.contains(field, &self.row_dense(i))? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `self + other`.
    pub fn sum(&self, field: &Field, other: &Subspace) -> Result<Subspace, AlgError> {
        if self.ambient != other.ambient {
            return Err(AlgError::AmbientMismatch(self.ambient, other.ambient));
        }
        let mut b = self.to_builder(field);
        for r in &other.rows {
            b.push_sparse(&r.to_sparse());
        }
        Ok(Subspace::from_builder(b))
    }

    /// Canonical complement of `sub` inside `self`: the basis rows of `self`
    /// whose pivot is not a pivot of `sub`. Requires `sub ⊆ self`.
    pub fn complement_rows(&self, sub: &Subspace) -> Vec<usize> {
        let mut taken = vec![false; self.ambient];
        for &c in &sub.pivots {
            taken[c] = true;
        }
        (0..self.dim()).filter(|&i| !taken[self.pivots[i]]).collect()
    }
}
