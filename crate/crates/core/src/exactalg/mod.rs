//! Exact linear algebra over a prime field: canonical echelon forms, kernels,
//! intersections, membership and linear solves.

mod echelon;
pub mod field;
mod matrix;
mod subspace;

use thiserror::Error;

pub use echelon::{EchelonBuilder, Row};
pub use field::{is_prime, Field, FieldConfig, DEFAULT_PRIME, DEFAULT_RETRY_PRIMES};
pub use matrix::{Matrix, SparseVec};
pub use subspace::Subspace;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("ambient dimensions differ: {0} vs {1}")]
    AmbientMismatch(usize, usize),
    #[error("{0} is not an admissible prime (must be prime, above 10^6 and below 2^30)")]
    BadPrime(u64),
    #[error("retry primes must be pairwise distinct and differ from the working prime")]
    DuplicatePrime,
    #[error("not a reduced echelon form: {0}")]
    NotEchelon(String),
}

/// Canonical row space of `m`.
pub fn rref(field: &Field, m: &Matrix) -> Subspace {
    Subspace::span_sparse(field, m.n_cols(), m.rows())
}

pub fn rank(field: &Field, m: &Matrix) -> usize {
    let mut b = EchelonBuilder::new(*field, m.n_cols());
    for r in m.rows() {
        b.push_sparse(r);
    }
    b.rank()
}

/// `{v : m v = 0}` in canonical form.
///
/// The row space of `m` is echelonised with the column order reversed; the
/// null-space vectors read off from that form are then already the reduced
/// echelon basis of the kernel in the original order.
pub fn kernel(field: &Field, m: &Matrix) -> Subspace {
    let n = m.n_cols();
    let rev = rref(field, &m.reverse_columns());
    let mut pivot_of_col = vec![usize::MAX; n];
    for (i, &c) in rev.pivot_cols().iter().enumerate() {
        pivot_of_col[c] = i;
    }
    let mut vecs: Vec<(usize, SparseVec)> = Vec::new();
    // Column-major access into the reversed echelon rows.
    let mut cols: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n];
    for (i, row) in rev.rows().iter().enumerate() {
        let pc = rev.pivot_cols()[i];
        row.for_each_nonzero(|c, v| {
            if c != pc {
                cols[c].push((i as u32, v));
            }
        });
    }
    for f in 0..n {
        if pivot_of_col[f] != usize::MAX {
            continue;
        }
        // Kernel vector e_f - sum_i E[i][f] e_{p_i}, in reversed coordinates.
        let mut pairs: Vec<(u32, u32)> = vec![((n - 1 - f) as u32, 1)];
        for &(i, v) in &cols[f] {
            let pc = rev.pivot_cols()[i as usize];
            pairs.push(((n - 1 - pc) as u32, field.neg(v)));
        }
        pairs.sort_unstable_by_key(|&(c, _)| c);
        let sv = SparseVec {
            idx: pairs.iter().map(|&(c, _)| c).collect(),
            val: pairs.iter().map(|&(_, v)| v).collect(),
        };
        vecs.push((n - 1 - f, sv));
    }
    vecs.sort_unstable_by_key(|(c, _)| *c);
    let pivots = vecs.iter().map(|(c, _)| *c).collect();
    let rows = vecs.into_iter().map(|(_, s)| Row::from_sparse(s, n)).collect();
    Subspace::from_parts(n, pivots, rows)
}

/// Column space of `m` as a subspace of `F^{n_rows}`.
pub fn image(field: &Field, m: &Matrix) -> Subspace {
    rref(field, &m.transpose())
}

/// `a ∩ b` via the Zassenhaus construction.
pub fn intersect(field: &Field, a: &Subspace, b: &Subspace) -> Result<Subspace, AlgError> {
    if a.ambient_dim() != b.ambient_dim() {
        return Err(AlgError::AmbientMismatch(a.ambient_dim(), b.ambient_dim()));
    }
    let n = a.ambient_dim();
    if a.dim() == 0 || b.dim() == 0 {
        return Ok(Subspace::zero(n));
    }
    let mut builder = EchelonBuilder::new(*field, 2 * n);
    for r in a.rows() {
        let s = r.to_sparse();
        let mut d = vec![0u32; 2 * n];
        for (i, v) in s.iter() {
            d[i] = v;
            d[n + i] = v;
        }
        builder.push_dense(&d);
    }
    for r in b.rows() {
        let s = r.to_sparse();
        let mut d = vec![0u32; 2 * n];
        for (i, v) in s.iter() {
            d[i] = v;
        }
        builder.push_dense(&d);
    }
    let (pivots, rows) = builder.finish();
    let mut out = EchelonBuilder::new(*field, n);
    for (pc, row) in pivots.iter().zip(&rows) {
        if *pc >= n {
            let d = row.to_dense(2 * n);
            out.push_dense(&d[n..]);
        }
    }
    Ok(Subspace::from_builder(out))
}

/// Some `x` with `m x = target` (columnwise), or `None` when inconsistent.
pub fn solve(field: &Field, m: &Matrix, target: &Matrix) -> Result<Option<Matrix>, AlgError> {
    if m.n_rows() != target.n_rows() {
        return Err(AlgError::DimensionMismatch { expected: m.n_rows(), found: target.n_rows() });
    }
    let c = m.n_cols();
    let aug = m.hconcat(target)?;
    let e = rref(field, &aug);
    if e.pivot_cols().iter().any(|&pc| pc >= c) {
        return Ok(None);
    }
    let t = target.n_cols();
    let mut x = vec![SparseVec::new(); c];
    for (i, &pc) in e.pivot_cols().iter().enumerate() {
        let d = e.row_dense(i);
        x[pc] = SparseVec::from_dense(&d[c..c + t]);
    }
    Ok(Some(Matrix::from_rows(t, x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f() -> Field {
        Field::new(DEFAULT_PRIME)
    }

    #[test]
    fn identity_and_zero() {
        let s = rref(&f(), &Matrix::identity(2));
        assert_eq!(s.dim(), 2);
        assert_eq!(s.pivot_cols(), &[0, 1]);
        assert_eq!(rref(&f(), &Matrix::zeros(3, 4)).dim(), 0);
        assert_eq!(kernel(&f(), &Matrix::identity(5)).dim(), 0);
    }

    #[test]
    fn hand_reduction() {
        let m = Matrix::from_i64_rows(&f(), &[vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]]);
        let s = rref(&f(), &m);
        assert_eq!(s.dim(), 2);
        // (1,2,3) - 2(0,1,1) = (1,0,1)
        assert_eq!(s.row_dense(0), vec![1, 0, 1]);
        assert_eq!(s.row_dense(1), vec![0, 1, 1]);
        let k = kernel(&f(), &m);
        assert_eq!(k.dim(), 1);
        let v = k.row_dense(0);
        assert!(m.mul_vec(&f(), &v).unwrap().iter().all(|&x| x == 0));
    }

    #[test]
    fn kernel_is_canonical() {
        let field = f();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = Matrix::random(&field, &mut rng, 7, 15, 0.4);
        let k = kernel(&field, &m);
        assert_eq!(k.dim() + rank(&field, &m), 15);
        let again = rref(&field, &k.basis());
        assert_eq!(again, k);
    }

    #[test]
    fn large_dense_batches() {
        let field = f();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = Matrix::random(&field, &mut rng, 150, 400, 0.9);
        let b = Matrix::random(&field, &mut rng, 400, 300, 0.9);
        let prod = a.mul(&field, &b).unwrap();
        assert_eq!(rank(&field, &prod), 150);
        let s = rref(&field, &prod);
        for i in 0..s.dim() {
            for (j, &pc) in s.pivot_cols().iter().enumerate() {
                assert_eq!(s.row(i).get(pc), u32::from(i == j));
            }
        }
    }

    #[test]
    fn solve_roundtrip() {
        let field = f();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = Matrix::random(&field, &mut rng, 20, 30, 0.5);
        let x0 = Matrix::random(&field, &mut rng, 30, 4, 0.5);
        let t = m.mul(&field, &x0).unwrap();
        let x = solve(&field, &m, &t).unwrap().expect("consistent");
        assert_eq!(m.mul(&field, &x).unwrap(), t);
        let bad = Matrix::from_i64_rows(&field, &[vec![1, 0], vec![1, 0]]);
        let tb = Matrix::from_i64_rows(&field, &[vec![1], vec![2]]);
        assert!(solve(&field, &bad, &tb).unwrap().is_none());
    }
}
