use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use conormal_core::exactalg::{
    image, intersect, is_prime, kernel, rank, rref, solve, EchelonBuilder, Field, FieldConfig, Matrix, SparseVec,
    Subspace, DEFAULT_PRIME, DEFAULT_RETRY_PRIMES,
};

/// Plain dense Gauss-Jordan with `u128` products, used as the oracle.
fn naive_rref(p: u64, rows: &[Vec<u32>], n: usize) -> Vec<Vec<u64>> {
    let pw = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = (r as u128 * b as u128 % p as u128) as u64;
            }
            b = (b as u128 * b as u128 % p as u128) as u64;
            e >>= 1;
        }
        r
    };
    let mut m: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|&x| x as u64 % p).collect()).collect();
    let mut out = 0;
    for c in 0..n {
        let Some(piv) = (out..m.len()).find(|&i| m[i][c] != 0) else { continue };
        m.swap(out, piv);
        let inv = pw(m[out][c], p - 2);
        for x in m[out].iter_mut() {
            *x = (*x as u128 * inv as u128 % p as u128) as u64;
        }
        for i in 0..m.len() {
            if i != out && m[i][c] != 0 {
                let f = m[i][c];
                for j in 0..n {
                    let s = (f as u128 * m[out][j] as u128 % p as u128) as u64;
                    m[i][j] = (m[i][j] + p - s) % p;
                }
            }
        }
        out += 1;
    }
    m.truncate(out);
    m
}

fn dense_rows(s: &Subspace) -> Vec<Vec<u64>> {
    (0..s.dim()).map(|i| s.row_dense(i).into_iter().map(u64::from).collect()).collect()
}

fn matrix_strategy(max_rows: usize, max_cols: usize) -> impl Strategy<Value = (usize, Vec<Vec<u32>>)> {
    (1..=max_cols, 0..=max_rows).prop_flat_map(|(n, r)| {
        // Small entries make dependencies likely; a few large ones exercise reduction.
        let entry = prop_oneof![4 => 0u32..3, 1 => 0u32..DEFAULT_PRIME as u32];
        (Just(n), proptest::collection::vec(proptest::collection::vec(entry, n), r))
    })
}

fn field() -> Field {
    Field::new(DEFAULT_PRIME)
}

#[test]
fn field_arithmetic() {
    let f = field();
    let p = f.p() as u32;
    assert_eq!(f.add(p - 1, 1), 0);
    assert_eq!(f.sub(0, 1), p - 1);
    assert_eq!(f.neg(0), 0);
    assert_eq!(f.mul(f.inv(12345), 12345), 1);
    assert_eq!(f.pow(3, f.p() - 1), 1);
    assert_eq!(f.from_i64(-1), p - 1);
    assert_eq!(f.to_signed(p - 5), -5);
    assert_eq!(f.to_signed(5), 5);
    assert_eq!(f.reduce(u64::MAX), (u64::MAX % f.p()) as u32);
}

#[test]
fn configured_primes_are_prime() {
    assert!(is_prime(DEFAULT_PRIME));
    assert!(DEFAULT_RETRY_PRIMES.iter().all(|&q| is_prime(q) && q != DEFAULT_PRIME));
    assert!(!is_prime(DEFAULT_PRIME - 2));
    assert!(!is_prime(1 << 30));
    let cfg = FieldConfig { prime: DEFAULT_PRIME, retry_primes: DEFAULT_RETRY_PRIMES.to_vec() };
    assert!(cfg.validate().is_ok());
    assert!(FieldConfig { prime: 1_000_000, retry_primes: vec![] }.validate().is_err());
}

#[test]
fn sparse_vectors_drop_zeros_and_merge() {
    let f = field();
    let v = SparseVec::from_pairs(&f, vec![(3, 5), (1, 0), (3, f.neg(5)), (0, 2)]);
    assert_eq!(v.nnz(), 1);
    assert_eq!(v.to_dense(4), vec![2, 0, 0, 0]);
    let w = SparseVec::from_dense(&[0, 1, 0, 7]);
    let s = v.axpy(&f, 3, &w);
    assert_eq!(s.to_dense(4), vec![2, 3, 0, 21]);
    assert_eq!(w.dot_dense(&f, &[1, 2, 3, 4]), 30);
}

#[test]
fn kernel_of_random_sparse_matrix() {
    let f = field();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let m = Matrix::random(&f, &mut rng, 40, 60, 0.1);
    let k = kernel(&f, &m);
    assert_eq!(k.dim() + rank(&f, &m), 60);
    for i in 0..k.dim() {
        assert!(m.mul_vec(&f, &k.row_dense(i)).unwrap().iter().all(|&x| x == 0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rref_matches_the_oracle((n, rows) in matrix_strategy(8, 8)) {
        let f = field();
        let m = Matrix::from_dense(n, &rows);
        let s = rref(&f, &m);
        prop_assert_eq!(dense_rows(&s), naive_rref(f.p(), &rows, n));
        prop_assert_eq!(rank(&f, &m), s.dim());
    }

    #[test]
    fn rref_ignores_row_order_and_scaling((n, rows) in matrix_strategy(8, 8), c in 1u32..1000) {
        let f = field();
        let mut shuffled: Vec<Vec<u32>> = rows.iter().rev().map(|r| r.iter().map(|&x| f.mul(f.reduce(x.into()), c)).collect()).collect();
        shuffled.push(vec![0; n]);
        prop_assert_eq!(rref(&f, &Matrix::from_dense(n, &rows)), rref(&f, &Matrix::from_dense(n, &shuffled)));
    }

    #[test]
    fn kernel_is_annihilated_and_has_complementary_dimension((n, rows) in matrix_strategy(8, 8)) {
        let f = field();
        let m = Matrix::from_dense(n, &rows);
        let k = kernel(&f, &m);
        prop_assert_eq!(k.dim() + rank(&f, &m), n);
        for i in 0..k.dim() {
            prop_assert!(m.mul_vec(&f, &k.row_dense(i)).unwrap().iter().all(|&x| x == 0));
        }
        // The kernel basis is itself in reduced echelon form.
        prop_assert_eq!(dense_rows(&k), naive_rref(f.p(), &(0..k.dim()).map(|i| k.row_dense(i)).collect::<Vec<_>>(), n));
    }

    #[test]
    fn image_is_the_row_space_of_the_transpose((n, rows) in matrix_strategy(7, 7)) {
        let f = field();
        let m = Matrix::from_dense(n, &rows);
        prop_assert_eq!(image(&f, &m), rref(&f, &m.transpose()));
    }

    #[test]
    fn intersection_dimension_formula((n, a) in matrix_strategy(6, 8), b_rows in proptest::collection::vec(proptest::collection::vec(0u32..3, 8), 0..6)) {
        let f = field();
        let b_rows: Vec<Vec<u32>> = b_rows.into_iter().map(|r| r[..n].to_vec()).collect();
        let sa = rref(&f, &Matrix::from_dense(n, &a));
        let sb = rref(&f, &Matrix::from_dense(n, &b_rows));
        let cap = intersect(&f, &sa, &sb).unwrap();
        let sum = sa.sum(&f, &sb).unwrap();
        prop_assert_eq!(cap.dim() + sum.dim(), sa.dim() + sb.dim());
        prop_assert!(cap.is_subspace_of(&f, &sa).unwrap());
        prop_assert!(cap.is_subspace_of(&f, &sb).unwrap());
        prop_assert!(sa.is_subspace_of(&f, &sum).unwrap());
    }

    #[test]
    fn solve_finds_preimages_of_images((n, rows) in matrix_strategy(7, 7), x in proptest::collection::vec(0u32..50, 7)) {
        let f = field();
        let m = Matrix::from_dense(n, &rows);
        let x = &x[..n];
        let b = m.mul_vec(&f, x).unwrap();
        let target = Matrix::from_dense(1, &b.iter().map(|&v| vec![v]).collect::<Vec<_>>());
        let sol = solve(&f, &m, &target).unwrap().expect("consistent system");
        let y: Vec<u32> = (0..n).map(|i| sol.get(i, 0)).collect();
        prop_assert_eq!(m.mul_vec(&f, &y).unwrap(), b);
    }

    #[test]
    fn builder_reduction_is_membership((n, rows) in matrix_strategy(6, 8), v in proptest::collection::vec(0u32..3, 8)) {
        let f = field();
        let v = &v[..n];
        let mut b = EchelonBuilder::new(f, n);
        for r in &rows {
            b.push_dense(r);
        }
        let residual = b.reduce_dense(v);
        let s = rref(&f, &Matrix::from_dense(n, &rows));
        prop_assert_eq!(residual.iter().all(|&x| x == 0), s.contains(&f, v).unwrap());
        prop_assert_eq!(s.reduce(&f, v).unwrap(), residual);
    }

    #[test]
    fn echelon_validation_round_trips((n, rows) in matrix_strategy(6, 8)) {
        let f = field();
        let s = rref(&f, &Matrix::from_dense(n, &rows));
        let sparse: Vec<SparseVec> = s.rows().iter().map(|r| r.to_sparse()).collect();
        let back = Subspace::from_echelon(&f, n, s.pivot_cols().to_vec(), sparse.clone()).unwrap();
        prop_assert_eq!(&back, &s);
        if s.dim() > 0 {
            let mut scaled = sparse;
            scaled[0] = scaled[0].scale(&f, 2);
            prop_assert!(Subspace::from_echelon(&f, n, s.pivot_cols().to_vec(), scaled).is_err());
        }
    }
}

#[test]
fn inconsistent_systems_have_no_solution() {
    let f = field();
    let m = Matrix::from_dense(2, &[vec![1, 1], vec![2, 2]]);
    let target = Matrix::from_dense(1, &[vec![1], vec![3]]);
    assert!(solve(&f, &m, &target).unwrap().is_none());
}
