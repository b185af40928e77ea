use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use conormal_core::exactalg::{Field, DEFAULT_PRIME};
use conormal_core::rings::{binomial, p1_cohomology, GradedRing, Monomial, Polynomial, ScrollRing, Variable};

fn field() -> Field {
    Field::new(DEFAULT_PRIME)
}

fn random(ring: &Arc<GradedRing>, d: i32, seed: u64) -> Polynomial {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Polynomial::random_small(ring, &field(), &[d], 5, &mut rng)
}

#[test]
fn standard_bases_have_binomial_size() {
    for n in 1..6 {
        let r = GradedRing::standard(n, "z");
        for d in 0..6 {
            let b = r.basis(d);
            assert_eq!(b.len(), binomial(n + d as usize - 1, d as usize));
            for (i, m) in b.monomials().iter().enumerate() {
                assert_eq!(b.index_of(m), Some(i));
                assert_eq!(m.total_degree(), d as u32);
            }
        }
        assert!(r.basis(-1).is_empty());
    }
}

#[test]
fn first_monomial_is_the_top_power() {
    let r = GradedRing::standard(3, "z");
    assert_eq!(r.basis(4).get(0), &Monomial::var(3, 0).mul(&Monomial::var(3, 0)).mul(&Monomial::var(3, 0)).mul(&Monomial::var(3, 0)));
}

#[test]
fn gradings_need_a_positive_functional() {
    let bad = vec![
        Variable { name: "a".into(), degree: vec![1] },
        Variable { name: "b".into(), degree: vec![-1] },
    ];
    assert!(GradedRing::new(bad).is_err());
    let mixed = vec![
        Variable { name: "a".into(), degree: vec![1, 0] },
        Variable { name: "b".into(), degree: vec![1] },
    ];
    assert!(GradedRing::new(mixed).is_err());
    assert!(ScrollRing::new(&[2, 0]).is_err());
}

#[test]
fn p1_cohomology_of_line_bundles() {
    assert_eq!(p1_cohomology(&[0]), (1, 0));
    assert_eq!(p1_cohomology(&[-1]), (0, 0));
    assert_eq!(p1_cohomology(&[-2]), (0, 1));
    assert_eq!(p1_cohomology(&[3, -4, -1]), (4, 3));
}

/// `h^0(S^a E(b))` summed over the monomials `y^alpha` of degree `a`.
fn scroll_h0(e: &[u32], a: u32, b: i64) -> u64 {
    fn go(e: &[u32], a: u32, acc: i64, out: &mut Vec<i64>) {
        match e.split_first() {
            None => {
                if a == 0 {
                    out.push(acc);
                }
            }
            Some((&ei, rest)) => {
                for k in 0..=a {
                    go(rest, a - k, acc + i64::from(k * ei), out);
                }
            }
        }
    }
    let mut twists = Vec::new();
    go(e, a, b, &mut twists);
    p1_cohomology(&twists).0
}

#[test]
fn scroll_pieces_are_sections_of_symmetric_powers() {
    for e in [vec![1, 1], vec![2, 1, 1], vec![1, 1, 1, 1], vec![3, 1]] {
        let s = ScrollRing::new(&e).unwrap();
        assert_eq!(s.f(), e.iter().sum::<u32>());
        for a in 0..4 {
            for b in -6..4 {
                assert_eq!(s.basis(a, b).len() as u64, scroll_h0(&e, a as u32, i64::from(b)), "e={e:?} a={a} b={b}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ring_axioms(s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>(), d in 0i32..4) {
        let f = field();
        let r = GradedRing::standard(4, "z");
        let (a, b, c) = (random(&r, d, s1), random(&r, d, s2), random(&r, 2, s3));
        let lhs = a.add(&f, &b).unwrap().mul(&f, &c).unwrap();
        let rhs = a.mul(&f, &c).unwrap().add(&f, &b.mul(&f, &c).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(a.mul(&f, &c).unwrap(), c.mul(&f, &a).unwrap());
        prop_assert!(a.sub(&f, &a).unwrap().is_zero());
        prop_assert_eq!(a.pow(&f, 2), a.mul(&f, &a).unwrap());
    }

    #[test]
    fn evaluation_is_a_homomorphism(s1 in any::<u64>(), s2 in any::<u64>(), pt in proptest::collection::vec(0u32..1000, 4)) {
        let f = field();
        let r = GradedRing::standard(4, "z");
        let (a, b) = (random(&r, 2, s1), random(&r, 3, s2));
        prop_assert_eq!(a.mul(&f, &b).unwrap().eval(&f, &pt), f.mul(a.eval(&f, &pt), b.eval(&f, &pt)));
        // Euler's identity for forms of degree 3.
        let euler = (0..4).fold(0, |acc, i| f.add(acc, f.mul(pt[i], b.derivative(&f, i).eval(&f, &pt))));
        prop_assert_eq!(euler, f.mul(3, b.eval(&f, &pt)));
    }

    #[test]
    fn derivatives_obey_leibniz(s1 in any::<u64>(), s2 in any::<u64>(), i in 0usize..4) {
        let f = field();
        let r = GradedRing::standard(4, "z");
        let (a, b) = (random(&r, 2, s1), random(&r, 2, s2));
        let lhs = a.mul(&f, &b).unwrap().derivative(&f, i);
        let rhs = a.derivative(&f, i).mul(&f, &b).unwrap().add(&f, &a.mul(&f, &b.derivative(&f, i)).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn coordinates_round_trip(s in any::<u64>(), d in 0i32..5) {
        let r = GradedRing::standard(5, "z");
        let p = random(&r, d, s);
        let basis = r.basis(d);
        let v = p.to_sparse(&basis).unwrap();
        prop_assert_eq!(Polynomial::from_sparse(&r, &basis, &v), p.clone());
        prop_assert_eq!(p.to_dense(&basis).unwrap(), v.to_dense(basis.len()));
        prop_assert!(p.is_zero() || p.multidegree() == Some(vec![d]));
    }

    #[test]
    fn substitution_composes_with_evaluation(s in any::<u64>(), pt in proptest::collection::vec(0u32..1000, 2)) {
        let f = field();
        let src = GradedRing::standard(3, "z");
        let dst = GradedRing::standard(2, "s");
        let p = random(&src, 3, s);
        let images: Vec<Polynomial> = (0..3).map(|i| random(&dst, 2, s.wrapping_add(i + 1))).collect();
        let q = p.substitute(&f, &images).unwrap();
        let at: Vec<u32> = images.iter().map(|g| g.eval(&f, &pt)).collect();
        prop_assert_eq!(q.eval(&f, &pt), p.eval(&f, &at));
    }
}

#[test]
fn mixing_degrees_is_not_homogeneous() {
    let f = field();
    let r = GradedRing::standard(2, "z");
    let p = Polynomial::var(&r, 0).add(&f, &Polynomial::constant(&r, 1)).unwrap();
    assert!(!p.is_homogeneous());
    assert!(p.to_sparse(&r.basis(1)).is_err());
    assert_eq!(format!("{:?}", Polynomial::var(&r, 1).pow(&f, 2)), "1*z1^2");
}
