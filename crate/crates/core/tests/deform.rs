use std::sync::Arc;

use conormal_core::conormal::{Conormal, SaturationConfig};
use conormal_core::deform::{
    plane_extension_with_section, DeformError, DeformationState, FiberCheck, Presentation,
};
use conormal_core::exactalg::{Field, SparseVec, DEFAULT_PRIME};
use conormal_core::varieties::{
    complete_intersection, pentagonal_curve, pentagonal_defaults, plane_curve_canonical, tetragonal_curve, veronese,
    EmbeddedVariety, DEFAULT_RETRY_BUDGET,
};
use proptest::prelude::*;

fn field() -> Field {
    Field::new(DEFAULT_PRIME)
}

fn engine(x: EmbeddedVariety) -> Conormal {
    Conormal::new(Arc::new(x), SaturationConfig::default()).unwrap()
}

#[test]
fn twisted_cubic_presentation() {
    let f = field();
    let c = engine(veronese(&f, 1, 3).unwrap());
    let pres = Presentation::new(&c).unwrap();
    assert_eq!((pres.k(), pres.ell()), (3, 2));
    assert!(pres.validated());
    let triv = pres.trivial_first_order();
    assert!(triv.dim() <= 4);
    let fo = pres.first_order_space().unwrap();
    assert_eq!(fo.dim(), 2);
    assert!(triv.is_subspace_of(&f, &fo.space).unwrap());
}

#[test]
fn curves_without_a_linear_quadric_presentation_are_rejected() {
    let f = field();
    let c = engine(complete_intersection(&f, 3, &[2, 3], 0, DEFAULT_RETRY_BUDGET).unwrap());
    assert!(!c.normal_presentation_check(4).unwrap().quadratic_generation);
    assert!(matches!(Presentation::new(&c), Err(DeformError::Reject(_))));
    let t = engine(tetragonal_curve(&f, [2, 2, 1], [1, 2], 0, DEFAULT_RETRY_BUDGET).unwrap());
    let np = t.normal_presentation_check(4).unwrap();
    assert!(np.quadratic_generation && !np.linear_syzygies);
    assert!(matches!(Presentation::new(&t), Err(DeformError::Reject(_))));
}

#[test]
fn plane_septic_extends() {
    let f = field();
    let c = engine(plane_curve_canonical(&f, 7, 0, DEFAULT_RETRY_BUDGET).unwrap());
    let pres = Arc::new(Presentation::new(&c).unwrap());
    assert_eq!(pres.k(), 78);
    assert_eq!(pres.trivial_first_order().dim(), 15);
    let fo = pres.first_order_space().unwrap();
    assert_eq!(fo.dim(), 10);
    assert_eq!(fo.dim(), c.canonical_gaussian_corank().unwrap());
    for rep in &fo.representatives {
        assert!(!fo.trivial.contains_sparse(&f, rep).unwrap());
        let s = DeformationState::first_order(pres.clone(), rep).unwrap().second_order_lift().unwrap();
        let st = s.status();
        assert!(st.first_order && st.second_order && st.terminated);
        let report = s.flatness_check(4).unwrap();
        assert!(report.pass, "{report:?}");
        for d in &report.degrees[..2] {
            assert_eq!(d.fiber, FiberCheck::Direct { matches: true });
        }
        let (ring, gens) = s.extension_ideal().unwrap();
        assert_eq!(ring.n_vars(), 16);
        assert_eq!(gens.len(), 78);
    }

    let cone = DeformationState::cone(pres.clone()).unwrap();
    assert!(cone.status().terminated);
    assert!(cone.flatness_check(4).unwrap().pass);

    let f2: Vec<u32> = (0..pres.k() as u32).map(|i| 1 + i * 7).collect();
    let bad = DeformationState::from_parts(pres.clone(), &fo.representatives[0], f2).unwrap();
    assert!(!bad.status().second_order);
    let report = bad.flatness_check(4).unwrap();
    assert!(!report.pass);
    assert_eq!(report.failed_degree, Some(3));
    assert!(bad.extension_ideal().is_err());
}

#[test]
fn first_order_matches_gaussian_corank_on_other_curves() {
    let f = field();
    let (e, b) = pentagonal_defaults(8).unwrap();
    let c = engine(pentagonal_curve(&f, e, b, 0, DEFAULT_RETRY_BUDGET).unwrap());
    let pres = Presentation::new(&c).unwrap();
    assert_eq!(pres.first_order_space().unwrap().dim(), c.canonical_gaussian_corank().unwrap());

    let t = engine(tetragonal_curve(&f, [2, 2, 1], [1, 2], 0, DEFAULT_RETRY_BUDGET).unwrap());
    let pres = Arc::new(Presentation::unvalidated(t.variety().clone()).unwrap());
    let fo = pres.first_order_space().unwrap();
    assert!(fo.dim() > 0);
    assert_eq!(fo.dim(), t.canonical_gaussian_corank().unwrap());
    for rep in &fo.representatives {
        let s = DeformationState::first_order(pres.clone(), rep).unwrap();
        match s.second_order_lift() {
            Ok(next) => assert!(next.status().second_order),
            Err(DeformError::NoLift) => {}
            Err(e) => panic!("{e}"),
        }
    }
}

#[test]
fn non_first_order_rows_are_refused() {
    let f = field();
    let c = engine(veronese(&f, 1, 3).unwrap());
    let pres = Arc::new(Presentation::new(&c).unwrap());
    let fo = pres.first_order_space().unwrap();
    let n = c.variety().n_vars();
    let outside = (0..pres.k() * n)
        .map(|i| SparseVec::from_pairs(&f, vec![(i as u32, 1)]))
        .find(|v| !fo.space.contains_sparse(&f, v).unwrap())
        .unwrap();
    assert!(matches!(DeformationState::first_order(pres, &outside), Err(DeformError::NotFirstOrder(_))));
}

#[test]
fn plane_extension_surface() {
    let f = field();
    let (x, c, check) = plane_extension_with_section(&f, 7, 0, DEFAULT_RETRY_BUDGET).unwrap();
    assert_eq!(x.n_vars(), 16);
    assert_eq!(c.meta().genus, Some(15));
    assert_eq!(check.degrees[0].section_dim, 78);
    assert_eq!(check.degrees[0].curve_dim, 78);
    assert!(check.degrees.iter().all(|d| d.matches));
    assert!(check.not_cone);
    let again = x.spec().build(&f, DEFAULT_RETRY_BUDGET).unwrap();
    assert_eq!(*again.ideal(2).unwrap(), *x.ideal(2).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn quadric_complete_intersections_lift(n in 3usize..=5, c in 1usize..=3, seed in 0u64..1000) {
        prop_assume!(c < n);
        let f = field();
        let x = complete_intersection(&f, n, &vec![2; c], seed, DEFAULT_RETRY_BUDGET).unwrap();
        let pres = Arc::new(Presentation::unvalidated(Arc::new(x)).unwrap());
        let fo = pres.first_order_space().unwrap();
        for rep in fo.representatives.iter().take(3) {
            let s = DeformationState::first_order(pres.clone(), rep).unwrap().second_order_lift().unwrap();
            prop_assert!(s.status().terminated);
            let report = s.flatness_check(4).unwrap();
            prop_assert!(report.pass, "{:?}", report);
        }
    }
}
