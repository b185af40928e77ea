use conormal_core::exactalg::{Field, DEFAULT_PRIME};
use conormal_core::rings::{GradedRing, Polynomial};
use conormal_core::varieties::{
    chi_j_3h, complete_intersection, find_points, gorenstein_points5, grassmannian_g25, hypersurface_from,
    jacobian_rank_at, pentagonal_curve, pentagonal_defaults, pentagonal_from_matrix, plane_curve_canonical,
    scroll, scroll_cohomology, segre, signed_pfaffians, smoothness_at_points, smoothness_spot_check,
    tetragonal_curve, veronese, Constructor, Realization, SmoothnessVerdict, VarietyError, VarietySpec,
    DEFAULT_RETRY_BUDGET,
};

fn field() -> Field {
    Field::new(DEFAULT_PRIME)
}

#[test]
fn veronese_quadric_counts() {
    let f = field();
    assert_eq!(veronese(&f, 1, 2).unwrap().dim_i(2).unwrap(), 1);
    let cubic = veronese(&f, 1, 3).unwrap();
    assert_eq!(cubic.dim_i(2).unwrap(), 3);
    assert_eq!(cubic.dim_i(1).unwrap(), 0);
    assert_eq!(veronese(&f, 2, 2).unwrap().dim_i(2).unwrap(), 6);
}

#[test]
fn segre_minor_counts() {
    let f = field();
    assert_eq!(segre(&f, 1, 1).unwrap().dim_i(2).unwrap(), 1);
    assert_eq!(segre(&f, 1, 2).unwrap().dim_i(2).unwrap(), 3);
    assert_eq!(segre(&f, 2, 2).unwrap().dim_i(2).unwrap(), 9);
}

#[test]
fn scroll_pieces() {
    let f = field();
    let q = scroll(&f, &[1, 1]).unwrap();
    assert_eq!(q.n_vars(), 4);
    assert_eq!(q.dim_i(2).unwrap(), 1);
    assert_eq!(scroll(&f, &[2, 1]).unwrap().dim_i(2).unwrap(), 3);
    let s = scroll(&f, &[2, 2, 1]).unwrap();
    assert_eq!(s.n_vars(), 8);
    // h^0(S^2 E) for E = O(2) + O(2) + O(1): weights 4,4,3,4,3,2 give 5+5+4+5+4+3.
    assert_eq!(s.dim_a(2).unwrap(), 26);
}

#[test]
fn complete_intersections() {
    let f = field();
    let c4 = complete_intersection(&f, 3, &[2, 3], 1, DEFAULT_RETRY_BUDGET).unwrap();
    assert_eq!(c4.dim_i(2).unwrap(), 1);
    assert_eq!(c4.dim_i(3).unwrap(), 5);
    assert_eq!(c4.meta().genus, Some(4));
    let c5 = complete_intersection(&f, 4, &[2, 2, 2], 1, DEFAULT_RETRY_BUDGET).unwrap();
    assert_eq!(c5.dim_i(2).unwrap(), 3);
    let septic = complete_intersection(&f, 2, &[7], 1, DEFAULT_RETRY_BUDGET).unwrap();
    assert_eq!(septic.dim_a(7).unwrap(), 36 - 1);
}

#[test]
fn complete_intersection_parameters() {
    let f = field();
    assert!(matches!(complete_intersection(&f, 3, &[], 0, 8), Err(VarietyError::BadParameters(_))));
    assert!(matches!(complete_intersection(&f, 3, &[1, 2], 0, 8), Err(VarietyError::BadParameters(_))));
}

#[test]
fn plane_canonical_curves() {
    let f = field();
    let c = plane_curve_canonical(&f, 5, 3, DEFAULT_RETRY_BUDGET).unwrap();
    assert_eq!(c.n_vars(), 6);
    assert_eq!(c.dim_i(2).unwrap(), 6);
    let c7 = plane_curve_canonical(&f, 7, 3, DEFAULT_RETRY_BUDGET).unwrap();
    assert_eq!(c7.dim_a(1).unwrap(), 15);
    assert_eq!(c7.dim_a(2).unwrap(), 42);
    assert_eq!(c7.dim_i(2).unwrap(), 78);
}

#[test]
fn tetragonal_instances() {
    let f = field();
    let c = tetragonal_curve(&f, [2, 1, 1], [1, 1], 5, DEFAULT_RETRY_BUDGET).unwrap();
    assert_eq!(c.meta().genus, Some(7));
    assert_eq!(c.n_vars(), 7);
    assert_eq!(c.dim_a(2).unwrap(), 18);
    let c8 = tetragonal_curve(&f, [2, 2, 1], [1, 2], 5, DEFAULT_RETRY_BUDGET).unwrap();
    assert_eq!(c8.meta().genus, Some(8));
    assert_eq!(c8.dim_i(2).unwrap(), 15);
    let c0 = tetragonal_curve(&f, [2, 1, 1], [0, 2], 5, DEFAULT_RETRY_BUDGET).unwrap();
    assert_eq!(c0.meta().genus, Some(7));
    for k in 2..=5u32 {
        assert_eq!(c0.dim_a(k).unwrap(), (2 * k as usize - 1) * 6);
    }
    assert!(matches!(
        tetragonal_curve(&f, [2, 1, 1], [1, 2], 0, 8),
        Err(VarietyError::BadParameters(_))
    ));
}

#[test]
fn pentagonal_instances_and_cohomology() {
    let f = field();
    for g in [8u32, 9] {
        let (e, b) = pentagonal_defaults(g).unwrap();
        let c = pentagonal_curve(&f, e, b, 11, DEFAULT_RETRY_BUDGET).unwrap();
        assert_eq!(c.meta().genus, Some(u64::from(g)));
        let data = c.scroll_curve().unwrap();
        assert_eq!(scroll_cohomology(data, 0, 1, 0), u64::from(g));
        for i in 0..=4 {
            assert_eq!(scroll_cohomology(data, i, -2, 0), 0);
        }
        assert_eq!(chi_j_3h(data), 10 * i64::from(g) - 35);
        // The signed Pfaffian vector is a syzygy of the rows of the matrix.
        let psi = data.psi.as_ref().unwrap();
        for row in psi {
            let mut acc = Polynomial::zero(data.scroll.ring());
            for (entry, pf) in row.iter().zip(&data.equations) {
                acc = acc.add(&f, &entry.mul(&f, pf).unwrap()).unwrap();
            }
            assert!(acc.is_zero());
        }
    }
}

#[test]
fn pentagonal_unsupported_and_degenerate() {
    let f = field();
    // f = 6 gives g = 10.
    assert!(matches!(
        pentagonal_curve(&f, [2, 2, 1, 1], [2, 2, 2, 2, 2], 0, 8),
        Err(VarietyError::Unsupported(_))
    ));
    let (e, b) = pentagonal_defaults(8).unwrap();
    let c = pentagonal_curve(&f, e, b, 1, 8).unwrap();
    let mut psi = c.scroll_curve().unwrap().psi.clone().unwrap();
    let zero = Polynomial::zero(c.scroll_curve().unwrap().scroll.ring());
    for j in 1..5 {
        psi[0][j] = zero.clone();
        psi[j][0] = zero.clone();
    }
    assert!(signed_pfaffians(&f, &psi).is_ok());
    assert!(matches!(pentagonal_from_matrix(&f, e, b, psi, 1), Err(VarietyError::Degenerate(_))));
}

#[test]
fn grassmannian_realizations_agree() {
    let f = field();
    let sym = grassmannian_g25(&f, Realization::Symbolic, 0).unwrap();
    let pts = grassmannian_g25(&f, Realization::Points, 0).unwrap();
    assert_eq!(sym.dim_a(1).unwrap(), 10);
    assert_eq!(sym.dim_a(2).unwrap(), 50);
    assert_eq!(sym.dim_i(2).unwrap(), 5);
    for k in 1..=4 {
        assert_eq!(*sym.ideal(k).unwrap(), *pts.ideal(k).unwrap(), "degree {k}");
    }
}

#[test]
fn twisted_cubic_realizations_agree() {
    let f = field();
    let sym = veronese(&f, 1, 3).unwrap();
    let spec = VarietySpec::new(Constructor::Veronese { n: 1, r: 3 }, 0);
    assert_eq!(spec.build(&f, 8).unwrap().dim_i(2).unwrap(), 3);
    // Interpolation through sampled points of the same curve.
    use conormal_core::varieties::{PointsOracle, SectionOracle};
    let sampler = sym.sampler().unwrap();
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(3);
    let points: Vec<Vec<u32>> = (0..60).map(|_| sampler(&mut rng).unwrap()).collect();
    let oracle = PointsOracle::fixed(f, 4, points, Box::new(|k| Some(3 * k as usize + 1)));
    for k in 1..=4u32 {
        let a = oracle.row_space(&f, k).unwrap();
        assert_eq!(a.dim(), 3 * k as usize + 1);
        let c = sym.coord(k).unwrap();
        assert_eq!(a.pivot_cols().iter().map(|&x| x as u32).collect::<Vec<_>>(), c.standard());
    }
}

#[test]
fn five_points() {
    let f = field();
    let x = gorenstein_points5(&f, 0, DEFAULT_RETRY_BUDGET).unwrap();
    assert_eq!(x.dim_i(1).unwrap(), 0);
    assert_eq!(x.dim_i(2).unwrap(), 5);
    for k in 2..=4 {
        assert_eq!(x.dim_a(k).unwrap(), 5);
    }
    assert_eq!(smoothness_spot_check(&x, 5, 1).unwrap(), SmoothnessVerdict::Pass);
}

#[test]
fn spot_checks() {
    let f = field();
    let tc = veronese(&f, 1, 3).unwrap();
    let pts = find_points(&tc, 10, 0).unwrap();
    assert_eq!(pts.len(), 10);
    for p in &pts {
        assert_eq!(jacobian_rank_at(&tc, p).unwrap(), 2);
    }
    assert_eq!(smoothness_spot_check(&tc, 10, 0).unwrap(), SmoothnessVerdict::Pass);

    // Without a sampler the points come from linear sections.
    let c4 = complete_intersection(&f, 3, &[2, 3], 2, DEFAULT_RETRY_BUDGET).unwrap();
    assert_eq!(smoothness_spot_check(&c4, 3, 0).unwrap(), SmoothnessVerdict::Pass);
}

#[test]
fn nodal_cone_fails_at_the_vertex_line() {
    let f = field();
    let ring = GradedRing::standard(4, "z");
    let (x, y, z) = (Polynomial::var(&ring, 0), Polynomial::var(&ring, 1), Polynomial::var(&ring, 2));
    let y2z = y.pow(&f, 2).mul(&f, &z).unwrap();
    let x2 = x.pow(&f, 2);
    let form = y2z.sub(&f, &x2.mul(&f, &x.add(&f, &z).unwrap()).unwrap()).unwrap();
    let cone = hypersurface_from(&f, vec![form], "nodal-cone").unwrap();
    let node = vec![0, 0, 1, 0];
    assert_eq!(jacobian_rank_at(&cone, &node).unwrap(), 0);
    assert!(matches!(
        smoothness_at_points(&cone, &[node]).unwrap(),
        SmoothnessVerdict::Fail { rank: 0, codim: 1, .. }
    ));
}

#[test]
fn spec_json_roundtrip() {
    let spec = VarietySpec::new(Constructor::Tetragonal { e: [2, 2, 1], b: [1, 2] }, 42);
    let text = serde_json::to_string(&spec).unwrap();
    let back: VarietySpec = serde_json::from_str(&text).unwrap();
    assert_eq!(spec, back);
    assert_eq!(serde_json::to_string(&back).unwrap(), text);
}
