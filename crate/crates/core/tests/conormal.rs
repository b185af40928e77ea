use std::sync::Arc;

use conormal_core::conormal::{Conormal, SaturationConfig, StarVerdict};
use conormal_core::exactalg::{Field, SparseVec, DEFAULT_PRIME};
use conormal_core::varieties::{
    complete_intersection, gorenstein_points5, grassmannian_g25, hypersurface_from, scroll, tetragonal_curve, veronese,
    EmbeddedVariety, Realization, DEFAULT_RETRY_BUDGET,
};

fn field() -> Field {
    Field::new(DEFAULT_PRIME)
}

fn engine(x: EmbeddedVariety) -> Conormal {
    Conormal::new(Arc::new(x), SaturationConfig::default()).unwrap()
}

#[test]
fn ideal_pieces_and_generators() {
    let f = field();
    let tc = engine(veronese(&f, 1, 3).unwrap());
    assert_eq!(tc.ideal_piece(2).unwrap().dim(), 3);
    assert_eq!(tc.ideal_piece(1).unwrap().dim(), 0);

    let c4 = engine(complete_intersection(&f, 3, &[2, 3], 0, DEFAULT_RETRY_BUDGET).unwrap());
    let gens = c4.minimal_generators(3).unwrap();
    let shape: Vec<(u32, usize)> = gens.iter().map(|(d, g)| (*d, g.len())).collect();
    assert_eq!(shape, vec![(2, 1), (3, 1)]);
    let np = c4.normal_presentation_check(4).unwrap();
    assert!(!np.quadratic_generation);

    let v22 = engine(veronese(&f, 2, 2).unwrap());
    let shape: Vec<(u32, usize)> = v22.minimal_generators(3).unwrap().iter().map(|(d, g)| (*d, g.len())).collect();
    assert_eq!(shape, vec![(2, 6)]);
    let np = v22.normal_presentation_check(4).unwrap();
    assert!(np.quadratic_generation && np.linear_syzygies);

    let g25 = engine(grassmannian_g25(&f, Realization::Symbolic, 0).unwrap());
    let shape: Vec<(u32, usize)> = g25.minimal_generators(3).unwrap().iter().map(|(d, g)| (*d, g.len())).collect();
    assert_eq!(shape, vec![(2, 5)]);
}

#[test]
fn betti_certificate_agrees_with_direct_generators() {
    let f = field();
    let c4 = engine(complete_intersection(&f, 3, &[2, 3], 0, DEFAULT_RETRY_BUDGET).unwrap());
    let red = c4.artinian_reduction().unwrap();
    assert!(red.certified());
    assert_eq!(red.hilbert_function(), &[1, 2, 2, 1, 0]);
    assert_eq!(red.betti(&f, 1, 2), 1);
    assert_eq!(red.betti(&f, 1, 3), 1);
    assert_eq!(red.betti(&f, 2, 5), 1);
    assert_eq!(red.betti(&f, 2, 4), 0);
}

#[test]
fn r1_kernels() {
    let f = field();
    let q = engine(scroll(&f, &[1, 1]).unwrap());
    assert_eq!(q.r1_kernel(1, 1).unwrap().dim(), 7);
    assert_eq!(q.r1_kernel(0, 2).unwrap().dim(), 0);
    let tc = engine(veronese(&f, 1, 3).unwrap());
    assert_eq!(tc.r1_kernel(1, 1).unwrap().dim(), 9);
}

#[test]
fn euler_spaces() {
    let f = field();
    let q = engine(scroll(&f, &[1, 1]).unwrap());
    for k in 1..=4 {
        q.euler_space(k).unwrap();
    }
    assert_eq!(q.euler_space(1).unwrap().m.dim(), 0);
    let pts = engine(gorenstein_points5(&f, 0, DEFAULT_RETRY_BUDGET).unwrap());
    assert_eq!(pts.euler_space(3).unwrap().m.dim(), 15);
}

#[test]
fn euler_relation_holds_on_all_pieces() {
    let f = field();
    let tc = engine(veronese(&f, 1, 3).unwrap());
    for k in 2..=4 {
        let piece = tc.conormal_saturation(k).unwrap();
        for space in [&piece.n, &piece.sat] {
            for r in space.rows() {
                assert!(tc.euler_contraction(k, &r.to_sparse()).unwrap().is_zero());
            }
        }
        for r in tc.r1_kernel(1, k - 1).unwrap().rows() {
            let img = tc.gaussian_to_euler(k, &r.to_sparse()).unwrap();
            assert!(tc.euler_contraction(k, &img).unwrap().is_zero());
        }
        assert!(tc.gaussian_to_euler(k, &SparseVec::new()).unwrap().is_zero());
    }
}

#[test]
fn jacobian_submodule_equals_the_image_of_the_ideal() {
    let f = field();
    for x in [veronese(&f, 1, 3).unwrap(), scroll(&f, &[2, 1]).unwrap(), gorenstein_points5(&f, 0, 8).unwrap()] {
        let e = engine(x);
        for k in 2..=4 {
            assert_eq!(*e.jacobian_piece(k).unwrap(), e.ideal_jacobian_span(k).unwrap(), "degree {k}");
        }
        // Quadrics viewed as symmetric tensors map to their differentials.
        let quads = e.ideal_piece(2).unwrap();
        let mut images = Vec::new();
        for r in quads.rows() {
            let t = e.symmetric_tensor(2, &r.to_sparse()).unwrap();
            assert!(e.r1_kernel(1, 1).unwrap().contains_sparse(&f, &t).unwrap());
            images.push(e.gaussian_to_euler(2, &t).unwrap());
        }
        let span = conormal_core::exactalg::Subspace::span_sparse(&f, e.w_dim(2).unwrap(), images.iter());
        assert_eq!(span, *e.jacobian_piece(2).unwrap());
    }
}

#[test]
fn complete_intersections_have_no_torsion() {
    let f = field();
    let c4 = engine(complete_intersection(&f, 3, &[2, 3], 0, DEFAULT_RETRY_BUDGET).unwrap());
    for k in 0..=5 {
        let p = c4.conormal_saturation(k).unwrap();
        assert_eq!(p.h1(), 0, "degree {k}");
    }
    assert_eq!(c4.gaussian_wedge_kernel().unwrap().dim(), 0);
    let t = c4.t_profiles(3).unwrap();
    assert!(t.t2.values().all(|&d| d == 0));
    let c5 = engine(complete_intersection(&f, 4, &[2, 2, 2], 0, DEFAULT_RETRY_BUDGET).unwrap());
    assert_eq!(c5.quadric_jacobian_coker(1).unwrap(), 0);
    for k in 0..=6 {
        assert_eq!(c5.h1_ideal_square(k).unwrap().value, 0, "degree {k}");
    }
}

#[test]
fn five_points_saturate_to_everything() {
    let f = field();
    let pts = engine(gorenstein_points5(&f, 0, DEFAULT_RETRY_BUDGET).unwrap());
    for k in 3..=4 {
        let p = pts.conormal_saturation(k).unwrap();
        assert_eq!(p.h1(), 0);
        assert_eq!(*p.sat, *pts.euler_space(k).unwrap().m);
    }
}

#[test]
fn rational_normal_curves_and_the_quadric() {
    let f = field();
    for (r, want) in [(3usize, 1usize), (4, 3), (5, 6)] {
        let e = engine(veronese(&f, 1, r).unwrap());
        assert_eq!(e.gaussian_wedge_kernel().unwrap().dim(), want);
        assert_eq!(e.h1_ideal_square(2).unwrap().value, want);
        let star = e.star_check(6).unwrap();
        assert_eq!(star.verdict, StarVerdict::Holds);
    }
    let tc = engine(veronese(&f, 1, 3).unwrap());
    assert_eq!(tc.quadric_jacobian_coker(1).unwrap(), 0);
    let q = engine(scroll(&f, &[1, 1]).unwrap());
    assert_eq!(q.gaussian_wedge_kernel().unwrap().dim(), 0);
}

#[test]
fn tetragonal_h1_in_degree_three() {
    let f = field();
    for (e, b, want) in [([2, 1, 1], [1, 1], 0usize), ([2, 2, 1], [1, 2], 1), ([2, 1, 1], [0, 2], 2)] {
        let x = engine(tetragonal_curve(&f, e, b, 0, DEFAULT_RETRY_BUDGET).unwrap());
        let h = x.h1_ideal_square(3).unwrap();
        assert_eq!(h.value, want, "{e:?} {b:?}");
        assert!(!h.unlucky_prime);
        if want > 0 {
            assert_eq!(h.primes.len(), 2);
        }
        for k in 4..=5 {
            assert_eq!(x.h1_ideal_square(k).unwrap().value, 0);
        }
    }
}

#[test]
fn tetragonal_quadric_coker_matches() {
    let f = field();
    let x = engine(tetragonal_curve(&f, [2, 2, 1], [1, 2], 0, DEFAULT_RETRY_BUDGET).unwrap());
    assert_eq!(x.quadric_jacobian_coker(1).unwrap(), 1);
}

#[test]
fn hypersurfaces_rebuild_under_the_confirmation_prime() {
    let f = field();
    let x = veronese(&f, 1, 2).unwrap();
    let form = x.ideal_polys(2).unwrap().remove(0);
    let conic = hypersurface_from(&f, vec![form], "conic").unwrap();
    assert!(conic.is_adhoc());
    let other = conic.rebuild(&Field::new(1_073_741_783), 8).unwrap();
    assert_eq!(other.dim_i(2).unwrap(), 1);
}
