use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::exactalg::{EchelonBuilder, Field, SparseVec, Subspace};
use crate::rings::{Monomial, Polynomial};
use crate::varieties::{
    plane_curve_canonical, with_retry, Constructor, EmbeddedVariety, Extras, Metadata, PointsOracle, Sampler,
    VarietyError, VarietySpec, COEFF_BOUND,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionDegree {
    pub degree: u32,
    /// `dim` of the image of `I_{X,k}` under `t = 0`.
    pub section_dim: usize,
    pub curve_dim: usize,
    pub matches: bool,
}

/// How the surface meets the hyperplane `t = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionCheck {
    pub degrees: Vec<SectionDegree>,
    /// `dim I_{X,2}` against the quadrics of the cone over `C`.
    pub surface_quadrics: usize,
    pub cone_quadrics: usize,
    pub not_cone: bool,
}

/// The surface swept out by the degree-`d` plane curves through `C ∩ D` for a
/// random cubic `D`, in coordinates `(D m_0, ..., D m_{g-1}, F)` where the
/// `m_i` are the monomials of degree `d - 3` and `F` is the equation of `C`.
pub fn plane_curve_extension(field: &Field, d: u32, seed: u64, budget: u32) -> Result<EmbeddedVariety, VarietyError> {
    plane_extension_with_section(field, d, seed, budget).map(|(x, _, _)| x)
}

/// The surface, the canonical curve it extends and the section comparison.
pub fn plane_extension_with_section(
    field: &Field,
    d: u32,
    seed: u64,
    budget: u32,
) -> Result<(EmbeddedVariety, EmbeddedVariety, SectionCheck), VarietyError> {
    if d < 7 {
        return Err(VarietyError::BadParameters("plane extensions need d >= 7".into()));
    }
    let c = plane_curve_canonical(field, d, seed, budget)?;
    let form = match c.extras() {
        Extras::PlaneCurve { form } => form.clone(),
        _ => return Err(VarietyError::Degenerate("plane curve without its equation".into())),
    };
    let inner = c.spec().seed;
    let (x, check) = with_retry(inner, budget, |s| extension_attempt(field, d, seed, s, &form, &c))?;
    Ok((x, c, check))
}

fn extension_attempt(
    field: &Field,
    d: u32,
    seed: u64,
    inner: u64,
    form: &Polynomial,
    c: &EmbeddedVariety,
) -> Result<(EmbeddedVariety, SectionCheck), VarietyError> {
    let f = *field;
    let plane = form.ring().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(inner ^ 0x00c0_b1c5);
    let cubic = Polynomial::random_small(&plane, &f, &[3], COEFF_BOUND, &mut rng);
    let mut images = Vec::new();
    for m in plane.basis(d as i32 - 3).monomials() {
        images.push(cubic.mul(&f, &Polynomial::monomial(&plane, m.clone(), 1))?);
    }
    images.push(form.clone());
    let g = images.len() - 1;
    let pd = plane.basis(d as i32);
    let mut b = EchelonBuilder::new(f, pd.len());
    for p in &images {
        b.push_sparse(&p.to_sparse(&pd)?);
    }
    if b.rank() != g + 1 {
        return Err(VarietyError::Degenerate(format!("forms through C ∩ D span {} dimensions, not {}", b.rank(), g + 1)));
    }
    let sampler = || -> Sampler {
        let images = images.clone();
        Box::new(move |rng: &mut ChaCha8Rng| {
            let p: Vec<u32> = (0..3).map(|_| rng.gen_range(0..f.p()) as u32).collect();
            let v: Vec<u32> = images.iter().map(|q| q.eval(&f, &p)).collect();
            v.iter().any(|&c| c != 0).then_some(v)
        })
    };
    let spec = VarietySpec::new(Constructor::PlaneExtension { d }, seed);
    let meta = Metadata {
        label: spec.label.clone(),
        dim: 2,
        degree: Some(2 * g as u64 - 2),
        genus: None,
        canonical_curve: false,
    };
    let oracle = PointsOracle::sampled(f, g + 1, inner, sampler(), Box::new(|_| None));
    let x = EmbeddedVariety::new(f, spec, meta, g + 1, Box::new(oracle)).with_sampler(sampler());
    let check = section_check(&x, c)?;
    if check.degrees.iter().any(|s| !s.matches) {
        return Err(VarietyError::Degenerate("hyperplane section differs from the canonical curve".into()));
    }
    if !check.not_cone {
        return Err(VarietyError::Degenerate("the surface is a cone over the curve".into()));
    }
    Ok((x, check))
}

/// Restricts `I_{X,k}` to `t = 0` (the last variable) and compares with `I_{C,k}`.
fn section_check(x: &EmbeddedVariety, c: &EmbeddedVariety) -> Result<SectionCheck, VarietyError> {
    let f = *x.field();
    let n = x.n_vars();
    let mut degrees = Vec::new();
    for k in 2..=3u32 {
        let (xb, cb) = (x.ring().basis(k as i32), c.ring().basis(k as i32));
        let restrict = |v: &SparseVec| {
            let pairs = v
                .iter()
                .filter_map(|(mu, a)| {
                    let e = xb.get(mu).exps();
                    (e[n - 1] == 0).then(|| {
                        let m = Monomial(e[..n - 1].to_vec().into_boxed_slice());
                        (cb.index_of(&m).expect("same degree") as u32, a)
                    })
                })
                .collect();
            SparseVec::from_pairs(&f, pairs)
        };
        let rows: Vec<SparseVec> = x.ideal(k)?.rows().iter().map(|r| restrict(&r.to_sparse())).collect();
        let section = Subspace::span_sparse(&f, cb.len(), rows.iter());
        let curve = c.ideal(k)?;
        degrees.push(SectionDegree {
            degree: k,
            section_dim: section.dim(),
            curve_dim: curve.dim(),
            matches: section == *curve,
        });
    }
    let (xb, cb) = (x.ring().basis(2), c.ring().basis(2));
    let cone_rows: Vec<SparseVec> = c
        .ideal(2)?
        .rows()
        .iter()
        .map(|r| {
            let pairs = r
                .to_sparse()
                .iter()
                .map(|(mu, a)| {
                    let mut e = cb.get(mu).exps().to_vec();
                    e.push(0);
                    (xb.index_of(&Monomial(e.into_boxed_slice())).expect("same degree") as u32, a)
                })
                .collect();
            SparseVec::from_pairs(&f, pairs)
        })
        .collect();
    let cone = Subspace::span_sparse(&f, xb.len(), cone_rows.iter());
    let surface = x.ideal(2)?;
    Ok(SectionCheck {
        degrees,
        surface_quadrics: surface.dim(),
        cone_quadrics: cone.dim(),
        not_cone: *surface != cone,
    })
}
