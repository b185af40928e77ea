use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::catalog::{canonical_h0, with_retry, COEFF_BOUND};
use super::oracle::QuotientOracle;
use super::{Constructor, EmbeddedVariety, Extras, Metadata, VarietyError, VarietySpec};
use crate::exactalg::Field;
use crate::rings::{p1_cohomology, Polynomial, ScrollRing};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScrollCurveKind {
    Tetragonal,
    Pentagonal,
}

/// A canonical curve cut out on a rational normal scroll, with the data of
/// its presentation there.
#[derive(Clone, Debug)]
pub struct ScrollCurveData {
    pub kind: ScrollCurveKind,
    pub scroll: ScrollRing,
    pub genus: u32,
    /// Twists `a_i` of the generators: the equations lie in `|2H - a_i R|`.
    pub a: Vec<i64>,
    /// Tetragonal: the `b_i` of the two divisors. Pentagonal: `b_i = f - 2 - a_i`.
    pub b: Vec<i64>,
    /// Tetragonal: `g_1, g_2`. Pentagonal: the signed Pfaffians `(-1)^i Pf_i`.
    pub equations: Vec<Polynomial>,
    /// Pentagonal only: the skew-symmetric matrix `Ψ`.
    pub psi: Option<Vec<Vec<Polynomial>>>,
}

impl ScrollCurveData {
    pub fn f(&self) -> u32 {
        self.scroll.f()
    }
}

/// `h^i(O_X(jH + kR))` on the scroll `X = P(E)` of dimension `d`.
///
/// Only `i = 0, 1` contribute for `j >= 0`; the range `-d < j < 0` is acyclic;
/// for `j <= -d` Serre duality with `ω_X = O(-dH + (f-2)R)` applies.
pub fn scroll_cohomology(data: &ScrollCurveData, i: u32, j: i64, k: i64) -> u64 {
    scroll_h(&data.scroll, i, j, k)
}

fn scroll_h(s: &ScrollRing, i: u32, j: i64, k: i64) -> u64 {
    let d = s.rank() as i64;
    if j >= 0 {
        let (h0, h1) = p1_cohomology(&s.weights(j as u32, k));
        match i {
            0 => h0,
            1 => h1,
            _ => 0,
        }
    } else if j > -d || i as i64 > d {
        0
    } else {
        scroll_h(s, (d - i as i64) as u32, -d - j, i64::from(s.f()) - 2 - k)
    }
}

fn scroll_chi(s: &ScrollRing, j: i64, k: i64) -> i64 {
    (0..=s.rank() as u32).map(|i| (if i % 2 == 0 { 1 } else { -1 }) * scroll_h(s, i, j, k) as i64).sum()
}

/// `χ(J(3H))` from the Pfaffian resolution of the curve on its scroll.
pub fn chi_j_3h(data: &ScrollCurveData) -> i64 {
    let s = &data.scroll;
    let f = i64::from(s.f());
    let gens: i64 = data.a.iter().map(|&a| scroll_chi(s, 1, a)).sum();
    let syz: i64 = data.b.iter().map(|&b| scroll_chi(s, 0, b)).sum();
    gens - syz + scroll_chi(s, -2, f - 2)
}

fn scroll_images(s: &ScrollRing) -> Vec<Polynomial> {
    s.basis(1, 0).monomials().iter().map(|m| Polynomial::monomial(s.ring(), m.clone(), 1)).collect()
}

fn random_scroll_form(s: &ScrollRing, field: &Field, a: i32, b: i32, rng: &mut ChaCha8Rng) -> Polynomial {
    Polynomial::random_small(s.ring(), field, &[a, b], COEFF_BOUND, rng)
}

pub fn tetragonal_curve(field: &Field, e: [u32; 3], b: [u32; 2], seed: u64, budget: u32) -> Result<EmbeddedVariety, VarietyError> {
    let f: u32 = e.iter().sum();
    if e.contains(&0) {
        return Err(VarietyError::BadParameters("tetragonal scroll twists must be positive".into()));
    }
    if b[0] > b[1] || b[0] + b[1] + 2 != f {
        return Err(VarietyError::BadParameters(format!("need b1 <= b2 and b1 + b2 = f - 2 = {}", f as i64 - 2)));
    }
    with_retry(seed, budget, |s| tetragonal_attempt(field, e, b, s))
}

fn tetragonal_attempt(field: &Field, e: [u32; 3], b: [u32; 2], seed: u64) -> Result<EmbeddedVariety, VarietyError> {
    let fld = *field;
    let s = ScrollRing::new(&e)?;
    let g = s.f() + 3;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eqs: Vec<Polynomial> = b.iter().map(|&bi| random_scroll_form(&s, &fld, 2, -(bi as i32), &mut rng)).collect();
    if eqs.iter().any(Polynomial::is_zero) {
        return Err(VarietyError::Degenerate("empty divisor class".into()));
    }
    let oracle = QuotientOracle::new(fld, s.ring().clone(), scroll_images(&s), eqs.clone(), Box::new(canonical_h0(g as usize)))?;
    let spec = VarietySpec::new(Constructor::Tetragonal { e, b }, seed);
    let meta = Metadata {
        label: spec.label.clone(),
        dim: 1,
        degree: Some(2 * u64::from(g) - 2),
        genus: Some(u64::from(g)),
        canonical_curve: true,
    };
    let data = ScrollCurveData {
        kind: ScrollCurveKind::Tetragonal,
        scroll: s,
        genus: g,
        a: b.iter().map(|&x| i64::from(x)).collect(),
        b: b.iter().map(|&x| i64::from(x)).collect(),
        equations: eqs,
        psi: None,
    };
    let x = EmbeddedVariety::new(fld, spec, meta, g as usize, Box::new(oracle))
        .with_extras(Extras::ScrollCurve(Box::new(data)));
    x.check_hilbert(0..=5)?;
    spot_check_or_degenerate(&x, seed)?;
    Ok(x)
}

/// The default balanced pentagonal data for a genus.
pub fn pentagonal_defaults(g: u32) -> Option<([u32; 4], [u32; 5])> {
    match g {
        8 => Some(([1, 1, 1, 1], [1, 1, 1, 1, 2])),
        9 => Some(([2, 1, 1, 1], [1, 2, 2, 2, 2])),
        _ => None,
    }
}

fn pentagonal_twists(e: [u32; 4], b: [u32; 5]) -> Result<(u32, Vec<i64>), VarietyError> {
    if e.contains(&0) {
        return Err(VarietyError::BadParameters("pentagonal scroll twists must be positive".into()));
    }
    let f: u32 = e.iter().sum();
    let g = f + 4;
    if g == 10 || g == 15 {
        return Err(VarietyError::Unsupported(format!("pentagonal genus {g} is not covered by the catalog")));
    }
    let a: Vec<i64> = b.iter().map(|&bi| i64::from(f) - 2 - i64::from(bi)).collect();
    if a.iter().any(|&ai| ai < 0) {
        return Err(VarietyError::BadParameters("need a_i = f - 2 - b_i >= 0".into()));
    }
    if a.iter().sum::<i64>() != 2 * i64::from(g) - 12 {
        return Err(VarietyError::BadParameters(format!("need sum a_i = 2g - 12 = {}", 2 * g as i64 - 12)));
    }
    for &ei in &e {
        for (j, &bj) in b.iter().enumerate() {
            for (k, &ak) in a.iter().enumerate() {
                if j != k && i64::from(ei) < i64::from(bj) - ak {
                    return Err(VarietyError::BadParameters("global generation e_i >= b_j - a_k fails".into()));
                }
            }
        }
    }
    Ok((g, a))
}

pub fn pentagonal_curve(field: &Field, e: [u32; 4], b: [u32; 5], seed: u64, budget: u32) -> Result<EmbeddedVariety, VarietyError> {
    pentagonal_twists(e, b)?;
    with_retry(seed, budget, |s| {
        let sr = ScrollRing::new(&e)?;
        let (_, a) = pentagonal_twists(e, b)?;
        let f = i64::from(sr.f());
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let zero = Polynomial::zero(sr.ring());
        let mut psi = vec![vec![zero; 5]; 5];
        for j in 0..5 {
            for k in j + 1..5 {
                let twist = a[j] + a[k] - (f - 2);
                let entry = random_scroll_form(&sr, field, 1, twist as i32, &mut rng);
                psi[k][j] = entry.scale(field, field.neg(1));
                psi[j][k] = entry;
            }
        }
        pentagonal_from_matrix(field, e, b, psi, s)
    })
}

/// Signed Pfaffians `(-1)^i Pf(Ψ without row and column i)`.
pub fn signed_pfaffians(field: &Field, psi: &[Vec<Polynomial>]) -> Result<Vec<Polynomial>, VarietyError> {
    let mut out = Vec::with_capacity(5);
    for i in 0..5 {
        let idx: Vec<usize> = (0..5).filter(|&x| x != i).collect();
        let (p, q, r, s) = (idx[0], idx[1], idx[2], idx[3]);
        let t1 = psi[p][q].mul(field, &psi[r][s])?;
        let t2 = psi[p][r].mul(field, &psi[q][s])?;
        let t3 = psi[p][s].mul(field, &psi[q][r])?;
        let pf = t1.sub(field, &t2)?.add(field, &t3)?;
        out.push(if i % 2 == 0 { pf } else { pf.scale(field, field.neg(1)) });
    }
    Ok(out)
}

/// Builds the Pfaffian curve of a given skew matrix on the scroll `X(e)`.
pub fn pentagonal_from_matrix(
    field: &Field,
    e: [u32; 4],
    b: [u32; 5],
    psi: Vec<Vec<Polynomial>>,
    seed: u64,
) -> Result<EmbeddedVariety, VarietyError> {
    let fld = *field;
    let (g, a) = pentagonal_twists(e, b)?;
    let s = ScrollRing::new(&e)?;
    let pfs = signed_pfaffians(&fld, &psi)?;
    if pfs.iter().any(Polynomial::is_zero) {
        return Err(VarietyError::Degenerate("a Pfaffian vanishes identically".into()));
    }
    let oracle = QuotientOracle::new(fld, s.ring().clone(), scroll_images(&s), pfs.clone(), Box::new(canonical_h0(g as usize)))?;
    let spec = VarietySpec::new(Constructor::Pentagonal { e, b }, seed);
    let meta = Metadata {
        label: spec.label.clone(),
        dim: 1,
        degree: Some(2 * u64::from(g) - 2),
        genus: Some(u64::from(g)),
        canonical_curve: true,
    };
    let data = ScrollCurveData {
        kind: ScrollCurveKind::Pentagonal,
        scroll: s,
        genus: g,
        a,
        b: b.iter().map(|&x| i64::from(x)).collect(),
        equations: pfs,
        psi: Some(psi),
    };
    let x = EmbeddedVariety::new(fld, spec, meta, g as usize, Box::new(oracle))
        .with_extras(Extras::ScrollCurve(Box::new(data)));
    x.check_hilbert(0..=5)?;
    spot_check_or_degenerate(&x, seed)?;
    Ok(x)
}

fn spot_check_or_degenerate(x: &EmbeddedVariety, seed: u64) -> Result<(), VarietyError> {
    match super::points::smoothness_spot_check(x, 3, seed) {
        Ok(super::SmoothnessVerdict::Pass) => Ok(()),
        Ok(super::SmoothnessVerdict::Fail { .. }) => Err(VarietyError::Degenerate("singular point found".into())),
        Err(VarietyError::NoPointsFound) => Ok(()),
        Err(e) => Err(e),
    }
}
