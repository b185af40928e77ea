use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::oracle::{PointsOracle, QuotientOracle, Realization, Sampler};
use super::{univariate, Constructor, EmbeddedVariety, Extras, Metadata, VarietyError, VarietySpec};
use crate::exactalg::{EchelonBuilder, Field, SparseVec};
use crate::rings::{binomial, p1_cohomology, GradedRing, Polynomial, ScrollRing, Variable};

pub const DEFAULT_RETRY_BUDGET: u32 = 8;

/// Bound on the absolute value of random integer coefficients.
pub(crate) const COEFF_BOUND: i64 = 50;

/// Runs `attempt` on `seed, seed + 1, ...` until it returns something other
/// than a degenerate-instance error, at most `budget` times.
pub fn with_retry<T>(
    seed: u64,
    budget: u32,
    mut attempt: impl FnMut(u64) -> Result<T, VarietyError>,
) -> Result<T, VarietyError> {
    let mut last = VarietyError::Degenerate("retry budget is zero".into());
    for i in 0..u64::from(budget.max(1)) {
        match attempt(seed.wrapping_add(i)) {
            Err(e @ VarietyError::Degenerate(_)) => last = e,
            other => return other,
        }
    }
    Err(last)
}

pub(crate) fn canonical_h0(g: usize) -> impl Fn(u32) -> Option<usize> + Send + Sync {
    move |k| {
        Some(match k {
            0 => 1,
            1 => g,
            _ => (2 * k as usize - 1) * (g - 1),
        })
    }
}

/// Hilbert function of `P^n / (f_1, ..., f_c)` for a regular sequence of the
/// given degrees.
pub(crate) fn koszul_h0(n: usize, degrees: &[u32]) -> impl Fn(u32) -> Option<usize> + Send + Sync {
    let mut num: Vec<i64> = vec![1];
    for &d in degrees {
        let mut next = vec![0i64; num.len() + d as usize];
        for (i, &c) in num.iter().enumerate() {
            next[i] += c;
            next[i + d as usize] -= c;
        }
        num = next;
    }
    move |k| {
        let mut s: i64 = 0;
        for (j, &c) in num.iter().enumerate() {
            if j as u32 <= k {
                s += c * binomial(k as usize - j + n, n) as i64;
            }
        }
        Some(s as usize)
    }
}

fn random_point<R: Rng>(field: &Field, rng: &mut R, n: usize) -> Vec<u32> {
    (0..n).map(|_| rng.gen_range(0..field.p()) as u32).collect()
}

pub fn veronese(field: &Field, n: usize, r: usize) -> Result<EmbeddedVariety, VarietyError> {
    if n < 1 || r < 1 {
        return Err(VarietyError::BadParameters("veronese needs n >= 1 and r >= 1".into()));
    }
    let f = *field;
    let t = GradedRing::standard(n + 1, "x");
    let basis = t.basis(r as i32);
    let images: Vec<Polynomial> = basis.monomials().iter().map(|m| Polynomial::monomial(&t, m.clone(), 1)).collect();
    let n_vars = images.len();
    let oracle = QuotientOracle::new(f, t.clone(), images, Vec::new(), Box::new(move |k| {
        Some(binomial(n + r * k as usize, n))
    }))?;
    let spec = VarietySpec::new(Constructor::Veronese { n, r }, 0);
    let meta = Metadata {
        label: spec.label.clone(),
        dim: n,
        degree: Some((r as u64).pow(n as u32)),
        genus: (n == 1).then_some(0),
        canonical_curve: false,
    };
    let sampler: Sampler = Box::new(move |rng| {
        let x = random_point(&f, rng, n + 1);
        Some(t.monomial_values(&f, r as i32, &x))
    });
    let x = EmbeddedVariety::new(f, spec, meta, n_vars, Box::new(oracle)).with_sampler(sampler);
    x.check_hilbert(0..=2)?;
    Ok(x)
}

pub fn segre(field: &Field, n: usize, m: usize) -> Result<EmbeddedVariety, VarietyError> {
    if n < 1 || m < 1 {
        return Err(VarietyError::BadParameters("segre needs n, m >= 1".into()));
    }
    let f = *field;
    let mut vars: Vec<Variable> = (0..=n).map(|i| Variable { name: format!("x{i}"), degree: vec![1, 0] }).collect();
    vars.extend((0..=m).map(|j| Variable { name: format!("y{j}"), degree: vec![0, 1] }));
    let t = GradedRing::new(vars)?;
    let mut images = Vec::new();
    for i in 0..=n {
        for j in 0..=m {
            images.push(Polynomial::var(&t, i).mul(&f, &Polynomial::var(&t, n + 1 + j))?);
        }
    }
    let n_vars = images.len();
    let oracle = QuotientOracle::new(f, t, images, Vec::new(), Box::new(move |k| {
        Some(binomial(n + k as usize, n) * binomial(m + k as usize, m))
    }))?;
    let spec = VarietySpec::new(Constructor::Segre { n, m }, 0);
    let meta = Metadata {
        label: spec.label.clone(),
        dim: n + m,
        degree: Some(binomial(n + m, n) as u64),
        genus: None,
        canonical_curve: false,
    };
    let sampler: Sampler = Box::new(move |rng| {
        let x = random_point(&f, rng, n + 1);
        let y = random_point(&f, rng, m + 1);
        Some(x.iter().flat_map(|&a| y.iter().map(move |&b| f.mul(a, b))).collect())
    });
    let x = EmbeddedVariety::new(f, spec, meta, n_vars, Box::new(oracle)).with_sampler(sampler);
    x.check_hilbert(0..=2)?;
    Ok(x)
}

/// Values of the bidegree `(1, 0)` monomials of a scroll ring at a point.
pub(crate) fn scroll_point(field: &Field, s: &ScrollRing, y: &[u32], t: &[u32]) -> Vec<u32> {
    let mut pt = y.to_vec();
    pt.extend_from_slice(t);
    s.basis(1, 0)
        .monomials()
        .iter()
        .map(|m| Polynomial::monomial(s.ring(), m.clone(), 1).eval(field, &pt))
        .collect()
}

pub fn scroll(field: &Field, e: &[u32]) -> Result<EmbeddedVariety, VarietyError> {
    let s = ScrollRing::new(e)?;
    if s.f() < 2 {
        return Err(VarietyError::BadParameters("scroll needs f = sum(e) >= 2".into()));
    }
    let f = *field;
    let images: Vec<Polynomial> = s
        .basis(1, 0)
        .monomials()
        .iter()
        .map(|m| Polynomial::monomial(s.ring(), m.clone(), 1))
        .collect();
    let n_vars = images.len();
    let s2 = s.clone();
    let oracle = QuotientOracle::new(f, s.ring().clone(), images, Vec::new(), Box::new(move |k| {
        Some(p1_cohomology(&s2.weights(k, 0)).0 as usize)
    }))?;
    let spec = VarietySpec::new(Constructor::Scroll { e: e.to_vec() }, 0);
    let meta = Metadata {
        label: spec.label.clone(),
        dim: e.len(),
        degree: Some(u64::from(s.f())),
        genus: None,
        canonical_curve: false,
    };
    let d = e.len();
    let sampler: Sampler = Box::new(move |rng| {
        let y = random_point(&f, rng, d);
        let t = random_point(&f, rng, 2);
        Some(scroll_point(&f, &s, &y, &t))
    });
    let x = EmbeddedVariety::new(f, spec, meta, n_vars, Box::new(oracle)).with_sampler(sampler);
    x.check_hilbert(0..=2)?;
    Ok(x)
}

/// Builds the cone presentation `P / (forms)` without any genericity check.
/// Meant for hand-made inputs such as negative controls.
pub fn hypersurface_from(field: &Field, forms: Vec<Polynomial>, label: &str) -> Result<EmbeddedVariety, VarietyError> {
    let f = *field;
    let ring = forms.first().ok_or_else(|| VarietyError::BadParameters("no forms".into()))?.ring().clone();
    let n_vars = ring.n_vars();
    let images: Vec<Polynomial> = (0..n_vars).map(|i| Polynomial::var(&ring, i)).collect();
    let degrees: Vec<u32> = forms
        .iter()
        .map(|p| p.multidegree().map(|d| d[0] as u32))
        .collect::<Option<_>>()
        .ok_or_else(|| VarietyError::BadParameters("forms must be homogeneous".into()))?;
    let oracle = QuotientOracle::new(f, ring, images, forms.clone(), Box::new(|_| None))?;
    let spec = VarietySpec {
        label: label.to_string(),
        constructor: Constructor::CompleteIntersection { n: n_vars - 1, degrees },
        seed: 0,
    };
    let meta = Metadata {
        label: label.to_string(),
        dim: n_vars - 1 - forms.len(),
        degree: None,
        genus: None,
        canonical_curve: false,
    };
    Ok(EmbeddedVariety::new(f, spec, meta, n_vars, Box::new(oracle)).with_extras(Extras::Forms(forms)).mark_adhoc())
}

pub fn complete_intersection(
    field: &Field,
    n: usize,
    degrees: &[u32],
    seed: u64,
    budget: u32,
) -> Result<EmbeddedVariety, VarietyError> {
    if degrees.is_empty() || degrees.len() >= n || degrees.iter().any(|&d| d < 2) {
        return Err(VarietyError::BadParameters(
            "complete intersection needs 1 <= #degrees < N and degrees >= 2".into(),
        ));
    }
    with_retry(seed, budget, |s| complete_intersection_attempt(field, n, degrees, s))
}

fn complete_intersection_attempt(field: &Field, n: usize, degrees: &[u32], seed: u64) -> Result<EmbeddedVariety, VarietyError> {
    let f = *field;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ring = GradedRing::standard(n + 1, "z");
    let forms: Vec<Polynomial> = degrees
        .iter()
        .map(|&d| Polynomial::random_small(&ring, &f, &[d as i32], COEFF_BOUND, &mut rng))
        .collect();
    let images: Vec<Polynomial> = (0..=n).map(|i| Polynomial::var(&ring, i)).collect();
    let oracle = QuotientOracle::new(f, ring, images, forms.clone(), Box::new(koszul_h0(n, degrees)))?;
    let constructor = Constructor::CompleteIntersection { n, degrees: degrees.to_vec() };
    let canonical = constructor.is_canonical_curve();
    let deg: u64 = degrees.iter().map(|&d| u64::from(d)).product();
    let dim = n - degrees.len();
    let genus = if canonical {
        Some(deg / 2 + 1)
    } else if n == 2 {
        let d = u64::from(degrees[0]);
        Some((d - 1) * (d - 2) / 2)
    } else {
        None
    };
    let spec = VarietySpec::new(constructor, seed);
    let meta = Metadata { label: spec.label.clone(), dim, degree: Some(deg), genus, canonical_curve: canonical };
    let x = EmbeddedVariety::new(f, spec, meta, n + 1, Box::new(oracle)).with_extras(Extras::Forms(forms));
    let top = degrees.iter().copied().max().unwrap_or(2) + 2;
    x.check_hilbert(0..=top)?;
    if canonical {
        x.check_hilbert(top + 1..=5)?;
    }
    Ok(x)
}

/// Whether the partial derivatives of a plane form have no common zero, in
/// which case the ideal they generate contains every form of degree `3d - 5`.
fn plane_form_is_smooth(field: &Field, form: &Polynomial, d: u32) -> Result<bool, VarietyError> {
    let ring = form.ring();
    let j = (3 * d - 5) as i32;
    let target = ring.basis(j);
    let mult = ring.basis(j - d as i32 + 1);
    let mut b = EchelonBuilder::new(*field, target.len());
    for v in 0..3 {
        let partial = form.derivative(field, v);
        for m in mult.monomials() {
            let pairs = partial
                .terms()
                .map(|(pm, c)| (target.index_of(&pm.mul(m)).expect("degree matches") as u32, c))
                .collect();
            b.push_sparse(&SparseVec::from_pairs(field, pairs));
        }
    }
    Ok(b.rank() == target.len())
}

pub(crate) fn plane_curve_point<R: Rng>(field: &Field, form: &Polynomial, d: u32, rng: &mut R) -> Option<Vec<u32>> {
    let a = random_point(field, rng, 3);
    let b = random_point(field, rng, 3);
    let xs: Vec<u32> = (0..=d).collect();
    let ys: Vec<u32> = xs
        .iter()
        .map(|&s| {
            let pt: Vec<u32> = a.iter().zip(&b).map(|(&u, &v)| field.add(u, field.mul(s, v))).collect();
            form.eval(field, &pt)
        })
        .collect();
    let poly = univariate::interpolate(field, &xs, &ys);
    let roots = univariate::roots(field, &poly, rng);
    if roots.is_empty() {
        return None;
    }
    let s = roots[rng.gen_range(0..roots.len())];
    Some(a.iter().zip(&b).map(|(&u, &v)| field.add(u, field.mul(s, v))).collect())
}

pub fn plane_curve_canonical(field: &Field, d: u32, seed: u64, budget: u32) -> Result<EmbeddedVariety, VarietyError> {
    if d < 5 {
        return Err(VarietyError::BadParameters("plane canonical curves need d >= 5".into()));
    }
    with_retry(seed, budget, |s| plane_curve_attempt(field, d, s))
}

fn plane_curve_attempt(field: &Field, d: u32, seed: u64) -> Result<EmbeddedVariety, VarietyError> {
    let f = *field;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = GradedRing::standard(3, "x");
    let form = Polynomial::random_small(&x, &f, &[d as i32], COEFF_BOUND, &mut rng);
    if !plane_form_is_smooth(&f, &form, d)? {
        return Err(VarietyError::Degenerate("plane curve is singular".into()));
    }
    let g = ((d - 1) * (d - 2) / 2) as usize;
    let images: Vec<Polynomial> = x
        .basis(d as i32 - 3)
        .monomials()
        .iter()
        .map(|m| Polynomial::monomial(&x, m.clone(), 1))
        .collect();
    let oracle = QuotientOracle::new(f, x.clone(), images, vec![form.clone()], Box::new(canonical_h0(g)))?;
    let spec = VarietySpec::new(Constructor::PlaneCanonical { d }, seed);
    let meta = Metadata {
        label: spec.label.clone(),
        dim: 1,
        degree: Some(2 * g as u64 - 2),
        genus: Some(g as u64),
        canonical_curve: true,
    };
    let form2 = form.clone();
    let sampler: Sampler = Box::new(move |rng| {
        let p = plane_curve_point(&f, &form2, d, rng)?;
        Some(x.monomial_values(&f, d as i32 - 3, &p))
    });
    let var = EmbeddedVariety::new(f, spec, meta, g, Box::new(oracle))
        .with_sampler(sampler)
        .with_extras(Extras::PlaneCurve { form });
    var.check_hilbert(0..=5)?;
    Ok(var)
}

/// Hilbert function of the Plücker embedding of `G(2,5)`, whose Hilbert
/// series is `(1 + 3s + s^2) / (1 - s)^7`.
pub(crate) fn g25_h0(k: u32) -> usize {
    let k = k as usize;
    binomial(k + 6, 6) + 3 * binomial(k + 5, 6) + if k >= 2 { binomial(k + 4, 6) } else { 0 }
}

pub fn grassmannian_g25(field: &Field, realization: Realization, seed: u64) -> Result<EmbeddedVariety, VarietyError> {
    let f = *field;
    let pairs: Vec<(usize, usize)> = (0..5).flat_map(|i| (i + 1..5).map(move |j| (i, j))).collect();
    let spec = VarietySpec::new(Constructor::Grassmannian { realization }, seed);
    let meta = Metadata { label: spec.label.clone(), dim: 6, degree: Some(5), genus: None, canonical_curve: false };
    let pairs2 = pairs.clone();
    let sampler = move || -> Sampler {
        let pairs = pairs2.clone();
        Box::new(move |rng: &mut ChaCha8Rng| {
            let a = random_point(&f, rng, 5);
            let b = random_point(&f, rng, 5);
            Some(pairs.iter().map(|&(i, j)| f.sub(f.mul(a[i], b[j]), f.mul(a[j], b[i]))).collect())
        })
    };
    let x = match realization {
        Realization::Symbolic => {
            let mut vars: Vec<Variable> = (0..5).map(|i| Variable { name: format!("a{i}"), degree: vec![1, 0] }).collect();
            vars.extend((0..5).map(|i| Variable { name: format!("b{i}"), degree: vec![0, 1] }));
            let t = GradedRing::new(vars)?;
            let images = pairs
                .iter()
                .map(|&(i, j)| {
                    let ab = Polynomial::var(&t, i).mul(&f, &Polynomial::var(&t, 5 + j))?;
                    let ba = Polynomial::var(&t, j).mul(&f, &Polynomial::var(&t, 5 + i))?;
                    ab.sub(&f, &ba)
                })
                .collect::<Result<Vec<_>, _>>()?;
            let oracle = QuotientOracle::new(f, t, images, Vec::new(), Box::new(|k| Some(g25_h0(k))))?;
            EmbeddedVariety::new(f, spec, meta, 10, Box::new(oracle))
        }
        Realization::Points => {
            let oracle = PointsOracle::sampled(f, 10, seed, sampler(), Box::new(|k| Some(g25_h0(k))));
            EmbeddedVariety::new(f, spec, meta, 10, Box::new(oracle))
        }
    };
    let x = x.with_sampler(sampler());
    x.check_hilbert(0..=2)?;
    Ok(x)
}

fn det4(m: &[[i64; 4]; 4]) -> i64 {
    let mut total = 0i64;
    // Laplace expansion along the first row.
    for c in 0..4 {
        let minor: Vec<[i64; 3]> = (1..4)
            .map(|r| {
                let mut row = [0i64; 3];
                let mut k = 0;
                for cc in 0..4 {
                    if cc != c {
                        row[k] = m[r][cc];
                        k += 1;
                    }
                }
                row
            })
            .collect();
        let d3 = minor[0][0] * (minor[1][1] * minor[2][2] - minor[1][2] * minor[2][1])
            - minor[0][1] * (minor[1][0] * minor[2][2] - minor[1][2] * minor[2][0])
            + minor[0][2] * (minor[1][0] * minor[2][1] - minor[1][1] * minor[2][0]);
        let sign = if c % 2 == 0 { 1 } else { -1 };
        total += sign * m[0][c] * d3;
    }
    total
}

pub fn gorenstein_points5(field: &Field, seed: u64, budget: u32) -> Result<EmbeddedVariety, VarietyError> {
    with_retry(seed, budget, |s| points5_attempt(field, s))
}

fn points5_attempt(field: &Field, seed: u64) -> Result<EmbeddedVariety, VarietyError> {
    let f = *field;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ints: Vec<[i64; 4]> = (0..5)
        .map(|_| {
            let mut p = [0i64; 4];
            for x in p.iter_mut() {
                *x = rng.gen_range(-9..=9);
            }
            p
        })
        .collect();
    for skip in 0..5 {
        let mut m = [[0i64; 4]; 4];
        let mut r = 0;
        for (i, p) in ints.iter().enumerate() {
            if i != skip {
                m[r] = *p;
                r += 1;
            }
        }
        let det = det4(&m);
        if det == 0 || f.from_i64(det) == 0 {
            return Err(VarietyError::Degenerate("four of the points are coplanar".into()));
        }
    }
    let pts: Vec<Vec<u32>> = ints.iter().map(|p| p.iter().map(|&v| f.from_i64(v)).collect()).collect();
    let expected = |k: u32| Some(match k {
        0 => 1,
        1 => 4,
        _ => 5,
    });
    let oracle = PointsOracle::fixed(f, 4, pts.clone(), Box::new(expected));
    let spec = VarietySpec::new(Constructor::GorensteinPoints, seed);
    let meta = Metadata { label: spec.label.clone(), dim: 0, degree: Some(5), genus: None, canonical_curve: false };
    let pts = Arc::new(pts);
    let sampler: Sampler = Box::new(move |rng| {
        let p = &pts[rng.gen_range(0..pts.len())];
        let c = rng.gen_range(1..f.p()) as u32;
        Some(p.iter().map(|&v| f.mul(v, c)).collect())
    });
    let x = EmbeddedVariety::new(f, spec, meta, 4, Box::new(oracle)).with_sampler(sampler);
    x.check_hilbert(0..=4)?;
    Ok(x)
}
