use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{univariate, EmbeddedVariety, Extras, VarietyError};
use crate::exactalg::{kernel, solve, EchelonBuilder, Field, Matrix, SparseVec, Subspace};
use crate::rings::Monomial;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SmoothnessVerdict {
    Pass,
    Fail { point: Vec<u32>, rank: usize, codim: usize },
}

const MAX_SAMPLE_ATTEMPTS: usize = 10_000;
const MAX_SECTION_DEGREE: u32 = 8;

/// Degree up to which the ideal is inspected when testing membership and
/// computing Jacobians.
fn generator_degree_bound(x: &EmbeddedVariety) -> u32 {
    match x.extras() {
        Extras::Forms(forms) => forms
            .iter()
            .filter_map(|p| p.multidegree().map(|d| d[0].max(2) as u32))
            .max()
            .unwrap_or(2),
        _ => 3,
    }
}

/// Whether every form of `I_k`, `k <= bound`, vanishes at `pt`.
fn lies_on(x: &EmbeddedVariety, pt: &[u32]) -> Result<bool, VarietyError> {
    let f = x.field();
    for k in 1..=generator_degree_bound(x) {
        let vals = x.ring().monomial_values(f, k as i32, pt);
        let ideal = x.ideal(k)?;
        for r in ideal.rows() {
            let mut s = 0u32;
            r.for_each_nonzero(|c, v| s = f.add(s, f.mul(v, vals[c])));
            if s != 0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Rank at `pt` of the Jacobian matrix of the ideal in degrees up to the
/// generator bound.
pub fn jacobian_rank_at(x: &EmbeddedVariety, pt: &[u32]) -> Result<usize, VarietyError> {
    let f = x.field();
    let n = x.n_vars();
    let mut b = EchelonBuilder::new(*f, n);
    for k in 1..=generator_degree_bound(x) {
        let ideal = x.ideal(k)?;
        if ideal.dim() == 0 {
            continue;
        }
        let basis = x.ring().basis(k as i32);
        let lower = x.ring().basis(k as i32 - 1);
        let lower_vals = x.ring().monomial_values(f, k as i32 - 1, pt);
        // grad[mu] lists (variable, d m_mu / d z_v at pt).
        let grad: Vec<Vec<(usize, u32)>> = basis
            .monomials()
            .iter()
            .map(|m| {
                (0..n)
                    .filter(|&v| m.exps()[v] > 0)
                    .map(|v| {
                        let q = m.div(&Monomial::var(n, v)).expect("variable divides");
                        let val = lower_vals[lower.index_of(&q).expect("degree k - 1")];
                        (v, f.mul(val, u32::from(m.exps()[v])))
                    })
                    .collect()
            })
            .collect();
        for r in ideal.rows() {
            let mut row = vec![0u32; n];
            r.for_each_nonzero(|mu, c| {
                for &(v, g) in &grad[mu] {
                    row[v] = f.add(row[v], f.mul(c, g));
                }
            });
            b.push_dense(&row);
        }
    }
    Ok(b.rank())
}

/// Checks the Jacobian criterion at each of the given points of `X`.
pub fn smoothness_at_points(x: &EmbeddedVariety, points: &[Vec<u32>]) -> Result<SmoothnessVerdict, VarietyError> {
    let codim = x.n_vars() - 1 - x.meta().dim;
    for p in points {
        let rank = jacobian_rank_at(x, p)?;
        if rank != codim {
            return Ok(SmoothnessVerdict::Fail { point: p.clone(), rank, codim });
        }
    }
    Ok(SmoothnessVerdict::Pass)
}

/// Samples `n_points` points of `X` and applies the Jacobian criterion there.
pub fn smoothness_spot_check(x: &EmbeddedVariety, n_points: usize, seed: u64) -> Result<SmoothnessVerdict, VarietyError> {
    let pts = find_points(x, n_points, seed)?;
    smoothness_at_points(x, &pts)
}

/// Up to `n` points of `X` over `F_p`, from the constructor's sampler if it
/// has one, and otherwise from the eigenvalues of multiplication operators on
/// a random linear section.
pub fn find_points(x: &EmbeddedVariety, n: usize, seed: u64) -> Result<Vec<Vec<u32>>, VarietyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_9017);
    let mut out = Vec::new();
    if let Some(sampler) = x.sampler() {
        for _ in 0..MAX_SAMPLE_ATTEMPTS {
            if out.len() == n {
                break;
            }
            if let Some(p) = sampler(&mut rng) {
                if p.iter().any(|&c| c != 0) {
                    out.push(p);
                }
            }
        }
    } else {
        let rounds = 4 * n + 8;
        for _ in 0..rounds {
            if out.len() >= n {
                break;
            }
            for p in section_points(x, &mut rng)? {
                if out.len() < n && lies_on(x, &p)? {
                    out.push(p);
                }
            }
        }
    }
    if out.is_empty() {
        Err(VarietyError::NoPointsFound)
    } else {
        Ok(out)
    }
}

pub(crate) fn random_form<R: Rng>(field: &Field, rng: &mut R, n: usize) -> Vec<u32> {
    (0..n).map(|_| rng.gen_range(0..field.p()) as u32).collect()
}

/// The image in `A_j` of `h * A_{j-1}` for each linear form `h`.
pub(crate) fn section_span(x: &EmbeddedVariety, j: u32, hyperplanes: &[Vec<u32>]) -> Result<Subspace, VarietyError> {
    let f = x.field();
    let dim = x.dim_a(j)?;
    if j == 0 || hyperplanes.is_empty() {
        return Ok(Subspace::zero(dim));
    }
    let mult = x.mult(j)?;
    let lo = x.dim_a(j - 1)?;
    let mut b = EchelonBuilder::new(*f, dim);
    for h in hyperplanes {
        for s in 0..lo {
            b.push_sparse(&linear_times(f, &mult.cols, h, s));
        }
    }
    Ok(Subspace::from_builder(b))
}

/// `h * e_s` for a linear form `h` and the basis vector `e_s` of `A_{j-1}`.
pub(crate) fn linear_times(f: &Field, cols: &[Vec<SparseVec>], h: &[u32], s: usize) -> SparseVec {
    let mut acc = Vec::new();
    for (v, &c) in h.iter().enumerate() {
        if c != 0 {
            acc.extend(cols[v][s].iter().map(|(i, x)| (i as u32, f.mul(c, x))));
        }
    }
    SparseVec::from_pairs(f, acc)
}

/// Points of `X ∩ H_1 ∩ ... ∩ H_dim` for random hyperplanes `H_i`.
fn section_points<R: Rng>(x: &EmbeddedVariety, rng: &mut R) -> Result<Vec<Vec<u32>>, VarietyError> {
    let f = x.field();
    let n = x.n_vars();
    let hyper: Vec<Vec<u32>> = (0..x.meta().dim).map(|_| random_form(f, rng, n)).collect();
    let l0 = random_form(f, rng, n);

    // Find j with dim B_j = dim B_{j+1}, where B = A / (hyperplanes).
    let mut spans = vec![section_span(x, 1, &hyper)?];
    let mut j = 1u32;
    loop {
        spans.push(section_span(x, j + 1, &hyper)?);
        let d0 = x.dim_a(j)? - spans[spans.len() - 2].dim();
        let d1 = x.dim_a(j + 1)? - spans[spans.len() - 1].dim();
        let target = x.meta().degree.map(|d| d as usize);
        if d0 == d1 && target.is_none_or(|t| t == d0) {
            break;
        }
        j += 1;
        if j >= MAX_SECTION_DEGREE {
            return Ok(Vec::new());
        }
    }
    let (u0, u1) = (&spans[spans.len() - 2], &spans[spans.len() - 1]);
    let free0 = u0.free_cols();
    let free1 = u1.free_cols();
    let d = free0.len();
    if d == 0 {
        return Ok(Vec::new());
    }
    let dim1 = x.dim_a(j + 1)?;
    let mult = x.mult(j + 1)?;
    let image_matrix = |h: &[u32]| -> Result<Matrix, VarietyError> {
        let mut rows = vec![vec![0u32; d]; d];
        for (c, &col) in free0.iter().enumerate() {
            let v = linear_times(f, &mult.cols, h, col).to_dense(dim1);
            let r = u1.reduce(f, &v)?;
            for (i, &fc) in free1.iter().enumerate() {
                rows[i][c] = r[fc];
            }
        }
        Ok(Matrix::from_dense(d, &rows))
    };
    let l = image_matrix(&l0)?;
    let ops: Vec<Matrix> = (0..n)
        .map(|v| {
            let mut e = vec![0u32; n];
            e[v] = 1;
            let z = image_matrix(&e)?;
            solve(f, &l, &z)?.ok_or_else(|| VarietyError::Degenerate("singular section multiplier".into()))
        })
        .collect::<Result<_, _>>()
        .or_else(|e| match e {
            VarietyError::Degenerate(_) => Ok(Vec::new()),
            other => Err(other),
        })?;
    if ops.is_empty() {
        return Ok(Vec::new());
    }
    let weights = random_form(f, rng, n);
    let mut m = vec![vec![0u32; d]; d];
    for (op, &w) in ops.iter().zip(&weights) {
        for (r, row) in op.rows().iter().enumerate() {
            for (c, v) in row.iter() {
                m[r][c] = f.add(m[r][c], f.mul(w, v));
            }
        }
    }
    let cp = univariate::char_poly(f, &m);
    let mut pts = Vec::new();
    for lambda in univariate::roots(f, &cp, rng) {
        if univariate::root_multiplicity(f, &cp, lambda) != 1 {
            continue;
        }
        let mut shifted = m.clone();
        for (i, row) in shifted.iter_mut().enumerate() {
            row[i] = f.sub(row[i], lambda);
        }
        let left = kernel(f, &Matrix::from_dense(d, &shifted).transpose());
        if left.dim() != 1 {
            continue;
        }
        let w = left.row_dense(0);
        let k = w.iter().position(|&c| c != 0).expect("nonzero eigenvector");
        let inv = f.inv(w[k]);
        let point: Vec<u32> = ops
            .iter()
            .map(|op| {
                let mut s = 0u32;
                for (r, row) in op.rows().iter().enumerate() {
                    s = f.add(s, f.mul(w[r], row.get(k)));
                }
                f.mul(s, inv)
            })
            .collect();
        if point.iter().any(|&c| c != 0) {
            pts.push(point);
        }
    }
    Ok(pts)
}
