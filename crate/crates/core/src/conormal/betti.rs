use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Conormal, Result};
use crate::exactalg::{kernel, rank, EchelonBuilder, Field, Matrix, SparseVec, Subspace};
use crate::rings::{binomial, DegreeBasis, Monomial, Polynomial};
use crate::varieties::points::{random_form, section_span};
use crate::varieties::EmbeddedVariety;

const MAX_REDUCTION_DEGREE: u32 = 10;

/// `Ā = A / (h_0, ..., h_D)` for `D + 1 = dim X + 1` random linear forms.
///
/// When `A` is Cohen-Macaulay the forms are a regular sequence, `Ā` is
/// Artinian with `HF(Ā) = Δ^{D+1} HF(A)`, and the graded Betti numbers of
/// `A` over `P` equal those of `Ā` over the polynomial ring in the remaining
/// variables `z_J`.
pub struct ArtinianReduction {
    vars: Vec<usize>,
    hf: Vec<usize>,
    certified: bool,
    /// `zmul[j][v]` maps `Ā_{j-1} -> Ā_j` for the `v`-th variable of `z_J`,
    /// stored as one image row per source basis element.
    zmul: Vec<Vec<Vec<Vec<u32>>>>,
}

impl ArtinianReduction {
    pub fn new(x: &EmbeddedVariety, seed: u64) -> Result<Self> {
        let f = x.field();
        let n = x.n_vars();
        let d = x.meta().dim;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xa271_1a4e);
        let hyper: Vec<Vec<u32>> = (0..=d).map(|_| random_form(f, &mut rng, n)).collect();
        let h_span = Subspace::span_dense(f, n, hyper.iter());
        let vars = h_span.free_cols();

        let mut spans = Vec::new();
        let mut hf = Vec::new();
        let mut top = None;
        for j in 0..=MAX_REDUCTION_DEGREE {
            let u = section_span(x, j, &hyper)?;
            let dim = x.dim_a(j)? - u.dim();
            spans.push(u);
            hf.push(dim);
            if dim == 0 {
                top = Some(j);
                break;
            }
        }
        let mut certified = top.is_some() && h_span.dim() == d + 1;
        if let (Some(t), true) = (top, certified) {
            let sum: usize = hf.iter().sum();
            certified = x.meta().degree == Some(sum as u64);
            for j in 0..=t {
                let mut delta: i64 = 0;
                for i in 0..=(d + 1).min(j as usize) {
                    let sign = if i % 2 == 0 { 1 } else { -1 };
                    delta += sign * binomial(d + 1, i) as i64 * x.dim_a(j - i as u32)? as i64;
                }
                certified &= delta == hf[j as usize] as i64;
            }
        }

        let mut zmul = vec![Vec::new()];
        for j in 1..spans.len() {
            let mult = x.mult(j as u32)?;
            let free_lo = spans[j - 1].free_cols();
            let free_hi = spans[j].free_cols();
            let dim_hi = x.dim_a(j as u32)?;
            let mut per_var = Vec::with_capacity(vars.len());
            for &v in &vars {
                let mut rows = Vec::with_capacity(free_lo.len());
                for &c in &free_lo {
                    let img = mult.cols[v][c].to_dense(dim_hi);
                    let r = spans[j].reduce(f, &img)?;
                    rows.push(free_hi.iter().map(|&fc| r[fc]).collect());
                }
                per_var.push(rows);
            }
            zmul.push(per_var);
        }
        Ok(ArtinianReduction { vars, hf, certified, zmul })
    }

    /// Whether the Hilbert function test confirmed the regular sequence.
    pub fn certified(&self) -> bool {
        self.certified
    }

    /// `HF(Ā)` up to its first zero.
    pub fn hilbert_function(&self) -> &[usize] {
        &self.hf
    }

    /// Degree `j` with `Ā_j = 0`; minimal generators live in degrees `<= j`.
    pub fn top(&self) -> usize {
        self.hf.len() - 1
    }

    pub fn variables(&self) -> &[usize] {
        &self.vars
    }

    fn dim_bar(&self, j: i64) -> usize {
        if j < 0 || j as usize >= self.hf.len() {
            0
        } else {
            self.hf[j as usize]
        }
    }

    /// Rank of the Koszul differential `∧^i ⊗ Ā_{j-i} -> ∧^{i-1} ⊗ Ā_{j-i+1}`.
    fn koszul_rank(&self, field: &Field, i: usize, j: i64) -> usize {
        let nv = self.vars.len();
        let deg = j - i as i64;
        if i == 0 || i > nv || self.dim_bar(deg) == 0 || self.dim_bar(deg + 1) == 0 {
            return 0;
        }
        let src = subsets(nv, i);
        let dst = subsets(nv, i - 1);
        let dst_index: HashMap<&[usize], usize> = dst.iter().enumerate().map(|(k, s)| (s.as_slice(), k)).collect();
        let a_src = self.dim_bar(deg);
        let a_dst = self.dim_bar(deg + 1);
        let maps = &self.zmul[(deg + 1) as usize];
        let mut b = EchelonBuilder::new(*field, dst.len() * a_dst);
        for s in &src {
            for t in 0..a_src {
                let mut row = vec![0u32; dst.len() * a_dst];
                for (r, &v) in s.iter().enumerate() {
                    let rest: Vec<usize> = s.iter().copied().filter(|&w| w != v).collect();
                    let base = dst_index[rest.as_slice()] * a_dst;
                    for (c, &x) in maps[v][t].iter().enumerate() {
                        let x = if r % 2 == 0 { x } else { field.neg(x) };
                        row[base + c] = field.add(row[base + c], x);
                    }
                }
                b.push_dense(&row);
            }
        }
        b.rank()
    }

    /// Graded Betti number `β_{i,j}` of `Ā`, equal to that of `A` when certified.
    pub fn betti(&self, field: &Field, i: usize, j: u32) -> usize {
        let nv = self.vars.len();
        if i > nv {
            return 0;
        }
        let j = i64::from(j);
        let c_dim = binomial(nv, i) * self.dim_bar(j - i as i64);
        if c_dim == 0 {
            return 0;
        }
        c_dim - self.koszul_rank(field, i, j) - self.koszul_rank(field, i + 1, j)
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v);
            rec(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// `m · v` for a vector `v` of `P_d` and a monomial `m`, in the basis of `P_{d+e}`.
pub(crate) fn shift(field: &Field, from: &DegreeBasis, to: &DegreeBasis, v: &SparseVec, m: &Monomial) -> SparseVec {
    let pairs = v
        .iter()
        .map(|(mu, c)| (to.index_of(&from.get(mu).mul(m)).expect("degree matches") as u32, c))
        .collect();
    SparseVec::from_pairs(field, pairs)
}

/// Syzygies of degree `deg(f) + e` among forms `f_i` of one degree `d`:
/// the kernel of `P_e^k -> P_{d+e}`, indexed `i · dim P_e + μ`.
pub(crate) fn syzygies(x: &EmbeddedVariety, forms: &[SparseVec], d: u32, e: u32) -> Subspace {
    let f = x.field();
    let ring = x.ring();
    let pd = ring.basis(d as i32);
    let pe = ring.basis(e as i32);
    let target = ring.basis((d + e) as i32);
    let mut cols = Vec::with_capacity(forms.len() * pe.len());
    for form in forms {
        for m in pe.monomials() {
            cols.push(shift(f, &pd, &target, form, m));
        }
    }
    kernel(f, &Matrix::from_rows(target.len(), cols).transpose())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalPresentation {
    pub quadratic_generation: bool,
    pub linear_syzygies: bool,
}

impl Conormal {
    pub fn artinian_reduction(&self) -> Result<Arc<ArtinianReduction>> {
        self.reduction.get_or_try(&(), || ArtinianReduction::new(&self.x, self.cfg.seed))
    }

    /// Minimal generators of degree `d` as vectors of `P_d`: the rows of the
    /// canonical basis of `I_d` whose pivots are not pivots of `P_1 · I_{d-1}`.
    pub(crate) fn generators(&self, d: u32) -> Result<Arc<Vec<SparseVec>>> {
        self.gens.get_or_try(&d, || {
            if d <= 1 {
                return Ok(Vec::new());
            }
            let red = self.artinian_reduction()?;
            if red.certified() && (d as usize > red.top() || red.betti(self.field(), 1, d) == 0) {
                return Ok(Vec::new());
            }
            let ideal = self.x.ideal(d)?;
            if d == 2 {
                return Ok(ideal.rows().iter().map(|r| r.to_sparse()).collect());
            }
            let f = self.field();
            let ring = self.x.ring();
            let lower = self.x.ideal(d - 1)?;
            let (pl, ph) = (ring.basis(d as i32 - 1), ring.basis(d as i32));
            let mut b = EchelonBuilder::new(*f, ph.len());
            for row in lower.rows() {
                let sv = row.to_sparse();
                for v in 0..self.n() {
                    b.push_sparse(&shift(f, &pl, &ph, &sv, &Monomial::var(self.n(), v)));
                }
            }
            let sub = Subspace::from_builder(b);
            Ok(ideal.complement_rows(&sub).into_iter().map(|i| ideal.row(i).to_sparse()).collect())
        })
    }

    /// Minimal generators by degree for all degrees up to `d_max` that have any.
    pub fn minimal_generators(&self, d_max: u32) -> Result<BTreeMap<u32, Vec<Polynomial>>> {
        let ring = self.x.ring();
        let mut out = BTreeMap::new();
        for d in 2..=d_max {
            let g = self.generators(d)?;
            if !g.is_empty() {
                let b = ring.basis(d as i32);
                out.insert(d, g.iter().map(|v| Polynomial::from_sparse(ring, &b, v)).collect());
            }
        }
        Ok(out)
    }

    /// Quadratic generation in degrees `3..=d_max` and linearity of the first
    /// syzygies in degree 4.
    pub fn normal_presentation_check(&self, d_max: u32) -> Result<NormalPresentation> {
        let mut quadratic_generation = true;
        for d in 3..=d_max {
            quadratic_generation &= self.generators(d)?.is_empty();
        }
        let red = self.artinian_reduction()?;
        let linear_syzygies = if red.certified() {
            red.betti(self.field(), 2, 4) == 0
        } else {
            let quads = self.generators(2)?;
            let syz3 = syzygies(&self.x, &quads, 2, 1);
            let syz4 = syzygies(&self.x, &quads, 2, 2);
            let f = self.field();
            let ring = self.x.ring();
            let (p1, p2) = (ring.basis(1), ring.basis(2));
            let mut gens = Vec::new();
            for row in syz3.rows() {
                let sv = row.to_sparse();
                for v in 0..self.n() {
                    let m = Monomial::var(self.n(), v);
                    let pairs = sv
                        .iter()
                        .map(|(idx, c)| {
                            let (i, mu) = (idx / p1.len(), idx % p1.len());
                            let t = p2.index_of(&p1.get(mu).mul(&m)).expect("degree two");
                            ((i * p2.len() + t) as u32, c)
                        })
                        .collect();
                    gens.push(SparseVec::from_pairs(f, pairs));
                }
            }
            let lifted = Matrix::from_rows(syz4.ambient_dim(), gens);
            rank(f, &lifted) == syz4.dim()
        };
        Ok(NormalPresentation { quadratic_generation, linear_syzygies })
    }
}
