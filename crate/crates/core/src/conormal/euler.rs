use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Conormal, ConormalError, Result};
use crate::exactalg::{kernel, EchelonBuilder, Matrix, SparseVec, Subspace};
use crate::rings::binomial;

/// `M_k ⊆ V ⊗ A_{k-1}`, the kernel of the contraction `c ↦ Σ z_j c_j`.
#[derive(Clone, Debug)]
pub struct EulerSpace {
    pub degree: u32,
    pub n_blocks: usize,
    pub block_dim: usize,
    pub m: Arc<Subspace>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TProfile {
    /// `dim T^1_{-1}`.
    pub t1_minus1: usize,
    /// `dim T^2_k` for `-k_max <= k <= 0`.
    pub t2: BTreeMap<i32, usize>,
}

impl Conormal {
    pub(crate) fn euler_module(&self, k: u32) -> Result<Arc<Subspace>> {
        self.euler.get_or_try(&k, || {
            let w = self.w_dim(k)?;
            if w == 0 {
                return Ok(Subspace::zero(0));
            }
            let hi = self.x.dim_a(k)?;
            let mult = self.x.mult(k)?;
            let cols: Vec<SparseVec> = mult.cols.iter().flat_map(|per_var| per_var.iter().cloned()).collect();
            Ok(kernel(self.field(), &Matrix::from_rows(hi, cols).transpose()))
        })
    }

    /// The Euler model in degree `k`, checked against `R_1(1, k-1)`.
    pub fn euler_space(&self, k: u32) -> Result<EulerSpace> {
        let m = self.euler_module(k)?;
        if k >= 2 {
            let r1 = self.r1_kernel(1, k - 1)?;
            if r1.dim() != m.dim() {
                return Err(ConormalError::ModelMismatch(format!(
                    "dim M_{k} = {} but dim R_1(1, {}) = {}",
                    m.dim(),
                    k - 1,
                    r1.dim()
                )));
            }
        }
        let block_dim = if k == 0 { 0 } else { self.x.dim_a(k - 1)? };
        Ok(EulerSpace { degree: k, n_blocks: self.n(), block_dim, m })
    }

    /// `Σ z_j c_j ∈ A_k` for `c ∈ W_k`.
    pub fn euler_contraction(&self, k: u32, c: &SparseVec) -> Result<SparseVec> {
        let f = self.field();
        if k == 0 {
            return Ok(SparseVec::new());
        }
        let lo = self.x.dim_a(k - 1)?;
        let mult = self.x.mult(k)?;
        let mut pairs = Vec::new();
        for (i, v) in c.iter() {
            for (t, x) in mult.cols[i / lo][i % lo].iter() {
                pairs.push((t as u32, f.mul(v, x)));
            }
        }
        Ok(SparseVec::from_pairs(f, pairs))
    }

    /// Kernel of multiplication `A_a ⊗ A_b -> A_{a+b}`, pairs indexed `i · dim A_b + j`.
    pub fn r1_kernel(&self, a: u32, b: u32) -> Result<Subspace> {
        let ca = self.x.coord(a)?;
        let db = self.x.dim_a(b)?;
        let target = self.x.dim_a(a + b)?;
        let mut cols = Vec::with_capacity(ca.dim() * db);
        for i in 0..ca.dim() {
            let m = ca.standard_monomial(i);
            for j in 0..db {
                cols.push(self.x.mul_monomial(m, b, &SparseVec::from_pairs(self.field(), vec![(j as u32, 1)]))?);
            }
        }
        if cols.is_empty() {
            return Ok(Subspace::zero(0));
        }
        Ok(kernel(self.field(), &Matrix::from_rows(target, cols).transpose()))
    }

    /// `T = Σ s_i ⊗ t_i ∈ A_1 ⊗ A_{k-1}` goes to `(Σ s_i ∂t_i/∂z_j)_j ∈ W_k`,
    /// each `t_i` being represented by standard monomials.
    pub fn gaussian_to_euler(&self, k: u32, t: &SparseVec) -> Result<SparseVec> {
        let f = self.field();
        if k < 2 {
            return Ok(SparseVec::new());
        }
        let c1 = self.x.coord(1)?;
        let lo = self.x.coord(k - 1)?;
        let below = lo.dim();
        let mut pairs = Vec::new();
        for (idx, val) in t.iter() {
            let (a, s) = (idx / below, idx % below);
            let za = c1.standard_monomial(a);
            let ms = lo.standard_monomial(s);
            for (j, &e) in ms.exps().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let mono = ms.div(&crate::rings::Monomial::var(self.n(), j)).expect("variable divides").mul(za);
                let coef = f.mul(val, u32::from(e));
                for (r, x) in lo.nf_of_monomial(&mono).expect("degree k - 1").iter() {
                    pairs.push(((j * below + r) as u32, f.mul(coef, x)));
                }
            }
        }
        Ok(SparseVec::from_pairs(f, pairs))
    }

    /// `Σ_μ c_μ Σ_a e_a(μ) z_a ⊗ z^μ / z_a ∈ A_1 ⊗ A_{k-1}` for `F = Σ c_μ z^μ ∈ P_k`.
    /// For `F ∈ I_k` this lies in `R_1(1, k-1)`; in degree 2 it maps to `dF`.
    pub fn symmetric_tensor(&self, k: u32, form: &SparseVec) -> Result<SparseVec> {
        let f = self.field();
        let c1 = self.x.coord(1)?;
        let lo = self.x.coord(k - 1)?;
        let pk = self.x.ring().basis(k as i32);
        let below = lo.dim();
        let mut pairs = Vec::new();
        for (mu, c) in form.iter() {
            let m = pk.get(mu);
            for (a, &e) in m.exps().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let za = crate::rings::Monomial::var(self.n(), a);
                let ia = c1.p_basis().index_of(&za).expect("variable");
                let pos = c1.standard_position(ia).ok_or_else(|| ConormalError::BadInput("embedding is not linearly normal".into()))?;
                let rest = m.div(&za).expect("variable divides");
                let coef = f.mul(c, u32::from(e));
                for (s, x) in lo.nf_of_monomial(&rest).expect("degree k - 1").iter() {
                    pairs.push(((pos * below + s) as u32, f.mul(coef, x)));
                }
            }
        }
        Ok(SparseVec::from_pairs(f, pairs))
    }

    /// `J_k`: span of the differentials `(∂_j F)_j` over a basis of `I_k`.
    pub fn ideal_jacobian_span(&self, k: u32) -> Result<Subspace> {
        let rows: Vec<SparseVec> = self.x.ideal(k)?.rows().iter().map(|r| r.to_sparse()).collect();
        let vecs = self.jacobian_vectors(k, k, &rows)?;
        Ok(Subspace::span_sparse(self.field(), self.w_dim(k)?, vecs.iter()))
    }

    /// Images in `W_2` of the basis `z_a ⊗ z_b - z_b ⊗ z_a`, `a < b`, of `∧^2 A_1`.
    fn wedge_images(&self) -> Result<Vec<SparseVec>> {
        let f = self.field();
        let n1 = self.x.dim_a(1)?;
        let mut out = Vec::with_capacity(binomial(n1, 2));
        for a in 0..n1 {
            for b in a + 1..n1 {
                let t = SparseVec::from_pairs(f, vec![((a * n1 + b) as u32, 1), ((b * n1 + a) as u32, f.neg(1))]);
                out.push(self.gaussian_to_euler(2, &t)?);
            }
        }
        Ok(out)
    }

    /// `{T ∈ ∧^2 A_1 : gaussian_to_euler(T) ∈ Sat_2}`, inside `A_1 ⊗ A_1`.
    pub fn gaussian_wedge_kernel(&self) -> Result<Subspace> {
        let f = self.field();
        let n1 = self.x.dim_a(1)?;
        let sat = self.conormal_saturation(2)?.sat.clone();
        let w = self.w_dim(2)?;
        let images = self.wedge_images()?;
        let total = w + images.len();
        let mut b = EchelonBuilder::new(*f, total);
        for (i, img) in images.iter().enumerate() {
            let mut row = sat.reduce(f, &img.to_dense(w))?;
            row.resize(total, 0);
            row[w + i] = 1;
            b.push_dense(&row);
        }
        let (pivots, rows) = b.finish();
        let pairs: Vec<(usize, usize)> = (0..n1).flat_map(|a| (a + 1..n1).map(move |b| (a, b))).collect();
        let mut vecs = Vec::new();
        for (&c, row) in pivots.iter().zip(&rows) {
            if c < w {
                continue;
            }
            let mut acc = Vec::new();
            row.for_each_nonzero(|i, v| {
                if i >= w {
                    let (a, b) = pairs[i - w];
                    acc.push(((a * n1 + b) as u32, v));
                    acc.push(((b * n1 + a) as u32, f.neg(v)));
                }
            });
            vecs.push(SparseVec::from_pairs(f, acc));
        }
        Ok(Subspace::span_sparse(f, n1 * n1, vecs.iter()))
    }

    /// `(5g - 5) - rank(∧^2 Γ(K) -> M_2 / Sat_2)` for a canonical curve.
    pub fn canonical_gaussian_corank(&self) -> Result<usize> {
        let meta = self.x.meta();
        let g = match (meta.canonical_curve, meta.genus) {
            (true, Some(g)) => g as usize,
            _ => return Err(ConormalError::BadInput(format!("{} is not a canonical curve", meta.label))),
        };
        let kernel_dim = self.gaussian_wedge_kernel()?.dim();
        let rank = binomial(g, 2) - kernel_dim;
        Ok(5 * g - 5 - rank)
    }

    /// `T^1_{-1}` and `T^2_k = H^1(I^2(1 - k))` for `-k_max <= k <= 0`.
    pub fn t_profiles(&self, k_max: u32) -> Result<TProfile> {
        let t1_minus1 = self.canonical_gaussian_corank()?;
        let mut t2 = BTreeMap::new();
        for k in -(k_max as i32)..=0 {
            t2.insert(k, self.h1_ideal_square((1 - k) as u32)?.value);
        }
        Ok(TProfile { t1_minus1, t2 })
    }
}
