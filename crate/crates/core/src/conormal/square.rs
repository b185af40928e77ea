use serde::{Deserialize, Serialize};

use super::betti::shift;
use super::{Conormal, ConormalError, Result};
use crate::exactalg::{EchelonBuilder, Row, SparseVec, Subspace};
use crate::rings::{Monomial, Polynomial};

/// Degree piece of the saturation of `I^2` by the last variable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquarePiece {
    pub degree: u32,
    pub dim: usize,
    pub stabilization_m: u32,
    pub chain_dims: Vec<usize>,
}

impl Conormal {
    /// Spanning vectors of `(I^2)_e` in `P_e`: monomial multiples of the
    /// products of pairs of minimal generators.
    fn square_span(&self, e: u32) -> Result<Vec<SparseVec>> {
        let f = self.field();
        let ring = self.x.ring();
        let mut gens: Vec<(u32, Polynomial)> = Vec::new();
        for d in 2..=e / 2 + 1 {
            let b = ring.basis(d as i32);
            for v in self.generators(d)?.iter() {
                gens.push((d, Polynomial::from_sparse(ring, &b, v)));
            }
        }
        let target = ring.basis(e as i32);
        let mut out = Vec::new();
        for i in 0..gens.len() {
            for j in i..gens.len() {
                let d = gens[i].0 + gens[j].0;
                if d > e {
                    continue;
                }
                let prod = gens[i].1.mul(f, &gens[j].1)?;
                let pd = ring.basis(d as i32);
                let sv = prod.to_sparse(&pd)?;
                for m in ring.basis((e - d) as i32).monomials() {
                    out.push(shift(f, &pd, &target, &sv, m));
                }
            }
        }
        Ok(out)
    }

    /// `{c ∈ P_d : z_N^m c ∈ (I^2)_{d+m}}` for growing `m`, with the same
    /// stopping rule as the conormal saturation.
    pub fn saturated_square_piece(&self, d: u32) -> Result<SquarePiece> {
        let f = self.field();
        let ring = self.x.ring();
        let n = self.n();
        let pd = ring.basis(d as i32);
        let w = self.cfg.window as usize;
        let mut dims = Vec::new();
        for m in 0..=self.cfg.m_cap {
            let pe = ring.basis((d + m) as i32);
            let zm = Monomial::var(n, n - 1);
            let mut zpow = Monomial::one(n);
            for _ in 0..m {
                zpow = zpow.mul(&zm);
            }
            let r_len = pe.len();
            let total = r_len + pd.len();
            let mut b = EchelonBuilder::new(*f, total);
            for v in self.square_span(d + m)? {
                let mut pairs = Vec::with_capacity(v.nnz());
                for (mu, c) in v.iter() {
                    match pe.get(mu).div(&zpow) {
                        Some(q) => pairs.push(((r_len + pd.index_of(&q).expect("degree d")) as u32, c)),
                        None => pairs.push((mu as u32, c)),
                    }
                }
                b.push_sparse(&SparseVec::from_pairs(f, pairs));
            }
            let (pivots, rows) = b.finish();
            let mut out_p = Vec::new();
            let mut out_r = Vec::new();
            for (&c, row) in pivots.iter().zip(&rows) {
                if c >= r_len {
                    out_p.push(c - r_len);
                    out_r.push(Row::from_dense(row.to_dense(total)[r_len..].to_vec()));
                }
            }
            dims.push(Subspace::from_parts(pd.len(), out_p, out_r).dim());
            let tail = &dims[dims.len().saturating_sub(w)..];
            if tail.len() == w && tail.iter().all(|&x| x == tail[0]) {
                return Ok(SquarePiece {
                    degree: d,
                    dim: tail[0],
                    stabilization_m: m + 1 - self.cfg.window,
                    chain_dims: dims,
                });
            }
        }
        Err(ConormalError::Unstable { k: d, m_cap: self.cfg.m_cap })
    }

    /// `dim Sat_{k+2} - dim span{a · dF : F ∈ I_2, a ∈ A_k}`.
    pub fn quadric_jacobian_coker(&self, k: u32) -> Result<usize> {
        let quads = self.generators(2)?;
        let vecs = self.jacobian_vectors(k + 2, 2, &quads)?;
        let span = Subspace::span_sparse(self.field(), self.w_dim(k + 2)?, vecs.iter());
        let sat = self.conormal_saturation(k + 2)?;
        Ok(sat.sat.dim() - span.dim())
    }
}
