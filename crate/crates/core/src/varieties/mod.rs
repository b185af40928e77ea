//! Embedded projective varieties presented by section oracles, together with
//! the catalog of constructors used throughout the engine.

mod catalog;
mod oracle;
pub(crate) mod points;
mod scrollcurves;
mod spec;
pub mod univariate;

use std::sync::Arc;

use thiserror::Error;

pub use catalog::{
    complete_intersection, gorenstein_points5, grassmannian_g25, hypersurface_from, plane_curve_canonical,
    scroll, segre, veronese, with_retry, DEFAULT_RETRY_BUDGET,
};
pub(crate) use catalog::COEFF_BOUND;
pub use oracle::{HilbertFn, PointsOracle, QuotientOracle, Realization, Sampler, SectionOracle};
pub use points::{
    find_points, jacobian_rank_at, smoothness_at_points, smoothness_spot_check, SmoothnessVerdict,
};
pub use scrollcurves::{
    chi_j_3h, pentagonal_curve, pentagonal_defaults, pentagonal_from_matrix, scroll_cohomology, signed_pfaffians,
    tetragonal_curve, ScrollCurveData, ScrollCurveKind,
};
pub use spec::{Constructor, VarietySpec};

use crate::exactalg::{kernel, AlgError, Field, Matrix, SparseVec, Subspace};
use crate::memo::Memo;
use crate::rings::{DegreeBasis, GradedRing, Monomial, Polynomial, RingError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VarietyError {
    #[error("degenerate instance: {0}")]
    Degenerate(String),
    #[error("evaluation rank did not saturate in degree {k}")]
    RankUnsaturated { k: u32 },
    #[error("no points found")]
    NoPointsFound,
    #[error("unsupported instance: {0}")]
    Unsupported(String),
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Alg(#[from] AlgError),
}

const NONE: u32 = u32::MAX;

/// The degree-`k` piece of the coordinate ring `A = P / I`.
///
/// Coordinates on `A_k` are indexed by the standard monomials, the pivot
/// columns of the echelonised restriction matrix. `nf[mu]` expresses the
/// class of the monomial `mu` in those coordinates.
#[derive(Debug)]
pub struct CoordPiece {
    k: u32,
    basis: Arc<DegreeBasis>,
    std: Vec<u32>,
    std_pos: Vec<u32>,
    nf: Vec<SparseVec>,
}

impl CoordPiece {
    fn from_row_space(k: u32, basis: Arc<DegreeBasis>, e: &Subspace) -> Self {
        let n = basis.len();
        let std: Vec<u32> = e.pivot_cols().iter().map(|&c| c as u32).collect();
        let mut std_pos = vec![NONE; n];
        for (i, &c) in std.iter().enumerate() {
            std_pos[c as usize] = i as u32;
        }
        let mut cols: Vec<SparseVec> = vec![SparseVec::new(); n];
        for (i, row) in e.rows().iter().enumerate() {
            row.for_each_nonzero(|c, v| {
                cols[c].idx.push(i as u32);
                cols[c].val.push(v);
            });
        }
        CoordPiece { k, basis, std, std_pos, nf: cols }
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    /// `dim A_k`.
    pub fn dim(&self) -> usize {
        self.std.len()
    }

    /// `dim P_k`.
    pub fn dim_p(&self) -> usize {
        self.basis.len()
    }

    pub fn p_basis(&self) -> &Arc<DegreeBasis> {
        &self.basis
    }

    /// Indices in `P_k` of the standard monomials.
    pub fn standard(&self) -> &[u32] {
        &self.std
    }

    pub fn standard_monomial(&self, i: usize) -> &Monomial {
        self.basis.get(self.std[i] as usize)
    }

    /// Position of monomial `mu` among the standard monomials, if it is one.
    pub fn standard_position(&self, mu: usize) -> Option<usize> {
        let p = self.std_pos[mu];
        (p != NONE).then_some(p as usize)
    }

    pub fn nf(&self, mu: usize) -> &SparseVec {
        &self.nf[mu]
    }

    pub fn nf_of_monomial(&self, m: &Monomial) -> Option<&SparseVec> {
        self.basis.index_of(m).map(|i| &self.nf[i])
    }

    /// Class in `A_k` of a vector of `P_k`.
    pub fn reduce(&self, field: &Field, v: &SparseVec) -> SparseVec {
        let mut acc = Vec::new();
        for (mu, c) in v.iter() {
            for (i, x) in self.nf[mu].iter() {
                acc.push((i as u32, field.mul(c, x)));
            }
        }
        SparseVec::from_pairs(field, acc)
    }

    pub fn reduce_poly(&self, field: &Field, p: &Polynomial) -> Result<SparseVec, VarietyError> {
        Ok(self.reduce(field, &p.to_sparse(&self.basis)?))
    }

    /// The representative of `a` supported on standard monomials.
    pub fn lift(&self, a: &SparseVec) -> SparseVec {
        let mut pairs: Vec<(u32, u32)> = a.iter().map(|(i, v)| (self.std[i], v)).collect();
        pairs.sort_unstable();
        SparseVec { idx: pairs.iter().map(|p| p.0).collect(), val: pairs.iter().map(|p| p.1).collect() }
    }

    /// The projection `P_k -> A_k` as a matrix.
    pub fn projection_matrix(&self) -> Matrix {
        let mut rows = vec![SparseVec::new(); self.dim()];
        for (mu, col) in self.nf.iter().enumerate() {
            for (i, v) in col.iter() {
                rows[i].idx.push(mu as u32);
                rows[i].val.push(v);
            }
        }
        Matrix::from_rows(self.dim_p(), rows)
    }
}

/// Multiplication by each variable, `A_{k-1} -> A_k`, stored column-wise.
#[derive(Debug)]
pub struct MultMaps {
    pub cols: Vec<Vec<SparseVec>>,
}

impl MultMaps {
    pub fn apply(&self, field: &Field, j: usize, v: &SparseVec) -> SparseVec {
        let mut acc = Vec::new();
        for (s, c) in v.iter() {
            for (i, x) in self.cols[j][s].iter() {
                acc.push((i as u32, field.mul(c, x)));
            }
        }
        SparseVec::from_pairs(field, acc)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Metadata {
    pub label: String,
    /// Projective dimension of `X`.
    pub dim: usize,
    pub degree: Option<u64>,
    pub genus: Option<u64>,
    pub canonical_curve: bool,
}

/// Constructor-specific data kept alongside the variety.
pub enum Extras {
    None,
    ScrollCurve(Box<ScrollCurveData>),
    PlaneCurve { form: Polynomial },
    Forms(Vec<Polynomial>),
}

/// `X ⊂ P^N` with its oracle and lazily filled caches.
pub struct EmbeddedVariety {
    field: Field,
    spec: VarietySpec,
    meta: Metadata,
    ring: Arc<GradedRing>,
    oracle: Box<dyn SectionOracle>,
    sampler: Option<Sampler>,
    extras: Extras,
    adhoc: bool,
    coord: Memo<u32, CoordPiece>,
    ideal: Memo<u32, Subspace>,
    mult: Memo<u32, MultMaps>,
}

impl std::fmt::Debug for EmbeddedVariety {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EmbeddedVariety").field("spec", &self.spec).field("meta", &self.meta).finish()
    }
}

impl EmbeddedVariety {
    pub fn new(
        field: Field,
        spec: VarietySpec,
        meta: Metadata,
        n_vars: usize,
        oracle: Box<dyn SectionOracle>,
    ) -> Self {
        EmbeddedVariety {
            field,
            spec,
            meta,
            ring: GradedRing::standard(n_vars, "z"),
            oracle,
            sampler: None,
            extras: Extras::None,
            adhoc: false,
            coord: Memo::new(),
            ideal: Memo::new(),
            mult: Memo::new(),
        }
    }

    /// Attaches a sampler of points of the affine cone, used by spot checks.
    pub fn with_sampler(mut self, sampler: Sampler) -> Self {
        self.sampler = Some(sampler);
        self
    }

    pub fn with_extras(mut self, extras: Extras) -> Self {
        self.extras = extras;
        self
    }

    /// Marks a hand-made variety whose spec does not rebuild it.
    pub(crate) fn mark_adhoc(mut self) -> Self {
        self.adhoc = true;
        self
    }

    pub fn is_adhoc(&self) -> bool {
        self.adhoc
    }

    /// The same instance over another prime. Integer data is carried over
    /// through symmetric representatives.
    pub fn rebuild(&self, field: &Field, retry_budget: u32) -> Result<EmbeddedVariety, VarietyError> {
        if self.adhoc {
            let Extras::Forms(forms) = &self.extras else {
                return Err(VarietyError::Unsupported("ad hoc variety without forms".into()));
            };
            let lifted = forms
                .iter()
                .map(|p| {
                    let terms = p.terms().map(|(m, c)| (m.clone(), field.from_i64(self.field.to_signed(c))));
                    Polynomial::from_terms(p.ring(), field, terms)
                })
                .collect();
            return catalog::hypersurface_from(field, lifted, self.label());
        }
        self.spec.build(field, retry_budget)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn spec(&self) -> &VarietySpec {
        &self.spec
    }

    pub fn meta(&self) -> &Metadata {
        &self.meta
    }

    pub fn label(&self) -> &str {
        &self.meta.label
    }

    pub fn ring(&self) -> &Arc<GradedRing> {
        &self.ring
    }

    /// `N + 1`.
    pub fn n_vars(&self) -> usize {
        self.ring.n_vars()
    }

    pub fn oracle(&self) -> &dyn SectionOracle {
        self.oracle.as_ref()
    }

    pub fn sampler(&self) -> Option<&Sampler> {
        self.sampler.as_ref()
    }

    pub fn extras(&self) -> &Extras {
        &self.extras
    }

    pub fn scroll_curve(&self) -> Option<&ScrollCurveData> {
        match &self.extras {
            Extras::ScrollCurve(d) => Some(d),
            _ => None,
        }
    }

    pub fn dim_p(&self, k: u32) -> usize {
        self.ring.basis(k as i32).len()
    }

    pub fn coord(&self, k: u32) -> Result<Arc<CoordPiece>, VarietyError> {
        self.coord.get_or_try(&k, || {
            let e = self.oracle.row_space(&self.field, k)?;
            Ok(CoordPiece::from_row_space(k, self.ring.basis(k as i32), &e))
        })
    }

    pub fn dim_a(&self, k: u32) -> Result<usize, VarietyError> {
        Ok(self.coord(k)?.dim())
    }

    /// `I_k` in canonical form inside `P_k`.
    pub fn ideal(&self, k: u32) -> Result<Arc<Subspace>, VarietyError> {
        self.ideal.get_or_try(&k, || {
            let c = self.coord(k)?;
            Ok(kernel(&self.field, &c.projection_matrix()))
        })
    }

    pub fn dim_i(&self, k: u32) -> Result<usize, VarietyError> {
        Ok(self.dim_p(k) - self.dim_a(k)?)
    }

    /// Multiplication by the variables from `A_{k-1}` to `A_k`.
    pub fn mult(&self, k: u32) -> Result<Arc<MultMaps>, VarietyError> {
        assert!(k >= 1, "multiplication targets positive degrees");
        self.mult.get_or_try(&k, || {
            let lo = self.coord(k - 1)?;
            let hi = self.coord(k)?;
            let cols = (0..self.n_vars())
                .map(|j| {
                    (0..lo.dim())
                        .map(|s| {
                            let m = lo.standard_monomial(s).times_var(j);
                            hi.nf_of_monomial(&m).expect("product has degree k").clone()
                        })
                        .collect()
                })
                .collect();
            Ok(MultMaps { cols })
        })
    }

    /// Class in `A_{e+k}` of `m * v` for a monomial `m` of degree `e` and `v ∈ A_k`.
    pub fn mul_monomial(&self, m: &Monomial, k: u32, v: &SparseVec) -> Result<SparseVec, VarietyError> {
        let e = m.total_degree();
        let lo = self.coord(k)?;
        let hi = self.coord(k + e)?;
        let f = &self.field;
        let mut acc = Vec::new();
        for (s, c) in v.iter() {
            let prod = lo.standard_monomial(s).mul(m);
            for (i, x) in hi.nf_of_monomial(&prod).expect("degree matches").iter() {
                acc.push((i as u32, f.mul(c, x)));
            }
        }
        Ok(SparseVec::from_pairs(f, acc))
    }

    /// Basis of `I_k` as polynomials.
    pub fn ideal_polys(&self, k: u32) -> Result<Vec<Polynomial>, VarietyError> {
        let i = self.ideal(k)?;
        let b = self.ring.basis(k as i32);
        Ok((0..i.dim()).map(|r| Polynomial::from_sparse(&self.ring, &b, &i.row(r).to_sparse())).collect())
    }

    /// Checks `dim A_k` against the analytic Hilbert function for each `k`.
    pub fn check_hilbert(&self, ks: impl IntoIterator<Item = u32>) -> Result<(), VarietyError> {
        for k in ks {
            if let Some(h) = self.oracle.expected_h0(k) {
                let got = self.dim_a(k)?;
                if got != h {
                    return Err(VarietyError::Degenerate(format!(
                        "Hilbert function mismatch in degree {k}: {got} != {h}"
                    )));
                }
            }
        }
        Ok(())
    }
}
