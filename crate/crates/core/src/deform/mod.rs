//! Weight `-1` deformations of a quadratically presented ideal.
//!
//! A presentation `P^ℓ --r--> P^k --f--> P` with quadrics `f` and linear
//! syzygies `r` is perturbed to `F = f + t f1 + t^2 f2`, with `f1` linear and
//! `f2` constant, while the relations follow as `R = r + t r1` with constant
//! `r1`. The lift exists to first order when `f1 r + f r1 = 0`, to second
//! order when `f1 r1 + f2 r = 0`, and stops there once `f2 r1 = 0`.

mod flat;
mod plane;

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use flat::{FiberCheck, FlatnessDegree, FlatnessReport};
pub use plane::{plane_curve_extension, plane_extension_with_section, SectionCheck, SectionDegree};

use crate::conormal::{shift, syzygies, Conormal, ConormalError};
use crate::exactalg::{kernel, solve, AlgError, Field, Matrix, SparseVec, Subspace};
use crate::rings::{DegreeBasis, Monomial, Polynomial, RingError};
use crate::varieties::{EmbeddedVariety, VarietyError};

#[derive(Debug, Error)]
pub enum DeformError {
    #[error("presentation rejected: {0}")]
    Reject(String),
    #[error("no second-order lift: f2 r = -f1 r1 has no constant solution")]
    NoLift,
    #[error("f1 is not a first-order deformation: {0}")]
    NotFirstOrder(String),
    #[error("invalid state: {0}")]
    BadState(String),
    #[error("identity failed: {0}")]
    Identity(String),
    #[error(transparent)]
    Conormal(#[from] ConormalError),
    #[error(transparent)]
    Variety(#[from] VarietyError),
    #[error(transparent)]
    Alg(#[from] AlgError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

pub type Result<T> = std::result::Result<T, DeformError>;

/// `l · v` for `l ∈ P_1` and `v ∈ P_d`, in the basis of `P_{d+1}`.
fn times_linear(field: &Field, p1: &DegreeBasis, from: &DegreeBasis, to: &DegreeBasis, l: &SparseVec, v: &SparseVec) -> SparseVec {
    let mut pairs = Vec::new();
    for (j, c) in l.iter() {
        for (t, x) in shift(field, from, to, v, p1.get(j)).iter() {
            pairs.push((t as u32, field.mul(c, x)));
        }
    }
    SparseVec::from_pairs(field, pairs)
}

fn sum(field: &Field, vs: impl IntoIterator<Item = SparseVec>) -> SparseVec {
    let pairs = vs.into_iter().flat_map(|v| v.iter().map(|(i, c)| (i as u32, c)).collect::<Vec<_>>()).collect();
    SparseVec::from_pairs(field, pairs)
}

/// Quadrics `f` spanning `I_2` and the linear syzygies `r` among them.
pub struct Presentation {
    x: Arc<EmbeddedVariety>,
    validated: bool,
    f: Vec<SparseVec>,
    /// `r[i][λ] ∈ P_1`.
    r: Vec<Vec<SparseVec>>,
    ell: usize,
}

impl std::fmt::Debug for Presentation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Presentation")
            .field("variety", &self.x.label())
            .field("k", &self.k())
            .field("ell", &self.ell)
            .field("validated", &self.validated)
            .finish()
    }
}

impl Presentation {
    /// The canonical presentation of a variety whose ideal is generated by
    /// quadrics with linear first syzygies in degree 4.
    pub fn new(c: &Conormal) -> Result<Self> {
        let np = c.normal_presentation_check(4)?;
        if !np.quadratic_generation {
            return Err(DeformError::Reject(format!("{} has minimal generators of degree 3 or 4", c.variety().label())));
        }
        if !np.linear_syzygies {
            return Err(DeformError::Reject(format!("{} has non-linear syzygies in degree 4", c.variety().label())));
        }
        Self::build(c.variety().clone(), true)
    }

    /// The same construction without the normal presentation check. The
    /// lifting steps still apply, but the flatness check then works degree by
    /// degree and does not use the shortcut for degree 4.
    pub fn unvalidated(x: Arc<EmbeddedVariety>) -> Result<Self> {
        Self::build(x, false)
    }

    fn build(x: Arc<EmbeddedVariety>, validated: bool) -> Result<Self> {
        let field = *x.field();
        let f: Vec<SparseVec> = x.ideal(2)?.rows().iter().map(|r| r.to_sparse()).collect();
        if f.is_empty() {
            return Err(DeformError::Reject(format!("{} lies on no quadric", x.label())));
        }
        let n1 = x.ring().basis(1).len();
        let syz = syzygies(&x, &f, 2, 1);
        let k = f.len();
        let mut r = vec![Vec::with_capacity(syz.dim()); k];
        for row in syz.rows() {
            let mut parts = vec![Vec::new(); k];
            for (idx, c) in row.to_sparse().iter() {
                parts[idx / n1].push(((idx % n1) as u32, c));
            }
            for (i, p) in parts.into_iter().enumerate() {
                r[i].push(SparseVec::from_pairs(&field, p));
            }
        }
        let pres = Presentation { x, validated, f, r, ell: syz.dim() };
        for lambda in 0..pres.ell {
            let col = pres.linear_combination(lambda, |i| pres.f[i].clone(), 2);
            if !col.is_zero() {
                return Err(DeformError::Identity(format!("f r != 0 in column {lambda}")));
            }
        }
        Ok(pres)
    }

    pub fn variety(&self) -> &Arc<EmbeddedVariety> {
        &self.x
    }

    pub fn field(&self) -> &Field {
        self.x.field()
    }

    pub fn validated(&self) -> bool {
        self.validated
    }

    /// Number of quadrics.
    pub fn k(&self) -> usize {
        self.f.len()
    }

    /// Number of linear syzygies.
    pub fn ell(&self) -> usize {
        self.ell
    }

    fn n_vars(&self) -> usize {
        self.x.n_vars()
    }

    pub fn f(&self) -> &[SparseVec] {
        &self.f
    }

    /// `r[i][λ]`, linear forms.
    pub fn r(&self) -> &[Vec<SparseVec>] {
        &self.r
    }

    pub fn f_polys(&self) -> Vec<Polynomial> {
        let ring = self.x.ring();
        let b = ring.basis(2);
        self.f.iter().map(|v| Polynomial::from_sparse(ring, &b, v)).collect()
    }

    /// `Σ_i r[i][λ] · g(i)` for forms `g(i)` of degree `d`.
    fn linear_combination(&self, lambda: usize, g: impl Fn(usize) -> SparseVec, d: u32) -> SparseVec {
        let ring = self.x.ring();
        let (p1, pd, pe) = (ring.basis(1), ring.basis(d as i32), ring.basis(d as i32 + 1));
        let field = self.field();
        sum(field, (0..self.k()).map(|i| times_linear(field, &p1, &pd, &pe, &self.r[i][lambda], &g(i))))
    }

    /// Row `(∂_j f_1, ..., ∂_j f_k)` flattened to `i · n + μ`.
    fn derivation(&self, j: usize) -> SparseVec {
        let field = self.field();
        let ring = self.x.ring();
        let (p1, p2) = (ring.basis(1), ring.basis(2));
        let n1 = p1.len();
        let zj = Monomial::var(self.n_vars(), j);
        let mut pairs = Vec::new();
        for (i, fi) in self.f.iter().enumerate() {
            for (mu, c) in fi.iter() {
                let m = p2.get(mu);
                let e = m.exps()[j];
                if e > 0 {
                    let rest = m.div(&zj).expect("variable divides");
                    let pos = p1.index_of(&rest).expect("degree one");
                    pairs.push(((i * n1 + pos) as u32, field.mul(c, u32::from(e))));
                }
            }
        }
        SparseVec::from_pairs(field, pairs)
    }

    /// Rows `D(f)` for the constant derivations `D`, inside `P_1^k`.
    pub fn trivial_first_order(&self) -> Subspace {
        let rows: Vec<SparseVec> = (0..self.n_vars()).map(|j| self.derivation(j)).collect();
        Subspace::span_sparse(self.field(), self.k() * self.n_vars(), rows.iter())
    }

    /// All `f1 ∈ P_1^k` with `f1 r ≡ 0` modulo `I_2`, and a canonical set of
    /// representatives of the quotient by the trivial deformations.
    pub fn first_order_space(&self) -> Result<FirstOrderSpace> {
        let field = *self.field();
        let ring = self.x.ring();
        let (p1, p2) = (ring.basis(1), ring.basis(2));
        let n1 = p1.len();
        let c2 = self.x.coord(2)?;
        let a2 = c2.dim();
        let mut cols = Vec::with_capacity(self.k() * n1);
        for i in 0..self.k() {
            for mu in 0..n1 {
                let m = p1.get(mu);
                let mut pairs = Vec::new();
                for (lambda, l) in self.r[i].iter().enumerate() {
                    for (s, v) in c2.reduce(&field, &shift(&field, &p1, &p2, l, m)).iter() {
                        pairs.push(((lambda * a2 + s) as u32, v));
                    }
                }
                cols.push(SparseVec::from_pairs(&field, pairs));
            }
        }
        let space = if self.ell * a2 == 0 {
            Subspace::full(self.k() * n1)
        } else {
            kernel(&field, &Matrix::from_rows(self.ell * a2, cols).transpose())
        };
        let trivial = self.trivial_first_order();
        if !trivial.is_subspace_of(&field, &space)? {
            return Err(DeformError::Identity("trivial deformations fail the first-order equation".into()));
        }
        let mut representatives = Vec::new();
        for idx in space.complement_rows(&trivial) {
            let row = space.row_dense(idx);
            representatives.push(SparseVec::from_dense(&trivial.reduce(&field, &row)?));
        }
        Ok(FirstOrderSpace { space, trivial, representatives })
    }
}

/// First-order deformations of weight `-1`.
#[derive(Clone, Debug)]
pub struct FirstOrderSpace {
    /// Solutions `f1` of the first-order equation, in `P_1^k`.
    pub space: Subspace,
    pub trivial: Subspace,
    /// Reduced modulo `trivial`, one per class of a basis of the quotient.
    pub representatives: Vec<SparseVec>,
}

impl FirstOrderSpace {
    pub fn dim(&self) -> usize {
        self.representatives.len()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Status {
    pub first_order: bool,
    pub second_order: bool,
    pub terminated: bool,
}

/// The matrices `f1`, `r1`, `f2` over a fixed presentation.
#[derive(Clone, Debug)]
pub struct DeformationState {
    presentation: Arc<Presentation>,
    /// `f1[i] ∈ P_1`.
    f1: Vec<SparseVec>,
    /// `r1[i][λ]`, constants.
    r1: Vec<Vec<u32>>,
    /// `f2[i]`, constants.
    f2: Vec<u32>,
    status: Status,
}

impl DeformationState {
    /// Starts from `f1 ∈ P_1^k` (flattened `i · n + μ`), solving for `r1`.
    pub fn first_order(presentation: Arc<Presentation>, f1: &SparseVec) -> Result<Self> {
        let pres = &*presentation;
        let field = *pres.field();
        let n1 = pres.n_vars();
        let mut parts = vec![Vec::new(); pres.k()];
        for (idx, c) in f1.iter() {
            if idx >= pres.k() * n1 {
                return Err(DeformError::BadState(format!("index {idx} outside P_1^{}", pres.k())));
            }
            parts[idx / n1].push(((idx % n1) as u32, c));
        }
        let f1: Vec<SparseVec> = parts.into_iter().map(|p| SparseVec::from_pairs(&field, p)).collect();
        let ideal = pres.x.ideal(2)?;
        let p2 = pres.x.ring().basis(2).len();
        let mut r1 = vec![vec![0u32; pres.ell]; pres.k()];
        for lambda in 0..pres.ell {
            let v = pres.linear_combination(lambda, |i| f1[i].clone(), 1);
            let coords = ideal
                .coordinates(&field, &v.to_dense(p2))?
                .ok_or_else(|| DeformError::NotFirstOrder(format!("f1 r is not in I_2 in column {lambda}")))?;
            for (i, c) in coords.into_iter().enumerate() {
                r1[i][lambda] = field.neg(c);
            }
        }
        let mut state = DeformationState {
            presentation,
            f1,
            r1,
            f2: Vec::new(),
            status: Status::default(),
        };
        state.f2 = vec![0; state.presentation.k()];
        state.status.first_order = state.first_order_defect().iter().all(SparseVec::is_zero);
        if !state.status.first_order {
            return Err(DeformError::Identity("f1 r + f r1 != 0".into()));
        }
        Ok(state)
    }

    /// A state with prescribed `f1` and `f2`, flags set by direct checks.
    /// Used for the cone and for negative controls.
    pub fn from_parts(presentation: Arc<Presentation>, f1: &SparseVec, f2: Vec<u32>) -> Result<Self> {
        if f2.len() != presentation.k() {
            return Err(DeformError::BadState(format!("f2 has {} entries, expected {}", f2.len(), presentation.k())));
        }
        let mut state = Self::first_order(presentation, f1)?;
        state.f2 = f2;
        state.status.second_order = state.second_order_defect().iter().all(SparseVec::is_zero);
        state.status.terminated = state.status.second_order && state.termination_defect().iter().all(|&c| c == 0);
        Ok(state)
    }

    /// The trivial extension `F = f`.
    pub fn cone(presentation: Arc<Presentation>) -> Result<Self> {
        let k = presentation.k();
        Self::from_parts(presentation, &SparseVec::new(), vec![0; k])
    }

    pub fn presentation(&self) -> &Arc<Presentation> {
        &self.presentation
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn f1(&self) -> &[SparseVec] {
        &self.f1
    }

    pub fn r1(&self) -> &[Vec<u32>] {
        &self.r1
    }

    pub fn f2(&self) -> &[u32] {
        &self.f2
    }

    /// Columns of `f1 r + f r1`, in `P_2`.
    fn first_order_defect(&self) -> Vec<SparseVec> {
        let pres = &*self.presentation;
        let field = pres.field();
        (0..pres.ell)
            .map(|lambda| {
                let a = pres.linear_combination(lambda, |i| self.f1[i].clone(), 1);
                let b = sum(field, (0..pres.k()).map(|i| pres.f[i].scale(field, self.r1[i][lambda])));
                sum(field, [a, b])
            })
            .collect()
    }

    /// Columns of `f1 r1 + f2 r`, in `P_1`.
    fn second_order_defect(&self) -> Vec<SparseVec> {
        let pres = &*self.presentation;
        let field = pres.field();
        (0..pres.ell)
            .map(|lambda| {
                sum(
                    field,
                    (0..pres.k()).flat_map(|i| {
                        [self.f1[i].scale(field, self.r1[i][lambda]), pres.r[i][lambda].scale(field, self.f2[i])]
                    }),
                )
            })
            .collect()
    }

    /// Entries of `f2 r1`.
    fn termination_defect(&self) -> Vec<u32> {
        let pres = &*self.presentation;
        let field = pres.field();
        (0..pres.ell)
            .map(|lambda| (0..pres.k()).fold(0, |acc, i| field.add(acc, field.mul(self.f2[i], self.r1[i][lambda]))))
            .collect()
    }

    /// Solves `f2 r = -f1 r1` for constant `f2`, then checks `f2 r1 = 0`.
    pub fn second_order_lift(&self) -> Result<Self> {
        if !self.status.first_order {
            return Err(DeformError::BadState("second-order lift needs a first-order state".into()));
        }
        let pres = &*self.presentation;
        let field = *pres.field();
        let n1 = pres.n_vars();
        let rows = pres.ell * n1;
        let mut cols = Vec::with_capacity(pres.k());
        for i in 0..pres.k() {
            let pairs = (0..pres.ell)
                .flat_map(|lambda| pres.r[i][lambda].iter().map(move |(j, c)| ((lambda * n1 + j) as u32, c)))
                .collect();
            cols.push(SparseVec::from_pairs(&field, pairs));
        }
        let m = Matrix::from_rows(rows, cols).transpose();
        let mut target = Vec::with_capacity(rows);
        for lambda in 0..pres.ell {
            let rhs = sum(&field, (0..pres.k()).map(|i| self.f1[i].scale(&field, field.neg(self.r1[i][lambda]))));
            target.extend(rhs.to_dense(n1).into_iter().map(|c| SparseVec::from_dense(&[c])));
        }
        let f2 = if rows == 0 {
            vec![0; pres.k()]
        } else {
            let sol = solve(&field, &m, &Matrix::from_rows(1, target))?.ok_or(DeformError::NoLift)?;
            (0..pres.k()).map(|i| sol.get(i, 0)).collect()
        };
        let mut next = self.clone();
        next.f2 = f2;
        next.status.second_order = next.second_order_defect().iter().all(SparseVec::is_zero);
        if !next.status.second_order {
            return Err(DeformError::Identity("f1 r1 + f2 r != 0 after solving".into()));
        }
        next.status.terminated = next.termination_defect().iter().all(|&c| c == 0);
        Ok(next)
    }
}
