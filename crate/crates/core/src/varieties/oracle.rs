use std::sync::{Arc, Mutex};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::VarietyError;
use crate::exactalg::{rref, EchelonBuilder, Field, Matrix, SparseVec, Subspace};
use crate::memo::Memo;
use crate::rings::{GradedRing, Polynomial};

/// How an oracle realizes the restriction map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Realization {
    Symbolic,
    Points,
}

pub type HilbertFn = Box<dyn Fn(u32) -> Option<usize> + Send + Sync>;

/// The restriction map `P_k -> Γ(L^k)` in fixed bases.
pub trait SectionOracle: Send + Sync {
    fn realization(&self) -> Realization;

    /// Number of rows of `restriction_matrix(k)`.
    fn target_basis_dim(&self, k: u32) -> Result<usize, VarietyError>;

    /// Rows index target coordinates, columns index the degree-`k` monomials of `P`.
    fn restriction_matrix(&self, k: u32) -> Result<Matrix, VarietyError>;

    /// Analytic value of `h^0(L^k)` when one is known.
    fn expected_h0(&self, k: u32) -> Option<usize>;

    /// The row space of the restriction matrix, which determines the ideal.
    fn row_space(&self, field: &Field, k: u32) -> Result<Subspace, VarietyError> {
        Ok(rref(field, &self.restriction_matrix(k)?))
    }
}

/// Normal forms of a target piece modulo the span of relation multiples.
struct QuotientTable {
    dim: usize,
    nf: Vec<SparseVec>,
}

/// Substitution of the variables of `P` into a graded target ring, followed
/// by reduction modulo the multiples of a list of homogeneous relations.
pub struct QuotientOracle {
    field: Field,
    p_ring: Arc<GradedRing>,
    target: Arc<GradedRing>,
    delta: Vec<i32>,
    images: Vec<Polynomial>,
    relations: Vec<Polynomial>,
    expected: HilbertFn,
    image_memo: Memo<u32, Vec<SparseVec>>,
    table_memo: Memo<u32, QuotientTable>,
}

impl QuotientOracle {
    /// `images[i]` is the image of `z_i`; all images share the multidegree `delta`.
    pub fn new(
        field: Field,
        target: Arc<GradedRing>,
        images: Vec<Polynomial>,
        relations: Vec<Polynomial>,
        expected: HilbertFn,
    ) -> Result<Self, VarietyError> {
        let delta = images
            .first()
            .and_then(Polynomial::multidegree)
            .ok_or_else(|| VarietyError::BadParameters("variable images must be nonzero forms".into()))?;
        if images.iter().any(|p| p.multidegree().as_ref() != Some(&delta)) {
            return Err(VarietyError::BadParameters("variable images must share one degree".into()));
        }
        if relations.iter().any(|r| r.multidegree().is_none()) {
            return Err(VarietyError::BadParameters("relations must be nonzero forms".into()));
        }
        Ok(QuotientOracle {
            field,
            p_ring: GradedRing::standard(images.len(), "z"),
            target,
            delta,
            images,
            relations,
            expected,
            image_memo: Memo::new(),
            table_memo: Memo::new(),
        })
    }

    pub fn target_ring(&self) -> &Arc<GradedRing> {
        &self.target
    }

    pub fn relations(&self) -> &[Polynomial] {
        &self.relations
    }

    fn target_degree(&self, k: u32) -> Vec<i32> {
        self.delta.iter().map(|&d| d * k as i32).collect()
    }

    /// Images of the degree-`k` monomials of `P` in target coordinates.
    fn images_in_degree(&self, k: u32) -> Arc<Vec<SparseVec>> {
        if let Some(v) = self.image_memo.get(&k) {
            return v;
        }
        let f = &self.field;
        let tb = self.target.degree_basis(&self.target_degree(k));
        let out: Vec<SparseVec> = if k == 0 {
            vec![SparseVec { idx: vec![0], val: vec![1] }]
        } else {
            let prev = self.images_in_degree(k - 1);
            let prev_basis = self.target.degree_basis(&self.target_degree(k - 1));
            let lower = self.p_ring.lower_table(k as i32);
            lower
                .iter()
                .map(|&(j, i)| {
                    let mut pairs = Vec::new();
                    for (t, c) in prev[i as usize].iter() {
                        let m = prev_basis.get(t);
                        for (mm, cc) in self.images[j as usize].terms() {
                            let idx = tb.index_of(&m.mul(mm)).expect("product lies in the target piece");
                            pairs.push((idx as u32, f.mul(c, cc)));
                        }
                    }
                    SparseVec::from_pairs(f, pairs)
                })
                .collect()
        };
        self.image_memo.insert(k, out)
    }

    fn table(&self, k: u32) -> Result<Arc<QuotientTable>, VarietyError> {
        self.table_memo.get_or_try(&k, || {
            let f = &self.field;
            let deg = self.target_degree(k);
            let tb = self.target.degree_basis(&deg);
            let n = tb.len();
            let mut b = EchelonBuilder::new(*f, n);
            for g in &self.relations {
                let gd = g.multidegree().expect("checked at construction");
                let sd: Vec<i32> = deg.iter().zip(&gd).map(|(a, b)| a - b).collect();
                let sb = self.target.degree_basis(&sd);
                for s in sb.monomials() {
                    let pairs: Vec<(u32, u32)> = g
                        .terms()
                        .map(|(m, c)| (tb.index_of(&m.mul(s)).expect("multiple lies in the piece") as u32, c))
                        .collect();
                    b.push_sparse(&SparseVec::from_pairs(f, pairs));
                }
            }
            let q = Subspace::from_builder(b);
            let free = q.free_cols();
            let mut pos = vec![u32::MAX; n];
            for (i, &c) in free.iter().enumerate() {
                pos[c] = i as u32;
            }
            let mut nf = vec![SparseVec::new(); n];
            for &c in &free {
                nf[c] = SparseVec { idx: vec![pos[c]], val: vec![1] };
            }
            for (r, &pc) in q.pivot_cols().iter().enumerate() {
                let mut pairs = Vec::new();
                q.row(r).for_each_nonzero(|i, v| {
                    if i != pc {
                        pairs.push((pos[i], f.neg(v)));
                    }
                });
                nf[pc] = SparseVec::from_pairs(f, pairs);
            }
            Ok(QuotientTable { dim: free.len(), nf })
        })
    }
}

impl SectionOracle for QuotientOracle {
    fn realization(&self) -> Realization {
        Realization::Symbolic
    }

    fn target_basis_dim(&self, k: u32) -> Result<usize, VarietyError> {
        Ok(self.table(k)?.dim)
    }

    fn restriction_matrix(&self, k: u32) -> Result<Matrix, VarietyError> {
        let f = &self.field;
        let table = self.table(k)?;
        let imgs = self.images_in_degree(k);
        let mut trip = Vec::new();
        for (mu, img) in imgs.iter().enumerate() {
            let mut pairs = Vec::new();
            for (t, c) in img.iter() {
                for (r, v) in table.nf[t].iter() {
                    pairs.push((r as u32, f.mul(c, v)));
                }
            }
            for (r, v) in SparseVec::from_pairs(f, pairs).iter() {
                trip.push((r, mu, v));
            }
        }
        Ok(Matrix::from_triplets(f, table.dim, imgs.len(), trip))
    }

    fn expected_h0(&self, k: u32) -> Option<usize> {
        (self.expected)(k)
    }
}

pub type Sampler = Box<dyn Fn(&mut ChaCha8Rng) -> Option<Vec<u32>> + Send + Sync>;

enum PointSource {
    Fixed(Vec<Vec<u32>>),
    Sampled { sampler: Sampler, state: Mutex<(ChaCha8Rng, Vec<Vec<u32>>)> },
}

/// Evaluation of `P_k` at points of the affine cone over `X`.
///
/// Sampled points are drawn from one deterministic stream, so point `i` is the
/// same no matter which degree asked for it first. The number of points used
/// in degree `k` grows until adding a further 20% leaves the rank unchanged.
pub struct PointsOracle {
    field: Field,
    p_ring: Arc<GradedRing>,
    source: PointSource,
    expected: HilbertFn,
    used: Memo<u32, usize>,
}

const MAX_SAMPLE_FAILURES: usize = 10_000;

impl PointsOracle {
    pub fn sampled(field: Field, n_vars: usize, seed: u64, sampler: Sampler, expected: HilbertFn) -> Self {
        PointsOracle {
            field,
            p_ring: GradedRing::standard(n_vars, "z"),
            source: PointSource::Sampled {
                sampler,
                state: Mutex::new((ChaCha8Rng::seed_from_u64(seed), Vec::new())),
            },
            expected,
            used: Memo::new(),
        }
    }

    /// A finite point set that is itself the variety.
    pub fn fixed(field: Field, n_vars: usize, points: Vec<Vec<u32>>, expected: HilbertFn) -> Self {
        PointsOracle {
            field,
            p_ring: GradedRing::standard(n_vars, "z"),
            source: PointSource::Fixed(points),
            expected,
            used: Memo::new(),
        }
    }

    fn points(&self, n: usize) -> Result<Vec<Vec<u32>>, VarietyError> {
        match &self.source {
            PointSource::Fixed(pts) => Ok(pts.iter().take(n).cloned().collect()),
            PointSource::Sampled { sampler, state } => {
                let mut st = state.lock().expect("point stream lock");
                let (rng, pts) = &mut *st;
                let mut failures = 0;
                while pts.len() < n {
                    match sampler(rng) {
                        Some(p) => pts.push(p),
                        None => {
                            failures += 1;
                            if failures > MAX_SAMPLE_FAILURES {
                                return Err(VarietyError::NoPointsFound);
                            }
                        }
                    }
                }
                Ok(pts[..n].to_vec())
            }
        }
    }

    fn eval_rows(&self, k: u32, pts: &[Vec<u32>]) -> Vec<Vec<u32>> {
        pts.iter().map(|p| self.p_ring.monomial_values(&self.field, k as i32, p)).collect()
    }

    /// Saturated row space and the number of points it took.
    fn saturate(&self, k: u32) -> Result<(Subspace, usize), VarietyError> {
        let dim_p = self.p_ring.basis(k as i32).len();
        if let PointSource::Fixed(pts) = &self.source {
            let rows = self.eval_rows(k, pts);
            return Ok((Subspace::span_dense(&self.field, dim_p, rows.iter()), pts.len()));
        }
        let guess = self.expected_h0(k).unwrap_or(dim_p.min(16));
        let mut n = (guess * 6).div_ceil(5).max(8);
        let mut b = EchelonBuilder::new(self.field, dim_p);
        let first = self.points(n)?;
        for r in self.eval_rows(k, &first) {
            b.push_dense(&r);
        }
        let mut rank = b.rank();
        loop {
            if rank == dim_p {
                return Ok((Subspace::from_builder(b), n));
            }
            let extra = n.div_ceil(5).max(1);
            let pts = self.points(n + extra)?;
            for r in self.eval_rows(k, &pts[n..]) {
                b.push_dense(&r);
            }
            let new_rank = b.rank();
            n += extra;
            if new_rank == rank {
                return Ok((Subspace::from_builder(b), n));
            }
            rank = new_rank;
            if n > 4 * dim_p + 64 {
                return Err(VarietyError::RankUnsaturated { k });
            }
        }
    }

    pub fn is_fixed(&self) -> bool {
        matches!(self.source, PointSource::Fixed(_))
    }
}

impl SectionOracle for PointsOracle {
    fn realization(&self) -> Realization {
        Realization::Points
    }

    fn target_basis_dim(&self, k: u32) -> Result<usize, VarietyError> {
        if let Some(n) = self.used.get(&k) {
            return Ok(*n);
        }
        let (_, n) = self.saturate(k)?;
        Ok(*self.used.insert(k, n))
    }

    fn restriction_matrix(&self, k: u32) -> Result<Matrix, VarietyError> {
        let n = self.target_basis_dim(k)?;
        let pts = self.points(n)?;
        let dim_p = self.p_ring.basis(k as i32).len();
        Ok(Matrix::from_dense(dim_p, &self.eval_rows(k, &pts)))
    }

    fn expected_h0(&self, k: u32) -> Option<usize> {
        (self.expected)(k)
    }

    fn row_space(&self, _field: &Field, k: u32) -> Result<Subspace, VarietyError> {
        let (s, n) = self.saturate(k)?;
        self.used.insert(k, n);
        Ok(s)
    }
}
