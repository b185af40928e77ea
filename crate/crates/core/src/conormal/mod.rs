//! The conormal engine. Sections of the restricted cotangent sheaf are
//! modelled as tuples `c ∈ V ⊗ A_{k-1}` with `Σ z_j c_j = 0` in `A_k`. The
//! Jacobian submodule `N` is spanned by the differentials of the ideal
//! generators, and `H^1(I^2(k))` is the degree-`k` piece of `Sat(N) / N`.

mod betti;
mod euler;
mod square;
mod store;

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactalg::{AlgError, EchelonBuilder, Field, Row, SparseVec, Subspace, DEFAULT_RETRY_PRIMES};
use crate::memo::Memo;
use crate::rings::{Polynomial, RingError};
use crate::varieties::points::linear_times;
use crate::varieties::{EmbeddedVariety, VarietyError, DEFAULT_RETRY_BUDGET};

pub(crate) use betti::{shift, syzygies};
pub use betti::{ArtinianReduction, NormalPresentation};
pub use euler::{EulerSpace, TProfile};
pub use square::SquarePiece;
pub use store::{PieceKey, PieceStore, StoredPiece};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SaturationConfig {
    /// Number of consecutive equal dimensions that end a saturation chain.
    pub window: u32,
    /// Largest multiplier degree tried before giving up.
    pub m_cap: u32,
    /// Seed for the random linear forms used by the engine.
    pub seed: u64,
    /// Primes used to confirm nonzero answers, first one that differs from
    /// the working prime is taken.
    pub confirm_primes: Vec<u64>,
    pub retry_budget: u32,
}

impl Default for SaturationConfig {
    fn default() -> Self {
        SaturationConfig {
            window: 2,
            m_cap: 6,
            seed: 0,
            confirm_primes: DEFAULT_RETRY_PRIMES.to_vec(),
            retry_budget: DEFAULT_RETRY_BUDGET,
        }
    }
}

#[derive(Debug, Error)]
pub enum ConormalError {
    #[error("saturation in degree {k} did not stabilize within {m_cap} steps")]
    Unstable { k: u32, m_cap: u32 },
    #[error("degenerate random choice: {0}")]
    Degenerate(String),
    #[error("invalid input: {0}")]
    BadInput(String),
    #[error("model mismatch: {0}")]
    ModelMismatch(String),
    #[error(transparent)]
    Variety(#[from] VarietyError),
    #[error(transparent)]
    Alg(#[from] AlgError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

pub type Result<T> = std::result::Result<T, ConormalError>;

/// Degree-`k` piece of the Jacobian submodule together with its saturation.
#[derive(Clone, Debug)]
pub struct ConormalPiece {
    pub degree: u32,
    pub n: Arc<Subspace>,
    pub sat: Arc<Subspace>,
    /// Multiplier degree at which the chain became constant.
    pub stabilization_m: u32,
    /// `dim S_m` for every step that was computed.
    pub chain_dims: Vec<usize>,
}

impl ConormalPiece {
    pub fn h1(&self) -> usize {
        self.sat.dim() - self.n.dim()
    }
}

/// A value of `h^1(I^2(k))` with the primes it was computed under.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct H1Value {
    pub k: u32,
    pub value: usize,
    pub primes: Vec<u64>,
    pub unlucky_prime: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StarVerdict {
    Holds,
    Fails,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarReport {
    pub dims: BTreeMap<u32, usize>,
    pub verdict: StarVerdict,
    pub unstable: Vec<u32>,
    pub unlucky: Vec<u32>,
}

/// Division by the linear form `ℓ` from `A_d` to `A_{d-1}`.
///
/// Rows `[ℓ e_s | e_s]` are echelonised; since `ℓ` is injective every pivot
/// lies in the left part. A vector `u ∈ A_d` then splits into a residual on
/// the free columns and the quotient `Σ u[piv_r] pre_r`.
struct Divider {
    lo: usize,
    pivot_of: Vec<Option<usize>>,
    free_pos: Vec<Option<usize>>,
    n_free: usize,
    left: Vec<SparseVec>,
    pre: Vec<SparseVec>,
}

impl Divider {
    fn split(&self, field: &Field, u: &[(usize, u32)], res: &mut [u64], q: &mut [u64]) {
        let p = field.p();
        for &(c, v) in u {
            match self.pivot_of[c] {
                Some(r) => {
                    for (i, x) in self.pre[r].iter() {
                        q[i] = u64::from(field.reduce(q[i] + u64::from(v) * u64::from(x)));
                    }
                    let nv = p - u64::from(v);
                    for (i, x) in self.left[r].iter() {
                        if let Some(fp) = self.free_pos[i] {
                            res[fp] = u64::from(field.reduce(res[fp] + nv * u64::from(x)));
                        }
                    }
                }
                None => {
                    let fp = self.free_pos[c].expect("free column");
                    res[fp] = u64::from(field.reduce(res[fp] + u64::from(v)));
                }
            }
        }
    }
}

pub struct Conormal {
    x: Arc<EmbeddedVariety>,
    cfg: SaturationConfig,
    ell: Vec<u32>,
    reduction: Memo<(), ArtinianReduction>,
    gens: Memo<u32, Vec<SparseVec>>,
    jac_gens: Memo<u32, Vec<SparseVec>>,
    jac: Memo<u32, Subspace>,
    euler: Memo<u32, Subspace>,
    dividers: Memo<u32, Divider>,
    chain: Memo<(u32, u32), Subspace>,
    sat: Memo<u32, ConormalPiece>,
    confirm: Mutex<Option<Arc<Conormal>>>,
    store: Option<Arc<dyn PieceStore>>,
}

impl Conormal {
    pub fn new(x: Arc<EmbeddedVariety>, cfg: SaturationConfig) -> Result<Self> {
        if cfg.window == 0 || cfg.m_cap == 0 {
            return Err(ConormalError::BadInput("window and m_cap must be positive".into()));
        }
        let p = x.field().p();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x00c0_4e0a);
        let ell = (0..x.n_vars()).map(|_| rng.gen_range(1..p) as u32).collect();
        Ok(Conormal {
            x,
            cfg,
            ell,
            reduction: Memo::new(),
            gens: Memo::new(),
            jac_gens: Memo::new(),
            jac: Memo::new(),
            euler: Memo::new(),
            dividers: Memo::new(),
            chain: Memo::new(),
            sat: Memo::new(),
            confirm: Mutex::new(None),
            store: None,
        })
    }

    /// Reads and writes saturation pieces through `store`.
    pub fn with_store(mut self, store: Arc<dyn PieceStore>) -> Self {
        self.store = Some(store);
        self
    }

    fn piece_key(&self, k: u32) -> PieceKey {
        PieceKey {
            variety: self.x.spec().clone(),
            quantity: "conormal-saturation".into(),
            degree: k,
            prime: self.field().p(),
            window: self.cfg.window,
            m_cap: self.cfg.m_cap,
            seed: self.cfg.seed,
        }
    }

    /// A stored piece is used only if it contains `N_k` inside `W_k`.
    fn load_piece(&self, k: u32, n: &Arc<Subspace>) -> Option<ConormalPiece> {
        if self.x.is_adhoc() {
            return None;
        }
        let stored = self.store.as_ref()?.load(&self.piece_key(k))?;
        if stored.sat.ambient_dim() != n.ambient_dim() || !n.is_subspace_of(self.field(), &stored.sat).ok()? {
            return None;
        }
        Some(ConormalPiece {
            degree: k,
            n: Arc::clone(n),
            sat: Arc::new(stored.sat),
            stabilization_m: stored.stabilization_m,
            chain_dims: stored.chain_dims,
        })
    }

    pub fn variety(&self) -> &Arc<EmbeddedVariety> {
        &self.x
    }

    pub fn config(&self) -> &SaturationConfig {
        &self.cfg
    }

    pub fn field(&self) -> &Field {
        self.x.field()
    }

    fn n(&self) -> usize {
        self.x.n_vars()
    }

    fn dim_a(&self, k: i64) -> Result<usize> {
        if k < 0 {
            Ok(0)
        } else {
            Ok(self.x.dim_a(k as u32)?)
        }
    }

    /// Dimension of `W_k = V ⊗ A_{k-1}`.
    pub fn w_dim(&self, k: u32) -> Result<usize> {
        Ok(self.n() * self.dim_a(i64::from(k) - 1)?)
    }

    pub fn ideal_piece(&self, k: u32) -> Result<Arc<Subspace>> {
        Ok(self.x.ideal(k)?)
    }

    pub fn coordinate_piece(&self, k: u32) -> Result<Arc<crate::varieties::CoordPiece>> {
        Ok(self.x.coord(k)?)
    }

    /// Spanning vectors `g · (∂_j f)_j` of `N_k`, where `f` runs over the
    /// minimal generators of degree `e <= k` and `g` over standard monomials
    /// of degree `k - e`.
    pub(crate) fn jacobian_generators(&self, k: u32) -> Result<Arc<Vec<SparseVec>>> {
        self.jac_gens.get_or_try(&k, || {
            let mut out = Vec::new();
            for e in 2..=k {
                let gens = self.generators(e)?;
                out.extend(self.jacobian_vectors(k, e, &gens)?);
            }
            Ok(out)
        })
    }

    /// `g · df` for each `f` in `forms` (vectors of `P_e`) and each standard
    /// monomial `g` of `A_{k-e}`.
    pub(crate) fn jacobian_vectors(&self, k: u32, e: u32, forms: &[SparseVec]) -> Result<Vec<SparseVec>> {
        let f = self.field();
        let n = self.n();
        if e > k || e == 0 || forms.is_empty() {
            return Ok(Vec::new());
        }
        let lo = self.x.dim_a(k - 1)?;
        let ring = self.x.ring();
        let pe = ring.basis(e as i32);
        let below = self.x.coord(e - 1)?;
        let mults = self.x.coord(k - e)?;
        let mut out = Vec::with_capacity(forms.len() * mults.dim());
        for form in forms {
            let poly = Polynomial::from_sparse(ring, &pe, form);
            let grads: Vec<SparseVec> = (0..n)
                .map(|j| below.reduce_poly(f, &poly.derivative(f, j)))
                .collect::<std::result::Result<_, _>>()?;
            for g in 0..mults.dim() {
                let m = mults.standard_monomial(g);
                let mut pairs = Vec::new();
                for (j, d) in grads.iter().enumerate() {
                    if d.is_zero() {
                        continue;
                    }
                    let prod = self.x.mul_monomial(m, e - 1, d)?;
                    pairs.extend(prod.iter().map(|(s, v)| ((j * lo + s) as u32, v)));
                }
                out.push(SparseVec::from_pairs(f, pairs));
            }
        }
        Ok(out)
    }

    /// `N_k ⊆ W_k` in canonical form.
    pub fn jacobian_piece(&self, k: u32) -> Result<Arc<Subspace>> {
        self.jac.get_or_try(&k, || {
            let w = self.w_dim(k)?;
            if w == 0 {
                return Ok(Subspace::zero(0));
            }
            let gens = self.jacobian_generators(k)?;
            Ok(Subspace::span_sparse(self.field(), w, gens.iter()))
        })
    }

    fn divider(&self, d: u32) -> Result<Arc<Divider>> {
        self.dividers.get_or_try(&d, || {
            let f = self.field();
            let lo = self.x.dim_a(d - 1)?;
            let hi = self.x.dim_a(d)?;
            let mult = self.x.mult(d)?;
            let mut b = EchelonBuilder::new(*f, hi + lo);
            for s in 0..lo {
                let img = linear_times(f, &mult.cols, &self.ell, s);
                let mut pairs: Vec<(u32, u32)> = img.iter().map(|(i, v)| (i as u32, v)).collect();
                pairs.push(((hi + s) as u32, 1));
                b.push_sparse(&SparseVec::from_pairs(f, pairs));
            }
            let (pivots, rows) = b.finish();
            if pivots.len() != lo || pivots.iter().any(|&c| c >= hi) {
                return Err(ConormalError::Degenerate(format!("linear form is a zero divisor in degree {d}")));
            }
            let mut pivot_of = vec![None; hi];
            let mut left = Vec::with_capacity(lo);
            let mut pre = Vec::with_capacity(lo);
            for (r, (&c, row)) in pivots.iter().zip(&rows).enumerate() {
                pivot_of[c] = Some(r);
                let sv = row.to_sparse();
                let (l, q): (Vec<_>, Vec<_>) = sv.iter().partition(|&(i, _)| i < hi);
                left.push(SparseVec::from_pairs(f, l.into_iter().map(|(i, v)| (i as u32, v)).collect()));
                pre.push(SparseVec::from_pairs(f, q.into_iter().map(|(i, v)| ((i - hi) as u32, v)).collect()));
            }
            let mut free_pos = vec![None; hi];
            let mut n_free = 0;
            for (c, slot) in free_pos.iter_mut().enumerate() {
                if pivot_of[c].is_none() {
                    *slot = Some(n_free);
                    n_free += 1;
                }
            }
            Ok(Divider { lo, pivot_of, free_pos, n_free, left, pre })
        })
    }

    /// `S_m(k)`: elements of `W_k` sent into `N_{k+m}` by `ℓ^m`.
    pub fn chain_step(&self, k: u32, m: u32) -> Result<Arc<Subspace>> {
        if m == 0 {
            return self.jacobian_piece(k);
        }
        self.chain.get_or_try(&(k, m), || {
            let f = self.field();
            let n = self.n();
            let div = self.divider(k)?;
            let hi = self.x.dim_a(k)?;
            let r_len = n * div.n_free;
            let q_len = n * div.lo;
            let src: Vec<SparseVec> = if m == 1 {
                self.jacobian_generators(k + 1)?.as_ref().clone()
            } else {
                self.chain_step(k + 1, m - 1)?.rows().iter().map(Row::to_sparse).collect()
            };
            let mut b = EchelonBuilder::new(*f, r_len + q_len);
            let mut blocks: Vec<Vec<(usize, u32)>> = vec![Vec::new(); n];
            for u in &src {
                for blk in blocks.iter_mut() {
                    blk.clear();
                }
                for (i, v) in u.iter() {
                    blocks[i / hi].push((i % hi, v));
                }
                let mut row = vec![0u64; r_len + q_len];
                for (j, blk) in blocks.iter().enumerate() {
                    if blk.is_empty() {
                        continue;
                    }
                    let (res, q) = row.split_at_mut(r_len);
                    div.split(
                        f,
                        blk,
                        &mut res[j * div.n_free..(j + 1) * div.n_free],
                        &mut q[j * div.lo..(j + 1) * div.lo],
                    );
                }
                b.push_acc(row);
            }
            let (pivots, rows) = b.finish();
            let mut out_p = Vec::new();
            let mut out_r = Vec::new();
            for (&c, row) in pivots.iter().zip(&rows) {
                if c >= r_len {
                    out_p.push(c - r_len);
                    out_r.push(Row::from_dense(row.to_dense(r_len + q_len)[r_len..].to_vec()));
                }
            }
            Ok(Subspace::from_parts(q_len, out_p, out_r))
        })
    }

    /// Saturation of the Jacobian submodule in degree `k`.
    pub fn conormal_saturation(&self, k: u32) -> Result<Arc<ConormalPiece>> {
        self.sat.get_or_try(&k, || {
            let n = self.jacobian_piece(k)?;
            if k <= 1 || self.euler_module(k)?.dim() == 0 {
                return Ok(ConormalPiece { degree: k, n: Arc::clone(&n), sat: n, stabilization_m: 0, chain_dims: vec![0] });
            }
            if let Some(piece) = self.load_piece(k, &n) {
                return Ok(piece);
            }
            let w = self.cfg.window as usize;
            let mut dims = vec![n.dim()];
            for m in 1..=self.cfg.m_cap {
                dims.push(self.chain_step(k, m)?.dim());
                let tail = &dims[dims.len().saturating_sub(w)..];
                if tail.len() == w && tail.iter().all(|&d| d == tail[0]) {
                    let stab = m + 1 - self.cfg.window;
                    let piece = ConormalPiece {
                        degree: k,
                        n,
                        sat: self.chain_step(k, stab)?,
                        stabilization_m: stab,
                        chain_dims: dims,
                    };
                    if let (Some(store), false) = (&self.store, self.x.is_adhoc()) {
                        let stored = StoredPiece {
                            sat: (*piece.sat).clone(),
                            stabilization_m: stab,
                            chain_dims: piece.chain_dims.clone(),
                        };
                        store.save(&self.piece_key(k), &stored);
                    }
                    return Ok(piece);
                }
            }
            Err(ConormalError::Unstable { k, m_cap: self.cfg.m_cap })
        })
    }

    /// The same engine for the variety rebuilt over a confirmation prime.
    fn confirming(&self) -> Result<Arc<Conormal>> {
        let mut slot = self.confirm.lock().expect("confirm lock");
        if let Some(c) = slot.as_ref() {
            return Ok(Arc::clone(c));
        }
        let p = self.field().p();
        let q = self
            .cfg
            .confirm_primes
            .iter()
            .copied()
            .find(|&q| q != p)
            .ok_or_else(|| ConormalError::BadInput("no confirmation prime distinct from the working prime".into()))?;
        let y = self.x.rebuild(&Field::new(q), self.cfg.retry_budget)?;
        let mut c = Conormal::new(Arc::new(y), self.cfg.clone())?;
        if let Some(store) = &self.store {
            c = c.with_store(Arc::clone(store));
        }
        let c = Arc::new(c);
        *slot = Some(Arc::clone(&c));
        Ok(c)
    }

    /// `dim H^1(I^2(k))`, recomputed under a second prime when nonzero.
    pub fn h1_ideal_square(&self, k: u32) -> Result<H1Value> {
        let p = self.field().p();
        let value = self.conormal_saturation(k)?.h1();
        if value == 0 {
            return Ok(H1Value { k, value, primes: vec![p], unlucky_prime: false });
        }
        let other = self.confirming()?;
        let second = other.conormal_saturation(k)?.h1();
        Ok(H1Value {
            k,
            value: value.min(second),
            primes: vec![p, other.field().p()],
            unlucky_prime: value != second,
        })
    }

    /// Tests `h^1(I^2(k)) = 0` for `3 <= k <= k_max`.
    pub fn star_check(&self, k_max: u32) -> Result<StarReport> {
        let mut dims = BTreeMap::new();
        let mut unstable = Vec::new();
        let mut unlucky = Vec::new();
        for k in 3..=k_max {
            match self.h1_ideal_square(k) {
                Ok(h) => {
                    if h.unlucky_prime {
                        unlucky.push(k);
                    }
                    dims.insert(k, h.value);
                }
                Err(ConormalError::Unstable { .. }) => unstable.push(k),
                Err(e) => return Err(e),
            }
        }
        let verdict = if dims.values().any(|&d| d > 0) {
            StarVerdict::Fails
        } else if !unstable.is_empty() {
            StarVerdict::Inconclusive
        } else {
            StarVerdict::Holds
        };
        Ok(StarReport { dims, verdict, unstable, unlucky })
    }
}
