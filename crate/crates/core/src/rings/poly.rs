use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::Rng;

use super::ring::{DegreeBasis, GradedRing, Monomial};
use super::RingError;
use crate::exactalg::{Field, SparseVec};

/// A sparse polynomial with coefficients in a prime field.
#[derive(Clone)]
pub struct Polynomial {
    ring: Arc<GradedRing>,
    terms: BTreeMap<Monomial, u32>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.ring, &other.ring) && self.terms == other.terms
    }
}

impl Eq for Polynomial {}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names = self.ring.variables();
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for (v, &e) in names.iter().zip(m.exps()) {
                match e {
                    0 => {}
                    1 => write!(f, "*{}", v.name)?,
                    _ => write!(f, "*{}^{e}", v.name)?,
                }
            }
        }
        Ok(())
    }
}

impl Polynomial {
    pub fn zero(ring: &Arc<GradedRing>) -> Self {
        Polynomial { ring: Arc::clone(ring), terms: BTreeMap::new() }
    }

    pub fn constant(ring: &Arc<GradedRing>, c: u32) -> Self {
        Polynomial::monomial(ring, Monomial::one(ring.n_vars()), c)
    }

    pub fn var(ring: &Arc<GradedRing>, i: usize) -> Self {
        Polynomial::monomial(ring, Monomial::var(ring.n_vars(), i), 1)
    }

    pub fn monomial(ring: &Arc<GradedRing>, m: Monomial, c: u32) -> Self {
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert(m, c);
        }
        Polynomial { ring: Arc::clone(ring), terms }
    }

    /// Sums the given terms, dropping zero coefficients.
    pub fn from_terms(ring: &Arc<GradedRing>, field: &Field, terms: impl IntoIterator<Item = (Monomial, u32)>) -> Self {
        let mut p = Polynomial::zero(ring);
        for (m, c) in terms {
            p.add_term(field, m, c);
        }
        p
    }

    /// Builds from coordinates in a degree basis.
    pub fn from_sparse(ring: &Arc<GradedRing>, basis: &DegreeBasis, v: &SparseVec) -> Self {
        let terms = v.iter().map(|(i, c)| (basis.get(i).clone(), c)).collect();
        Polynomial { ring: Arc::clone(ring), terms }
    }

    pub fn from_dense(ring: &Arc<GradedRing>, basis: &DegreeBasis, v: &[u32]) -> Self {
        Polynomial::from_sparse(ring, basis, &SparseVec::from_dense(v))
    }

    /// A random form of degree `d` whose coefficients are small integers in
    /// `[-bound, bound]`, so the same form makes sense over every prime.
    pub fn random_small<R: Rng>(ring: &Arc<GradedRing>, field: &Field, d: &[i32], bound: i64, rng: &mut R) -> Self {
        let basis = ring.degree_basis(d);
        let terms: Vec<(Monomial, u32)> = basis
            .monomials()
            .iter()
            .map(|m| (m.clone(), field.from_i64(rng.gen_range(-bound..=bound))))
            .collect();
        Polynomial::from_terms(ring, field, terms)
    }

    fn add_term(&mut self, field: &Field, m: Monomial, c: u32) {
        if c == 0 {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let s = field.add(*e.get(), c);
                if s == 0 {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn ring(&self) -> &Arc<GradedRing> {
        &self.ring
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, u32)> + '_ {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> u32 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    /// The common multidegree of all terms, or `None` for zero or mixed degrees.
    pub fn multidegree(&self) -> Option<Vec<i32>> {
        let mut it = self.terms.keys().map(|m| self.ring.degree_of(m));
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.terms.is_empty() || self.multidegree().is_some()
    }

    fn check(&self, other: &Polynomial) -> Result<(), RingError> {
        if Arc::ptr_eq(&self.ring, &other.ring) || *self.ring == *other.ring {
            Ok(())
        } else {
            Err(RingError::RingMismatch)
        }
    }

    pub fn add(&self, field: &Field, other: &Polynomial) -> Result<Polynomial, RingError> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(field, m.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, field: &Field, other: &Polynomial) -> Result<Polynomial, RingError> {
        self.add(field, &other.scale(field, field.neg(1)))
    }

    pub fn scale(&self, field: &Field, c: u32) -> Polynomial {
        if c == 0 {
            return Polynomial::zero(&self.ring);
        }
        let terms = self.terms.iter().map(|(m, &v)| (m.clone(), field.mul(v, c))).collect();
        Polynomial { ring: Arc::clone(&self.ring), terms }
    }

    pub fn mul(&self, field: &Field, other: &Polynomial) -> Result<Polynomial, RingError> {
        self.check(other)?;
        let mut out = Polynomial::zero(&self.ring);
        for (a, &x) in &self.terms {
            for (b, &y) in &other.terms {
                out.add_term(field, a.mul(b), field.mul(x, y));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, field: &Field, e: u32) -> Polynomial {
        let mut out = Polynomial::constant(&self.ring, 1);
        for _ in 0..e {
            out = out.mul(field, self).expect("same ring");
        }
        out
    }

    /// Partial derivative with respect to variable `var`.
    pub fn derivative(&self, field: &Field, var: usize) -> Polynomial {
        let mut out = Polynomial::zero(&self.ring);
        for (m, &c) in &self.terms {
            let e = m.exps()[var];
            if e == 0 {
                continue;
            }
            let mut ex = m.0.clone();
            ex[var] -= 1;
            out.add_term(field, Monomial(ex), field.mul(c, u32::from(e)));
        }
        out
    }

    pub fn eval(&self, field: &Field, point: &[u32]) -> u32 {
        let mut acc = 0u32;
        for (m, &c) in &self.terms {
            let mut v = c;
            for (&x, &e) in point.iter().zip(m.exps()) {
                if e > 0 {
                    v = field.mul(v, field.pow(x, u64::from(e)));
                }
            }
            acc = field.add(acc, v);
        }
        acc
    }

    /// Substitutes `images[i]` for variable `i`; images live in a common ring.
    pub fn substitute(&self, field: &Field, images: &[Polynomial]) -> Result<Polynomial, RingError> {
        let target = images.first().ok_or(RingError::RingMismatch)?.ring();
        let mut out = Polynomial::zero(target);
        for (m, &c) in &self.terms {
            let mut t = Polynomial::constant(target, c);
            for (img, &e) in images.iter().zip(m.exps()) {
                for _ in 0..e {
                    t = t.mul(field, img)?;
                }
            }
            out = out.add(field, &t)?;
        }
        Ok(out)
    }

    /// Coordinates in the basis of the polynomial's own degree piece.
    pub fn to_sparse(&self, basis: &DegreeBasis) -> Result<SparseVec, RingError> {
        let mut pairs = Vec::with_capacity(self.terms.len());
        for (m, &c) in &self.terms {
            let i = basis.index_of(m).ok_or_else(|| RingError::NotInDegree(basis.degree().to_vec()))?;
            pairs.push((i as u32, c));
        }
        pairs.sort_unstable();
        Ok(SparseVec { idx: pairs.iter().map(|p| p.0).collect(), val: pairs.iter().map(|p| p.1).collect() })
    }

    pub fn to_dense(&self, basis: &DegreeBasis) -> Result<Vec<u32>, RingError> {
        Ok(self.to_sparse(basis)?.to_dense(basis.len()))
    }
}
