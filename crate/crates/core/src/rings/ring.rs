use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use super::RingError;

/// An exponent vector, one entry per ring variable.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub Box<[u16]>);

impl Monomial {
    pub fn one(n_vars: usize) -> Self {
        Monomial(vec![0; n_vars].into_boxed_slice())
    }

    pub fn var(n_vars: usize, i: usize) -> Self {
        let mut e = vec![0; n_vars];
        e[i] = 1;
        Monomial(e.into_boxed_slice())
    }

    pub fn exps(&self) -> &[u16] {
        &self.0
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|&e| u32::from(e)).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect())
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(other.0.iter()) {
            out.push(a.checked_sub(*b)?);
        }
        Some(Monomial(out.into_boxed_slice()))
    }

    pub fn times_var(&self, i: usize) -> Monomial {
        let mut e = self.0.clone();
        e[i] += 1;
        Monomial(e)
    }

    /// Index of the first variable with positive exponent.
    pub fn first_var(&self) -> Option<usize> {
        self.0.iter().position(|&e| e > 0)
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub degree: Vec<i32>,
}

/// The monomials of one multidegree with a reverse index.
#[derive(Debug)]
pub struct DegreeBasis {
    degree: Vec<i32>,
    monos: Vec<Monomial>,
    index: HashMap<Monomial, u32>,
}

impl DegreeBasis {
    pub fn degree(&self) -> &[i32] {
        &self.degree
    }

    pub fn len(&self) -> usize {
        self.monos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monos.is_empty()
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monos
    }

    pub fn get(&self, i: usize) -> &Monomial {
        &self.monos[i]
    }

    pub fn index_of(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).map(|&i| i as usize)
    }
}

/// A polynomial ring whose variables carry integer multidegrees.
///
/// Bases of graded pieces are built on first request and cached. Within one
/// degree, monomials are listed in descending lexicographic order of their
/// exponent vectors, so `z0^d` comes first.
pub struct GradedRing {
    vars: Vec<Variable>,
    rank: usize,
    weight: Vec<i64>,
    var_weight: Vec<i64>,
    cache: RwLock<HashMap<Vec<i32>, Arc<DegreeBasis>>>,
    lower: RwLock<HashMap<i32, Arc<Vec<(u32, u32)>>>>,
}

impl fmt::Debug for GradedRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GradedRing").field("vars", &self.vars).finish()
    }
}

impl PartialEq for GradedRing {
    fn eq(&self, other: &Self) -> bool {
        self.vars == other.vars
    }
}

impl GradedRing {
    /// Builds a ring. Some integer functional must be positive on every
    /// variable degree, otherwise graded pieces could be infinite.
    pub fn new(vars: Vec<Variable>) -> Result<Arc<Self>, RingError> {
        let rank = vars.first().map_or(1, |v| v.degree.len());
        if rank == 0 || vars.iter().any(|v| v.degree.len() != rank) {
            return Err(RingError::BadGrading);
        }
        let weight = positive_functional(&vars, rank).ok_or(RingError::BadGrading)?;
        let var_weight = vars
            .iter()
            .map(|v| v.degree.iter().zip(&weight).map(|(&d, &w)| i64::from(d) * w).sum())
            .collect();
        Ok(Arc::new(GradedRing {
            vars,
            rank,
            weight,
            var_weight,
            cache: RwLock::new(HashMap::new()),
            lower: RwLock::new(HashMap::new()),
        }))
    }

    /// Standard-graded ring with variables named `{prefix}0..{prefix}{n-1}`.
    pub fn standard(n: usize, prefix: &str) -> Arc<Self> {
        let vars = (0..n).map(|i| Variable { name: format!("{prefix}{i}"), degree: vec![1] }).collect();
        GradedRing::new(vars).expect("standard grading is positive")
    }

    pub fn n_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn grading_rank(&self) -> usize {
        self.rank
    }

    pub fn variables(&self) -> &[Variable] {
        &self.vars
    }

    pub fn var_degree(&self, i: usize) -> &[i32] {
        &self.vars[i].degree
    }

    pub fn degree_of(&self, m: &Monomial) -> Vec<i32> {
        let mut d = vec![0i32; self.rank];
        for (v, &e) in self.vars.iter().zip(m.0.iter()) {
            for (x, &y) in d.iter_mut().zip(&v.degree) {
                *x += y * i32::from(e);
            }
        }
        d
    }

    /// Basis of the piece of multidegree `d`.
    pub fn degree_basis(&self, d: &[i32]) -> Arc<DegreeBasis> {
        assert_eq!(d.len(), self.rank, "degree has the wrong rank");
        if let Some(b) = self.cache.read().expect("cache lock").get(d) {
            return Arc::clone(b);
        }
        let monos = self.enumerate(d);
        let index = monos.iter().enumerate().map(|(i, m)| (m.clone(), i as u32)).collect();
        let basis = Arc::new(DegreeBasis { degree: d.to_vec(), monos, index });
        let mut w = self.cache.write().expect("cache lock");
        Arc::clone(w.entry(d.to_vec()).or_insert(basis))
    }

    /// Shorthand for single gradings.
    pub fn basis(&self, d: i32) -> Arc<DegreeBasis> {
        self.degree_basis(&[d])
    }

    pub fn dim(&self, d: &[i32]) -> usize {
        self.degree_basis(d).len()
    }

    /// For a singly graded ring: for each monomial `m` of degree `d > 0`, the
    /// pair `(j, i)` where `z_j` is the first variable dividing `m` and `i` is
    /// the index of `m / z_j` in degree `d - deg z_j`.
    pub fn lower_table(&self, d: i32) -> Arc<Vec<(u32, u32)>> {
        assert_eq!(self.rank, 1, "lower tables need a single grading");
        if let Some(t) = self.lower.read().expect("cache lock").get(&d) {
            return Arc::clone(t);
        }
        let basis = self.basis(d);
        let table: Vec<(u32, u32)> = basis
            .monomials()
            .iter()
            .map(|m| {
                let j = m.first_var().expect("positive degree");
                let mut e = m.0.clone();
                e[j] -= 1;
                let lower = self.basis(d - self.vars[j].degree[0]);
                let i = lower.index_of(&Monomial(e)).expect("divisor lies in the lower piece");
                (j as u32, i as u32)
            })
            .collect();
        let t = Arc::new(table);
        let mut w = self.lower.write().expect("cache lock");
        Arc::clone(w.entry(d).or_insert(t))
    }

    /// Values at `pt` of all monomials of degree `d` (single grading).
    pub fn monomial_values(&self, field: &crate::exactalg::Field, d: i32, pt: &[u32]) -> Vec<u32> {
        let mut vals: Vec<Vec<u32>> = vec![vec![1]];
        for e in 1..=d {
            let table = self.lower_table(e);
            let v: Vec<u32> = table
                .iter()
                .map(|&(j, i)| {
                    let prev = (e - self.vars[j as usize].degree[0]) as usize;
                    field.mul(vals[prev][i as usize], pt[j as usize])
                })
                .collect();
            vals.push(v);
        }
        vals.pop().expect("degree zero present")
    }

    fn enumerate(&self, d: &[i32]) -> Vec<Monomial> {
        let total: i64 = d.iter().zip(&self.weight).map(|(&a, &w)| i64::from(a) * w).sum();
        let mut out = Vec::new();
        if total < 0 {
            return out;
        }
        let mut exps = vec![0u16; self.vars.len()];
        self.recurse(0, total, d, &mut exps, &mut out);
        out
    }

    fn recurse(&self, i: usize, rem: i64, d: &[i32], exps: &mut [u16], out: &mut Vec<Monomial>) {
        let n = self.vars.len();
        if i == n {
            if rem == 0 && self.degree_of(&Monomial(exps.to_vec().into_boxed_slice())) == d {
                out.push(Monomial(exps.to_vec().into_boxed_slice()));
            }
            return;
        }
        let w = self.var_weight[i];
        if i + 1 == n {
            if rem % w == 0 {
                exps[i] = (rem / w) as u16;
                self.recurse(n, 0, d, exps, out);
                exps[i] = 0;
            }
            return;
        }
        let max = rem / w;
        for e in (0..=max).rev() {
            exps[i] = e as u16;
            self.recurse(i + 1, rem - e * w, d, exps, out);
        }
        exps[i] = 0;
    }
}

fn positive_functional(vars: &[Variable], rank: usize) -> Option<Vec<i64>> {
    if rank == 1 {
        return vars.iter().all(|v| v.degree[0] > 0).then(|| vec![1]);
    }
    // Search functionals of the form (c, 1, 1, ...) with c growing.
    for c in 1..=1024i64 {
        let mut w = vec![1i64; rank];
        w[0] = c;
        let ok = vars.iter().all(|v| v.degree.iter().zip(&w).map(|(&a, &b)| i64::from(a) * b).sum::<i64>() > 0);
        if ok {
            return Some(w);
        }
    }
    None
}
