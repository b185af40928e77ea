use std::sync::Arc;

use super::ring::{DegreeBasis, GradedRing, Variable};
use super::RingError;

/// Cox ring of the rational normal scroll `X(e_1, ..., e_d)`.
///
/// Variables are `y_1..y_d` of bidegree `(1, -e_i)` followed by `t_0, t_1` of
/// bidegree `(0, 1)`. The piece of bidegree `(a, b)` is `H^0(P^1, S^a E(b))`
/// with `E = O(e_1) + ... + O(e_d)`.
#[derive(Clone, Debug)]
pub struct ScrollRing {
    e: Vec<u32>,
    ring: Arc<GradedRing>,
}

impl ScrollRing {
    pub fn new(e: &[u32]) -> Result<Self, RingError> {
        if e.is_empty() || e.contains(&0) {
            return Err(RingError::BadScroll(e.to_vec()));
        }
        let mut vars: Vec<Variable> = e
            .iter()
            .enumerate()
            .map(|(i, &ei)| Variable { name: format!("y{}", i + 1), degree: vec![1, -(ei as i32)] })
            .collect();
        vars.push(Variable { name: "t0".into(), degree: vec![0, 1] });
        vars.push(Variable { name: "t1".into(), degree: vec![0, 1] });
        Ok(ScrollRing { e: e.to_vec(), ring: GradedRing::new(vars)? })
    }

    pub fn ring(&self) -> &Arc<GradedRing> {
        &self.ring
    }

    pub fn e(&self) -> &[u32] {
        &self.e
    }

    /// Number of summands of `E`.
    pub fn rank(&self) -> usize {
        self.e.len()
    }

    /// Degree `f = sum e_i` of the scroll.
    pub fn f(&self) -> u32 {
        self.e.iter().sum()
    }

    pub fn y(&self, i: usize) -> usize {
        i
    }

    pub fn t(&self, j: usize) -> usize {
        self.e.len() + j
    }

    pub fn basis(&self, a: i32, b: i32) -> Arc<DegreeBasis> {
        self.ring.degree_basis(&[a, b])
    }

    /// The twists of the line-bundle summands of `S^a E (b)`.
    pub fn weights(&self, a: u32, b: i64) -> Vec<i64> {
        let mut out = Vec::new();
        let mut alpha = vec![0u32; self.e.len()];
        self.weights_rec(0, a, &mut alpha, b, &mut out);
        out
    }

    fn weights_rec(&self, i: usize, rem: u32, alpha: &mut [u32], b: i64, out: &mut Vec<i64>) {
        let d = self.e.len();
        if i + 1 == d {
            alpha[i] = rem;
            let w: i64 = alpha.iter().zip(&self.e).map(|(&a, &e)| i64::from(a) * i64::from(e)).sum();
            out.push(w + b);
            return;
        }
        for x in (0..=rem).rev() {
            alpha[i] = x;
            self.weights_rec(i + 1, rem - x, alpha, b, out);
        }
    }
}
