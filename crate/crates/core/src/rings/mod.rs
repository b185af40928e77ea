//! Multigraded polynomial rings, sparse polynomials and the Cox ring of a
//! rational normal scroll.

mod poly;
mod ring;
mod scroll;

use thiserror::Error;

pub use poly::Polynomial;
pub use ring::{DegreeBasis, GradedRing, Monomial, Variable};
pub use scroll::ScrollRing;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("polynomials belong to different rings")]
    RingMismatch,
    #[error("no positive functional exists on the variable degrees")]
    BadGrading,
    #[error("polynomial has a term outside degree {0:?}")]
    NotInDegree(Vec<i32>),
    #[error("scroll twists must be positive, got {0:?}")]
    BadScroll(Vec<u32>),
}

/// `(h^0, h^1)` of `O(m_1) + ... + O(m_s)` on the projective line.
pub fn p1_cohomology(twists: &[i64]) -> (u64, u64) {
    twists.iter().fold((0, 0), |(h0, h1), &m| {
        if m >= 0 {
            (h0 + (m + 1) as u64, h1)
        } else if m <= -2 {
            (h0, h1 + (-m - 1) as u64)
        } else {
            (h0, h1)
        }
    })
}

/// Binomial coefficient as `usize`, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{Field, DEFAULT_PRIME};

    #[test]
    fn two_variable_quadrics() {
        let r = GradedRing::standard(2, "z");
        let b = r.basis(2);
        let got: Vec<Vec<u16>> = b.monomials().iter().map(|m| m.exps().to_vec()).collect();
        assert_eq!(got, vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
    }

    #[test]
    fn scroll_pieces() {
        let s = ScrollRing::new(&[2, 1]).unwrap();
        assert_eq!(s.basis(1, 0).len(), 5);
        let s = ScrollRing::new(&[1, 1, 1]).unwrap();
        assert!(s.basis(0, -1).is_empty());
    }

    #[test]
    fn cohomology_on_the_line() {
        assert_eq!(p1_cohomology(&[0]), (1, 0));
        assert_eq!(p1_cohomology(&[-2]), (0, 1));
        let s = ScrollRing::new(&[2, 1]).unwrap();
        let mut w = s.weights(3, -1);
        w.sort_unstable();
        assert_eq!(w, vec![2, 3, 4, 5]);
        assert_eq!(p1_cohomology(&w), (18, 0));
        assert_eq!(p1_cohomology(&[3, 2, 1, 0]), (10, 0));
    }

    #[test]
    fn derivative_of_monomial() {
        let f = Field::new(DEFAULT_PRIME);
        let r = GradedRing::standard(2, "z");
        let p = Polynomial::var(&r, 0).pow(&f, 2).mul(&f, &Polynomial::var(&r, 1)).unwrap();
        let d = p.derivative(&f, 0);
        let expect = Polynomial::var(&r, 0).mul(&f, &Polynomial::var(&r, 1)).unwrap().scale(&f, 2);
        assert_eq!(d, expect);
    }
}
