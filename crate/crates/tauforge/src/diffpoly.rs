//! Differential polynomials `Σ c · t^j · ∏ D^{m_i}τ` in a single unknown.
//!
//! Used to inspect a residual expression before it is expanded on actual
//! series: its homogeneity degree, and how far up in `t` any monomial can
//! push a term (which fixes the trusted window).

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::channel::DiffRing;
use crate::field::Field;

/// `(j, sorted derivative orders)`.
pub type Monomial = (i64, Vec<u32>);

#[derive(Clone, Debug, PartialEq)]
pub struct DiffPoly<F> {
    pub terms: BTreeMap<Monomial, F>,
}

impl<F: Field> DiffPoly<F> {
    /// The unknown `τ` itself.
    pub fn unknown() -> Self {
        let mut terms = BTreeMap::new();
        terms.insert((0, alloc::vec![0]), F::one());
        DiffPoly { terms }
    }

    fn push(&mut self, m: Monomial, x: F) {
        if x.is_zero() {
            return;
        }
        let e = self.terms.entry(m.clone()).or_insert_with(F::zero);
        *e += &x;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The common number of `τ` factors, `None` if not homogeneous.
    pub fn degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(|(_, ms)| ms.len());
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    /// `max (j + (r−1)·Σ m_i)` over monomials: the largest upward offset
    /// shift the expression applies to a product of `exp(ρ t^r)`-type series.
    pub fn offset_reach(&self, r: u32) -> Option<i64> {
        self.terms
            .keys()
            .map(|(j, ms)| j + (r as i64 - 1) * ms.iter().map(|&m| m as i64).sum::<i64>())
            .max()
    }
}

impl<F: Field> DiffRing<F> for DiffPoly<F> {
    fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (m, x) in &o.terms {
            out.push(m.clone(), x.clone());
        }
        out
    }

    fn mul(&self, o: &Self) -> Self {
        let mut out = DiffPoly { terms: BTreeMap::new() };
        for ((ja, ma), xa) in &self.terms {
            for ((jb, mb), xb) in &o.terms {
                let mut ms = ma.clone();
                ms.extend_from_slice(mb);
                ms.sort_unstable();
                out.push((ja + jb, ms), xa.clone() * xb.clone());
            }
        }
        out
    }

    fn scale(&self, f: &F) -> Self {
        let mut out = DiffPoly { terms: BTreeMap::new() };
        for (m, x) in &self.terms {
            out.push(m.clone(), x.clone() * f.clone());
        }
        out
    }

    fn derive(&self) -> Self {
        let mut out = DiffPoly { terms: BTreeMap::new() };
        for ((j, ms), x) in &self.terms {
            if *j != 0 {
                out.push((j - 1, ms.clone()), x.clone() * F::from_i64(*j));
            }
            for i in 0..ms.len() {
                let mut m2 = ms.clone();
                m2[i] += 1;
                m2.sort_unstable();
                out.push((*j, m2), x.clone());
            }
        }
        out
    }

    fn mul_t(&self, j: i64) -> Self {
        DiffPoly { terms: self.terms.iter().map(|((a, ms), x)| ((a + j, ms.clone()), x.clone())).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{q, Q};
    use alloc::vec;

    #[test]
    fn product_rule() {
        let t = DiffPoly::<Q>::unknown();
        let e = t.mul_t(2).mul(&t.derive());
        let d = e.derive();
        // D(t² τ τ') = 2t τ τ' + t² τ'² + t² τ τ''
        assert_eq!(d.terms.get(&(1, vec![0, 1])), Some(&q(2, 1)));
        assert_eq!(d.terms.get(&(2, vec![1, 1])), Some(&Q::ONE));
        assert_eq!(d.terms.get(&(2, vec![0, 2])), Some(&Q::ONE));
        assert_eq!(d.degree(), Some(2));
        assert_eq!(d.offset_reach(2), Some(4));
    }

    #[test]
    fn inhomogeneous() {
        let t = DiffPoly::<Q>::unknown();
        assert_eq!(t.add(&t.square()).degree(), None);
        assert!(t.sub(&t).is_zero());
    }
}
