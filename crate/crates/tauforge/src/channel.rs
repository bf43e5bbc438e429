//! Truncated Fourier–Laurent series with exponential channel markers.
//!
//! A degree-`d` element is `Σ_N marker(d,N) Σ_k a_{N,k} t^{ref(d,N)+k}`
//! where `marker(d,N)` carries `s^N` and `exp((d·ρ_0 + N·ρ_1) t^r)`, and
//! `ref(d,N) = d·γ_0 + N·γ_1 + N²·γ_2` with integer `γ_2`. A product of
//! channels `a` and `b` lands in channel `a+b` with the integer offset
//! shift `γ_2((a²+b²) − (a+b)²)`, so non-integer exponents never appear in
//! the data.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use crate::field::Field;

/// Operations shared by the channel ring and the symbolic differential
/// polynomials used to analyse a residual.
pub trait DiffRing<F>: Clone {
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn scale(&self, f: &F) -> Self;
    fn derive(&self) -> Self;
    /// Multiply by `t^j`.
    fn mul_t(&self, j: i64) -> Self;

    fn sub(&self, o: &Self) -> Self
    where
        F: Field,
    {
        self.add(&o.scale(&-F::one()))
    }
    fn square(&self) -> Self {
        self.mul(self)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChannelSpec<F> {
    /// The exponential is `exp(ρ t^r)`.
    pub r: u32,
    pub rate0: F,
    pub rate1: F,
    pub texp0: F,
    pub texp1: F,
    pub texp2: i64,
}

impl<F: Field> ChannelSpec<F> {
    pub fn reference(&self, d: u32, n: i64) -> F {
        F::from_i64(d as i64) * self.texp0.clone() + F::from_i64(n) * self.texp1.clone() + F::from_i64(self.texp2 * n * n)
    }

    pub fn rate(&self, d: u32, n: i64) -> F {
        F::from_i64(d as i64) * self.rate0.clone() + F::from_i64(n) * self.rate1.clone()
    }

    /// Offset shift when channel `a` meets channel `b`.
    pub fn mix_shift(&self, a: i64, b: i64) -> i64 {
        self.texp2 * ((a * a + b * b) - (a + b) * (a + b))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChannelSeries<F> {
    pub spec: ChannelSpec<F>,
    pub degree: u32,
    /// channel → offset → coefficient (zeros are not stored)
    pub data: BTreeMap<i64, BTreeMap<i64, F>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChannelError {
    SpecMismatch,
    DegreeMismatch(u32, u32),
}

impl fmt::Display for ChannelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelError::SpecMismatch => write!(f, "channel specs differ"),
            ChannelError::DegreeMismatch(a, b) => write!(f, "cannot add degree {} to degree {}", a, b),
        }
    }
}

fn bump<F: Field>(m: &mut BTreeMap<i64, F>, k: i64, x: F) {
    if x.is_zero() {
        return;
    }
    let e = m.entry(k).or_insert_with(F::zero);
    *e += &x;
    if e.is_zero() {
        m.remove(&k);
    }
}

impl<F: Field> ChannelSeries<F> {
    pub fn zero(spec: ChannelSpec<F>, degree: u32) -> Self {
        ChannelSeries { spec, degree, data: BTreeMap::new() }
    }

    pub fn singleton(spec: ChannelSpec<F>, degree: u32, n: i64, k: i64, x: F) -> Self {
        let mut s = Self::zero(spec, degree);
        s.insert(n, k, x);
        s
    }

    pub fn insert(&mut self, n: i64, k: i64, x: F) {
        let ch = self.data.entry(n).or_default();
        bump(ch, k, x);
        if ch.is_empty() {
            self.data.remove(&n);
        }
    }

    pub fn get(&self, n: i64, k: i64) -> F {
        self.data.get(&n).and_then(|c| c.get(&k)).cloned().unwrap_or_else(F::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.data.is_empty()
    }

    pub fn cells(&self) -> impl Iterator<Item = (i64, i64, &F)> {
        self.data.iter().flat_map(|(n, c)| c.iter().map(move |(k, x)| (*n, *k, x)))
    }

    pub fn try_add(&self, o: &Self) -> Result<Self, ChannelError> {
        if self.spec != o.spec {
            return Err(ChannelError::SpecMismatch);
        }
        if self.degree != o.degree {
            return Err(ChannelError::DegreeMismatch(self.degree, o.degree));
        }
        let mut out = self.clone();
        for (n, k, x) in o.cells() {
            out.insert(n, k, x.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self, ChannelError> {
        if self.spec != o.spec {
            return Err(ChannelError::SpecMismatch);
        }
        let mut data: BTreeMap<i64, BTreeMap<i64, F>> = BTreeMap::new();
        for (na, ca) in &self.data {
            for (nb, cb) in &o.data {
                let shift = self.spec.mix_shift(*na, *nb);
                let out = data.entry(na + nb).or_default();
                for (ka, xa) in ca {
                    for (kb, xb) in cb {
                        bump(out, ka + kb + shift, xa.clone() * xb.clone());
                    }
                }
            }
        }
        data.retain(|_, c| !c.is_empty());
        Ok(ChannelSeries { spec: self.spec.clone(), degree: self.degree + o.degree, data })
    }

    /// Keep only the cells accepted by `keep`.
    pub fn restrict(&self, keep: impl Fn(i64, i64) -> bool) -> Self {
        let mut out = Self::zero(self.spec.clone(), self.degree);
        for (n, k, x) in self.cells() {
            if keep(n, k) {
                out.insert(n, k, x.clone());
            }
        }
        out
    }

    /// Largest `|a_{N,k}|` in decimal log over the given cells, `None` if
    /// all vanish.
    pub fn max_log10_abs<'a>(&self, cells: impl IntoIterator<Item = &'a (i64, i64)>) -> Option<f64> {
        cells.into_iter().filter_map(|&(n, k)| self.get(n, k).log10_abs()).fold(None, |m, x| Some(m.map_or(x, |y: f64| y.max(x))))
    }
}

impl<F: Field> DiffRing<F> for ChannelSeries<F> {
    fn add(&self, o: &Self) -> Self {
        self.try_add(o).expect("homogeneous expression")
    }

    fn mul(&self, o: &Self) -> Self {
        self.try_mul(o).expect("same spec")
    }

    fn scale(&self, f: &F) -> Self {
        let mut out = Self::zero(self.spec.clone(), self.degree);
        if f.is_zero() {
            return out;
        }
        for (n, k, x) in self.cells() {
            out.insert(n, k, x.clone() * f.clone());
        }
        out
    }

    /// `D(marker·t^{ref+k}) = marker·(r ρ t^{ref+k+r−1} + (ref+k) t^{ref+k−1})`.
    fn derive(&self) -> Self {
        let r = self.spec.r as i64;
        let d = self.degree;
        let mut out = Self::zero(self.spec.clone(), d);
        for (n, c) in &self.data {
            let rho = self.spec.rate(d, *n) * F::from_i64(r);
            let reference = self.spec.reference(d, *n);
            for (k, x) in c {
                if !rho.is_zero() {
                    out.insert(*n, k + r - 1, x.clone() * rho.clone());
                }
                out.insert(*n, k - 1, x.clone() * (reference.clone() + F::from_i64(*k)));
            }
        }
        out
    }

    fn mul_t(&self, j: i64) -> Self {
        let mut out = Self::zero(self.spec.clone(), self.degree);
        for (n, k, x) in self.cells() {
            out.insert(n, k + j, x.clone());
        }
        out
    }
}

/// `min Σ n_i²` over `k` integers summing to `s` (`None` when `k = 0`,
/// `s ≠ 0`).
pub fn min_square_sum(s: i64, k: i64) -> Option<i64> {
    if k == 0 {
        return if s == 0 { Some(0) } else { None };
    }
    let q = s.div_euclid(k);
    let rem = s.rem_euclid(k);
    Some(rem * (q + 1) * (q + 1) + (k - rem) * q * q)
}

/// Truncation of the degree-1 inputs: channels `|n| ≤ nmax`, offsets in
/// `[kmin, kmax]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Truncation {
    pub nmax: i64,
    pub kmin: i64,
    pub kmax: i64,
}

/// Highest offset at channel `n` that a dropped input term can reach in a
/// homogeneous degree-`d` expression whose monomials `t^j ∏ D^{m_i}τ` all
/// satisfy `j + (r−1)Σm_i ≤ jmax`. Requires `texp2 ≤ 0`.
///
/// Either some factor has offset `< kmin` (all channels kept), or some
/// factor sits in a dropped channel `|n_1| > nmax`; in both cases the
/// channel mixing shift `|γ_2|(N² − Σ n_i²)` is bounded using the smallest
/// possible `Σ n_i²`.
pub fn dropped_reach(texp2: i64, d: u32, n: i64, jmax: i64, tr: Truncation) -> i64 {
    assert!(texp2 <= 0, "window analysis assumes a non-positive quadratic exponent");
    let g = -texp2;
    let d = d as i64;
    let case_a = (tr.kmin - 1) + (d - 1) * tr.kmax + g * (n * n - min_square_sum(n, d).unwrap());
    let mut case_b = i64::MIN;
    if d >= 1 {
        // −n_1² − minSq(N−n_1) decreases once |n_1| is past |N|; scan a
        // window wide enough to contain the maximum.
        let span = tr.nmax + 1 + n.abs() + 2;
        for n1 in -span..=span {
            if n1.abs() <= tr.nmax {
                continue;
            }
            if let Some(ms) = min_square_sum(n - n1, d - 1) {
                let v = d * tr.kmax + g * (n * n - n1 * n1 - ms);
                case_b = case_b.max(v);
            }
        }
    }
    jmax + case_a.max(case_b)
}

/// Cells of `a` (degree `d` expression with the given `jmax`) that no
/// dropped input term can reach.
pub fn validity_window<F: Field>(a: &ChannelSeries<F>, jmax: i64, tr: Truncation) -> BTreeSet<(i64, i64)> {
    let mut out = BTreeSet::new();
    if a.degree == 0 {
        return out;
    }
    for (n, c) in &a.data {
        let bound = dropped_reach(a.spec.texp2, a.degree, *n, jmax, tr);
        for k in c.keys() {
            if *k > bound {
                out.insert((*n, *k));
            }
        }
    }
    out
}

/// Highest offset at channel `n` that kept input terms can reach.
pub fn kept_reach(texp2: i64, d: u32, n: i64, jmax: i64, tr: Truncation) -> i64 {
    let g = -texp2;
    jmax + d as i64 * tr.kmax + g * (n * n - min_square_sum(n, d as i64).unwrap_or(0))
}

/// Every cell `(N, k)` with `dropped_reach < k ≤ kept_reach` for the given
/// channels, whether or not the computed value there is zero.
pub fn window_cells(texp2: i64, d: u32, jmax: i64, tr: Truncation, channels: &[i64]) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for &n in channels {
        let b = dropped_reach(texp2, d, n, jmax, tr);
        for k in (b + 1)..=kept_reach(texp2, d, n, jmax, tr) {
            out.push((n, k));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use crate::field::{q, Q};

    fn spec() -> ChannelSpec<Q> {
        ChannelSpec { r: 1, rate0: q(1, 3), rate1: q(1, 1), texp0: q(2, 5), texp1: q(-1, 7), texp2: -2 }
    }

    #[test]
    fn singleton_products() {
        let one = ChannelSeries::singleton(spec(), 1, 0, 0, Q::ONE);
        let p = one.mul(&one);
        assert_eq!(p.degree, 2);
        assert_eq!(p.get(0, 0), Q::ONE);
        let a = ChannelSeries::singleton(spec(), 1, 1, 0, Q::ONE);
        let b = ChannelSeries::singleton(spec(), 1, -1, 0, Q::ONE);
        let p = a.mul(&b);
        assert_eq!(p.cells().collect::<Vec<_>>(), vec![(0, -4, &Q::ONE)]);
    }

    #[test]
    fn derivative_of_singleton() {
        let s = spec();
        let a = ChannelSeries::singleton(s.clone(), 1, 1, 0, Q::ONE);
        let d = a.derive();
        assert_eq!(d.get(1, 0), s.rate(1, 1));
        assert_eq!(d.get(1, -1), s.reference(1, 1));
        let flat = ChannelSpec { r: 1, rate0: Q::ZERO, rate1: Q::ZERO, texp0: Q::ZERO, texp1: Q::ZERO, texp2: 0 };
        assert!(ChannelSeries::singleton(flat, 1, 0, 0, q(5, 1)).derive().is_zero());
    }

    #[test]
    fn min_squares() {
        assert_eq!(min_square_sum(0, 3), Some(0));
        assert_eq!(min_square_sum(-2, 7), Some(2));
        assert_eq!(min_square_sum(5, 2), Some(13));
        assert_eq!(min_square_sum(1, 0), None);
    }

    #[test]
    fn degree_one_window_is_everything() {
        let mut a = ChannelSeries::zero(spec(), 1);
        for n in -1..=1 {
            for k in -4..=0 {
                a.insert(n, k, q(k - 1, 3));
            }
        }
        let tr = Truncation { nmax: 1, kmin: -4, kmax: 0 };
        assert_eq!(validity_window(&a, 0, tr).len(), 15);
        assert!(validity_window(&ChannelSeries::zero(spec(), 1), 0, tr).is_empty());
    }

    #[test]
    fn adding_mismatched_degrees_fails() {
        let a = ChannelSeries::singleton(spec(), 1, 0, 0, Q::ONE);
        let b = a.mul(&a);
        assert_eq!(a.try_add(&b), Err(ChannelError::DegreeMismatch(1, 2)));
    }
}
