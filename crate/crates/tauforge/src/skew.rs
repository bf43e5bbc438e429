//! Skew-partition expansion of the rank-one irregular block.
//!
//! The coefficient `a_k` of `t^{−k}` is matched against
//! `Σ_{|λ|+|μ|=k} Σ_{ν⊂λ, η⊂μ, |ν|=|η|} (−1)^{|ν|} c^{ν,η}_{λ,μ} U_{λ/ν} V_{μ/η} S_{λ,μ}`
//! and the integers `c` are recovered by exact linear algebra over random
//! rational points.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::field::{q, Field, Q};
use crate::linalg::{solve_rational as solve, AffineSolution};
use crate::partition::{partitions, Partition, SkewError};
use crate::pit::PointSampler;
use crate::scalar::{ParameterPoint, PointError, Sym};
use crate::whittaker::icb_series;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SkewTerm {
    pub lambda: Partition,
    pub mu: Partition,
    pub nu: Partition,
    pub eta: Partition,
}

fn fmt_part(p: &Partition) -> String {
    let parts: Vec<String> = p.parts().iter().map(|x| alloc::format!("{}", x)).collect();
    alloc::format!("[{}]", parts.join(","))
}

impl SkewTerm {
    pub fn new(lambda: Partition, mu: Partition, nu: Partition, eta: Partition) -> Result<Self, SkewError> {
        if !lambda.contains(&nu) {
            return Err(SkewError { outer: lambda, inner: nu });
        }
        if !mu.contains(&eta) {
            return Err(SkewError { outer: mu, inner: eta });
        }
        Ok(SkewTerm { lambda, mu, nu, eta })
    }

    /// `"λ|μ|ν|η"` with each partition written as `[a,b,…]`.
    pub fn key(&self) -> String {
        alloc::format!("{}|{}|{}|{}", fmt_part(&self.lambda), fmt_part(&self.mu), fmt_part(&self.nu), fmt_part(&self.eta))
    }

    pub fn parse_key(s: &str) -> Option<Self> {
        let ps: Vec<Partition> = s
            .split('|')
            .map(|x| {
                let inner = x.trim().strip_prefix('[')?.strip_suffix(']')?;
                let parts: Option<Vec<u32>> =
                    inner.split(',').filter(|t| !t.trim().is_empty()).map(|t| t.trim().parse().ok()).collect();
                Partition::new(parts?).ok()
            })
            .collect::<Option<_>>()?;
        if ps.len() != 4 {
            return None;
        }
        let mut it = ps.into_iter();
        SkewTerm::new(it.next()?, it.next()?, it.next()?, it.next()?).ok()
    }

    /// `(μ, λ | η, ν)`.
    pub fn swapped(&self) -> Self {
        SkewTerm { lambda: self.mu.clone(), mu: self.lambda.clone(), nu: self.eta.clone(), eta: self.nu.clone() }
    }

    /// All four partitions conjugated.
    pub fn transposed(&self) -> Self {
        SkewTerm {
            lambda: self.lambda.conjugate(),
            mu: self.mu.conjugate(),
            nu: self.nu.conjugate(),
            eta: self.eta.conjugate(),
        }
    }

    pub fn order(&self) -> u32 {
        self.lambda.size() + self.mu.size()
    }
}

impl fmt::Display for SkewTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

/// Every term of order `k`, in a fixed order.
pub fn skew_terms(k: u32) -> Vec<SkewTerm> {
    let mut out = Vec::new();
    for a in 0..=k {
        for lambda in partitions(a) {
            for mu in partitions(k - a) {
                let subs_l = lambda.subpartitions();
                let subs_m = mu.subpartitions();
                for nu in &subs_l {
                    for eta in &subs_m {
                        if nu.size() == eta.size() {
                            out.push(SkewTerm { lambda: lambda.clone(), mu: mu.clone(), nu: nu.clone(), eta: eta.clone() });
                        }
                    }
                }
            }
        }
    }
    out.sort();
    out
}

/// The four parameters entering the weights.
#[derive(Clone, Debug, PartialEq)]
pub struct SkewPoint {
    pub theta: Q,
    pub theta0: Q,
    pub theta_t: Q,
    pub beta: Q,
}

impl SkewPoint {
    pub fn from_point(p: &ParameterPoint) -> Result<Self, PointError> {
        Ok(SkewPoint { theta: p.q(Sym::Theta)?, theta0: p.q(Sym::Theta0)?, theta_t: p.q(Sym::ThetaT)?, beta: p.q(Sym::Beta)? })
    }
}

fn content(c: (u32, u32)) -> Q {
    Q::from(c.0 as i64 - c.1 as i64)
}

/// `U_{λ/ν} = ∏_{λ∖ν} (2(β−θ) + i − j)`.
pub fn u_skew(lambda: &Partition, nu: &Partition, p: &SkewPoint) -> Result<Q, SkewError> {
    let base = Q::from(2) * (&p.beta - &p.theta);
    Ok(lambda.skew_cells(nu)?.into_iter().fold(Q::ONE, |acc, c| acc * (&base + content(c))))
}

/// `V_{μ/η} = ∏_{μ∖η} (−2β + i − j)`.
pub fn v_skew(mu: &Partition, eta: &Partition, p: &SkewPoint) -> Result<Q, SkewError> {
    let base = Q::from(-2) * &p.beta;
    Ok(mu.skew_cells(eta)?.into_iter().fold(Q::ONE, |acc, c| acc * (&base + content(c))))
}

/// `S_{λ,μ}`.
pub fn s_weight(lambda: &Partition, mu: &Partition, p: &SkewPoint) -> Q {
    let tt2 = p.theta_t.square();
    let t02 = p.theta0.square();
    let mut acc = if mu.size() % 2 == 1 { -Q::ONE } else { Q::ONE };
    let dl = lambda.data();
    for (c, h) in dl.cells.iter().zip(&dl.hooks) {
        let x = &p.beta + content(*c);
        acc *= &((x.square() - &tt2) / Q::from(h * h));
    }
    let dm = mu.data();
    for (c, h) in dm.cells.iter().zip(&dm.hooks) {
        let x = &p.theta - &p.beta + content(*c);
        acc *= &((x.square() - &t02) / Q::from(h * h));
    }
    acc
}

/// `(U_{λ/ν}, V_{μ/η}, S_{λ,μ})`.
pub fn skew_weight(t: &SkewTerm, p: &SkewPoint) -> Result<(Q, Q, Q), SkewError> {
    Ok((u_skew(&t.lambda, &t.nu, p)?, v_skew(&t.mu, &t.eta, p)?, s_weight(&t.lambda, &t.mu, p)))
}

/// `N_{λ,μ} = U_{λ/∅} V_{μ/∅} S_{λ,μ}`.
pub fn n_weight(lambda: &Partition, mu: &Partition, p: &SkewPoint) -> Q {
    let e = Partition::empty();
    u_skew(lambda, &e, p).unwrap() * v_skew(mu, &e, p).unwrap() * s_weight(lambda, mu, p)
}

/// Signed basis element `(−1)^{|ν|} U_{λ/ν} V_{μ/η} S_{λ,μ}` multiplying `c`.
pub fn basis_value(t: &SkewTerm, p: &SkewPoint) -> Q {
    let (u, v, s) = skew_weight(t, p).expect("terms are built contained");
    let sign = if t.nu.size() % 2 == 1 { -Q::ONE } else { Q::ONE };
    sign * u * v * s
}

/// Entries of the tableau behind `q_λ`: row 1 holds `2(j−1)`, row `i > 1`
/// holds `λ_1 − 1 + Σ_{k<j} λ'_k`.
pub fn q_tableau(lambda: &Partition) -> Vec<Vec<i64>> {
    let conj = lambda.conjugate();
    let l1 = lambda.part(1) as i64;
    let mut rows = Vec::new();
    for i in 1..=lambda.len() {
        let mut row = Vec::new();
        for j in 1..=lambda.part(i) {
            if i == 1 {
                row.push(2 * (j as i64 - 1));
            } else {
                let s: i64 = (1..j).map(|k| conj.part(k as usize) as i64).sum();
                row.push(l1 - 1 + s);
            }
        }
        rows.push(row);
    }
    rows
}

/// `q_λ = λ_1(λ_1−1) + Σ_{(i,j)∈λ, i≠1} (λ_1 − 1 + Σ_{k<j} λ'_k)`.
pub fn q_stat(lambda: &Partition) -> i64 {
    let conj = lambda.conjugate();
    let l1 = lambda.part(1) as i64;
    let mut s = l1 * (l1 - 1);
    for (i, j) in lambda.cells() {
        if i != 1 {
            s += l1 - 1 + (1..j).map(|k| conj.part(k as usize) as i64).sum::<i64>();
        }
    }
    s
}

#[derive(Clone, Debug, PartialEq)]
pub enum SkewSolveError {
    /// No `c` fits the sampled values: the expansion fails at this order.
    Falsified { order: u32, witness: ParameterPoint },
    NoPoints,
}

impl fmt::Display for SkewSolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SkewSolveError::Falsified { order, .. } => write!(f, "no coefficient table fits order {}", order),
            SkewSolveError::NoPoints => write!(f, "could not sample admissible points"),
        }
    }
}

/// `a_k` of the rank-one block at a point (`None` if the block is singular
/// there).
pub fn block_coefficient(p: &SkewPoint, k: u32) -> Option<Q> {
    let s = icb_series(1, &p.theta0.square(), &p.theta_t.square(), &[p.theta.clone(), q(1, 4)], &p.beta, false, k).ok()?;
    Some(s.coeffs.get(k as usize)?.a.clone())
}

#[derive(Clone, Debug)]
pub struct CSolution {
    pub order: u32,
    pub terms: Vec<SkewTerm>,
    pub trials: usize,
    /// Solution set of the plain system.
    pub plain: AffineSolution<Q>,
    /// Solution set once both symmetries are imposed (`None` if they are
    /// incompatible with the data).
    pub symmetric: Option<AffineSolution<Q>>,
    /// Non-negative integer points of the symmetric solution set (free
    /// coordinates searched in `0..=bound`), capped.
    pub integer_points: Vec<Vec<Q>>,
    pub search_bound: i64,
    pub search_complete: bool,
}

fn determined_in(sol: &AffineSolution<Q>, i: usize) -> Option<Q> {
    sol.nullspace.iter().all(|v| v[i].is_zero()).then(|| sol.particular[i].clone())
}

impl CSolution {
    pub fn index(&self, t: &SkewTerm) -> Option<usize> {
        self.terms.binary_search(t).ok()
    }

    /// Value fixed by the data alone.
    pub fn determined(&self, t: &SkewTerm) -> Option<Q> {
        determined_in(&self.plain, self.index(t)?)
    }

    /// Value fixed by the data plus the two symmetries.
    pub fn determined_symmetric(&self, t: &SkewTerm) -> Option<Q> {
        determined_in(self.symmetric.as_ref()?, self.index(t)?)
    }

    pub fn nullity(&self) -> usize {
        self.plain.nullspace.len()
    }

    pub fn rank(&self) -> usize {
        self.terms.len() - self.nullity()
    }

    /// The preferred table: the unique symmetric solution if there is one,
    /// else the first non-negative integer point, else the plain particular
    /// solution.
    pub fn table(&self) -> BTreeMap<SkewTerm, Q> {
        let vals = match &self.symmetric {
            Some(s) if s.nullspace.is_empty() => s.particular.clone(),
            _ => self.integer_points.first().cloned().unwrap_or_else(|| self.plain.particular.clone()),
        };
        self.terms.iter().cloned().zip(vals).collect()
    }
}

const MAX_INTEGER_POINTS: usize = 16;

// The nullspace basis is the identity on the free columns, so the free
// coordinates of a point are exactly the multipliers searched here.
fn integer_search(sol: &AffineSolution<Q>, bound: i64) -> (Vec<Vec<Q>>, bool) {
    let n = sol.nullspace.len();
    let mut found = Vec::new();
    if n > 4 {
        return (found, false);
    }
    let mut idx = alloc::vec![0i64; n];
    loop {
        let mut x = sol.particular.clone();
        for (v, &t) in sol.nullspace.iter().zip(&idx) {
            let t = Q::from(t);
            for (xi, vi) in x.iter_mut().zip(v) {
                *xi += &(vi.clone() * t.clone());
            }
        }
        if x.iter().all(|v| v.denominator() == &dashu_int::UBig::ONE && *v >= Q::ZERO) {
            found.push(x);
            if found.len() >= MAX_INTEGER_POINTS {
                return (found, false);
            }
        }
        // odometer
        let mut k = 0;
        loop {
            if k == n {
                return (found, true);
            }
            idx[k] += 1;
            if idx[k] <= bound {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

// A shared small denominator keeps the elimination from blowing up; 7 is
// generic enough to stay off the poles of the block.
fn sevenths_point(sampler: &mut PointSampler) -> ParameterPoint {
    let mut p = ParameterPoint::new();
    for s in [Sym::Theta, Sym::Theta0, Sym::ThetaT, Sym::Beta] {
        let n = loop {
            let n = (sampler.next_u64() % 121) as i64 - 60;
            if n % 7 != 0 {
                break n;
            }
        };
        p = p.with(s, q(n, 7));
    }
    p
}

/// Recover the `c` table at order `k` from `#terms + margin` sampled points.
pub fn solve_c(k: u32, margin: usize, seed: u64) -> Result<CSolution, SkewSolveError> {
    let terms = skew_terms(k);
    let n = terms.len();
    let trials = n + margin;
    let mut sampler = PointSampler::new(&[], seed);
    let pts: Vec<ParameterPoint> = (0..trials).map(|_| sevenths_point(&mut sampler)).collect();
    let rows: Vec<Option<(Vec<Q>, Q)>> = crate::par::map(&pts, |pp| {
        let sp = SkewPoint::from_point(pp).ok()?;
        let a = block_coefficient(&sp, k)?;
        Some((terms.iter().map(|t| basis_value(t, &sp)).collect(), a))
    });
    let mut a_rows = Vec::new();
    let mut rhs = Vec::new();
    for r in rows.into_iter().flatten() {
        a_rows.push(r.0);
        rhs.push(r.1);
    }
    if a_rows.len() < n {
        return Err(SkewSolveError::NoPoints);
    }
    let plain = solve(&a_rows, &rhs, n).map_err(|_| SkewSolveError::Falsified { order: k, witness: pts[0].clone() })?;

    // symmetry constraints c_t − c_{t'} = 0
    let mut sym_rows = a_rows.clone();
    let mut sym_rhs = rhs.clone();
    for (i, t) in terms.iter().enumerate() {
        for img in [t.swapped(), t.transposed()] {
            let j = terms.binary_search(&img).expect("images have the same order");
            if j != i {
                let mut row = alloc::vec![Q::ZERO; n];
                row[i] = Q::ONE;
                row[j] = -Q::ONE;
                sym_rows.push(row);
                sym_rhs.push(Q::ZERO);
            }
        }
    }
    let symmetric = solve(&sym_rows, &sym_rhs, n).ok();
    let bound = 4 * (k as i64 + 1) * (k as i64 + 1);
    let (integer_points, search_complete) = match &symmetric {
        Some(s) => integer_search(s, bound),
        None => (Vec::new(), true),
    };
    Ok(CSolution { order: k, terms, trials, plain, symmetric, integer_points, search_bound: bound, search_complete })
}

/// Evaluate the expansion with a given table at a point.
pub fn expansion_value(k: u32, table: &BTreeMap<SkewTerm, Q>, p: &SkewPoint) -> Q {
    skew_terms(k).iter().fold(Q::ZERO, |acc, t| {
        let c = table.get(t).cloned().unwrap_or(Q::ZERO);
        if c.is_zero() {
            acc
        } else {
            acc + c * basis_value(t, p)
        }
    })
}

/// The observed closed forms, where they apply: `Some(value)` for terms
/// covered by one of them.
pub fn observed_value(t: &SkewTerm) -> Option<i64> {
    let (nu, eta) = (t.nu.parts(), t.eta.parts());
    let (l, m) = (t.lambda.size() as i64, t.mu.size() as i64);
    match (nu, eta) {
        ([], []) => Some(1),
        ([1], [1]) => Some(2 * l * m),
        ([2], [2]) => Some(q_stat(&t.lambda) * q_stat(&t.mu)),
        ([2], [1, 1]) => Some(3 * q_stat(&t.lambda) * q_stat(&t.mu.conjugate())),
        _ => None,
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ObservedReport {
    pub matches: usize,
    pub mismatches: Vec<(SkewTerm, Q, i64)>,
    /// Terms an observed family covers but the data leaves free.
    pub undetermined: Vec<SkewTerm>,
    /// Determined entries that are not non-negative integers.
    pub non_integral: Vec<(SkewTerm, Q)>,
    /// Determined pairs violating `c^{ν,η}_{λ,μ} = c^{η,ν}_{μ,λ} = c^{ν′,η′}_{λ′,μ′}`.
    pub symmetry_violations: Vec<(SkewTerm, SkewTerm)>,
    pub determined: usize,
}

impl ObservedReport {
    pub fn pass(&self) -> bool {
        self.mismatches.is_empty() && self.non_integral.is_empty() && self.symmetry_violations.is_empty()
    }
}

/// Check the observed families, integrality and both symmetries on every
/// entry the data (plus symmetries) determines.
pub fn verify_observed(solutions: &[CSolution]) -> ObservedReport {
    let mut rep = ObservedReport::default();
    for sol in solutions {
        for t in &sol.terms {
            let det = sol.determined(t).or_else(|| sol.determined_symmetric(t));
            match det {
                Some(v) => {
                    rep.determined += 1;
                    if v.denominator() != &dashu_int::UBig::ONE || v < Q::ZERO {
                        rep.non_integral.push((t.clone(), v.clone()));
                    }
                    if let Some(o) = observed_value(t) {
                        if v == Q::from(o) {
                            rep.matches += 1;
                        } else {
                            rep.mismatches.push((t.clone(), v.clone(), o));
                        }
                    }
                    for img in [t.swapped(), t.transposed()] {
                        if let Some(w) = sol.determined(&img) {
                            if sol.determined(t).is_some() && w != v && !rep.symmetry_violations.iter().any(|(a, b)| a == &img && b == t) {
                                rep.symmetry_violations.push((t.clone(), img));
                            }
                        }
                    }
                }
                None => {
                    if observed_value(t).is_some() {
                        rep.undetermined.push(t.clone());
                    }
                }
            }
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[u32]) -> Partition {
        Partition::from_parts(v)
    }

    #[test]
    fn q_statistic() {
        assert_eq!(q_stat(&Partition::empty()), 0);
        assert_eq!(q_stat(&p(&[1])), 0);
        assert_eq!(q_stat(&p(&[2, 1])), 3);
        let big = p(&[6, 4, 4, 3, 2, 1]);
        let tab = q_tableau(&big);
        assert_eq!(tab[0], alloc::vec![0, 2, 4, 6, 8, 10]);
        assert_eq!(tab[1], alloc::vec![5, 11, 16, 20]);
        assert_eq!(tab[5], alloc::vec![5]);
        let total: i64 = tab.iter().flatten().sum();
        assert_eq!(q_stat(&big), total);
    }

    #[test]
    fn keys_round_trip() {
        let t = SkewTerm::new(p(&[2, 1]), p(&[1]), p(&[1]), p(&[1])).unwrap();
        assert_eq!(t.key(), "[2,1]|[1]|[1]|[1]");
        assert_eq!(SkewTerm::parse_key(&t.key()), Some(t));
        assert!(SkewTerm::new(p(&[1]), p(&[]), p(&[2]), p(&[])).is_err());
    }

    #[test]
    fn empty_skews_are_one() {
        let sp = SkewPoint { theta: q(1, 3), theta0: q(2, 5), theta_t: q(-1, 7), beta: q(3, 11) };
        let l = p(&[3, 1]);
        assert_eq!(u_skew(&l, &l, &sp).unwrap(), Q::ONE);
        assert_eq!(v_skew(&l, &l, &sp).unwrap(), Q::ONE);
    }
}
