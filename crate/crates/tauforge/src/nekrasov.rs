//! c = 1 Nekrasov sums over pairs of Young diagrams and their confluent
//! degenerations.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::field::{Field, Q};
use crate::par;
use crate::partition::{partitions, Partition};
use crate::scalar::{ParameterPoint, PointError, Sym};
use crate::verma::{four_point_block, BlockWeights, VermaError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NekrasovKind {
    /// Four regular punctures: θ_0, θ_t, σ, θ_1, θ_∞.
    Full4,
    /// One rank-1 irregular point: θ_0, θ_t, σ, θ_*.
    PV,
    /// Two rank-1 irregular points: θ_⋆, σ, θ_*.
    PIII,
    /// Rank-1/2 point plus two regular ones: θ_0, θ_t, σ.
    PIIIAlt,
    /// θ_⋆, σ.
    PIIID7,
    /// σ only.
    PIIID8,
}

impl NekrasovKind {
    pub const ALL: [NekrasovKind; 6] = [
        NekrasovKind::Full4,
        NekrasovKind::PV,
        NekrasovKind::PIII,
        NekrasovKind::PIIIAlt,
        NekrasovKind::PIIID7,
        NekrasovKind::PIIID8,
    ];

    pub fn symbols(self) -> &'static [Sym] {
        use Sym::*;
        match self {
            NekrasovKind::Full4 => &[Theta0, ThetaT, Sigma, Theta1, ThetaInf],
            NekrasovKind::PV => &[Theta0, ThetaT, Sigma, ThetaStar],
            NekrasovKind::PIII => &[ThetaSStar, Sigma, ThetaStar],
            NekrasovKind::PIIIAlt => &[Theta0, ThetaT, Sigma],
            NekrasovKind::PIIID7 => &[ThetaSStar, Sigma],
            NekrasovKind::PIIID8 => &[Sigma],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NekrasovKind::Full4 => "full4",
            NekrasovKind::PV => "pv",
            NekrasovKind::PIII => "piii",
            NekrasovKind::PIIIAlt => "piii_alt",
            NekrasovKind::PIIID7 => "piii_d7",
            NekrasovKind::PIIID8 => "piii_d8",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|k| k.name() == s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum NekrasovError {
    Point(PointError),
    /// A denominator vanished at this cell.
    NonGeneric { in_mu: bool, cell: (u32, u32) },
    NotAnEdge(NekrasovKind, NekrasovKind),
    Block(VermaError),
}

impl From<PointError> for NekrasovError {
    fn from(e: PointError) -> Self {
        NekrasovError::Point(e)
    }
}

impl fmt::Display for NekrasovError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NekrasovError::Point(e) => write!(f, "{}", e),
            NekrasovError::NonGeneric { in_mu, cell } => write!(
                f,
                "non-generic point: vanishing denominator at cell ({},{}) of {}",
                cell.0,
                cell.1,
                if *in_mu { "mu" } else { "lambda" }
            ),
            NekrasovError::NotAnEdge(a, b) => {
                write!(f, "{} -> {} is not a degeneration edge", a.name(), b.name())
            }
            NekrasovError::Block(e) => write!(f, "{}", e),
        }
    }
}

/// Parameter values read by the factors; unused slots stay `None`.
#[derive(Clone, Debug, Default)]
pub struct NekParams<F> {
    pub theta0: Option<F>,
    pub theta_t: Option<F>,
    pub sigma: Option<F>,
    pub theta1: Option<F>,
    pub theta_inf: Option<F>,
    pub theta_star: Option<F>,
    pub theta_sstar: Option<F>,
}

impl NekParams<Q> {
    pub fn from_point(kind: NekrasovKind, p: &ParameterPoint) -> Result<Self, PointError> {
        let mut out = NekParams::default();
        for &s in kind.symbols() {
            let v = Some(p.q(s)?);
            match s {
                Sym::Theta0 => out.theta0 = v,
                Sym::ThetaT => out.theta_t = v,
                Sym::Sigma => out.sigma = v,
                Sym::Theta1 => out.theta1 = v,
                Sym::ThetaInf => out.theta_inf = v,
                Sym::ThetaStar => out.theta_star = v,
                Sym::ThetaSStar => out.theta_sstar = v,
                _ => unreachable!(),
            }
        }
        Ok(out)
    }
}

fn req<F: Clone>(x: &Option<F>) -> F {
    x.clone().expect("parameter checked by from_point")
}

/// Numerator of a cell with content `x` on the `ε` side (`ε = +1` for λ).
fn cell_numerator<F: Field>(kind: NekrasovKind, p: &NekParams<F>, sigma_e: &F, x: &F) -> F {
    let pair = |a: &Option<F>, b: &Option<F>| {
        let u = req(a) + sigma_e.clone() + x.clone();
        u.square() - req(b).square()
    };
    let lin = |a: &Option<F>| req(a) + sigma_e.clone() + x.clone();
    match kind {
        NekrasovKind::Full4 => pair(&p.theta_t, &p.theta0) * pair(&p.theta1, &p.theta_inf),
        NekrasovKind::PV => lin(&p.theta_star) * pair(&p.theta_t, &p.theta0),
        NekrasovKind::PIII => lin(&p.theta_star) * lin(&p.theta_sstar),
        NekrasovKind::PIIIAlt => pair(&p.theta_t, &p.theta0),
        NekrasovKind::PIIID7 => lin(&p.theta_sstar),
        NekrasovKind::PIIID8 => F::one(),
    }
}

/// `N_{λ,μ}` of the given kind.
pub fn nekrasov_factor<F: Field>(
    kind: NekrasovKind,
    lambda: &Partition,
    mu: &Partition,
    p: &NekParams<F>,
) -> Result<F, NekrasovError> {
    let sigma = req(&p.sigma);
    let mut num = F::one();
    let mut den = F::one();
    for (in_mu, a, b, s) in [(false, lambda, mu, sigma.clone()), (true, mu, lambda, -sigma.clone())] {
        let a_conj = a.conjugate();
        for (i, j) in a.cells() {
            let content = F::from_i64(i as i64 - j as i64);
            num *= &cell_numerator(kind, p, &s, &content);
            let h = a.hook_with(&a_conj, (i, j));
            let cross = F::from_i64(a_conj.part(j as usize) as i64 + b.part(i as usize) as i64 - i as i64 - j as i64 + 1)
                + F::from_i64(2) * s.clone();
            let d = F::from_i64(h * h) * cross.square();
            if d.is_zero() {
                return Err(NekrasovError::NonGeneric { in_mu, cell: (i, j) });
            }
            den *= &d;
        }
    }
    Ok(num * den.inv().expect("checked nonzero"))
}

/// All pairs `(λ, μ)` with `|λ| + |μ| = k`, λ-size descending then
/// canonical partition order.
pub fn pairs_of_size(k: u32) -> Vec<(Partition, Partition)> {
    let mut out = Vec::new();
    for a in (0..=k).rev() {
        for l in partitions(a) {
            for m in partitions(k - a) {
                out.push((l.clone(), m));
            }
        }
    }
    out
}

/// Coefficients of `t^k`, `k = 0..=M`, of `Σ N_{λ,μ} t^{|λ|+|μ|}`.
pub fn block_sum<F: Field>(kind: NekrasovKind, p: &NekParams<F>, order: u32) -> Result<Vec<F>, NekrasovError> {
    let mut out = Vec::with_capacity(order as usize + 1);
    for k in 0..=order {
        let pairs = pairs_of_size(k);
        let terms = par::map(&pairs, |(l, m)| nekrasov_factor(kind, l, m, p));
        let mut acc = F::zero();
        for t in terms {
            acc += &t?;
        }
        out.push(acc);
    }
    Ok(out)
}

pub fn block_sum_at(kind: NekrasovKind, p: &ParameterPoint, order: u32) -> Result<Vec<Q>, NekrasovError> {
    block_sum(kind, &NekParams::from_point(kind, p)?, order)
}

/// Coefficients of `(1 − t)^a` through `t^M`.
pub fn binomial_series<F: Field>(a: &F, order: u32) -> Vec<F> {
    let mut out = vec![F::one()];
    for k in 1..=order as i64 {
        let prev = out.last().unwrap().clone();
        // c_k = c_{k-1} · (k − 1 − a)/k
        let f = (F::from_i64(k - 1) - a.clone()) * F::from_q(&(Q::ONE / Q::from(k)));
        out.push(prev * f);
    }
    out
}

pub fn series_mul<F: Field>(a: &[F], b: &[F], order: u32) -> Vec<F> {
    (0..=order as usize)
        .map(|k| {
            (0..=k).fold(F::zero(), |acc, i| match (a.get(i), b.get(k - i)) {
                (Some(x), Some(y)) => acc + x.clone() * y.clone(),
                _ => acc,
            })
        })
        .collect()
}

/// Which exponent dresses the Nekrasov sum in the four-point comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dressing {
    /// `(1 − t)^{2θ_tθ_1}`, the one that balances the block.
    ThetaTTheta1,
    /// `(1 − t)^{2θ_0θ_1}`, as printed.
    Theta0Theta1,
}

#[derive(Clone, Debug)]
pub struct AgtReport {
    pub pass: bool,
    pub block: Vec<Q>,
    pub dressed_sum: Vec<Q>,
    /// First order at which the two sides differ.
    pub first_mismatch: Option<u32>,
}

/// Compare the Virasoro block with the dressed Nekrasov sum at `c = 1`.
/// The common `t^{σ²−θ_0²−θ_t²}` is the same on both sides and is dropped.
pub fn agt_equivalence_check(p: &ParameterPoint, order: u32, dressing: Dressing) -> Result<AgtReport, NekrasovError> {
    let params = NekParams::from_point(NekrasovKind::Full4, p)?;
    let [d1, d2, d, d3, d4] = p.four_point_weights()?;
    let w = BlockWeights { d1, d2, delta: d, d3, d4, c: Q::ONE };
    let block = four_point_block(&w, order).map_err(NekrasovError::Block)?;
    let sum = block_sum(NekrasovKind::Full4, &params, order)?;
    let two = Q::from(2);
    let a = match dressing {
        Dressing::ThetaTTheta1 => two * req(&params.theta_t) * req(&params.theta1),
        Dressing::Theta0Theta1 => two * req(&params.theta0) * req(&params.theta1),
    };
    let dressed_sum = series_mul(&binomial_series(&a, order), &sum, order);
    let first_mismatch = (0..=order).find(|&k| block[k as usize] != dressed_sum[k as usize]);
    Ok(AgtReport { pass: first_mismatch.is_none(), block, dressed_sum, first_mismatch })
}

/// The five degeneration edges.
pub const EDGES: [(NekrasovKind, NekrasovKind); 5] = [
    (NekrasovKind::Full4, NekrasovKind::PV),
    (NekrasovKind::PV, NekrasovKind::PIII),
    (NekrasovKind::PV, NekrasovKind::PIIIAlt),
    (NekrasovKind::PIII, NekrasovKind::PIIID7),
    (NekrasovKind::PIIID7, NekrasovKind::PIIID8),
];

/// Parent parameters realising the limit `Λ → ∞` towards `child`.
fn parent_params(parent: NekrasovKind, child: NekrasovKind, c: &NekParams<Q>, big: &Q) -> Result<NekParams<Q>, NekrasovError> {
    let half = Q::ONE / Q::from(2);
    let mut p = c.clone();
    match (parent, child) {
        (NekrasovKind::Full4, NekrasovKind::PV) => {
            // θ_1 + θ_∞ = Λ, θ_1 − θ_∞ = θ_*
            let ts = req(&c.theta_star);
            p.theta1 = Some((big + &ts) * &half);
            p.theta_inf = Some((big - &ts) * &half);
            p.theta_star = None;
        }
        (NekrasovKind::PV, NekrasovKind::PIII) => {
            // θ_t + θ_0 = Λ, θ_t − θ_0 = θ_⋆
            let tss = req(&c.theta_sstar);
            p.theta_t = Some((big + &tss) * &half);
            p.theta0 = Some((big - &tss) * &half);
            p.theta_sstar = None;
        }
        (NekrasovKind::PV, NekrasovKind::PIIIAlt) | (NekrasovKind::PIII, NekrasovKind::PIIID7) => {
            p.theta_star = Some(big.clone());
        }
        (NekrasovKind::PIIID7, NekrasovKind::PIIID8) => {
            p.theta_sstar = Some(big.clone());
        }
        _ => return Err(NekrasovError::NotAnEdge(parent, child)),
    }
    Ok(p)
}

#[derive(Clone, Debug)]
pub struct DegenerationReport {
    pub lambdas: Vec<Q>,
    /// `|parent_k(Λ)/Λ^k − child_k|`, indexed `[Λ][k]`.
    pub deviation: Vec<Vec<f64>>,
    /// `deviation[i][k] / deviation[i+1][k]` (NaN where both vanish).
    pub ratios: Vec<Vec<f64>>,
}

impl DegenerationReport {
    /// Every ratio for `1 ≤ k ≤ k_max` lies in `[lo, hi]`, and `k = 0` is
    /// exact at every Λ.
    pub fn within(&self, k_max: usize, lo: f64, hi: f64) -> bool {
        self.deviation.iter().all(|d| d[0] == 0.0)
            && self.ratios.iter().all(|r| r.iter().take(k_max + 1).skip(1).all(|&x| x >= lo && x <= hi))
    }
}

pub fn degeneration_limit_check(
    parent: NekrasovKind,
    child: NekrasovKind,
    p: &ParameterPoint,
    lambdas: &[Q],
    order: u32,
) -> Result<DegenerationReport, NekrasovError> {
    if !EDGES.contains(&(parent, child)) {
        return Err(NekrasovError::NotAnEdge(parent, child));
    }
    let cp = NekParams::from_point(child, p)?;
    let target = block_sum(child, &cp, order)?;
    let mut deviation = Vec::new();
    for big in lambdas {
        let pp = parent_params(parent, child, &cp, big)?;
        let coeffs = block_sum(parent, &pp, order)?;
        let mut scale = Q::ONE;
        let mut row = Vec::new();
        for (k, x) in coeffs.iter().enumerate() {
            let d = x * &scale - &target[k];
            row.push(d.to_f64().value().abs());
            scale /= big;
        }
        deviation.push(row);
    }
    let ratios = deviation
        .windows(2)
        .map(|w| w[0].iter().zip(&w[1]).map(|(a, b)| a / b).collect())
        .collect();
    Ok(DegenerationReport { lambdas: lambdas.to_vec(), deviation, ratios })
}

/// Canonical `"p/q"` form.
pub fn q_string(x: &Q) -> String {
    use alloc::format;
    format!("{}/{}", x.numerator(), x.denominator())
}
