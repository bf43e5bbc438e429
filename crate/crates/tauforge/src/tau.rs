//! Fourier-type tau series and Hamiltonian residual checks.
//!
//! Channel `n` of a tau series is `s^n C_n/C_0 · (block with shifted
//! parameter)`. `C_n/C_0` is a product of Barnes shift ratios. Each of them
//! factors as `Γ(1+x)^{±n} · R(x)` with a rational `R`, so the `Γ` powers are
//! a pure rescaling `s → κ s` and can be dropped without changing any
//! residual (`StructureMode::Reduced`); `StructureMode::Full` keeps them, at
//! a given decimal precision.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::channel::{validity_window, window_cells, ChannelSeries, ChannelSpec, DiffRing, Truncation};
use crate::diffpoly::DiffPoly;
use crate::field::{q, set_working_digits, working_digits, Field, QuadExt, Real, Q};
use crate::mag::Mag;
use crate::gamma::{barnes_shift_ratio, barnes_shift_reduced, GammaError};
use crate::scalar::{ParameterPoint, PointError, Scalar, Sym};
use crate::verma::{four_point_block, BlockWeights, VermaError};
use crate::whittaker::{icb_series, IrregularError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    PVI,
    PV,
    PIV,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::PVI => "pvi",
            Family::PV => "pv",
            Family::PIV => "piv",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [Family::PVI, Family::PV, Family::PIV].into_iter().find(|f| f.name() == s)
    }

    pub fn symbols(self) -> &'static [Sym] {
        match self {
            Family::PVI => &[Sym::Theta0, Sym::ThetaT, Sym::Theta1, Sym::ThetaInf, Sym::Sigma],
            Family::PV => &[Sym::Theta, Sym::Theta0, Sym::ThetaT, Sym::Beta],
            Family::PIV => &[Sym::Theta, Sym::ThetaT, Sym::Beta],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StructureMode {
    Reduced,
    Full { digits: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub enum TauError {
    Point(PointError),
    Pole(GammaError),
    Block(String),
    /// The requested scalar type cannot hold a value (e.g. `√2` in `Q`).
    Field(&'static str),
    /// No residual cell survives truncation.
    TruncationTooSmall { nmax: i64, order: u32 },
    NoOde(Family),
}

impl fmt::Display for TauError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TauError::Point(e) => write!(f, "{}", e),
            TauError::Pole(e) => write!(f, "{}", e),
            TauError::Block(e) => write!(f, "block: {}", e),
            TauError::Field(w) => write!(f, "scalar type cannot represent {}", w),
            TauError::TruncationTooSmall { nmax, order } => {
                write!(f, "empty trusted window; try --nmax {} --order {}", nmax, order)
            }
            TauError::NoOde(fam) => write!(f, "no residual check for {}", fam.name()),
        }
    }
}

impl From<PointError> for TauError {
    fn from(e: PointError) -> Self {
        TauError::Point(e)
    }
}
impl From<GammaError> for TauError {
    fn from(e: GammaError) -> Self {
        TauError::Pole(e)
    }
}
impl From<IrregularError> for TauError {
    fn from(e: IrregularError) -> Self {
        TauError::Block(alloc::format!("{:?}", e))
    }
}
impl From<VermaError> for TauError {
    fn from(e: VermaError) -> Self {
        TauError::Block(alloc::format!("{:?}", e))
    }
}

/// Scalars a tau series can be assembled in.
pub trait TauScalar: Field {
    fn from_scalar(x: &Scalar) -> Option<Self>;
}

impl TauScalar for Q {
    fn from_scalar(x: &Scalar) -> Option<Self> {
        x.as_rational().cloned()
    }
}
impl TauScalar for QuadExt {
    fn from_scalar(x: &Scalar) -> Option<Self> {
        match x {
            Scalar::Rational(q) => Some(QuadExt::from_q(q)),
            Scalar::Quad(x) => Some(x.clone()),
            Scalar::Float(_) => None,
        }
    }
}
impl TauScalar for Real {
    fn from_scalar(x: &Scalar) -> Option<Self> {
        Some(x.to_real())
    }
}

fn get(p: &ParameterPoint, s: Sym) -> Result<Q, TauError> {
    Ok(p.q(s)?)
}

/// `(x, shift)` pairs with `C_n/C_0 = sign · ∏ G(1+x+shift)/G(1+x)
/// / ∏ (denominator pairs)`.
struct Shifts {
    num: Vec<(Q, i64)>,
    den: Vec<(Q, i64)>,
    sign: bool,
}

fn shifts(family: Family, n: i64, p: &ParameterPoint) -> Result<Shifts, TauError> {
    Ok(match family {
        Family::PVI => {
            let (t0, tt, t1, ti, s) =
                (get(p, Sym::Theta0)?, get(p, Sym::ThetaT)?, get(p, Sym::Theta1)?, get(p, Sym::ThetaInf)?, get(p, Sym::Sigma)?);
            let mut num = Vec::new();
            for e in [1i64, -1] {
                for e2 in [1i64, -1] {
                    num.push((&tt + Q::from(e) * &t0 + Q::from(e2) * &s, e2 * n));
                    num.push((&t1 + Q::from(e) * &ti + Q::from(e2) * &s, e2 * n));
                }
            }
            let den = alloc::vec![(Q::from(2) * &s, 2 * n), (Q::from(-2) * &s, -2 * n)];
            Shifts { num, den, sign: false }
        }
        Family::PV => {
            let (th, t0, tt, b) = (get(p, Sym::Theta)?, get(p, Sym::Theta0)?, get(p, Sym::ThetaT)?, get(p, Sym::Beta)?);
            let num = alloc::vec![
                (&t0 + &th - &b, -n),
                (-&t0 + &th - &b, -n),
                (&tt + &b, n),
                (&tt - &b, -n),
            ];
            Shifts { num, den: Vec::new(), sign: (n * (n + 1) / 2).rem_euclid(2) == 1 }
        }
        Family::PIV => {
            let (th, tt, b) = (get(p, Sym::Theta)?, get(p, Sym::ThetaT)?, get(p, Sym::Beta)?);
            let num = alloc::vec![(&th - &b, -n), (&tt + &b, n), (&tt - &b, -n)];
            Shifts { num, den: Vec::new(), sign: false }
        }
    })
}

/// Seeded sample points at which every Barnes argument of the structure
/// constants is a non-integer (so no `Γ` along a shift path can hit a pole).
pub fn generic_points(family: Family, count: usize, seed: u64) -> Vec<ParameterPoint> {
    let mut sampler = crate::pit::PointSampler::new(family.symbols(), seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let p = sampler.point();
        let sh = shifts(family, 1, &p).expect("sampled symbols present");
        if sh.num.iter().chain(sh.den.iter()).all(|(x, _)| x.denominator() != &dashu_int::UBig::ONE) {
            out.push(p);
        }
    }
    out
}

fn pow2_real(e: &Q, digits: usize) -> Real {
    let bits = crate::field::digits_to_bits(digits);
    let ln2 = Real(Real::with_bits(&Q::from(2), bits).0.ln());
    Real((Real::with_bits(e, bits) * ln2).0.exp())
}

/// `C_n/C_0`. In reduced mode the result is exact (rational, or in `Q(√2)`
/// for P_IV); in full mode it is a float at `digits`.
pub fn structure_ratio(family: Family, n: i64, p: &ParameterPoint, mode: StructureMode) -> Result<Scalar, TauError> {
    let sh = shifts(family, n, p)?;
    let sign = if sh.sign { -Q::ONE } else { Q::ONE };
    match mode {
        StructureMode::Reduced => {
            let mut acc = sign;
            for (x, k) in &sh.num {
                acc *= &barnes_shift_reduced(x, *k);
            }
            for (x, k) in &sh.den {
                let r = barnes_shift_reduced(x, *k);
                if r.is_zero() {
                    return Err(TauError::Pole(GammaError::Pole(x.clone())));
                }
                acc /= r;
            }
            if family == Family::PIV {
                // 2^{−3n²/2}; the linear part 2^{n(θ−3β)} is an s-rescaling
                let e = 3 * n * n;
                let mut v = QuadExt::from_q(&acc);
                let half_root = QuadExt::new(Q::ZERO, q(1, 2));
                for _ in 0..e {
                    v = v * half_root.clone();
                }
                return Ok(Scalar::Quad(v));
            }
            Ok(Scalar::Rational(acc))
        }
        StructureMode::Full { digits } => {
            let mut acc = Real::from_q(&sign);
            for (x, k) in &sh.num {
                acc *= &barnes_shift_ratio(x, *k, digits)?.to_real();
            }
            for (x, k) in &sh.den {
                let r = barnes_shift_ratio(x, *k, digits)?.to_real();
                acc = acc.div(&r).ok_or_else(|| TauError::Pole(GammaError::Pole(x.clone())))?;
            }
            if family == Family::PIV {
                let (th, b) = (get(p, Sym::Theta)?, get(p, Sym::Beta)?);
                let e = Q::from(n) * (th - Q::from(3) * b) - q(3 * n * n, 2);
                acc *= &pow2_real(&e, digits + 10);
            }
            Ok(Scalar::Float(acc))
        }
    }
}

/// Channel layout of the tau series. For P_V the normalised series
/// `t^{−2θ_t²−θ²/2}e^{−θt/2}τ` is stored; for P_IV the `t^{−2θ_t²}e^{θ_t t²}`
/// prefactor is included.
pub fn channel_spec<F: Field>(family: Family, p: &ParameterPoint) -> Result<ChannelSpec<F>, TauError> {
    let f = |x: Q| F::from_q(&x);
    Ok(match family {
        Family::PVI => {
            let (t0, tt, s) = (get(p, Sym::Theta0)?, get(p, Sym::ThetaT)?, get(p, Sym::Sigma)?);
            ChannelSpec {
                r: 1,
                rate0: F::zero(),
                rate1: F::zero(),
                texp0: f(s.square() - t0.square() - tt.square()),
                texp1: f(Q::from(2) * s),
                texp2: 1,
            }
        }
        Family::PV => {
            let (th, b) = (get(p, Sym::Theta)?, get(p, Sym::Beta)?);
            ChannelSpec {
                r: 1,
                rate0: f(&b - &th / Q::from(2)),
                rate1: F::one(),
                texp0: f(-th.square() / Q::from(2) + Q::from(2) * &b * (&th - &b)),
                texp1: f(Q::from(2) * th - Q::from(4) * b),
                texp2: -2,
            }
        }
        Family::PIV => {
            let (th, tt, b) = (get(p, Sym::Theta)?, get(p, Sym::ThetaT)?, get(p, Sym::Beta)?);
            ChannelSpec {
                r: 2,
                rate0: f(&tt + &b),
                rate1: F::one(),
                texp0: f(tt.square() + &b * (Q::from(2) * &th - Q::from(3) * &b)),
                texp1: f(Q::from(2) * th - Q::from(6) * b),
                texp2: -3,
            }
        }
    })
}

/// A degree-1 tau series together with the truncation it was built with.
#[derive(Clone, Debug)]
pub struct Tau<F> {
    pub family: Family,
    pub series: ChannelSeries<F>,
    pub truncation: Truncation,
}

fn conv<F: TauScalar>(x: Scalar, what: &'static str) -> Result<F, TauError> {
    F::from_scalar(&x).ok_or(TauError::Field(what))
}

/// Block coefficients of channel `n` (descending powers for P_V/P_IV,
/// ascending for P_VI), together with the `t`-exponent the block carries.
fn channel_block(family: Family, n: i64, p: &ParameterPoint, order: u32) -> Result<(Q, Vec<QuadExt>), TauError> {
    let nq = Q::from(n);
    match family {
        Family::PVI => {
            let w = p.four_point_weights()?;
            let s = get(p, Sym::Sigma)? + &nq;
            let bw = BlockWeights { d1: w[0].clone(), d2: w[1].clone(), delta: s.square(), d3: w[3].clone(), d4: w[4].clone(), c: Q::ONE };
            let b = four_point_block(&bw, order)?;
            Ok((s.square() - &w[0] - &w[1], b.iter().map(QuadExt::from_q).collect()))
        }
        Family::PV => {
            let (th, t0, tt, b) = (get(p, Sym::Theta)?, get(p, Sym::Theta0)?, get(p, Sym::ThetaT)?, get(p, Sym::Beta)?);
            let s = icb_series(1, &t0.square(), &tt.square(), &[th.clone(), q(1, 4)], &(b + nq), false, order)?;
            // strip the normalisation t^{−2θ_t²−θ²/2}
            Ok((s.t_exponent - Q::from(2) * tt.square() - th.square() / Q::from(2), s.coeffs))
        }
        Family::PIV => {
            let (th, tt, b) = (get(p, Sym::Theta)?, get(p, Sym::ThetaT)?, get(p, Sym::Beta)?);
            let s = icb_series(2, &Q::ZERO, &tt.square(), &[th, Q::ZERO, q(1, 4)], &((b + nq) / Q::from(2)), true, order)?;
            Ok((s.t_exponent - Q::from(2) * tt.square(), s.coeffs))
        }
    }
}

/// Assemble channels `|n| ≤ nmax` to relative order `order`.
pub fn tau_series<F: TauScalar>(
    family: Family,
    p: &ParameterPoint,
    nmax: i64,
    order: u32,
    mode: StructureMode,
) -> Result<Tau<F>, TauError> {
    if let StructureMode::Full { digits } = mode {
        // process-wide: rationals entering `Real` arithmetic are rounded here
        set_working_digits(digits + 10);
    }
    for &s in family.symbols() {
        p.q(s)?;
    }
    let spec = channel_spec::<F>(family, p)?;
    let spec_q = channel_spec::<Q>(family, p)?;
    let channels: Vec<i64> = (-nmax..=nmax).collect();
    let blocks = crate::par::map(&channels, |&n| channel_block(family, n, p, order).map(|b| (n, b)));
    let mut series = ChannelSeries::zero(spec, 1);
    for r in blocks {
        let (n, (texp, coeffs)) = r?;
        debug_assert_eq!(texp, spec_q.reference(1, n), "channel exponent bookkeeping");
        let c: F = conv(structure_ratio(family, n, p, mode)?, "structure constant")?;
        for (k, a) in coeffs.into_iter().enumerate() {
            let a: F = conv(Scalar::Quad(a), "block coefficient")?;
            let off = if family == Family::PVI { k as i64 } else { -(k as i64) };
            series.insert(n, off, a * c.clone());
        }
    }
    let truncation = if family == Family::PVI {
        Truncation { nmax, kmin: 0, kmax: order as i64 }
    } else {
        Truncation { nmax, kmin: -(order as i64), kmax: 0 }
    };
    Ok(Tau { family, series, truncation })
}

impl<F: Field> Tau<F> {
    /// Replace `s` by `κs`, i.e. multiply channel `n` by `κ^n`. Residuals
    /// are invariant channel by channel up to the factor `κ^N`.
    pub fn absorb(&mut self, kappa: &F) {
        let inv = kappa.inv().expect("nonzero rescaling");
        let mut out = ChannelSeries::zero(self.series.spec.clone(), self.series.degree);
        for (n, k, x) in self.series.cells() {
            let f = if n >= 0 { kappa.pow(n as u32) } else { inv.pow((-n) as u32) };
            out.insert(n, k, x.clone() * f);
        }
        self.series = out;
    }

    /// Multiply every coefficient by `c` (residual of degree `d` picks up `c^d`).
    pub fn rescale(&mut self, c: &F) {
        self.series = self.series.scale(c);
    }
}

impl Tau<Real> {
    /// The `κ` that gives the leading coefficients of channels `±1` equal
    /// magnitude. Full-precision structure constants differ by many orders
    /// of magnitude between `n` and `−n`; the absolute size of a residual
    /// cell in channel `N` is only meaningful up to `κ^N`, and balancing
    /// puts all channels on the scale of channel 0.
    pub fn balancing_factor(&self) -> Real {
        let (a, b) = (self.series.get(-1, 0).abs(), self.series.get(1, 0).abs());
        if a.is_zero() || b.is_zero() {
            return Real::one();
        }
        a.div(&b).expect("nonzero").sqrt()
    }
}

/// Cleared P_V residual, with `T = τ̃`: writing `h = tT′/T`,
/// `T⁸·[(th″)² − (h − th′ + 2h′²)² + ¼((2h′−θ)² − 4θ_0²)((2h′+θ)² − 4θ_t²)]`.
pub fn pv_residual<F: Field, R: DiffRing<F>>(tau: &R, theta: &F, theta0: &F, theta_t: &F) -> R {
    let t1 = tau.derive();
    let t2 = tau.square();
    let t4 = t2.square();
    let h = t1.mul_t(1); // T²·h
    let h1 = h.derive().mul(tau).sub(&h.mul(&t1)); // T²·h′
    let h2 = h1.derive().mul(tau).sub(&h1.mul(&t1).scale(&F::from_i64(2))); // T³·h″
    let x = h.mul(&t2).mul(tau).sub(&h1.mul(&t2).mul_t(1)).add(&h1.square().scale(&F::from_i64(2)));
    let th_t2 = t2.scale(theta);
    let two_h1 = h1.scale(&F::from_i64(2));
    let a = two_h1.sub(&th_t2).square().sub(&t4.scale(&(theta0.square() * F::from_i64(4))));
    let b = two_h1.add(&th_t2).square().sub(&t4.scale(&(theta_t.square() * F::from_i64(4))));
    let quarter = F::from_q(&q(1, 4));
    h2.square().mul(&t2).mul_t(2).sub(&x.square()).add(&a.mul(&b).scale(&quarter))
}

/// Cleared P_IV residual with `H = τ′/τ`:
/// `τ⁶·[(H″)² − 4(tH′ − H)² + 4H′(H′ − 2(θ+θ_t))(H′ − 4θ_t)]`.
pub fn piv_residual<F: Field, R: DiffRing<F>>(tau: &R, theta: &F, theta_t: &F) -> R {
    let h0 = tau.derive(); // τ·H
    let h1 = h0.derive().mul(tau).sub(&h0.mul(&h0)); // τ²·H′
    let h2 = h1.derive().mul(tau).sub(&h1.mul(&h0).scale(&F::from_i64(2))); // τ³·H″
    let t2 = tau.square();
    let lin = h1.mul_t(1).sub(&h0.mul(tau)); // τ²(tH′ − H)
    let c1 = (theta.clone() + theta_t.clone()) * F::from_i64(2);
    let c2 = theta_t.clone() * F::from_i64(4);
    let f1 = h1.sub(&t2.scale(&c1));
    let f2 = h1.sub(&t2.scale(&c2));
    h2.square()
        .sub(&lin.square().mul(&t2).scale(&F::from_i64(4)))
        .add(&h1.mul(&f1).mul(&f2).scale(&F::from_i64(4)))
}

fn residual_params<F: Field>(family: Family, p: &ParameterPoint) -> Result<Vec<F>, TauError> {
    let f = |s| get(p, s).map(|x| F::from_q(&x));
    match family {
        Family::PV => Ok(alloc::vec![f(Sym::Theta)?, f(Sym::Theta0)?, f(Sym::ThetaT)?]),
        Family::PIV => Ok(alloc::vec![f(Sym::Theta)?, f(Sym::ThetaT)?]),
        Family::PVI => Err(TauError::NoOde(Family::PVI)),
    }
}

fn residual_of<F: Field, R: DiffRing<F>>(family: Family, tau: &R, ps: &[F]) -> R {
    match family {
        Family::PV => pv_residual(tau, &ps[0], &ps[1], &ps[2]),
        _ => piv_residual(tau, &ps[0], &ps[1]),
    }
}

/// Homogeneity degree and offset reach of the cleared residual, read off
/// its symbolic form at the given point.
pub fn residual_shape(family: Family, p: &ParameterPoint) -> Result<(usize, i64), TauError> {
    let ps = residual_params::<Q>(family, p)?;
    let r = if family == Family::PIV { 2 } else { 1 };
    let poly = residual_of(family, &DiffPoly::<Q>::unknown(), &ps);
    let d = poly.degree().expect("cleared residual is homogeneous");
    Ok((d, poly.offset_reach(r).unwrap_or(i64::MIN)))
}

#[derive(Clone, Debug)]
pub struct ResidualReport<F> {
    pub degree: usize,
    pub reach: i64,
    /// Every trusted cell (including those whose value is exactly zero).
    pub trusted: Vec<(i64, i64)>,
    pub residual: ChannelSeries<F>,
    /// Bound on the size of the terms summed in each cell.
    pub scale: ChannelSeries<Mag>,
}

impl<F: Field> ResidualReport<F> {
    pub fn value(&self, n: i64, k: i64) -> F {
        self.residual.get(n, k)
    }

    pub fn exact_zero(&self) -> bool {
        self.trusted.iter().all(|&(n, k)| self.value(n, k).is_zero())
    }

    /// `log10` of the largest trusted cell, `None` when all vanish.
    pub fn max_log10(&self) -> Option<f64> {
        self.residual.max_log10_abs(self.trusted.iter())
    }

    /// Largest `log10(|cell| / term size)` over trusted cells: how many
    /// digits of cancellation short of exact zero the residual is.
    pub fn max_relative_log10(&self) -> Option<f64> {
        self.trusted
            .iter()
            .filter_map(|&(n, k)| {
                let v = self.value(n, k).log10_abs()?;
                Some(v - self.scale.get(n, k).log10_abs().unwrap_or(v))
            })
            .fold(None, |m, x| Some(m.map_or(x, |y: f64| y.max(x))))
    }

    /// Trusted cells in channel `n`, descending offsets.
    pub fn channel_cells(&self, n: i64) -> Vec<i64> {
        let mut ks: Vec<i64> = self.trusted.iter().filter(|c| c.0 == n).map(|c| c.1).collect();
        ks.sort_unstable_by(|a, b| b.cmp(a));
        ks
    }
}

fn shadow<F: Field>(a: &ChannelSeries<F>) -> ChannelSeries<Mag> {
    let sp = &a.spec;
    let spec = ChannelSpec {
        r: sp.r,
        rate0: Mag::of(&sp.rate0),
        rate1: Mag::of(&sp.rate1),
        texp0: Mag::of(&sp.texp0),
        texp1: Mag::of(&sp.texp1),
        texp2: sp.texp2,
    };
    let mut out = ChannelSeries::zero(spec, a.degree);
    for (n, k, x) in a.cells() {
        out.insert(n, k, Mag::of(x));
    }
    out
}

/// Expand the cleared residual of `tau` and collect its trusted cells.
pub fn ode_residual<F: TauScalar>(tau: &Tau<F>, p: &ParameterPoint) -> Result<ResidualReport<F>, TauError> {
    let ps = residual_params::<F>(tau.family, p)?;
    let (degree, reach) = residual_shape(tau.family, p)?;
    let residual = residual_of(tau.family, &tau.series, &ps);
    let mag_ps: Vec<Mag> = ps.iter().map(Mag::of).collect();
    let scale = residual_of(tau.family, &shadow(&tau.series), &mag_ps);
    debug_assert_eq!(residual.degree as usize, degree);
    let channels: Vec<i64> = (-(degree as i64) * tau.truncation.nmax..=(degree as i64) * tau.truncation.nmax).collect();
    let trusted = window_cells(tau.series.spec.texp2, degree as u32, reach, tau.truncation, &channels);
    debug_assert!(validity_window(&residual, reach, tau.truncation).iter().all(|c| trusted.contains(c)));
    if trusted.is_empty() {
        return Err(TauError::TruncationTooSmall { nmax: tau.truncation.nmax.max(1), order: (-tau.truncation.kmin) as u32 + 4 });
    }
    Ok(ResidualReport { degree, reach, trusted, residual, scale })
}

/// Outcome of a high-precision residual check.
#[derive(Clone, Debug)]
pub struct NumericCheck {
    pub digits: usize,
    /// Working precision actually used.
    pub working_digits: usize,
    /// Balancing factor applied to `s`.
    pub kappa: f64,
    pub cells: usize,
    /// `log10` of the largest trusted cell (`None` if all are exactly zero).
    pub max_abs_log10: Option<f64>,
    pub max_rel_log10: Option<f64>,
    /// `log10` of the largest term bound over trusted cells.
    pub max_scale_log10: f64,
}

impl NumericCheck {
    /// Absolute criterion: every trusted cell below `10^{threshold}`.
    pub fn abs_below(&self, threshold: f64) -> bool {
        self.max_abs_log10.is_none_or(|x| x < threshold)
    }

    pub fn rel_below(&self, threshold: f64) -> bool {
        self.max_rel_log10.is_none_or(|x| x < threshold)
    }
}

/// Residual check with full structure constants at `digits` digits.
///
/// Channels are balanced first (see [`Tau::balancing_factor`]). Cells are
/// sums of terms up to `10^B` in size, so rounding leaves noise near
/// `10^{B − working}`; the working precision is raised until that sits
/// `10` digits below `10^{−digits}`, recomputing once if the first pass
/// (at `digits + 10`) reveals a larger `B`.
pub fn numeric_check(family: Family, p: &ParameterPoint, nmax: i64, order: u32, digits: usize) -> Result<NumericCheck, TauError> {
    let mut extra = 0usize;
    loop {
        let mut tau = tau_series::<Real>(family, p, nmax, order, StructureMode::Full { digits: digits + extra })?;
        let working = working_digits();
        let kappa = tau.balancing_factor();
        tau.absorb(&kappa);
        let rep = ode_residual(&tau, p)?;
        let scale = rep
            .trusted
            .iter()
            .filter_map(|&(n, k)| rep.scale.get(n, k).log10_abs())
            .fold(f64::NEG_INFINITY, f64::max);
        let needed = digits + 10 + libm::ceil(scale.max(0.0)) as usize;
        if working >= needed || extra > 0 {
            return Ok(NumericCheck {
                digits,
                working_digits: working,
                kappa: kappa.to_f64(),
                cells: rep.trusted.len(),
                max_abs_log10: rep.max_log10(),
                max_rel_log10: rep.max_relative_log10(),
                max_scale_log10: scale,
            });
        }
        extra = needed - digits;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pv_point() -> ParameterPoint {
        ParameterPoint::new()
            .with(Sym::Theta, q(2, 7))
            .with(Sym::Theta0, q(-1, 5))
            .with(Sym::ThetaT, q(3, 11))
            .with(Sym::Beta, q(1, 13))
    }

    #[test]
    fn shapes() {
        assert_eq!(residual_shape(Family::PV, &pv_point()).unwrap(), (8, 4));
        assert_eq!(residual_shape(Family::PIV, &pv_point()).unwrap(), (6, 6));
        assert_eq!(residual_shape(Family::PVI, &pv_point()), Err(TauError::NoOde(Family::PVI)));
    }

    #[test]
    fn unit_ratio_at_zero() {
        for f in [Family::PV, Family::PIV] {
            assert_eq!(structure_ratio(f, 0, &pv_point(), StructureMode::Reduced).unwrap().to_real().to_f64(), 1.0);
        }
    }

    #[test]
    fn pv_exponent_step() {
        let p = pv_point();
        let s = channel_spec::<Q>(Family::PV, &p).unwrap();
        let (th, b) = (q(2, 7), q(1, 13));
        assert_eq!(s.reference(1, 1) - s.reference(1, 0), Q::from(2) * (th - Q::from(2) * b) - Q::from(2));
    }
}
