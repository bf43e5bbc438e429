//! Tagged scalars and parameter points.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use core::fmt;
use core::str::FromStr;

use crate::field::{Field, QuadExt, Real, Q};

#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Rational(Q),
    Quad(QuadExt),
    Float(Real),
}

impl Scalar {
    pub fn as_rational(&self) -> Option<&Q> {
        match self {
            Scalar::Rational(q) => Some(q),
            Scalar::Quad(x) if x.b.is_zero() => Some(&x.a),
            _ => None,
        }
    }

    pub fn to_real(&self) -> Real {
        match self {
            Scalar::Rational(q) => Real::from_q(q),
            Scalar::Quad(x) => Real::from_q(&x.a) + Real::from_q(&x.b) * Real::sqrt2(),
            Scalar::Float(r) => r.clone(),
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Scalar::Rational(_) => 0,
            Scalar::Quad(_) => 1,
            Scalar::Float(_) => 2,
        }
    }

    fn to_quad(&self) -> QuadExt {
        match self {
            Scalar::Rational(q) => QuadExt::from_q(q),
            Scalar::Quad(x) => x.clone(),
            Scalar::Float(_) => unreachable!("floats never demote"),
        }
    }

    /// Apply a binary field operation after promoting both sides to the
    /// wider of the two representations.
    pub fn zip_with(
        &self,
        other: &Scalar,
        fq: impl Fn(Q, Q) -> Q,
        fx: impl Fn(QuadExt, QuadExt) -> QuadExt,
        fr: impl Fn(Real, Real) -> Real,
    ) -> Scalar {
        match self.rank().max(other.rank()) {
            0 => Scalar::Rational(fq(
                self.as_rational().unwrap().clone(),
                other.as_rational().unwrap().clone(),
            )),
            1 => Scalar::Quad(fx(self.to_quad(), other.to_quad())),
            _ => Scalar::Float(fr(self.to_real(), other.to_real())),
        }
    }

    pub fn add(&self, o: &Scalar) -> Scalar {
        self.zip_with(o, |a, b| a + b, |a, b| a + b, |a, b| a + b)
    }
    pub fn mul(&self, o: &Scalar) -> Scalar {
        self.zip_with(o, |a, b| a * b, |a, b| a * b, |a, b| a * b)
    }
}

impl From<Q> for Scalar {
    fn from(q: Q) -> Self {
        Scalar::Rational(q)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(q) => write!(f, "{}", q),
            Scalar::Quad(x) => write!(f, "{}", x),
            Scalar::Float(r) => write!(f, "{}", r),
        }
    }
}

/// Parse `"p/q"`, `"p"` or a terminating decimal such as `"-0.25"`.
pub fn parse_rational(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n = dashu_int::IBig::from_str(n.trim()).ok()?;
        let d = dashu_int::IBig::from_str(d.trim()).ok()?;
        if d == dashu_int::IBig::ZERO {
            return None;
        }
        return Some(Q::from(n) / Q::from(d));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        let neg = ip.trim_start().starts_with('-');
        let digits = fp.len() as u32;
        if !fp.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let whole = dashu_int::IBig::from_str(if ip.is_empty() || ip == "-" { "0" } else { ip }).ok()?;
        let frac = if fp.is_empty() { dashu_int::IBig::ZERO } else { dashu_int::IBig::from_str(fp).ok()? };
        let scale = dashu_int::IBig::from(10u8).pow(digits as usize);
        let frac = if neg { -frac } else { frac };
        return Some(Q::from(whole * &scale + frac) / Q::from(scale));
    }
    dashu_int::IBig::from_str(s).ok().map(Q::from)
}

/// Named parameters. Keys are ASCII (`theta_0`, `theta_t`, `sigma`, ...);
/// see [`Sym`] for the full list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sym {
    Theta0,
    ThetaT,
    Theta1,
    ThetaInf,
    Theta,
    /// θ_* (the first confluence label)
    ThetaStar,
    /// θ_⋆ (the second confluence label)
    ThetaSStar,
    Sigma,
    Beta,
    S,
    C,
    Delta,
    Delta1,
    Delta2,
    Delta3,
    Delta4,
    Lambda1,
    Lambda2,
    Lambda3,
    Lambda4,
}

impl Sym {
    pub const ALL: [Sym; 20] = [
        Sym::Theta0,
        Sym::ThetaT,
        Sym::Theta1,
        Sym::ThetaInf,
        Sym::Theta,
        Sym::ThetaStar,
        Sym::ThetaSStar,
        Sym::Sigma,
        Sym::Beta,
        Sym::S,
        Sym::C,
        Sym::Delta,
        Sym::Delta1,
        Sym::Delta2,
        Sym::Delta3,
        Sym::Delta4,
        Sym::Lambda1,
        Sym::Lambda2,
        Sym::Lambda3,
        Sym::Lambda4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Sym::Theta0 => "theta_0",
            Sym::ThetaT => "theta_t",
            Sym::Theta1 => "theta_1",
            Sym::ThetaInf => "theta_inf",
            Sym::Theta => "theta",
            Sym::ThetaStar => "theta_star",
            Sym::ThetaSStar => "theta_sstar",
            Sym::Sigma => "sigma",
            Sym::Beta => "beta",
            Sym::S => "s",
            Sym::C => "c",
            Sym::Delta => "delta",
            Sym::Delta1 => "delta_1",
            Sym::Delta2 => "delta_2",
            Sym::Delta3 => "delta_3",
            Sym::Delta4 => "delta_4",
            Sym::Lambda1 => "lambda_1",
            Sym::Lambda2 => "lambda_2",
            Sym::Lambda3 => "lambda_3",
            Sym::Lambda4 => "lambda_4",
        }
    }

    pub fn from_name(s: &str) -> Option<Sym> {
        let alias = match s {
            "θ_0" | "θ0" => Some(Sym::Theta0),
            "θ_t" | "θt" => Some(Sym::ThetaT),
            "θ_1" | "θ1" => Some(Sym::Theta1),
            "θ_∞" | "θ_inf" => Some(Sym::ThetaInf),
            "θ" => Some(Sym::Theta),
            "θ_*" => Some(Sym::ThetaStar),
            "θ_⋆" => Some(Sym::ThetaSStar),
            "σ" => Some(Sym::Sigma),
            "β" => Some(Sym::Beta),
            _ => None,
        };
        alias.or_else(|| Sym::ALL.iter().copied().find(|x| x.name() == s))
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PointError {
    Missing(Sym),
    NotRational(Sym),
    UnknownSymbol(String),
    BadValue(String),
}

impl fmt::Display for PointError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointError::Missing(s) => write!(f, "missing symbol `{}`", s),
            PointError::NotRational(s) => write!(f, "symbol `{}` must be an exact rational", s),
            PointError::UnknownSymbol(s) => write!(f, "unknown symbol `{}`", s),
            PointError::BadValue(s) => write!(f, "cannot parse value `{}`", s),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParameterPoint {
    values: BTreeMap<Sym, Scalar>,
}

impl ParameterPoint {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, s: Sym, v: Q) -> Self {
        self.values.insert(s, Scalar::Rational(v));
        self
    }

    pub fn set(&mut self, s: Sym, v: Scalar) {
        self.values.insert(s, v);
    }

    pub fn get(&self, s: Sym) -> Option<&Scalar> {
        self.values.get(&s)
    }

    pub fn q(&self, s: Sym) -> Result<Q, PointError> {
        match self.values.get(&s) {
            None => Err(PointError::Missing(s)),
            Some(v) => v.as_rational().cloned().ok_or(PointError::NotRational(s)),
        }
    }

    /// Like [`q`](Self::q) but with a default for optional symbols.
    pub fn q_or(&self, s: Sym, default: Q) -> Result<Q, PointError> {
        match self.values.get(&s) {
            None => Ok(default),
            Some(v) => v.as_rational().cloned().ok_or(PointError::NotRational(s)),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Sym, &Scalar)> {
        self.values.iter()
    }

    pub fn parse_entry(&mut self, key: &str, value: &str) -> Result<(), PointError> {
        let sym = Sym::from_name(key).ok_or_else(|| PointError::UnknownSymbol(key.to_string()))?;
        let q = parse_rational(value).ok_or_else(|| PointError::BadValue(value.to_string()))?;
        self.values.insert(sym, Scalar::Rational(q));
        Ok(())
    }

    /// The c = 1 dictionary for four-point data: Δ_1=θ_0², Δ_2=θ_t², Δ=σ²,
    /// Δ_3=θ_1², Δ_4=θ_∞².
    pub fn four_point_weights(&self) -> Result<[Q; 5], PointError> {
        let sq = |s| self.q(s).map(|x: Q| &x * &x);
        Ok([sq(Sym::Theta0)?, sq(Sym::ThetaT)?, sq(Sym::Sigma)?, sq(Sym::Theta1)?, sq(Sym::ThetaInf)?])
    }
}
