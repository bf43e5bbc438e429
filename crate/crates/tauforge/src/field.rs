//! Coefficient fields: exact rationals, `Q(√2)`, and binary big floats.

use alloc::string::{String, ToString};
use core::fmt;
use core::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use core::sync::atomic::{AtomicUsize, Ordering};

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use dashu_int::IBig;
use dashu_ratio::RBig;

pub type Q = RBig;

pub trait Field:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
    + for<'a> MulAssign<&'a Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_q(q: &Q) -> Self;
    fn is_zero(&self) -> bool;
    fn inv(&self) -> Option<Self>;

    fn from_i64(n: i64) -> Self {
        Self::from_q(&Q::from(n))
    }
    fn div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|i| self.clone() * i)
    }
    fn square(&self) -> Self {
        self.clone() * self.clone()
    }
    fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc *= self;
        }
        acc
    }
    /// Rough magnitude for residual reports; `None` for exact zero.
    fn log10_abs(&self) -> Option<f64>;
}

pub fn q(n: i64, d: i64) -> Q {
    Q::from_parts(IBig::from(n), dashu_int::UBig::from(d.unsigned_abs())) * Q::from(d.signum())
}

pub fn qi(n: i64) -> Q {
    Q::from(n)
}

fn ibig_log10(x: &IBig) -> f64 {
    // digits of |x| are enough for a magnitude.
    let s = x.to_string();
    let s = s.trim_start_matches('-');
    let lead: f64 = s[..s.len().min(15)].parse().unwrap_or(0.0);
    libm_log10(lead) + (s.len() as f64 - s.len().min(15) as f64)
}

fn libm_log10(x: f64) -> f64 {
    if x <= 0.0 {
        return f64::NEG_INFINITY;
    }
    libm::log10(x)
}

impl Field for Q {
    fn zero() -> Self {
        RBig::ZERO
    }
    fn one() -> Self {
        RBig::ONE
    }
    fn from_q(q: &Q) -> Self {
        q.clone()
    }
    fn is_zero(&self) -> bool {
        *self == RBig::ZERO
    }
    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(RBig::ONE / self)
        }
    }
    fn log10_abs(&self) -> Option<f64> {
        if self.is_zero() {
            return None;
        }
        Some(ibig_log10(self.numerator()) - ibig_log10(&IBig::from(self.denominator().clone())))
    }
}

// ---------------------------------------------------------------- Q(√2)

/// `a + b√2`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct QuadExt {
    pub a: Q,
    pub b: Q,
}

impl QuadExt {
    pub fn new(a: Q, b: Q) -> Self {
        QuadExt { a, b }
    }
    pub fn sqrt2() -> Self {
        QuadExt { a: Q::ZERO, b: Q::ONE }
    }
    pub fn conj(&self) -> Self {
        QuadExt { a: self.a.clone(), b: -self.b.clone() }
    }
    pub fn norm(&self) -> Q {
        &self.a * &self.a - Q::from(2) * &self.b * &self.b
    }
    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{}+({})*sqrt2", self.a, self.b)
        }
    }
}

impl Add for QuadExt {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        QuadExt { a: self.a + o.a, b: self.b + o.b }
    }
}
impl Sub for QuadExt {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        QuadExt { a: self.a - o.a, b: self.b - o.b }
    }
}
impl Mul for QuadExt {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let two = Q::from(2);
        QuadExt {
            a: &self.a * &o.a + two * &self.b * &o.b,
            b: &self.a * &o.b + &self.b * &o.a,
        }
    }
}
impl Neg for QuadExt {
    type Output = Self;
    fn neg(self) -> Self {
        QuadExt { a: -self.a, b: -self.b }
    }
}
impl<'a> AddAssign<&'a QuadExt> for QuadExt {
    fn add_assign(&mut self, o: &'a QuadExt) {
        self.a += &o.a;
        self.b += &o.b;
    }
}
impl<'a> SubAssign<&'a QuadExt> for QuadExt {
    fn sub_assign(&mut self, o: &'a QuadExt) {
        self.a -= &o.a;
        self.b -= &o.b;
    }
}
impl<'a> MulAssign<&'a QuadExt> for QuadExt {
    fn mul_assign(&mut self, o: &'a QuadExt) {
        *self = self.clone() * o.clone();
    }
}

impl Field for QuadExt {
    fn zero() -> Self {
        QuadExt::default()
    }
    fn one() -> Self {
        QuadExt { a: Q::ONE, b: Q::ZERO }
    }
    fn from_q(q: &Q) -> Self {
        QuadExt { a: q.clone(), b: Q::ZERO }
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
    fn inv(&self) -> Option<Self> {
        // the norm of a nonzero element is nonzero because √2 is irrational
        let n = self.norm();
        if n.is_zero() {
            return None;
        }
        let c = self.conj();
        Some(QuadExt { a: c.a / &n, b: c.b / &n })
    }
    fn log10_abs(&self) -> Option<f64> {
        if self.is_zero() {
            return None;
        }
        let r = Real::from_q(&self.a) + Real::from_q(&self.b) * Real::sqrt2();
        r.log10_abs()
    }
}

// ---------------------------------------------------------------- big floats

pub type FloatRepr = FBig<HalfEven, 2>;

static WORKING_BITS: AtomicUsize = AtomicUsize::new(digits_to_bits(80));

pub const fn digits_to_bits(digits: usize) -> usize {
    // log2(10) ≈ 3.3219; round up generously
    (digits * 33219).div_ceil(10000) + 8
}

/// Working precision (in decimal digits) used when rationals are converted
/// to [`Real`]. Arithmetic between existing values keeps the larger of the
/// operand precisions.
pub fn set_working_digits(digits: usize) {
    WORKING_BITS.store(digits_to_bits(digits), Ordering::SeqCst);
}

pub fn working_bits() -> usize {
    WORKING_BITS.load(Ordering::SeqCst)
}

pub fn working_digits() -> usize {
    (working_bits().saturating_sub(8)) * 10000 / 33219
}

/// Binary floating point with an explicit precision in bits.
#[derive(Clone, PartialEq, Debug)]
pub struct Real(pub FloatRepr);

impl Real {
    pub fn with_bits(q: &Q, bits: usize) -> Self {
        Real(q.to_float::<HalfEven, 2>(bits).value())
    }
    pub fn precision_bits(&self) -> usize {
        self.0.precision()
    }
    pub fn pi() -> Self {
        Real(FloatRepr::pi(working_bits()))
    }
    pub fn sqrt2() -> Self {
        Real(FloatRepr::from(2u8).with_precision(working_bits()).value().sqrt())
    }
    pub fn sqrt(&self) -> Self {
        Real(self.lifted().sqrt())
    }
    pub fn exp(&self) -> Self {
        Real(self.lifted().exp())
    }
    pub fn ln(&self) -> Self {
        Real(self.lifted().ln())
    }
    pub fn abs(&self) -> Self {
        if self.0 < FloatRepr::ZERO {
            Real(-self.0.clone())
        } else {
            self.clone()
        }
    }
    pub fn is_negative(&self) -> bool {
        self.0 < FloatRepr::ZERO
    }
    /// Integers and other exact inputs come in with unbounded precision;
    /// transcendental functions need a concrete one.
    fn lifted(&self) -> FloatRepr {
        let p = self.0.precision();
        if p == 0 || p < working_bits() {
            self.0.clone().with_precision(working_bits()).value()
        } else {
            self.0.clone()
        }
    }
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().value()
    }
    /// Decimal string with `digits` significant digits.
    pub fn to_decimal_string(&self, digits: usize) -> String {
        let d = self.0.clone().with_base_and_precision::<10>(digits.max(1)).value();
        d.to_string()
    }
    pub fn cmp_abs(&self, other: &Real) -> core::cmp::Ordering {
        self.abs().0.partial_cmp(&other.abs().0).unwrap_or(core::cmp::Ordering::Equal)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = if self.0.precision() == 0 { 20 } else { self.0.precision() * 10000 / 33219 };
        f.write_str(&self.to_decimal_string(digits))
    }
}

impl Add for Real {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Real(self.0 + o.0)
    }
}
impl Sub for Real {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Real(self.0 - o.0)
    }
}
impl Mul for Real {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Real(self.0 * o.0)
    }
}
impl Neg for Real {
    type Output = Self;
    fn neg(self) -> Self {
        Real(-self.0)
    }
}
impl<'a> AddAssign<&'a Real> for Real {
    fn add_assign(&mut self, o: &'a Real) {
        self.0 = &self.0 + &o.0;
    }
}
impl<'a> SubAssign<&'a Real> for Real {
    fn sub_assign(&mut self, o: &'a Real) {
        self.0 = &self.0 - &o.0;
    }
}
impl<'a> MulAssign<&'a Real> for Real {
    fn mul_assign(&mut self, o: &'a Real) {
        self.0 = &self.0 * &o.0;
    }
}

impl Field for Real {
    fn zero() -> Self {
        Real(FloatRepr::ZERO)
    }
    fn one() -> Self {
        Real(FloatRepr::ONE)
    }
    fn from_q(q: &Q) -> Self {
        if q.denominator() == &dashu_int::UBig::ONE {
            // integers are exact
            return Real(FloatRepr::from(q.numerator().clone()));
        }
        Real::with_bits(q, working_bits())
    }
    fn is_zero(&self) -> bool {
        self.0 == FloatRepr::ZERO
    }
    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Real(FloatRepr::ONE.with_precision(working_bits().max(self.0.precision())).value() / &self.0))
        }
    }
    fn log10_abs(&self) -> Option<f64> {
        if self.is_zero() {
            return None;
        }
        let x = self.abs().lifted();
        let l = x.ln() / FloatRepr::from(10u8).with_precision(64).value().ln();
        Some(l.to_f64().value())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quad_ext_product() {
        let x = QuadExt::new(q(1, 2), q(3, 1));
        let y = QuadExt::new(q(-2, 1), q(1, 3));
        let p = x.clone() * y.clone();
        assert_eq!(p.a, q(1, 2) * q(-2, 1) + q(2, 1) * q(3, 1) * q(1, 3));
        assert_eq!(p.b, q(1, 2) * q(1, 3) + q(3, 1) * q(-2, 1));
        assert_eq!(x.inv().unwrap() * x, QuadExt::one());
    }

    #[test]
    fn rational_log10() {
        let v = q(1000, 1).log10_abs().unwrap();
        assert!((v - 3.0).abs() < 1e-9, "{v}");
        let v = q(1, 250).log10_abs().unwrap();
        assert!((v + 2.39794).abs() < 1e-4, "{v}");
    }

    #[test]
    fn real_basics() {
        set_working_digits(60);
        let two = Real::from_i64(2);
        let s = Real::sqrt2();
        let d = s.clone() * s - two;
        assert!(d.log10_abs().is_none_or(|l| l < -55.0));
    }
}
