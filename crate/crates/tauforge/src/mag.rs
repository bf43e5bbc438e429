//! Magnitude arithmetic: a value is replaced by an upper bound on `|x|`,
//! stored as `log10`. Sums add magnitudes, so evaluating an expression in
//! this field bounds the size of the terms that cancel in it.

use core::fmt;
use core::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use crate::field::{Field, Q};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mag(pub f64);

fn log_sum(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + libm::log10(libm::exp10(a - m) + libm::exp10(b - m))
}

impl fmt::Display for Mag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "1e{:.2}", self.0)
    }
}

impl Add for Mag {
    type Output = Mag;
    fn add(self, o: Mag) -> Mag {
        Mag(log_sum(self.0, o.0))
    }
}
impl Sub for Mag {
    type Output = Mag;
    fn sub(self, o: Mag) -> Mag {
        Mag(log_sum(self.0, o.0))
    }
}
impl Mul for Mag {
    type Output = Mag;
    fn mul(self, o: Mag) -> Mag {
        Mag(self.0 + o.0)
    }
}
impl Neg for Mag {
    type Output = Mag;
    fn neg(self) -> Mag {
        self
    }
}
impl<'a> AddAssign<&'a Mag> for Mag {
    fn add_assign(&mut self, o: &'a Mag) {
        *self = *self + *o;
    }
}
impl<'a> SubAssign<&'a Mag> for Mag {
    fn sub_assign(&mut self, o: &'a Mag) {
        *self = *self + *o;
    }
}
impl<'a> MulAssign<&'a Mag> for Mag {
    fn mul_assign(&mut self, o: &'a Mag) {
        *self = *self * *o;
    }
}

impl Field for Mag {
    fn zero() -> Self {
        Mag(f64::NEG_INFINITY)
    }
    fn one() -> Self {
        Mag(0.0)
    }
    fn from_q(q: &Q) -> Self {
        Mag(q.log10_abs().unwrap_or(f64::NEG_INFINITY))
    }
    fn is_zero(&self) -> bool {
        self.0 == f64::NEG_INFINITY
    }
    fn inv(&self) -> Option<Self> {
        (!self.is_zero()).then_some(Mag(-self.0))
    }
    fn log10_abs(&self) -> Option<f64> {
        (!self.is_zero()).then_some(self.0)
    }
}

impl Mag {
    pub fn of<F: Field>(x: &F) -> Mag {
        Mag(x.log10_abs().unwrap_or(f64::NEG_INFINITY))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::q;

    #[test]
    fn bounds() {
        let a = Mag::from_q(&q(3, 1));
        let b = Mag::from_q(&q(-3, 1));
        assert!(((a - b).0 - libm::log10(6.0)).abs() < 1e-12);
        assert!(((a * b).0 - libm::log10(9.0)).abs() < 1e-12);
        assert!(Mag::zero().is_zero());
        assert_eq!(a + Mag::zero(), a);
    }
}
