//! Γ at high precision and integer-shift ratios of the Barnes G-function.
//!
//! `G` itself is never evaluated: only `G(1+x+n)/G(1+x)`, which telescopes
//! into a finite product of Γ values via `G(z+1) = Γ(z) G(z)`.

use alloc::vec::Vec;
use core::fmt;

use crate::field::{digits_to_bits, working_bits, Field, FloatRepr, Real, Q};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GammaError {
    /// Γ has a pole at the given non-positive integer.
    Pole(Q),
}

impl fmt::Display for GammaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GammaError::Pole(z) => write!(f, "Gamma pole at {}", z),
        }
    }
}

fn is_integer(q: &Q) -> bool {
    q.denominator() == &dashu_int::UBig::ONE
}

/// Bernoulli numbers `B_0..=B_n` (with `B_1 = -1/2`).
pub fn bernoulli(n: usize) -> Vec<Q> {
    // Akiyama–Tanigawa gives B_1 = +1/2; fix the sign afterwards.
    let mut a: Vec<Q> = Vec::with_capacity(n + 1);
    let mut out = Vec::with_capacity(n + 1);
    for m in 0..=n {
        a.push(Q::ONE / Q::from(m as i64 + 1));
        for j in (1..=m).rev() {
            a[j - 1] = Q::from(j as i64) * (&a[j - 1] - &a[j]);
        }
        out.push(a[0].clone());
    }
    if n >= 1 {
        out[1] = -out[1].clone();
    }
    out
}

fn real_q(q: &Q, bits: usize) -> FloatRepr {
    q.to_float::<dashu_float::round::mode::HalfEven, 2>(bits).value()
}

/// Γ(z) to `digits` significant decimal digits, for rational `z` that is not
/// a non-positive integer.
pub fn gamma_q(z: &Q, digits: usize) -> Result<Real, GammaError> {
    if is_integer(z) {
        if *z <= Q::ZERO {
            return Err(GammaError::Pole(z.clone()));
        }
        // exact factorial
        let n: i64 = i64::try_from(z.numerator().clone()).expect("argument too large");
        let mut acc = dashu_int::IBig::ONE;
        for k in 2..n {
            acc *= dashu_int::IBig::from(k);
        }
        return Ok(Real(FloatRepr::from(acc)));
    }
    let bits = digits_to_bits(digits + 12);
    // lift the argument until the Stirling tail is negligible
    let lift_to = Q::from((digits as i64).max(30));
    let mut x = z.clone();
    let mut denom = Q::ONE;
    while x < lift_to {
        denom *= &x;
        x += Q::ONE;
    }
    let lg = ln_gamma_stirling(&x, bits, digits + 12);
    let val = lg.exp() / real_q(&denom, bits);
    Ok(Real(val.with_precision(digits_to_bits(digits)).value()))
}

/// Γ(z) for a float argument (no integer shortcut).
pub fn gamma_real(z: &Real, digits: usize) -> Result<Real, GammaError> {
    let bits = digits_to_bits(digits + 12);
    let mut x = z.0.clone().with_precision(bits).value();
    // poles: z within rounding of a non-positive integer
    let r = x.to_int().value();
    if x == FloatRepr::from(r.clone()) && r <= dashu_int::IBig::ZERO {
        return Err(GammaError::Pole(Q::from(r)));
    }
    let lift_to = FloatRepr::from((digits as i64).max(30));
    let mut denom = FloatRepr::ONE.with_precision(bits).value();
    while x < lift_to {
        denom *= &x;
        x += FloatRepr::ONE;
    }
    let lg = ln_gamma_stirling_f(&x, bits, digits + 12);
    Ok(Real((lg.exp() / denom).with_precision(digits_to_bits(digits)).value()))
}

fn ln_gamma_stirling(x: &Q, bits: usize, digits: usize) -> FloatRepr {
    ln_gamma_stirling_f(&real_q(x, bits), bits, digits)
}

/// ln Γ(x) for large positive `x` by the Stirling series. For real `x > 0`
/// the remainder after the `K`-th term is bounded by the first omitted term,
/// so we stop once that term drops below `10^{-digits}`.
fn ln_gamma_stirling_f(x: &FloatRepr, bits: usize, digits: usize) -> FloatRepr {
    let half = FloatRepr::from(1u8) / FloatRepr::from(2u8).with_precision(bits).value();
    let two_pi = FloatRepr::pi(bits) * FloatRepr::from(2u8);
    let mut s = (x.clone() - &half) * x.ln() - x + half * two_pi.ln();
    let tol = FloatRepr::from(10u8).with_precision(bits).value().powi(dashu_int::IBig::from(-(digits as i64)));
    let x2 = x.clone() * x;
    let mut xpow = x.clone(); // x^{2k-1}
    let mut bern = bernoulli(48);
    let mut k = 1usize;
    loop {
        if 2 * k + 2 >= bern.len() {
            bern = bernoulli(2 * bern.len());
        }
        let b = &bern[2 * k];
        let c = b / Q::from(((2 * k) * (2 * k - 1)) as i64);
        let term = real_q(&c, bits) / &xpow;
        s += &term;
        xpow *= &x2;
        // bound for the next term
        let nb = &bern[2 * k + 2] / Q::from(((2 * k + 2) * (2 * k + 1)) as i64);
        let next = real_q(&nb, bits) / &xpow;
        let next_abs = if next < FloatRepr::ZERO { -next } else { next };
        k += 1;
        if next_abs < tol || k > 2000 {
            break;
        }
    }
    s
}

/// Value of an integer-shift ratio `G(1+x+n)/G(1+x)`.
#[derive(Clone, Debug, PartialEq)]
pub enum ShiftRatio {
    Exact(Q),
    Float(Real),
}

impl ShiftRatio {
    pub fn to_real(&self) -> Real {
        match self {
            ShiftRatio::Exact(q) => Real::from_q(q),
            ShiftRatio::Float(r) => r.clone(),
        }
    }
}

/// `G(1+x+n)/G(1+x)`: `∏_{j=0}^{n-1} Γ(1+x+j)` for `n ≥ 0` and
/// `∏_{j=1}^{|n|} Γ(1+x-j)^{-1}` for `n < 0`. Exact when `x` is an integer
/// (every Γ is then a factorial); a reciprocal pole gives an exact zero.
pub fn barnes_shift_ratio(x: &Q, n: i64, digits: usize) -> Result<ShiftRatio, GammaError> {
    if n == 0 {
        return Ok(ShiftRatio::Exact(Q::ONE));
    }
    if is_integer(x) {
        let mut acc = Q::ONE;
        if n >= 0 {
            for j in 0..n {
                let z = x + Q::from(1 + j);
                let g = gamma_q(&z, digits)?;
                acc *= Q::from(g.0.to_int().value());
            }
        } else {
            for j in 1..=(-n) {
                let z = x + Q::from(1 - j);
                match gamma_q(&z, digits) {
                    Ok(g) => acc /= Q::from(g.0.to_int().value()),
                    Err(_) => return Ok(ShiftRatio::Exact(Q::ZERO)),
                }
            }
        }
        return Ok(ShiftRatio::Exact(acc));
    }
    let bits = digits_to_bits(digits + 6);
    let mut acc = FloatRepr::ONE.with_precision(bits).value();
    if n >= 0 {
        for j in 0..n {
            acc *= gamma_q(&(x + Q::from(1 + j)), digits + 6)?.0;
        }
    } else {
        for j in 1..=(-n) {
            acc /= gamma_q(&(x + Q::from(1 - j)), digits + 6)?.0;
        }
    }
    Ok(ShiftRatio::Float(Real(acc.with_precision(digits_to_bits(digits)).value())))
}

/// The rational part of the shift ratio once the transcendental factor
/// `Γ(1+x)^n` is split off:
/// `G(1+x+n) / (G(1+x) Γ(1+x)^n)`.
///
/// For `n ≥ 0` this is `∏_{j<n} (1+x)_j`; for `n = -k` it is
/// `∏_{j=1}^{k} ∏_{i=1}^{j} (x+1-i)`. Since Γ(1+x) enters only through the
/// power `n`, products of such ratios whose shifts sum to zero are rational.
pub fn barnes_shift_reduced(x: &Q, n: i64) -> Q {
    let mut acc = Q::ONE;
    if n >= 0 {
        for j in 0..n {
            for i in 0..j {
                acc *= Q::ONE + x + Q::from(i);
            }
        }
    } else {
        for j in 1..=(-n) {
            for i in 1..=j {
                acc *= x + Q::from(1 - i);
            }
        }
    }
    acc
}

pub fn default_bits() -> usize {
    working_bits()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::q;

    fn close(a: &Real, b: &Real, digits: i32) -> bool {
        let d = a.clone() - b.clone();
        match (d.log10_abs(), b.log10_abs()) {
            (None, _) => true,
            (Some(x), Some(y)) => x - y < -(digits as f64),
            (Some(x), None) => x < -(digits as f64),
        }
    }

    #[test]
    fn bernoulli_values() {
        let b = bernoulli(8);
        assert_eq!(b[0], q(1, 1));
        assert_eq!(b[1], q(-1, 2));
        assert_eq!(b[2], q(1, 6));
        assert_eq!(b[3], q(0, 1));
        assert_eq!(b[4], q(-1, 30));
        assert_eq!(b[8], q(-1, 30));
    }

    #[test]
    fn gamma_integers_and_half() {
        crate::field::set_working_digits(70);
        assert_eq!(gamma_q(&q(1, 1), 60).unwrap(), Real::one());
        assert_eq!(gamma_q(&q(5, 1), 60).unwrap(), Real::from_i64(24));
        let g = gamma_q(&q(1, 2), 60).unwrap();
        let sp = Real::pi().sqrt();
        assert!(close(&g, &sp, 58), "{} vs {}", g, sp);
        assert!(gamma_q(&q(-2, 1), 60).is_err());
        // negative non-integer: Γ(-1/2) = -2√π
        let g = gamma_q(&q(-1, 2), 60).unwrap();
        assert!(close(&g, &(Real::from_i64(-2) * sp), 58));
    }

    #[test]
    fn shift_ratio_examples() {
        assert_eq!(barnes_shift_ratio(&q(3, 7), 0, 60).unwrap(), ShiftRatio::Exact(q(1, 1)));
        assert_eq!(barnes_shift_ratio(&q(1, 1), 2, 60).unwrap(), ShiftRatio::Exact(q(2, 1)));
    }

    #[test]
    fn reduced_ratio_matches_float() {
        crate::field::set_working_digits(70);
        let x = q(2, 7);
        let g1 = gamma_q(&(Q::ONE + &x), 60).unwrap();
        for n in -3i64..=3 {
            let full = barnes_shift_ratio(&x, n, 60).unwrap().to_real();
            let mut pow = Real::one();
            for _ in 0..n.abs() {
                pow *= &g1;
            }
            let pow = if n < 0 { pow.inv().unwrap() } else { pow };
            let red = Real::from_q(&barnes_shift_reduced(&x, n)) * pow;
            assert!(close(&full, &red, 55), "n={n}");
        }
    }
}
