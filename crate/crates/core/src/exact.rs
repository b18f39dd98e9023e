//! Exact arithmetic in the biquadratic field ℚ(√2, √3).
//!
//! Every constant that appears in the encoding network, the decoded modes
//! and the feedforward gains lives in this field, so identities such as
//! "the output carries no channel-1 error" can be checked with exact zero
//! tests instead of float tolerances.
//!
//! Elements are stored as `a + b√2 + c√3 + d√6` with bounded rational
//! coefficients. The `checked_*` methods report overflow as an error; the
//! operator impls panic on overflow, which never happens for the small
//! denominators used by the code.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Rational = Ratio<i64>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("rational coefficient overflow in exact arithmetic")]
    Overflow,
    #[error("division by zero in exact arithmetic")]
    DivisionByZero,
}

const SQRT3: f64 = 1.732_050_807_568_877_2;
const SQRT6: f64 = 2.449_489_742_783_178;

/// An element `a + b√2 + c√3 + d√6` of ℚ(√2, √3).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExactScalar {
    a: Rational,
    b: Rational,
    c: Rational,
    d: Rational,
}

fn ratio_f64(r: Rational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

fn cadd(x: Rational, y: Rational) -> Result<Rational, ExactError> {
    x.checked_add(&y).ok_or(ExactError::Overflow)
}

fn csub(x: Rational, y: Rational) -> Result<Rational, ExactError> {
    x.checked_sub(&y).ok_or(ExactError::Overflow)
}

fn cmul(x: Rational, y: Rational) -> Result<Rational, ExactError> {
    x.checked_mul(&y).ok_or(ExactError::Overflow)
}

fn cscale(k: i64, x: Rational) -> Result<Rational, ExactError> {
    cmul(Rational::from_integer(k), x)
}

fn sum(terms: &[Rational]) -> Result<Rational, ExactError> {
    terms.iter().try_fold(Rational::zero(), |acc, &t| cadd(acc, t))
}

impl ExactScalar {
    pub const ZERO: Self = Self::from_parts_const(0, 0, 0, 0);
    pub const ONE: Self = Self::from_parts_const(1, 0, 0, 0);

    const fn from_parts_const(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self {
            a: Ratio::new_raw(a, 1),
            b: Ratio::new_raw(b, 1),
            c: Ratio::new_raw(c, 1),
            d: Ratio::new_raw(d, 1),
        }
    }

    pub fn new(a: Rational, b: Rational, c: Rational, d: Rational) -> Self {
        Self { a, b, c, d }
    }

    pub fn integer(n: i64) -> Self {
        Self::rational(n, 1)
    }

    /// The rational `numer / denom`. Panics on a zero denominator.
    pub fn rational(numer: i64, denom: i64) -> Self {
        Self::from_rational(Rational::new(numer, denom))
    }

    pub fn from_rational(q: Rational) -> Self {
        Self { a: q, ..Self::ZERO }
    }

    pub fn sqrt2() -> Self {
        Self { b: Rational::one(), ..Self::ZERO }
    }

    pub fn sqrt3() -> Self {
        Self { c: Rational::one(), ..Self::ZERO }
    }

    pub fn sqrt6() -> Self {
        Self { d: Rational::one(), ..Self::ZERO }
    }

    /// `√q` when it lies in the field, i.e. when the squarefree part of
    /// `q`'s numerator times denominator is one of 1, 2, 3 or 6.
    pub fn sqrt_rational(q: Rational) -> Option<Self> {
        if q.is_negative() {
            return None;
        }
        if q.is_zero() {
            return Some(Self::ZERO);
        }
        // √(p/r) = √(p·r) / r
        let prod = q.numer().checked_mul(q.denom())?;
        let (square, free) = split_square(prod);
        let coeff = Rational::new(square, *q.denom());
        let out = match free {
            1 => Self { a: coeff, ..Self::ZERO },
            2 => Self { b: coeff, ..Self::ZERO },
            3 => Self { c: coeff, ..Self::ZERO },
            6 => Self { d: coeff, ..Self::ZERO },
            _ => return None,
        };
        Some(out)
    }

    /// Coefficients `(a, b, c, d)` of `a + b√2 + c√3 + d√6`.
    pub fn parts(&self) -> (Rational, Rational, Rational, Rational) {
        (self.a, self.b, self.c, self.d)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero() && self.c.is_zero() && self.d.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero() && self.c.is_zero() && self.d.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        ratio_f64(self.a)
            + ratio_f64(self.b) * std::f64::consts::SQRT_2
            + ratio_f64(self.c) * SQRT3
            + ratio_f64(self.d) * SQRT6
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self, ExactError> {
        Ok(Self {
            a: cadd(self.a, rhs.a)?,
            b: cadd(self.b, rhs.b)?,
            c: cadd(self.c, rhs.c)?,
            d: cadd(self.d, rhs.d)?,
        })
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self, ExactError> {
        Ok(Self {
            a: csub(self.a, rhs.a)?,
            b: csub(self.b, rhs.b)?,
            c: csub(self.c, rhs.c)?,
            d: csub(self.d, rhs.d)?,
        })
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self, ExactError> {
        let (a1, b1, c1, d1) = self.parts();
        let (a2, b2, c2, d2) = rhs.parts();
        // √2√3 = √6, √2√6 = 2√3, √3√6 = 3√2
        let a = sum(&[
            cmul(a1, a2)?,
            cscale(2, cmul(b1, b2)?)?,
            cscale(3, cmul(c1, c2)?)?,
            cscale(6, cmul(d1, d2)?)?,
        ])?;
        let b = sum(&[
            cmul(a1, b2)?,
            cmul(b1, a2)?,
            cscale(3, cmul(c1, d2)?)?,
            cscale(3, cmul(d1, c2)?)?,
        ])?;
        let c = sum(&[
            cmul(a1, c2)?,
            cmul(c1, a2)?,
            cscale(2, cmul(b1, d2)?)?,
            cscale(2, cmul(d1, b2)?)?,
        ])?;
        let d = sum(&[cmul(a1, d2)?, cmul(d1, a2)?, cmul(b1, c2)?, cmul(c1, b2)?])?;
        Ok(Self { a, b, c, d })
    }

    /// Conjugate under √3 → −√3.
    fn conj3(&self) -> Self {
        Self { a: self.a, b: self.b, c: -self.c, d: -self.d }
    }

    /// Conjugate under √2 → −√2.
    fn conj2(&self) -> Self {
        Self { a: self.a, b: -self.b, c: self.c, d: -self.d }
    }

    pub fn checked_inv(&self) -> Result<Self, ExactError> {
        if self.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        // x · conj3(x) lies in ℚ(√2); multiplying by its √2-conjugate lands in ℚ.
        let s = self.conj3();
        let n1 = self.checked_mul(&s)?;
        let t = n1.conj2();
        let norm = n1.checked_mul(&t)?;
        debug_assert!(norm.is_rational());
        let inv_norm = Self::from_rational(norm.a.recip());
        s.checked_mul(&t)?.checked_mul(&inv_norm)
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, ExactError> {
        self.checked_mul(&rhs.checked_inv()?)
    }

    pub fn inv(&self) -> Self {
        self.checked_inv().expect("exact inverse")
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            -*self
        } else {
            *self
        }
    }

    /// Exact sign: -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        if self.is_zero() {
            return 0;
        }
        // The float value is nonzero for any nonzero element; its sign is
        // reliable unless catastrophic cancellation occurs, in which case
        // fall back to the exact norm argument.
        let v = self.to_f64();
        if v.abs() > 1e-9 * self.magnitude_bound() {
            return if v > 0.0 { 1 } else { -1 };
        }
        exact_sign(self)
    }

    fn magnitude_bound(&self) -> f64 {
        ratio_f64(self.a).abs()
            + ratio_f64(self.b).abs() * std::f64::consts::SQRT_2
            + ratio_f64(self.c).abs() * SQRT3
            + ratio_f64(self.d).abs() * SQRT6
    }
}

/// Sign of `p + q√3` with `p, q ∈ ℚ(√2)`, decided by comparing squares.
fn exact_sign(x: &ExactScalar) -> i32 {
    let p = (x.a, x.b);
    let q = (x.c, x.d);
    let sp = sign_q2(p);
    let sq = sign_q2(q);
    if sq == 0 {
        return sp;
    }
    if sp == 0 || sp == sq {
        return if sp == 0 { sq } else { sp };
    }
    // opposite signs: compare p² with 3q² in ℚ(√2)
    let p2 = mul_q2(p, p);
    let q2 = mul_q2(q, q);
    let diff = (p2.0 - Rational::from_integer(3) * q2.0, p2.1 - Rational::from_integer(3) * q2.1);
    sp * sign_q2(diff)
}

fn mul_q2(x: (Rational, Rational), y: (Rational, Rational)) -> (Rational, Rational) {
    (x.0 * y.0 + Rational::from_integer(2) * x.1 * y.1, x.0 * y.1 + x.1 * y.0)
}

/// Sign of `u + v√2`.
fn sign_q2((u, v): (Rational, Rational)) -> i32 {
    let su = sgn(u);
    let sv = sgn(v);
    if sv == 0 {
        return su;
    }
    if su == 0 || su == sv {
        return if su == 0 { sv } else { su };
    }
    let lhs = u * u;
    let rhs = Rational::from_integer(2) * v * v;
    match lhs.cmp(&rhs) {
        Ordering::Greater => su,
        Ordering::Less => sv,
        Ordering::Equal => 0,
    }
}

fn sgn(r: Rational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

/// Writes `n = s²·k` with `k` squarefree; returns `(s, k)`.
fn split_square(n: i64) -> (i64, i64) {
    let mut rest = n;
    let mut square = 1i64;
    let mut free = 1i64;
    let mut p = 2i64;
    while p * p <= rest {
        while rest % (p * p) == 0 {
            rest /= p * p;
            square *= p;
        }
        if rest % p == 0 {
            rest /= p;
            free *= p;
        }
        p += 1;
    }
    (square, free * rest)
}

impl Default for ExactScalar {
    fn default() -> Self {
        Self::ZERO
    }
}

impl From<i64> for ExactScalar {
    fn from(n: i64) -> Self {
        Self::integer(n)
    }
}

impl From<Rational> for ExactScalar {
    fn from(q: Rational) -> Self {
        Self::from_rational(q)
    }
}

impl Add for ExactScalar {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.checked_add(&rhs).expect("exact addition overflow")
    }
}

impl Sub for ExactScalar {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.checked_sub(&rhs).expect("exact subtraction overflow")
    }
}

impl Mul for ExactScalar {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.checked_mul(&rhs).expect("exact multiplication overflow")
    }
}

impl Div for ExactScalar {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        self.checked_div(&rhs).expect("exact division")
    }
}

impl Neg for ExactScalar {
    type Output = Self;
    fn neg(self) -> Self {
        Self { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
    }
}

impl AddAssign for ExactScalar {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl SubAssign for ExactScalar {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl std::iter::Sum for ExactScalar {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, |acc, x| acc + x)
    }
}

impl PartialOrd for ExactScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(match (*self - *other).signum() {
            1 => Ordering::Greater,
            -1 => Ordering::Less,
            _ => Ordering::Equal,
        })
    }
}

/// Renders a single radical term `q·√k` in the reciprocal style used for
/// optics coefficients, e.g. `√6/6` as `1/√6` and `√2/4` as `1/(2√2)`.
fn fmt_radical(q: Rational, k: i64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let (n, d) = (*q.numer(), *q.denom());
    let root = format!("√{k}");
    if k == 1 {
        return if d == 1 { write!(f, "{n}") } else { write!(f, "{n}/{d}") };
    }
    if d % k == 0 {
        // n√k/d = n/((d/k)·√k)
        let rest = d / k;
        let (n2, r2) = {
            let g = n.gcd(&rest);
            (n / g, rest / g)
        };
        return if r2 == 1 {
            write!(f, "{n2}/{root}")
        } else {
            write!(f, "{n2}/({r2}{root})")
        };
    }
    match (n, d) {
        (1, 1) => write!(f, "{root}"),
        (-1, 1) => write!(f, "-{root}"),
        (n, 1) => write!(f, "{n}{root}"),
        (1, d) => write!(f, "{root}/{d}"),
        (-1, d) => write!(f, "-{root}/{d}"),
        (n, d) => write!(f, "{n}{root}/{d}"),
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(Rational, i64)> = [(self.a, 1), (self.b, 2), (self.c, 3), (self.d, 6)]
            .into_iter()
            .filter(|(q, _)| !q.is_zero())
            .collect();
        match terms.len() {
            0 => write!(f, "0"),
            1 => fmt_radical(terms[0].0, terms[0].1, f),
            _ => {
                write!(f, "(")?;
                for (i, (q, k)) in terms.iter().enumerate() {
                    if i > 0 {
                        if q.is_negative() {
                            write!(f, " - ")?;
                            fmt_radical(-*q, *k, f)?;
                            continue;
                        }
                        write!(f, " + ")?;
                    }
                    fmt_radical(*q, *k, f)?;
                }
                write!(f, ")")
            }
        }
    }
}

impl fmt::Debug for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} [{} + {}√2 + {}√3 + {}√6]", self.a, self.b, self.c, self.d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn half_sqrt2_squared_is_half() {
        let h = ExactScalar::sqrt2() * ExactScalar::rational(1, 2);
        assert_eq!(h * h, ExactScalar::rational(1, 2));
    }

    #[test]
    fn sqrt6_over_4_squared() {
        // √3/(2√2) is stored as √6/4
        let x = ExactScalar::sqrt3() / (ExactScalar::integer(2) * ExactScalar::sqrt2());
        assert_eq!(x, ExactScalar::new(q(0, 1), q(0, 1), q(0, 1), q(1, 4)));
        assert_eq!(x * x, ExactScalar::rational(3, 8));
    }

    #[test]
    fn inv_sqrt6_times_inv_sqrt2() {
        let a = ExactScalar::sqrt6() * ExactScalar::rational(1, 6);
        let b = ExactScalar::sqrt2() * ExactScalar::rational(1, 2);
        let p = a * b;
        assert_eq!(p.parts(), (q(0, 1), q(0, 1), q(1, 6), q(0, 1)));
        assert!((p.to_f64() - 0.288_675_134_594_812_9).abs() < 1e-15);
    }

    #[test]
    fn sqrt_rational_representable() {
        assert_eq!(ExactScalar::sqrt_rational(q(1, 4)), Some(ExactScalar::rational(1, 2)));
        let s = ExactScalar::sqrt_rational(q(1, 3)).unwrap();
        assert_eq!(s * s, ExactScalar::rational(1, 3));
        let s = ExactScalar::sqrt_rational(q(3, 4)).unwrap();
        assert_eq!(s, ExactScalar::sqrt3() * ExactScalar::rational(1, 2));
        let s = ExactScalar::sqrt_rational(q(2, 3)).unwrap();
        assert_eq!(s, ExactScalar::sqrt6() * ExactScalar::rational(1, 3));
        assert_eq!(ExactScalar::sqrt_rational(q(1, 5)), None);
        assert_eq!(ExactScalar::sqrt_rational(q(-1, 4)), None);
    }

    #[test]
    fn inverse_of_mixed_element() {
        let x = ExactScalar::new(q(1, 1), q(1, 2), q(-2, 3), q(1, 5));
        assert_eq!(x * x.inv(), ExactScalar::ONE);
        assert_eq!(ExactScalar::ZERO.checked_inv(), Err(ExactError::DivisionByZero));
    }

    #[test]
    fn overflow_is_reported() {
        let big = ExactScalar::integer(i64::MAX / 2);
        assert_eq!(big.checked_mul(&big), Err(ExactError::Overflow));
    }

    #[test]
    fn exact_sign_near_cancellation() {
        // 7 - 5√2 ≈ -0.0711
        let x = ExactScalar::integer(7) - ExactScalar::integer(5) * ExactScalar::sqrt2();
        assert_eq!(x.signum(), -1);
        assert_eq!(exact_sign(&x), -1);
        // √3 - √2 - 0.3178 ...: compare 2√6 - 5 (≈ -0.101)
        let y = ExactScalar::integer(2) * ExactScalar::sqrt6() - ExactScalar::integer(5);
        assert_eq!(exact_sign(&y), -1);
        assert_eq!(exact_sign(&-y), 1);
    }

    #[test]
    fn display_reciprocal_style() {
        let inv6 = ExactScalar::sqrt6() * ExactScalar::rational(1, 6);
        assert_eq!(inv6.to_string(), "1/√6");
        let x = ExactScalar::sqrt2() * ExactScalar::rational(1, 4);
        assert_eq!(x.to_string(), "1/(2√2)");
        assert_eq!(ExactScalar::sqrt6().to_string(), "√6");
        assert_eq!(ExactScalar::rational(-2, 3).to_string(), "-2/3");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn scalar() -> impl Strategy<Value = ExactScalar> {
            let r = (-20i64..20, 1i64..12).prop_map(|(n, d)| Rational::new(n, d));
            (r.clone(), r.clone(), r.clone(), r).prop_map(|(a, b, c, d)| ExactScalar::new(a, b, c, d))
        }

        proptest! {
            #[test]
            fn float_view_tracks_ring_ops(x in scalar(), y in scalar()) {
                let tol = |v: f64| 1e-12 * (1.0 + v.abs());
                let s = (x + y).to_f64();
                prop_assert!((s - (x.to_f64() + y.to_f64())).abs() < tol(s));
                let p = (x * y).to_f64();
                prop_assert!((p - x.to_f64() * y.to_f64()).abs() < tol(p) * 10.0);
            }

            #[test]
            fn zero_iff_all_parts_zero(x in scalar()) {
                let d = x - x;
                prop_assert!(d.is_zero());
                prop_assert_eq!(x.is_zero(), x.to_f64() == 0.0);
            }

            #[test]
            fn sign_matches_float(x in scalar()) {
                let v = x.to_f64();
                if v.abs() > 1e-9 {
                    prop_assert_eq!(x.signum(), if v > 0.0 { 1 } else { -1 });
                    prop_assert_eq!(exact_sign(&x), x.signum());
                }
            }
        }
    }
}
