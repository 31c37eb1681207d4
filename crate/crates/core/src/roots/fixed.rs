//! Binary fixed-point reals and complexes backed by `BigInt`.
//!
//! A value is `raw / 2^frac`. Every value taking part in one computation
//! carries the same `frac`; mixing scales is a logic error and is caught by
//! debug assertions. Addition is exact, multiplication and division round to
//! the shared scale.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::poly::Rat;

/// Bits needed to carry `digits` decimal digits.
pub fn bits_for_digits(digits: u32) -> u32 {
    (f64::from(digits) * std::f64::consts::LOG2_10).ceil() as u32
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Fixed {
    raw: BigInt,
    frac: u32,
}

impl Fixed {
    pub fn zero(frac: u32) -> Self {
        Fixed { raw: BigInt::zero(), frac }
    }

    pub fn one(frac: u32) -> Self {
        Fixed { raw: BigInt::one() << frac, frac }
    }

    pub fn from_int(n: &BigInt, frac: u32) -> Self {
        Fixed { raw: n << frac, frac }
    }

    /// Rounds to the nearest representable value.
    pub fn from_rat(x: &Rat, frac: u32) -> Self {
        let scaled = x * Rat::from_integer(BigInt::one() << frac);
        Fixed { raw: scaled.round().to_integer(), frac }
    }

    pub fn from_f64(x: f64, frac: u32) -> Self {
        let r = Rat::from_float(x).unwrap_or_else(Rat::zero);
        Self::from_rat(&r, frac)
    }

    /// `2^-k` at scale `frac` (zero if below one unit).
    pub fn pow2_neg(k: u32, frac: u32) -> Self {
        if k > frac {
            return Self::zero(frac);
        }
        Fixed { raw: BigInt::one() << (frac - k), frac }
    }

    pub fn frac(&self) -> u32 {
        self.frac
    }

    pub fn raw(&self) -> &BigInt {
        &self.raw
    }

    /// Exact dyadic value.
    pub fn to_rat(&self) -> Rat {
        Rat::new(self.raw.clone(), BigInt::one() << self.frac)
    }

    pub fn to_f64(&self) -> f64 {
        let bits = self.raw.bits();
        if bits == 0 {
            return 0.0;
        }
        let shift = bits.saturating_sub(60);
        let top = (&self.raw >> shift).to_f64().unwrap_or(0.0);
        let exp = shift as i64 - i64::from(self.frac);
        scale_pow2(top, exp)
    }

    pub fn is_zero(&self) -> bool {
        self.raw.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.raw.is_negative()
    }

    pub fn signum(&self) -> i8 {
        match self.raw.sign() {
            num_bigint::Sign::Minus => -1,
            num_bigint::Sign::NoSign => 0,
            num_bigint::Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Self {
        Fixed { raw: self.raw.abs(), frac: self.frac }
    }

    /// Square root of a non-negative value (negative inputs give zero).
    pub fn sqrt(&self) -> Self {
        if !self.raw.is_positive() {
            return Self::zero(self.frac);
        }
        Fixed { raw: (&self.raw << self.frac).sqrt(), frac: self.frac }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    fn check(&self, other: &Fixed) {
        debug_assert_eq!(self.frac, other.frac, "fixed-point scale mismatch");
    }
}

fn scale_pow2(x: f64, exp: i64) -> f64 {
    let mut x = x;
    let mut e = exp;
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}

impl PartialOrd for Fixed {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Fixed {
    fn cmp(&self, other: &Self) -> Ordering {
        self.check(other);
        self.raw.cmp(&other.raw)
    }
}

impl Add for &Fixed {
    type Output = Fixed;
    fn add(self, rhs: &Fixed) -> Fixed {
        self.check(rhs);
        Fixed { raw: &self.raw + &rhs.raw, frac: self.frac }
    }
}

impl Sub for &Fixed {
    type Output = Fixed;
    fn sub(self, rhs: &Fixed) -> Fixed {
        self.check(rhs);
        Fixed { raw: &self.raw - &rhs.raw, frac: self.frac }
    }
}

impl Mul for &Fixed {
    type Output = Fixed;
    fn mul(self, rhs: &Fixed) -> Fixed {
        self.check(rhs);
        let prod = &self.raw * &rhs.raw;
        let half = if self.frac == 0 { BigInt::zero() } else { BigInt::one() << (self.frac - 1) };
        Fixed { raw: (prod + half) >> self.frac, frac: self.frac }
    }
}

impl Div for &Fixed {
    type Output = Fixed;
    /// Panics on division by zero, like integer division.
    fn div(self, rhs: &Fixed) -> Fixed {
        self.check(rhs);
        Fixed { raw: (&self.raw << self.frac) / &rhs.raw, frac: self.frac }
    }
}

impl Neg for &Fixed {
    type Output = Fixed;
    fn neg(self) -> Fixed {
        Fixed { raw: -&self.raw, frac: self.frac }
    }
}

impl fmt::Debug for Fixed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.to_f64())
    }
}

impl fmt::Display for Fixed {
    /// Decimal rendering with as many digits as the scale supports.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(((self.frac as f64) / std::f64::consts::LOG2_10) as usize);
        let ten = BigInt::from(10u32).pow(digits as u32);
        let scaled: BigInt = (&self.raw.abs() * &ten + (BigInt::one() << self.frac) / 2) >> self.frac;
        let int_part = &scaled / &ten;
        let frac_part = &scaled % &ten;
        let sign = if self.raw.is_negative() && !scaled.is_zero() { "-" } else { "" };
        if digits == 0 {
            write!(f, "{sign}{int_part}")
        } else {
            write!(f, "{sign}{int_part}.{:0>width$}", frac_part.to_string(), width = digits)
        }
    }
}

/// Complex number with fixed-point parts.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CFixed {
    pub re: Fixed,
    pub im: Fixed,
}

impl CFixed {
    pub fn new(re: Fixed, im: Fixed) -> Self {
        debug_assert_eq!(re.frac, im.frac);
        CFixed { re, im }
    }

    pub fn zero(frac: u32) -> Self {
        CFixed { re: Fixed::zero(frac), im: Fixed::zero(frac) }
    }

    pub fn one(frac: u32) -> Self {
        CFixed { re: Fixed::one(frac), im: Fixed::zero(frac) }
    }

    pub fn real(re: Fixed) -> Self {
        let frac = re.frac;
        CFixed { re, im: Fixed::zero(frac) }
    }

    pub fn from_rat(x: &Rat, frac: u32) -> Self {
        Self::real(Fixed::from_rat(x, frac))
    }

    pub fn from_c64(z: Complex64, frac: u32) -> Self {
        CFixed { re: Fixed::from_f64(z.re, frac), im: Fixed::from_f64(z.im, frac) }
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn frac(&self) -> u32 {
        self.re.frac
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        CFixed { re: self.re.clone(), im: -&self.im }
    }

    pub fn norm_sqr(&self) -> Fixed {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }

    pub fn abs(&self) -> Fixed {
        self.norm_sqr().sqrt()
    }

    pub fn powu(&self, n: usize) -> Self {
        let mut acc = CFixed::one(self.frac());
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }
}

impl Add for &CFixed {
    type Output = CFixed;
    fn add(self, rhs: &CFixed) -> CFixed {
        CFixed { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl Sub for &CFixed {
    type Output = CFixed;
    fn sub(self, rhs: &CFixed) -> CFixed {
        CFixed { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl Mul for &CFixed {
    type Output = CFixed;
    fn mul(self, rhs: &CFixed) -> CFixed {
        CFixed {
            re: &(&self.re * &rhs.re) - &(&self.im * &rhs.im),
            im: &(&self.re * &rhs.im) + &(&self.im * &rhs.re),
        }
    }
}

impl Div for &CFixed {
    type Output = CFixed;
    fn div(self, rhs: &CFixed) -> CFixed {
        let den = rhs.norm_sqr();
        let num = self * &rhs.conj();
        CFixed { re: &num.re / &den, im: &num.im / &den }
    }
}

impl Neg for &CFixed {
    type Output = CFixed;
    fn neg(self) -> CFixed {
        CFixed { re: -&self.re, im: -&self.im }
    }
}

impl fmt::Debug for CFixed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}{:+e}i)", self.re, self.im.to_f64())
    }
}

impl fmt::Display for CFixed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(((self.frac() as f64) / std::f64::consts::LOG2_10) as usize);
        if self.im.is_zero() {
            return write!(f, "{:.*}", digits, self.re);
        }
        let sign = if self.im.is_negative() { '-' } else { '+' };
        write!(f, "{:.*}{}{:.*}i", digits, self.re, sign, digits, self.im.abs())
    }
}
