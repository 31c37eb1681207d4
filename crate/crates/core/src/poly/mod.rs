//! Dense univariate polynomials over arbitrary-precision rationals.
//!
//! Coefficients are stored low-to-high: `coeffs[i]` is the coefficient of
//! `x^i`. Every constructor trims trailing zeros, so the zero polynomial is
//! the empty vector and `degree()` returns `None` for it.

mod interval;
mod parse;
mod sturm;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use interval::Interval;
pub use parse::parse_rational;
pub use sturm::{sturm_root_count, sturm_sequence, SturmSequence};

/// Arbitrary-precision rational. `BigRational` keeps itself reduced with a
/// positive denominator, and zero is always `0/1`.
pub type Rat = BigRational;

/// Shorthand for the rational `n/d`. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("division by the zero polynomial")]
    ZeroDivisor,
    #[error("polynomial division leaves a nonzero remainder")]
    NotDivisible,
    #[error("gcd of two zero polynomials is undefined")]
    BothZero,
    #[error("operation requires a nonzero polynomial")]
    ZeroPolynomial,
    #[error("interval endpoints out of order: {lo} > {hi}")]
    InvalidInterval { lo: Rat, hi: Rat },
    #[error("cannot parse polynomial: {0}")]
    Parse(String),
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    coeffs: Vec<Rat>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    pub fn x() -> Self {
        Self::monomial(Rat::one(), 1)
    }

    pub fn constant(c: Rat) -> Self {
        Self::new(vec![c])
    }

    /// `c * x^power`
    pub fn monomial(c: Rat, power: usize) -> Self {
        let mut coeffs = vec![Rat::zero(); power + 1];
        coeffs[power] = c;
        Self::new(coeffs)
    }

    /// Builds a polynomial from low-to-high coefficients.
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    /// Low-to-high integer coefficients: `from_ints(&[-1, -1, 1])` is `x^2 - x - 1`.
    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| int(c)).collect())
    }

    pub fn from_bigints<'a>(coeffs: impl IntoIterator<Item = &'a BigInt>) -> Self {
        Self::new(coeffs.into_iter().map(|c| Rat::from_integer(c.clone())).collect())
    }

    /// High-to-low coefficients, the order polynomials are usually written in.
    pub fn from_descending(coeffs: Vec<Rat>) -> Self {
        let mut coeffs = coeffs;
        coeffs.reverse();
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rat> {
        self.coeffs
    }

    /// Coefficient of `x^power`; zero above the degree.
    pub fn coeff(&self, power: usize) -> Rat {
        self.coeffs.get(power).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(One::is_one)
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    /// Integer coefficients, low-to-high, if every coefficient is integral.
    pub fn to_integers(&self) -> Option<Vec<BigInt>> {
        self.coeffs
            .iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect()
    }

    pub fn scale(&self, k: &Rat) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Polynomial {
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    /// Multiplies by `x^n`.
    pub fn shift(&self, n: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rat::zero(); n];
        coeffs.extend(self.coeffs.iter().cloned());
        Polynomial { coeffs }
    }

    /// Divides by the leading coefficient. The zero polynomial stays zero.
    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(lc) => {
                let inv = lc.recip();
                self.scale(&inv)
            }
        }
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rat::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    /// Exact Horner evaluation.
    pub fn eval(&self, x: &Rat) -> Rat {
        self.coeffs
            .iter()
            .rev()
            .fold(Rat::zero(), |acc, c| acc * x + c)
    }

    /// Sign of `self(x)` as -1, 0 or 1.
    pub fn sign_at(&self, x: &Rat) -> i8 {
        if self.is_integral() {
            let ints: Vec<BigInt> = self.coeffs.iter().map(|c| c.to_integer()).collect();
            sign_at_integer(&ints, x)
        } else {
            sign_at_integer(&self.primitive_integer(), x)
        }
    }

    /// Interval Horner evaluation. The result encloses `{ self(x) : x in range }`
    /// and is inclusion-monotone in `range`.
    pub fn eval_interval(&self, range: &Interval) -> Interval {
        let mut acc = Interval::point(Rat::zero());
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(range).add_scalar(c);
        }
        acc
    }

    /// Euclidean division: returns `(q, r)` with `self = divisor * q + r` and
    /// `deg r < deg divisor`.
    pub fn div_rem(&self, divisor: &Polynomial) -> Result<(Polynomial, Polynomial), PolyError> {
        let dd = divisor.degree().ok_or(PolyError::ZeroDivisor)?;
        let Some(nd) = self.degree() else {
            return Ok((Self::zero(), Self::zero()));
        };
        if nd < dd {
            return Ok((Self::zero(), self.clone()));
        }
        let lead_inv = divisor.coeffs[dd].recip();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Rat::zero(); nd - dd + 1];
        for i in (0..=nd - dd).rev() {
            let top = &rem[i + dd];
            if top.is_zero() {
                continue;
            }
            let factor = top * &lead_inv;
            for (j, d) in divisor.coeffs.iter().enumerate() {
                if !d.is_zero() {
                    rem[i + j] -= &factor * d;
                }
            }
            quot[i] = factor;
        }
        rem.truncate(dd);
        Ok((Self::new(quot), Self::new(rem)))
    }

    /// `q` with `self = divisor * q`, or `NotDivisible` if the remainder is nonzero.
    pub fn divide_exact(&self, divisor: &Polynomial) -> Result<Polynomial, PolyError> {
        let (q, r) = self.div_rem(divisor)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(PolyError::NotDivisible)
        }
    }

    /// Monic greatest common divisor over the rationals.
    pub fn gcd(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        if self.is_zero() && other.is_zero() {
            return Err(PolyError::BothZero);
        }
        let mut a = self.monic();
        let mut b = other.monic();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b)?;
            a = b;
            b = r.monic();
        }
        Ok(a.monic())
    }

    /// `self / gcd(self, self')`, monic: same roots, each simple.
    pub fn squarefree_part(&self) -> Result<Polynomial, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        let g = self.gcd(&self.derivative())?;
        Ok(self.monic().divide_exact(&g)?)
    }

    pub fn is_squarefree(&self) -> bool {
        match self.degree() {
            None => false,
            Some(0) => true,
            Some(_) => self
                .gcd(&self.derivative())
                .map(|g| g.degree() == Some(0))
                .unwrap_or(false),
        }
    }

    /// Yun's squarefree decomposition: monic factors `f_i` with
    /// `monic(self) = prod f_i^i`. Only factors of positive degree are returned,
    /// paired with their multiplicity.
    pub fn squarefree_decomposition(&self) -> Result<Vec<(Polynomial, usize)>, PolyError> {
        let f = self.monic();
        match f.degree() {
            None => return Err(PolyError::ZeroPolynomial),
            Some(0) => return Ok(Vec::new()),
            Some(_) => {}
        }
        let df = f.derivative();
        let a0 = f.gcd(&df)?;
        let mut b = f.divide_exact(&a0)?;
        let mut c = df.divide_exact(&a0)?;
        let mut d = &c - &b.derivative();
        let mut out = Vec::new();
        let mut i = 1;
        loop {
            let a = b.gcd(&d)?;
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.clone(), i));
            }
            b = b.divide_exact(&a)?;
            if b.degree().unwrap_or(0) == 0 {
                break;
            }
            c = d.divide_exact(&a)?;
            d = &c - &b.derivative();
            i += 1;
        }
        Ok(out)
    }

    /// Multiplies through by the lcm of the denominators and divides out the
    /// integer content, keeping the sign of the leading coefficient.
    pub fn primitive_integer(&self) -> Vec<BigInt> {
        let lcm = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * Rat::from_integer(lcm.clone())).to_integer())
            .collect();
        let content = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if content.is_zero() {
            return ints;
        }
        ints.into_iter().map(|c| c / &content).collect()
    }
}

/// Sign of an integer polynomial (low-to-high) at `n/d`, computed as the sign
/// of the homogenised value `sum a_i n^i d^(deg-i)` so no rational ever gets
/// normalised.
pub(crate) fn sign_at_integer(coeffs: &[BigInt], x: &Rat) -> i8 {
    let (n, d) = (x.numer(), x.denom());
    let mut acc = BigInt::zero();
    let mut dpow = BigInt::one();
    for c in coeffs.iter().rev() {
        acc = acc * n + c * &dpow;
        dpow *= d;
    }
    match acc.sign() {
        num_bigint::Sign::Minus => -1,
        num_bigint::Sign::NoSign => 0,
        num_bigint::Sign::Plus => 1,
    }
}

pub(crate) fn sign_of(x: &Rat) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Writes `3x^2-2x-5`, `x^5-x^4-1`, `(1/2)x+3/4`. The zero polynomial is `0`.
impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (power, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if c.is_negative() {
                f.write_str("-")?;
            } else if !first {
                f.write_str("+")?;
            }
            first = false;
            let unit = mag.is_one();
            if power == 0 {
                write!(f, "{mag}")?;
                continue;
            }
            if !unit {
                if mag.is_integer() {
                    write!(f, "{mag}")?;
                } else {
                    write!(f, "({mag})")?;
                }
            }
            f.write_str("x")?;
            if power > 1 {
                write!(f, "^{power}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({self})")
    }
}
