//! Long-run behaviour of recurrence sequences: the sign of the `r^n` term,
//! Binet coefficients for squarefree characteristic polynomials, and the
//! principal coefficient of the `q(1,t)` sequence of a Zeroing run.

use std::fmt;

use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::poly::{PolyError, Polynomial, Rat};
use crate::recurrence::{Recurrence, RecurrenceError};
use crate::roots::{
    all_roots_numeric, principal_root, sign_in_enclosure, CFixed, Fixed, NumericRootSet, RootsError,
};
use crate::zeroing::{Zeroing, ZeroingError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("initial values must not be all zero")]
    AllZeroInit,
    #[error("P is not squarefree")]
    NotSquarefree,
    #[error("reconstructed term {index} has imaginary part {im} against magnitude {abs}")]
    ImaginaryResidue { index: usize, im: String, abs: String },
    #[error("denominator prod(r1 - ri) is not a positive real: {0}")]
    DenominatorNotPositive(String),
    #[error("largest numeric root does not match the principal root enclosure")]
    PrincipalMismatch,
    #[error(transparent)]
    Recurrence(#[from] RecurrenceError),
    #[error(transparent)]
    Roots(#[from] RootsError),
    #[error(transparent)]
    Zeroing(#[from] ZeroingError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Divergence {
    PositiveInfinity,
    NegativeInfinity,
    /// The `r^n` coefficient vanishes; the terms are `o(r^n)`.
    ZeroCoefficient,
}

impl Divergence {
    pub fn from_sign(s: i8) -> Self {
        match s {
            1 => Divergence::PositiveInfinity,
            -1 => Divergence::NegativeInfinity,
            _ => Divergence::ZeroCoefficient,
        }
    }

    pub fn sign(self) -> i8 {
        match self {
            Divergence::PositiveInfinity => 1,
            Divergence::NegativeInfinity => -1,
            Divergence::ZeroCoefficient => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceVerdict {
    pub sign: Divergence,
    /// `Q(x) = a_1 x^{k-1} + sum_{i>=2} (a_i - d_i) x^{k-i}`
    pub q: Polynomial,
    /// `d_2..d_k`
    pub d: Vec<Rat>,
    /// `gcd(Q, P)` when the coefficient vanishes.
    pub common_factor: Option<Polynomial>,
}

impl fmt::Display for DivergenceVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            Divergence::PositiveInfinity => write!(f, "diverges to +infinity; Q(x)={}", self.q),
            Divergence::NegativeInfinity => write!(f, "diverges to -infinity; Q(x)={}", self.q),
            Divergence::ZeroCoefficient => {
                write!(f, "coefficient of r^n is zero; Q(x)={}", self.q)?;
                if let Some(g) = &self.common_factor {
                    write!(f, "; gcd(Q,P)={g}")?;
                }
                Ok(())
            }
        }
    }
}

/// Sign of the `r^n` term of the sequence with initial values `a_1..a_k`.
pub fn predict_divergence(rec: &Recurrence, init: &[Rat]) -> Result<DivergenceVerdict, AnalysisError> {
    let k = rec.order();
    if init.len() != k {
        return Err(RecurrenceError::WrongInitLength { expected: k, got: init.len() }.into());
    }
    if init.iter().all(Zero::is_zero) {
        return Err(AnalysisError::AllZeroInit);
    }
    let c: Vec<Rat> = (0..=k).map(|i| Rat::from_integer(rec.coeff(i))).collect();
    let d: Vec<Rat> = (2..=k)
        .map(|i| (1..i).fold(Rat::zero(), |acc, j| acc + &init[j - 1] * &c[i - j]))
        .collect();
    let mut desc = vec![init[0].clone()];
    desc.extend((2..=k).map(|i| &init[i - 1] - &d[i - 2]));
    let q = Polynomial::from_descending(desc);
    let p = rec.characteristic_polynomial();
    let enclosure = principal_root(&p, &Rat::one())?;
    let sign = sign_in_enclosure(&q, &enclosure)?;
    let common_factor = if sign == 0 { Some(q.gcd(&p)?) } else { None };
    Ok(DivergenceVerdict { sign: Divergence::from_sign(sign), q, d, common_factor })
}

/// Binet data for the unit-impulse sequence `a_0 = .. = a_{k-2} = 0`,
/// `a_{k-1} = 1` of a monic squarefree `P`: `a_n = sum_i c_i r_i^n` with
/// `c_i = 1 / P'(r_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinetSquarefree {
    pub poly: Polynomial,
    pub roots: NumericRootSet,
    pub coeffs: Vec<CFixed>,
}

impl BinetSquarefree {
    pub fn coeffs_c64(&self) -> Vec<Complex64> {
        self.coeffs.iter().map(CFixed::to_c64).collect()
    }
}

pub fn binet_squarefree(p: &Polynomial, digits: u32) -> Result<BinetSquarefree, AnalysisError> {
    let p = p.monic();
    if p.is_zero() || !p.is_squarefree() {
        return Err(AnalysisError::NotSquarefree);
    }
    let roots = all_roots_numeric(&p, digits)?;
    let dp = p.derivative();
    let coeffs = roots
        .roots()
        .iter()
        .map(|r| {
            let frac = r.value.frac();
            &CFixed::one(frac) / &eval_fixed(&dp, &r.value)
        })
        .collect();
    Ok(BinetSquarefree { poly: p, roots, coeffs })
}

fn eval_fixed(p: &Polynomial, z: &CFixed) -> CFixed {
    let frac = z.frac();
    p.coeffs()
        .iter()
        .rev()
        .fold(CFixed::zero(frac), |acc, c| &(&acc * z) + &CFixed::from_rat(c, frac))
}

/// `a_0..a_{count-1}` from the Binet sum, after checking that the imaginary
/// residue is negligible.
pub fn reconstruct_terms(b: &BinetSquarefree, count: usize) -> Result<Vec<f64>, AnalysisError> {
    let Some(first) = b.roots.roots().first() else {
        return Ok(Vec::new());
    };
    let frac = first.value.frac();
    let mut powers: Vec<CFixed> = vec![CFixed::one(frac); b.coeffs.len()];
    let mut out = Vec::with_capacity(count);
    for n in 0..count {
        let mut sum = CFixed::zero(frac);
        for (i, c) in b.coeffs.iter().enumerate() {
            sum = &sum + &(c * &powers[i]);
            powers[i] = &powers[i] * &b.roots.roots()[i].value;
        }
        let z = sum.to_c64();
        if z.im.abs() > 1e-6 * z.norm().max(1.0) {
            return Err(AnalysisError::ImaginaryResidue {
                index: n,
                im: format!("{:e}", z.im),
                abs: format!("{:e}", z.norm()),
            });
        }
        out.push(z.re);
    }
    Ok(out)
}

/// Exact unit-impulse terms `a_0..a_{count-1}` of a monic `P`.
pub fn impulse_terms(p: &Polynomial, count: usize) -> Vec<Rat> {
    let p = p.monic();
    let k = p.degree().unwrap_or(0);
    let c: Vec<Rat> = (1..=k).map(|i| -p.coeff(k - i)).collect();
    let mut a: Vec<Rat> = Vec::with_capacity(count.max(k));
    for n in 0..count.max(k) {
        if n < k {
            a.push(if n + 1 == k { Rat::one() } else { Rat::zero() });
        } else {
            let v = (1..=k).fold(Rat::zero(), |acc, i| acc + &c[i - 1] * &a[n - i]);
            a.push(v);
        }
    }
    a.truncate(count);
    a
}

/// Coefficient `a_1` of `r^t` in `q(1,t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalCoefficient {
    pub a1: f64,
    pub error_bound: f64,
    /// Exact sign of `Q_0(r)`, which is the sign of `a1`.
    pub numerator_sign: i8,
    /// `prod_{i>=2} (r_1 - r_i)`, checked to be a positive real.
    pub denominator: Complex64,
    /// Some pair of non-principal roots has equal modulus (conjugate pairs
    /// always do).
    pub magnitude_ties: bool,
}

pub fn principal_coefficient(
    z: &Zeroing,
    beta: &[Rat],
    digits: u32,
) -> Result<PrincipalCoefficient, AnalysisError> {
    let p = z.poly();
    if !p.is_squarefree() {
        return Err(AnalysisError::NotSquarefree);
    }
    let q0 = z.q0(beta)?;
    let numerator_sign = sign_in_enclosure(&q0, z.enclosure())?;
    let roots = all_roots_numeric(p, digits)?;
    let width = Rat::new(One::one(), num_bigint::BigInt::from(10u32).pow(digits));
    let enc = z.enclosure().refine(&width)?;
    let r1 = &roots.roots()[0];
    let r1c = r1.to_c64();
    let mid = enc.midpoint().to_f64().unwrap_or(f64::NAN);
    if !r1.is_real() || (r1c.re - mid).abs() > 1e-9 * mid.max(1.0) {
        return Err(AnalysisError::PrincipalMismatch);
    }
    let num = enc.eval(&q0);
    let num_mid = num.midpoint().to_f64().unwrap_or(f64::NAN);
    let num_err = num.width().to_f64().unwrap_or(f64::INFINITY);

    let frac = r1.value.frac();
    let mut den = CFixed::one(frac);
    let mut rel_err = 0.0;
    for ri in &roots.roots()[1..] {
        let diff = &r1.value - &ri.value;
        rel_err += (r1.error_bound + ri.error_bound) / diff.to_c64().norm();
        den = &den * &diff;
    }
    let den_c = den.to_c64();
    let scale = den_c.norm();
    if !(den_c.re > 0.0 && den_c.im.abs() <= 1e-12 * scale.max(1.0)) {
        return Err(AnalysisError::DenominatorNotPositive(format!("{den_c}")));
    }
    let a1 = num_mid / den_c.re;
    let error_bound = num_err / den_c.re + a1.abs() * rel_err * 1.01 + f64::EPSILON * a1.abs() * 4.0;

    let mods: Vec<Fixed> = roots.roots()[1..].iter().map(|r| r.value.abs()).collect();
    let tol = Fixed::from_f64(10f64.powi(-((digits / 2) as i32)), frac);
    let mut magnitude_ties = false;
    for i in 0..mods.len() {
        for j in i + 1..mods.len() {
            if (&mods[i] - &mods[j]).abs() <= tol {
                magnitude_ties = true;
            }
        }
    }
    Ok(PrincipalCoefficient { a1, error_bound, numerator_sign, denominator: den_c, magnitude_ties })
}

/// `q / r^t` evaluated at a rational stand-in for `r`.
pub fn scaled_by_power(q: &Rat, r: &Rat, t: usize) -> f64 {
    let pow = num_traits::pow(r.clone(), t);
    (q / pow).to_f64().unwrap_or(f64::NAN)
}

/// Sign of `x` as -1, 0, 1.
pub fn sign_f64(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

impl BinetSquarefree {
    /// Largest absolute error of [`reconstruct_terms`] against the exact
    /// iteration, relative to `max(|a_n|, 1)`.
    pub fn max_relative_error(&self, count: usize) -> Result<f64, AnalysisError> {
        let approx = reconstruct_terms(self, count)?;
        let exact = impulse_terms(&self.poly, count);
        Ok(approx
            .iter()
            .zip(&exact)
            .map(|(a, e)| {
                let e = e.to_f64().unwrap_or(f64::NAN);
                (a - e).abs() / e.abs().max(1.0)
            })
            .fold(0.0, f64::max))
    }
}
