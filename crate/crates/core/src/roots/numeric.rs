//! All complex roots by Aberth iteration in fixed-point arithmetic.
//!
//! Each squarefree factor from the Yun decomposition is solved separately, so
//! every iteration sees simple roots only and multiplicities come from the
//! factor index. Error radii are a posteriori: for a monic polynomial of
//! degree `n` with distinct approximations `z_j`, the discs of radius
//! `n |W_j|` around `z_j` cover the roots, where `W_j` is the Weierstrass
//! correction `f(z_j) / prod_{i != j} (z_j - z_i)`. When the discs are
//! pairwise disjoint each holds exactly one root.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, Zero};

use super::fixed::{bits_for_digits, CFixed, Fixed};
use super::RootsError;
use crate::poly::{sturm_root_count, Interval, Polynomial, Rat};

/// Largest supported `digits`. Error radii are reported as `f64`.
pub const MAX_DIGITS: u32 = 280;

const GUARD_BITS: u32 = 48;
const ATTEMPTS: u32 = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct NumericRoot {
    pub value: CFixed,
    pub multiplicity: usize,
    /// Radius of a disc around `value` known to contain the root.
    pub error_bound: f64,
}

impl NumericRoot {
    pub fn to_c64(&self) -> Complex64 {
        self.value.to_c64()
    }

    pub fn is_real(&self) -> bool {
        self.value.im.is_zero()
    }
}

/// Roots ordered by decreasing modulus, then decreasing real part, then
/// decreasing imaginary part. For a characteristic polynomial the principal
/// root comes first.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericRootSet {
    roots: Vec<NumericRoot>,
    digits: u32,
}

impl NumericRootSet {
    pub fn roots(&self) -> &[NumericRoot] {
        &self.roots
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn degree(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    pub fn is_squarefree(&self) -> bool {
        self.roots.iter().all(|r| r.multiplicity == 1)
    }

    pub fn values_c64(&self) -> Vec<Complex64> {
        self.roots.iter().map(NumericRoot::to_c64).collect()
    }

    /// Distinct roots repeated by multiplicity.
    pub fn with_multiplicity_c64(&self) -> Vec<Complex64> {
        self.roots
            .iter()
            .flat_map(|r| std::iter::repeat(r.to_c64()).take(r.multiplicity))
            .collect()
    }

    pub fn max_error(&self) -> f64 {
        self.roots.iter().map(|r| r.error_bound).fold(0.0, f64::max)
    }
}

/// All complex roots of `p` to `digits` decimal digits. A non-monic input is
/// normalised first.
pub fn all_roots_numeric(p: &Polynomial, digits: u32) -> Result<NumericRootSet, RootsError> {
    if digits == 0 || digits > MAX_DIGITS {
        return Err(RootsError::InvalidDigits(digits));
    }
    if p.degree().unwrap_or(0) == 0 {
        return Err(RootsError::NotCharacteristic("need degree at least 1".into()));
    }
    let target = 0.5 * 10f64.powi(-(digits as i32));
    let mut roots = Vec::new();
    for (factor, mult) in p.monic().squarefree_decomposition()? {
        let mut bits = bits_for_digits(digits) + GUARD_BITS + 2 * factor.degree().unwrap_or(0) as u32;
        let mut solved = None;
        for _ in 0..ATTEMPTS {
            if let Some(found) = solve_squarefree(&factor, bits, target) {
                solved = Some(found);
                break;
            }
            bits *= 2;
        }
        let found = solved.ok_or(RootsError::PrecisionUnreachable { digits })?;
        roots.extend(found.into_iter().map(|(value, error_bound)| NumericRoot {
            value,
            multiplicity: mult,
            error_bound,
        }));
    }
    roots.sort_by(|a, b| {
        let (za, zb) = (a.to_c64(), b.to_c64());
        zb.norm()
            .total_cmp(&za.norm())
            .then(zb.re.total_cmp(&za.re))
            .then(zb.im.total_cmp(&za.im))
    });
    Ok(NumericRootSet { roots, digits })
}

/// Roots of a monic squarefree polynomial at scale `frac`, or `None` when the
/// error radii miss `target` or the discs overlap.
fn solve_squarefree(f: &Polynomial, frac: u32, target: f64) -> Option<Vec<(CFixed, f64)>> {
    let n = f.degree()?;
    let coeffs: Vec<CFixed> = f.coeffs().iter().map(|c| CFixed::from_rat(c, frac)).collect();
    let mut z = initial_guesses(f, frac);
    let tol_bits = frac.saturating_sub(GUARD_BITS / 2);
    let max_iter = 200 + 20 * n;
    let mut converged = false;
    for _ in 0..max_iter {
        let mut all_small = true;
        for j in 0..n {
            let (fz, dfz) = eval_with_derivative(&coeffs, &z[j]);
            if fz.is_zero() {
                continue;
            }
            let mut s = CFixed::zero(frac);
            let mut collided = false;
            for i in (0..n).filter(|&i| i != j) {
                let d = &z[j] - &z[i];
                if d.is_zero() {
                    collided = true;
                    break;
                }
                s = &s + &(&CFixed::one(frac) / &d);
            }
            if collided || dfz.is_zero() {
                z[j] = &z[j] + &CFixed::from_c64(Complex64::new(1e-3, 7e-4), frac);
                all_small = false;
                continue;
            }
            let newton = &fz / &dfz;
            let denom = &CFixed::one(frac) - &(&newton * &s);
            let step = if denom.is_zero() { newton } else { &newton / &denom };
            z[j] = &z[j] - &step;
            let scale = z[j].abs().max(Fixed::one(frac));
            if step.abs() > &scale * &Fixed::pow2_neg(tol_bits, frac) {
                all_small = false;
            }
        }
        if all_small {
            converged = true;
            break;
        }
    }
    if !converged {
        return None;
    }
    let radii = error_radii(&coeffs, &z)?;
    if radii.iter().any(|&r| !(r <= target)) {
        return None;
    }
    for j in 0..n {
        for i in j + 1..n {
            if (z[j].to_c64() - z[i].to_c64()).norm() <= radii[i] + radii[j] {
                return None;
            }
        }
    }
    snap_real(f, &mut z, &radii)?;
    Some(z.into_iter().zip(radii).collect())
}

/// Points on a circle whose radius bounds every root, rotated off the axes.
fn initial_guesses(f: &Polynomial, frac: u32) -> Vec<CFixed> {
    let n = f.degree().unwrap_or(0);
    let c = f.coeffs();
    // Fujiwara bound: 2 max |a_{n-i}|^{1/i}, with the constant term halved
    let mut radius: f64 = 0.0;
    for i in 1..=n {
        let mut a = rat_abs_f64(&c[n - i]);
        if i == n {
            a /= 2.0;
        }
        radius = radius.max(a.powf(1.0 / i as f64));
    }
    let radius = (2.0 * radius).max(1e-6);
    (0..n)
        .map(|j| {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / n as f64 + 0.4;
            CFixed::from_c64(Complex64::from_polar(radius, theta), frac)
        })
        .collect()
}

fn rat_abs_f64(x: &Rat) -> f64 {
    use num_traits::ToPrimitive;
    x.abs().to_f64().unwrap_or(f64::MAX)
}

fn eval_with_derivative(coeffs: &[CFixed], z: &CFixed) -> (CFixed, CFixed) {
    let frac = z.frac();
    let mut p = CFixed::zero(frac);
    let mut dp = CFixed::zero(frac);
    for c in coeffs.iter().rev() {
        dp = &(&dp * z) + &p;
        p = &(&p * z) + c;
    }
    (p, dp)
}

/// `n |W_j|` plus the rounding error of the fixed-point Horner evaluation.
fn error_radii(coeffs: &[CFixed], z: &[CFixed]) -> Option<Vec<f64>> {
    let n = z.len();
    let frac = coeffs[0].frac();
    let ulp = 2f64.powi(-(frac as i32).min(1070));
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let (fz, _) = eval_with_derivative(coeffs, &z[j]);
        let zabs = z[j].to_c64().norm().max(1.0);
        let horner_slack = 4.0 * (n as f64 + 1.0) * zabs.powi(n as i32) * ulp;
        let mut prod = 1.0f64;
        for i in (0..n).filter(|&i| i != j) {
            prod *= (&z[j] - &z[i]).to_c64().norm();
        }
        if prod == 0.0 || !prod.is_finite() {
            return None;
        }
        let w = (fz.to_c64().norm() + horner_slack) / prod;
        out.push(n as f64 * w * (1.0 + 1e-9));
    }
    Some(out)
}

/// Forces the real roots onto the real axis: the exact Sturm count says how
/// many there are, and they are the approximations nearest the axis.
fn snap_real(f: &Polynomial, z: &mut [CFixed], radii: &[f64]) -> Option<()> {
    let bound = f
        .coeffs()
        .iter()
        .map(|c| c.abs().ceil().to_integer())
        .max()
        .unwrap_or_else(BigInt::zero)
        + 1;
    let range = Interval::new(Rat::from_integer(-&bound), Rat::from_integer(bound)).ok()?;
    let nreal = sturm_root_count(f, &range).ok()?;
    let mut order: Vec<usize> = (0..z.len()).collect();
    order.sort_by(|&a, &b| z[a].im.abs().cmp(&z[b].im.abs()));
    for &j in order.iter().take(nreal) {
        if z[j].im.abs().to_f64() > radii[j] {
            return None;
        }
        z[j].im = Fixed::zero(z[j].frac());
    }
    Some(())
}
