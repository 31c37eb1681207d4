//! Root isolation and exact sign decisions at the principal root.
//!
//! A characteristic polynomial here has a positive leading coefficient, a
//! negative constant term and exactly one sign change in its coefficient
//! sequence, so it has exactly one positive root and that root is simple.

pub mod fixed;
mod numeric;

use std::ops::{Add, Mul};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::poly::{sign_at_integer, sturm_root_count, Interval, PolyError, Polynomial, Rat};

pub use fixed::{CFixed, Fixed};
pub use numeric::{all_roots_numeric, NumericRoot, NumericRootSet, MAX_DIGITS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RootsError {
    #[error("not a characteristic polynomial: {0}")]
    NotCharacteristic(String),
    #[error("could not reach {digits} digits within the iteration budget")]
    PrecisionUnreachable { digits: u32 },
    #[error("index {n} out of range for {len} values")]
    IndexOutOfRange { n: usize, len: usize },
    #[error("requested {0} digits; supported range is 1..={MAX_DIGITS}")]
    InvalidDigits(u32),
    #[error("enclosure width must be positive")]
    InvalidWidth,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Rational interval `(lo, hi]` holding the unique positive root of `poly`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootEnclosure {
    poly: Polynomial,
    ints: Vec<BigInt>,
    interval: Interval,
}

impl RootEnclosure {
    pub fn poly(&self) -> &Polynomial {
        &self.poly
    }

    pub fn interval(&self) -> &Interval {
        &self.interval
    }

    pub fn width(&self) -> Rat {
        self.interval.width()
    }

    pub fn midpoint(&self) -> Rat {
        self.interval.midpoint()
    }

    /// One bisection step. The root stays in the half-open half because
    /// `poly` is negative below it and non-negative from it upward.
    pub fn bisect(&self) -> RootEnclosure {
        let mid = self.interval.midpoint();
        let interval = if sign_at_integer(&self.ints, &mid) >= 0 {
            Interval::new(self.interval.lo().clone(), mid)
        } else {
            Interval::new(mid, self.interval.hi().clone())
        }
        .expect("midpoint lies inside the interval");
        RootEnclosure { poly: self.poly.clone(), ints: self.ints.clone(), interval }
    }

    /// Bisects until the width is at most `width` and the lower end is positive.
    pub fn refine(&self, width: &Rat) -> Result<RootEnclosure, RootsError> {
        if !width.is_positive() {
            return Err(RootsError::InvalidWidth);
        }
        let mut e = self.clone();
        while &e.width() > width || !e.interval.lo().is_positive() {
            e = e.bisect();
        }
        Ok(e)
    }

    /// Enclosure of `q(r)` by interval Horner evaluation.
    pub fn eval(&self, q: &Polynomial) -> Interval {
        q.eval_interval(&self.interval)
    }

    /// Distinct roots of `p` in the enclosure (the half-open interval).
    pub fn roots_of(&self, p: &Polynomial) -> Result<usize, RootsError> {
        Ok(sturm_root_count(p, &self.interval)?)
    }
}

/// Checks the shape described in the module docs and returns the integer
/// coefficients (primitive, low-to-high).
fn characteristic_ints(p: &Polynomial) -> Result<Vec<BigInt>, RootsError> {
    let deg = p.degree().ok_or_else(|| RootsError::NotCharacteristic("zero polynomial".into()))?;
    if deg == 0 {
        return Err(RootsError::NotCharacteristic("constant polynomial".into()));
    }
    let ints = p.primitive_integer();
    if !ints[deg].is_positive() {
        return Err(RootsError::NotCharacteristic("leading coefficient must be positive".into()));
    }
    if !ints[0].is_negative() {
        return Err(RootsError::NotCharacteristic("constant term must be negative".into()));
    }
    let signs: Vec<bool> = ints.iter().filter(|c| !c.is_zero()).map(|c| c.is_positive()).collect();
    let changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
    if changes != 1 {
        return Err(RootsError::NotCharacteristic(format!(
            "coefficient signs change {changes} times, expected once"
        )));
    }
    Ok(ints)
}

/// Isolates the principal root of `p` to an interval of width at most `width`.
pub fn principal_root(p: &Polynomial, width: &Rat) -> Result<RootEnclosure, RootsError> {
    let ints = characteristic_ints(p)?;
    let lead = &ints[ints.len() - 1];
    let max_c = ints[..ints.len() - 1]
        .iter()
        .map(|c| Rat::new(c.abs(), lead.clone()))
        .max()
        .unwrap_or_else(Rat::zero);
    let bound = (max_c + Rat::one()).ceil();
    let interval = Interval::new(Rat::zero(), bound)?;
    if sturm_root_count(p, &interval)? != 1 {
        return Err(RootsError::NotCharacteristic("no unique root in the coefficient bound".into()));
    }
    let start = RootEnclosure { poly: p.clone(), ints, interval };
    start.refine(width)
}

/// Exact sign of `q` at the principal root of `p`.
pub fn sign_at_principal_root(q: &Polynomial, p: &Polynomial) -> Result<i8, RootsError> {
    let start = principal_root(p, &Rat::one())?;
    sign_in_enclosure(q, &start)
}

/// Same as [`sign_at_principal_root`] but reuses an existing enclosure.
pub fn sign_in_enclosure(q: &Polynomial, enclosure: &RootEnclosure) -> Result<i8, RootsError> {
    if q.is_zero() {
        return Ok(0);
    }
    let g = q.gcd(enclosure.poly())?;
    if g.degree().unwrap_or(0) > 0 && enclosure.roots_of(&g)? == 1 {
        return Ok(0);
    }
    let mut e = enclosure.clone();
    loop {
        if let Some(s) = e.eval(q).sign() {
            if s != 0 {
                return Ok(s);
            }
        }
        e = e.bisect();
    }
}

/// `S_n(values)`: sum over all `n`-element products. `S_0 = 1`.
pub fn elementary_symmetric<T>(values: &[T], n: usize) -> Result<T, RootsError>
where
    T: Clone + Zero + One,
    for<'a> &'a T: Mul<&'a T, Output = T> + Add<&'a T, Output = T>,
{
    if n > values.len() {
        return Err(RootsError::IndexOutOfRange { n, len: values.len() });
    }
    let mut e = vec![T::zero(); n + 1];
    e[0] = T::one();
    for (i, v) in values.iter().enumerate() {
        for j in (1..=n.min(i + 1)).rev() {
            let term = &e[j - 1] * v;
            e[j] = &e[j] + &term;
        }
    }
    Ok(e.swap_remove(n))
}
