use num_traits::Signed;

use super::{sign_of, Interval, PolyError, Polynomial, Rat};

/// Sturm chain of the squarefree part of a polynomial.
///
/// Each remainder is rescaled by a positive constant to keep coefficient
/// growth down; positive scaling does not change any sign.
#[derive(Debug, Clone)]
pub struct SturmSequence {
    chain: Vec<Polynomial>,
}

pub fn sturm_sequence(p: &Polynomial) -> Result<SturmSequence, PolyError> {
    let base = p.squarefree_part()?;
    let mut chain = vec![base.clone()];
    if base.degree() == Some(0) {
        return Ok(SturmSequence { chain });
    }
    chain.push(base.derivative().monic());
    loop {
        let n = chain.len();
        let (_, r) = chain[n - 2].div_rem(&chain[n - 1])?;
        if r.is_zero() {
            break;
        }
        let lc = r.leading().expect("nonzero remainder").abs();
        chain.push((-&r).scale(&lc.recip()));
    }
    Ok(SturmSequence { chain })
}

impl SturmSequence {
    pub fn polys(&self) -> &[Polynomial] {
        &self.chain
    }

    /// Sign changes along the chain at `x`, skipping zeros.
    pub fn variations(&self, x: &Rat) -> usize {
        let mut last = 0i8;
        let mut count = 0;
        for p in &self.chain {
            let s = sign_of(&p.eval(x));
            if s == 0 {
                continue;
            }
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    /// Distinct real roots in the half-open interval `(lo, hi]`.
    ///
    /// With zeros skipped, the variation count is right-continuous at roots of
    /// the squarefree base, so a root sitting exactly on `lo` is excluded and
    /// one on `hi` is counted without any endpoint perturbation.
    pub fn count(&self, range: &Interval) -> usize {
        self.variations(range.lo()) - self.variations(range.hi())
    }
}

/// Number of distinct real roots of `p` in `(lo, hi]`.
pub fn sturm_root_count(p: &Polynomial, range: &Interval) -> Result<usize, PolyError> {
    if p.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    Ok(sturm_sequence(p)?.count(range))
}
