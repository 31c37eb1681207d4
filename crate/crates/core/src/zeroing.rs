//! The Zeroing iteration `Q_t = x Q_{t-1} - q(1,t-1) P` and its prefix-pinned
//! variant used to build derived recurrences.
//!
//! `q(n,t)` is the coefficient of `x^{k-n}` in `Q_t`. Runs are done on integer
//! vectors: rational `beta`/`gamma` are scaled by the lcm of their
//! denominators, which is positive and so changes no sign.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::poly::{Polynomial, Rat};
use crate::recurrence::{Recurrence, RecurrenceError};
use crate::roots::{principal_root, sign_in_enclosure, RootEnclosure, RootsError};

pub const DEFAULT_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ZeroingError {
    #[error("beta must not be all zero")]
    AllZeroBeta,
    #[error("expected {expected} values, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("P must be monic with integer coefficients")]
    NotIntegral,
    #[error("gamma must be non-empty")]
    EmptyGamma,
    #[error("Gamma_m(r) <= 0: derivation impossible with this prefix")]
    GammaNotPositiveAtRoot,
    #[error("n must be below the principal root")]
    NTooLarge,
    #[error("n must be positive")]
    NZero,
    #[error("budget of {steps} steps exhausted")]
    BudgetExhausted { steps: usize },
    #[error("internal check failed: {0}")]
    InvariantViolated(String),
    #[error(transparent)]
    Roots(#[from] RootsError),
    #[error(transparent)]
    Recurrence(#[from] RecurrenceError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// First `t` at which `Q_t` has no positive coefficient.
    TerminatedAt(usize),
    /// `Q0(r) >= 0`; no iteration was attempted.
    WontTerminate { sign: i8 },
    /// Iteration stopped after `steps` steps without terminating.
    Budget { steps: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZeroingOptions {
    pub budget: usize,
    /// Iterate even when the sign of `Q0(r)` rules out termination.
    pub force: bool,
    /// Keep every `Q_t` and `q(1,t)`; otherwise only `Q_0` and the last `Q_t`
    /// are retained.
    pub keep_trace: bool,
}

impl Default for ZeroingOptions {
    fn default() -> Self {
        ZeroingOptions { budget: DEFAULT_BUDGET, force: false, keep_trace: true }
    }
}

/// Integer data of a monic integral `P = x^k - c_1 x^{k-1} - ... - c_k`
/// together with an isolating enclosure of its principal root.
#[derive(Debug, Clone)]
pub struct Zeroing {
    p: Polynomial,
    c: Vec<BigInt>,
    enclosure: RootEnclosure,
}

impl Zeroing {
    pub fn new(p: &Polynomial) -> Result<Self, ZeroingError> {
        if !p.is_monic() {
            return Err(ZeroingError::NotIntegral);
        }
        let ints = p.to_integers().ok_or(ZeroingError::NotIntegral)?;
        let k = ints.len() - 1;
        let enclosure = principal_root(p, &Rat::one())?;
        let c = (1..=k).map(|i| -&ints[k - i]).collect();
        Ok(Zeroing { p: p.clone(), c, enclosure })
    }

    pub fn from_recurrence(rec: &Recurrence) -> Result<Self, ZeroingError> {
        Self::new(&rec.characteristic_polynomial())
    }

    pub fn poly(&self) -> &Polynomial {
        &self.p
    }

    pub fn k(&self) -> usize {
        self.c.len()
    }

    /// `c_1..c_k`
    pub fn coeffs(&self) -> &[BigInt] {
        &self.c
    }

    pub fn enclosure(&self) -> &RootEnclosure {
        &self.enclosure
    }

    /// `Q_0 = beta_1 x^{k-1} + ... + beta_k`
    pub fn q0(&self, beta: &[Rat]) -> Result<Polynomial, ZeroingError> {
        check_beta(beta, self.k())?;
        Ok(Polynomial::from_descending(beta.to_vec()))
    }

    /// Exact sign of `Q_0(r)`.
    pub fn sign_q0(&self, beta: &[Rat]) -> Result<i8, ZeroingError> {
        Ok(sign_in_enclosure(&self.q0(beta)?, &self.enclosure)?)
    }

    /// One step on scaled coefficients `q = (q(1,t), ..., q(k,t))`, with the
    /// top coefficient first reduced by `pin` (zero for the plain iteration).
    fn step(&self, q: &[BigInt], pin: &BigInt) -> Vec<BigInt> {
        let k = self.k();
        let f = &q[0] - pin;
        (0..k)
            .map(|n| {
                let carry = if n + 1 < k { q[n + 1].clone() } else { BigInt::zero() };
                if f.is_zero() || self.c[n].is_zero() {
                    carry
                } else {
                    carry + &self.c[n] * &f
                }
            })
            .collect()
    }

    pub fn run(&self, beta: &[Rat], opts: &ZeroingOptions) -> Result<ZeroingTrace, ZeroingError> {
        check_beta(beta, self.k())?;
        let sign = self.sign_q0(beta)?;
        let (scale, q0) = scale_to_integers(beta);
        let mut trace = ZeroingTrace {
            k: self.k(),
            scale,
            history: vec![q0.clone()],
            q1: vec![q0[0].clone()],
            keep_trace: opts.keep_trace,
            last: q0.clone(),
            steps: 0,
            last_q1_positive: q0[0].is_positive().then_some(0),
            termination: Termination::WontTerminate { sign },
            sign_q0_at_r: sign,
        };
        if sign >= 0 && !opts.force {
            return Ok(trace);
        }
        let zero = BigInt::zero();
        let mut q = q0;
        let mut t = 0;
        loop {
            if q.iter().all(|x| !x.is_positive()) {
                trace.termination = Termination::TerminatedAt(t);
                break;
            }
            if t >= opts.budget {
                trace.termination = Termination::Budget { steps: t };
                break;
            }
            q = self.step(&q, &zero);
            t += 1;
            if q[0].is_positive() {
                trace.last_q1_positive = Some(t);
            }
            if opts.keep_trace {
                trace.history.push(q.clone());
                trace.q1.push(q[0].clone());
            }
        }
        trace.steps = t;
        trace.last = q;
        Ok(trace)
    }

    /// First `k` values of `q(1,t)`, from
    /// `q(1,j) = beta_{j+1} + sum_{i=1}^{j} c_i q(1,j-i)`.
    pub fn q1_initial_values(&self, beta: &[Rat]) -> Result<Vec<Rat>, ZeroingError> {
        check_beta(beta, self.k())?;
        let c: Vec<Rat> = self.c.iter().map(|x| Rat::from_integer(x.clone())).collect();
        let mut out: Vec<Rat> = Vec::with_capacity(self.k());
        for j in 0..self.k() {
            let mut v = beta[j].clone();
            for i in 1..=j {
                v += &c[i - 1] * &out[j - i];
            }
            out.push(v);
        }
        Ok(out)
    }

    /// Pins the leading coefficients to `gamma`, then runs the plain iteration
    /// until no coefficient is positive.
    pub fn run_modified(&self, gamma: &[Rat], budget: usize) -> Result<DerivationResult, ZeroingError> {
        let m = gamma.len();
        if m == 0 {
            return Err(ZeroingError::EmptyGamma);
        }
        let big_gamma = Polynomial::from_descending(gamma.to_vec());
        if sign_in_enclosure(&big_gamma, &self.enclosure)? <= 0 {
            return Err(ZeroingError::GammaNotPositiveAtRoot);
        }
        let k = self.k();
        let (scale, g) = scale_to_integers(gamma);
        let mut q = vec![BigInt::zero(); k];
        for pin in &g {
            q = self.step(&q, pin);
        }
        let zero = BigInt::zero();
        let mut t0 = 0;
        let mut last_q1_positive = None;
        while q.iter().any(Signed::is_positive) {
            if t0 >= budget {
                return Err(ZeroingError::BudgetExhausted { steps: t0 });
            }
            q = self.step(&q, &zero);
            t0 += 1;
            if q[0].is_positive() {
                last_q1_positive = Some(t0);
            }
        }
        let d = Rat::from_integer(scale);
        let mut desc: Vec<Rat> = Vec::with_capacity(m + t0 + k);
        desc.extend(g.iter().map(|x| Rat::from_integer(x.clone()) / &d));
        desc.extend(std::iter::repeat(Rat::zero()).take(t0));
        desc.extend(q.iter().map(|x| Rat::from_integer(x.clone()) / &d));
        let p = Polynomial::from_descending(desc.clone());
        let quotient = p
            .divide_exact(&self.p)
            .map_err(|_| ZeroingError::InvariantViolated("P does not divide p".into()))?;
        if desc[..m] != gamma[..] {
            return Err(ZeroingError::InvariantViolated("prefix differs from gamma".into()));
        }
        if desc[m..].iter().any(Signed::is_positive) {
            return Err(ZeroingError::InvariantViolated("positive coefficient after prefix".into()));
        }
        let derived_recurrence = if p.is_monic() && p.is_integral() {
            Recurrence::from_characteristic(&p).ok()
        } else {
            None
        };
        Ok(DerivationResult { p, quotient, t0, k, m, last_q1_positive, derived_recurrence })
    }
}

fn check_beta(beta: &[Rat], k: usize) -> Result<(), ZeroingError> {
    if beta.len() != k {
        return Err(ZeroingError::WrongLength { expected: k, got: beta.len() });
    }
    if beta.iter().all(Zero::is_zero) {
        return Err(ZeroingError::AllZeroBeta);
    }
    Ok(())
}

/// Returns `(D, D * values)` with `D` the lcm of the denominators.
fn scale_to_integers(values: &[Rat]) -> (BigInt, Vec<BigInt>) {
    let d = values.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let ints = values.iter().map(|v| (v * Rat::from_integer(d.clone())).to_integer()).collect();
    (d, ints)
}

/// Record of one run. Coefficients are stored scaled by a positive integer.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroingTrace {
    k: usize,
    scale: BigInt,
    history: Vec<Vec<BigInt>>,
    q1: Vec<BigInt>,
    keep_trace: bool,
    last: Vec<BigInt>,
    steps: usize,
    last_q1_positive: Option<usize>,
    termination: Termination,
    sign_q0_at_r: i8,
}

impl ZeroingTrace {
    pub fn termination(&self) -> Termination {
        self.termination
    }

    pub fn terminated_at(&self) -> Option<usize> {
        match self.termination {
            Termination::TerminatedAt(t) => Some(t),
            _ => None,
        }
    }

    pub fn sign_q0_at_r(&self) -> i8 {
        self.sign_q0_at_r
    }

    /// Number of steps actually performed.
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn has_full_history(&self) -> bool {
        self.keep_trace
    }

    fn to_poly(&self, q: &[BigInt]) -> Polynomial {
        let d = Rat::from_integer(self.scale.clone());
        Polynomial::from_descending(q.iter().map(|x| Rat::from_integer(x.clone()) / &d).collect())
    }

    /// `Q_t`, if retained.
    pub fn q_poly(&self, t: usize) -> Option<Polynomial> {
        if t == self.steps {
            return Some(self.to_poly(&self.last));
        }
        self.history.get(t).map(|q| self.to_poly(q))
    }

    /// `Q_0, Q_1, ...` as far as retained.
    pub fn polys(&self) -> Vec<Polynomial> {
        if self.keep_trace {
            self.history.iter().map(|q| self.to_poly(q)).collect()
        } else {
            let mut out = vec![self.to_poly(&self.history[0])];
            if self.steps > 0 {
                out.push(self.to_poly(&self.last));
            }
            out
        }
    }

    pub fn final_q(&self) -> Polynomial {
        self.to_poly(&self.last)
    }

    /// `q(n, t)` for `1 <= n <= k`, if `Q_t` is retained.
    pub fn q(&self, n: usize, t: usize) -> Option<Rat> {
        if n == 0 || n > self.k {
            return None;
        }
        let row = if t == self.steps { Some(&self.last) } else { self.history.get(t) };
        row.map(|q| Rat::new(q[n - 1].clone(), self.scale.clone()))
    }

    /// `q(1, t)` for every retained step.
    pub fn q1_sequence(&self) -> Vec<Rat> {
        self.q1.iter().map(|x| Rat::new(x.clone(), self.scale.clone())).collect()
    }

    /// Last step with `q(1,t) > 0` among the steps performed.
    pub fn last_q1_positive(&self) -> Option<usize> {
        self.last_q1_positive
    }

    /// First step from which `q(1,t)` stays non-positive up to the end.
    pub fn q1_nonpositive_at(&self) -> usize {
        self.last_q1_positive.map_or(0, |t| t + 1)
    }

    /// Checks that termination came within `k - 2` steps of `q(1,t)` turning
    /// non-positive for good. `None` if the run did not terminate.
    pub fn tail_bound_holds(&self) -> Option<bool> {
        let t = self.terminated_at()?;
        Some(within_tail(t, self.q1_nonpositive_at(), self.k))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DerivationResult {
    /// The derived characteristic polynomial.
    pub p: Polynomial,
    /// `p / P`
    pub quotient: Polynomial,
    /// Plain steps taken after the pinned prefix.
    pub t0: usize,
    pub k: usize,
    pub m: usize,
    /// Last plain step (counted from the end of the prefix) with `q(1,t) > 0`.
    pub last_q1_positive: Option<usize>,
    /// Present when `p` is monic and integral.
    pub derived_recurrence: Option<Recurrence>,
}

impl DerivationResult {
    pub fn tail_bound_holds(&self) -> bool {
        let first = self.last_q1_positive.map_or(0, |t| t + 1);
        within_tail(self.t0, first, self.k)
    }
}

fn within_tail(end: usize, first_nonpositive: usize, k: usize) -> bool {
    end as i64 - first_nonpositive as i64 <= k as i64 - 2
}

/// Convenience wrapper around [`Zeroing::run`].
pub fn run_zeroing(p: &Polynomial, beta: &[Rat], opts: &ZeroingOptions) -> Result<ZeroingTrace, ZeroingError> {
    Zeroing::new(p)?.run(beta, opts)
}

pub fn q1_initial_values(p: &Polynomial, beta: &[Rat]) -> Result<Vec<Rat>, ZeroingError> {
    Zeroing::new(p)?.q1_initial_values(beta)
}

pub fn run_modified(p: &Polynomial, gamma: &[Rat], budget: usize) -> Result<DerivationResult, ZeroingError> {
    Zeroing::new(p)?.run_modified(gamma, budget)
}

/// Derived PLRR of a recurrence with prefix `(1, -n)`; needs `n < r`.
pub fn derive_plrr(rec: &Recurrence, n: u64, budget: usize) -> Result<DerivationResult, ZeroingError> {
    if n == 0 {
        return Err(ZeroingError::NZero);
    }
    let z = Zeroing::from_recurrence(rec)?;
    let gamma = [Rat::one(), -Rat::from_integer(BigInt::from(n))];
    match z.run_modified(&gamma, budget) {
        Err(ZeroingError::GammaNotPositiveAtRoot) => Err(ZeroingError::NTooLarge),
        other => other,
    }
}
