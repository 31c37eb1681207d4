//! Integer linear recurrences `a_{n+1} = c_1 a_n + ... + c_L a_{n+1-L}` with
//! non-negative coefficients, classified as PLRR or s-deep ZLRR.
//!
//! Sequences are 1-based: the initial values are `a_1..a_L`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{parse_rational, Polynomial, Rat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecurrenceError {
    #[error("recurrence has no coefficients")]
    Empty,
    #[error("coefficient c_{index} is negative")]
    NegativeCoefficient { index: usize },
    #[error("last coefficient c_L must be positive")]
    TrailingZero,
    #[error("degenerate: gcd of support = {gcd}")]
    Degenerate { gcd: usize },
    #[error("expected {expected} initial values, got {got}")]
    WrongInitLength { expected: usize, got: usize },
    #[error("invalid recurrence file: {0}")]
    File(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    /// `c_1 > 0`
    Plrr,
    /// `c_1 = ... = c_depth = 0`, `c_{depth+1} > 0`, with `depth >= 1`.
    Zlrr { depth: usize },
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::Plrr => f.write_str("PLRR"),
            Classification::Zlrr { depth } => write!(f, "{depth}-deep ZLRR"),
        }
    }
}

/// A validated, non-degenerate recurrence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Recurrence {
    coeffs: Vec<BigInt>,
    depth: usize,
}

impl Recurrence {
    /// Validates `c_1..c_L`: non-negative, `c_L > 0`, and the indices of the
    /// nonzero coefficients have gcd 1.
    pub fn new(coeffs: Vec<BigInt>) -> Result<Self, RecurrenceError> {
        if coeffs.is_empty() {
            return Err(RecurrenceError::Empty);
        }
        if let Some(i) = coeffs.iter().position(Signed::is_negative) {
            return Err(RecurrenceError::NegativeCoefficient { index: i + 1 });
        }
        if coeffs.last().is_some_and(Zero::is_zero) {
            return Err(RecurrenceError::TrailingZero);
        }
        let gcd = coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .fold(0usize, |g, (i, _)| g.gcd(&(i + 1)));
        if gcd != 1 {
            return Err(RecurrenceError::Degenerate { gcd });
        }
        let depth = coeffs.iter().take_while(|c| c.is_zero()).count();
        Ok(Recurrence { coeffs, depth })
    }

    pub fn from_i64s(coeffs: &[i64]) -> Result<Self, RecurrenceError> {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// `c_1..c_L`
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// `c_i` for 1-based `i`; zero outside `1..=L`.
    pub fn coeff(&self, i: usize) -> BigInt {
        if i == 0 {
            return BigInt::zero();
        }
        self.coeffs.get(i - 1).cloned().unwrap_or_default()
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn classification(&self) -> Classification {
        if self.depth == 0 {
            Classification::Plrr
        } else {
            Classification::Zlrr { depth: self.depth }
        }
    }

    /// `x^L - c_1 x^{L-1} - ... - c_L`
    pub fn characteristic_polynomial(&self) -> Polynomial {
        let l = self.order();
        let mut coeffs = vec![Rat::zero(); l + 1];
        coeffs[l] = Rat::from_integer(1.into());
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[l - 1 - i] = Rat::from_integer(-c);
        }
        Polynomial::new(coeffs)
    }

    /// Reads `c_i = -[x^{k-i}]p` from a monic integer polynomial of the right shape.
    pub fn from_characteristic(p: &Polynomial) -> Result<Self, RecurrenceError> {
        let k = p.degree().filter(|&k| k >= 1).ok_or(RecurrenceError::Empty)?;
        if !p.is_monic() {
            return Err(RecurrenceError::File("characteristic polynomial must be monic".into()));
        }
        let ints = p
            .to_integers()
            .ok_or_else(|| RecurrenceError::File("characteristic polynomial must be integral".into()))?;
        Self::new((1..=k).map(|i| -&ints[k - i]).collect())
    }

    /// Terms `a_1..a_n` starting from `init = (a_1..a_L)`.
    pub fn iterate_terms(&self, init: &[Rat], n: usize) -> Result<SequenceWindow, RecurrenceError> {
        let l = self.order();
        if init.len() != l {
            return Err(RecurrenceError::WrongInitLength { expected: l, got: init.len() });
        }
        let coeffs: Vec<Rat> = self.coeffs.iter().map(|c| Rat::from_integer(c.clone())).collect();
        let mut terms: Vec<Rat> = init.to_vec();
        while terms.len() < n {
            let len = terms.len();
            let next = coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .fold(Rat::zero(), |acc, (i, c)| acc + c * &terms[len - 1 - i]);
            terms.push(next);
        }
        terms.truncate(n);
        Ok(SequenceWindow { start_index: 1, terms })
    }

    /// Renders the relation with the given sequence symbol, e.g.
    /// `H_{n+1}=H_n+H_{n-4}`.
    pub fn relation_string(&self, symbol: &str) -> String {
        let mut out = format!("{symbol}_{{n+1}}=");
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                out.push('+');
            }
            first = false;
            if *c != BigInt::from(1) {
                out.push_str(&c.to_string());
            }
            if i == 0 {
                out.push_str(&format!("{symbol}_n"));
            } else {
                out.push_str(&format!("{symbol}_{{n-{i}}}"));
            }
        }
        out
    }
}

/// A contiguous run of sequence terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceWindow {
    pub start_index: usize,
    pub terms: Vec<Rat>,
}

/// JSON recurrence file: `{"coefficients": ["0","2","1"], "initial": ["3","-2","1"]}`.
///
/// Coefficients may be JSON integers or decimal strings; initial values may
/// also be rationals written `"p/q"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceFile {
    pub coefficients: Vec<NumberText>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<Vec<NumberText>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumberText {
    Int(i64),
    Text(String),
}

impl NumberText {
    fn as_text(&self) -> String {
        match self {
            NumberText::Int(i) => i.to_string(),
            NumberText::Text(s) => s.trim().to_string(),
        }
    }
}

impl RecurrenceFile {
    pub fn parse(json: &str) -> Result<Self, RecurrenceError> {
        serde_json::from_str(json).map_err(|e| RecurrenceError::File(e.to_string()))
    }

    /// Coefficients as integers, before any recurrence validation.
    pub fn raw_coefficients(&self) -> Result<Vec<BigInt>, RecurrenceError> {
        self.coefficients
            .iter()
            .map(|c| {
                let t = c.as_text();
                t.parse::<BigInt>()
                    .map_err(|_| RecurrenceError::File(format!("coefficient {t:?} is not an integer")))
            })
            .collect()
    }

    pub fn recurrence(&self) -> Result<Recurrence, RecurrenceError> {
        Recurrence::new(self.raw_coefficients()?)
    }

    pub fn initial_values(&self) -> Result<Option<Vec<Rat>>, RecurrenceError> {
        let Some(init) = &self.initial else {
            return Ok(None);
        };
        init.iter()
            .map(|v| {
                let t = v.as_text();
                parse_rational(&t)
                    .ok_or_else(|| RecurrenceError::File(format!("initial value {t:?} is not a rational")))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }

    pub fn from_recurrence(rec: &Recurrence, initial: Option<&[Rat]>) -> Self {
        RecurrenceFile {
            coefficients: rec.coeffs.iter().map(|c| NumberText::Text(c.to_string())).collect(),
            initial: initial.map(|v| v.iter().map(|x| NumberText::Text(x.to_string())).collect()),
        }
    }
}
