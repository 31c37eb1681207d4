use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{PolyError, Polynomial, Rat};

/// Parses the format produced by `Display`, plus whitespace, `*`, unparenthesised
/// rational coefficients and explicit zero terms (`x^3-0x^2-x-1`).
impl FromStr for Polynomial {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let text: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if text.is_empty() {
            return Err(PolyError::Parse("empty input".into()));
        }
        let mut coeffs: Vec<Rat> = Vec::new();
        for (negative, term) in split_terms(&text)? {
            let (c, power) = parse_term(term)?;
            if coeffs.len() <= power {
                coeffs.resize(power + 1, Rat::zero());
            }
            if negative {
                coeffs[power] -= c;
            } else {
                coeffs[power] += c;
            }
        }
        Ok(Polynomial::new(coeffs))
    }
}

fn split_terms(text: &str) -> Result<Vec<(bool, &str)>, PolyError> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let mut negative = false;
    let bytes = text.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        match b {
            b'(' => depth += 1,
            b')' => depth -= 1,
            b'+' | b'-' if depth == 0 => {
                // a sign right after '^' belongs to an exponent, which we reject later
                if i > 0 && bytes[i - 1] == b'^' {
                    continue;
                }
                if i > start {
                    out.push((negative, &text[start..i]));
                } else if i > 0 {
                    return Err(PolyError::Parse(format!("dangling sign at byte {i}")));
                }
                negative = b == b'-';
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(PolyError::Parse("unbalanced parentheses".into()));
    }
    if start >= text.len() {
        return Err(PolyError::Parse("trailing sign".into()));
    }
    out.push((negative, &text[start..]));
    Ok(out)
}

fn parse_term(term: &str) -> Result<(Rat, usize), PolyError> {
    let Some(xpos) = term.find('x') else {
        return Ok((parse_coeff(term)?, 0));
    };
    let head = term[..xpos].trim_end_matches('*');
    let coeff = if head.is_empty() {
        Rat::one()
    } else {
        parse_coeff(head)?
    };
    let tail = &term[xpos + 1..];
    let power = if tail.is_empty() {
        1
    } else if let Some(exp) = tail.strip_prefix('^') {
        exp.parse::<usize>()
            .map_err(|_| PolyError::Parse(format!("bad exponent in {term:?}")))?
    } else {
        return Err(PolyError::Parse(format!("unexpected text after x in {term:?}")));
    };
    Ok((coeff, power))
}

fn parse_coeff(s: &str) -> Result<Rat, PolyError> {
    let inner = s
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .unwrap_or(s);
    parse_rational(inner).ok_or_else(|| PolyError::Parse(format!("bad coefficient {s:?}")))
}

/// Parses `"17"`, `"-3/4"` or `"+5"` into a rational.
pub fn parse_rational(s: &str) -> Option<Rat> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num: BigInt = num.trim().parse().ok()?;
    let den: BigInt = den.trim().parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(Rat::new(num, den))
}
