//! Polynomial input parsing.
//!
//! Two syntaxes are accepted: a comma-separated coefficient list
//! `a0,a1,...,ad` (the canonical machine form, low degree first) and an
//! expression like `5x^5+10x^4-5x^2-4x+1`. Whitespace is ignored, repeated
//! exponents are summed, an omitted coefficient means 1, and an omitted
//! exponent on `x` means 1.

use std::fmt;

use zpmin_core::arith::BigInt;
use zpmin_core::IntPoly;

const MAX_EXPONENT: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    msg: String,
}

impl ParseError {
    fn new(msg: impl Into<String>) -> Self {
        ParseError { msg: msg.into() }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid polynomial: {}", self.msg)
    }
}

impl std::error::Error for ParseError {}

pub fn parse_poly(text: &str) -> Result<IntPoly, ParseError> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(ParseError::new("empty input"));
    }
    if s.contains(',') {
        parse_coeff_list(&s)
    } else if s.contains('x') {
        parse_expression(&s)
    } else {
        let c: BigInt = s
            .parse()
            .map_err(|_| ParseError::new(format!("`{s}` is not an integer")))?;
        Ok(IntPoly::new(vec![c]))
    }
}

fn parse_coeff_list(s: &str) -> Result<IntPoly, ParseError> {
    let coeffs: Vec<BigInt> = s
        .split(',')
        .map(|part| {
            part.parse()
                .map_err(|_| ParseError::new(format!("`{part}` is not an integer coefficient")))
        })
        .collect::<Result<_, _>>()?;
    Ok(IntPoly::new(coeffs))
}

fn parse_expression(s: &str) -> Result<IntPoly, ParseError> {
    let bytes = s.as_bytes();
    let mut i = 0;
    let mut coeffs: Vec<BigInt> = Vec::new();
    let mut first_term = true;
    while i < bytes.len() {
        let negative = match bytes[i] {
            b'+' => {
                i += 1;
                false
            }
            b'-' => {
                i += 1;
                true
            }
            _ if first_term => false,
            c => {
                return Err(ParseError::new(format!(
                    "expected `+` or `-` before `{}`",
                    c as char
                )))
            }
        };
        first_term = false;

        let digit_start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        let digits = &s[digit_start..i];

        let (coeff, exponent) = if i < bytes.len() && bytes[i] == b'x' {
            i += 1;
            let exponent = if i < bytes.len() && bytes[i] == b'^' {
                i += 1;
                let exp_start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if exp_start == i {
                    return Err(ParseError::new(
                        "`^` must be followed by a positive integer",
                    ));
                }
                let e: usize = s[exp_start..i]
                    .parse()
                    .map_err(|_| ParseError::new("exponent out of range"))?;
                if e > MAX_EXPONENT {
                    return Err(ParseError::new(format!("exponent exceeds {MAX_EXPONENT}")));
                }
                e
            } else {
                1
            };
            let coeff: BigInt = if digits.is_empty() {
                BigInt::from(1)
            } else {
                digits.parse().expect("digits form a valid integer")
            };
            (coeff, exponent)
        } else {
            if digits.is_empty() {
                return Err(ParseError::new(format!(
                    "dangling term at position {i}; expected a coefficient or `x`"
                )));
            }
            (digits.parse().expect("digits form a valid integer"), 0)
        };

        if coeffs.len() <= exponent {
            coeffs.resize(exponent + 1, BigInt::from(0));
        }
        if negative {
            coeffs[exponent] -= coeff;
        } else {
            coeffs[exponent] += coeff;
        }
    }
    Ok(IntPoly::new(coeffs))
}
