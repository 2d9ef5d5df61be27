//! Real polynomials in two variables and the `coeff*x^i*y^j` text syntax.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Upper limit on exponents accepted by the parser.
const MAX_EXPONENT: u32 = 64;

/// `sum a_ij x^i y^j` with real coefficients; zero terms are never stored.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BivariatePolynomial {
    terms: BTreeMap<(u32, u32), f64>,
}

impl BivariatePolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn monomial(c: f64, i: u32, j: u32) -> Self {
        let mut p = Self::zero();
        p.add_term(c, i, j);
        p
    }

    pub fn x() -> Self {
        Self::monomial(1.0, 1, 0)
    }

    pub fn y() -> Self {
        Self::monomial(1.0, 0, 1)
    }

    pub fn from_terms<I: IntoIterator<Item = (f64, u32, u32)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (c, i, j) in terms {
            p.add_term(c, i, j);
        }
        p
    }

    fn add_term(&mut self, c: f64, i: u32, j: u32) {
        let e = self.terms.entry((i, j)).or_insert(0.0);
        *e += c;
        if *e == 0.0 {
            self.terms.remove(&(i, j));
        }
    }

    /// `(i, j, coefficient)` in lexicographic order of `(i, j)`.
    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, f64)> + '_ {
        self.terms.iter().map(|(&(i, j), &c)| (i, j, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|&(i, j)| i + j).max().unwrap_or(0)
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.terms
            .iter()
            .map(|(&(i, j), &c)| c * x.powi(i as i32) * y.powi(j as i32))
            .sum()
    }

    pub fn partial_x(&self) -> Self {
        Self::from_terms(
            self.terms()
                .filter(|&(i, _, _)| i > 0)
                .map(|(i, j, c)| (c * i as f64, i - 1, j)),
        )
    }

    pub fn partial_y(&self) -> Self {
        Self::from_terms(
            self.terms()
                .filter(|&(_, j, _)| j > 0)
                .map(|(i, j, c)| (c * j as f64, i, j - 1)),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_terms(self.terms().chain(other.terms()).map(|(i, j, c)| (c, i, j)))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_terms(self.terms().map(|(i, j, c)| (c * s, i, j)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (i1, j1, c1) in self.terms() {
            for (i2, j2, c2) in other.terms() {
                out.add_term(c1 * c2, i1 + i2, j1 + j2);
            }
        }
        out
    }

    /// Parses `coeff*x^i*y^j` terms joined by `+` or `-`; a `poly:` prefix is
    /// allowed. Factors may repeat (`x*x` is `x^2`) and the coefficient may be
    /// omitted.
    pub fn parse(text: &str) -> Result<Self> {
        let body = text.trim();
        let body = body.strip_prefix("poly:").unwrap_or(body);
        let chars: Vec<char> = body.chars().filter(|c| !c.is_whitespace()).collect();
        if chars.is_empty() {
            return Err(Error::Schema("empty polynomial".into()));
        }
        let mut p = Parser { chars: &chars, pos: 0 };
        let mut out = Self::zero();
        let mut first = true;
        while p.pos < chars.len() {
            let sign = match p.peek() {
                Some('+') => {
                    p.pos += 1;
                    1.0
                }
                Some('-') => {
                    p.pos += 1;
                    -1.0
                }
                _ if first => 1.0,
                Some(c) => return Err(p.err(&format!("expected '+' or '-', found '{c}'"))),
                None => unreachable!(),
            };
            let (c, i, j) = p.term()?;
            out.add_term(sign * c, i, j);
            first = false;
        }
        Ok(out)
    }
}

struct Parser<'a> {
    chars: &'a [char],
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn err(&self, msg: &str) -> Error {
        Error::Schema(format!("polynomial, position {}: {msg}", self.pos))
    }

    fn term(&mut self) -> Result<(f64, u32, u32)> {
        let (mut c, mut i, mut j) = (1.0, 0u32, 0u32);
        loop {
            match self.peek() {
                Some('x') | Some('y') => {
                    let var = self.peek().unwrap();
                    self.pos += 1;
                    let e = if self.peek() == Some('^') {
                        self.pos += 1;
                        self.exponent()?
                    } else {
                        1
                    };
                    let slot = if var == 'x' { &mut i } else { &mut j };
                    *slot = slot
                        .checked_add(e)
                        .filter(|&v| v <= MAX_EXPONENT)
                        .ok_or_else(|| self.err("exponent too large"))?;
                }
                Some(ch) if ch.is_ascii_digit() || ch == '.' => c *= self.number()?,
                Some(ch) => return Err(self.err(&format!("unexpected '{ch}'"))),
                None => return Err(self.err("dangling sign")),
            }
            if self.peek() == Some('*') {
                self.pos += 1;
                continue;
            }
            return Ok((c, i, j));
        }
    }

    fn exponent(&mut self) -> Result<u32> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse::<u32>()
            .ok()
            .filter(|&e| e <= MAX_EXPONENT)
            .ok_or_else(|| self.err("bad exponent"))
    }

    fn number(&mut self) -> Result<f64> {
        let start = self.pos;
        while let Some(ch) = self.peek() {
            let exp_sign = (ch == '+' || ch == '-')
                && self.pos > start
                && matches!(self.chars[self.pos - 1], 'e' | 'E');
            if ch.is_ascii_digit() || ch == '.' || ch == 'e' || ch == 'E' || exp_sign {
                self.pos += 1;
            } else {
                break;
            }
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| self.err(&format!("bad number '{s}'")))
    }
}

impl fmt::Display for BivariatePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (n, (i, j, c)) in self.terms().enumerate() {
            if c < 0.0 {
                write!(f, "-")?;
            } else if n > 0 {
                write!(f, "+")?;
            }
            write!(f, "{:?}", c.abs())?;
            if i > 0 {
                write!(f, "*x^{i}")?;
            }
            if j > 0 {
                write!(f, "*y^{j}")?;
            }
        }
        Ok(())
    }
}

/// `J(p, q) = p_x q_y - q_x p_y`.
pub fn jacobian_bracket(p: &BivariatePolynomial, q: &BivariatePolynomial) -> BivariatePolynomial {
    p.partial_x()
        .mul(&q.partial_y())
        .sub(&q.partial_x().mul(&p.partial_y()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_examples() {
        let p = BivariatePolynomial::parse("poly:x^2*y+3*x").unwrap();
        assert_eq!(p, BivariatePolynomial::from_terms([(1.0, 2, 1), (3.0, 1, 0)]));
        assert_eq!(BivariatePolynomial::parse("x").unwrap(), BivariatePolynomial::x());
        assert_eq!(
            BivariatePolynomial::parse(" -2.5e-1 * y*y - x + 1 ").unwrap(),
            BivariatePolynomial::from_terms([(-0.25, 0, 2), (-1.0, 1, 0), (1.0, 0, 0)])
        );
        assert!(BivariatePolynomial::parse("x - x").unwrap().is_zero());
    }

    #[test]
    fn parse_rejects_garbage() {
        for bad in ["", "poly:", "x^", "x+", "z", "2**x", "x^999", "1e999", "x y"] {
            assert!(BivariatePolynomial::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn bracket_examples() {
        let x = BivariatePolynomial::x();
        let y = BivariatePolynomial::y();
        assert_eq!(jacobian_bracket(&x, &y), BivariatePolynomial::constant(1.0));
        let p = BivariatePolynomial::parse("x^2*y+3*x").unwrap();
        assert!(jacobian_bracket(&p, &p).is_zero());
        let x2 = BivariatePolynomial::monomial(1.0, 2, 0);
        assert_eq!(jacobian_bracket(&x2, &y), BivariatePolynomial::monomial(2.0, 1, 0));
    }

    fn small_poly() -> impl Strategy<Value = BivariatePolynomial> {
        proptest::collection::vec((-4i32..=4, 0u32..3, 0u32..3), 0..5).prop_map(|t| {
            BivariatePolynomial::from_terms(t.into_iter().map(|(c, i, j)| (c as f64, i, j)))
        })
    }

    proptest! {
        #[test]
        fn display_parse_roundtrip(p in small_poly()) {
            let back = BivariatePolynomial::parse(&p.to_string()).unwrap();
            prop_assert_eq!(back, p);
        }

        #[test]
        fn bracket_antisymmetric_and_bilinear(p in small_poly(), q in small_poly(), s in small_poly()) {
            prop_assert_eq!(jacobian_bracket(&p, &q), jacobian_bracket(&q, &p).scale(-1.0));
            prop_assert_eq!(
                jacobian_bracket(&p, &q.add(&s)),
                jacobian_bracket(&p, &q).add(&jacobian_bracket(&p, &s))
            );
        }
    }
}
