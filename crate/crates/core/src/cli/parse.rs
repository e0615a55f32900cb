//! Text and JSON input of polynomials.
//!
//! Text grammar: a signed sum of terms; a term is a product of constants
//! and powers `xK^E` joined by optional `*`. Constants are real numbers,
//! imaginary numbers `2.5i`, or parenthesized complex numbers `(1-2i)`.

use crate::apolarity::{monomial_index, Form};
use crate::error::{Error, Result};
use crate::numerics::{Scalar, ONE, ZERO};

use super::document::PolynomialDocument;

/// Parse a polynomial given as text or as a JSON polynomial document.
pub fn parse_polynomial(text: &str) -> Result<Form> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let doc: PolynomialDocument = serde_json::from_str(trimmed).map_err(|e| Error::Parse {
            position: text.len() - trimmed.len() + e.column().saturating_sub(1),
            message: e.to_string(),
        })?;
        return doc.to_form();
    }
    let terms = Parser::new(text).expression()?;
    let nvars = terms
        .iter()
        .flat_map(|(e, _)| e.iter().enumerate().filter(|(_, &k)| k > 0).map(|(i, _)| i + 1))
        .max()
        .unwrap_or(0)
        .max(2);
    let degree = terms[0].0.iter().sum::<usize>();
    let mut f = Form::zero(nvars, degree);
    for (mut e, c) in terms {
        let d: usize = e.iter().sum();
        if d != degree {
            return Err(Error::Inhomogeneous {
                expected: degree,
                found: d,
            });
        }
        e.resize(nvars, 0);
        f.coeffs_mut()[monomial_index(&e)] += c;
    }
    Ok(f)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

type Term = (Vec<usize>, Scalar);

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            src: text.as_bytes(),
            pos: 0,
        }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            position: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn sign(&mut self) -> Option<f64> {
        match self.peek() {
            Some(b'+') => {
                self.pos += 1;
                Some(1.0)
            }
            Some(b'-') => {
                self.pos += 1;
                Some(-1.0)
            }
            _ => None,
        }
    }

    fn expression(&mut self) -> Result<Vec<Term>> {
        let mut terms = Vec::new();
        let mut s = self.sign().unwrap_or(1.0);
        loop {
            let (e, c) = self.term()?;
            terms.push((e, c * s));
            match self.sign() {
                Some(next) => s = next,
                None => break,
            }
        }
        if self.peek().is_some() {
            return self.err("unexpected character");
        }
        Ok(terms)
    }

    fn term(&mut self) -> Result<Term> {
        let mut exps: Vec<usize> = Vec::new();
        let mut coef = ONE;
        // a leading sign on the first factor, as in `+ -2*x0`
        if let Some(s) = self.sign() {
            coef *= s;
        }
        let mut factors = 0;
        loop {
            match self.peek() {
                Some(b'x') => {
                    let (var, k) = self.power()?;
                    if exps.len() <= var {
                        exps.resize(var + 1, 0);
                    }
                    exps[var] += k;
                }
                Some(b'(') => coef *= self.complex()?,
                Some(c) if c.is_ascii_digit() || c == b'.' => coef *= self.real_or_imaginary()?,
                Some(b'i') => {
                    self.pos += 1;
                    coef *= Scalar::new(0.0, 1.0);
                }
                _ => {
                    if factors == 0 {
                        return self.err("expected a term");
                    }
                    break;
                }
            }
            factors += 1;
            if self.peek() == Some(b'*') {
                self.pos += 1;
                if !matches!(self.peek(), Some(b'x' | b'(' | b'i' | b'.' | b'0'..=b'9')) {
                    return self.err("expected a factor after '*'");
                }
            }
        }
        Ok((exps, coef))
    }

    fn digits(&mut self) -> Option<usize> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).ok()?.parse().ok()
    }

    fn power(&mut self) -> Result<(usize, usize)> {
        self.pos += 1; // 'x'
        let Some(var) = self.digits() else {
            return self.err("expected a variable index after 'x'");
        };
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            match self.digits() {
                Some(k) => Ok((var, k)),
                None => self.err("expected an exponent after '^'"),
            }
        } else {
            Ok((var, 1))
        }
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        let s = self.src;
        while self.pos < s.len() && (s[self.pos].is_ascii_digit() || s[self.pos] == b'.') {
            self.pos += 1;
        }
        if self.pos < s.len() && (s[self.pos] == b'e' || s[self.pos] == b'E') {
            let save = self.pos;
            self.pos += 1;
            if self.pos < s.len() && (s[self.pos] == b'+' || s[self.pos] == b'-') {
                self.pos += 1;
            }
            if self.pos < s.len() && s[self.pos].is_ascii_digit() {
                while self.pos < s.len() && s[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            } else {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&s[start..self.pos]).expect("ascii");
        text.parse::<f64>().or_else(|_| {
            self.pos = start;
            self.err(format!("invalid number '{text}'"))
        })
    }

    /// A number, imaginary when followed by `i`.
    fn real_or_imaginary(&mut self) -> Result<Scalar> {
        let v = self.number()?;
        if self.src.get(self.pos) == Some(&b'i') {
            self.pos += 1;
            Ok(Scalar::new(0.0, v))
        } else {
            Ok(Scalar::new(v, 0.0))
        }
    }

    /// `( [sign] part (sign part)* )` with parts `2`, `2i`, `2 i` or `i`.
    fn complex(&mut self) -> Result<Scalar> {
        self.pos += 1; // '('
        let mut z = ZERO;
        let mut s = self.sign().unwrap_or(1.0);
        loop {
            let part = match self.peek() {
                Some(b'i') => {
                    self.pos += 1;
                    Scalar::new(0.0, 1.0)
                }
                Some(c) if c.is_ascii_digit() || c == b'.' => {
                    let v = self.number()?;
                    if self.peek() == Some(b'i') {
                        self.pos += 1;
                        Scalar::new(0.0, v)
                    } else {
                        Scalar::new(v, 0.0)
                    }
                }
                _ => return self.err("expected a number in complex constant"),
            };
            z += part * s;
            match self.sign() {
                Some(next) => s = next,
                None => break,
            }
        }
        if self.peek() != Some(b')') {
            return self.err("expected ')'");
        }
        self.pos += 1;
        Ok(z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::c;

    #[test]
    fn fermat_quartic() {
        let f = parse_polynomial("x0^4 + x1^4 + x2^4").unwrap();
        assert_eq!((f.nvars(), f.degree()), (3, 4));
        assert_eq!(f.coeff(&[0, 4, 0]), ONE);
        assert!((f.norm() - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn binary_with_implicit_product() {
        let f = parse_polynomial("x0^2*x1^2 - 2x0^3*x1").unwrap();
        assert_eq!(f.nvars(), 2);
        assert_eq!(f.coeff(&[2, 2]), ONE);
        assert_eq!(f.coeff(&[3, 1]), c(-2.0));
    }

    #[test]
    fn inhomogeneous_input_is_rejected() {
        assert!(matches!(
            parse_polynomial("x0^3 + x1^4"),
            Err(Error::Inhomogeneous { expected: 3, found: 4 })
        ));
    }

    #[test]
    fn complex_constants() {
        let f = parse_polynomial("(1+2i)*x0^2 + (0.5 - 1.5 i) x0 x1 - 3i x1^2").unwrap();
        assert_eq!(f.coeff(&[2, 0]), Scalar::new(1.0, 2.0));
        assert_eq!(f.coeff(&[1, 1]), Scalar::new(0.5, -1.5));
        assert_eq!(f.coeff(&[0, 2]), Scalar::new(0.0, -3.0));
    }

    #[test]
    fn display_output_parses_back() {
        let f = parse_polynomial("-2.5*x0^3*x2 + (1e-3-4i)*x1^4 + x0*x1*x2^2").unwrap();
        let g = parse_polynomial(&f.to_string()).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn errors_carry_positions() {
        match parse_polynomial("x0^4 + * x1^4") {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 7),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_polynomial(""), Err(Error::Parse { .. })));
        assert!(matches!(parse_polynomial("x0^"), Err(Error::Parse { .. })));
        assert!(matches!(parse_polynomial("(1+2i x0"), Err(Error::Parse { .. })));
    }
}
