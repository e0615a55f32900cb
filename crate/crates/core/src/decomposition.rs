//! Power sum decompositions `f = sum c_i l_i^d`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::apolarity::{power, Form};
use crate::numerics::{self, Matrix, Scalar, Tolerance, Vector, ONE, ZERO};

/// Which construction produced a decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Provenance {
    /// Sylvester decomposition of a binary form.
    Binary,
    /// Two apolar lines: `x^0 x^1 ⌟ f = 0`.
    Wu,
    /// Three independent apolar lines.
    Gener,
    /// Three dependent, pairwise independent apolar lines.
    Spe,
    /// An apolar squared line: `l^2 ⌟ f = 0`.
    Fine,
    /// A ternary form that only involves two variables.
    BinaryFallback,
    /// Numerical low-rank fit (not a constructive certificate).
    Fit,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Binary => "BINARY",
            Self::Wu => "WU",
            Self::Gener => "GENER",
            Self::Spe => "SPE",
            Self::Fine => "FINE",
            Self::BinaryFallback => "BINARY_FALLBACK",
            Self::Fit => "FIT",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub coef: Scalar,
    /// Coefficients of the linear form `l = sum linear[i] x_i`.
    pub linear: Vec<Scalar>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub nvars: usize,
    pub degree: usize,
    pub terms: Vec<Term>,
    pub provenance: Provenance,
}

impl Decomposition {
    pub fn empty(nvars: usize, degree: usize, provenance: Provenance) -> Self {
        Self {
            nvars,
            degree,
            terms: Vec::new(),
            provenance,
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The form `sum c_i l_i^d`.
    pub fn form(&self) -> Form {
        self.terms.iter().fold(Form::zero(self.nvars, self.degree), |acc, t| {
            acc.axpy(t.coef, &power(&t.linear, self.degree))
        })
    }

    /// `|sum c_i l_i^d - f| / |f|` in the monomial coefficient norm.
    pub fn residual(&self, f: &Form) -> f64 {
        let diff = &self.form() - f;
        let n = f.norm();
        if n > 0.0 {
            diff.norm() / n
        } else {
            diff.norm()
        }
    }

    /// Replace every linear form `l` by `t l` (coefficient vectors as
    /// columns). `t` may change the number of variables.
    pub fn map_linear(&self, t: &Matrix) -> Self {
        assert_eq!(t.ncols(), self.nvars, "linear map has wrong source dimension");
        Self {
            nvars: t.nrows(),
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .map(|term| {
                    let v = t * Vector::from_column_slice(&term.linear);
                    Term {
                        coef: term.coef,
                        linear: v.iter().copied().collect(),
                    }
                })
                .collect(),
            provenance: self.provenance,
        }
    }

    pub fn extend(&mut self, other: Decomposition) {
        assert_eq!(self.nvars, other.nvars);
        assert_eq!(self.degree, other.degree);
        self.terms.extend(other.terms);
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    /// Re-solve the coefficients `c_i` for fixed linear forms by least
    /// squares against `f`, dropping terms whose coefficient vanishes.
    pub fn refit(&mut self, f: &Form, tol: &Tolerance) {
        if self.terms.is_empty() {
            return;
        }
        let cols: Vec<Form> = self
            .terms
            .iter()
            .map(|t| power(&t.linear, self.degree))
            .collect();
        let mut a = Matrix::zeros(f.coeffs().len(), cols.len());
        for (j, col) in cols.iter().enumerate() {
            for (i, &v) in col.coeffs().iter().enumerate() {
                a[(i, j)] = v;
            }
        }
        let b = Vector::from_column_slice(f.coeffs());
        let (x, _) = numerics::least_squares(&a, &b, tol);
        let before = self.residual(f);
        let mut candidate = self.clone();
        for (t, &cx) in candidate.terms.iter_mut().zip(x.iter()) {
            t.coef = cx;
        }
        let scale = f.norm().max(f64::MIN_POSITIVE);
        candidate.terms.retain(|t| {
            let w = t.coef.norm() * numerics::norm(&t.linear).powi(self.degree as i32);
            w > tol.zero_eps * scale
        });
        if candidate.residual(f) <= before.max(tol.zero_eps) {
            *self = candidate;
        }
    }

    /// Scale each linear form to unit norm with its largest entry real and
    /// positive, move the scale into the coefficient, and sort terms by
    /// decreasing coefficient magnitude.
    pub fn normalize(&mut self) {
        let d = self.degree as i32;
        for t in self.terms.iter_mut() {
            let n = numerics::norm(&t.linear);
            if n == 0.0 {
                t.coef = ZERO;
                continue;
            }
            let big = t
                .linear
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            let pivot = t
                .linear
                .iter()
                .find(|z| z.norm() >= big * (1.0 - 1e-9))
                .copied()
                .unwrap_or(ONE);
            let phase = pivot / pivot.norm();
            let s = phase * n;
            for z in t.linear.iter_mut() {
                *z /= s;
            }
            t.coef *= s.powi(d);
        }
        self.terms.retain(|t| t.coef != ZERO);
        self.terms.sort_by(|a, b| {
            b.coef
                .norm()
                .partial_cmp(&a.coef.norm())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
    }
}

impl fmt::Display for Decomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, t) in self.terms.iter().enumerate() {
            write!(f, "{:>3}  c = {:+.6e}{:+.6e}i   l = (", k, t.coef.re, t.coef.im)?;
            for (i, z) in t.linear.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{:+.6}{:+.6}i", z.re, z.im)?;
            }
            writeln!(f, ")")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::c;

    #[test]
    fn normalize_preserves_the_form() {
        let mut d = Decomposition {
            nvars: 3,
            degree: 4,
            terms: vec![
                Term { coef: c(2.0), linear: vec![c(1.0), Scalar::new(0.0, 2.0), c(-1.0)] },
                Term { coef: Scalar::new(0.0, 1.0), linear: vec![c(3.0), c(0.0), c(1.0)] },
            ],
            provenance: Provenance::Gener,
        };
        let before = d.form();
        d.normalize();
        assert!((&d.form() - &before).norm() < 1e-10 * before.norm());
        for t in &d.terms {
            assert!((numerics::norm(&t.linear) - 1.0).abs() < 1e-12);
        }
        assert!(d.terms[0].coef.norm() >= d.terms[1].coef.norm());
    }

    #[test]
    fn refit_drops_useless_terms() {
        let f = power(&[c(1.0), c(1.0)], 4);
        let mut d = Decomposition {
            nvars: 2,
            degree: 4,
            terms: vec![
                Term { coef: c(0.5), linear: vec![c(1.0), c(1.0)] },
                Term { coef: c(0.1), linear: vec![c(1.0), c(-1.0)] },
            ],
            provenance: Provenance::Binary,
        };
        d.refit(&f, &Tolerance::default());
        assert_eq!(d.len(), 1);
        assert!(d.residual(&f) < 1e-12);
    }
}
