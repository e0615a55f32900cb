//! JSON documents for polynomials and decompositions.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::apolarity::Form;
use crate::decomposition::{Decomposition, Term};
use crate::error::{Error, Result};
use crate::numerics::Scalar;

fn pair_of(z: Scalar) -> [f64; 2] {
    [z.re, z.im]
}

fn scalar_of(p: [f64; 2]) -> Scalar {
    Scalar::new(p[0], p[1])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonomialTerm {
    pub exp: Vec<usize>,
    pub coef: [f64; 2],
}

/// A form as a list of monomials with complex coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolynomialDocument {
    pub nvars: usize,
    pub degree: usize,
    pub terms: Vec<MonomialTerm>,
}

impl PolynomialDocument {
    /// Nonzero monomials of `f`.
    pub fn from_form(f: &Form) -> Self {
        Self {
            nvars: f.nvars(),
            degree: f.degree(),
            terms: f
                .terms()
                .filter(|(_, c)| c.norm() > 0.0)
                .map(|(exp, c)| MonomialTerm { exp, coef: pair_of(c) })
                .collect(),
        }
    }

    pub fn to_form(&self) -> Result<Form> {
        if !(2..=3).contains(&self.nvars) {
            return Err(Error::BadShape(format!(
                "documents describe forms in 2 or 3 variables, got {}",
                self.nvars
            )));
        }
        let mut seen = HashSet::new();
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            if t.exp.len() != self.nvars {
                return Err(Error::BadShape(format!(
                    "exponent {:?} does not have {} entries",
                    t.exp, self.nvars
                )));
            }
            let d: usize = t.exp.iter().sum();
            if d != self.degree {
                return Err(Error::Inhomogeneous {
                    expected: self.degree,
                    found: d,
                });
            }
            if !seen.insert(t.exp.clone()) {
                return Err(Error::BadShape(format!("repeated exponent {:?}", t.exp)));
            }
            terms.push((t.exp.clone(), scalar_of(t.coef)));
        }
        Form::from_terms(self.nvars, self.degree, &terms)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermDocument {
    pub coef: [f64; 2],
    pub linear: Vec<[f64; 2]>,
}

/// A decomposition `sum c_i l_i^d` with its residual and provenance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionDocument {
    pub terms: Vec<TermDocument>,
    pub residual: f64,
    pub provenance: String,
}

impl DecompositionDocument {
    pub fn new(d: &Decomposition, f: &Form) -> Self {
        Self {
            terms: d
                .terms
                .iter()
                .map(|t| TermDocument {
                    coef: pair_of(t.coef),
                    linear: t.linear.iter().map(|&z| pair_of(z)).collect(),
                })
                .collect(),
            residual: d.residual(f),
            provenance: d.provenance.to_string(),
        }
    }

    /// The form `sum c_i l_i^degree` described by the document.
    pub fn to_form(&self, nvars: usize, degree: usize) -> Result<Form> {
        let mut out = Form::zero(nvars, degree);
        for t in &self.terms {
            if t.linear.len() != nvars {
                return Err(Error::BadShape(format!(
                    "linear form with {} coefficients in {nvars} variables",
                    t.linear.len()
                )));
            }
            let term = Term {
                coef: scalar_of(t.coef),
                linear: t.linear.iter().map(|&p| scalar_of(p)).collect(),
            };
            out = out.axpy(term.coef, &crate::apolarity::power(&term.linear, degree));
        }
        Ok(out)
    }
}
