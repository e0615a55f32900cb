//! Homogeneous forms, dual operators and the apolarity calculus.
//!
//! A [`Form`] is a homogeneous polynomial in `x0, x1[, x2]` stored as plain
//! monomial coefficients in graded lexicographic order (`x0 > x1 > x2`). A
//! [`DualForm`] has the same shape but lives in the dual algebra: it acts on
//! forms as a constant coefficient differential operator, so the dual
//! variable `x^i` acts as `d/dx_i`. With this convention contraction is
//! honest differentiation and `pair(x^0^4, x0^4) = 24`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::numerics::{self, Matrix, Scalar, Tolerance, ONE, ZERO};

/// Number of monomials of degree `degree` in `nvars` variables.
pub fn monomial_count(nvars: usize, degree: usize) -> usize {
    if nvars == 0 {
        return usize::from(degree == 0);
    }
    binomial(degree + nvars - 1, nvars - 1)
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Exponent tuples of degree `degree` in graded lexicographic order with
/// `x0 > x1 > ...`: for two variables and degree 2 this is
/// `[2,0], [1,1], [0,2]`.
pub fn monomials(nvars: usize, degree: usize) -> Vec<Vec<usize>> {
    fn rec(nvars: usize, degree: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if nvars == 1 {
            prefix.push(degree);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for a in (0..=degree).rev() {
            prefix.push(a);
            rec(nvars - 1, degree - a, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::with_capacity(monomial_count(nvars, degree));
    if nvars > 0 {
        rec(nvars, degree, &mut Vec::with_capacity(nvars), &mut out);
    }
    out
}

/// Position of an exponent tuple in [`monomials`].
pub fn monomial_index(exps: &[usize]) -> usize {
    let mut remaining: usize = exps.iter().sum();
    let mut index = 0;
    let n = exps.len();
    for (i, &e) in exps.iter().enumerate().take(n.saturating_sub(1)) {
        let m = n - i;
        // monomials in m variables of degree `remaining` whose first
        // exponent exceeds e
        for a in (e + 1)..=remaining {
            index += monomial_count(m - 1, remaining - a);
        }
        remaining -= e;
    }
    index
}

/// Homogeneous polynomial with dense monomial coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Form {
    nvars: usize,
    degree: usize,
    coeffs: Vec<Scalar>,
}

impl Form {
    pub fn new(nvars: usize, degree: usize, coeffs: Vec<Scalar>) -> Result<Self> {
        if !(1..=3).contains(&nvars) {
            return Err(Error::BadShape(format!("{nvars} variables (supported: 1 to 3)")));
        }
        let expected = monomial_count(nvars, degree);
        if coeffs.len() != expected {
            return Err(Error::BadShape(format!(
                "{} coefficients for degree {degree} in {nvars} variables (expected {expected})",
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|z| !numerics::is_finite(*z)) {
            return Err(Error::DegenerateInput("non-finite coefficient".into()));
        }
        Ok(Self {
            nvars,
            degree,
            coeffs,
        })
    }

    pub fn zero(nvars: usize, degree: usize) -> Self {
        Self {
            nvars,
            degree,
            coeffs: vec![ZERO; monomial_count(nvars, degree)],
        }
    }

    pub fn monomial(exps: &[usize], coef: Scalar) -> Self {
        let degree = exps.iter().sum();
        let mut f = Self::zero(exps.len(), degree);
        f.coeffs[monomial_index(exps)] = coef;
        f
    }

    /// Linear form `sum a_i x_i`.
    pub fn linear(a: &[Scalar]) -> Self {
        Self {
            nvars: a.len(),
            degree: 1,
            coeffs: a.to_vec(),
        }
    }

    pub fn from_terms(nvars: usize, degree: usize, terms: &[(Vec<usize>, Scalar)]) -> Result<Self> {
        let mut f = Self::zero(nvars, degree);
        for (exps, coef) in terms {
            if exps.len() != nvars {
                return Err(Error::VariableMismatch {
                    expected: nvars,
                    found: exps.len(),
                });
            }
            let d: usize = exps.iter().sum();
            if d != degree {
                return Err(Error::Inhomogeneous {
                    expected: degree,
                    found: d,
                });
            }
            f.coeffs[monomial_index(exps)] += *coef;
        }
        Ok(f)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Scalar] {
        &mut self.coeffs
    }

    pub fn coeff(&self, exps: &[usize]) -> Scalar {
        debug_assert_eq!(exps.len(), self.nvars);
        debug_assert_eq!(exps.iter().sum::<usize>(), self.degree);
        self.coeffs[monomial_index(exps)]
    }

    /// `(exponents, coefficient)` pairs in graded lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = (Vec<usize>, Scalar)> + '_ {
        monomials(self.nvars, self.degree)
            .into_iter()
            .zip(self.coeffs.iter().copied())
    }

    pub fn norm(&self) -> f64 {
        numerics::norm(&self.coeffs)
    }

    pub fn is_zero(&self, eps: f64) -> bool {
        self.coeffs.iter().all(|z| z.norm() <= eps)
    }

    pub fn scale(&self, s: Scalar) -> Self {
        Self {
            nvars: self.nvars,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|z| z * s).collect(),
        }
    }

    fn check_same_space(&self, other: &Self) {
        assert_eq!(self.nvars, other.nvars, "forms in different numbers of variables");
        assert_eq!(self.degree, other.degree, "adding forms of different degrees");
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: Scalar, other: &Self) -> Self {
        self.check_same_space(other);
        Self {
            nvars: self.nvars,
            degree: self.degree,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + s * b)
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars, "forms in different numbers of variables");
        let n = self.nvars;
        let mut out = Self::zero(n, self.degree + other.degree);
        let left = monomials(n, self.degree);
        let right = monomials(n, other.degree);
        let mut e = vec![0; n];
        for (a, &ca) in left.iter().zip(&self.coeffs) {
            if ca == ZERO {
                continue;
            }
            for (b, &cb) in right.iter().zip(&other.coeffs) {
                if cb == ZERO {
                    continue;
                }
                for k in 0..n {
                    e[k] = a[k] + b[k];
                }
                out.coeffs[monomial_index(&e)] += ca * cb;
            }
        }
        out
    }

    pub fn evaluate(&self, point: &[Scalar]) -> Scalar {
        assert_eq!(point.len(), self.nvars, "evaluation point has wrong dimension");
        self.terms()
            .map(|(e, c)| {
                c * e
                    .iter()
                    .zip(point)
                    .fold(ONE, |acc, (&k, &p)| acc * p.powu(k as u32))
            })
            .sum()
    }

    /// `f(M x)`: substitute `x_i -> sum_j M[i][j] x_j`.
    pub fn substitute(&self, m: &Matrix) -> Self {
        assert_eq!(m.nrows(), self.nvars, "substitution rows must match variables");
        let n_out = m.ncols();
        let rows: Vec<Form> = (0..self.nvars)
            .map(|i| Form::linear(&m.row(i).iter().copied().collect::<Vec<_>>()))
            .collect();
        // powers[i][k] = (row_i . x)^k
        let powers: Vec<Vec<Form>> = rows
            .iter()
            .map(|r| {
                let mut p = vec![Form::monomial(&vec![0; n_out], ONE)];
                for k in 1..=self.degree {
                    let next = p[k - 1].mul(r);
                    p.push(next);
                }
                p
            })
            .collect();
        let mut out = Form::zero(n_out, self.degree);
        for (e, coef) in self.terms() {
            if coef == ZERO {
                continue;
            }
            let mut term = powers[0][e[0]].clone();
            for i in 1..self.nvars {
                term = term.mul(&powers[i][e[i]]);
            }
            out = out.axpy(coef, &term);
        }
        out
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_polynomial(f, self, "x")
    }
}

fn write_polynomial(f: &mut fmt::Formatter<'_>, p: &Form, var: &str) -> fmt::Result {
    let mut first = true;
    for (e, c) in p.terms() {
        if c == ZERO {
            continue;
        }
        if !first {
            write!(f, " + ")?;
        }
        first = false;
        if c.im == 0.0 {
            write!(f, "{}", c.re)?;
        } else {
            write!(f, "({}{:+}i)", c.re, c.im)?;
        }
        for (i, &k) in e.iter().enumerate() {
            match k {
                0 => {}
                1 => write!(f, "*{var}{i}")?,
                _ => write!(f, "*{var}{i}^{k}")?,
            }
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

impl Add for &Form {
    type Output = Form;
    fn add(self, rhs: &Form) -> Form {
        self.axpy(ONE, rhs)
    }
}

impl Sub for &Form {
    type Output = Form;
    fn sub(self, rhs: &Form) -> Form {
        self.axpy(-ONE, rhs)
    }
}

impl Neg for &Form {
    type Output = Form;
    fn neg(self) -> Form {
        self.scale(-ONE)
    }
}

impl Mul<Scalar> for &Form {
    type Output = Form;
    fn mul(self, rhs: Scalar) -> Form {
        self.scale(rhs)
    }
}

/// Element of the dual algebra, acting on forms by differentiation.
#[derive(Clone, Debug, PartialEq)]
pub struct DualForm(Form);

impl DualForm {
    pub fn new(nvars: usize, degree: usize, coeffs: Vec<Scalar>) -> Result<Self> {
        Form::new(nvars, degree, coeffs).map(Self)
    }

    pub fn from_form(f: Form) -> Self {
        Self(f)
    }

    pub fn zero(nvars: usize, degree: usize) -> Self {
        Self(Form::zero(nvars, degree))
    }

    pub fn monomial(exps: &[usize], coef: Scalar) -> Self {
        Self(Form::monomial(exps, coef))
    }

    pub fn linear(a: &[Scalar]) -> Self {
        Self(Form::linear(a))
    }

    /// Dual basis element `x^i` in `nvars` variables.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(&e, ONE)
    }

    pub fn as_form(&self) -> &Form {
        &self.0
    }

    pub fn into_form(self) -> Form {
        self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.nvars
    }

    pub fn degree(&self) -> usize {
        self.0.degree
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.0.coeffs
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn scale(&self, s: Scalar) -> Self {
        Self(self.0.scale(s))
    }

    pub fn axpy(&self, s: Scalar, other: &Self) -> Self {
        Self(self.0.axpy(s, &other.0))
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self(self.0.mul(&other.0))
    }

    pub fn pow(&self, k: usize) -> Self {
        (0..k).fold(
            Self::monomial(&vec![0; self.nvars()], ONE),
            |acc, _| acc.mul(self),
        )
    }

    /// Value of the operator viewed as a polynomial function on coordinate
    /// vectors of linear forms.
    pub fn evaluate(&self, point: &[Scalar]) -> Scalar {
        self.0.evaluate(point)
    }
}

impl fmt::Display for DualForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_polynomial(f, &self.0, "d")
    }
}

/// `l^d` for a linear form given by its coefficients.
pub fn power(l: &[Scalar], d: usize) -> Form {
    let n = l.len();
    let mons = monomials(n, d);
    let fd = factorial(d);
    let coeffs = mons
        .iter()
        .map(|e| {
            let mut c = Scalar::new(fd, 0.0);
            for (k, &ek) in e.iter().enumerate() {
                c *= l[k].powu(ek as u32) / factorial(ek);
            }
            c
        })
        .collect();
    Form {
        nvars: n,
        degree: d,
        coeffs,
    }
}

/// Contraction `s ⌟ x`: apply `s` as a differential operator to `x`.
///
/// When the operator degree exceeds the form degree the result is the zero
/// form of degree 0.
pub fn contract(s: &DualForm, x: &Form) -> Form {
    assert_eq!(s.nvars(), x.nvars, "operator and form in different numbers of variables");
    let n = x.nvars;
    if s.degree() > x.degree {
        return Form::zero(n, 0);
    }
    let out_deg = x.degree - s.degree();
    let mut out = Form::zero(n, out_deg);
    let ops = monomials(n, s.degree());
    let mons = monomials(n, x.degree);
    let mut e = vec![0; n];
    for (a, &ca) in ops.iter().zip(s.coeffs()) {
        if ca == ZERO {
            continue;
        }
        'mon: for (b, &cb) in mons.iter().zip(&x.coeffs) {
            if cb == ZERO {
                continue;
            }
            let mut w = 1.0;
            for k in 0..n {
                if b[k] < a[k] {
                    continue 'mon;
                }
                e[k] = b[k] - a[k];
                w *= factorial(b[k]) / factorial(e[k]);
            }
            out.coeffs[monomial_index(&e)] += ca * cb * w;
        }
    }
    out
}

/// Apolarity pairing of an operator and a form of the same degree.
pub fn pair(s: &DualForm, x: &Form) -> Result<Scalar> {
    if s.nvars() != x.nvars {
        return Err(Error::VariableMismatch {
            expected: x.nvars,
            found: s.nvars(),
        });
    }
    if s.degree() != x.degree {
        return Err(Error::DegreeMismatch {
            expected: x.degree,
            found: s.degree(),
        });
    }
    Ok(contract(s, x).coeffs[0])
}

/// Matrix of the partial polarization `t ↦ t ⌟ f` from degree-`source_degree`
/// operators to degree-`target_degree` forms, both in monomial bases.
#[derive(Clone, Debug, PartialEq)]
pub struct PolarizationMap {
    pub nvars: usize,
    pub source_degree: usize,
    pub target_degree: usize,
    pub matrix: Matrix,
}

impl PolarizationMap {
    pub fn apply(&self, t: &DualForm) -> Form {
        assert_eq!(t.degree(), self.source_degree);
        let v = &self.matrix * numerics::Vector::from_column_slice(t.coeffs());
        Form {
            nvars: self.nvars,
            degree: self.target_degree,
            coeffs: v.iter().copied().collect(),
        }
    }

    pub fn rank(&self, tol: &Tolerance) -> usize {
        numerics::matrix_rank(&self.matrix, tol)
    }
}

pub fn polarization(f: &Form, delta: usize) -> Result<PolarizationMap> {
    if delta > f.degree {
        return Err(Error::BadDegree {
            degree: delta,
            form_degree: f.degree,
        });
    }
    let n = f.nvars;
    let target = f.degree - delta;
    let ops = monomials(n, delta);
    let mut m = Matrix::zeros(monomial_count(n, target), ops.len());
    for (j, a) in ops.iter().enumerate() {
        let col = contract(&DualForm::monomial(a, ONE), f);
        for (i, &v) in col.coeffs.iter().enumerate() {
            m[(i, j)] = v;
        }
    }
    Ok(PolarizationMap {
        nvars: n,
        source_degree: delta,
        target_degree: target,
        matrix: m,
    })
}

/// Basis of `{ s of degree k : s ⌟ f = 0 }`.
pub fn apolar_space(f: &Form, k: usize, tol: &Tolerance) -> Result<Vec<DualForm>> {
    let map = polarization(f, k)?;
    Ok(numerics::kernel_basis(&map.matrix, tol)
        .into_iter()
        .map(|v| DualForm(Form {
            nvars: f.nvars,
            degree: k,
            coeffs: v.iter().copied().collect(),
        }))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::c;

    #[test]
    fn graded_lex_order() {
        assert_eq!(monomials(2, 2), vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        let t = monomials(3, 2);
        assert_eq!(
            t,
            vec![
                vec![2, 0, 0],
                vec![1, 1, 0],
                vec![1, 0, 1],
                vec![0, 2, 0],
                vec![0, 1, 1],
                vec![0, 0, 2]
            ]
        );
        for n in 1..=3 {
            for d in 0..=6 {
                let m = monomials(n, d);
                assert_eq!(m.len(), monomial_count(n, d));
                for (i, e) in m.iter().enumerate() {
                    assert_eq!(monomial_index(e), i);
                }
            }
        }
    }

    #[test]
    fn pairing_examples() {
        let s = DualForm::monomial(&[1, 1], ONE);
        let x = Form::monomial(&[1, 1], ONE);
        assert_eq!(pair(&s, &x).unwrap(), ONE);
        let s = DualForm::monomial(&[1, 0], ONE);
        let x = Form::monomial(&[0, 1], ONE);
        assert_eq!(pair(&s, &x).unwrap(), ZERO);
        let s = DualForm::monomial(&[4, 0, 0], ONE);
        let x = Form::monomial(&[4, 0, 0], ONE);
        assert_eq!(pair(&s, &x).unwrap(), c(24.0));
        assert!(matches!(
            pair(&DualForm::monomial(&[1, 0], ONE), &Form::monomial(&[2, 0], ONE)),
            Err(Error::DegreeMismatch { .. })
        ));
    }

    #[test]
    fn contraction_examples() {
        let g = contract(&DualForm::monomial(&[1, 0], ONE), &Form::monomial(&[4, 0], ONE));
        assert_eq!(g, Form::monomial(&[3, 0], c(4.0)));
        let g = contract(&DualForm::monomial(&[1, 1], ONE), &Form::monomial(&[1, 1], ONE));
        assert_eq!(g, Form::monomial(&[0, 0], ONE));
        let g = contract(&DualForm::monomial(&[3, 0], ONE), &Form::monomial(&[2, 0], ONE));
        assert_eq!(g, Form::zero(2, 0));
    }

    #[test]
    fn catalecticant_of_x0sq_x1sq() {
        let f = Form::monomial(&[2, 2], ONE);
        let p = polarization(&f, 2).unwrap();
        let want = Matrix::from_row_slice(
            3,
            3,
            &[ZERO, ZERO, c(2.0), ZERO, c(4.0), ZERO, c(2.0), ZERO, ZERO],
        );
        assert_eq!(p.matrix, want);
        assert!((numerics::det(&p.matrix) - c(-16.0)).norm() < 1e-12);
    }

    #[test]
    fn catalecticant_of_pure_power_has_rank_one() {
        let tol = Tolerance::default();
        let f = Form::monomial(&[4, 0], ONE);
        assert_eq!(polarization(&f, 2).unwrap().rank(&tol), 1);
        assert_eq!(numerics::kernel_basis(&polarization(&f, 2).unwrap().matrix, &tol).len(), 2);
        let z = Form::zero(3, 4);
        assert!(polarization(&z, 2).unwrap().matrix.iter().all(|v| *v == ZERO));
        assert!(matches!(polarization(&f, 5), Err(Error::BadDegree { .. })));
    }

    #[test]
    fn apolar_space_examples() {
        let tol = Tolerance::default();
        let f = &(&Form::monomial(&[4, 0, 0], ONE) + &Form::monomial(&[0, 4, 0], ONE))
            + &Form::monomial(&[0, 0, 4], ONE);
        let basis = apolar_space(&f, 3, &tol).unwrap();
        // x^0 x^1 x^2 lies in the span: its projection onto the basis is itself
        let target = DualForm::monomial(&[1, 1, 1], ONE);
        let mut proj = DualForm::zero(3, 3);
        for b in &basis {
            let ip: Scalar = b.coeffs().iter().zip(target.coeffs()).map(|(u, v)| u.conj() * v).sum();
            proj = proj.axpy(ip, b);
        }
        assert!((proj.norm() - 1.0).abs() < 1e-12);

        let p = Form::monomial(&[4, 0], ONE);
        let basis = apolar_space(&p, 1, &tol).unwrap();
        assert_eq!(basis.len(), 1);
        assert!(basis[0].coeffs()[0].norm() < 1e-12);
    }

    #[test]
    fn power_and_evaluate() {
        let l = [ONE, ONE];
        let sq = power(&l, 2);
        assert_eq!(sq.coeffs(), &[ONE, c(2.0), ONE]);
        let f = Form::monomial(&[2, 2], ONE);
        assert_eq!(f.evaluate(&[ONE, c(2.0)]), c(4.0));
        assert!((&f + &f.scale(-ONE)).is_zero(0.0));
    }

    #[test]
    fn substitution_matches_evaluation() {
        let f = Form::from_terms(
            3,
            3,
            &[(vec![2, 1, 0], c(2.0)), (vec![0, 1, 2], c(-1.0)), (vec![1, 1, 1], Scalar::new(0.5, 1.0))],
        )
        .unwrap();
        let m = Matrix::from_row_slice(
            3,
            3,
            &[c(1.0), c(2.0), ZERO, ZERO, c(1.0), c(-1.0), c(3.0), ZERO, c(1.0)],
        );
        let g = f.substitute(&m);
        let x = [c(0.3), c(-1.2), c(0.7)];
        let mx: Vec<Scalar> = (0..3).map(|i| (0..3).map(|j| m[(i, j)] * x[j]).sum()).collect();
        assert!((g.evaluate(&x) - f.evaluate(&mx)).norm() < 1e-12);
    }
}
