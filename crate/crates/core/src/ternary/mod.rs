//! Decompositions of ternary quartics with at most seven terms.
//!
//! The entry point [`waring_decompose`] finds three linear operators whose
//! product annihilates `f`, splits `f` into binary quartics accordingly and
//! decomposes the pieces. Which construction applies depends on how the
//! three operators sit relative to each other:
//!
//! * [`decompose_general`]: linearly independent operators,
//! * [`decompose_special`]: dependent but pairwise independent operators,
//! * [`decompose_two_lines`]: two operators whose product already kills `f`,
//! * [`decompose_square`]: an operator whose square kills `f`.

mod general;
mod special;
mod split;
mod splitter;
mod square;
mod wu;

pub use general::decompose_general;
pub use special::decompose_special;
pub use split::{find_apolar_product, Dependency, SplitCubic};
pub use splitter::{build_splitter, SplitterKind, SplitterSystem};
pub use square::decompose_square;
pub use wu::decompose_two_lines;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::apolarity::{contract, polarization, DualForm, Form};
use crate::binary::binary_decompose;
use crate::decomposition::{Decomposition, Provenance};
use crate::error::{Error, Result};
use crate::numerics::{self, Matrix, Scalar, Tolerance, ZERO};

/// Extra attempts under random coordinate changes after the first failure.
pub const RETRY_BUDGET: usize = 5;

/// Maximal number of terms the constructions may produce.
pub const MAX_TERMS: usize = 7;

const MAX_DEPTH: usize = 8;

pub(crate) type Vec3 = [Scalar; 3];

/// Shared state of one decomposition attempt: tolerances, randomness and
/// the recursion depth of the case analysis.
pub(crate) struct Ctx<'a> {
    pub tol: &'a Tolerance,
    pub rng: ChaCha8Rng,
    depth: usize,
}

impl<'a> Ctx<'a> {
    pub fn new(tol: &'a Tolerance, seed: u64) -> Self {
        Self {
            tol,
            rng: ChaCha8Rng::seed_from_u64(seed),
            depth: 0,
        }
    }

    pub fn gaussian(&mut self) -> Scalar {
        let re: f64 = StandardNormal.sample(&mut self.rng);
        let im: f64 = StandardNormal.sample(&mut self.rng);
        Scalar::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }

    pub fn unit_vector(&mut self) -> Vec3 {
        loop {
            let v = [self.gaussian(), self.gaussian(), self.gaussian()];
            let n = vnorm(&v);
            if n > 1e-3 {
                return scale3(&v, Scalar::new(1.0 / n, 0.0));
            }
        }
    }

    /// Run a nested step of the case analysis, failing once the recursion
    /// gets too deep.
    pub fn nested<T>(&mut self, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        if self.depth >= MAX_DEPTH {
            return Err(Error::CaseAnalysisExhausted("recursion depth exceeded".into()));
        }
        self.depth += 1;
        let out = f(self);
        self.depth -= 1;
        out
    }
}

pub(crate) fn vnorm(v: &[Scalar]) -> f64 {
    numerics::norm(v)
}

pub(crate) fn scale3(v: &Vec3, s: Scalar) -> Vec3 {
    [v[0] * s, v[1] * s, v[2] * s]
}

pub(crate) fn add3(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub(crate) fn sub3(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn unit3(v: &Vec3) -> Vec3 {
    scale3(v, Scalar::new(1.0 / vnorm(v), 0.0))
}

/// Bilinear (not Hermitian) cross product: orthogonal to both inputs under
/// the pairing `a . x = sum a_i x_i`.
pub(crate) fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn conj3(v: &Vec3) -> Vec3 {
    [v[0].conj(), v[1].conj(), v[2].conj()]
}

/// Sine of the Hermitian angle between two nonzero vectors.
pub(crate) fn sin_angle(a: &Vec3, b: &Vec3) -> f64 {
    let (ua, ub) = (unit3(a), unit3(b));
    let ip: Scalar = ua.iter().zip(ub.iter()).map(|(x, y)| x.conj() * y).sum();
    (1.0 - ip.norm_sqr()).max(0.0).sqrt()
}

/// `|det|` of three vectors after scaling each to unit norm.
pub(crate) fn normalized_det(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    numerics::det(&rows(&[unit3(a), unit3(b), unit3(c)])).norm()
}

pub(crate) fn rows(v: &[Vec3]) -> Matrix {
    let mut m = Matrix::zeros(v.len(), 3);
    for (i, r) in v.iter().enumerate() {
        for j in 0..3 {
            m[(i, j)] = r[j];
        }
    }
    m
}

pub(crate) fn column(m: &Matrix, j: usize) -> Vec3 {
    [m[(0, j)], m[(1, j)], m[(2, j)]]
}

pub(crate) fn row(m: &Matrix, i: usize) -> Vec3 {
    [m[(i, 0)], m[(i, 1)], m[(i, 2)]]
}

/// Coefficient vector of a linear operator in three variables.
pub(crate) fn op_vector(d: &DualForm) -> Result<Vec3> {
    if d.nvars() != 3 || d.degree() != 1 {
        return Err(Error::BadShape(format!(
            "expected a linear operator in 3 variables, got degree {} in {} variables",
            d.degree(),
            d.nvars()
        )));
    }
    let c = d.coeffs();
    Ok([c[0], c[1], c[2]])
}

pub(crate) fn check_ternary_quartic(f: &Form) -> Result<()> {
    if f.nvars() != 3 {
        return Err(Error::VariableMismatch {
            expected: 3,
            found: f.nvars(),
        });
    }
    if f.degree() != 4 {
        return Err(Error::DegreeMismatch {
            expected: 4,
            found: f.degree(),
        });
    }
    Ok(())
}

fn falling(d: usize, k: usize) -> f64 {
    ((d - k + 1)..=d).map(|v| v as f64).product()
}

/// Whether `op ⌟ f` vanishes relative to the sizes of `op` and `f`.
pub(crate) fn annihilates(op: &DualForm, f: &Form, tol: &Tolerance) -> bool {
    if op.degree() > f.degree() {
        return true;
    }
    let r = contract(op, f).norm();
    r <= tol.rank_eps * op.norm() * f.norm() * falling(f.degree(), op.degree())
}

/// Relative size of `op ⌟ f`.
pub(crate) fn contraction_residual(op: &DualForm, f: &Form) -> f64 {
    let denom = op.norm() * f.norm() * falling(f.degree(), op.degree());
    if denom == 0.0 {
        return 0.0;
    }
    contract(op, f).norm() / denom
}

/// A basis of `S_1` given by linear operators `rows(ops)` and the dual
/// linear forms `columns(basis)`, with `ops * basis = I`.
#[derive(Clone, Debug)]
pub(crate) struct Frame {
    pub ops: Matrix,
    pub basis: Matrix,
}

impl Frame {
    pub fn from_ops(ops: Matrix) -> Result<Self> {
        let sv = numerics::singular_values(&ops);
        if sv[2] <= 1e-9 * sv[0] {
            return Err(Error::DegenerateInput("operators do not form a basis".into()));
        }
        let basis = ops
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::DegenerateInput("singular frame".into()))?;
        Ok(Self { ops, basis })
    }

    pub fn from_basis(basis: Matrix) -> Result<Self> {
        let sv = numerics::singular_values(&basis);
        if sv[2] <= 1e-9 * sv[0] {
            return Err(Error::DegenerateInput("linear forms do not form a basis".into()));
        }
        let ops = basis
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::DegenerateInput("singular frame".into()))?;
        Ok(Self { ops, basis })
    }

    /// `f` written as a polynomial in the frame's linear forms.
    pub fn express(&self, f: &Form) -> Form {
        f.substitute(&self.ops.transpose())
    }

    pub fn op(&self, i: usize) -> Vec3 {
        row(&self.ops, i)
    }

    pub fn form(&self, j: usize) -> Vec3 {
        column(&self.basis, j)
    }

    /// 3x2 matrix sending binary coordinates `(s, t)` of the span of two
    /// frame forms (given in frame coordinates) to original coefficients.
    pub fn lift(&self, s: &Vec3, t: &Vec3) -> Matrix {
        let sv = &self.basis * numerics::Vector::from_column_slice(s);
        let tv = &self.basis * numerics::Vector::from_column_slice(t);
        let mut m = Matrix::zeros(3, 2);
        for i in 0..3 {
            m[(i, 0)] = sv[i];
            m[(i, 1)] = tv[i];
        }
        m
    }
}

pub(crate) fn unit(i: usize) -> Vec3 {
    let mut v = [ZERO; 3];
    v[i] = Scalar::new(1.0, 0.0);
    v
}

/// Binary quartic in `(s, t)` collecting the terms of a ternary form `g`
/// that avoid variable `skip`; `s` and `t` are the remaining variables in
/// increasing order.
pub(crate) fn binary_part(g: &Form, skip: usize) -> Form {
    let d = g.degree();
    let mut out = Form::zero(2, d);
    let (j, k) = other_two(skip);
    for (e, c) in g.terms() {
        if e[skip] == 0 {
            let idx = crate::apolarity::monomial_index(&[e[j], e[k]]);
            out.coeffs_mut()[idx] = c;
        }
    }
    out
}

pub(crate) fn other_two(i: usize) -> (usize, usize) {
    match i {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

/// Decompose a binary piece and lift it to the ternary setting; pieces that
/// vanish contribute nothing.
pub(crate) fn lift_piece(g: &Form, lift: &Matrix, scale: f64, tol: &Tolerance) -> Result<Decomposition> {
    if g.norm() <= tol.zero_eps * scale.max(1.0) {
        return Ok(Decomposition::empty(3, g.degree(), Provenance::Binary));
    }
    Ok(binary_decompose(g, tol)?.map_linear(lift))
}

/// Combine pieces, refit the coefficients against `f` and normalize.
pub(crate) fn assemble(
    f: &Form,
    pieces: Vec<Decomposition>,
    provenance: Provenance,
    tol: &Tolerance,
) -> Decomposition {
    let mut out = Decomposition::empty(3, f.degree(), provenance);
    for p in pieces {
        out.extend(p);
    }
    out.refit(f, tol);
    out.normalize();
    out
}

/// Decomposition of a ternary form that only depends on two linear forms,
/// or `None` when `f` genuinely involves three variables.
pub(crate) fn effectively_binary(f: &Form, tol: &Tolerance) -> Result<Option<Decomposition>> {
    let map = polarization(f, 1)?;
    let kernel = numerics::kernel_basis(&map.matrix, tol);
    let Some(e) = kernel.first() else {
        return Ok(None);
    };
    let e: Vec3 = [e[0], e[1], e[2]];
    // complete e to a basis with two coordinate operators
    let m = (0..3)
        .max_by(|&a, &b| e[a].norm().partial_cmp(&e[b].norm()).unwrap())
        .unwrap();
    let (i, j) = other_two(m);
    let frame = Frame::from_ops(rows(&[unit(i), unit(j), e]))?;
    let g = frame.express(f);
    let piece = binary_part(&g, 2);
    let lift = frame.lift(&unit(0), &unit(1));
    let d = binary_decompose(&piece, tol)?.map_linear(&lift);
    let d = assemble(f, vec![d], Provenance::BinaryFallback, tol);
    if d.residual(f) > tol.residual_eps {
        return Ok(None);
    }
    Ok(Some(d))
}

fn random_change(ctx: &mut Ctx) -> Matrix {
    loop {
        let mut m = Matrix::zeros(3, 3);
        for i in 0..3 {
            for j in 0..3 {
                m[(i, j)] = ctx.gaussian();
            }
        }
        let sv = numerics::singular_values(&m);
        if sv[2] > 0.2 * sv[0] {
            return m;
        }
    }
}

/// One pass of the case analysis, without coordinate changes.
fn decompose_once(f: &Form, ctx: &mut Ctx) -> Result<Decomposition> {
    if let Some(d) = effectively_binary(f, ctx.tol)? {
        return Ok(d);
    }
    let candidates = split::apolar_product_candidates(f, ctx)?;
    let mut last = Error::SearchExhausted("no apolar product of three lines".into());
    for sc in candidates.iter().take(3) {
        let res = match sc.dependency {
            Dependency::Independent => {
                let ops = rows(&[op_vector(&sc.x0)?, op_vector(&sc.x1)?, op_vector(&sc.x2)?]);
                Frame::from_ops(ops).and_then(|fr| general::general_in_frame(f, &fr, ctx))
            }
            Dependency::PairwiseOnly => special::special_or_square(f, sc, ctx),
            Dependency::Repeated => square::from_repeated(f, sc, ctx),
        };
        match res {
            Ok(d) => return Ok(d),
            Err(e) => last = e,
        }
    }
    Err(last)
}

/// Decompose a ternary quartic into at most seven fourth powers.
///
/// Binary forms (`nvars == 2`) are handed to Sylvester's algorithm. On a
/// numerical failure the search is repeated after a random invertible change
/// of coordinates, up to [`RETRY_BUDGET`] times.
pub fn waring_decompose(f: &Form, tol: &Tolerance, seed: u64) -> Result<Decomposition> {
    if f.nvars() == 2 {
        return binary_decompose(f, tol);
    }
    check_ternary_quartic(f)?;
    let norm = f.norm();
    if norm <= tol.zero_eps {
        return Err(Error::ZeroForm);
    }
    let unit_f = f.scale(Scalar::new(1.0 / norm, 0.0));
    let mut ctx = Ctx::new(tol, seed);
    let mut diagnostics = Vec::new();
    for attempt in 0..=RETRY_BUDGET {
        let change = if attempt == 0 {
            Matrix::identity(3, 3)
        } else {
            random_change(&mut ctx)
        };
        let inv_t = change
            .clone()
            .try_inverse()
            .expect("well conditioned by construction")
            .transpose();
        let g = unit_f.substitute(&change);
        let mut inner = Ctx::new(tol, seed.wrapping_add(0x9e37_79b9 * (attempt as u64 + 1)));
        match decompose_once(&g, &mut inner) {
            Ok(d) => {
                let mut d = d.map_linear(&inv_t);
                for t in d.terms.iter_mut() {
                    t.coef *= norm;
                }
                d.refit(f, tol);
                d.normalize();
                let res = d.residual(f);
                if d.len() <= MAX_TERMS && res <= tol.residual_eps {
                    return Ok(d);
                }
                diagnostics.push(format!(
                    "attempt {attempt}: {} terms, residual {res:.3e}",
                    d.len()
                ));
            }
            Err(e) => diagnostics.push(format!("attempt {attempt}: {e}")),
        }
    }
    Err(Error::DecompositionFailure {
        attempts: RETRY_BUDGET + 1,
        diagnostics: diagnostics.join("; "),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{c, ONE};

    #[test]
    fn frame_expresses_forms_in_dual_coordinates() {
        let ops = rows(&[
            [c(1.0), c(1.0), ZERO],
            [ZERO, c(1.0), c(2.0)],
            [c(1.0), ZERO, c(-1.0)],
        ]);
        let frame = Frame::from_ops(ops).unwrap();
        // the first frame form, raised to the 4th power, is y0^4 in frame
        // coordinates
        let l = frame.form(0);
        let f = crate::apolarity::power(&l, 4);
        let g = frame.express(&f);
        assert!((g.coeff(&[4, 0, 0]) - ONE).norm() < 1e-12);
        assert!((g.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn binary_forms_are_detected() {
        let tol = Tolerance::default();
        let f = &Form::monomial(&[2, 2, 0], ONE) + &crate::apolarity::power(&[ONE, ONE, ZERO], 4);
        let d = effectively_binary(&f, &tol).unwrap().expect("binary");
        assert!(d.residual(&f) < 1e-9);
        assert!(d.len() <= 4);
        let g = &f + &Form::monomial(&[0, 0, 4], ONE);
        // adding x2^4 makes it genuinely ternary
        let g = &g + &Form::monomial(&[1, 1, 2], ONE);
        assert!(effectively_binary(&g, &tol).unwrap().is_none());
    }

    #[test]
    fn cross_product_is_bilinear_orthogonal() {
        let a = [Scalar::new(1.0, 2.0), c(0.5), Scalar::new(0.0, -1.0)];
        let b = [c(2.0), Scalar::new(1.0, 1.0), c(3.0)];
        let x = cross(&a, &b);
        let dot = |u: &Vec3, v: &Vec3| u.iter().zip(v).map(|(p, q)| p * q).sum::<Scalar>();
        assert!(dot(&x, &a).norm() < 1e-12);
        assert!(dot(&x, &b).norm() < 1e-12);
    }
}
