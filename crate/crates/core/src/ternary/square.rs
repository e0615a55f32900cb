//! Quartics annihilated by the square of a linear operator.
//!
//! If `l^2 ⌟ f = 0` then `g = l ⌟ f` is a cubic in the two variables of the
//! line `l = 0`. When `g` is a cube, `l` pairs with a second operator into
//! an apolar product of two lines. Otherwise the apolar cubics of `f`
//! restricted to that line have three roots, and the gradients at those
//! roots give three operators whose product annihilates `f`.

use super::{
    annihilates, conj3, cross, effectively_binary, general, op_vector, rows, scale3, sin_angle,
    special, split::classify_triple, sub3, add3, wu, Ctx, Frame, Vec3,
};
use crate::apolarity::{contract, polarization, DualForm, Form};
use crate::binary::{binary_roots, min_root_separation};
use crate::decomposition::Decomposition;
use crate::error::{Error, Result};
use crate::numerics::{self, Scalar, Tolerance, Vector};

use super::split::{Dependency, SplitCubic};

/// Gradient of the cubic `p` (coefficients read as a form) at `x`.
fn gradient(p: &DualForm, x: &Vec3) -> Vec3 {
    std::array::from_fn(|j| contract(&DualForm::var(3, j), p.as_form()).evaluate(x))
}

pub(crate) fn square(f: &Form, l: &Vec3, ctx: &mut Ctx) -> Result<Decomposition> {
    ctx.nested(|ctx| {
        let tol = ctx.tol;
        let lop = DualForm::linear(l);
        if !annihilates(&lop.pow(2), f, tol) {
            return Err(Error::HypothesisViolation(
                "the square of the operator does not annihilate the form".into(),
            ));
        }
        let g = contract(&lop, f);
        if g.norm() <= tol.rank_eps * 4.0 * f.norm() * numerics::norm(l) {
            return effectively_binary(f, tol)?.ok_or_else(|| {
                Error::HypothesisViolation("operator annihilates a genuinely ternary form".into())
            });
        }
        let pol = polarization(&g, 2)?;
        let dim_w = 6 - pol.rank(tol);
        if dim_w >= 5 {
            // g is a cube z^3: l and the operator vanishing on y and z
            // annihilate f, where y is a form with l . y = 1
            let z = (0..pol.matrix.ncols())
                .map(|j| pol.matrix.column(j).iter().copied().collect::<Vec<_>>())
                .max_by(|a, b| numerics::norm(a).partial_cmp(&numerics::norm(b)).unwrap())
                .expect("nonempty");
            let z: Vec3 = [z[0], z[1], z[2]];
            let n2 = numerics::norm(l).powi(2);
            let y = scale3(&conj3(l), Scalar::new(1.0 / n2, 0.0));
            let m = cross(&y, &z);
            return wu::two_lines(f, l, &m, ctx);
        }

        let apolar_cubics = numerics::kernel_basis(&polarization(f, 3)?.matrix, tol);
        if apolar_cubics.is_empty() {
            return Err(Error::SearchExhausted("no apolar cubics".into()));
        }
        let (r1, r2) = (ctx.unit_vector(), ctx.unit_vector());
        let p_pt = cross(l, &r1);
        let q_pt = cross(l, &r2);
        let line = rows(&[p_pt, q_pt]).transpose();
        let mut diagnostics = Vec::new();
        for _ in 0..12 {
            let mut coeffs = Vector::zeros(apolar_cubics[0].len());
            for k in &apolar_cubics {
                coeffs += k * ctx.gaussian();
            }
            let p = DualForm::new(3, 3, coeffs.iter().copied().collect())?;
            let h = p.as_form().substitute(&line);
            let Ok(roots) = binary_roots(h.coeffs(), tol) else { continue };
            if roots.len() != 3 || min_root_separation(&roots) <= tol.sep_eps() {
                continue;
            }
            let ops: Vec<Vec3> = roots
                .iter()
                .map(|r| {
                    let x: Vec3 = std::array::from_fn(|i| p_pt[i] * r[0] + q_pt[i] * r[1]);
                    gradient(&p, &x)
                })
                .collect();
            if ops.iter().any(|v| numerics::norm(v) <= tol.zero_eps) {
                continue;
            }
            let v: [Vec3; 3] = [ops[0], ops[1], ops[2]];
            let product = super::split::product_of(&v);
            if !annihilates(&product, f, tol) {
                continue;
            }
            if let Some(x) = v
                .iter()
                .find(|x| annihilates(&DualForm::linear(*x).pow(2), f, tol) && sin_angle(x, l) > tol.sep_eps())
            {
                let x = scale3(x, Scalar::new(numerics::norm(l) / numerics::norm(x), 0.0));
                match wu::two_lines(f, &sub3(l, &x), &add3(l, &x), ctx) {
                    Ok(d) => return Ok(d),
                    Err(e) => diagnostics.push(e.to_string()),
                }
                continue;
            }
            let res = match classify_triple(&v, tol) {
                Dependency::Independent => Frame::from_ops(rows(&v))
                    .and_then(|fr| general::general_in_frame(f, &fr, ctx)),
                Dependency::PairwiseOnly => special::special(f, &v, ctx),
                Dependency::Repeated => continue,
            };
            match res {
                Ok(d) => return Ok(d),
                Err(e) => diagnostics.push(e.to_string()),
            }
        }
        Err(Error::SearchExhausted(format!(
            "no usable apolar cubic through the line ({})",
            diagnostics.join("; ")
        )))
    })
}

/// Route a split cubic with proportional factors through a squared factor.
pub(crate) fn from_repeated(f: &Form, sc: &SplitCubic, ctx: &mut Ctx) -> Result<Decomposition> {
    for v in sc.vectors() {
        if annihilates(&DualForm::linear(&v).pow(2), f, ctx.tol) {
            return square(f, &v, ctx);
        }
    }
    Err(Error::SearchExhausted(
        "split cubic with a repeated factor but no apolar square".into(),
    ))
}

/// Decompose a ternary quartic with `l^2 ⌟ f = 0`.
pub fn decompose_square(f: &Form, l: &DualForm, tol: &Tolerance) -> Result<Decomposition> {
    super::check_ternary_quartic(f)?;
    let mut ctx = Ctx::new(tol, 0x5e_ed);
    square(f, &op_vector(l)?, &mut ctx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apolarity::power;
    use crate::decomposition::Provenance;
    use crate::numerics::{c, ONE, ZERO};

    #[test]
    fn cube_case_goes_through_two_lines() {
        let tol = Tolerance::default();
        // x0 x1^3 + g(x1, x2): d0^2 kills it, d0 f = x1^3
        let f = &(&Form::monomial(&[1, 3, 0], ONE) + &power(&[ZERO, ONE, c(0.6)], 4))
            + &(&power(&[ZERO, c(0.3), ONE], 4) + &Form::monomial(&[0, 2, 2], c(0.9)));
        let d = decompose_square(&f, &DualForm::var(3, 0), &tol).unwrap();
        assert!(d.len() <= 7, "{} terms", d.len());
        assert!(d.residual(&f) < 1e-6);
        assert_eq!(d.provenance, Provenance::Wu);
    }

    #[test]
    fn quadratic_case_stays_within_seven() {
        let tol = Tolerance::default();
        // d0^2 kills x0 (x1^3 + x2^3) + generic part in (x1, x2)
        let f = &(&Form::monomial(&[1, 3, 0], ONE) + &Form::monomial(&[1, 0, 3], ONE))
            + &(&power(&[ZERO, ONE, c(0.6)], 4) + &power(&[ZERO, c(-0.7), ONE], 4));
        let f = &f + &Form::monomial(&[0, 2, 2], c(0.4));
        let d = decompose_square(&f, &DualForm::var(3, 0), &tol).unwrap();
        assert!(d.len() <= 7, "{} terms", d.len());
        assert!(d.residual(&f) < 1e-6);
    }

    #[test]
    fn rejects_non_annihilating_square() {
        let tol = Tolerance::default();
        let f = Form::monomial(&[2, 1, 1], ONE);
        assert!(matches!(
            decompose_square(&f, &DualForm::var(3, 0), &tol),
            Err(Error::HypothesisViolation(_))
        ));
    }
}
