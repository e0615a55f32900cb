//! Quartics annihilated by a product of two linear operators.
//!
//! If `x0 x1 ⌟ f = 0` for independent `x0, x1`, then in a frame completing
//! them `f` has no monomial divisible by both dual variables, so
//! `f = g0 + g1` with `g0` free of the first and `g1` free of the second
//! dual variable. The pure power of the third variable can be moved freely
//! between them; choosing the shift so that one piece has rank at most 3
//! gives at most `3 + 4 = 7` terms.

use super::{
    annihilates, assemble, binary_part, cross, effectively_binary, lift_piece, op_vector, rows,
    sin_angle, unit, unit3, conj3, Ctx, Frame, Vec3, MAX_TERMS,
};
use crate::apolarity::{polarization, DualForm, Form};
use crate::decomposition::{Decomposition, Provenance};
use crate::error::{Error, Result};
use crate::numerics::{self, Scalar, Tolerance, ONE, ZERO};

fn without_pure_powers(g: &Form) -> Form {
    let mut m = g.clone();
    let n = m.coeffs().len();
    m.coeffs_mut()[0] = ZERO;
    m.coeffs_mut()[n - 1] = ZERO;
    m
}

fn catalecticant_det(g: &Form) -> Scalar {
    numerics::det(&polarization(g, 2).expect("quartic").matrix)
}

/// Root of an affine function of one variable, sampled at 0 and 1.
fn affine_root(at: impl Fn(Scalar) -> Scalar) -> Option<Scalar> {
    let (d0, d1) = (at(ZERO), at(ONE));
    let slope = d1 - d0;
    (slope.norm() > 1e-12 * (d0.norm() + d1.norm())).then(|| -d0 / slope)
}

pub(crate) fn two_lines(f: &Form, a0: &Vec3, a1: &Vec3, ctx: &mut Ctx) -> Result<Decomposition> {
    ctx.nested(|ctx| {
        let tol = ctx.tol;
        if sin_angle(a0, a1) <= tol.sep_eps() {
            return Err(Error::HypothesisViolation("the two operators are proportional".into()));
        }
        let prod = DualForm::linear(a0).mul(&DualForm::linear(a1));
        if !annihilates(&prod, f, tol) {
            return Err(Error::HypothesisViolation(
                "the product of the two operators does not annihilate the form".into(),
            ));
        }
        let a2 = unit3(&conj3(&cross(a0, a1)));
        let frame = Frame::from_ops(rows(&[*a0, *a1, a2]))?;
        let g = frame.express(f);
        let m0 = without_pure_powers(&binary_part(&g, 0));
        let m1 = without_pure_powers(&binary_part(&g, 1));
        let p0 = g.coeff(&[4, 0, 0]);
        let p1 = g.coeff(&[0, 4, 0]);
        let p2 = g.coeff(&[0, 0, 4]);
        let s4 = Form::monomial(&[4, 0], ONE);
        let t4 = Form::monomial(&[0, 4], ONE);
        let g0 = |u: Scalar| m0.axpy(p1, &s4).axpy(u, &t4);
        let g1 = |u: Scalar| m1.axpy(p0, &s4).axpy(p2 - u, &t4);
        let lift0 = frame.lift(&unit(1), &unit(2));
        let lift1 = frame.lift(&unit(0), &unit(2));

        let scale = g.norm().max(f64::MIN_POSITIVE);
        let mut shifts = vec![ZERO, p2];
        shifts.extend(affine_root(|u| catalecticant_det(&g0(u))));
        shifts.extend(affine_root(|u| catalecticant_det(&g1(u))));
        for _ in 0..3 {
            shifts.push(ctx.gaussian() * scale);
        }

        let mut best: Option<Decomposition> = None;
        for u in shifts {
            let (Ok(d0), Ok(d1)) = (
                lift_piece(&g0(u), &lift0, f.norm(), tol),
                lift_piece(&g1(u), &lift1, f.norm(), tol),
            ) else {
                continue;
            };
            if d0.len() + d1.len() > MAX_TERMS {
                continue;
            }
            let d = assemble(f, vec![d0, d1], Provenance::Wu, tol);
            if d.residual(f) > tol.residual_eps {
                continue;
            }
            if best.as_ref().map_or(true, |b| d.len() < b.len()) {
                best = Some(d);
            }
        }
        if let Some(d) = best {
            return Ok(d);
        }
        if let Some(d) = effectively_binary(f, tol)? {
            return Ok(d);
        }
        Err(Error::CaseAnalysisExhausted(
            "no shift of the pure power leaves a piece of rank at most 3".into(),
        ))
    })
}

/// Decompose a ternary quartic with `x0 x1 ⌟ f = 0` for two independent
/// linear operators.
pub fn decompose_two_lines(
    f: &Form,
    x0: &DualForm,
    x1: &DualForm,
    tol: &Tolerance,
) -> Result<Decomposition> {
    super::check_ternary_quartic(f)?;
    let mut ctx = Ctx::new(tol, 0x5775);
    two_lines(f, &op_vector(x0)?, &op_vector(x1)?, &mut ctx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apolarity::power;
    use crate::numerics::c;

    #[test]
    fn fermat_splits_along_two_coordinates() {
        let tol = Tolerance::default();
        let f = Form::from_terms(
            3,
            4,
            &[(vec![4, 0, 0], ONE), (vec![0, 4, 0], ONE), (vec![0, 0, 4], ONE)],
        )
        .unwrap();
        let d = decompose_two_lines(&f, &DualForm::var(3, 0), &DualForm::var(3, 1), &tol).unwrap();
        assert_eq!(d.len(), 3);
        assert!(d.residual(&f) < 1e-9);
        assert_eq!(d.provenance, Provenance::Wu);
    }

    #[test]
    fn general_pieces_stay_within_seven() {
        let tol = Tolerance::default();
        // generic quartic in (x1, x2) plus one in (x0, x2)
        let g = &(&power(&[ZERO, ONE, c(0.3)], 4) + &power(&[ZERO, c(0.7), c(-1.1)], 4))
            + &(&power(&[ZERO, c(-0.4), ONE], 4) + &Form::monomial(&[0, 2, 2], c(1.3)));
        let h = &(&power(&[ONE, ZERO, c(0.5)], 4) + &power(&[c(0.2), ZERO, ONE], 4))
            + &Form::monomial(&[3, 0, 1], c(-0.8));
        let f = &g + &h;
        let d = decompose_two_lines(&f, &DualForm::var(3, 0), &DualForm::var(3, 1), &tol).unwrap();
        assert!(d.len() <= 7, "{} terms", d.len());
        assert!(d.residual(&f) < 1e-6);
    }

    #[test]
    fn non_annihilating_pair_is_rejected() {
        let tol = Tolerance::default();
        let f = Form::monomial(&[1, 1, 2], ONE);
        let r = decompose_two_lines(&f, &DualForm::var(3, 0), &DualForm::var(3, 1), &tol);
        assert!(matches!(r, Err(Error::HypothesisViolation(_))));
    }
}
