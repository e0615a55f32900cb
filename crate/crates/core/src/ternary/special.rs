//! Split cubics whose factors are dependent but pairwise independent.

use super::{
    annihilates, op_vector, sin_angle, splitter::special_system, square, wu, Ctx, Vec3,
};
use crate::apolarity::{contract, DualForm, Form};
use crate::binary::{PlaneCase, RConfiguration};
use crate::decomposition::Decomposition;
use crate::error::{Error, Result};
use crate::numerics::{self, Matrix, Tolerance};

use super::split::{Dependency, SplitCubic};

/// A combination `c0 x0 + c1 x1` whose product with `l` annihilates `f`.
fn pencil_partner(f: &Form, v: &[Vec3; 3], tol: &Tolerance) -> Option<Vec3> {
    let l = DualForm::linear(&v[2]);
    let q0 = contract(&DualForm::linear(&v[0]).mul(&l), f);
    let q1 = contract(&DualForm::linear(&v[1]).mul(&l), f);
    let mut m = Matrix::zeros(q0.coeffs().len(), 2);
    for (i, (&a, &b)) in q0.coeffs().iter().zip(q1.coeffs()).enumerate() {
        m[(i, 0)] = a;
        m[(i, 1)] = b;
    }
    let (c, _) = numerics::smallest_right_singular(&m);
    let partner: Vec3 = std::array::from_fn(|k| v[0][k] * c[0] + v[1][k] * c[1]);
    annihilates(&DualForm::linear(&partner).mul(&l), f, tol).then_some(partner)
}

pub(crate) fn special(f: &Form, v: &[Vec3; 3], ctx: &mut Ctx) -> Result<Decomposition> {
    ctx.nested(|ctx| {
        let tol = ctx.tol;
        for (i, x) in v.iter().enumerate() {
            if annihilates(&DualForm::linear(x).pow(2), f, tol) {
                return Err(Error::HypothesisViolation(format!(
                    "the square of factor {i} annihilates the form"
                )));
            }
        }
        let sys = special_system(f, v, tol)?;
        if let Some(i) = sys.w_dims.iter().position(|&d| d == 2) {
            // f_i can be taken to vanish; the other two factors suffice
            let (a, b) = match i {
                0 => (v[1], v[2]),
                1 => (v[0], v[2]),
                _ => (v[0], v[1]),
            };
            return wu::two_lines(f, &a, &b, ctx);
        }
        let configs: [Result<RConfiguration>; 3] = std::array::from_fn(|i| sys.classify(i, tol));
        let d2 = configs
            .iter()
            .filter(|c| matches!(c, Ok(cfg) if cfg.case == PlaneCase::D2))
            .count();
        let mut diagnostics = vec![format!("{d2} planes without rank 2 or 4 points")];
        // with two such planes a combination of x0, x1 times l annihilates f
        let pencil =|ctx: &mut Ctx, diagnostics: &mut Vec<String>| {
            let m = pencil_partner(f, v, tol)?;
            let res = if sin_angle(&m, &v[2]) > tol.sep_eps() {
                wu::two_lines(f, &m, &v[2], ctx)
            } else {
                square::square(f, &v[2], ctx)
            };
            res.map_err(|e| diagnostics.push(e.to_string())).ok()
        };
        if d2 >= 2 {
            if let Some(d) = pencil(ctx, &mut diagnostics) {
                return Ok(d);
            }
        }
        if let Some(d) = sys.search(f, &configs, ctx) {
            return Ok(d);
        }
        if d2 < 2 {
            if let Some(d) = pencil(ctx, &mut diagnostics) {
                return Ok(d);
            }
        }
        Err(Error::CaseAnalysisExhausted(format!(
            "dependent split: {}",
            diagnostics.join("; ")
        )))
    })
}

/// Dependent split cubics whose factor has an apolar square go through the
/// square construction; the rest through the dependent splitting.
pub(crate) fn special_or_square(f: &Form, sc: &SplitCubic, ctx: &mut Ctx) -> Result<Decomposition> {
    let v = sc.vectors();
    for x in &v {
        if annihilates(&DualForm::linear(x).pow(2), f, ctx.tol) {
            return square::square(f, x, ctx);
        }
    }
    special(f, &v, ctx)
}

/// Decompose a ternary quartic from a split cubic with dependent, pairwise
/// independent factors `x0, x1, l`.
pub fn decompose_special(f: &Form, sc: &SplitCubic, tol: &Tolerance) -> Result<Decomposition> {
    super::check_ternary_quartic(f)?;
    if sc.dependency != Dependency::PairwiseOnly {
        return Err(Error::HypothesisViolation(
            "factors must be dependent and pairwise independent".into(),
        ));
    }
    let v = [op_vector(&sc.x0)?, op_vector(&sc.x1)?, op_vector(&sc.x2)?];
    let mut ctx = Ctx::new(tol, 0x5be);
    special(f, &v, &mut ctx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apolarity::power;
    use crate::decomposition::Provenance;
    use crate::numerics::{c, Scalar, ONE, ZERO};

    fn dependent_split(tol: &Tolerance) -> SplitCubic {
        SplitCubic::new(
            DualForm::var(3, 0),
            DualForm::var(3, 1),
            DualForm::linear(&[ONE, ONE, ZERO]),
            tol,
        )
        .unwrap()
    }

    /// Generic element of `V0 + V1 + V2` for the operators `d0, d1, d0 + d1`.
    fn generic_member() -> Form {
        let mut f = Form::zero(3, 4);
        let pts: [[Scalar; 3]; 7] = [
            [ZERO, ONE, c(0.4)],
            [ZERO, c(-0.6), ONE],
            [ONE, ZERO, c(0.9)],
            [c(0.3), ZERO, ONE],
            [ONE, c(-1.0), c(0.2)],
            [c(0.5), c(-0.5), ONE],
            [ZERO, c(0.8), Scalar::new(0.1, 0.7)],
        ];
        for (k, p) in pts.iter().enumerate() {
            f = f.axpy(c(1.0 + 0.1 * k as f64), &power(p, 4));
        }
        &f + &Form::monomial(&[0, 3, 1], c(0.5))
    }

    #[test]
    fn generic_dependent_split_gives_seven() {
        let tol = Tolerance::default();
        let f = generic_member();
        let sc = dependent_split(&tol);
        assert!(sc.residual(&f) < 1e-12);
        let d = decompose_special(&f, &sc, &tol).unwrap();
        assert!(d.len() <= 7, "{} terms", d.len());
        assert!(d.residual(&f) < 1e-6);
        assert!(matches!(d.provenance, Provenance::Spe | Provenance::Wu));
    }

    #[test]
    fn rejects_independent_factors() {
        let tol = Tolerance::default();
        let sc = SplitCubic::new(DualForm::var(3, 0), DualForm::var(3, 1), DualForm::var(3, 2), &tol)
            .unwrap();
        assert!(matches!(
            decompose_special(&generic_member(), &sc, &tol),
            Err(Error::HypothesisViolation(_))
        ));
    }
}
