//! Products of three linear operators annihilating a ternary quartic.

use rand::Rng;

use super::{
    normalized_det, op_vector, rows, sin_angle, unit3, vnorm, Ctx, Vec3,
};
use crate::apolarity::{contract, polarization, DualForm, Form};
use crate::binary::binary_roots;
use crate::error::{Error, Result};
use crate::numerics::{self, fit_polynomial, poly_roots, Matrix, Scalar, Tolerance, Vector, ZERO};

/// How the three factors of a split cubic sit in `S^1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Dependency {
    Independent,
    /// Linearly dependent, but no two factors are proportional.
    PairwiseOnly,
    /// Two factors are proportional.
    Repeated,
}

/// A cubic operator `x0 * x1 * x2` split into linear factors, with
/// `x0 x1 x2 ⌟ f = 0` for the form it was built from.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitCubic {
    pub x0: DualForm,
    pub x1: DualForm,
    pub x2: DualForm,
    pub dependency: Dependency,
}

impl SplitCubic {
    /// Build from three operators, classifying their dependency.
    pub fn new(x0: DualForm, x1: DualForm, x2: DualForm, tol: &Tolerance) -> Result<Self> {
        let v = [op_vector(&x0)?, op_vector(&x1)?, op_vector(&x2)?];
        let dependency = classify_triple(&v, tol);
        Ok(Self {
            x0,
            x1,
            x2,
            dependency,
        })
    }

    pub fn product(&self) -> DualForm {
        self.x0.mul(&self.x1).mul(&self.x2)
    }

    pub fn vectors(&self) -> [Vec3; 3] {
        [
            op_vector(&self.x0).expect("linear"),
            op_vector(&self.x1).expect("linear"),
            op_vector(&self.x2).expect("linear"),
        ]
    }

    /// Relative size of `x0 x1 x2 ⌟ f`.
    pub fn residual(&self, f: &Form) -> f64 {
        super::contraction_residual(&self.product(), f)
    }

    /// Smallest sine of the angle between two factors.
    pub fn min_angle(&self) -> f64 {
        let v = self.vectors();
        sin_angle(&v[0], &v[1])
            .min(sin_angle(&v[0], &v[2]))
            .min(sin_angle(&v[1], &v[2]))
    }

}

pub(crate) fn classify_triple(v: &[Vec3; 3], tol: &Tolerance) -> Dependency {
    let sep = tol.sep_eps();
    let pairwise = sin_angle(&v[0], &v[1])
        .min(sin_angle(&v[0], &v[2]))
        .min(sin_angle(&v[1], &v[2]));
    if pairwise <= sep {
        Dependency::Repeated
    } else if normalized_det(&v[0], &v[1], &v[2]) > sep {
        Dependency::Independent
    } else {
        Dependency::PairwiseOnly
    }
}

/// Symmetric matrix of a dual quadric in three variables.
fn conic_matrix(q: &[Scalar]) -> Matrix {
    let h = Scalar::new(0.5, 0.0);
    Matrix::from_row_slice(
        3,
        3,
        &[
            q[0], q[1] * h, q[2] * h,
            q[1] * h, q[3], q[4] * h,
            q[2] * h, q[4] * h, q[5],
        ],
    )
}

/// Split a degenerate conic into its two lines. A double line is returned
/// twice.
pub(crate) fn factor_conic(q: &[Scalar], tol: &Tolerance) -> Option<(Vec3, Vec3)> {
    let m = conic_matrix(q);
    let (sv, v) = numerics::svd_right(&m);
    if sv[0] == 0.0 {
        return None;
    }
    if sv[1] <= tol.sep_eps() * sv[0] {
        // rank one: every nonzero row is proportional to the line
        let i = (0..3)
            .max_by(|&a, &b| m.row(a).norm().partial_cmp(&m.row(b).norm()).unwrap())
            .unwrap();
        let l: Vec3 = [m[(i, 0)], m[(i, 1)], m[(i, 2)]];
        return Some((l, l));
    }
    let k: Vec3 = [v[(0, 2)], v[(1, 2)], v[(2, 2)]];
    let p1: Vec3 = [v[(0, 0)], v[(1, 0)], v[(2, 0)]];
    let p2: Vec3 = [v[(0, 1)], v[(1, 1)], v[(2, 1)]];
    let bil = |a: &Vec3, b: &Vec3| -> Scalar {
        let va = Vector::from_column_slice(a);
        let vb = Vector::from_column_slice(b);
        (va.transpose() * &m * vb)[(0, 0)]
    };
    let coeffs = [bil(&p1, &p1), bil(&p1, &p2) * 2.0, bil(&p2, &p2)];
    let roots = binary_roots(&coeffs, tol).ok()?;
    if roots.len() != 2 {
        return None;
    }
    let basis = rows(&[k, p1, p2]);
    let inv = basis.try_inverse()?;
    let line = |r: &[Scalar; 2]| -> Vec3 {
        let x = &inv * Vector::from_column_slice(&[ZERO, r[1], -r[0]]);
        [x[0], x[1], x[2]]
    };
    Some((line(&roots[0]), line(&roots[1])))
}

/// Reducible conics on the pencil `qa + t qb`.
fn pencil_degenerations(qa: &Vector, qb: &Vector, tol: &Tolerance) -> Vec<Vector> {
    let det_at = |t: Scalar| {
        let q = qa + qb * t;
        numerics::det(&conic_matrix(q.as_slice()))
    };
    let poly = fit_polynomial(3, 1.0, det_at);
    let Ok(roots) = poly_roots(&poly, tol) else {
        return Vec::new();
    };
    roots.into_iter().map(|t| qa + qb * t).collect()
}

fn candidate(
    f: &Form,
    x0: &Vec3,
    a: &Vec3,
    b: &Vec3,
    tol: &Tolerance,
) -> Option<SplitCubic> {
    if vnorm(a) == 0.0 || vnorm(b) == 0.0 {
        return None;
    }
    let (x0, a, mut b) = (unit3(x0), unit3(a), unit3(b));
    let mut dep = classify_triple(&[x0, a, b], tol);
    if dep == Dependency::PairwiseOnly {
        // place the third factor exactly in the span of the first two
        let m = rows(&[x0, a]).transpose();
        let (c, _) = numerics::least_squares(&m, &Vector::from_column_slice(&b), tol);
        let p = &m * c;
        b = unit3(&[p[0], p[1], p[2]]);
        dep = classify_triple(&[x0, a, b], tol);
    }
    let sc = SplitCubic {
        x0: DualForm::linear(&x0),
        x1: DualForm::linear(&a),
        x2: DualForm::linear(&b),
        dependency: dep,
    };
    (sc.residual(f) <= tol.residual_eps * 1e-2).then_some(sc)
}

/// Candidate split cubics for `f`, best first: independent before pairwise
/// independent before repeated factors, then by conditioning.
pub(crate) fn apolar_product_candidates(f: &Form, ctx: &mut Ctx) -> Result<Vec<SplitCubic>> {
    super::check_ternary_quartic(f)?;
    let tol = ctx.tol;
    if f.norm() <= tol.zero_eps {
        return Err(Error::ZeroForm);
    }
    let mut out: Vec<SplitCubic> = Vec::new();
    for _trial in 0..8 {
        // x0 with a large value of (x0)^4 ⌟ f, i.e. of f at x0
        let mut x0 = ctx.unit_vector();
        let mut best = f.evaluate(&x0).norm();
        for _ in 0..5 {
            let v = ctx.unit_vector();
            let val = f.evaluate(&v).norm();
            if val > best {
                best = val;
                x0 = v;
            }
        }
        if best <= tol.zero_eps * f.norm() {
            continue;
        }
        let g = contract(&DualForm::linear(&x0), f);
        let kernel = numerics::kernel_basis(&polarization(&g, 2)?.matrix, tol);
        if kernel.len() < 3 {
            continue;
        }
        let mut divisible: Vec<Vector> = Vec::new();
        let mut found_good = false;
        for round in 0..2 {
            for _ in 0..4 {
                let mut qa = Vector::zeros(6);
                let mut qb = Vector::zeros(6);
                for k in &kernel {
                    qa += k * ctx.gaussian();
                    qb += k * ctx.gaussian();
                }
                if round == 1 {
                    // pencils through conics divisible by x0
                    let Some(d) = divisible.get(ctx.rng.random_range(0..divisible.len().max(1)))
                    else {
                        break;
                    };
                    qb = d.clone();
                }
                for q in pencil_degenerations(&qa, &qb, tol) {
                    let Some((a, b)) = factor_conic(q.as_slice(), tol) else {
                        continue;
                    };
                    let Some(sc) = candidate(f, &x0, &a, &b, tol) else {
                        continue;
                    };
                    if sc.dependency == Dependency::Repeated
                        && (sin_angle(&a, &x0) <= tol.sep_eps() || sin_angle(&b, &x0) <= tol.sep_eps())
                    {
                        divisible.push(q.clone());
                    } else if sc.dependency != Dependency::Repeated {
                        found_good = true;
                    }
                    out.push(sc);
                }
            }
            if found_good || divisible.is_empty() {
                break;
            }
        }
        if found_good {
            break;
        }
    }
    if out.is_empty() {
        return Err(Error::SearchExhausted(
            "no apolar product of three lines found".into(),
        ));
    }
    out.sort_by(|a, b| {
        a.dependency
            .cmp(&b.dependency)
            .then(b.min_angle().partial_cmp(&a.min_angle()).unwrap_or(std::cmp::Ordering::Equal))
    });
    Ok(out)
}

/// Find three pairwise distinct linear operators whose product annihilates
/// the ternary quartic `f`.
pub fn find_apolar_product(f: &Form, tol: &Tolerance, seed: u64) -> Result<SplitCubic> {
    let mut ctx = Ctx::new(tol, seed);
    let mut cands = apolar_product_candidates(f, &mut ctx)?;
    Ok(cands.swap_remove(0))
}

/// Product operator `x0 x1 x2` from coefficient vectors.
pub(crate) fn product_of(v: &[Vec3]) -> DualForm {
    v.iter()
        .map(|a| DualForm::linear(a))
        .reduce(|acc, x| acc.mul(&x))
        .expect("nonempty")
}
