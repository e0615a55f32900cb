//! Splitting a ternary quartic into three binary quartics.
//!
//! Given three operators with `x0 x1 x2 ⌟ f = 0`, the form lies in
//! `V0 + V1 + V2` where each `Vi` is the space of quartics in two linear
//! forms. The triples `(f0, f1, f2)` with `f0 + f1 + f2 = f` form a
//! three-dimensional affine family, parametrized here by the coefficients
//! of three kernel generators.

use super::{
    assemble, binary_part, lift_piece, op_vector, other_two, rows, unit, Ctx, Frame, Vec3,
    MAX_TERMS,
};
use crate::apolarity::{polarization, DualForm, Form};
use crate::binary::{classify_plane, classify_plane_degenerate, RConfiguration};
use crate::decomposition::{Decomposition, Provenance};
use crate::error::{Error, Result};
use crate::numerics::{self, c, Matrix, Scalar, Tolerance, Vector, ONE, ZERO};

use super::split::{Dependency, SplitCubic};

/// Which of the two splitting constructions a system uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitterKind {
    /// Independent operators; `Vi` are quartics in the two dual forms other
    /// than `x_i`, and the planes contain two fourth powers.
    General,
    /// Dependent operators `x0, x1, l`; the planes contain `y^4` and a
    /// tangent `y^3 t`.
    Special,
}

/// The linear algebra of a split `f = f0 + f1 + f2`.
#[derive(Clone, Debug)]
pub struct SplitterSystem {
    pub kind: SplitterKind,
    pub operators: [DualForm; 3],
    /// Linear forms dual to the operators: `(x_0, x_1, x_2)`, or
    /// `(x_0, x_1, y)` for the special construction.
    pub dual_basis: [Vec3; 3],
    /// `Vi` is the space of quartics in `v_bases[i] = (s_i, t_i)`.
    pub v_bases: [[Vec3; 2]; 3],
    /// Generators of the kernel of `(v0, v1, v2) -> v0 + v1 + v2`, each a
    /// triple of binary quartics in the coordinates `(s_i, t_i)`.
    pub kernel_gens: [[Form; 3]; 3],
    /// One solution of `f0 + f1 + f2 = f`, as binary quartics.
    pub particular: [Form; 3],
    /// Dimensions of the planes `W_i` spanned by the possible `f_i`.
    pub w_dims: [usize; 3],
    /// Relative distance of `f` from `V0 + V1 + V2`.
    pub membership_residual: f64,
    pub(crate) frame: Frame,
    pub(crate) lifts: [Matrix; 3],
    /// Origin of the affine chart of each plane (`f_i` minus the two
    /// distinguished directions).
    pub(crate) chart_origin: [Form; 3],
}

/// Search pairs `(i, j, shared, own_i, own_j)`: planes `i` and `j` share
/// parameter `shared`; each is solved for its own parameter.
type Pair = (usize, usize, usize, usize, usize);

const GENERAL_PAIRS: [Pair; 3] = [(0, 1, 2, 1, 0), (0, 2, 1, 2, 0), (1, 2, 0, 2, 1)];
const SPECIAL_PAIRS: [Pair; 3] = [(0, 1, 2, 1, 0), (0, 2, 2, 1, 0), (1, 2, 2, 0, 1)];

fn bmono(e0: usize, e1: usize, coef: Scalar) -> Form {
    Form::monomial(&[e0, e1], coef)
}

/// Remove the pure powers `s^4`, `t^4` from a binary quartic.
fn mixed_part(g: &Form) -> Form {
    let mut m = g.clone();
    let n = m.coeffs().len();
    m.coeffs_mut()[0] = ZERO;
    m.coeffs_mut()[n - 1] = ZERO;
    m
}

fn plane_dim(origin: &Form, gens: [&Form; 2], tol: &Tolerance) -> usize {
    let mut m = Matrix::zeros(origin.coeffs().len(), 3);
    for (j, g) in [origin, gens[0], gens[1]].iter().enumerate() {
        let n = g.norm();
        if n == 0.0 {
            continue;
        }
        for (i, &v) in g.coeffs().iter().enumerate() {
            m[(i, j)] = v / n;
        }
    }
    numerics::matrix_rank(&m, tol)
}

impl SplitterSystem {
    /// `f_i` for the parameters `p` (coefficients of the kernel generators).
    pub fn pieces(&self, p: &[Scalar; 3]) -> [Form; 3] {
        std::array::from_fn(|i| {
            let mut g = self.particular[i].clone();
            for (m, &pm) in p.iter().enumerate() {
                g = g.axpy(pm, &self.kernel_gens[m][i]);
            }
            g
        })
    }

    /// The ternary quartic represented by a binary piece of plane `i`.
    pub fn embed(&self, i: usize, g: &Form) -> Form {
        g.substitute(&self.lifts[i].transpose())
    }

    /// `v0 + v1 + v2` for binary pieces.
    pub fn sigma(&self, w: &[Form; 3]) -> Form {
        let mut out = self.embed(0, &w[0]);
        for i in 1..3 {
            out = &out + &self.embed(i, &w[i]);
        }
        out
    }

    /// The two distinguished directions of plane `i` as binary quartics.
    pub fn plane_generators(&self, i: usize) -> [Form; 2] {
        let _ = i;
        match self.kind {
            SplitterKind::General => [bmono(4, 0, ONE), bmono(0, 4, ONE)],
            SplitterKind::Special => [bmono(4, 0, ONE), bmono(3, 1, ONE)],
        }
    }

    /// Classify the plane `W_i` in its affine chart.
    pub fn classify(&self, i: usize, tol: &Tolerance) -> Result<RConfiguration> {
        match self.kind {
            SplitterKind::General => {
                let [y, z] = self.plane_generators(i);
                classify_plane(&self.chart_origin[i], &y, &z, tol)
            }
            SplitterKind::Special => classify_plane_degenerate(&self.chart_origin[i], tol),
        }
    }

    fn chart_coords(&self, i: usize, piece: &Form) -> [Scalar; 2] {
        let diff = piece - &self.chart_origin[i];
        match self.kind {
            SplitterKind::General => [diff.coeff(&[4, 0]), diff.coeff(&[0, 4])],
            SplitterKind::Special => [diff.coeff(&[4, 0]), diff.coeff(&[3, 1])],
        }
    }

    /// Chart coordinates of plane `i` as an affine map `C p + c0`.
    fn chart_map(&self, i: usize) -> (Matrix, [Scalar; 2]) {
        let c0 = self.chart_coords(i, &self.pieces(&[ZERO; 3])[i]);
        let mut m = Matrix::zeros(2, 3);
        for k in 0..3 {
            let ck = self.chart_coords(i, &self.pieces(&unit(k))[i]);
            m[(0, k)] = ck[0] - c0[0];
            m[(1, k)] = ck[1] - c0[1];
        }
        (m, c0)
    }

    fn det_at(&self, i: usize, p: &[Scalar; 3]) -> Scalar {
        let g = &self.pieces(p)[i];
        numerics::det(&polarization(g, 2).expect("quartic").matrix)
    }

    /// Values of `p[own]` putting plane `i` on its determinant locus, with
    /// the other parameters fixed. The determinant is affine in `p[own]`.
    fn solve_own(&self, i: usize, p: &[Scalar; 3], own: usize, ctx: &mut Ctx) -> Option<Scalar> {
        let at = |x: Scalar| {
            let mut q = *p;
            q[own] = x;
            self.det_at(i, &q)
        };
        let (d0, d1, dm) = (at(ZERO), at(ONE), at(c(-1.0)));
        let scale = d0.norm().max(d1.norm()).max(dm.norm());
        if scale == 0.0 {
            return Some(ctx.gaussian());
        }
        if (d0 * 2.0 - d1 - dm).norm() > 1e-6 * scale {
            return None;
        }
        let slope = d1 - d0;
        if slope.norm() > 1e-10 * scale {
            Some(-d0 / slope)
        } else if d0.norm() <= 1e-10 * scale {
            Some(ctx.gaussian())
        } else {
            None
        }
    }

    /// Shared-parameter values where plane `i` stops depending on `own`.
    fn special_shared(&self, i: usize, shared: usize, own: usize) -> Option<Scalar> {
        let slope_at = |s: Scalar| {
            let mut p = [ZERO; 3];
            p[shared] = s;
            let d0 = self.det_at(i, &p);
            p[own] = ONE;
            self.det_at(i, &p) - d0
        };
        let (b0, b1) = (slope_at(ZERO), slope_at(ONE));
        let db = b1 - b0;
        (db.norm() > 1e-10 * (b0.norm() + b1.norm())).then(|| -b0 / db)
    }

    fn provenance(&self) -> Provenance {
        match self.kind {
            SplitterKind::General => Provenance::Gener,
            SplitterKind::Special => Provenance::Spe,
        }
    }

    /// Decompose the pieces at parameters `p` and combine them, if the total
    /// stays within [`MAX_TERMS`] and reproduces `f`.
    pub(crate) fn realize(&self, f: &Form, p: &[Scalar; 3], tol: &Tolerance) -> Option<Decomposition> {
        let pieces = self.pieces(p);
        let mut parts = Vec::with_capacity(3);
        let mut total = 0;
        for (i, g) in pieces.iter().enumerate() {
            let d = lift_piece(g, &self.lifts[i], f.norm(), tol).ok()?;
            total += d.len();
            if total > MAX_TERMS {
                return None;
            }
            parts.push(d);
        }
        let d = assemble(f, parts, self.provenance(), tol);
        (d.len() <= MAX_TERMS && d.residual(f) <= tol.residual_eps).then_some(d)
    }

    /// Search the family for a split whose pieces have total rank at most
    /// seven: pieces pinned at fourth powers (1 + 3 + 3), and pairs of
    /// pieces on their determinant loci (2 + 2 + 3).
    pub(crate) fn search(
        &self,
        f: &Form,
        configs: &[Result<RConfiguration>; 3],
        ctx: &mut Ctx,
    ) -> Option<Decomposition> {
        let tol = ctx.tol;
        let scale = f.norm().max(f64::MIN_POSITIVE);
        let mut best: Option<Decomposition> = None;
        let consider = |p: [Scalar; 3], best: &mut Option<Decomposition>| {
            if let Some(d) = self.realize(f, &p, tol) {
                let better = match best {
                    None => true,
                    Some(b) => {
                        d.len() < b.len() || (d.len() == b.len() && d.residual(f) < b.residual(f))
                    }
                };
                if better {
                    *best = Some(d);
                }
            }
        };

        for (i, cfg) in configs.iter().enumerate() {
            let Ok(cfg) = cfg else { continue };
            let Some((a, b)) = cfg.singular_point else { continue };
            let (m, c0) = self.chart_map(i);
            let rhs = Vector::from_column_slice(&[a - c0[0], b - c0[1]]);
            let (p0, res) = numerics::least_squares(&m, &rhs, tol);
            if res > tol.residual_eps {
                continue;
            }
            let r0: Vec3 = [m[(0, 0)], m[(0, 1)], m[(0, 2)]];
            let r1: Vec3 = [m[(1, 0)], m[(1, 1)], m[(1, 2)]];
            let n = super::cross(&r0, &r1);
            // a generic slide along the remaining parameter
            for _ in 0..20 {
                let tau = ctx.gaussian() * scale;
                let p = [p0[0] + n[0] * tau, p0[1] + n[1] * tau, p0[2] + n[2] * tau];
                let before = best.as_ref().map(|d| d.len());
                consider(p, &mut best);
                if best.as_ref().map(|d| d.len()) != before && best.is_some() {
                    break;
                }
            }
        }

        let pairs = match self.kind {
            SplitterKind::General => GENERAL_PAIRS,
            SplitterKind::Special => SPECIAL_PAIRS,
        };
        for &(i, j, shared, own_i, own_j) in &pairs {
            let mut values: Vec<Scalar> = (0..4).map(|_| ctx.gaussian() * scale).collect();
            values.extend(self.special_shared(i, shared, own_i));
            values.extend(self.special_shared(j, shared, own_j));
            for s in values {
                let mut p = [ZERO; 3];
                p[shared] = s;
                let Some(oi) = self.solve_own(i, &p, own_i, ctx) else { continue };
                p[own_i] = oi;
                let Some(oj) = self.solve_own(j, &p, own_j, ctx) else { continue };
                p[own_j] = oj;
                consider(p, &mut best);
            }
            if best.as_ref().is_some_and(|d| d.len() <= 6) {
                break;
            }
        }
        best
    }
}

/// Splitting system for linearly independent operators given as the rows
/// of `frame.ops`.
pub(crate) fn general_system(f: &Form, frame: &Frame, tol: &Tolerance) -> Result<SplitterSystem> {
    let g = frame.express(f);
    let total = g.norm();
    let off: f64 = g
        .terms()
        .filter(|(e, _)| e.iter().all(|&k| k > 0))
        .map(|(_, c)| c.norm_sqr())
        .sum::<f64>()
        .sqrt();
    let residual = if total > 0.0 { off / total } else { 0.0 };
    if residual > tol.residual_eps {
        return Err(Error::MembershipFailure { residual });
    }
    let mixed: [Form; 3] = std::array::from_fn(|i| mixed_part(&binary_part(&g, i)));
    let p = [
        g.coeff(&[4, 0, 0]),
        g.coeff(&[0, 4, 0]),
        g.coeff(&[0, 0, 4]),
    ];
    let particular = [
        mixed[0].axpy(p[2], &bmono(0, 4, ONE)),
        mixed[1].clone(),
        mixed[2]
            .axpy(p[0], &bmono(4, 0, ONE))
            .axpy(p[1], &bmono(0, 4, ONE)),
    ];
    let s4 = bmono(4, 0, ONE);
    let t4 = bmono(0, 4, ONE);
    let zero = Form::zero(2, 4);
    let kernel_gens = [
        [zero.clone(), s4.clone(), -&s4],
        [s4.clone(), zero.clone(), -&t4],
        [t4.clone(), -&t4, zero.clone()],
    ];
    let w_dims: [usize; 3] = std::array::from_fn(|i| {
        if mixed[i].norm() <= tol.rank_eps * total {
            2
        } else {
            plane_dim(&mixed[i], [&s4, &t4], tol)
        }
    });
    let lifts: [Matrix; 3] = std::array::from_fn(|i| {
        let (j, k) = other_two(i);
        frame.lift(&unit(j), &unit(k))
    });
    let v_bases = std::array::from_fn(|i| {
        let l = &lifts[i];
        [super::column(l, 0), super::column(l, 1)]
    });
    Ok(SplitterSystem {
        kind: SplitterKind::General,
        operators: std::array::from_fn(|i| DualForm::linear(&frame.op(i))),
        dual_basis: std::array::from_fn(|j| frame.form(j)),
        v_bases,
        kernel_gens,
        particular,
        w_dims,
        membership_residual: residual,
        frame: frame.clone(),
        lifts,
        chart_origin: mixed,
    })
}

/// Splitting system for dependent, pairwise independent operators
/// `x0, x1, l` with `l` in the span of `x0, x1`.
pub(crate) fn special_system(f: &Form, v: &[Vec3; 3], tol: &Tolerance) -> Result<SplitterSystem> {
    let [a0, a1, l] = v;
    let m = rows(&[*a0, *a1]).transpose();
    let (coef, res) = numerics::least_squares(&m, &Vector::from_column_slice(l), tol);
    if res > tol.sep_eps() {
        return Err(Error::HypothesisViolation(
            "third operator is not in the span of the first two".into(),
        ));
    }
    let (lam, mu) = (coef[0], coef[1]);
    if lam.norm() <= tol.rank_eps || mu.norm() <= tol.rank_eps {
        return Err(Error::HypothesisViolation("operators are not pairwise independent".into()));
    }
    let e = super::unit3(&super::conj3(&super::cross(a0, a1)));
    let ops = rows(&[super::scale3(a0, lam), super::scale3(a1, mu), e]);
    let frame = Frame::from_ops(ops)?;
    let g = frame.express(f);
    // binary coordinates (s, t) of each plane in frame coordinates
    let st: [[Vec3; 2]; 3] = [
        [unit(2), unit(1)],
        [unit(2), unit(0)],
        [unit(2), super::sub3(&unit(0), &unit(1))],
    ];
    let bmonos = crate::apolarity::monomials(2, 4);
    let ncols = 3 * bmonos.len();
    let mut a = Matrix::zeros(g.coeffs().len(), ncols);
    for (i, pair) in st.iter().enumerate() {
        let sub = rows(&[pair[0], pair[1]]);
        for (k, e) in bmonos.iter().enumerate() {
            let col = Form::monomial(e, ONE).substitute(&sub);
            for (r, &val) in col.coeffs().iter().enumerate() {
                a[(r, i * bmonos.len() + k)] = val;
            }
        }
    }
    let (x, residual) = numerics::least_squares(&a, &Vector::from_column_slice(g.coeffs()), tol);
    if residual > tol.residual_eps {
        return Err(Error::MembershipFailure { residual });
    }
    let particular: [Form; 3] = std::array::from_fn(|i| {
        Form::new(2, 4, x.as_slice()[i * 5..(i + 1) * 5].to_vec()).expect("binary quartic")
    });
    let s4 = bmono(4, 0, ONE);
    let s3t = bmono(3, 1, ONE);
    let zero = Form::zero(2, 4);
    let kernel_gens = [
        [zero.clone(), s4.clone(), -&s4],
        [s4.clone(), zero, -&s4],
        [s3t.clone(), -&s3t, s3t.clone()],
    ];
    let w_dims: [usize; 3] = std::array::from_fn(|i| plane_dim(&particular[i], [&s4, &s3t], tol));
    let lifts: [Matrix; 3] = std::array::from_fn(|i| frame.lift(&st[i][0], &st[i][1]));
    let v_bases = std::array::from_fn(|i| {
        let l = &lifts[i];
        [super::column(l, 0), super::column(l, 1)]
    });
    Ok(SplitterSystem {
        kind: SplitterKind::Special,
        operators: [
            DualForm::linear(a0),
            DualForm::linear(a1),
            DualForm::linear(l),
        ],
        dual_basis: std::array::from_fn(|j| frame.form(j)),
        v_bases,
        kernel_gens,
        particular: particular.clone(),
        w_dims,
        membership_residual: residual,
        frame,
        lifts,
        chart_origin: particular,
    })
}

/// Assemble the splitting system of a split cubic.
pub fn build_splitter(f: &Form, sc: &SplitCubic, tol: &Tolerance) -> Result<SplitterSystem> {
    super::check_ternary_quartic(f)?;
    let v = [op_vector(&sc.x0)?, op_vector(&sc.x1)?, op_vector(&sc.x2)?];
    match sc.dependency {
        Dependency::Independent => general_system(f, &Frame::from_ops(rows(&v))?, tol),
        Dependency::PairwiseOnly => special_system(f, &v, tol),
        Dependency::Repeated => Err(Error::HypothesisViolation(
            "split cubic has a repeated factor".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apolarity::power;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn fermat() -> Form {
        Form::from_terms(
            3,
            4,
            &[(vec![4, 0, 0], ONE), (vec![0, 4, 0], ONE), (vec![0, 0, 4], ONE)],
        )
        .unwrap()
    }

    fn coordinate_split() -> SplitCubic {
        SplitCubic::new(DualForm::var(3, 0), DualForm::var(3, 1), DualForm::var(3, 2), &tol())
            .unwrap()
    }

    #[test]
    fn kernel_generators_sum_to_zero() {
        let f = &fermat() + &power(&[ONE, ONE, ONE], 4);
        let sc = find_split(&f);
        let sys = build_splitter(&f, &sc, &tol()).unwrap();
        for w in &sys.kernel_gens {
            assert!(sys.sigma(w).norm() < 1e-12);
        }
        let p = [c(0.3), c(-1.2), Scalar::new(0.5, 0.5)];
        assert!((&sys.sigma(&sys.pieces(&p)) - &f).norm() < 1e-9);
    }

    fn find_split(f: &Form) -> SplitCubic {
        super::super::find_apolar_product(f, &tol(), 3).unwrap()
    }

    #[test]
    fn fermat_planes_collapse() {
        let sys = build_splitter(&fermat(), &coordinate_split(), &tol()).unwrap();
        assert_eq!(sys.kind, SplitterKind::General);
        assert_eq!(sys.w_dims, [2, 2, 2]);
        assert!(sys.membership_residual == 0.0);
    }

    #[test]
    fn two_variable_pieces_give_a_degenerate_plane() {
        // f = g(x1, x2) + h(x0, x2): f0 carries the mixed (x1, x2) part,
        // f2 has no mixed part
        let f = Form::from_terms(
            3,
            4,
            &[
                (vec![0, 3, 1], ONE),
                (vec![0, 1, 3], c(2.0)),
                (vec![2, 0, 2], c(-1.0)),
                (vec![4, 0, 0], ONE),
            ],
        )
        .unwrap();
        let sys = build_splitter(&f, &coordinate_split(), &tol()).unwrap();
        assert_eq!(sys.w_dims, [3, 3, 2]);
    }

    #[test]
    fn membership_failure_is_reported() {
        let f = Form::monomial(&[2, 1, 1], ONE);
        assert!(matches!(
            build_splitter(&f, &coordinate_split(), &tol()),
            Err(Error::MembershipFailure { .. })
        ));
    }

    #[test]
    fn special_system_reconstructs() {
        // x0, x1 and l = x0 + x1 annihilate anything in the span of
        // quartics in (x1, x2), (x0, x2), (x0 - x1, x2)
        let f = &(&power(&[ZERO, ONE, c(2.0)], 4) + &power(&[ONE, ZERO, c(-1.0)], 4))
            + &(&power(&[ONE, c(-1.0), c(0.5)], 4) + &Form::monomial(&[0, 0, 4], ONE));
        let l = DualForm::linear(&[ONE, ONE, ZERO]);
        let sc = SplitCubic::new(DualForm::var(3, 0), DualForm::var(3, 1), l, &tol()).unwrap();
        assert_eq!(sc.dependency, Dependency::PairwiseOnly);
        assert!(sc.residual(&f) < 1e-12);
        let sys = build_splitter(&f, &sc, &tol()).unwrap();
        assert_eq!(sys.kind, SplitterKind::Special);
        for w in &sys.kernel_gens {
            assert!(sys.sigma(w).norm() < 1e-12);
        }
        let p = [c(0.7), c(-0.2), c(1.5)];
        assert!((&sys.sigma(&sys.pieces(&p)) - &f).norm() < 1e-9);
    }
}
