//! Split cubics with three linearly independent factors.
//!
//! The search over the splitting family handles most inputs. When it
//! fails, the planes are in special position (lines through a point at
//! infinity, or a degenerate conic), and a substitution of the dual linear
//! forms moves the problem to a frame where either a plane collapses or the
//! search succeeds.

use super::{
    other_two, splitter::general_system, wu, Ctx, Frame,
};
use crate::apolarity::Form;
use crate::binary::{binary_decompose, PlaneCase, RConfiguration};
use crate::decomposition::Decomposition;
use crate::error::{Error, Result};
use crate::numerics::{Matrix, Scalar, Tolerance};

use super::splitter::{SplitterKind, SplitterSystem};

/// Which mixed monomial dominates a plane whose rank locus is a line
/// through a point at infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum LineType {
    /// Mixed part proportional to `y_o^3 y_k`.
    L,
    /// Mixed part proportional to `y_o y_k^3`.
    C,
}

fn exps(pairs: &[(usize, usize)]) -> [usize; 3] {
    let mut e = [0; 3];
    for &(v, k) in pairs {
        e[v] += k;
    }
    e
}

/// `basis` with column `m` replaced by `column m + kappa * column n`.
fn add_column(basis: &Matrix, m: usize, n: usize, kappa: Scalar) -> Matrix {
    let mut b = basis.clone();
    for r in 0..3 {
        b[(r, m)] += kappa * basis[(r, n)];
    }
    b
}

/// Frames to retry in after the search failed.
fn substitutions(
    g: &Form,
    basis: &Matrix,
    configs: &[Result<RConfiguration>; 3],
    ctx: &mut Ctx,
    tol: &Tolerance,
) -> Vec<Matrix> {
    let mut out = Vec::new();
    let c2: Vec<usize> = (0..3)
        .filter(|&i| matches!(&configs[i], Ok(cfg) if cfg.case == PlaneCase::C2))
        .collect();
    let line_type = |plane: usize, o: usize, k: usize| {
        let _ = plane;
        if g.coeff(&exps(&[(o, 3), (k, 1)])).norm() >= g.coeff(&exps(&[(o, 1), (k, 3)])).norm() {
            LineType::L
        } else {
            LineType::C
        }
    };
    for &i in &c2 {
        for &j in &c2 {
            if i == j {
                continue;
            }
            let k = 3 - i - j;
            let (o_i, o_j) = (j, i);
            match (line_type(i, o_i, k), line_type(j, o_j, k)) {
                (LineType::L, LineType::L) => {
                    let pk = g.coeff(&exps(&[(k, 4)]));
                    if pk.norm() > tol.rank_eps * g.norm() {
                        for _ in 0..3 {
                            let kappa = ctx.gaussian();
                            out.push(add_column(basis, k, o_j, kappa));
                            out.push(add_column(basis, k, o_i, kappa));
                        }
                    } else {
                        let a = g.coeff(&exps(&[(o_j, 3), (k, 1)]));
                        let b = g.coeff(&exps(&[(o_i, 3), (k, 1)]));
                        if a.norm() <= tol.zero_eps || b.norm() <= tol.zero_eps {
                            continue;
                        }
                        let p31 = g.coeff(&exps(&[(o_j, 3), (o_i, 1)]));
                        let p22 = g.coeff(&exps(&[(o_j, 2), (o_i, 2)]));
                        let p13 = g.coeff(&exps(&[(o_j, 1), (o_i, 3)]));
                        let lambda = p22 / 6.0;
                        let kappa = (p31 - lambda * 4.0) / a;
                        let h = (p13 - lambda * 4.0) / b;
                        let b1 = add_column(basis, k, o_j, h);
                        out.push(add_column(&b1, k, o_i, kappa));
                    }
                }
                (LineType::L, LineType::C) => {
                    for _ in 0..3 {
                        out.push(add_column(basis, k, o_j, ctx.gaussian()));
                    }
                }
                (LineType::C, LineType::L) => {}
                (LineType::C, LineType::C) => {
                    let a = g.coeff(&exps(&[(o_j, 1), (k, 3)]));
                    let b = g.coeff(&exps(&[(o_i, 1), (k, 3)]));
                    if a.norm() > tol.zero_eps {
                        out.push(add_column(basis, o_j, o_i, b / a));
                    }
                }
            }
        }
    }
    // a plane with a rank-1 point next to a line plane: rotate the shared
    // variable onto that fourth power
    for &k in &c2 {
        for j in (0..3).filter(|&j| j != k) {
            let Ok(cfg) = &configs[j] else { continue };
            let Some((a, b)) = cfg.singular_point else { continue };
            let Ok(d) = binary_decompose(&cfg.form_at(a, b), tol) else { continue };
            if d.len() != 1 {
                continue;
            }
            let m = 3 - j - k;
            let (s, _) = other_two(j);
            let lin = &d.terms[0].linear;
            let (cm, ck) = if s == m { (lin[0], lin[1]) } else { (lin[1], lin[0]) };
            let mut b2 = basis.clone();
            for r in 0..3 {
                b2[(r, m)] = cm * basis[(r, m)] + ck * basis[(r, k)];
            }
            out.push(b2);
        }
    }
    out
}

pub(crate) fn general_in_frame(f: &Form, frame: &Frame, ctx: &mut Ctx) -> Result<Decomposition> {
    ctx.nested(|ctx| {
        let tol = ctx.tol;
        let sys = general_system(f, frame, tol)?;
        if let Some(i) = sys.w_dims.iter().position(|&d| d == 2) {
            let (j, k) = other_two(i);
            return wu::two_lines(f, &frame.op(j), &frame.op(k), ctx);
        }
        let configs: [Result<RConfiguration>; 3] = std::array::from_fn(|i| sys.classify(i, tol));
        if let Some(d) = sys.search(f, &configs, ctx) {
            return Ok(d);
        }
        let g = frame.express(f);
        let mut diagnostics = Vec::new();
        for basis in substitutions(&g, &frame.basis, &configs, ctx, tol) {
            match Frame::from_basis(basis).and_then(|fr| general_in_frame(f, &fr, ctx)) {
                Ok(d) => return Ok(d),
                Err(e) => diagnostics.push(e.to_string()),
            }
        }
        let cases: Vec<String> = configs
            .iter()
            .map(|c| match c {
                Ok(cfg) => format!("{:?}", cfg.case),
                Err(e) => e.to_string(),
            })
            .collect();
        Err(Error::CaseAnalysisExhausted(format!(
            "planes [{}]; {}",
            cases.join(", "),
            if diagnostics.is_empty() {
                "no substitution applies".to_string()
            } else {
                diagnostics.join("; ")
            }
        )))
    })
}

/// Decompose a ternary quartic from the splitting system of three
/// independent apolar operators.
pub fn decompose_general(f: &Form, sys: &SplitterSystem, tol: &Tolerance) -> Result<Decomposition> {
    super::check_ternary_quartic(f)?;
    if sys.kind != SplitterKind::General {
        return Err(Error::HypothesisViolation(
            "splitting system does not come from independent operators".into(),
        ));
    }
    let mut ctx = Ctx::new(tol, 0x6e2);
    general_in_frame(f, &sys.frame, &mut ctx)
}
