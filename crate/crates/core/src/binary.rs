//! Rank theory of binary forms.
//!
//! Sylvester's algorithm gives ranks and decompositions of binary forms of
//! any degree. For quartics the rank strata are read off the 3x3
//! catalecticant, and planes of quartics containing two distinguished
//! directions (two fourth powers, or a fourth power and its tangent) are
//! classified by the zero locus of the catalecticant determinant.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::apolarity::{polarization, power, DualForm, Form};
use crate::decomposition::{Decomposition, Provenance, Term};
use crate::error::{Error, Result};
use crate::numerics::{
    self, c, fit_polynomial, kernel_basis, poly_roots, Matrix, Scalar, Tolerance, Vector, ONE,
    ZERO,
};

/// Chordal distance between two points of the projective line.
pub fn chordal_distance(p: &[Scalar; 2], q: &[Scalar; 2]) -> f64 {
    let cross = (p[0] * q[1] - p[1] * q[0]).norm();
    let np = (p[0].norm_sqr() + p[1].norm_sqr()).sqrt();
    let nq = (q[0].norm_sqr() + q[1].norm_sqr()).sqrt();
    if np == 0.0 || nq == 0.0 {
        return 0.0;
    }
    cross / (np * nq)
}

/// Zeros on the projective line of a binary form given by its coefficients
/// in graded lexicographic order (`u^r, u^{r-1} v, ..., v^r`). Points are
/// unit vectors, listed with multiplicity.
pub fn binary_roots(coeffs: &[Scalar], tol: &Tolerance) -> Result<Vec<[Scalar; 2]>> {
    let r = coeffs.len().saturating_sub(1);
    if r == 0 {
        return Ok(Vec::new());
    }
    let q = Form::new(2, r, coeffs.to_vec())?;
    if q.norm() <= tol.zero_eps {
        return Err(Error::DegenerateInput("the zero binary form has no roots".into()));
    }
    // Rotate so that no root sits near the point at infinity of the chart
    // u = 1: pick the rotation maximizing the v^r coefficient.
    let mut best: Option<(f64, Matrix, Form)> = None;
    for k in 0..12 {
        let theta = 0.37 + k as f64 * std::f64::consts::PI / 12.0;
        let (s, co) = theta.sin_cos();
        let rot = Matrix::from_row_slice(2, 2, &[c(co), c(-s), c(s), c(co)]);
        let g = q.substitute(&rot);
        let lead = g.coeffs()[r].norm() / g.norm();
        if best.as_ref().map_or(true, |(b, _, _)| lead > *b) {
            best = Some((lead, rot, g));
        }
    }
    let (_, rot, g) = best.expect("at least one rotation");
    // g(1, t) = sum_k g_k t^k in ascending order
    let t_roots = poly_roots(g.coeffs(), tol)?;
    let mut out = Vec::with_capacity(r);
    for t in t_roots {
        let p0 = rot[(0, 0)] + rot[(0, 1)] * t;
        let p1 = rot[(1, 0)] + rot[(1, 1)] * t;
        let n = (p0.norm_sqr() + p1.norm_sqr()).sqrt();
        out.push([p0 / n, p1 / n]);
    }
    // roots lost to a vanishing leading coefficient lie at infinity of the
    // rotated chart
    while out.len() < r {
        out.push([rot[(0, 1)], rot[(1, 1)]]);
    }
    Ok(out)
}

/// Smallest pairwise chordal distance between the roots (infinite when
/// there is at most one root).
pub fn min_root_separation(roots: &[[Scalar; 2]]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..roots.len() {
        for j in (i + 1)..roots.len() {
            best = best.min(chordal_distance(&roots[i], &roots[j]));
        }
    }
    best
}

fn check_binary(f: &Form) -> Result<()> {
    if f.nvars() != 2 {
        return Err(Error::VariableMismatch {
            expected: 2,
            found: f.nvars(),
        });
    }
    Ok(())
}

/// Candidate apolar operators of degree `r` whose roots are pairwise
/// distinct, best separated first.
fn square_free_candidates(
    f: &Form,
    r: usize,
    tol: &Tolerance,
) -> Result<Vec<(f64, Vec<[Scalar; 2]>)>> {
    let map = polarization(f, r)?;
    let kernel = kernel_basis(&map.matrix, tol);
    if kernel.is_empty() {
        return Ok(Vec::new());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5157_4c56 + r as u64);
    let trials = if kernel.len() == 1 { 1 } else { 12 };
    let mut out = Vec::new();
    for _ in 0..trials {
        let mut q = Vector::zeros(r + 1);
        if kernel.len() == 1 {
            q = kernel[0].clone();
        } else {
            for k in &kernel {
                let w = Scalar::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                q += k * w;
            }
        }
        let coeffs: Vec<Scalar> = q.iter().copied().collect();
        if numerics::norm(&coeffs) <= tol.zero_eps {
            continue;
        }
        let roots = binary_roots(&coeffs, tol)?;
        let sep = min_root_separation(&roots);
        if sep > tol.sep_eps() {
            out.push((sep, roots));
        }
    }
    out.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
    Ok(out)
}

/// Waring rank of a nonzero binary form: the least `r` such that some
/// apolar operator of degree `r` has distinct roots.
pub fn binary_rank(f: &Form, tol: &Tolerance) -> Result<usize> {
    check_binary(f)?;
    if f.norm() <= tol.zero_eps {
        return Err(Error::ZeroForm);
    }
    for r in 1..=f.degree().max(1) {
        if !square_free_candidates(f, r, tol)?.is_empty() {
            return Ok(r);
        }
    }
    Ok(f.degree().max(1))
}

fn solve_coefficients(f: &Form, roots: &[[Scalar; 2]], tol: &Tolerance) -> Decomposition {
    let d = f.degree();
    let cols: Vec<Form> = roots.iter().map(|p| power(&p[..], d)).collect();
    let mut a = Matrix::zeros(f.coeffs().len(), cols.len());
    for (j, col) in cols.iter().enumerate() {
        for (i, &v) in col.coeffs().iter().enumerate() {
            a[(i, j)] = v;
        }
    }
    let (x, _) = numerics::least_squares(&a, &Vector::from_column_slice(f.coeffs()), tol);
    Decomposition {
        nvars: 2,
        degree: d,
        terms: roots
            .iter()
            .zip(x.iter())
            .map(|(p, &coef)| Term {
                coef,
                linear: p.to_vec(),
            })
            .collect(),
        provenance: Provenance::Binary,
    }
}

/// Sylvester decomposition of a nonzero binary form with `binary_rank(f)`
/// terms.
///
/// When the minimal-length decomposition is too ill conditioned to meet
/// `residual_eps` (nearly coincident roots), longer apolar operators are
/// tried, so the result may then exceed the rank.
pub fn binary_decompose(f: &Form, tol: &Tolerance) -> Result<Decomposition> {
    let rank = binary_rank(f, tol)?;
    binary_decompose_from(f, rank, f.degree().max(rank), tol)
}

/// Sylvester decomposition searching lengths `min_len..=max_len`.
pub(crate) fn binary_decompose_from(
    f: &Form,
    min_len: usize,
    max_len: usize,
    tol: &Tolerance,
) -> Result<Decomposition> {
    check_binary(f)?;
    if f.norm() <= tol.zero_eps {
        return Err(Error::ZeroForm);
    }
    if f.degree() == 0 {
        return Ok(Decomposition {
            nvars: 2,
            degree: 0,
            terms: vec![Term {
                coef: f.coeffs()[0],
                linear: vec![ONE, ZERO],
            }],
            provenance: Provenance::Binary,
        });
    }
    let mut best: Option<(f64, Decomposition)> = None;
    for r in min_len..=max_len {
        for (_, roots) in square_free_candidates(f, r, tol)? {
            let mut dec = solve_coefficients(f, &roots, tol);
            dec.refit(f, tol);
            let res = dec.residual(f);
            if res <= tol.residual_eps * 1e-2 {
                dec.normalize();
                return Ok(dec);
            }
            if best.as_ref().map_or(true, |(b, _)| res < *b) {
                best = Some((res, dec));
            }
        }
        if let Some((res, _)) = &best {
            if *res <= tol.residual_eps {
                break;
            }
        }
    }
    match best {
        Some((res, mut dec)) if res <= tol.residual_eps => {
            dec.normalize();
            Ok(dec)
        }
        Some((res, _)) => Err(Error::SearchExhausted(format!(
            "binary decomposition residual {res:.3e} exceeds tolerance"
        ))),
        None => Err(Error::SearchExhausted("no square-free apolar operator".into())),
    }
}

/// Rank stratum of a binary quartic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QuarticStratum {
    Zero,
    /// Rank 1: a fourth power.
    Power,
    /// Rank 2: on a secant line of the rational normal quartic.
    Secant,
    /// Rank 3: off the secant hypersurface.
    Generic,
    /// Rank 4: on a tangent line, off the curve.
    Tangent,
}

impl QuarticStratum {
    pub fn rank(&self) -> usize {
        match self {
            Self::Zero => 0,
            Self::Power => 1,
            Self::Secant => 2,
            Self::Generic => 3,
            Self::Tangent => 4,
        }
    }
}

fn check_quartic(f: &Form) -> Result<()> {
    check_binary(f)?;
    if f.degree() != 4 {
        return Err(Error::DegreeMismatch {
            expected: 4,
            found: f.degree(),
        });
    }
    Ok(())
}

/// Kernel generator of the middle catalecticant and the ratio
/// `sigma_min / sigma_max` measuring how close it is to singular.
fn middle_kernel(f: &Form) -> (Vec<Scalar>, f64) {
    let cat = polarization(f, 2).expect("quartic").matrix;
    let (v, ratio) = numerics::smallest_right_singular(&cat);
    (v.iter().copied().collect(), ratio)
}

/// Whether a binary quadratic (dual, graded lex coefficients) is a square.
fn quadratic_is_square(q: &[Scalar], tol: &Tolerance) -> bool {
    let n2 = q.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let disc = q[1] * q[1] - q[0] * q[2] * 4.0;
    disc.norm() <= tol.rank_eps * n2
}

/// Stratum of a binary quartic, read from the middle catalecticant.
pub fn quartic_stratum(f: &Form, tol: &Tolerance) -> Result<QuarticStratum> {
    check_quartic(f)?;
    if f.norm() <= tol.zero_eps {
        return Ok(QuarticStratum::Zero);
    }
    let cat = polarization(f, 2)?.matrix;
    let sv = numerics::singular_values(&cat);
    if sv[1] <= tol.rank_eps * sv[0] {
        return Ok(QuarticStratum::Power);
    }
    if sv[2] > tol.rank_eps * sv[0] {
        return Ok(QuarticStratum::Generic);
    }
    let (q, _) = middle_kernel(f);
    if quadratic_is_square(&q, tol) {
        Ok(QuarticStratum::Tangent)
    } else {
        Ok(QuarticStratum::Secant)
    }
}

/// Which of the two distinguished points at infinity a line passes through.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InfinityPoint {
    /// The direction of the first generator (`y`, or `x0^4`).
    First,
    /// The direction of the second generator (`z`, or `x0^3 x1`).
    Second,
}

/// Type of the rank loci in an affine plane of binary quartics.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlaneCase {
    /// Conic through both points at infinity.
    C11,
    /// Line through neither point at infinity.
    C12,
    /// Line through one point at infinity; every point has rank 4.
    C2,
    /// Parabola tangent to the line at infinity at `x0^4`.
    D11,
    /// Line not through `x0^4` at infinity.
    D12,
    /// No point of rank other than 3.
    D2,
}

/// Affine curve in the `(a, b)` chart `f0 + a y + b z`.
#[derive(Clone, Debug, PartialEq)]
pub enum Locus {
    Empty,
    /// `c[0] + c[1] a + c[2] b = 0`.
    Line([Scalar; 3]),
    /// `c[0] + c[1] a + c[2] b + c[3] a^2 + c[4] a b + c[5] b^2 = 0`.
    Conic([Scalar; 6]),
}

impl Locus {
    pub fn eval(&self, a: Scalar, b: Scalar) -> Option<Scalar> {
        match self {
            Locus::Empty => None,
            Locus::Line(l) => Some(l[0] + l[1] * a + l[2] * b),
            Locus::Conic(q) => {
                Some(q[0] + q[1] * a + q[2] * b + q[3] * a * a + q[4] * a * b + q[5] * b * b)
            }
        }
    }
}

/// Rank-4 points of the affine plane.
#[derive(Clone, Debug, PartialEq)]
pub enum RankFourLocus {
    Empty,
    Points(Vec<(Scalar, Scalar)>),
    /// The whole line, with the same coefficients as [`Locus::Line`].
    Line([Scalar; 3]),
}

impl RankFourLocus {
    pub fn points(&self) -> &[(Scalar, Scalar)] {
        match self {
            RankFourLocus::Points(p) => p,
            _ => &[],
        }
    }
}

/// Classified rank loci of the plane `span(f0, y, z)` in the affine chart
/// `f0 + a y + b z`.
#[derive(Clone, Debug, PartialEq)]
pub struct RConfiguration {
    pub case: PlaneCase,
    pub plane_basis: [Form; 3],
    /// Points of rank other than 3.
    pub r_locus: Locus,
    /// Points of rank 4.
    pub r_prime: RankFourLocus,
    /// Rank-1 point of a degenerate conic.
    pub singular_point: Option<(Scalar, Scalar)>,
    /// For lines through a point at infinity (C2), which one.
    pub infinity: Option<InfinityPoint>,
    /// The determinant `det f_{2,2}(f0 + a y + b z)` as a polynomial in
    /// `(a, b)`, coefficients ordered as in [`Locus::Conic`].
    pub determinant: [Scalar; 6],
}

impl RConfiguration {
    pub fn form_at(&self, a: Scalar, b: Scalar) -> Form {
        let [f0, y, z] = &self.plane_basis;
        f0.axpy(a, y).axpy(b, z)
    }

    pub fn determinant_at(&self, a: Scalar, b: Scalar) -> Scalar {
        Locus::Conic(self.determinant).eval(a, b).expect("conic")
    }
}

/// Plane spanned by `f0` and two generators, normalized to unit norm.
struct Chart {
    f0: Form,
    y: Form,
    z: Form,
    n0: f64,
    ny: f64,
    nz: f64,
}

impl Chart {
    fn new(f0: &Form, y: &Form, z: &Form) -> Self {
        let (n0, ny, nz) = (f0.norm(), y.norm(), z.norm());
        Self {
            f0: f0.scale(c(1.0 / n0)),
            y: y.scale(c(1.0 / ny)),
            z: z.scale(c(1.0 / nz)),
            n0,
            ny,
            nz,
        }
    }

    fn form(&self, a: Scalar, b: Scalar) -> Form {
        self.f0.axpy(a, &self.y).axpy(b, &self.z)
    }

    fn cat(&self, a: Scalar, b: Scalar) -> Matrix {
        polarization(&self.form(a, b), 2).expect("quartic").matrix
    }

    fn det(&self, a: Scalar, b: Scalar) -> Scalar {
        numerics::det(&self.cat(a, b))
    }

    /// Original chart coordinates of a normalized point.
    fn to_original(&self, a: Scalar, b: Scalar) -> (Scalar, Scalar) {
        (a * (self.n0 / self.ny), b * (self.n0 / self.nz))
    }

    /// Convert a quadratic in normalized coordinates into original ones.
    fn conic_to_original(&self, q: &[Scalar; 6]) -> [Scalar; 6] {
        let sa = self.ny / self.n0;
        let sb = self.nz / self.n0;
        let k = self.n0.powi(3);
        [
            q[0] * k,
            q[1] * k * sa,
            q[2] * k * sb,
            q[3] * k * sa * sa,
            q[4] * k * sa * sb,
            q[5] * k * sb * sb,
        ]
    }

    fn line_to_original(&self, l: &[Scalar; 3]) -> [Scalar; 3] {
        let q = self.conic_to_original(&[l[0], l[1], l[2], ZERO, ZERO, ZERO]);
        [q[0], q[1], q[2]]
    }
}

/// Biquadratic interpolation of the determinant on the grid `{-1,0,1}^2`.
/// Returns the quadratic part and the size of the cubic and quartic terms.
fn fit_determinant(chart: &Chart) -> ([Scalar; 6], f64) {
    let nodes = [-1.0, 0.0, 1.0];
    // Lagrange basis on {-1, 0, 1} expressed in powers 1, t, t^2
    let basis = [[0.0, -0.5, 0.5], [1.0, 0.0, -1.0], [0.0, 0.5, 0.5]];
    let mut coef = [[ZERO; 3]; 3];
    for (i, &a) in nodes.iter().enumerate() {
        for (j, &b) in nodes.iter().enumerate() {
            let v = chart.det(c(a), c(b));
            for p in 0..3 {
                for q in 0..3 {
                    coef[p][q] += v * basis[i][p] * basis[j][q];
                }
            }
        }
    }
    let high = coef[2][1].norm() + coef[1][2].norm() + coef[2][2].norm();
    (
        [coef[0][0], coef[1][0], coef[0][1], coef[2][0], coef[1][1], coef[0][2]],
        high,
    )
}

fn plane_dimension(f0: &Form, y: &Form, z: &Form, tol: &Tolerance) -> usize {
    let mut m = Matrix::zeros(f0.coeffs().len(), 3);
    for (j, g) in [f0, y, z].iter().enumerate() {
        for (i, &v) in g.coeffs().iter().enumerate() {
            m[(i, j)] = v / g.norm().max(f64::MIN_POSITIVE);
        }
    }
    numerics::matrix_rank(&m, tol)
}

/// Adjugate of a 3x3 matrix.
fn adjugate3(m: &Matrix) -> Matrix {
    let mut adj = Matrix::zeros(3, 3);
    for i in 0..3 {
        for j in 0..3 {
            let r: Vec<usize> = (0..3).filter(|&k| k != j).collect();
            let s: Vec<usize> = (0..3).filter(|&k| k != i).collect();
            let minor = m[(r[0], s[0])] * m[(r[1], s[1])] - m[(r[0], s[1])] * m[(r[1], s[0])];
            adj[(i, j)] = if (i + j) % 2 == 0 { minor } else { -minor };
        }
    }
    adj
}

/// Rank-4 points on a parametrized curve of the chart.
///
/// `param(t)` gives `(den(t), a(t), b(t))` with `den * cat(a, b)` polynomial
/// of degree `deg` in `t`. The kernel of the catalecticant along the curve is
/// a column of the adjugate, and rank-4 points are where that kernel
/// quadratic is a square.
fn rank_four_on_curve<P>(
    chart: &Chart,
    deg: usize,
    tol: &Tolerance,
    param: P,
) -> Result<Vec<(Scalar, Scalar)>>
where
    P: Fn(Scalar) -> (Scalar, Scalar, Scalar),
{
    let r = Vector::from_column_slice(&[
        Scalar::new(0.31, 0.72),
        Scalar::new(-0.53, 0.21),
        Scalar::new(0.88, -0.41),
    ]);
    let disc_at = |t: Scalar| {
        let (den, a, b) = param(t);
        let m = chart.cat(a, b) * den;
        let q = adjugate3(&m) * &r;
        q[1] * q[1] - q[0] * q[2] * 4.0
    };
    let poly = fit_polynomial(4 * deg, 1.0, disc_at);
    let scale = poly.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale <= tol.zero_eps {
        return Err(Error::Classification(
            "rank-4 condition vanishes along the whole curve".into(),
        ));
    }
    let roots = poly_roots(&poly, tol)?;
    let mut pts: Vec<(Scalar, Scalar)> = Vec::new();
    for t in roots {
        let (den, a, b) = param(t);
        if den.norm() <= tol.rank_eps || !numerics::is_finite(a) || !numerics::is_finite(b) {
            continue;
        }
        let g = chart.form(a, b);
        if quartic_stratum(&g, tol)? == QuarticStratum::Tangent
            && !pts
                .iter()
                .any(|(pa, pb)| (pa - a).norm() + (pb - b).norm() <= tol.sep_eps() * (1.0 + a.norm() + b.norm()))
        {
            pts.push((a, b));
        }
    }
    Ok(pts)
}

fn line_param(l: [Scalar; 3]) -> impl Fn(Scalar) -> (Scalar, Scalar, Scalar) {
    move |t| {
        if l[1].norm() >= l[2].norm() {
            (ONE, -(l[0] + l[2] * t) / l[1], t)
        } else {
            (ONE, t, -(l[0] + l[1] * t) / l[2])
        }
    }
}

/// Rank-1 points on the line `b = b0` of the chart.
fn rank_one_on_horizontal(chart: &Chart, b0: Scalar, tol: &Tolerance) -> Result<Vec<Scalar>> {
    // all 2x2 minors of f_{3,1} vanish at a rank-1 point; a generic
    // combination of them is a quadratic in a
    let weights: Vec<Scalar> = (0..6)
        .map(|k| Scalar::new((0.7 * k as f64 + 0.3).sin(), (1.3 * k as f64 + 0.1).cos()))
        .collect();
    let comb = |a: Scalar| {
        let m = polarization(&chart.form(a, b0), 1).expect("quartic").matrix;
        let mut acc = ZERO;
        let mut k = 0;
        for i in 0..4 {
            for j in (i + 1)..4 {
                let minor = m[(i, 0)] * m[(j, 1)] - m[(i, 1)] * m[(j, 0)];
                acc += weights[k % weights.len()] * minor;
                k += 1;
            }
        }
        acc
    };
    let poly = fit_polynomial(2, 1.0, comb);
    let scale = poly.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut out = Vec::new();
    if scale <= tol.zero_eps {
        return Ok(out);
    }
    for a in poly_roots(&poly, tol)? {
        if quartic_stratum(&chart.form(a, b0), tol)? == QuarticStratum::Power {
            out.push(a);
        }
    }
    Ok(out)
}

/// Classify the plane `span(f0, y, z)` where `y`, `z` are fourth powers of
/// independent linear forms.
pub fn classify_plane(f0: &Form, y: &Form, z: &Form, tol: &Tolerance) -> Result<RConfiguration> {
    for g in [f0, y, z] {
        check_quartic(g)?;
    }
    for g in [y, z] {
        if quartic_stratum(g, tol)? != QuarticStratum::Power {
            return Err(Error::DegenerateInput(
                "plane generators must be fourth powers".into(),
            ));
        }
    }
    let dim = plane_dimension(f0, y, z, tol);
    if dim < 3 {
        return Err(Error::DimensionCollapse(dim));
    }
    let chart = Chart::new(f0, y, z);
    let (q, high) = fit_determinant(&chart);
    let scale = q.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if scale <= tol.zero_eps {
        return Err(Error::Classification("determinant vanishes on the whole plane".into()));
    }
    let eps = tol.rank_eps * scale;
    if high > eps || q[3].norm() > eps || q[5].norm() > eps {
        return Err(Error::Classification(format!(
            "determinant is not bilinear (residual terms {:.3e})",
            high + q[3].norm() + q[5].norm()
        )));
    }
    let (d00, d10, d01, d11) = (q[0], q[1], q[2], q[4]);
    let zero = |v: Scalar| v.norm() <= eps;
    let determinant = chart.conic_to_original(&q);
    let plane_basis = [f0.clone(), y.clone(), z.clone()];

    if !zero(d11) {
        let kappa = (d10 * d01 - d00 * d11) / (d11 * d11);
        let (a_s, b_s) = (-d01 / d11, -d10 / d11);
        let conic = Locus::Conic(chart.conic_to_original(&[d00, d10, d01, ZERO, d11, ZERO]));
        let reducible = (d00 * d11 - d10 * d01).norm() <= tol.rank_eps * scale * scale;
        if reducible {
            let g = chart.form(a_s, b_s);
            if quartic_stratum(&g, tol)? != QuarticStratum::Power {
                return Err(Error::Classification(
                    "singular point of a reducible conic is not a fourth power".into(),
                ));
            }
            return Ok(RConfiguration {
                case: PlaneCase::C11,
                plane_basis,
                r_locus: conic,
                r_prime: RankFourLocus::Empty,
                singular_point: Some(chart.to_original(a_s, b_s)),
                infinity: None,
                determinant,
            });
        }
        let pts = rank_four_on_curve(&chart, 2, tol, |t| (t, a_s + t, b_s + kappa / t))?;
        return Ok(RConfiguration {
            case: PlaneCase::C11,
            plane_basis,
            r_locus: conic,
            r_prime: points_to_original(&chart, pts),
            singular_point: None,
            infinity: None,
            determinant,
        });
    }

    let line = [d00, d10, d01];
    match (zero(d10), zero(d01)) {
        (false, false) => {
            let pts = rank_four_on_curve(&chart, 1, tol, line_param(line))?;
            Ok(RConfiguration {
                case: PlaneCase::C12,
                plane_basis,
                r_locus: Locus::Line(chart.line_to_original(&line)),
                r_prime: points_to_original(&chart, pts),
                singular_point: None,
                infinity: None,
                determinant,
            })
        }
        (true, false) | (false, true) => {
            let infinity = if zero(d10) {
                InfinityPoint::First
            } else {
                InfinityPoint::Second
            };
            let mut l = line;
            if zero(d10) {
                l[1] = ZERO;
            } else {
                l[2] = ZERO;
            }
            let l = chart.line_to_original(&l);
            Ok(RConfiguration {
                case: PlaneCase::C2,
                plane_basis,
                r_locus: Locus::Line(l),
                r_prime: RankFourLocus::Line(l),
                singular_point: None,
                infinity: Some(infinity),
                determinant,
            })
        }
        (true, true) => Err(Error::Classification(
            "determinant is constant on a plane through two fourth powers".into(),
        )),
    }
}

fn points_to_original(chart: &Chart, pts: Vec<(Scalar, Scalar)>) -> RankFourLocus {
    if pts.is_empty() {
        RankFourLocus::Empty
    } else {
        RankFourLocus::Points(pts.into_iter().map(|(a, b)| chart.to_original(a, b)).collect())
    }
}

/// Classify the plane `span(f0, x0^4, x0^3 x1)`.
pub fn classify_plane_degenerate(f0: &Form, tol: &Tolerance) -> Result<RConfiguration> {
    check_quartic(f0)?;
    let y = Form::monomial(&[4, 0], ONE);
    let z = Form::monomial(&[3, 1], ONE);
    let dim = plane_dimension(f0, &y, &z, tol);
    if dim < 3 {
        return Err(Error::DimensionCollapse(dim));
    }
    let chart = Chart::new(f0, &y, &z);
    let (q, high) = fit_determinant(&chart);
    let scale = q.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if scale <= tol.zero_eps {
        return Err(Error::Classification("determinant vanishes on the whole plane".into()));
    }
    let eps = tol.rank_eps * scale;
    if high > eps || q[3].norm() > eps || q[4].norm() > eps {
        return Err(Error::Classification(format!(
            "determinant is not a parabola with axis along x0^4 (residual terms {:.3e})",
            high + q[3].norm() + q[4].norm()
        )));
    }
    let (c00, c10, c01, c02) = (q[0], q[1], q[2], q[5]);
    let zero = |v: Scalar| v.norm() <= eps;
    let determinant = chart.conic_to_original(&q);
    let plane_basis = [f0.clone(), y.clone(), z.clone()];

    if !zero(c02) {
        let conic = Locus::Conic(chart.conic_to_original(&[c00, c10, c01, ZERO, ZERO, c02]));
        if zero(c10) {
            // degenerate parabola: a double line b = b0
            let b0 = -c01 / (c02 * 2.0);
            let disc = c01 * c01 - c00 * c02 * 4.0;
            if disc.norm() > tol.rank_eps * scale * scale {
                return Err(Error::Classification(
                    "degenerate parabola splits into two parallel lines".into(),
                ));
            }
            let ones = rank_one_on_horizontal(&chart, b0, tol)?;
            let a0 = *ones.first().ok_or_else(|| {
                Error::Classification("double line without a fourth power".into())
            })?;
            return Ok(RConfiguration {
                case: PlaneCase::D11,
                plane_basis,
                r_locus: conic,
                r_prime: RankFourLocus::Empty,
                singular_point: Some(chart.to_original(a0, b0)),
                infinity: None,
                determinant,
            });
        }
        let pts = rank_four_on_curve(&chart, 2, tol, |t| {
            (ONE, -(c00 + c01 * t + c02 * t * t) / c10, t)
        })?;
        return Ok(RConfiguration {
            case: PlaneCase::D11,
            plane_basis,
            r_locus: conic,
            r_prime: points_to_original(&chart, pts),
            singular_point: None,
            infinity: None,
            determinant,
        });
    }
    if !zero(c10) {
        let line = [c00, c10, c01];
        let pts = rank_four_on_curve(&chart, 1, tol, line_param(line))?;
        return Ok(RConfiguration {
            case: PlaneCase::D12,
            plane_basis,
            r_locus: Locus::Line(chart.line_to_original(&line)),
            r_prime: points_to_original(&chart, pts),
            singular_point: None,
            infinity: None,
            determinant,
        });
    }
    if !zero(c01) {
        return Err(Error::Classification(
            "line through x0^4 at infinity in a degenerate plane".into(),
        ));
    }
    // constant nonzero determinant: every point has rank 3
    Ok(RConfiguration {
        case: PlaneCase::D2,
        plane_basis,
        r_locus: Locus::Empty,
        r_prime: RankFourLocus::Empty,
        singular_point: None,
        infinity: None,
        determinant,
    })
}

/// The dual quadratic spanning the kernel of the middle catalecticant of a
/// non-generic quartic.
pub fn middle_kernel_generator(f: &Form) -> Result<DualForm> {
    check_quartic(f)?;
    let (q, _) = middle_kernel(f);
    DualForm::new(2, 2, q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn mono(e0: usize, e1: usize) -> Form {
        Form::monomial(&[e0, e1], ONE)
    }

    #[test]
    fn ranks_of_small_examples() {
        assert_eq!(binary_rank(&mono(4, 0), &tol()).unwrap(), 1);
        assert_eq!(binary_rank(&mono(3, 1), &tol()).unwrap(), 4);
        assert_eq!(binary_rank(&mono(2, 2), &tol()).unwrap(), 3);
        assert_eq!(binary_rank(&(&mono(4, 0) + &mono(0, 4)), &tol()).unwrap(), 2);
        assert_eq!(binary_rank(&mono(1, 1), &tol()).unwrap(), 2);
        assert!(matches!(binary_rank(&Form::zero(2, 4), &tol()), Err(Error::ZeroForm)));
    }

    #[test]
    fn sylvester_decompositions_reconstruct() {
        for f in [
            &mono(4, 0) + &mono(0, 4),
            mono(1, 1),
            mono(3, 1),
            mono(2, 2),
            mono(3, 2),
        ] {
            let d = binary_decompose(&f, &tol()).unwrap();
            assert_eq!(d.len(), binary_rank(&f, &tol()).unwrap());
            assert!(d.residual(&f) <= 1e-10, "residual {}", d.residual(&f));
        }
        let d = binary_decompose(&(&mono(4, 0) + &mono(0, 4)), &tol()).unwrap();
        for t in &d.terms {
            // each linear form is proportional to x0 or x1
            assert!(t.linear[0].norm() < 1e-9 || t.linear[1].norm() < 1e-9);
        }
    }

    #[test]
    fn strata_of_examples() {
        let t = tol();
        assert_eq!(quartic_stratum(&mono(4, 0), &t).unwrap(), QuarticStratum::Power);
        assert_eq!(
            quartic_stratum(&(&mono(4, 0) + &mono(0, 4)), &t).unwrap(),
            QuarticStratum::Secant
        );
        assert_eq!(quartic_stratum(&mono(2, 2), &t).unwrap(), QuarticStratum::Generic);
        assert_eq!(quartic_stratum(&mono(3, 1), &t).unwrap(), QuarticStratum::Tangent);
        assert_eq!(quartic_stratum(&Form::zero(2, 4), &t).unwrap(), QuarticStratum::Zero);
    }

    #[test]
    fn roots_include_point_at_infinity() {
        // u * v: roots (0,1) and (1,0)
        let r = binary_roots(&[ZERO, ONE, ZERO], &tol()).unwrap();
        assert_eq!(r.len(), 2);
        assert!(min_root_separation(&r) > 0.99);
    }

    #[test]
    fn conic_case_x0sq_x1sq() {
        let cfg = classify_plane(&mono(2, 2), &mono(4, 0), &mono(0, 4), &tol()).unwrap();
        assert_eq!(cfg.case, PlaneCase::C11);
        assert!(cfg.singular_point.is_none());
        // determinant 576ab - 16
        let d = cfg.determinant;
        assert!((d[0] - c(-16.0)).norm() < 1e-9);
        assert!((d[4] - c(576.0)).norm() < 1e-9);
        assert!(d[1].norm() < 1e-9 && d[2].norm() < 1e-9);
        // the conic ab = 1/36 lies in R
        let a = c(0.5);
        let b = c(1.0 / 18.0);
        assert!(cfg.r_locus.eval(a, b).unwrap().norm() < 1e-9);
        assert_ne!(
            quartic_stratum(&cfg.form_at(a, b), &tol()).unwrap(),
            QuarticStratum::Generic
        );
    }

    #[test]
    fn line_case_transverse() {
        let f0 = &mono(3, 1) + &mono(1, 3);
        let cfg = classify_plane(&f0, &mono(4, 0), &mono(0, 4), &tol()).unwrap();
        assert_eq!(cfg.case, PlaneCase::C12);
        let d = cfg.determinant;
        assert!((d[1] - c(-216.0)).norm() < 1e-9 && (d[2] - c(-216.0)).norm() < 1e-9);
        assert!(d[0].norm() < 1e-9 && d[4].norm() < 1e-9);
    }

    #[test]
    fn line_case_through_infinity() {
        let cfg = classify_plane(&mono(3, 1), &mono(4, 0), &mono(0, 4), &tol()).unwrap();
        assert_eq!(cfg.case, PlaneCase::C2);
        assert_eq!(cfg.infinity, Some(InfinityPoint::First));
        let d = cfg.determinant;
        assert!((d[2] - c(-216.0)).norm() < 1e-9);
        assert!(d[0].norm() < 1e-9 && d[1].norm() < 1e-9);
        assert!(matches!(cfg.r_prime, RankFourLocus::Line(_)));
        // every point of b = 0 has rank 4
        for a in [-2.0, 0.5, 3.0] {
            assert_eq!(
                quartic_stratum(&cfg.form_at(c(a), ZERO), &tol()).unwrap(),
                QuarticStratum::Tangent
            );
        }
    }

    #[test]
    fn reducible_conic_has_rank_one_singular_point() {
        // f0 = (x0 + x1)^4: the plane contains a fourth power off L
        let f0 = power(&[ONE, ONE], 4);
        let cfg = classify_plane(&f0, &mono(4, 0), &mono(0, 4), &tol()).unwrap();
        assert_eq!(cfg.case, PlaneCase::C11);
        let (a, b) = cfg.singular_point.expect("reducible");
        assert!(a.norm() < 1e-9 && b.norm() < 1e-9);
        assert_eq!(cfg.r_prime, RankFourLocus::Empty);
    }

    #[test]
    fn dimension_collapse_detected() {
        let f0 = &mono(4, 0) + &mono(0, 4);
        assert!(matches!(
            classify_plane(&f0, &mono(4, 0), &mono(0, 4), &tol()),
            Err(Error::DimensionCollapse(2))
        ));
        assert!(matches!(
            classify_plane_degenerate(&mono(3, 1), &tol()),
            Err(Error::DimensionCollapse(2))
        ));
    }

    #[test]
    fn degenerate_plane_cases() {
        let cfg = classify_plane_degenerate(&mono(2, 2), &tol()).unwrap();
        assert_eq!(cfg.case, PlaneCase::D2);
        assert_eq!(cfg.r_locus, Locus::Empty);

        // f0 = x1^4: determinant -216 b^2, double line b = 0 with rank-1
        // point at the origin
        let cfg = classify_plane_degenerate(&mono(0, 4), &tol()).unwrap();
        assert_eq!(cfg.case, PlaneCase::D11);
        assert!((cfg.determinant[5] - c(-216.0)).norm() < 1e-9);
        let (a, b) = cfg.singular_point.expect("degenerate");
        assert!(a.norm() < 1e-9 && b.norm() < 1e-9);
        assert_eq!(cfg.r_prime, RankFourLocus::Empty);
    }

    #[test]
    fn degenerate_double_line_elsewhere() {
        // f0 = (x0 + x1)^4 - x0^4 - 4 x0^3 x1 has a rank-1 point at (1, 4)
        let l4 = power(&[ONE, ONE], 4);
        let f0 = l4.axpy(c(-1.0), &mono(4, 0)).axpy(c(-4.0), &mono(3, 1));
        let cfg = classify_plane_degenerate(&f0, &tol()).unwrap();
        assert_eq!(cfg.case, PlaneCase::D11);
        let (a, b) = cfg.singular_point.expect("degenerate");
        assert!((a - c(1.0)).norm() < 1e-7 && (b - c(4.0)).norm() < 1e-7);
        assert_eq!(
            quartic_stratum(&cfg.form_at(a, b), &tol()).unwrap(),
            QuarticStratum::Power
        );
    }
}
