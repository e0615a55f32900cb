//! Scalar arithmetic, tolerance policy, univariate roots and small dense
//! linear algebra over the complex numbers.
//!
//! Everything downstream reduces to two numerical primitives: roots of a
//! univariate polynomial and numeric kernels of small matrices. Both are
//! decided against an explicit [`Tolerance`], never against hidden constants.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// The base field, modeled as double precision complex numbers.
pub type Scalar = Complex64;

/// Dense complex matrix.
pub type Matrix = DMatrix<Scalar>;

/// Dense complex column vector.
pub type Vector = DVector<Scalar>;

pub const ZERO: Scalar = Complex64::new(0.0, 0.0);
pub const ONE: Scalar = Complex64::new(1.0, 0.0);

#[inline]
pub fn c(re: f64) -> Scalar {
    Complex64::new(re, 0.0)
}

/// Thresholds used to turn floating point magnitudes into decisions.
///
/// `zero_eps` decides when a magnitude is zero, `rank_eps` is the relative
/// singular value cutoff for numeric rank, and `residual_eps` bounds the
/// relative reconstruction error accepted for a decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub zero_eps: f64,
    pub rank_eps: f64,
    pub residual_eps: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            zero_eps: 1e-10,
            rank_eps: 1e-8,
            residual_eps: 1e-6,
        }
    }
}

impl Tolerance {
    pub fn new(zero_eps: f64, rank_eps: f64, residual_eps: f64) -> Result<Self> {
        let ok = zero_eps > 0.0
            && zero_eps <= rank_eps
            && rank_eps <= residual_eps
            && residual_eps < 1.0;
        if !ok {
            return Err(Error::DegenerateInput(format!(
                "tolerances must satisfy 0 < zero_eps <= rank_eps <= residual_eps < 1, \
                 got {zero_eps:e}, {rank_eps:e}, {residual_eps:e}"
            )));
        }
        Ok(Self {
            zero_eps,
            rank_eps,
            residual_eps,
        })
    }

    /// Minimal separation between two roots (chordal distance on the
    /// projective line) for them to count as distinct.
    ///
    /// Numerically split double roots are apart by about the square root of
    /// the backward error, so this is the square root of `rank_eps`.
    pub fn sep_eps(&self) -> f64 {
        self.rank_eps.sqrt()
    }
}

pub fn norm(v: &[Scalar]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn is_finite(z: Scalar) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Evaluate `sum coeffs[k] z^k` by Horner's rule.
pub fn polyval(coeffs: &[Scalar], z: Scalar) -> Scalar {
    coeffs.iter().rev().fold(ZERO, |acc, &a| acc * z + a)
}

fn polyder(coeffs: &[Scalar]) -> Vec<Scalar> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &a)| a * k as f64)
        .collect()
}

/// All roots of `sum coeffs[k] z^k` (ascending coefficient order), listed
/// with multiplicity.
///
/// Leading coefficients below `zero_eps` relative to the largest one are
/// dropped, which lowers the degree. Roots come from the eigenvalues of the
/// companion matrix followed by one Newton step; roots closer than
/// `zero_eps` are merged into a cluster and reported at the cluster mean.
pub fn poly_roots(coeffs: &[Scalar], tol: &Tolerance) -> Result<Vec<Scalar>> {
    if coeffs.is_empty() {
        return Err(Error::DegenerateInput("empty coefficient list".into()));
    }
    if coeffs.iter().any(|z| !is_finite(*z)) {
        return Err(Error::DegenerateInput("non-finite coefficient".into()));
    }
    let scale = coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale <= tol.zero_eps {
        return Err(Error::DegenerateInput(
            "all coefficients vanish".into(),
        ));
    }
    let mut deg = coeffs.len() - 1;
    while deg > 0 && coeffs[deg].norm() <= tol.zero_eps * scale {
        deg -= 1;
    }
    let p = &coeffs[..=deg];
    if deg == 0 {
        return Ok(Vec::new());
    }

    // Frobenius companion matrix of the monic polynomial.
    let lead = p[deg];
    let mut comp = Matrix::zeros(deg, deg);
    for i in 1..deg {
        comp[(i, i - 1)] = ONE;
    }
    for i in 0..deg {
        comp[(i, deg - 1)] = -p[i] / lead;
    }
    let mut roots: Vec<Scalar> = eigenvalues(&comp)?;

    let dp = polyder(p);
    for r in roots.iter_mut() {
        let f = polyval(p, *r);
        let d = polyval(&dp, *r);
        if d.norm() > 0.0 {
            let cand = *r - f / d;
            if is_finite(cand) && polyval(p, cand).norm() < f.norm() {
                *r = cand;
            }
        }
    }

    Ok(cluster(roots, tol.zero_eps))
}

/// Replace every group of points within `radius` (relative to magnitude) of
/// each other by copies of the group mean.
fn cluster(mut roots: Vec<Scalar>, radius: f64) -> Vec<Scalar> {
    let n = roots.len();
    let mut group = vec![usize::MAX; n];
    let mut next = 0;
    for i in 0..n {
        if group[i] != usize::MAX {
            continue;
        }
        group[i] = next;
        let mut stack = vec![i];
        while let Some(k) = stack.pop() {
            for j in 0..n {
                if group[j] == usize::MAX {
                    let s = 1f64.max(roots[k].norm()).max(roots[j].norm());
                    if (roots[k] - roots[j]).norm() <= radius * s {
                        group[j] = next;
                        stack.push(j);
                    }
                }
            }
        }
        next += 1;
    }
    for g in 0..next {
        let members: Vec<usize> = (0..n).filter(|&i| group[i] == g).collect();
        if members.len() > 1 {
            let mean = members.iter().map(|&i| roots[i]).sum::<Scalar>() / members.len() as f64;
            for &i in &members {
                roots[i] = mean;
            }
        }
    }
    roots
}

/// Singular values in descending order together with the right singular
/// vectors (as columns, same order). Works for any shape.
pub fn svd_right(m: &Matrix) -> (Vec<f64>, Matrix) {
    let (rows, cols) = m.shape();
    let padded;
    let work = if rows < cols {
        padded = {
            let mut p = Matrix::zeros(cols, cols);
            p.view_mut((0, 0), (rows, cols)).copy_from(m);
            p
        };
        &padded
    } else {
        m
    };
    let svd = work.clone().svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let sv: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let mut v = Matrix::zeros(cols, order.len());
    for (k, &i) in order.iter().enumerate() {
        for j in 0..cols {
            v[(j, k)] = v_t[(i, j)].conj();
        }
    }
    (sv, v)
}

pub fn singular_values(m: &Matrix) -> Vec<f64> {
    svd_right(m).0
}

fn numeric_rank_from(sv: &[f64], tol: &Tolerance) -> usize {
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax <= 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol.rank_eps * smax).count()
}

/// Numeric rank: singular values above `rank_eps` times the largest one.
pub fn matrix_rank(m: &Matrix, tol: &Tolerance) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    numeric_rank_from(&singular_values(m), tol)
}

/// Orthonormal basis of the numeric null space of `m`.
pub fn kernel_basis(m: &Matrix, tol: &Tolerance) -> Vec<Vector> {
    if m.ncols() == 0 {
        return Vec::new();
    }
    if m.nrows() == 0 {
        return (0..m.ncols())
            .map(|j| {
                let mut e = Vector::zeros(m.ncols());
                e[j] = ONE;
                e
            })
            .collect();
    }
    let (sv, v) = svd_right(m);
    let rank = numeric_rank_from(&sv, tol);
    (rank..m.ncols()).map(|k| v.column(k).into_owned()).collect()
}

/// Right singular vector for the smallest singular value, with the ratio
/// `sigma_min / sigma_max`. Used where a kernel is known to exist but should
/// not be decided by a threshold.
pub fn smallest_right_singular(m: &Matrix) -> (Vector, f64) {
    let (sv, v) = svd_right(m);
    let n = m.ncols();
    let smax = sv.first().copied().unwrap_or(0.0);
    let smin = if sv.len() >= n { sv[n - 1] } else { 0.0 };
    let ratio = if smax > 0.0 { smin / smax } else { 0.0 };
    (v.column(n - 1).into_owned(), ratio)
}

pub fn det(m: &Matrix) -> Scalar {
    assert!(m.is_square(), "determinant of a non-square matrix");
    if m.nrows() == 0 {
        return ONE;
    }
    m.clone().determinant()
}

/// Eigenvalues of a square complex matrix via the Schur decomposition.
pub fn eigenvalues(m: &Matrix) -> Result<Vec<Scalar>> {
    if !m.is_square() {
        return Err(Error::BadShape("eigenvalues of a non-square matrix".into()));
    }
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let schur = m.clone().schur();
    let (_, t) = schur.unpack();
    Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

/// Minimum-norm least squares solution of `a x = b`, and the relative
/// residual `|a x - b| / |b|` (absolute when `b = 0`).
pub fn least_squares(a: &Matrix, b: &Vector, tol: &Tolerance) -> (Vector, f64) {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let eps = (tol.zero_eps * 1e-2 * smax).max(f64::MIN_POSITIVE);
    let x = svd
        .solve(b, eps)
        .unwrap_or_else(|_| Vector::zeros(a.ncols()));
    let r = (a * &x - b).norm();
    let bn = b.norm();
    (x, if bn > 0.0 { r / bn } else { r })
}

/// Least squares fit of a polynomial of degree `deg` to `f(z)` sampled on a
/// circle of radius `radius`; returns ascending coefficients.
pub fn fit_polynomial<F>(deg: usize, radius: f64, mut f: F) -> Vec<Scalar>
where
    F: FnMut(Scalar) -> Scalar,
{
    let n = 2 * deg + 3;
    let mut a = Matrix::zeros(n, deg + 1);
    let mut b = Vector::zeros(n);
    for k in 0..n {
        let theta = 2.0 * std::f64::consts::PI * (k as f64 + 0.3) / n as f64;
        let z = Scalar::from_polar(radius, theta);
        let mut p = ONE;
        for j in 0..=deg {
            a[(k, j)] = p;
            p *= z;
        }
        b[k] = f(z);
    }
    let tol = Tolerance::default();
    let (x, _) = least_squares(&a, &b, &tol);
    x.iter().copied().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn sorted_re(mut v: Vec<Scalar>) -> Vec<f64> {
        v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        v.iter().map(|z| z.re).collect()
    }

    #[test]
    fn roots_of_z2_minus_1() {
        let r = poly_roots(&[c(-1.0), ZERO, ONE], &tol()).unwrap();
        let re = sorted_re(r);
        assert!((re[0] + 1.0).abs() < 1e-12 && (re[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn double_root_at_zero() {
        let r = poly_roots(&[ZERO, ZERO, ONE], &tol()).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn cubic_with_three_roots() {
        // z^3 - 2z^2 - z + 2 = (z-1)(z+1)(z-2)
        let p = [c(2.0), c(-1.0), c(-2.0), ONE];
        // direct substitution oracle
        for z in [1.0, -1.0, 2.0] {
            assert_eq!(polyval(&p, c(z)), ZERO);
        }
        let re = sorted_re(poly_roots(&p, &tol()).unwrap());
        for (got, want) in re.iter().zip([-1.0, 1.0, 2.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn all_zero_coefficients_rejected() {
        assert!(matches!(
            poly_roots(&[ZERO, c(1e-14)], &tol()),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn small_leading_coefficient_drops_degree() {
        let r = poly_roots(&[c(-2.0), ONE, c(1e-13)], &tol()).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0] - c(2.0)).norm() < 1e-12);
    }

    #[test]
    fn kernel_of_identity_and_zero() {
        let id = Matrix::identity(3, 3);
        assert!(kernel_basis(&id, &tol()).is_empty());
        assert_eq!(matrix_rank(&id, &tol()), 3);
        let z = Matrix::zeros(2, 3);
        assert_eq!(kernel_basis(&z, &tol()).len(), 3);
        assert_eq!(matrix_rank(&z, &tol()), 0);
    }

    #[test]
    fn kernel_of_wide_matrix() {
        let m = Matrix::from_row_slice(1, 3, &[ONE, ONE, ZERO]);
        let k = kernel_basis(&m, &tol());
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!((&m * v).norm() < 1e-12);
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn det_by_cofactor_example() {
        let m = Matrix::from_row_slice(
            3,
            3,
            &[ZERO, ZERO, c(2.0), ZERO, c(4.0), ZERO, c(2.0), ZERO, ZERO],
        );
        assert!((det(&m) - c(-16.0)).norm() < 1e-12);
    }

    #[test]
    fn eigenvalues_of_swap() {
        let m = Matrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        let re = sorted_re(eigenvalues(&m).unwrap());
        assert!((re[0] + 1.0).abs() < 1e-12 && (re[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tolerance_ladder_is_validated() {
        assert!(Tolerance::new(1e-10, 1e-8, 1e-6).is_ok());
        assert!(Tolerance::new(1e-6, 1e-8, 1e-6).is_err());
        assert!(Tolerance::new(0.0, 1e-8, 1e-6).is_err());
        assert!(Tolerance::new(1e-10, 1e-8, 1.0).is_err());
    }

    #[test]
    fn polynomial_fit_recovers_coefficients() {
        let p = [c(1.0), c(-3.0), Scalar::new(0.5, 2.0)];
        let q = fit_polynomial(2, 1.0, |z| polyval(&p, z));
        for (a, b) in p.iter().zip(&q) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
