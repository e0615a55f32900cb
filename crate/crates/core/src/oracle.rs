//! Independent checks of the constructive code: catalecticant lower bounds,
//! numerical low-rank fitting, brute-force plane classification and random
//! instance generators.
//!
//! Nothing here is used by the decomposition algorithms themselves.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::apolarity::{contract, monomials, pair, polarization, power, DualForm, Form};
use crate::binary::{binary_rank, classify_plane, quartic_stratum, PlaneCase, QuarticStratum, RankFourLocus};
use crate::decomposition::{Decomposition, Provenance, Term};
use crate::error::Result;
use crate::ternary::waring_decompose;
use crate::numerics::{self, Matrix, Scalar, Tolerance, Vector, ONE, ZERO};

/// Seeded generator used by every random routine in this module.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian: real and imaginary parts independent with
/// variance 1/2, so `E|z|^2 = 1`.
pub fn gaussian(rng: &mut impl Rng) -> Scalar {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Scalar::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Form with i.i.d. standard complex Gaussian monomial coefficients.
pub fn random_form(nvars: usize, degree: usize, rng: &mut impl Rng) -> Form {
    let n = crate::apolarity::monomial_count(nvars, degree);
    Form::new(nvars, degree, (0..n).map(|_| gaussian(rng)).collect()).expect("sizes match")
}

/// Unit-norm random linear form.
pub fn random_linear(nvars: usize, rng: &mut impl Rng) -> Vec<Scalar> {
    loop {
        let v: Vec<Scalar> = (0..nvars).map(|_| gaussian(rng)).collect();
        let n = numerics::norm(&v);
        if n > 1e-3 {
            return v.into_iter().map(|z| z / n).collect();
        }
    }
}

/// `f = sum l_i^4` for `r` random unit-norm ternary linear forms, together
/// with the forms.
pub fn random_rank_form(r: usize, seed: u64) -> (Form, Vec<Vec<Scalar>>) {
    random_rank_form_in(3, r, seed)
}

/// [`random_rank_form`] in `nvars` variables.
pub fn random_rank_form_in(nvars: usize, r: usize, seed: u64) -> (Form, Vec<Vec<Scalar>>) {
    let mut rng = rng(seed);
    let forms: Vec<Vec<Scalar>> = (0..r).map(|_| random_linear(nvars, &mut rng)).collect();
    let f = forms
        .iter()
        .fold(Form::zero(nvars, 4), |acc, l| &acc + &power(l, 4));
    (f, forms)
}

/// Random binary quartic: mostly Gaussian, with a quarter drawn from the
/// lower strata (fourth powers, sums of two powers, `l^3 m`).
pub fn random_binary_quartic(rng: &mut impl Rng) -> Form {
    match rng.random_range(0..12) {
        0 => power(&random_linear(2, rng), 4).scale(gaussian(rng)),
        1 => {
            let a = power(&random_linear(2, rng), 4).scale(gaussian(rng));
            &a + &power(&random_linear(2, rng), 4).scale(gaussian(rng))
        }
        2 => {
            let l = Form::linear(&random_linear(2, rng));
            let m = Form::linear(&random_linear(2, rng));
            l.mul(&l).mul(&l).mul(&m).scale(gaussian(rng))
        }
        _ => random_form(2, 4, rng),
    }
}

/// Base point `f0` of a random plane `span(f0, x0^4, x1^4)`. Most are
/// Gaussian (a conic locus); the rest lack `x0^2 x1^2` (a line) or are a
/// single mixed monomial (a line through a point at infinity).
pub fn random_plane_base(rng: &mut impl Rng) -> Form {
    let mono = |e: [usize; 2], c: Scalar| Form::monomial(&e, c);
    match rng.random_range(0..8) {
        0 | 1 => &mono([3, 1], gaussian(rng)) + &mono([1, 3], gaussian(rng)),
        2 => mono([3, 1], gaussian(rng)),
        3 => mono([1, 3], gaussian(rng)),
        _ => random_form(2, 4, rng),
    }
}

/// Waring rank lower bound: the largest rank of a partial polarization.
pub fn cat_lower_bound(f: &Form, tol: &Tolerance) -> usize {
    (0..=f.degree())
        .map(|delta| polarization(f, delta).map(|m| m.rank(tol)).unwrap_or(0))
        .max()
        .unwrap_or(0)
}

/// Result of a numerical fit by `target_rank` fourth powers.
#[derive(Clone, Debug)]
pub struct FitReport {
    pub target_rank: usize,
    /// `|sum l_i^d - f| / |f|` for the best fit found.
    pub best_residual: f64,
    /// Local searches run at the target rank.
    pub restarts: usize,
    pub best_terms: Decomposition,
}

/// The objective `|sum_i (a_i . x)^d - f|^2 / |f|^2` over the coefficient
/// array `a` (row-major, `r` rows of length `nvars`), with its holomorphic
/// Jacobian.
struct FitModel {
    nvars: usize,
    mons: Vec<Vec<usize>>,
    mult: Vec<f64>,
    target: Vec<Scalar>,
    scale2: f64,
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

impl FitModel {
    fn new(f: &Form) -> Self {
        let mons = monomials(f.nvars(), f.degree());
        let mult = mons
            .iter()
            .map(|e| factorial(f.degree()) / e.iter().map(|&k| factorial(k)).product::<f64>())
            .collect();
        let n2 = f.norm().powi(2);
        Self {
            nvars: f.nvars(),
            mons,
            mult,
            target: f.coeffs().to_vec(),
            scale2: if n2 > 0.0 { n2 } else { 1.0 },
        }
    }

    fn rows(&self, a: &[Scalar]) -> usize {
        a.len() / self.nvars
    }

    fn residual(&self, a: &[Scalar]) -> Vec<Scalar> {
        let n = self.nvars;
        self.mons
            .iter()
            .zip(&self.mult)
            .zip(&self.target)
            .map(|((e, &m), &t)| {
                let model: Scalar = (0..self.rows(a))
                    .map(|i| {
                        e.iter()
                            .enumerate()
                            .map(|(k, &ek)| a[i * n + k].powu(ek as u32))
                            .product::<Scalar>()
                    })
                    .sum();
                model * m - t
            })
            .collect()
    }

    fn objective(&self, a: &[Scalar]) -> f64 {
        self.residual(a).iter().map(|z| z.norm_sqr()).sum::<f64>() / self.scale2
    }

    fn jacobian(&self, a: &[Scalar]) -> Matrix {
        let n = self.nvars;
        let mut j = Matrix::zeros(self.mons.len(), a.len());
        for (row, (e, &m)) in self.mons.iter().zip(&self.mult).enumerate() {
            for i in 0..self.rows(a) {
                for k in 0..n {
                    if e[k] == 0 {
                        continue;
                    }
                    let mut v = Scalar::new(m * e[k] as f64, 0.0);
                    for (kk, &ek) in e.iter().enumerate() {
                        let p = if kk == k { ek - 1 } else { ek };
                        v *= a[i * n + kk].powu(p as u32);
                    }
                    j[(row, i * n + k)] = v;
                }
            }
        }
        j
    }

    /// Gradient of the objective with respect to the real and imaginary
    /// parts, interleaved as `(re a_0, im a_0, re a_1, ...)`.
    fn gradient(&self, a: &[Scalar]) -> Vec<f64> {
        let r = Vector::from_vec(self.residual(a));
        let g = self.jacobian(a).adjoint() * r;
        g.iter()
            .flat_map(|z| [2.0 * z.re / self.scale2, 2.0 * z.im / self.scale2])
            .collect()
    }

    /// Levenberg-Marquardt from `a`.
    fn local_fit(&self, mut a: Vec<Scalar>, max_iter: usize) -> (Vec<Scalar>, f64) {
        let mut r = self.residual(&a);
        let mut phi = r.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.scale2;
        let mut mu: Option<f64> = None;
        let mut stalls = 0;
        for _ in 0..max_iter {
            if phi < 1e-28 {
                break;
            }
            let j = self.jacobian(&a);
            let jh = j.adjoint();
            let h = &jh * &j;
            let g = &jh * Vector::from_column_slice(&r);
            let diag_max = (0..h.nrows()).map(|i| h[(i, i)].re).fold(0.0, f64::max);
            if diag_max <= 0.0 {
                break;
            }
            let mut m = mu.unwrap_or(1e-3 * diag_max);
            let mut accepted = false;
            for _ in 0..12 {
                let mut lhs = h.clone();
                for i in 0..lhs.nrows() {
                    lhs[(i, i)] += Scalar::new(m, 0.0);
                }
                let Some(step) = lhs.lu().solve(&(-&g)) else {
                    m *= 4.0;
                    continue;
                };
                let trial: Vec<Scalar> = a.iter().zip(step.iter()).map(|(x, s)| x + s).collect();
                let tr = self.residual(&trial);
                let tphi = tr.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.scale2;
                if tphi < phi {
                    stalls = if phi - tphi < 1e-10 * phi { stalls + 1 } else { 0 };
                    a = trial;
                    r = tr;
                    phi = tphi;
                    m = (m / 3.0).max(1e-15 * diag_max);
                    accepted = true;
                    break;
                }
                m *= 4.0;
            }
            mu = Some(m);
            if !accepted || stalls >= 40 {
                break;
            }
        }
        (a, phi)
    }
}

const MAX_ITER: usize = 2000;

fn random_start(nvars: usize, rows: usize, scale: f64, rng: &mut impl Rng) -> Vec<Scalar> {
    (0..rows * nvars).map(|_| gaussian(rng) * scale).collect()
}

fn level_rng(seed: u64, rank: usize) -> ChaCha8Rng {
    rng(seed ^ (rank as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Fit `f` by `r` fourth powers with Levenberg-Marquardt from random starts.
///
/// Ranks `1..=r` are fitted in turn with `restarts` random starts each, and
/// every level is also started from the previous optimum with one extra
/// term, so the best residual never increases with `r` for a fixed seed.
pub fn numeric_rank_fit(f: &Form, r: usize, restarts: usize, seed: u64) -> FitReport {
    let model = FitModel::new(f);
    let n = f.nvars();
    let fnorm = f.norm();
    let mut best: (Vec<Scalar>, f64) = (Vec::new(), if fnorm > 0.0 { 1.0 } else { 0.0 });
    let mut runs = 0;
    for s in 1..=r {
        let mut rng = level_rng(seed, s);
        let scale = (fnorm.max(1e-300) / s as f64).powf(1.0 / f.degree() as f64) * 0.6;
        let mut level = best.clone();
        level.0.extend(std::iter::repeat_n(ZERO, n));
        runs = 0;
        if !best.0.is_empty() {
            let mut warm = best.0.clone();
            warm.extend(random_start(n, 1, 0.3 * scale, &mut rng));
            let cand = model.local_fit(warm, MAX_ITER);
            runs += 1;
            if cand.1 < level.1 {
                level = cand;
            }
        }
        for _ in 0..restarts {
            if level.1 < 1e-26 {
                break;
            }
            let cand = model.local_fit(random_start(n, s, scale, &mut rng), MAX_ITER);
            runs += 1;
            if cand.1 < level.1 {
                level = cand;
            }
        }
        best = level;
    }
    let terms = best
        .0
        .chunks(n)
        .map(|row| Term {
            coef: ONE,
            linear: row.to_vec(),
        })
        .collect();
    let best_terms = Decomposition {
        nvars: n,
        degree: f.degree(),
        terms,
        provenance: Provenance::Fit,
    };
    FitReport {
        target_rank: r,
        best_residual: best_terms.residual(f),
        restarts: runs,
        best_terms,
    }
}

/// Largest relative discrepancy between the closed-form gradient of the fit
/// objective and central finite differences with step `1e-5`, at a random
/// coefficient array of `r` rows.
pub fn model_gradient_check(f: &Form, r: usize, seed: u64) -> f64 {
    if r == 0 {
        return 0.0;
    }
    let mut rng = rng(seed);
    let a: Vec<Scalar> = (0..r * f.nvars()).map(|_| gaussian(&mut rng)).collect();
    gradient_discrepancy(f, &a)
}

fn gradient_discrepancy(f: &Form, a: &[Scalar]) -> f64 {
    let model = FitModel::new(f);
    let g = model.gradient(a);
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    let gmax = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for (idx, &gi) in g.iter().enumerate() {
        let dir = if idx % 2 == 0 { Scalar::new(h, 0.0) } else { Scalar::new(0.0, h) };
        let mut ap = a.to_vec();
        let mut am = a.to_vec();
        ap[idx / 2] += dir;
        am[idx / 2] -= dir;
        let fd = (model.objective(&ap) - model.objective(&am)) / (2.0 * h);
        worst = worst.max((fd - gi).abs());
    }
    if gmax > 0.0 {
        worst / gmax
    } else {
        worst
    }
}

fn relative_gap(lhs: &Form, rhs: &Form) -> f64 {
    let scale = lhs.norm().max(rhs.norm());
    let gap = (lhs - rhs).norm();
    if scale > 0.0 {
        gap / scale
    } else {
        gap
    }
}

fn random_operator(nvars: usize, degree: usize, rng: &mut impl Rng) -> DualForm {
    DualForm::from_form(random_form(nvars, degree, rng))
}

/// Leibniz rule `l ⌟ (g h) = (l ⌟ g) h + g (l ⌟ h)` for a random linear
/// operator and random ternary forms; returns the relative discrepancy.
pub fn leibniz_check(rng: &mut impl Rng) -> f64 {
    let l = DualForm::linear(&random_linear(3, rng));
    let g = random_form(3, rng.random_range(1..4), rng);
    let h = random_form(3, rng.random_range(1..4), rng);
    let lhs = contract(&l, &g.mul(&h));
    let rhs = &contract(&l, &g).mul(&h) + &g.mul(&contract(&l, &h));
    relative_gap(&lhs, &rhs)
}

/// `(s t) ⌟ x = s ⌟ (t ⌟ x)` for random operators and a random form.
pub fn composition_check(rng: &mut impl Rng) -> f64 {
    let p = rng.random_range(1..3);
    let q = rng.random_range(1..3);
    let d = p + q + rng.random_range(0..3);
    let s = random_operator(3, p, rng);
    let t = random_operator(3, q, rng);
    let x = random_form(3, d, rng);
    relative_gap(&contract(&s.mul(&t), &x), &contract(&s, &contract(&t, &x)))
}

fn permanent(m: &[Vec<Scalar>]) -> Scalar {
    let n = m.len();
    if n == 0 {
        return ONE;
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<Scalar>> = m[1..]
                .iter()
                .map(|row| row.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &v)| v).collect())
                .collect();
            m[0][j] * permanent(&minor)
        })
        .sum()
}

/// The pairing of `l_1 ... l_d` with `m_1 ... m_d` is the permanent of
/// `(l_i . m_j)`, and monomials pair to `a!` on the diagonal and 0 off it.
pub fn permanent_check(rng: &mut impl Rng) -> f64 {
    let d = rng.random_range(1..5);
    let ls: Vec<Vec<Scalar>> = (0..d).map(|_| random_linear(3, rng)).collect();
    let ms: Vec<Vec<Scalar>> = (0..d).map(|_| random_linear(3, rng)).collect();
    let op = ls
        .iter()
        .map(|l| DualForm::linear(l))
        .reduce(|a, b| a.mul(&b))
        .expect("d >= 1");
    let form = ms
        .iter()
        .map(|m| Form::linear(m))
        .reduce(|a, b| a.mul(&b))
        .expect("d >= 1");
    let gram: Vec<Vec<Scalar>> = ls
        .iter()
        .map(|l| ms.iter().map(|m| l.iter().zip(m).map(|(a, b)| a * b).sum()).collect())
        .collect();
    let expected = permanent(&gram);
    let got = pair(&op, &form).expect("same degree");
    let mut worst = (got - expected).norm() / expected.norm().max(1e-300).max(got.norm());

    let mons = monomials(3, d);
    let a = &mons[rng.random_range(0..mons.len())];
    let b = &mons[rng.random_range(0..mons.len())];
    let value = pair(&DualForm::monomial(a, ONE), &Form::monomial(b, ONE)).expect("same degree");
    let expected = if a == b {
        a.iter().map(|&k| factorial(k)).product::<f64>()
    } else {
        0.0
    };
    worst = worst.max((value - Scalar::new(expected, 0.0)).norm() / expected.max(1.0));
    worst
}

/// Whether the stratum of a binary quartic agrees with the determinant test
/// `|det f_{2,2}| > rank_eps |f_{2,2}|_F^3` and with its Waring rank.
pub fn stratum_check(f: &Form, tol: &Tolerance) -> Result<bool> {
    let stratum = quartic_stratum(f, tol)?;
    let cat = polarization(f, 2)?.matrix;
    let generic = numerics::det(&cat).norm() > tol.rank_eps * cat.norm().powi(3);
    let rank = binary_rank(f, tol)?;
    Ok((stratum == QuarticStratum::Generic) == generic && rank == stratum.rank() && rank <= 4)
}

/// Decompose `f(A x)` for a random well-conditioned `A`, map the terms
/// back and return the length and residual against `f`.
pub fn equivariance_check(f: &Form, seed: u64, tol: &Tolerance) -> Result<(usize, f64)> {
    let mut rng = rng(seed);
    let n = f.nvars();
    let a = loop {
        let m = Matrix::from_fn(n, n, |_, _| gaussian(&mut rng));
        let sv = numerics::singular_values(&m);
        if sv[n - 1] > 0.2 * sv[0] {
            break m;
        }
    };
    let g = f.substitute(&a);
    let d = waring_decompose(&g, tol, seed)?;
    let inv_t = a.try_inverse().expect("well conditioned").transpose();
    let back = d.map_linear(&inv_t);
    Ok((back.len(), back.residual(f)))
}

/// Outcome of comparing the classification of a plane
/// `span(f0, x0^4, x1^4)` against the stratum of each point of a grid.
#[derive(Clone, Debug, Serialize)]
pub struct PlaneCheck {
    pub case: String,
    pub grid_points: usize,
    pub grid_disagreements: usize,
    /// Points sampled on the predicted loci.
    pub locus_points: usize,
    pub locus_disagreements: usize,
}

impl PlaneCheck {
    pub fn passed(&self) -> bool {
        self.grid_disagreements == 0 && self.locus_disagreements == 0
    }
}

/// Brute-force check of [`classify_plane`] on an `n x n` grid of
/// `[-radius, radius]^2` in the chart `f0 + a x0^4 + b x1^4`, plus points
/// sampled on the predicted loci.
pub fn plane_grid_check(f0: &Form, n: usize, radius: f64, tol: &Tolerance) -> Result<PlaneCheck> {
    let y = Form::monomial(&[4, 0], ONE);
    let z = Form::monomial(&[0, 4], ONE);
    let cfg = classify_plane(f0, &y, &z, tol)?;
    let on_rank_four = |a: Scalar, b: Scalar| match &cfg.r_prime {
        RankFourLocus::Empty => false,
        RankFourLocus::Line(l) => {
            let scale = l[1].norm().max(l[2].norm());
            (l[0] + l[1] * a + l[2] * b).norm() <= 1e-6 * scale * (1.0 + a.norm() + b.norm())
        }
        RankFourLocus::Points(p) => p
            .iter()
            .any(|&(pa, pb)| (pa - a).norm() + (pb - b).norm() <= 1e-6 * (1.0 + pa.norm() + pb.norm())),
    };
    let mut grid_disagreements = 0;
    let step = 2.0 * radius / (n.max(2) - 1) as f64;
    for i in 0..n {
        for j in 0..n {
            let a = Scalar::new(-radius + step * i as f64, 0.0);
            let b = Scalar::new(-radius + step * j as f64, 0.0);
            let g = cfg.form_at(a, b);
            let stratum = quartic_stratum(&g, tol)?;
            let cat = polarization(&g, 2)?.matrix;
            let cnorm = cat.norm();
            let special = cfg.determinant_at(a, b).norm() <= tol.rank_eps * cnorm.powi(3);
            let predicted = if !special {
                QuarticStratum::Generic.rank()
            } else if on_rank_four(a, b) {
                4
            } else {
                2
            };
            let actual = match stratum {
                QuarticStratum::Generic => 3,
                QuarticStratum::Tangent => 4,
                _ => 2,
            };
            if predicted != actual {
                grid_disagreements += 1;
            }
        }
    }

    // points on the locus: solve the determinant for b at sample values of a
    let q = cfg.determinant;
    let mut locus_points = 0;
    let mut locus_disagreements = 0;
    let mut samples: Vec<(Scalar, Scalar)> = Vec::new();
    for k in 0..8 {
        let a = Scalar::new(-radius + 2.0 * radius * (k as f64 + 0.37) / 8.0, 0.1 * k as f64);
        // q0 + q1 a + q3 a^2 + (q2 + q4 a) b + q5 b^2
        let c0 = q[0] + q[1] * a + q[3] * a * a;
        let c1 = q[2] + q[4] * a;
        let c2 = q[5];
        let scale = c0.norm().max(c1.norm()).max(c2.norm());
        if scale == 0.0 {
            continue;
        }
        if let Ok(roots) = numerics::poly_roots(&[c0, c1, c2], tol) {
            samples.extend(roots.into_iter().map(|b| (a, b)));
        }
    }
    samples.extend(cfg.r_prime.points().iter().copied());
    if let Some(p) = cfg.singular_point {
        samples.push(p);
    }
    for (a, b) in samples {
        if !numerics::is_finite(b) || b.norm() > 1e6 {
            continue;
        }
        locus_points += 1;
        let stratum = quartic_stratum(&cfg.form_at(a, b), tol)?;
        let expected_four = on_rank_four(a, b);
        let ok = match stratum {
            QuarticStratum::Generic => false,
            QuarticStratum::Tangent => expected_four,
            _ => !expected_four,
        };
        if !ok {
            locus_disagreements += 1;
        }
    }
    Ok(PlaneCheck {
        case: format!("{:?}", cfg.case),
        grid_points: n * n,
        grid_disagreements,
        locus_points,
        locus_disagreements,
    })
}

/// Case of the plane through `f0` and the coordinate fourth powers.
pub fn plane_case(f0: &Form, tol: &Tolerance) -> Result<PlaneCase> {
    let y = Form::monomial(&[4, 0], ONE);
    let z = Form::monomial(&[0, 4], ONE);
    Ok(classify_plane(f0, &y, &z, tol)?.case)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::c;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn catalecticant_bounds() {
        let tol = tol();
        assert_eq!(cat_lower_bound(&Form::monomial(&[4, 0, 0], ONE), &tol), 1);
        let fermat = Form::from_terms(
            3,
            4,
            &[(vec![4, 0, 0], ONE), (vec![0, 4, 0], ONE), (vec![0, 0, 4], ONE)],
        )
        .unwrap();
        assert_eq!(cat_lower_bound(&fermat, &tol), 3);
        assert_eq!(cat_lower_bound(&Form::monomial(&[2, 2], ONE), &tol), 3);
    }

    #[test]
    fn fit_recovers_a_single_power() {
        let f = Form::monomial(&[4, 0, 0], ONE);
        let rep = numeric_rank_fit(&f, 1, 5, 1);
        assert!(rep.best_residual <= 1e-8, "{}", rep.best_residual);
        assert!((rep.best_terms.residual(&f) - rep.best_residual).abs() < 1e-12);
    }

    #[test]
    fn sum_of_two_powers_is_not_one_power() {
        let f = &Form::monomial(&[4, 0, 0], ONE) + &Form::monomial(&[0, 4, 0], ONE);
        let rep = numeric_rank_fit(&f, 1, 50, 2);
        assert!(rep.best_residual >= 1e-3, "{}", rep.best_residual);
    }

    #[test]
    fn fit_recovers_rank_three() {
        let (f, _) = random_rank_form(3, 11);
        let rep = numeric_rank_fit(&f, 3, 50, 3);
        assert!(rep.best_residual <= 1e-6, "{}", rep.best_residual);
    }

    #[test]
    fn fit_residual_is_monotone_in_rank() {
        let (f, _) = random_rank_form(5, 4);
        let mut prev = f64::INFINITY;
        for r in 1..=4 {
            let res = numeric_rank_fit(&f, r, 6, 9).best_residual;
            assert!(res <= prev * (1.0 + 1e-12), "rank {r}: {res} > {prev}");
            prev = res;
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = rng(5);
        for k in 0..10 {
            let f = random_form(3, 4, &mut rng);
            let d = model_gradient_check(&f, 1 + k % 4, k as u64);
            assert!(d <= 1e-5, "discrepancy {d}");
        }
        assert_eq!(model_gradient_check(&Form::monomial(&[4, 0, 0], ONE), 0, 1), 0.0);
        // at the zero array only the constant part of the objective remains
        let f = random_form(3, 4, &mut rng);
        assert!(gradient_discrepancy(&f, &[ZERO; 6]) <= 1e-5);
    }

    #[test]
    fn calculus_identities_hold() {
        let mut rng = rng(8);
        for _ in 0..100 {
            assert!(leibniz_check(&mut rng) <= 1e-12);
            assert!(composition_check(&mut rng) <= 1e-12);
            assert!(permanent_check(&mut rng) <= 1e-12);
        }
    }

    #[test]
    fn hand_planes_pass_the_grid_check() {
        let tol = tol();
        for f0 in [
            Form::monomial(&[2, 2], ONE),
            &Form::monomial(&[3, 1], ONE) + &Form::monomial(&[1, 3], ONE),
            Form::monomial(&[3, 1], c(1.0)),
        ] {
            let chk = plane_grid_check(&f0, 21, 2.0, &tol).unwrap();
            assert!(chk.passed(), "{chk:?}");
        }
    }
}
