//! Deterministic invariant suites behind `waring selftest`.

use serde::Serialize;

use crate::apolarity::Form;
use crate::numerics::Tolerance;
use crate::oracle::{self, cat_lower_bound, numeric_rank_fit};
use crate::ternary::{waring_decompose, MAX_TERMS};

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    /// Largest error measure seen (residual or discrepancy, suite-specific).
    pub max_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub n: usize,
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

struct Suite {
    report: SuiteReport,
}

impl Suite {
    fn new(name: &str) -> Self {
        Self {
            report: SuiteReport {
                name: name.into(),
                cases: 0,
                failures: 0,
                max_error: 0.0,
            },
        }
    }

    fn record(&mut self, ok: bool, error: f64) {
        self.report.cases += 1;
        if !ok || !error.is_finite() {
            self.report.failures += 1;
        } else {
            self.report.max_error = self.report.max_error.max(error);
        }
    }
}

fn suite_seed(seed: u64, k: u64) -> u64 {
    seed.wrapping_mul(0x2545_f491_4f6c_dd1d) ^ k.wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

/// Run every suite with `n` cases for the large ones.
pub fn selftest(n: usize, seed: u64, tol: &Tolerance) -> SelftestReport {
    let small = |div: usize| (n / div).max(1);
    let mut suites = Vec::new();

    // decompositions of random quartics, and the catalecticant bound
    let mut dec = Suite::new("decompose_random_quartics");
    let mut bound = Suite::new("catalecticant_lower_bound");
    let mut rng = oracle::rng(suite_seed(seed, 1));
    for i in 0..n {
        let f = oracle::random_form(3, 4, &mut rng);
        match waring_decompose(&f, tol, suite_seed(seed, 100 + i as u64)) {
            Ok(d) => {
                let res = d.residual(&f);
                dec.record(d.len() <= MAX_TERMS && res <= tol.residual_eps, res);
                bound.record(cat_lower_bound(&f, tol) <= d.len(), 0.0);
            }
            Err(_) => dec.record(false, 0.0),
        }
    }
    suites.push(dec);
    suites.push(bound);

    let mut trip = Suite::new("rank_round_trip");
    for r in 1..=5 {
        for k in 0..small(100) {
            let s = suite_seed(seed, 1000 + 10 * r as u64 + k as u64);
            let (f, _) = oracle::random_rank_form(r, s);
            let fit = numeric_rank_fit(&f, r, 20, s).best_residual;
            let ok = match waring_decompose(&f, tol, s) {
                Ok(d) => {
                    d.len() <= MAX_TERMS
                        && d.residual(&f) <= tol.residual_eps
                        && cat_lower_bound(&f, tol) <= d.len()
                }
                Err(_) => false,
            };
            trip.record(ok && fit <= 1e-6, fit);
        }
    }
    suites.push(trip);

    let mut equi = Suite::new("coordinate_equivariance");
    let mut rng = oracle::rng(suite_seed(seed, 2));
    for k in 0..small(20) {
        let f = oracle::random_form(3, 4, &mut rng);
        match oracle::equivariance_check(&f, suite_seed(seed, 3000 + k as u64), tol) {
            Ok((len, res)) => equi.record(len <= MAX_TERMS && res <= tol.residual_eps, res),
            Err(_) => equi.record(false, 0.0),
        }
    }
    suites.push(equi);

    let mut strata = Suite::new("binary_stratification");
    let mut rng = oracle::rng(suite_seed(seed, 3));
    for _ in 0..n {
        let f = oracle::random_binary_quartic(&mut rng);
        strata.record(oracle::stratum_check(&f, tol).unwrap_or(false), 0.0);
    }
    suites.push(strata);

    let mut planes = Suite::new("plane_classification");
    let mut rng = oracle::rng(suite_seed(seed, 4));
    for _ in 0..small(50) {
        let f0 = oracle::random_plane_base(&mut rng);
        let ok = oracle::plane_grid_check(&f0, 20, 2.0, tol).is_ok_and(|c| c.passed());
        planes.record(ok, 0.0);
    }
    suites.push(planes);

    type Check = fn(&mut rand_chacha::ChaCha8Rng) -> f64;
    let identities: [(&str, Check); 3] = [
        ("leibniz_rule", |r| oracle::leibniz_check(r)),
        ("contraction_composition", |r| oracle::composition_check(r)),
        ("permanent_pairing", |r| oracle::permanent_check(r)),
    ];
    for (k, (name, check)) in identities.iter().enumerate() {
        let mut suite = Suite::new(name);
        let mut rng = oracle::rng(suite_seed(seed, 10 + k as u64));
        for _ in 0..n {
            let e = check(&mut rng);
            suite.record(e <= 1e-10, e);
        }
        suites.push(suite);
    }

    let mut grad = Suite::new("fit_gradient");
    let mut rng = oracle::rng(suite_seed(seed, 20));
    for k in 0..small(10) {
        let f: Form = oracle::random_form(3, 4, &mut rng);
        let e = oracle::model_gradient_check(&f, 1 + k % 7, suite_seed(seed, 4000 + k as u64));
        grad.record(e <= 1e-5, e);
    }
    suites.push(grad);

    let suites: Vec<SuiteReport> = suites.into_iter().map(|s| s.report).collect();
    SelftestReport {
        seed,
        n,
        passed: suites.iter().all(|s| s.failures == 0),
        suites,
    }
}
