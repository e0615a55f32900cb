use proptest::prelude::*;

use waring::binary::binary_decompose;
use waring::cli::{parse_polynomial, PolynomialDocument};
use waring::oracle::{
    self, cat_lower_bound, composition_check, equivariance_check, leibniz_check,
    numeric_rank_fit, permanent_check, random_form,
};
use waring::ternary::{build_splitter, find_apolar_product, waring_decompose};
use waring::{Form, Tolerance};

fn quartic(seed: u64) -> Form {
    random_form(3, 4, &mut oracle::rng(seed))
}

fn close(a: &Form, b: &Form, eps: f64) -> bool {
    (a - b).norm() <= eps * a.norm().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn document_round_trip(seed in any::<u64>(), nvars in 2usize..=3, degree in 1usize..=6) {
        let f = random_form(nvars, degree, &mut oracle::rng(seed));
        let doc = PolynomialDocument::from_form(&f);
        let text = serde_json::to_string(&doc).unwrap();
        let back: PolynomialDocument = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &doc);
        prop_assert_eq!(back.to_form().unwrap(), f.clone());
        prop_assert_eq!(parse_polynomial(&text).unwrap(), f);
    }

    #[test]
    fn printed_polynomial_parses_back(seed in any::<u64>(), nvars in 2usize..=3, degree in 1usize..=5) {
        let f = random_form(nvars, degree, &mut oracle::rng(seed));
        let g = parse_polynomial(&f.to_string()).unwrap();
        prop_assert!(close(&f, &g, 1e-12), "{} vs {}", f, g);
    }

    #[test]
    fn random_quartics_decompose_within_seven(seed in any::<u64>()) {
        let tol = Tolerance::default();
        let f = quartic(seed);
        let d = waring_decompose(&f, &tol, seed).unwrap();
        prop_assert!(d.len() <= 7, "{} terms", d.len());
        prop_assert!(d.residual(&f) <= 1e-6);
        prop_assert!(cat_lower_bound(&f, &tol) <= d.len());
    }

    #[test]
    fn low_rank_quartics_keep_the_bound(seed in any::<u64>(), r in 1usize..=5) {
        let tol = Tolerance::default();
        let (f, _) = oracle::random_rank_form(r, seed);
        let d = waring_decompose(&f, &tol, seed).unwrap();
        prop_assert!(d.len() <= 7);
        prop_assert!(d.residual(&f) <= 1e-6);
        prop_assert!(cat_lower_bound(&f, &tol) <= d.len());
    }

    #[test]
    fn apolar_product_annihilates(seed in any::<u64>()) {
        let tol = Tolerance::default();
        let f = quartic(seed);
        let sc = find_apolar_product(&f, &tol, seed).unwrap();
        prop_assert!(sc.residual(&f) <= tol.residual_eps, "residual {}", sc.residual(&f));
    }

    #[test]
    fn kernel_generators_sum_to_zero(seed in any::<u64>()) {
        let tol = Tolerance::default();
        let f = quartic(seed);
        let sc = find_apolar_product(&f, &tol, seed).unwrap();
        let sys = build_splitter(&f, &sc, &tol).unwrap();
        for gens in &sys.kernel_gens {
            let s = sys.sigma(gens);
            prop_assert!(s.norm() <= 1e-9 * gens.iter().map(Form::norm).sum::<f64>());
        }
        prop_assert!(close(&f, &sys.sigma(&sys.particular), 1e-8));
    }

    #[test]
    fn decomposition_is_equivariant(seed in any::<u64>()) {
        let tol = Tolerance::default();
        let (len, residual) = equivariance_check(&quartic(seed), seed, &tol).unwrap();
        prop_assert!(len <= 7);
        prop_assert!(residual <= 1e-6);
    }

    #[test]
    fn binary_forms_have_rank_at_most_degree(seed in any::<u64>(), degree in 1usize..=8) {
        let tol = Tolerance::default();
        let f = random_form(2, degree, &mut oracle::rng(seed));
        let d = binary_decompose(&f, &tol).unwrap();
        prop_assert!(d.len() <= degree);
        prop_assert!(d.residual(&f) <= 1e-6);
    }

    #[test]
    fn calculus_identities(seed in any::<u64>()) {
        let mut rng = oracle::rng(seed);
        prop_assert!(leibniz_check(&mut rng) <= 1e-10);
        prop_assert!(composition_check(&mut rng) <= 1e-10);
        prop_assert!(permanent_check(&mut rng) <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn fit_residual_is_monotone_in_rank(seed in any::<u64>()) {
        let f = quartic(seed);
        let mut prev = f64::INFINITY;
        for r in 1..=4 {
            let rep = numeric_rank_fit(&f, r, 3, seed);
            prop_assert!(rep.best_residual <= prev + 1e-15);
            prev = rep.best_residual;
        }
    }
}
