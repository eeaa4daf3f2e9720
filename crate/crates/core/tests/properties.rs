use proptest::prelude::*;

use countcomp::dist::{
    alr_dirichlet_log_pdf, beta_binomial_log_pmf, dirichlet_log_pdf, dirichlet_multinomial_log_pmf,
    inverted_dirichlet_log_pdf, multinomial_sample, nb_truncation_bound, negative_binomial_log_pmf,
    normalized_nb_log_pmf, BetaBinomialParams, DirichletParams, GammaMixtureParams,
};
use countcomp::numeric::{log_beta, log_gamma, log_sum_exp, rank_one_update_det};
use countcomp::simplex::{
    log_det_jacobian_log_ratio_inverse, log_det_jacobian_ratio_inverse, log_ratio_forward,
    log_ratio_inverse, ratio_forward, ratio_inverse, Composition,
};
use countcomp::verify::enumerate::enumerate_compositions;
use countcomp::RngStream;

fn composition(n: usize) -> impl Strategy<Value = Composition> {
    prop::collection::vec(0.01f64..10.0, n).prop_map(|w| Composition::from_weights(w).unwrap())
}

fn shapes(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.1f64..10.0, n)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).exp_m1().abs()
}

proptest! {
    #[test]
    fn round_trips(x in (2usize..=8).prop_flat_map(composition)) {
        for back in [ratio_inverse(&ratio_forward(&x)).unwrap(), log_ratio_inverse(&log_ratio_forward(&x)).unwrap()] {
            for (u, v) in back.as_slice().iter().zip(x.as_slice()) {
                prop_assert!(((u - v) / v).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn charts_agree(x in (2usize..=8).prop_flat_map(composition)) {
        // alr = ln(ratio) coordinatewise.
        let r = ratio_forward(&x);
        let l = log_ratio_forward(&x);
        for (a, b) in r.entries().iter().zip(l.entries()) {
            prop_assert!((a.ln() - b).abs() <= 1e-13 * b.abs().max(1.0));
        }
    }

    #[test]
    fn change_of_variables(
        (alpha, x) in (2usize..=6).prop_flat_map(|n| (shapes(n), composition(n)))
    ) {
        let p = DirichletParams::new(alpha).unwrap();
        let base = dirichlet_log_pdf(&p, &x).unwrap();
        let y = ratio_forward(&x);
        let direct = inverted_dirichlet_log_pdf(&p, &y).unwrap();
        prop_assert!(rel(direct, base + log_det_jacobian_ratio_inverse(&y)) <= 1e-11);
        let l = log_ratio_forward(&x);
        let direct = alr_dirichlet_log_pdf(&p, &l).unwrap();
        prop_assert!(rel(direct, base + log_det_jacobian_log_ratio_inverse(&l)) <= 1e-11);
    }

    #[test]
    fn dm_normalizes((r, m) in ((2usize..=4).prop_flat_map(shapes), 0u64..=8)) {
        let p = DirichletParams::new(r).unwrap();
        let logs: Vec<f64> = enumerate_compositions(p.len(), m)
            .map(|x| dirichlet_multinomial_log_pmf(&p, m, &x).unwrap())
            .collect();
        prop_assert!(log_sum_exp(&logs).unwrap().abs() <= 1e-10);
    }

    #[test]
    fn beta_binomial_reflection(a in 0.1f64..10.0, b in 0.1f64..10.0, m in 0u64..30, k in 0u64..30) {
        prop_assume!(k <= m);
        let ab = BetaBinomialParams::new(a, b, m).unwrap();
        let ba = BetaBinomialParams::new(b, a, m).unwrap();
        let u = beta_binomial_log_pmf(&ab, k).unwrap();
        let v = beta_binomial_log_pmf(&ba, m - k).unwrap();
        prop_assert!((u - v).abs() <= 1e-12 * u.abs().max(1.0));
    }

    #[test]
    fn log_gamma_recurrence(a in 1e-3f64..100.0) {
        let lhs = log_gamma(a + 1.0).unwrap();
        let rhs = log_gamma(a).unwrap() + a.ln();
        prop_assert!((lhs - rhs).abs() <= 1e-13 * lhs.abs().max(1.0));
    }

    #[test]
    fn log_beta_symmetric(a in 0.01f64..50.0, b in 0.01f64..50.0) {
        prop_assert_eq!(log_beta(a, b).unwrap(), log_beta(b, a).unwrap());
    }

    #[test]
    fn log_sum_exp_shift(v in prop::collection::vec(-50f64..50.0, 1..20), c in -500f64..500.0) {
        let shifted: Vec<f64> = v.iter().map(|x| x + c).collect();
        let a = log_sum_exp(&v).unwrap() + c;
        let b = log_sum_exp(&shifted).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn rank_one_matches_product_form(d in prop::collection::vec(0.5f64..2.0, 1..6), s in -0.3f64..0.3) {
        // u = s * d, v = 1: det = prod d * (1 + n s).
        let u: Vec<f64> = d.iter().map(|x| s * x).collect();
        let v = vec![1.0; d.len()];
        let expected = d.iter().product::<f64>() * (1.0 + d.len() as f64 * s);
        let got = rank_one_update_det(&d, &u, &v).unwrap();
        prop_assert!((got - expected).abs() <= 1e-12 * expected.abs().max(1.0));
    }

    #[test]
    fn multinomial_sample_total(probs in (2usize..=6).prop_flat_map(composition), m in 0u64..1000, seed in any::<u64>()) {
        let mut rng = RngStream::new(seed);
        let x = multinomial_sample(m, &probs, &mut rng);
        prop_assert_eq!(x.total(), m);
        prop_assert_eq!(x.len(), probs.len());
    }

    #[test]
    fn nb_bound_covers_mass(r in 0.2f64..10.0, p in 0.05f64..0.8) {
        let bound = nb_truncation_bound(r, p, 1e-12).unwrap();
        let mass: f64 = (0..=bound).map(|m| negative_binomial_log_pmf(r, p, m).unwrap().exp()).sum();
        prop_assert!((1.0 - mass) < 1e-12 + 1e-13);
    }

    #[test]
    fn normalized_nb_marginal_is_nb(
        r in shapes(3), theta in 0.1f64..5.0, c in 0usize..3, m in 0u64..40
    ) {
        let params = GammaMixtureParams::new(r, theta).unwrap();
        let logs: Vec<f64> = (0..=m)
            .map(|k| normalized_nb_log_pmf(&params, c, k, m).unwrap())
            .collect();
        let nb = negative_binomial_log_pmf(params.total_shape(), params.success_prob(), m).unwrap();
        prop_assert!(rel(log_sum_exp(&logs).unwrap(), nb) <= 1e-11);
    }
}
