//! Cross-module consistency: exact pole data against numeric integrals and
//! regression recovery.

use rlctkit::algebra::{parse_polynomial, rat_int, rat_to_f64, Exponent};
use rlctkit::asympt::{evaluate_series, laplace_coeffs, zeta_monomial_box};
use rlctkit::numeric::{fit_lambda_theta, laplace_abs_value, FitConvention, QuadConfig, Region};
use rlctkit::rlct::rlct_monomial;

#[test]
fn leading_laplace_coefficient_matches_quadrature() {
    // kappa = (1,2), tau = 0: smallest pole 1/2 is simple, so
    // c_{1/2,1} = -Gamma(1/2) d_{1/2,1} = sqrt(pi) and Z(N) sqrt(N) -> sqrt(pi)
    let kappa = Exponent::new(vec![1, 2]);
    let tau = Exponent::zero(2);
    let pp = zeta_monomial_box(&kappa, &tau, &rat_int(1)).unwrap();
    let series = laplace_coeffs(&pp).unwrap();
    let (alpha, order) = pp.smallest_pole().unwrap();
    assert_eq!(order, 1);
    let c_lead = series.coeff(alpha, 1);
    let sqrt_pi = std::f64::consts::PI.sqrt();
    assert!((c_lead - sqrt_pi).abs() < 1e-12, "c = {c_lead}");

    let v: Vec<String> = vec!["x".into(), "y".into()];
    let f = parse_polynomial("x*y^2", &v).unwrap();
    let region = Region::Box {
        upper: vec![1.0, 1.0],
    };
    let cfg = QuadConfig {
        order: 10,
        rel_tol: 1e-9,
        ..QuadConfig::default()
    };
    for exp in [4, 5, 6] {
        let n = 10f64.powi(exp);
        let z = laplace_abs_value(&f, &region, n, &cfg).unwrap();
        let scaled = z.value * n.powf(rat_to_f64(alpha));
        let rel = (scaled - c_lead).abs() / c_lead;
        assert!(
            rel < 0.01,
            "N=1e{exp}: Z N^alpha = {scaled} vs {c_lead} (rel {rel:.3e})"
        );
        // the two-pole series tracks the integral even closer
        let predicted = evaluate_series(&series, n, 2).unwrap();
        let rel_series = (z.value - predicted).abs() / z.value;
        assert!(
            rel_series < 2e-3,
            "N=1e{exp}: series {predicted} vs {0} ({rel_series:.3e})",
            z.value
        );
    }
}

#[test]
fn fit_recovers_pairs_from_exact_series() {
    // Z(N) sampled from the exact expansion of every monomial fixture with
    // kappa in {1,2,3}^2 recovers (lambda, theta) by regression
    let ns: Vec<f64> = (0..12)
        .map(|i| 100.0 * 10f64.powf(i as f64 * 4.0 / 11.0))
        .collect();
    for k1 in 1..=3u32 {
        for k2 in 1..=3u32 {
            let kappa = Exponent::new(vec![k1, k2]);
            let tau = Exponent::zero(2);
            let pp = zeta_monomial_box(&kappa, &tau, &rat_int(1)).unwrap();
            let series = laplace_coeffs(&pp).unwrap();
            // keep the single leading term c N^{-alpha} (log N)^{i-1}: that
            // is the model form of the regression, so recovery is exact
            let (alpha, order) = pp.smallest_pole().unwrap();
            let mut leading = rlctkit::asympt::AsymptoticSeries::default();
            leading
                .terms
                .insert((alpha.clone(), order), series.coeff(alpha, order));
            let samples: Vec<(f64, f64)> = ns
                .iter()
                .map(|&n| (n, evaluate_series(&leading, n, 1).unwrap().abs()))
                .collect();
            let fit = fit_lambda_theta(&samples, FitConvention::FunctionExponent).unwrap();
            let pair = rlct_monomial(&kappa, &tau);
            let lambda = rat_to_f64(pair.lambda().unwrap());
            assert_eq!(fit.theta_hat, pair.theta().unwrap(), "kappa ({k1},{k2})");
            assert!(
                (fit.lambda_hat - lambda).abs() <= 1e-6 * lambda,
                "kappa ({k1},{k2}): lambda_hat {} vs {lambda}",
                fit.lambda_hat
            );
            assert!(fit.residual < 1e-9);
        }
    }
}
