use std::f64::consts::PI;

use num_rational::Ratio;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use kslyap::attractor::radius;
use kslyap::coercivity::{
    assemble_samples, certify_samples, hardy_check, hardy_reduced_form, reduced_form_check, CertifyOptions, FormKind,
    SampledFunction,
};
use kslyap::exponents::{solve_critical_exponents, ExponentPair, OperatorOrder};
use kslyap::linalg::min_eigenvalue;
use kslyap::potential::{check_admissible, smooth, CompactShape, PiecewiseParams, SmoothedPotential, SmoothingParams};
use kslyap::study::{fit_power_law, KeyValueConfig};

fn default_shape() -> SmoothedPotential {
    let p = PiecewiseParams::default();
    smooth(p, SmoothingParams::default_for(&p)).unwrap()
}

/// `sum b_k sin(w_k y) + c` with its first two derivatives, sampled on `[-a, a]`.
fn trig(a: f64, b: &[f64], shift: f64, constant: f64, points: usize) -> SampledFunction {
    let w = |k: usize| (k + 1) as f64 * PI / a;
    SampledFunction::from_fn(
        a,
        points,
        |y| constant + b.iter().enumerate().map(|(k, c)| c * (w(k) * y + shift).sin()).sum::<f64>(),
        |y| b.iter().enumerate().map(|(k, c)| c * w(k) * (w(k) * y + shift).cos()).sum(),
        |y| b.iter().enumerate().map(|(k, c)| -c * w(k).powi(2) * (w(k) * y + shift).sin()).sum(),
    )
}

proptest! {
    #[test]
    fn no_feasible_pair_beats_the_vertex(p1 in 0i64..60, p2 in 0i64..80, q in 1i64..16) {
        for order in [OperatorOrder::Fourth, OperatorOrder::Second] {
            if let Ok(pair) = ExponentPair::new(Ratio::new(p1, q), Ratio::new(p2, q)) {
                if pair.is_feasible(order) {
                    prop_assert!(pair.objective() >= solve_critical_exponents(order).objective);
                }
            }
        }
    }

    #[test]
    fn minors_agree_with_eigenvalues(a in 0.2f64..3.0, q0 in 0.01f64..4.0, q1 in 0.01f64..8.0) {
        let params = PiecewiseParams { a, q0, q1 };
        let report = check_admissible(&params);
        let lmin = min_eigenvalue(&report.as_dense()).unwrap();
        prop_assume!(lmin.abs() > 1e-12);
        prop_assert_eq!(report.pass, lmin > 0.0);
        prop_assert_eq!(report.pass, report.minors.iter().all(|&m| m > 0.0));
    }

    #[test]
    fn radius_is_monotone(phi in 0.0f64..1e3, m2 in 0.0f64..1e6, lambda in 0.01f64..100.0, f in 1.0f64..4.0) {
        let base = radius(phi, m2, lambda).unwrap();
        prop_assert!(radius(phi * f, m2, lambda).unwrap().r_star_star >= base.r_star_star);
        prop_assert!(radius(phi, m2 * f, lambda).unwrap().r_star_star >= base.r_star_star);
        prop_assert!(radius(phi, m2, lambda * f).unwrap().r_star_star <= base.r_star_star);
        prop_assert!(base.r_star <= base.r_star_star + 1e-9 * base.r_star_star);
    }

    #[test]
    fn exact_power_laws_are_recovered(slope in -3.0f64..3.0, c in 0.1f64..10.0, n in 3usize..10) {
        let data: Vec<(f64, f64)> = (0..n).map(|i| {
            let l = 8.0 * 1.7f64.powi(i as i32);
            (l, c * l.powf(slope))
        }).collect();
        let fit = fit_power_law(&data).unwrap();
        prop_assert!((fit.slope - slope).abs() < 1e-10);
        prop_assert!((fit.intercept - c.ln()).abs() < 1e-9);
        prop_assert!(fit.r_squared <= 1.0 && fit.r_squared > 1.0 - 1e-9);
    }

    #[test]
    fn flags_override_config(v in -1e6f64..1e6, w in -1e6f64..1e6) {
        let cfg = KeyValueConfig::parse(&format!("gamma = {v}\n# comment\n")).unwrap();
        prop_assert_eq!(cfg.resolve(Some(w), "gamma", 0.0).unwrap(), w);
        prop_assert_eq!(cfg.resolve(None, "gamma", 0.0).unwrap(), v);
        prop_assert_eq!(cfg.resolve::<f64>(None, "dt", 0.5).unwrap(), 0.5);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn hardy_inequality_on_odd_polynomials(
        b in prop::collection::vec(-1.0f64..1.0, 1..8),
        a in 0.5f64..4.0,
    ) {
        let f = trig(a, &b, 0.0, 0.0, 2001);
        let h = hardy_check(&f).unwrap();
        prop_assert!(h.margin >= -1e-10, "margin {}", h.margin);
    }

    #[test]
    fn reduced_form_is_nonnegative(
        b in prop::collection::vec(-1.0f64..1.0, 0..6),
        shift in 0.0f64..(2.0 * PI),
        constant in -2.0f64..2.0,
        half in 1.5f64..4.0,
    ) {
        let sp = default_shape();
        let f = trig(half, &b, shift, constant, 4001);
        prop_assert!(reduced_form_check(&sp, &f.y, &f.u) > -1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hardy_reduced_form_is_nonnegative(
        b in prop::collection::vec(-1.0f64..1.0, 1..6),
        half in 1.5f64..3.0,
    ) {
        let sp = default_shape();
        prop_assume!(sp.half_width() < half);
        let f = trig(half, &b, 0.0, 0.0, 8001);
        prop_assert!(hardy_reduced_form(&sp, &f).unwrap() > -1e-10);
    }
}

#[test]
fn reduced_form_on_constants_and_far_supports() {
    let sp = default_shape();
    let y: Vec<f64> = (0..8001).map(|i| -4.0 + i as f64 * 1e-3).collect();
    let ones = vec![1.0; y.len()];
    let integral = reduced_form_check(&sp, &y, &ones);
    assert!(integral > 0.0);
    // v supported where the potential vanishes
    let edge = sp.half_width();
    let v: Vec<f64> = y.iter().map(|&t| if t > edge + 0.1 { (t - edge - 0.1) * (4.0 - t) } else { 0.0 }).collect();
    let kinetic: f64 = v.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum::<f64>() * 0.5 / 1e-3;
    assert!((reduced_form_check(&sp, &y, &v) - kinetic).abs() < 1e-12);
}

#[test]
fn galerkin_minimum_is_nonincreasing_under_refinement() {
    let l = 40.0;
    let m = 1 << 13;
    let h = 2.0 * l / m as f64;
    let phi_x: Vec<f64> = (0..m).map(|j| {
        let x = -l + j as f64 * h;
        2.0 * (-(x * x)).exp() - 0.3 + 0.4 * (3.0 * PI * x / l).cos()
    }).collect();
    let opts = CertifyOptions { start_modes: 16, max_modes: 512, rtol: 1e-12 };
    let mut checked = 0;
    for order in [OperatorOrder::Fourth, OperatorOrder::Second] {
        let report = match certify_samples(l, &phi_x, order, &opts) {
            Ok(r) => r,
            Err(kslyap::Error::Inconclusive { .. }) => continue,
            Err(e) => panic!("{e}"),
        };
        for w in report.history.windows(2) {
            assert!(w[1].lambda_min <= w[0].lambda_min + 1e-10);
            assert!(w[1].delta_margin <= w[0].delta_margin + 1e-10);
        }
        checked += report.history.len();
    }
    assert!(checked >= 4);
}

#[test]
fn rayleigh_search_reaches_the_galerkin_minimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for trial in 0..5 {
        let l = 6.0 + trial as f64;
        let m = 2048;
        let h = 2.0 * l / m as f64;
        let amps: Vec<f64> = (0..4).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let phi_x: Vec<f64> = (0..m).map(|j| {
            let x = -l + j as f64 * h;
            amps.iter().enumerate().map(|(k, c)| c * (k as f64 * PI * x / l).cos()).sum()
        }).collect();
        let mat = assemble_samples(l, &phi_x, 8, FormKind::Fourth).unwrap();
        let lmin = mat.min_eigenvalue().unwrap();

        let mut best_v: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut best = mat.entries.rayleigh_quotient(&best_v);
        let mut sigma = 0.5;
        let mut stalls = 0;
        for _ in 0..100_000 {
            let v: Vec<f64> = best_v.iter().map(|x| x + sigma * rng.gen_range(-1.0..1.0)).collect();
            let r = mat.entries.rayleigh_quotient(&v);
            assert!(r >= lmin - 1e-10 * (1.0 + lmin.abs()));
            if r < best {
                best = r;
                best_v = v;
                stalls = 0;
            } else {
                stalls += 1;
                if stalls > 50 {
                    sigma = (sigma * 0.7).max(1e-6);
                    stalls = 0;
                }
            }
        }
        assert!(best - lmin < 1e-3, "trial {trial}: {best} vs {lmin}");
    }
}

#[test]
fn free_operator_is_not_coercive_beyond_pi() {
    for l in [3.2, 5.0, 10.0, 64.0] {
        let r = certify_samples(l, &vec![0.0; 1 << 12], OperatorOrder::Fourth, &CertifyOptions::default()).unwrap();
        assert!(r.lambda_min < 0.0, "L = {l}: {}", r.lambda_min);
    }
    let r = certify_samples(3.0, &vec![0.0; 1 << 12], OperatorOrder::Fourth, &CertifyOptions::default()).unwrap();
    assert!(r.lambda_min > 0.0);
}
