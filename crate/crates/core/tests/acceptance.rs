//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::f64::consts::PI;
use std::time::Instant;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use kslyap::attractor::{headline_bound, LyapunovConstants};
use kslyap::coercivity::{certify, hardy_check, SampledFunction};
use kslyap::exponents::{solve_critical_exponents, OperatorOrder};
use kslyap::linalg::min_eigenvalue;
use kslyap::potential::{
    bs_optimal_potential, build_default_profile, check_admissible, BsConfig, BsFunctional, PiecewiseParams,
    PotentialProfile,
};
use kslyap::solver::{growing_modes, random_initial, SolveConfig};
use kslyap::study::{fit_power_law, molinet, simulate_checked, SweepSimulation};
use kslyap::Error;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn exponent_lp() -> Outcome {
    let start = Instant::now();
    let fourth = solve_critical_exponents(OperatorOrder::Fourth);
    let second = solve_critical_exponents(OperatorOrder::Second);
    let secs = start.elapsed().as_secs_f64();
    let exact = fourth.pair.c1() == Ratio::new(1, 3)
        && fourth.pair.c2() == Ratio::new(4, 3)
        && fourth.objective == Ratio::new(3, 2)
        && second.pair.c1() == Ratio::from_integer(1)
        && second.pair.c2() == Ratio::from_integer(2)
        && second.objective == Ratio::new(5, 2);
    check(
        exact && secs < 1.0,
        format!("fourth {} -> {}, second {} -> {}, {secs:.3} s", fourth.pair, fourth.objective, second.pair, second.objective),
    )
}

fn minors() -> Outcome {
    let start = Instant::now();
    let report = check_admissible(&PiecewiseParams::default());
    let expected = [1.0, 0.25, 0.125];
    let defaults_ok = report.pass && report.minors.iter().zip(expected).all(|(m, e)| (m - e).abs() < 1e-12);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut disagreements = 0;
    for _ in 0..100 {
        let p = PiecewiseParams { a: rng.gen_range(0.2..3.0), q0: rng.gen_range(0.01..4.0), q1: rng.gen_range(0.01..8.0) };
        let r = check_admissible(&p);
        let pd = min_eigenvalue(&r.as_dense()).map_err(|e| e.to_string())? > 0.0;
        if pd != r.pass {
            disagreements += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        defaults_ok && disagreements == 0 && secs < 1.0,
        format!("minors {:?}, {disagreements} disagreements in 100, {secs:.3} s", report.minors),
    )
}

fn hardy() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = f64::INFINITY;
    for _ in 0..500 {
        let a = rng.gen_range(0.5..4.0);
        let terms = rng.gen_range(1..8);
        let b: Vec<f64> = (0..terms).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let w = |k: usize| (k + 1) as f64 * PI / a;
        let f = SampledFunction::from_fn(
            a,
            2001,
            |y| b.iter().enumerate().map(|(k, c)| c * (w(k) * y).sin()).sum(),
            |y| b.iter().enumerate().map(|(k, c)| c * w(k) * (w(k) * y).cos()).sum(),
            |y| b.iter().enumerate().map(|(k, c)| -c * w(k).powi(2) * (w(k) * y).sin()).sum(),
        );
        worst = worst.min(hardy_check(&f).map_err(|e| e.to_string())?.margin);
    }
    let secs = start.elapsed().as_secs_f64();
    check(worst >= -1e-10 && secs < 10.0, format!("smallest margin {worst:.4e}, {secs:.2} s"))
}

struct SweepRow {
    l: f64,
    margin: f64,
    converged: bool,
    profile_norms: kslyap::potential::ProfileNorms,
    r_star_star: f64,
}

fn run_sweep() -> Result<Vec<SweepRow>, String> {
    [32.0, 64.0, 128.0, 256.0, 512.0]
        .into_iter()
        .map(|l| {
            let p = build_default_profile(l).map_err(|e| format!("L = {l}: {e}"))?;
            let r = certify(&p).map_err(|e| format!("L = {l}: {e}"))?;
            let b = headline_bound(&p, r.delta_margin).map_err(|e| format!("L = {l}: {e}"))?;
            Ok(SweepRow { l, margin: r.delta_margin, converged: r.converged, profile_norms: p.norms(), r_star_star: b.r_star_star })
        })
        .collect()
}

fn coercivity(rows: &[SweepRow]) -> Outcome {
    let all_ok = rows.iter().all(|r| r.margin >= -1e-6 && r.converged);
    let min = rows.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
    let first = rows[0].margin;
    let zero = PotentialProfile::zero(64.0, 1 << 14).map_err(|e| e.to_string())?;
    let control = certify(&zero).map_err(|e| e.to_string())?.lambda_min;
    let margins: Vec<String> = rows.iter().map(|r| format!("{}:{:.4}", r.l, r.margin)).collect();
    check(
        all_ok && min >= 0.5 * first && (control + 0.25).abs() <= 1e-3,
        format!("margins [{}], control lambda_min {control:.6}", margins.join(" ")),
    )
}

fn slopes(rows: &[SweepRow]) -> Outcome {
    let fit = |f: &dyn Fn(&SweepRow) -> f64| {
        fit_power_law(&rows.iter().map(|r| (r.l, f(r))).collect::<Vec<_>>()).map(|p| p.slope).map_err(|e| e.to_string())
    };
    let h2 = fit(&|r| r.profile_norms.h2)?;
    let px = fit(&|r| r.profile_norms.phi_x.powi(2))?;
    let pxx = fit(&|r| r.profile_norms.phi_xx.powi(2))?;
    let rss = fit(&|r| r.r_star_star)?;
    check(
        (h2 - 1.5).abs() <= 0.05 && (px - 7.0 / 3.0).abs() <= 0.1 && (pxx - 3.0).abs() <= 0.1 && (rss - 1.5).abs() <= 0.05,
        format!("H2 {h2:.4}, |phi_x|^2 {px:.4}, |phi_xx|^2 {pxx:.4}, R** {rss:.4}"),
    )
}

fn simulation() -> Outcome {
    let mut worst_ratio = 0.0f64;
    let mut violations = 0;
    let mut runs = 0;
    for l in [16.0 * PI, 32.0 * PI] {
        let profile = build_default_profile(l).map_err(|e| e.to_string())?;
        let report = certify(&profile).map_err(|e| e.to_string())?;
        for gamma in [0.0, 0.1] {
            let constants =
                LyapunovConstants::from_margin(report.delta_margin, gamma, &profile.norms()).map_err(|e| e.to_string())?;
            let bound = kslyap::attractor::headline_bound_gamma(&profile, report.delta_margin, gamma)
                .map_err(|e| e.to_string())?
                .r_star_star;
            for seed in 1..=3 {
                let sim = SweepSimulation {
                    solve: SolveConfig { gamma, t_end: 1000.0, seed, odd_only: true, ..SolveConfig::default() },
                    amplitude: 1.0,
                };
                let (sup, v) = simulate_checked(&profile, constants, &sim).map_err(|e| e.to_string())?;
                worst_ratio = worst_ratio.max(sup / bound);
                violations += v;
                runs += 1;
            }
        }
    }
    check(
        worst_ratio <= 1.0 && violations == 0 && runs == 12,
        format!("{runs} runs, max sup|u|/R** = {worst_ratio:.3e}, {violations} monitor violations"),
    )
}

fn solver() -> Outcome {
    let residual = common::energy_residual(16.0 * PI, 0.0, 2, 150.0, 40.0, 0.02);
    let small = {
        let s = random_initial(2.0, 64, 9, 1.0, false).map_err(|e| e.to_string())?;
        common::integrate(&s, 0.0, 0.05, 50.0, false).l2()
    };
    let orders = common::temporal_orders(12.0, 4.0, &[0.025, 0.0125, 0.00625, 0.003125]);
    let order = orders.iter().copied().fold(f64::INFINITY, f64::min);
    let modes = growing_modes(10.0 * PI, 0.0);
    check(
        residual < 1e-4 && small < 1e-8 && order >= 3.5 && modes == 9,
        format!("energy residual {residual:.2e}, |u(50)| at L=2 {small:.2e}, order {order:.3}, growing modes {modes}"),
    )
}

fn bs_minimizer() -> Outcome {
    let f = BsFunctional::new(1.0, 10.0, 64);
    let h = f.spacing();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let u: Vec<f64> = (0..64).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let g = f.gradient(&u);
        let eps = 1e-5;
        let mut num = 0.0;
        let mut den = 0.0;
        for j in 0..64 {
            let mut up = u.clone();
            let mut dn = u.clone();
            up[j] += eps;
            dn[j] -= eps;
            let fd = (f.value(&up) - f.value(&dn)) / (2.0 * eps);
            num += (fd - h * g[j]).powi(2);
            den += (h * g[j]).powi(2);
        }
        worst = worst.max((num / den).sqrt());
    }
    let sol = bs_optimal_potential(&BsConfig::default()).map_err(|e| e.to_string())?;
    let monotone = sol.history.windows(2).all(|w| w[1] <= w[0]);
    check(
        worst < 1e-6 && monotone && sol.grad_norm < 1e-8,
        format!(
            "gradient rel. error {worst:.2e}, {} steps monotone {monotone}, final |grad| {:.2e}",
            sol.iterations, sol.grad_norm
        ),
    )
}

fn molinet_calc() -> Outcome {
    let r = molinet(100.0, 1.0, None).map_err(|e| e.to_string())?;
    let target = 1.9306977288832496e-4;
    let rel = (r.ly_max - target).abs() / target;
    let exact = (r.ly_max - 100f64.powf(-13.0 / 7.0)).abs() / target;
    let raised = matches!(molinet(100.0, 1.0, Some(2.0 * r.ly_max)), Err(Error::AspectRatio { .. }));
    check(rel < 1e-6 && exact < 1e-6 && raised, format!("Ly_max {:.10e}, violation raised {raised}", r.ly_max))
}

fn main() {
    let mut failed = 0;
    let mut report = |n: usize, name: &str, outcome: Outcome| {
        match outcome {
            Ok(d) => println!("PASS {n} {name}: {d}"),
            Err(d) => {
                failed += 1;
                println!("FAIL {n} {name}: {d}");
            }
        }
    };
    report(1, "exponent LP", exponent_lp());
    report(2, "admissibility minors", minors());
    report(3, "Hardy inequality", hardy());
    match run_sweep() {
        Ok(rows) => {
            report(4, "coercivity sweep", coercivity(&rows));
            report(5, "scaling slopes", slopes(&rows));
        }
        Err(e) => {
            report(4, "coercivity sweep", Err(e.clone()));
            report(5, "scaling slopes", Err(e));
        }
    }
    report(6, "simulation bound", simulation());
    report(7, "solver correctness", solver());
    report(8, "BS minimizer", bs_minimizer());
    report(9, "Molinet calculator", molinet_calc());
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all 9 criteria passed");
}
