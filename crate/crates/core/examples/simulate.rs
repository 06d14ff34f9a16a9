//! Integrate KS from random odd data and track the Lyapunov inequality along the way.
//!
//! ```text
//! cargo run --release --example simulate -- 100.53 0.1 1000
//! ```

use kslyap::attractor::{LyapunovConstants, LyapunovMonitor};
use kslyap::coercivity::certify;
use kslyap::potential::build_default_profile;
use kslyap::solver::{default_grid, growing_modes, random_initial, simulate_with, SolveConfig};

fn main() -> kslyap::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let l = args.first().copied().unwrap_or(32.0 * std::f64::consts::PI);
    let gamma = args.get(1).copied().unwrap_or(0.0);
    let t_end = args.get(2).copied().unwrap_or(600.0);

    let profile = build_default_profile(l)?;
    let report = certify(&profile)?;
    let constants = LyapunovConstants::from_margin(report.delta_margin, gamma, &profile.norms())?;
    let n = default_grid(l);
    let monitor = LyapunovMonitor::new(&profile, constants, n)?;
    println!("L = {l:.4}, N = {n}, growing modes = {}", growing_modes(l, gamma));

    let cfg = SolveConfig { gamma, t_end, odd_only: true, ..SolveConfig::default() };
    let initial = random_initial(l, n, 1, 1.0, true)?;
    let mut samples = Vec::new();
    let traj = simulate_with(&initial, &cfg, |s| samples.push(monitor.sample(s)))?;
    let check = monitor.evaluate(&samples)?;

    let bound = kslyap::attractor::radius(profile.norms().phi, constants.m2, constants.lambda)?;
    for (i, t) in traj.times.iter().enumerate().step_by(traj.times.len() / 10 + 1) {
        println!("t = {t:>8.1}  |u| = {:>9.4}  |u_x| = {:>9.4}", traj.l2[i], traj.l2_grad[i]);
    }
    println!("sup |u| after t = {}: {:.4} (R** = {:.3e})", traj.transient, traj.sup_l2, bound.r_star_star);
    println!("violations {} / {}", check.violations, check.residuals.len());
    Ok(())
}
