#![allow(dead_code)]

use kslyap::quadrature::simpson;
use kslyap::solver::{default_grid, random_initial, Etdrk4, SpectralState};

/// Advance `state` to `t_end` with a fixed step.
pub fn integrate(state: &SpectralState, gamma: f64, dt: f64, t_end: f64, odd: bool) -> SpectralState {
    let mut stepper = Etdrk4::new(state.half_period, state.len(), gamma, dt, odd);
    let mut s = state.clone();
    let steps = (t_end / dt).round() as usize;
    for _ in 0..steps {
        stepper.step(&mut s).expect("step");
    }
    s
}

pub fn distance(a: &SpectralState, b: &SpectralState) -> f64 {
    let mut d = a.clone();
    d.uhat.iter_mut().zip(&b.uhat).for_each(|(x, y)| *x -= y);
    d.l2()
}

/// Relative mismatch in `½|u|²(t1) - ½|u|²(t0) = ∫ |u_x|² - |u_xx|² + gamma |u|²` over
/// a window after burn-in, normalized by `∫ |u_x|² + |u_xx|²`.
pub fn energy_residual(l: f64, gamma: f64, seed: u64, burn_in: f64, window: f64, dt: f64) -> f64 {
    let n = default_grid(l);
    let start = random_initial(l, n, seed, 1.0, false).expect("initial");
    let mut s = integrate(&start, gamma, dt, burn_in, false);
    let mut stepper = Etdrk4::new(l, n, gamma, dt, false);
    let steps = 2 * ((window / dt / 2.0).round() as usize);
    let mut rate = Vec::with_capacity(steps + 1);
    let mut scale = Vec::with_capacity(steps + 1);
    let e0 = 0.5 * s.derivative_norm_sq(0);
    for k in 0..=steps {
        if k > 0 {
            stepper.step(&mut s).expect("step");
        }
        let (u2, ux2, uxx2) = (s.derivative_norm_sq(0), s.derivative_norm_sq(1), s.derivative_norm_sq(2));
        rate.push(ux2 - uxx2 + gamma * u2);
        scale.push(ux2 + uxx2);
    }
    let e1 = 0.5 * s.derivative_norm_sq(0);
    ((e1 - e0) - simpson(&rate, dt)).abs() / simpson(&scale, dt)
}

/// Observed order from step-halving differences `|u_dt - u_{dt/2}|`, one value per
/// consecutive pair.
pub fn temporal_orders(l: f64, t_end: f64, dts: &[f64]) -> Vec<f64> {
    let n = default_grid(l);
    let start = random_initial(l, n, 5, 1.0, false).expect("initial");
    let finals: Vec<SpectralState> = dts.iter().map(|&dt| integrate(&start, 0.0, dt, t_end, false)).collect();
    let diffs: Vec<f64> = finals.windows(2).map(|w| distance(&w[0], &w[1])).collect();
    diffs
        .windows(2)
        .zip(dts.windows(2))
        .map(|(e, d)| (e[0] / e[1]).ln() / (d[0] / d[1]).ln())
        .collect()
}
