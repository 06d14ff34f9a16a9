//! ETDRK4 pseudospectral integrator for
//! `u_t = -u_xxxx - u_xx + gamma u + u u_x` on `[-L, L)`.
//!
//! The linear part is diagonal in Fourier space with symbol
//! `sigma(kappa) = kappa² - kappa⁴ + gamma`. The nonlinearity
//! `u u_x = (u²/2)_x` is evaluated on the grid with 2/3-rule dealiasing.
//! ETD coefficients use contour averaging over 32 points.

mod state;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use state::{random_initial, SpectralState};

use crate::error::{Error, Result};
use crate::spectral::PeriodicFourier;

/// `sigma(kappa_m) = kappa_m² - kappa_m⁴ + gamma` with `kappa_m = pi m / L`, in FFT order.
pub fn linear_symbol(half_period: f64, n: usize, gamma: f64) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let m = if i < n / 2 { i as f64 } else { i as f64 - n as f64 };
            let k = std::f64::consts::PI * m / half_period;
            k * k - k * k * k * k + gamma
        })
        .collect()
}

/// Number of positive modes with `sigma > 0`.
pub fn growing_modes(half_period: f64, gamma: f64) -> usize {
    let mut m = 1usize;
    let mut count = 0;
    loop {
        let k = std::f64::consts::PI * m as f64 / half_period;
        if k > 1.0 && k * k - k * k * k * k + gamma <= 0.0 {
            return count;
        }
        if k * k - k * k * k * k + gamma > 0.0 {
            count += 1;
        }
        m += 1;
    }
}

/// Power-of-two grid keeping dealiased wavenumbers up to about 5.
pub fn default_grid(half_period: f64) -> usize {
    ((15.0 * half_period / std::f64::consts::PI).ceil() as usize).max(64).next_power_of_two()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub gamma: f64,
    pub dt: f64,
    pub t_end: f64,
    /// Burn-in excluded from the supremum; `None` picks `max(200, 10 / sigma_max)`.
    pub transient: Option<f64>,
    /// Record every this many steps.
    pub record_every: usize,
    pub seed: u64,
    pub odd_only: bool,
    /// Keep the sampled states in the trajectory.
    pub keep_states: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            gamma: 0.0,
            dt: 0.05,
            t_end: 1000.0,
            transient: None,
            record_every: 20,
            seed: 0,
            odd_only: false,
            keep_states: false,
        }
    }
}

impl SolveConfig {
    /// Burn-in used for a domain of half-period `l`.
    pub fn transient_for(&self, half_period: f64) -> f64 {
        self.transient.unwrap_or_else(|| {
            let smax = linear_symbol(half_period, default_grid(half_period), self.gamma)
                .into_iter()
                .fold(0.0f64, f64::max);
            if smax > 0.0 {
                (10.0 / smax).max(200.0)
            } else {
                200.0
            }
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) || self.record_every == 0 || !(self.t_end > 0.0) {
            return Err(Error::Parameter(format!("invalid time stepping {self:?}")));
        }
        if !(self.gamma >= 0.0) {
            return Err(Error::Parameter(format!("gamma must be nonnegative, got {}", self.gamma)));
        }
        if let Some(tr) = self.transient {
            if !(tr >= 0.0 && tr < self.t_end) {
                return Err(Error::Parameter(format!("transient {tr} must lie in [0, t_end)")));
            }
        }
        Ok(())
    }
}

/// Reusable ETDRK4 stepper for one grid and time step.
#[derive(Debug, Clone)]
pub struct Etdrk4 {
    fourier: PeriodicFourier,
    dt: f64,
    odd: bool,
    e: Vec<f64>,
    e2: Vec<f64>,
    q: Vec<f64>,
    f1: Vec<f64>,
    f2: Vec<f64>,
    f3: Vec<f64>,
    /// `0.5 i kappa` on kept modes, zero elsewhere.
    g: Vec<Complex64>,
    work: Vec<Complex64>,
}

const CONTOUR_POINTS: usize = 32;

impl Etdrk4 {
    pub fn new(half_period: f64, n: usize, gamma: f64, dt: f64, odd: bool) -> Self {
        let fourier = PeriodicFourier::new(n, half_period);
        let sigma = linear_symbol(half_period, n, gamma);
        let roots: Vec<Complex64> = (1..=CONTOUR_POINTS)
            .map(|j| Complex64::from_polar(1.0, std::f64::consts::PI * (j as f64 - 0.5) / CONTOUR_POINTS as f64))
            .collect();
        let mut q = vec![0.0; n];
        let mut f1 = vec![0.0; n];
        let mut f2 = vec![0.0; n];
        let mut f3 = vec![0.0; n];
        for i in 0..n {
            let (mut sq, mut s1, mut s2, mut s3) = (Complex64::default(), Complex64::default(), Complex64::default(), Complex64::default());
            for r in &roots {
                let z = dt * sigma[i] + r;
                let ez = z.exp();
                let z3 = z * z * z;
                sq += ((z / 2.0).exp() - 1.0) / z;
                s1 += (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3;
                s2 += (2.0 + z + ez * (z - 2.0)) / z3;
                s3 += (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3;
            }
            let w = dt / CONTOUR_POINTS as f64;
            q[i] = w * sq.re;
            f1[i] = w * s1.re;
            f2[i] = w * s2.re;
            f3[i] = w * s3.re;
        }
        let cutoff = n / 3;
        let g = (0..n)
            .map(|i| {
                let m = fourier.mode(i);
                if m.unsigned_abs() as usize >= cutoff {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.5 * fourier.wavenumber(i))
                }
            })
            .collect();
        Self {
            e: sigma.iter().map(|s| (dt * s).exp()).collect(),
            e2: sigma.iter().map(|s| (0.5 * dt * s).exp()).collect(),
            fourier,
            dt,
            odd,
            q,
            f1,
            f2,
            f3,
            g,
            work: vec![Complex64::default(); n],
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Dealiased `F[u u_x]` for coefficients `v`.
    pub fn nonlinear(&mut self, v: &[Complex64], out: &mut [Complex64]) {
        self.work.copy_from_slice(v);
        self.fourier.inverse_in_place(&mut self.work);
        for c in self.work.iter_mut() {
            *c = Complex64::new(c.re * c.re, 0.0);
        }
        self.fourier.forward_in_place(&mut self.work);
        for ((o, w), g) in out.iter_mut().zip(&self.work).zip(&self.g) {
            *o = g * w;
        }
    }

    /// Advance `state` by one step.
    pub fn step(&mut self, state: &mut SpectralState) -> Result<()> {
        let n = state.len();
        let v = state.uhat.clone();
        let mut nv = vec![Complex64::default(); n];
        let mut na = vec![Complex64::default(); n];
        let mut nb = vec![Complex64::default(); n];
        let mut nc = vec![Complex64::default(); n];
        self.nonlinear(&v, &mut nv);
        let a: Vec<Complex64> = (0..n).map(|i| self.e2[i] * v[i] + self.q[i] * nv[i]).collect();
        self.nonlinear(&a, &mut na);
        let b: Vec<Complex64> = (0..n).map(|i| self.e2[i] * v[i] + self.q[i] * na[i]).collect();
        self.nonlinear(&b, &mut nb);
        let c: Vec<Complex64> = (0..n)
            .map(|i| self.e2[i] * a[i] + self.q[i] * (2.0 * nb[i] - nv[i]))
            .collect();
        self.nonlinear(&c, &mut nc);
        for i in 0..n {
            state.uhat[i] = self.e[i] * v[i]
                + nv[i] * self.f1[i]
                + 2.0 * (na[i] + nb[i]) * self.f2[i]
                + nc[i] * self.f3[i];
        }
        state.t += self.dt;
        state.project(self.odd);
        if !state.is_finite() {
            return Err(Error::BlowUp { t: state.t, norm: state.l2() });
        }
        Ok(())
    }
}

/// One ETDRK4 step with a freshly built stepper.
pub fn step(state: &SpectralState, cfg: &SolveConfig) -> Result<SpectralState> {
    let mut stepper = Etdrk4::new(state.half_period, state.len(), cfg.gamma, cfg.dt, cfg.odd_only);
    let mut next = state.clone();
    stepper.step(&mut next)?;
    Ok(next)
}

/// Sampled norms along a run.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub l2: Vec<f64>,
    pub l2_grad: Vec<f64>,
    pub l2_hess: Vec<f64>,
    #[serde(skip)]
    pub states: Vec<SpectralState>,
    /// `max |u|` over samples with `t > transient`.
    pub sup_l2: f64,
    pub transient: f64,
}

/// Reject step sizes that make one step's linear growth or the initial
/// advective Courant number excessive.
fn stability_check(initial: &SpectralState, cfg: &SolveConfig) -> Result<()> {
    let n = initial.len();
    let smax = linear_symbol(initial.half_period, n, cfg.gamma).into_iter().fold(0.0f64, f64::max);
    if cfg.dt * smax > 1.0 {
        return Err(Error::Parameter(format!("dt = {} too large for growth rate {smax}", cfg.dt)));
    }
    let umax = initial.to_physical().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let kmax = std::f64::consts::PI * (n / 3) as f64 / initial.half_period;
    if cfg.dt * umax * kmax > 2.0 {
        return Err(Error::Parameter(format!(
            "dt = {} violates the advective limit (|u|_inf = {umax}, kappa_max = {kmax})",
            cfg.dt
        )));
    }
    Ok(())
}

/// Integrate to `t_end`, calling `observe` at t = 0 and every `record_every` steps.
pub fn simulate_with<F: FnMut(&SpectralState)>(
    initial: &SpectralState,
    cfg: &SolveConfig,
    mut observe: F,
) -> Result<Trajectory> {
    let l = initial.half_period;
    cfg.validate()?;
    stability_check(initial, cfg)?;
    let transient = cfg.transient_for(l).min(cfg.t_end);
    let mut stepper = Etdrk4::new(l, initial.len(), cfg.gamma, cfg.dt, cfg.odd_only);
    let mut state = initial.clone();
    state.project(cfg.odd_only);
    let steps = (cfg.t_end / cfg.dt).round() as usize;
    let mut traj = Trajectory { transient, ..Trajectory::default() };
    let record = |s: &SpectralState, traj: &mut Trajectory| {
        let l2 = s.l2();
        traj.times.push(s.t);
        traj.l2.push(l2);
        traj.l2_grad.push(s.l2_grad());
        traj.l2_hess.push(s.l2_hess());
        if s.t > transient {
            traj.sup_l2 = traj.sup_l2.max(l2);
        }
        if cfg.keep_states {
            traj.states.push(s.clone());
        }
    };
    record(&state, &mut traj);
    observe(&state);
    for k in 1..=steps {
        stepper.step(&mut state)?;
        if k % cfg.record_every == 0 {
            record(&state, &mut traj);
            observe(&state);
        }
    }
    Ok(traj)
}

pub fn simulate(initial: &SpectralState, cfg: &SolveConfig) -> Result<Trajectory> {
    simulate_with(initial, cfg, |_| {})
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn symbol_examples() {
        let s = linear_symbol(2.0, 64, 0.0);
        assert!(s.iter().skip(1).all(|&v| v < 0.0));
        assert_eq!(growing_modes(10.0 * PI, 0.0), 9);
        let s = linear_symbol(10.0 * PI, 64, 0.0);
        assert!(s[10].abs() < 1e-15);
        assert!(s[9] > 0.0 && s[11] < 0.0);
    }

    #[test]
    fn zero_is_fixed() {
        let mut st = SpectralState::zeros(10.0, 64);
        let mut stepper = Etdrk4::new(10.0, 64, 0.3, 0.05, false);
        for _ in 0..20 {
            stepper.step(&mut st).unwrap();
        }
        assert!(st.uhat.iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn dealiasing_single_mode() {
        let n = 64;
        let l = 8.0;
        let mut stepper = Etdrk4::new(l, n, 0.0, 0.01, false);
        let mut v = vec![Complex64::default(); n];
        v[3] = Complex64::new(0.0, -0.5);
        v[n - 3] = Complex64::new(0.0, 0.5);
        let mut out = vec![Complex64::default(); n];
        stepper.nonlinear(&v, &mut out);
        for (i, c) in out.iter().enumerate() {
            let m = stepper.fourier.mode(i).unsigned_abs();
            if m != 6 {
                assert!(c.norm() < 1e-15, "mode {m}: {c}");
            }
        }
        // u = sin(3 pi x / L): u u_x = (3 pi / 2L) sin(6 pi x / L)
        let amp = 3.0 * PI / (2.0 * l);
        assert!((out[6] - Complex64::new(0.0, -0.5 * amp)).norm() < 1e-13);
    }

    #[test]
    fn linear_decay_rate() {
        let l = 2.0;
        let n = 32;
        let mut st = SpectralState::zeros(l, n);
        st.uhat[1] = Complex64::new(0.0, -1e-6);
        st.uhat[n - 1] = Complex64::new(0.0, 1e-6);
        let s = linear_symbol(l, n, 0.0)[1];
        let mut stepper = Etdrk4::new(l, n, 0.0, 0.05, false);
        for _ in 0..20 {
            stepper.step(&mut st).unwrap();
        }
        let expect = 1e-6 * (s * 1.0).exp();
        assert!((st.uhat[1].im.abs() - expect).abs() < 1e-12 * expect.max(1e-20) + 1e-18);
    }

    #[test]
    fn validation() {
        let cfg = SolveConfig { transient: Some(10.0), t_end: 5.0, ..SolveConfig::default() };
        assert!(cfg.validate().is_err());
        let cfg = SolveConfig { dt: 0.0, ..SolveConfig::default() };
        assert!(cfg.validate().is_err());
        let cfg = SolveConfig::default();
        assert!((cfg.transient_for(10.0 * PI) - 200.0).abs() < 1e-12);
    }
}
