//! Absorbing-ball radii and a monitor for the Lyapunov inequality.
//!
//! For `u_t = -u_xxxx - u_xx + gamma u + u u_x` the inequality is taken about
//! the center `psi = -2 phi`; the factor makes `½ psi_x = -phi_x`, which turns
//! the transport term into the potential of the certified form. With a
//! shifted-form margin `m` (so that `<u, K u> >= ¼|u_xx|² + (¼ + m)|u|²`):
//!
//! ```text
//! d/dt |u - psi|² <= -lambda |u|² + M²
//! lambda = m - max(0, gamma - 1/8)
//! M²     = c_phi |phi|² + 16 |phi_x|² + 2·16³ |phi_xx|²
//! ```
//!
//! with `c_phi = 2 gamma² / eta`, `eta = (1/8 + m - gamma) - lambda/2`, so
//! `c_phi = 0` for plain KS.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{PotentialProfile, ProfileNorms};
use crate::solver::SpectralState;
use crate::spectral::PeriodicFourier;

/// Constants of the differential inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovConstants {
    pub lambda: f64,
    #[serde(rename = "M2")]
    pub m2: f64,
    /// Cauchy-Schwarz weights and the rescaling of the reference construction.
    pub p: f64,
    pub q_cs: f64,
    pub beta: f64,
    pub gamma_rescale: f64,
    /// Weights of `|phi|²`, `|phi_x|²`, `|phi_xx|²` in `M²`.
    pub c_phi: f64,
    pub c_phi_x: f64,
    pub c_phi_xx: f64,
    /// `psi = center_scale * phi`.
    pub center_scale: f64,
}

impl Default for LyapunovConstants {
    fn default() -> Self {
        Self {
            lambda: f64::NAN,
            m2: f64::NAN,
            p: 0.5,
            q_cs: 1.0,
            beta: 64.0,
            gamma_rescale: 16.0,
            c_phi: 0.0,
            c_phi_x: 16.0,
            c_phi_xx: 2.0 * 16f64.powi(3),
            center_scale: -2.0,
        }
    }
}

impl LyapunovConstants {
    /// Constants for a certified margin, dKS coefficient `gamma` and profile norms.
    pub fn from_margin(delta_margin: f64, gamma: f64, norms: &ProfileNorms) -> Result<Self> {
        if !(delta_margin > 0.0) {
            return Err(Error::NotCertified(delta_margin));
        }
        let lambda = delta_margin - (gamma - 0.125).max(0.0);
        if !(lambda > 0.0) {
            return Err(Error::NotCertified(lambda));
        }
        let eta = (0.125 + delta_margin - gamma) - 0.5 * lambda;
        let mut c = Self { lambda, c_phi: 2.0 * gamma * gamma / eta, ..Self::default() };
        c.m2 = c.forcing(norms);
        Ok(c)
    }

    pub fn forcing(&self, n: &ProfileNorms) -> f64 {
        self.c_phi * n.phi * n.phi + self.c_phi_x * n.phi_x * n.phi_x + self.c_phi_xx * n.phi_xx * n.phi_xx
    }

    /// `|psi|` for a profile with `|phi| = phi_norm`.
    pub fn center_norm(&self, phi_norm: f64) -> f64 {
        self.center_scale.abs() * phi_norm
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttractorBound {
    pub r_star: f64,
    pub r_star_star: f64,
}

/// `R*² = |phi|² + 2M²/lambda`, `R** = sqrt(2|phi|² + 2M²/lambda) + |phi|`.
pub fn radius(phi_norm: f64, m2: f64, lambda: f64) -> Result<AttractorBound> {
    if !(lambda > 0.0) {
        return Err(Error::Parameter(format!("lambda must be positive, got {lambda}")));
    }
    if !(m2 >= 0.0 && phi_norm >= 0.0) {
        return Err(Error::Parameter(format!("need M2 >= 0 and |phi| >= 0 (got {m2}, {phi_norm})")));
    }
    let b = 2.0 * m2 / lambda;
    let a = phi_norm * phi_norm;
    Ok(AttractorBound {
        r_star: (a + b).sqrt(),
        r_star_star: (2.0 * a + b).sqrt() + phi_norm,
    })
}

/// `M² = 16 |phi_x|² + 2·16³ |phi_xx|²`.
pub fn forcing_constant(profile: &PotentialProfile) -> f64 {
    LyapunovConstants::default().forcing(&profile.norms())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeadlineBound {
    #[serde(rename = "L")]
    pub half_period: f64,
    pub gamma: f64,
    pub lambda: f64,
    #[serde(rename = "M2")]
    pub m2: f64,
    pub center_norm: f64,
    pub r_star: f64,
    pub r_star_star: f64,
    /// `R** / L^{3/2}`.
    pub scaled: f64,
    /// `R** / |phi|_{H²}`.
    pub h2_ratio: f64,
}

/// Absorbing-ball radius for plain KS.
pub fn headline_bound(profile: &PotentialProfile, delta_margin: f64) -> Result<HeadlineBound> {
    headline_bound_gamma(profile, delta_margin, 0.0)
}

pub fn headline_bound_gamma(profile: &PotentialProfile, delta_margin: f64, gamma: f64) -> Result<HeadlineBound> {
    let norms = profile.norms();
    let c = LyapunovConstants::from_margin(delta_margin, gamma, &norms)?;
    let center = c.center_norm(norms.phi);
    let r = radius(center, c.m2, c.lambda)?;
    let l = profile.half_period();
    Ok(HeadlineBound {
        half_period: l,
        gamma,
        lambda: c.lambda,
        m2: c.m2,
        center_norm: center,
        r_star: r.r_star,
        r_star_star: r.r_star_star,
        scaled: r.r_star_star / l.powf(1.5),
        h2_ratio: r.r_star_star / norms.h2,
    })
}

/// `(t, |u|², |u|² - 2<u, psi>)`; the last differs from `|u - psi|²` by a constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonitorSample {
    pub t: f64,
    pub l2_sq: f64,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonitorReport {
    pub violations: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    /// `(t, r(t))` at interior samples.
    pub residuals: Vec<(f64, f64)>,
}

/// Evaluates `r(t) = d/dt |u - psi|² + lambda |u|² - M²` along sampled states.
#[derive(Debug, Clone)]
pub struct LyapunovMonitor {
    constants: LyapunovConstants,
    half_period: f64,
    /// `psi` coefficients for `|k| < n/2` of the simulation grid, FFT order.
    center: Vec<Complex64>,
}

impl LyapunovMonitor {
    /// Project the center onto a simulation grid of `n` modes.
    pub fn new(profile: &PotentialProfile, constants: LyapunovConstants, n: usize) -> Result<Self> {
        let m = profile.len();
        if n > m || n % 2 != 0 {
            return Err(Error::Resolution(format!("profile grid {m} cannot feed a simulation grid of {n}")));
        }
        let l = profile.half_period();
        let fine = PeriodicFourier::new(m, l).forward(profile.phi());
        let s = constants.center_scale;
        let center = (0..n)
            .map(|i| {
                if i == n / 2 {
                    Complex64::new(0.0, 0.0)
                } else if i < n / 2 {
                    s * fine[i]
                } else {
                    s * fine[m - (n - i)]
                }
            })
            .collect();
        Ok(Self { constants, half_period: l, center })
    }

    pub fn constants(&self) -> &LyapunovConstants {
        &self.constants
    }

    pub fn sample(&self, state: &SpectralState) -> MonitorSample {
        let l2_sq = state.derivative_norm_sq(0);
        let cross: f64 = state
            .uhat
            .iter()
            .zip(&self.center)
            .map(|(a, b)| (a * b.conj()).re)
            .sum::<f64>()
            * 2.0
            * self.half_period;
        MonitorSample { t: state.t, l2_sq, distance: l2_sq - 2.0 * cross }
    }

    /// Residuals by centered differences on uniformly spaced samples.
    pub fn evaluate(&self, samples: &[MonitorSample]) -> Result<MonitorReport> {
        evaluate_residuals(samples, self.constants.lambda, self.constants.m2)
    }
}

/// Residuals of `d/dt D + lambda |u|² - M²` with tolerance `1e-6 (1 + M²)`.
pub fn evaluate_residuals(samples: &[MonitorSample], lambda: f64, m2: f64) -> Result<MonitorReport> {
    if samples.len() < 3 {
        return Err(Error::InsufficientData(format!("{} samples, need at least 3", samples.len())));
    }
    let tolerance = 1e-6 * (1.0 + m2);
    let mut residuals = Vec::with_capacity(samples.len() - 2);
    let mut violations = 0;
    let mut max_residual = f64::NEG_INFINITY;
    for w in samples.windows(3) {
        let dt = w[2].t - w[0].t;
        let r = (w[2].distance - w[0].distance) / dt + lambda * w[1].l2_sq - m2;
        if r > tolerance {
            violations += 1;
        }
        max_residual = max_residual.max(r);
        residuals.push((w[1].t, r));
    }
    Ok(MonitorReport { violations, max_residual, tolerance, residuals })
}

/// Monitor a stored trajectory.
pub fn monitor(
    trajectory: &[SpectralState],
    profile: &PotentialProfile,
    constants: LyapunovConstants,
) -> Result<MonitorReport> {
    let n = trajectory.first().map_or(0, |s| s.len());
    if trajectory.len() < 3 {
        return Err(Error::InsufficientData(format!("{} samples, need at least 3", trajectory.len())));
    }
    let mon = LyapunovMonitor::new(profile, constants, n)?;
    let samples: Vec<MonitorSample> = trajectory.iter().map(|s| mon.sample(s)).collect();
    mon.evaluate(&samples)
}
