//! Galerkin certification of `<u, K u> = ∫ u_xx² - u_x² + phi_x u²` on odd
//! periodic functions, plus the Hardy-type and reduced-form checks used in
//! the construction.
//!
//! The basis is `e_k = L^{-1/2} sin(k pi x / L)`, `k = 1..N`. The potential
//! part is the Gram matrix `∫ phi_x e_j e_k = Re c_{|j-k|} - Re c_{j+k}` where
//! `c_m` are the Fourier coefficients of `phi_x`.
//!
//! A negative eigenvalue at any `N` is conclusive (Rayleigh-Ritz gives an upper
//! bound on the infimum). A positive one is only accepted once doubling `N`
//! stops moving it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::OperatorOrder;
use crate::linalg::{min_eigenvalue, DenseMatrix};
use crate::potential::{CompactShape, PotentialProfile, SmoothedPotential};
use crate::quadrature::{simpson, trapezoid};
use crate::spectral::PeriodicFourier;

/// Which quadratic form to discretize.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FormKind {
    /// `∫ u_xx² - u_x² + phi_x u²`.
    Fourth,
    /// `∫ u_x² - u² + phi_x u²`.
    Second,
    /// `∫ ¾ u_xx² - u_x² + (phi_x - ¼) u²`, nonnegative iff
    /// `<u, K u> >= ¼ ∫ u_xx² + u²`.
    Shifted,
}

impl FormKind {
    pub fn symbol(self, kappa: f64) -> f64 {
        let k2 = kappa * kappa;
        match self {
            FormKind::Fourth => k2 * k2 - k2,
            FormKind::Second => k2 - 1.0,
            FormKind::Shifted => 0.75 * k2 * k2 - k2 - 0.25,
        }
    }
}

impl From<OperatorOrder> for FormKind {
    fn from(order: OperatorOrder) -> Self {
        match order {
            OperatorOrder::Fourth => FormKind::Fourth,
            OperatorOrder::Second => FormKind::Second,
        }
    }
}

/// Symmetric Galerkin matrix of a quadratic form.
#[derive(Debug, Clone)]
pub struct QuadFormMatrix {
    pub half_period: f64,
    pub modes: usize,
    pub kind: FormKind,
    pub entries: DenseMatrix,
}

impl QuadFormMatrix {
    pub fn min_eigenvalue(&self) -> Result<f64> {
        min_eigenvalue(&self.entries)
    }
}

/// `Re c_m`, `m = 0..=max_mode`, of periodic samples on `[-L, L)`.
#[derive(Debug, Clone)]
pub struct CosineCoefficients {
    half_period: f64,
    grid_points: usize,
    re: Vec<f64>,
}

impl CosineCoefficients {
    pub fn new(half_period: f64, phi_x: &[f64], max_mode: usize) -> Result<Self> {
        let m = phi_x.len();
        if m < 4 || m % 2 != 0 {
            return Err(Error::Resolution(format!("grid of {m} points is not usable")));
        }
        if max_mode > m / 2 {
            return Err(Error::Resolution(format!(
                "need modes up to {max_mode}, grid of {m} points resolves {}",
                m / 2
            )));
        }
        let c = PeriodicFourier::new(m, half_period).forward(phi_x);
        Ok(Self {
            half_period,
            grid_points: m,
            re: c[..=max_mode].iter().map(|z| z.re).collect(),
        })
    }

    pub fn max_mode(&self) -> usize {
        self.re.len() - 1
    }

    /// Assemble the `n`-mode matrix; needs `grid_points >= 4 n`.
    pub fn assemble(&self, n: usize, kind: FormKind) -> Result<QuadFormMatrix> {
        if n == 0 {
            return Err(Error::Parameter("need at least one mode".into()));
        }
        if self.grid_points < 4 * n || 2 * n > self.max_mode() {
            return Err(Error::Resolution(format!(
                "{} grid points cannot resolve {n} sine modes (need {})",
                self.grid_points,
                4 * n
            )));
        }
        let l = self.half_period;
        let re = &self.re;
        let mut entries = DenseMatrix::from_fn(n, |i, j| {
            let (j1, k1) = (i + 1, j + 1);
            re[j1.abs_diff(k1)] - re[j1 + k1]
        });
        for i in 0..n {
            let kappa = (i + 1) as f64 * std::f64::consts::PI / l;
            entries.set(i, i, entries.get(i, i) + kind.symbol(kappa));
        }
        entries.symmetrize();
        Ok(QuadFormMatrix { half_period: l, modes: n, kind, entries })
    }
}

/// Galerkin matrix of the form with potential `phi_x` sampled on `[-L, L)`.
pub fn assemble_samples(half_period: f64, phi_x: &[f64], n: usize, kind: FormKind) -> Result<QuadFormMatrix> {
    if n < 1 || phi_x.len() < 4 * n {
        return Err(Error::Resolution(format!(
            "{} grid points cannot resolve {n} sine modes (need {})",
            phi_x.len(),
            4 * n
        )));
    }
    CosineCoefficients::new(half_period, phi_x, 2 * n)?.assemble(n, kind)
}

/// Galerkin matrix of `K` (fourth order) or `K~` (second order); requires `n >= 8`.
pub fn assemble(profile: &PotentialProfile, n: usize, order: OperatorOrder) -> Result<QuadFormMatrix> {
    if n < 8 {
        return Err(Error::Parameter(format!("need at least 8 modes, got {n}")));
    }
    assemble_samples(profile.half_period(), profile.phi_x(), n, order.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertifyOptions {
    pub start_modes: usize,
    pub max_modes: usize,
    /// Converged when successive values differ by less than `rtol (1 + |lambda|)`.
    pub rtol: f64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self { start_modes: 64, max_modes: 4096, rtol: 1e-6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertifyStep {
    pub modes: usize,
    pub lambda_min: f64,
    pub delta_margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoercivityReport {
    pub order: OperatorOrder,
    /// Smallest eigenvalue of `K` (or `K~`).
    pub lambda_min: f64,
    /// Smallest eigenvalue of the shifted form; equals `lambda_min` for the second-order form.
    pub delta_margin: f64,
    pub n_sequence: Vec<usize>,
    pub history: Vec<CertifyStep>,
    pub converged: bool,
    /// `converged` and `delta_margin > 0`.
    pub certified: bool,
}

/// Certify the fourth-order form with default options.
pub fn certify(profile: &PotentialProfile) -> Result<CoercivityReport> {
    certify_samples(profile.half_period(), profile.phi_x(), OperatorOrder::Fourth, &CertifyOptions::default())
}

pub fn certify_with(
    profile: &PotentialProfile,
    order: OperatorOrder,
    options: &CertifyOptions,
) -> Result<CoercivityReport> {
    certify_samples(profile.half_period(), profile.phi_x(), order, options)
}

/// Double the mode count until both eigenvalues settle.
///
/// Hitting the cap unconverged is an error unless the margin is already negative,
/// which is a disproof at any resolution.
pub fn certify_samples(
    half_period: f64,
    phi_x: &[f64],
    order: OperatorOrder,
    options: &CertifyOptions,
) -> Result<CoercivityReport> {
    let m = phi_x.len();
    let cap = options.max_modes.min(m / 4);
    if cap < options.start_modes {
        return Err(Error::Resolution(format!(
            "{m} grid points cannot resolve the starting {} modes",
            options.start_modes
        )));
    }
    let coeffs = CosineCoefficients::new(half_period, phi_x, 2 * cap)?;
    let mut history: Vec<CertifyStep> = Vec::new();
    let mut n = options.start_modes;
    let close = |a: f64, b: f64| (a - b).abs() < options.rtol * (1.0 + b.abs());
    loop {
        let lambda_min = coeffs.assemble(n, order.into())?.min_eigenvalue()?;
        let delta_margin = match order {
            OperatorOrder::Fourth => coeffs.assemble(n, FormKind::Shifted)?.min_eigenvalue()?,
            OperatorOrder::Second => lambda_min,
        };
        let step = CertifyStep { modes: n, lambda_min, delta_margin };
        let converged = history
            .last()
            .is_some_and(|p| close(p.lambda_min, lambda_min) && close(p.delta_margin, delta_margin));
        history.push(step);
        if converged || 2 * n > cap {
            if !converged && delta_margin >= 0.0 {
                let prev = history.iter().rev().nth(1).map_or(f64::NAN, |p| p.delta_margin);
                return Err(Error::Inconclusive { n, change: (delta_margin - prev).abs() });
            }
            return Ok(CoercivityReport {
                order,
                lambda_min,
                delta_margin,
                n_sequence: history.iter().map(|s| s.modes).collect(),
                history,
                converged,
                certified: converged && delta_margin > 0.0,
            });
        }
        n *= 2;
    }
}

/// A function on a uniform grid of `[-a, a]` with its first two derivatives.
#[derive(Debug, Clone)]
pub struct SampledFunction {
    pub y: Vec<f64>,
    pub u: Vec<f64>,
    pub u_y: Vec<f64>,
    pub u_yy: Vec<f64>,
}

impl SampledFunction {
    /// Sample `u`, `u'`, `u''` at `points` nodes on `[-a, a]`.
    pub fn from_fn<F, G, H>(a: f64, points: usize, u: F, u_y: G, u_yy: H) -> Self
    where
        F: Fn(f64) -> f64,
        G: Fn(f64) -> f64,
        H: Fn(f64) -> f64,
    {
        let h = 2.0 * a / (points - 1) as f64;
        let y: Vec<f64> = (0..points)
            .map(|i| if 2 * i + 1 == points { 0.0 } else { -a + i as f64 * h })
            .collect();
        Self {
            u: y.iter().map(|&v| u(v)).collect(),
            u_y: y.iter().map(|&v| u_y(v)).collect(),
            u_yy: y.iter().map(|&v| u_yy(v)).collect(),
            y,
        }
    }

    fn spacing(&self) -> f64 {
        (self.y[self.y.len() - 1] - self.y[0]) / (self.y.len() - 1) as f64
    }

    fn integrate(&self, f: &[f64]) -> f64 {
        if f.len() % 2 == 1 && f.len() >= 3 {
            simpson(f, self.spacing())
        } else {
            trapezoid(f, self.spacing())
        }
    }

    fn origin(&self) -> Result<usize> {
        let n = self.y.len();
        if n < 3 || [self.u.len(), self.u_y.len(), self.u_yy.len()].iter().any(|&k| k != n) {
            return Err(Error::Precondition("sampled function needs matching arrays of length >= 3".into()));
        }
        let i = self
            .y
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(i, _)| i)
            .unwrap_or(0);
        if self.y[i].abs() > 1e-12 * self.spacing() {
            return Err(Error::Precondition("grid must contain y = 0".into()));
        }
        Ok(i)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HardyCheck {
    /// `¼ ∫ u_yy²`.
    pub lhs: f64,
    /// `½ ∫ v_y²`, `v = u / y`.
    pub rhs: f64,
    pub margin: f64,
}

/// `¼ ∫ u_yy² >= ½ ∫ ((u/y)_y)²` for `u(0) = 0`.
pub fn hardy_check(f: &SampledFunction) -> Result<HardyCheck> {
    let zero = f.origin()?;
    let scale = f.u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if f.u[zero].abs() > 1e-12 * (1.0 + scale) {
        return Err(Error::Precondition(format!("u(0) = {:e} is not zero", f.u[zero])));
    }
    let lhs = 0.25 * f.integrate(&f.u_yy.iter().map(|v| v * v).collect::<Vec<_>>());
    let vy: Vec<f64> = (0..f.y.len())
        .map(|i| {
            if i == zero {
                0.5 * f.u_yy[i]
            } else {
                let y = f.y[i];
                (y * f.u_y[i] - f.u[i]) / (y * y)
            }
        })
        .collect();
    let rhs = 0.5 * f.integrate(&vy.iter().map(|v| v * v).collect::<Vec<_>>());
    Ok(HardyCheck { lhs, rhs, margin: lhs - rhs })
}

/// `∫ ½ v_y² + Q~ v²` for samples `v` on the uniform grid `y`.
///
/// The kinetic part is the exact energy of the piecewise-linear interpolant;
/// the potential part uses the trapezoid rule.
pub fn reduced_form_check(sp: &SmoothedPotential, y: &[f64], v: &[f64]) -> f64 {
    let n = y.len().min(v.len());
    if n < 2 {
        return 0.0;
    }
    let h = (y[n - 1] - y[0]) / (n - 1) as f64;
    let kinetic: f64 = v[..n].windows(2).map(|w| (w[1] - w[0]).powi(2)).sum::<f64>() * 0.5 / h;
    let weighted: Vec<f64> = (0..n).map(|i| sp.big_q(y[i]) * v[i] * v[i]).collect();
    kinetic + trapezoid(&weighted, h)
}

/// `∫ ¼ u_yy² + q~ u²`, the form that the Hardy step reduces to `∫ ½ v_y² + Q~ v²`.
pub fn hardy_reduced_form(sp: &SmoothedPotential, f: &SampledFunction) -> Result<f64> {
    f.origin()?;
    let g: Vec<f64> = (0..f.y.len())
        .map(|i| 0.25 * f.u_yy[i] * f.u_yy[i] + sp.value(f.y[i]) * f.u[i] * f.u[i])
        .collect();
    Ok(f.integrate(&g))
}
