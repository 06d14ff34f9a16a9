//! Numerical optimal potential for the Burgers-Sivashinsky model.
//!
//! Minimizes `J(u) = ∫ u_x² + (1/4mu) (u² - |u|²/(2L))²` over mean-free
//! periodic `u` of fixed mass `|u|² = m`, then reads off
//! `phi_x* = (u*² - |u*|²/(2L)) / (2mu)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::PeriodicFourier;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BsConfig {
    /// Lagrange multiplier `mu`.
    pub mu_lagrange: f64,
    #[serde(rename = "L")]
    pub half_period: f64,
    /// Grid size (even).
    pub points: usize,
    /// Stop when the tangential gradient norm drops below this.
    pub tol: f64,
    pub max_iter: usize,
    /// `|u|²` on the constraint sphere.
    pub mass: f64,
}

impl Default for BsConfig {
    fn default() -> Self {
        Self {
            mu_lagrange: 1.0,
            half_period: 10.0,
            points: 256,
            tol: 1e-8,
            max_iter: 20_000,
            mass: 1.0,
        }
    }
}

impl BsConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = self.mu_lagrange > 0.0
            && self.half_period > 0.0
            && self.tol > 0.0
            && self.mass > 0.0
            && self.max_iter > 0;
        if !positive || self.points < 8 || self.points % 2 != 0 {
            return Err(Error::Parameter(format!("invalid BS configuration {self:?}")));
        }
        Ok(())
    }
}

/// Discrete functional on the uniform periodic grid.
#[derive(Debug, Clone)]
pub struct BsFunctional {
    mu: f64,
    fourier: PeriodicFourier,
}

impl BsFunctional {
    pub fn new(mu: f64, half_period: f64, points: usize) -> Self {
        Self { mu, fourier: PeriodicFourier::new(points, half_period) }
    }

    pub fn spacing(&self) -> f64 {
        self.fourier.spacing()
    }

    pub fn grid(&self) -> Vec<f64> {
        self.fourier.grid()
    }

    /// Discrete `∫ f g`.
    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        self.spacing() * f.iter().zip(g).map(|(a, b)| a * b).sum::<f64>()
    }

    fn mean_square(u: &[f64]) -> f64 {
        u.iter().map(|v| v * v).sum::<f64>() / u.len() as f64
    }

    pub fn value(&self, u: &[f64]) -> f64 {
        let ux = self.fourier.derivative(u, 1);
        let m = Self::mean_square(u);
        let h = self.spacing();
        let kinetic: f64 = ux.iter().map(|v| v * v).sum();
        let quartic: f64 = u.iter().map(|v| (v * v - m).powi(2)).sum();
        h * (kinetic + quartic / (4.0 * self.mu))
    }

    /// `J(v) - J(u)` from the difference `v - u`, accurate where the two values agree to
    /// many digits.
    pub fn change(&self, u: &[f64], v: &[f64]) -> f64 {
        let d: Vec<f64> = v.iter().zip(u).map(|(a, b)| a - b).collect();
        let dx = self.fourier.derivative(&d, 1);
        let ux = self.fourier.derivative(u, 1);
        let vx = self.fourier.derivative(v, 1);
        let (mu_, mv) = (Self::mean_square(u), Self::mean_square(v));
        let n = u.len() as f64;
        let dm = d.iter().zip(u.iter().zip(v)).map(|(e, (a, b))| e * (a + b)).sum::<f64>() / n;
        let kinetic: f64 = dx.iter().zip(ux.iter().zip(&vx)).map(|(e, (a, b))| e * (a + b)).sum();
        let quartic: f64 = (0..u.len())
            .map(|i| {
                let (wu, wv) = (u[i] * u[i] - mu_, v[i] * v[i] - mv);
                (d[i] * (u[i] + v[i]) - dm) * (wu + wv)
            })
            .sum();
        self.spacing() * (kinetic + quartic / (4.0 * self.mu))
    }

    /// `L²` gradient `-2 u_xx + (u² - <u²>) u / mu`; the `<u²>` dependence contributes nothing
    /// because `u² - <u²>` has zero sum.
    pub fn gradient(&self, u: &[f64]) -> Vec<f64> {
        let uxx = self.fourier.derivative(u, 2);
        let m = Self::mean_square(u);
        u.iter()
            .zip(&uxx)
            .map(|(&v, &d)| -2.0 * d + (v * v - m) * v / self.mu)
            .collect()
    }

    /// `(s - ∂²)^{-1} f` with the mean removed.
    fn precondition(&self, f: &[f64], shift: f64) -> Vec<f64> {
        let mut c = self.fourier.forward(f);
        for (i, ci) in c.iter_mut().enumerate() {
            if i == 0 || i == self.fourier.len() / 2 {
                *ci = Complex64::new(0.0, 0.0);
            } else {
                let k = self.fourier.wavenumber(i);
                *ci /= shift + k * k;
            }
        }
        self.fourier.inverse(&c)
    }

    /// Drop the mean and the Nyquist mode.
    fn band(&self, f: &[f64]) -> Vec<f64> {
        let mut c = self.fourier.forward(f);
        c[0] = Complex64::new(0.0, 0.0);
        c[self.fourier.len() / 2] = Complex64::new(0.0, 0.0);
        self.fourier.inverse(&c)
    }

    fn phi_x(&self, u: &[f64]) -> Vec<f64> {
        let m = Self::mean_square(u);
        u.iter().map(|v| (v * v - m) / (2.0 * self.mu)).collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BsSolution {
    pub u: Vec<f64>,
    pub phi_x: Vec<f64>,
    pub value: f64,
    /// Norm of the gradient tangent to the constraint set.
    pub grad_norm: f64,
    pub iterations: usize,
    /// `J` after every accepted step, starting with the initial guess.
    pub history: Vec<f64>,
}

const ARMIJO_C: f64 = 1e-4;

/// Sobolev-preconditioned projected gradient descent from `sqrt(m/L) sin(pi x / L)`.
pub fn bs_optimal_potential(cfg: &BsConfig) -> Result<BsSolution> {
    cfg.validate()?;
    let f = BsFunctional::new(cfg.mu_lagrange, cfg.half_period, cfg.points);
    let l = cfg.half_period;
    let kappa1 = std::f64::consts::PI / l;
    let shift = kappa1 * kappa1;
    let amp = (cfg.mass / l).sqrt();
    let mut u: Vec<f64> = f.grid().iter().map(|&x| amp * (kappa1 * x).sin()).collect();

    let retract = |v: &mut Vec<f64>| {
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        v.iter_mut().for_each(|x| *x -= mean);
        let norm2 = f.inner(v, v);
        let s = (cfg.mass / norm2).sqrt();
        v.iter_mut().for_each(|x| *x *= s);
    };
    retract(&mut u);

    let mut value = f.value(&u);
    let mut history = vec![value];
    let mut step: f64 = 1.0;
    let mut grad_norm = f64::INFINITY;
    for iter in 0..cfg.max_iter {
        let g = f.gradient(&u);
        // tangential L² gradient within the mean-free, Nyquist-free iterates
        let g0 = f.band(&g);
        let radial = f.inner(&g0, &u) / f.inner(&u, &u);
        let tangent: Vec<f64> = g0.iter().zip(&u).map(|(a, b)| a - radial * b).collect();
        grad_norm = f.inner(&tangent, &tangent).sqrt();
        if grad_norm < cfg.tol {
            return Ok(BsSolution {
                phi_x: f.phi_x(&u),
                value: f.value(&u),
                u,
                grad_norm,
                iterations: iter,
                history,
            });
        }

        // Riemannian gradient in the (s - ∂²) metric
        let pg = f.precondition(&g0, shift);
        let pu = f.precondition(&u, shift);
        let ratio = f.inner(&pg, &u) / f.inner(&pu, &u);
        let dir: Vec<f64> = pg.iter().zip(&pu).map(|(a, b)| a - ratio * b).collect();
        let slope = f.inner(&g0, &dir);

        step = (2.0 * step).min(4.0);
        loop {
            let mut trial: Vec<f64> = u.iter().zip(&dir).map(|(a, d)| a - step * d).collect();
            retract(&mut trial);
            let change = f.change(&u, &trial);
            if change <= -ARMIJO_C * step * slope {
                u = trial;
                value += change;
                break;
            }
            step *= 0.5;
            if step < 1e-14 {
                return Err(Error::Descent { iterations: iter, grad_norm });
            }
        }
        history.push(value);
    }
    Err(Error::Descent { iterations: cfg.max_iter, grad_norm })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_is_critical() {
        let f = BsFunctional::new(1.0, 5.0, 64);
        let z = vec![0.0; 64];
        assert_eq!(f.value(&z), 0.0);
        assert!(f.gradient(&z).iter().all(|&g| g == 0.0));
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let f = BsFunctional::new(0.7, 4.0, 32);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let u: Vec<f64> = (0..32).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let g = f.gradient(&u);
        let h = f.spacing();
        let eps = 1e-5;
        for j in 0..32 {
            let mut up = u.clone();
            let mut dn = u.clone();
            up[j] += eps;
            dn[j] -= eps;
            let fd = (f.value(&up) - f.value(&dn)) / (2.0 * eps);
            let an = h * g[j];
            assert!((fd - an).abs() <= 1e-6 * an.abs().max(1e-3), "{j}: {fd} vs {an}");
        }
    }

    #[test]
    fn change_agrees_with_value_difference() {
        let f = BsFunctional::new(0.8, 6.0, 64);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u: Vec<f64> = (0..64).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let v: Vec<f64> = u.iter().map(|x| x + 0.1 * rng.gen_range(-1.0..1.0)).collect();
        let direct = f.value(&v) - f.value(&u);
        assert!((f.change(&u, &v) - direct).abs() < 1e-12 * (1.0 + f.value(&u)));
    }

    #[test]
    fn descent_converges_monotonically() {
        let sol = bs_optimal_potential(&BsConfig::default()).unwrap();
        assert!(sol.grad_norm < 1e-8);
        assert!(sol.history.windows(2).all(|w| w[1] <= w[0]));
        let mean = sol.phi_x.iter().sum::<f64>() / sol.phi_x.len() as f64;
        assert!(mean.abs() < 1e-14);
    }

    #[test]
    fn iteration_cap_reports_failure() {
        let cfg = BsConfig { max_iter: 1, tol: 1e-15, ..BsConfig::default() };
        assert!(matches!(bs_optimal_potential(&cfg), Err(Error::Descent { .. })));
    }
}
