use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::spectral::PeriodicFourier;

/// Fourier coefficients of `u(., t)` on `[-L, L)` in FFT order,
/// `u(x) = sum_k c_k exp(i pi k x / L)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralState {
    pub half_period: f64,
    pub uhat: Vec<Complex64>,
    pub t: f64,
}

impl SpectralState {
    pub fn zeros(half_period: f64, n: usize) -> Self {
        Self { half_period, uhat: vec![Complex64::new(0.0, 0.0); n], t: 0.0 }
    }

    pub fn from_physical(half_period: f64, values: &[f64]) -> Self {
        let f = PeriodicFourier::new(values.len(), half_period);
        let mut s = Self { half_period, uhat: f.forward(values), t: 0.0 };
        s.project(false);
        s
    }

    pub fn to_physical(&self) -> Vec<f64> {
        PeriodicFourier::new(self.len(), self.half_period).inverse(&self.uhat)
    }

    pub fn len(&self) -> usize {
        self.uhat.len()
    }

    pub fn is_empty(&self) -> bool {
        self.uhat.is_empty()
    }

    /// Signed mode number of slot `i`.
    pub fn mode(&self, i: usize) -> i64 {
        let n = self.len();
        if i < n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    pub fn wavenumber(&self, i: usize) -> f64 {
        std::f64::consts::PI * self.mode(i) as f64 / self.half_period
    }

    /// `∫ |∂^order u|²` by Parseval.
    pub fn derivative_norm_sq(&self, order: i32) -> f64 {
        let s: f64 = self
            .uhat
            .iter()
            .enumerate()
            .map(|(i, c)| c.norm_sqr() * self.wavenumber(i).abs().powi(2 * order))
            .sum();
        2.0 * self.half_period * s
    }

    pub fn l2(&self) -> f64 {
        self.derivative_norm_sq(0).sqrt()
    }

    pub fn l2_grad(&self) -> f64 {
        self.derivative_norm_sq(1).sqrt()
    }

    pub fn l2_hess(&self) -> f64 {
        self.derivative_norm_sq(2).sqrt()
    }

    /// `∫ u v` for two states on the same grid.
    pub fn inner(&self, other: &SpectralState) -> f64 {
        2.0 * self.half_period * self.uhat.iter().zip(&other.uhat).map(|(a, b)| (a * b.conj()).re).sum::<f64>()
    }

    /// Largest `|Re c_k|`: zero for odd functions.
    pub fn even_part(&self) -> f64 {
        self.uhat.iter().fold(0.0f64, |m, c| m.max(c.re.abs()))
    }

    /// Largest `|c_{-k} - conj c_k|`.
    pub fn reality_defect(&self) -> f64 {
        let n = self.len();
        (1..n / 2).fold(0.0f64, |m, k| m.max((self.uhat[n - k] - self.uhat[k].conj()).norm()))
    }

    /// Impose reality, zero mean, a zero Nyquist mode and optionally oddness.
    pub fn project(&mut self, odd: bool) {
        let n = self.len();
        self.uhat[0] = Complex64::new(0.0, 0.0);
        self.uhat[n / 2] = Complex64::new(0.0, 0.0);
        for k in 1..n / 2 {
            let avg = 0.5 * (self.uhat[k] + self.uhat[n - k].conj());
            let avg = if odd { Complex64::new(0.0, avg.im) } else { avg };
            self.uhat[k] = avg;
            self.uhat[n - k] = avg.conj();
        }
    }

    pub fn is_finite(&self) -> bool {
        self.uhat.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

/// Band-limited random data on the lowest `max(1, floor(L/pi))` modes with `|u| = amplitude`.
pub fn random_initial(half_period: f64, n: usize, seed: u64, amplitude: f64, odd_only: bool) -> Result<SpectralState> {
    if !(half_period > 0.0) || n < 8 || !n.is_power_of_two() {
        return Err(Error::Parameter(format!(
            "need L > 0 and a power-of-two grid >= 8 (L = {half_period}, N = {n})"
        )));
    }
    if !(amplitude >= 0.0) {
        return Err(Error::Parameter(format!("amplitude must be nonnegative, got {amplitude}")));
    }
    let modes = ((half_period / std::f64::consts::PI).floor() as usize).max(1);
    let kept = (n / 3).saturating_sub(1).max(1);
    let modes = modes.min(kept);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = SpectralState::zeros(half_period, n);
    for k in 1..=modes {
        let re = if odd_only { 0.0 } else { rng.gen_range(-1.0..1.0) };
        let im = rng.gen_range(-1.0..1.0);
        state.uhat[k] = Complex64::new(re, im);
        state.uhat[n - k] = Complex64::new(re, -im);
    }
    let norm = state.l2();
    if norm > 0.0 {
        let s = amplitude / norm;
        state.uhat.iter_mut().for_each(|c| *c *= s);
    }
    Ok(state)
}
