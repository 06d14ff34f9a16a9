//! Fourier transforms on the periodic grid `x_j = -L + j h`, `h = 2L / M`.
//!
//! Coefficients are stored in FFT order and refer to the physical
//! coordinate: `u(x) = sum_k c_k exp(i kappa_k x)` with `kappa_k = pi k / L`.
//! With this convention an odd function has purely imaginary coefficients.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

#[derive(Clone)]
pub struct PeriodicFourier {
    len: usize,
    half_period: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for PeriodicFourier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PeriodicFourier")
            .field("len", &self.len)
            .field("half_period", &self.half_period)
            .finish()
    }
}

impl PeriodicFourier {
    pub fn new(len: usize, half_period: f64) -> Self {
        assert!(len >= 2 && len % 2 == 0, "grid size must be even");
        let mut planner = FftPlanner::new();
        Self {
            len,
            half_period,
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn half_period(&self) -> f64 {
        self.half_period
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_period / self.len as f64
    }

    /// Signed mode number of FFT slot `index`.
    pub fn mode(&self, index: usize) -> i64 {
        if index < self.len / 2 {
            index as i64
        } else {
            index as i64 - self.len as i64
        }
    }

    pub fn wavenumber(&self, index: usize) -> f64 {
        std::f64::consts::PI * self.mode(index) as f64 / self.half_period
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.wavenumber(i)).collect()
    }

    pub fn grid(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.len)
            .map(|j| -self.half_period + j as f64 * h)
            .collect()
    }

    pub fn forward(&self, values: &[f64]) -> Vec<Complex64> {
        assert_eq!(values.len(), self.len);
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward_in_place(&mut buf);
        buf
    }

    /// Forward transform of complex samples, in place.
    pub fn forward_in_place(&self, buf: &mut [Complex64]) {
        self.forward.process(buf);
        let scale = 1.0 / self.len as f64;
        for (i, c) in buf.iter_mut().enumerate() {
            // grid starts at -L: shift phase by exp(i kappa L) = (-1)^k
            *c *= if i % 2 == 0 { scale } else { -scale };
        }
    }

    pub fn inverse(&self, coeffs: &[Complex64]) -> Vec<f64> {
        let mut buf = coeffs.to_vec();
        self.inverse_in_place(&mut buf);
        buf.iter().map(|c| c.re).collect()
    }

    /// Inverse transform in place; the result keeps its (roundoff) imaginary part.
    pub fn inverse_in_place(&self, buf: &mut [Complex64]) {
        assert_eq!(buf.len(), self.len);
        for (i, c) in buf.iter_mut().enumerate() {
            if i % 2 == 1 {
                *c = -*c;
            }
        }
        self.inverse.process(buf);
    }

    /// Spectral derivative of the given order; the Nyquist mode is dropped.
    pub fn derivative(&self, values: &[f64], order: u32) -> Vec<f64> {
        let mut c = self.forward(values);
        let nyquist = self.len / 2;
        for (i, ci) in c.iter_mut().enumerate() {
            if i == nyquist {
                *ci = Complex64::new(0.0, 0.0);
                continue;
            }
            let k = self.wavenumber(i);
            *ci *= Complex64::new(0.0, k).powu(order);
        }
        self.inverse(&c)
    }
}
