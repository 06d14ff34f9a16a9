use serde::{Deserialize, Serialize};

use super::piecewise::{build_piecewise, PiecewiseParams, StepPotential};
use super::CompactShape;
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

/// Below this `|y|`, `q~(y) = Q~(y)/y²` is set to zero; `Q~` is flat to all orders at 0.
const ORIGIN_GUARD: f64 = 1e-8;

/// Smallest admissible `delta / a` during automatic shrinking.
const DELTA_FLOOR_RATIO: f64 = 1e-6;

fn flat_exp(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// Smooth non-decreasing step: 0 for `y <= 0`, 1 for `y >= 1`, flat to all orders at both ends.
pub fn mollifier(y: f64) -> f64 {
    if y <= 0.0 {
        0.0
    } else if y >= 1.0 {
        1.0
    } else {
        let l = flat_exp(y);
        let r = flat_exp(1.0 - y);
        l / (l + r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothingParams {
    /// Mollification width.
    pub delta: f64,
    /// Required magnitude of the negative integral of `q~`.
    pub mu: f64,
}

impl SmoothingParams {
    /// `delta = a/64`, `mu = 3/4`.
    pub fn default_for(params: &PiecewiseParams) -> Self {
        Self { delta: params.a / 64.0, mu: 0.75 }
    }

    pub fn validate(&self, params: &PiecewiseParams) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < params.a / 4.0) {
            return Err(Error::Parameter(format!(
                "delta must lie in (0, a/4) = (0, {}), got {}",
                params.a / 4.0,
                self.delta
            )));
        }
        if !(self.mu > 0.0) {
            return Err(Error::Parameter(format!("mu must be positive, got {}", self.mu)));
        }
        Ok(())
    }
}

/// Smoothed step potential `Q~` and the scaled-down well `q~ = Q~ / y²`.
#[derive(Debug, Clone, Serialize)]
pub struct SmoothedPotential {
    pub params: PiecewiseParams,
    /// Smoothing actually used (delta may have been shrunk).
    pub smoothing: SmoothingParams,
    /// `∫ q~ dy` over the whole line.
    pub integral_qtilde: f64,
}

impl SmoothedPotential {
    fn with_delta(params: PiecewiseParams, smoothing: SmoothingParams) -> Self {
        let mut sp = Self { params, smoothing, integral_qtilde: f64::NAN };
        sp.integral_qtilde = sp.integrate_qtilde();
        sp
    }

    pub fn delta(&self) -> f64 {
        self.smoothing.delta
    }

    /// `Q~(y)`.
    pub fn big_q(&self, y: f64) -> f64 {
        let PiecewiseParams { a, q0, q1 } = self.params;
        let d = self.smoothing.delta;
        let y = y.abs();
        let half = 0.5 * a;
        if y < d {
            -q0 * mollifier(y / d)
        } else if y <= half - d {
            -q0
        } else if y < half {
            -q0 + (q0 + q1) * mollifier((y - half + d) / d)
        } else if y <= a {
            q1
        } else if y < a + d {
            q1 * mollifier(1.0 + (a - y) / d)
        } else {
            0.0
        }
    }

    /// `q~(y) = Q~(y) / y²`, with `q~(0) = 0`.
    pub fn q(&self, y: f64) -> f64 {
        if y.abs() < ORIGIN_GUARD {
            0.0
        } else {
            self.big_q(y) / (y * y)
        }
    }

    /// Uniform samples `(y, Q~, q~)` on `[-(a+delta), a+delta]`.
    pub fn sample(&self, points: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let w = self.half_width();
        let h = 2.0 * w / (points - 1) as f64;
        let y: Vec<f64> = (0..points).map(|i| -w + i as f64 * h).collect();
        let big: Vec<f64> = y.iter().map(|&v| self.big_q(v)).collect();
        let small: Vec<f64> = y.iter().map(|&v| self.q(v)).collect();
        (y, big, small)
    }

    fn positive_pieces(&self) -> [(f64, f64); 5] {
        let a = self.params.a;
        let d = self.smoothing.delta;
        [
            (0.0, d),
            (d, 0.5 * a - d),
            (0.5 * a - d, 0.5 * a),
            (0.5 * a, a),
            (a, a + d),
        ]
    }

    /// Integral of `g(y)` on `y > 0`, piece by piece. The flat well
    /// `(delta, a/2 - delta)` is split geometrically so that `1/y²` weights stay resolved.
    pub(crate) fn integrate_positive<F: Fn(f64) -> f64>(&self, g: F, panels: usize) -> f64 {
        let gl = GaussLegendre::new(16);
        let mut total = 0.0;
        for (idx, &(lo, hi)) in self.positive_pieces().iter().enumerate() {
            if idx == 1 {
                let mut a = lo;
                while a < hi {
                    let b = (2.0 * a).min(hi);
                    total += gl.integrate(&g, a, b, (panels / 4).max(2));
                    a = b;
                }
            } else {
                total += gl.integrate(&g, lo, hi, panels);
            }
        }
        total
    }

    fn integrate_qtilde(&self) -> f64 {
        2.0 * self.integrate_positive(|y| self.q(y), 64)
    }

    /// `∫ Q~ dy`, equal to `a (q1 - q0) + 2 delta (q0 + q1)` for this mollifier.
    pub fn integral_big_q(&self) -> f64 {
        2.0 * self.integrate_positive(|y| self.big_q(y), 32)
    }

    /// Smallest `Q~ - Q` over a uniform grid of `points` samples (non-negative by construction).
    pub fn min_excess_over_step(&self, step: &StepPotential, points: usize) -> f64 {
        let (y, big, _) = self.sample(points);
        y.iter()
            .zip(&big)
            .map(|(&yi, &bq)| bq - step.eval(yi))
            .fold(f64::INFINITY, f64::min)
    }
}

impl CompactShape for SmoothedPotential {
    fn value(&self, y: f64) -> f64 {
        self.q(y)
    }

    fn half_width(&self) -> f64 {
        self.params.a + self.smoothing.delta
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.positive_pieces().iter().map(|p| p.1).collect()
    }

    fn negative_region(&self) -> Option<(f64, f64)> {
        Some((0.0, 0.5 * self.params.a))
    }
}

/// Build `Q~` and `q~`, shrinking delta by halves until `∫ q~ <= -mu`.
pub fn smooth(params: PiecewiseParams, smoothing: SmoothingParams) -> Result<SmoothedPotential> {
    let step = build_piecewise(params)?;
    smoothing.validate(&params)?;
    let floor = DELTA_FLOOR_RATIO * params.a;
    let mut current = smoothing;
    loop {
        let sp = SmoothedPotential::with_delta(params, current);
        let excess = sp.min_excess_over_step(&step, 4097);
        if excess < -1e-12 {
            return Err(Error::Precondition(format!(
                "smoothed potential dips below the step potential by {excess:e}"
            )));
        }
        if sp.integral_qtilde <= -current.mu {
            return Ok(sp);
        }
        let next = 0.5 * current.delta;
        if next < floor {
            return Err(Error::InfeasibleSmoothing {
                integral: sp.integral_qtilde,
                mu: current.mu,
                delta: current.delta,
            });
        }
        current.delta = next;
    }
}
