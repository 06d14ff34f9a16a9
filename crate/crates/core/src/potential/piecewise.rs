use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// Step potential parameters: support half-width `a`, inner well depth `q0`,
/// outer barrier height `q1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseParams {
    pub a: f64,
    pub q0: f64,
    pub q1: f64,
}

impl Default for PiecewiseParams {
    fn default() -> Self {
        Self { a: 1.0, q0: 0.5, q1: 2.0 }
    }
}

impl PiecewiseParams {
    /// Validated constructor.
    pub fn new(a: f64, q0: f64, q1: f64) -> Result<Self> {
        let p = Self { a, q0, q1 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.q0 > 0.0 && self.q1 > 0.0) {
            return Err(Error::Admissibility(format!(
                "a, q0, q1 must be positive (got {}, {}, {})",
                self.a, self.q0, self.q1
            )));
        }
        let report = check_admissible(self);
        if let Some(first) = report.failed.first() {
            return Err(Error::Admissibility(first.clone()));
        }
        Ok(())
    }

    /// `q1 - q0 - a² q0 q1`, positive for admissible parameters.
    pub fn hyperbola_margin(&self) -> f64 {
        self.q1 - self.q0 - self.a * self.a * self.q0 * self.q1
    }
}

/// The step function `Q(y)`: `-q0` on `|y| <= a/2`, `q1` on `a/2 < |y| <= a`, zero beyond.
#[derive(Debug, Clone, Copy)]
pub struct StepPotential {
    params: PiecewiseParams,
}

impl StepPotential {
    pub fn params(&self) -> &PiecewiseParams {
        &self.params
    }

    pub fn eval(&self, y: f64) -> f64 {
        let PiecewiseParams { a, q0, q1 } = self.params;
        let y = y.abs();
        if y <= 0.5 * a {
            -q0
        } else if y <= a {
            q1
        } else {
            0.0
        }
    }

    /// `∫ Q`, equal to `a (q1 - q0)`.
    pub fn integral(&self) -> f64 {
        self.params.a * (self.params.q1 - self.params.q0)
    }
}

pub fn build_piecewise(params: PiecewiseParams) -> Result<StepPotential> {
    params.validate()?;
    Ok(StepPotential { params })
}

/// Three-sample lower bound for `∫ ½ v_y² + Q v²` and its leading minors.
#[derive(Debug, Clone, Serialize)]
pub struct MinorsReport {
    /// Row-major 3×3 matrix acting on `(v(0), max|v| on (0,a/2), min|v| on (a/2,a))`.
    pub matrix: [[f64; 3]; 3],
    pub minors: [f64; 3],
    pub pass: bool,
    /// Human-readable list of violated inequalities.
    pub failed: Vec<String>,
}

impl MinorsReport {
    pub fn as_dense(&self) -> DenseMatrix {
        DenseMatrix::from_fn(3, |i, j| self.matrix[i][j])
    }
}

pub fn check_admissible(params: &PiecewiseParams) -> MinorsReport {
    let PiecewiseParams { a, q0, q1 } = *params;
    let matrix = [
        [1.0 / a, -1.0 / a, 0.0],
        [-1.0 / a, 1.5 / a - 0.5 * a * q0, -0.5 / a],
        [0.0, -0.5 / a, 0.5 / a + 0.5 * a * q1],
    ];
    let m = &matrix;
    let m1 = m[0][0];
    let m2 = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let m3 = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);

    let mut failed = Vec::new();
    if q0 * a * a >= 1.0 {
        failed.push(format!("q0 a^2 < 1 fails: q0 a^2 = {}", q0 * a * a));
    }
    let margin = params.hyperbola_margin();
    if margin <= 0.0 {
        failed.push(format!("q1 - q0 - a^2 q0 q1 > 0 fails: value = {margin}"));
    }
    MinorsReport {
        matrix,
        minors: [m1, m2, m3],
        pass: failed.is_empty(),
        failed,
    }
}
