use serde::Serialize;

use crate::error::{Error, Result};

/// Least-squares line through `(log x, log y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n_points: usize,
}

impl PowerLawFit {
    pub fn predict(&self, x: f64) -> f64 {
        (self.intercept + self.slope * x.ln()).exp()
    }
}

pub fn fit_power_law(pairs: &[(f64, f64)]) -> Result<PowerLawFit> {
    if pairs.len() < 3 {
        return Err(Error::Fit(format!("need at least 3 points, got {}", pairs.len())));
    }
    if let Some(&(x, y)) = pairs.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0)) {
        return Err(Error::Fit(format!("nonpositive pair ({x}, {y})")));
    }
    let n = pairs.len() as f64;
    let lx: Vec<f64> = pairs.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = pairs.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ly.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = lx.iter().zip(&ly).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let r_squared = if syy == 0.0 { 1.0 } else { (1.0 - sse / syy).clamp(0.0, 1.0) };
    Ok(PowerLawFit { slope, intercept, r_squared, n_points: pairs.len() })
}

/// Thin-domain exponent: `L_y <= C L_x^{-13/7}`.
pub const MOLINET_EXPONENT: f64 = -13.0 / 7.0;

/// Exponent of the older thin-domain condition, `-67/35`.
pub const MOLINET_PREVIOUS_EXPONENT: f64 = -67.0 / 35.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MolinetBound {
    pub lx: f64,
    pub c: f64,
    pub ly_max: f64,
    /// `C L_x^{3/2} L_y^{1/2}` when `L_y` was given.
    pub ly: Option<f64>,
    pub norm_bound: Option<f64>,
}

/// Largest admissible `L_y` and, for a given `L_y`, the bound on `limsup |u|`.
pub fn molinet(lx: f64, c: f64, ly: Option<f64>) -> Result<MolinetBound> {
    if !(lx > 1.0 && c > 0.0) {
        return Err(Error::Parameter(format!("need Lx > 1 and C > 0 (got {lx}, {c})")));
    }
    let ly_max = c * lx.powf(MOLINET_EXPONENT);
    let norm_bound = match ly {
        None => None,
        Some(ly) if !(ly > 0.0) => return Err(Error::Parameter(format!("Ly must be positive, got {ly}"))),
        Some(ly) if ly > ly_max => return Err(Error::AspectRatio { ly, ly_max }),
        Some(ly) => Some(c * lx.powf(1.5) * ly.sqrt()),
    };
    Ok(MolinetBound { lx, c, ly_max, ly, norm_bound })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_laws() {
        let pts: Vec<(f64, f64)> = [32.0, 64.0, 128.0, 256.0].iter().map(|&l: &f64| (l, l.powf(1.5))).collect();
        let f = fit_power_law(&pts).unwrap();
        assert!((f.slope - 1.5).abs() < 1e-12);
        assert!(f.intercept.abs() < 1e-11);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
        let pts: Vec<(f64, f64)> = [2.0, 3.0, 5.0].iter().map(|&l: &f64| (l, 7.0 * l.powf(7.0 / 6.0))).collect();
        let f = fit_power_law(&pts).unwrap();
        assert!((f.slope - 7.0 / 6.0).abs() < 1e-12);
        assert!((f.intercept - 7f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn fit_errors() {
        assert!(fit_power_law(&[(1.0, 1.0), (2.0, 2.0)]).is_err());
        assert!(fit_power_law(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0)]).is_err());
    }

    #[test]
    fn molinet_examples() {
        let m = molinet(100.0, 1.0, None).unwrap();
        assert!((m.ly_max - 1.9306977288832496e-4).abs() < 1e-6 * m.ly_max);
        let m = molinet(100.0, 1.0, Some(1e-4)).unwrap();
        assert!((m.norm_bound.unwrap() - 10.0).abs() < 1e-12);
        assert!(matches!(molinet(100.0, 1.0, Some(1e-3)), Err(Error::AspectRatio { .. })));
        assert!(MOLINET_EXPONENT > MOLINET_PREVIOUS_EXPONENT);
        assert!(molinet(1.0, 1.0, None).is_err());
    }
}
