use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::piecewise::PiecewiseParams;
use super::smoothing::{smooth, SmoothedPotential, SmoothingParams};
use super::CompactShape;
use crate::error::{Error, Result};
use crate::exponents::ExponentPair;
use crate::quadrature::periodic_trapezoid;
use crate::spectral::PeriodicFourier;

/// Largest admissible `<q>`.
pub const MEAN_CEILING: f64 = -0.75;

/// Everything needed to build a profile at a given `L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileConfig {
    pub params: PiecewiseParams,
    pub smoothing: SmoothingParams,
    pub exponents: ExponentPair,
    /// Grid points across one scaled smoothing width `delta L^{-c1}`.
    pub points_per_width: usize,
    /// Lower bound on the grid size.
    pub min_points: usize,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        let params = PiecewiseParams::default();
        Self {
            params,
            smoothing: SmoothingParams::default_for(&params),
            exponents: ExponentPair::critical(),
            points_per_width: 32,
            min_points: 1 << 15,
        }
    }
}

impl ProfileConfig {
    pub fn build(&self, l: f64) -> Result<PotentialProfile> {
        self.build_with_points(l, None)
    }

    /// Build on a grid of exactly `points` samples, or the automatic size if `None`.
    pub fn build_with_points(&self, l: f64, points: Option<usize>) -> Result<PotentialProfile> {
        let sp = smooth(self.params, self.smoothing)?;
        let m = match points {
            Some(m) => m,
            None => grid_size(&sp, l, &self.exponents, self.points_per_width, self.min_points),
        };
        let well = scale_to_domain_on(&sp, l, &self.exponents, m)?;
        assemble_profile(well)
    }
}

/// Power-of-two grid size resolving `delta L^{-c1}` with `points_per_width` samples.
pub fn grid_size(
    sp: &SmoothedPotential,
    l: f64,
    pair: &ExponentPair,
    points_per_width: usize,
    min_points: usize,
) -> usize {
    let width = sp.delta() * l.powf(-pair.c1_f64());
    let needed = (2.0 * l / width * points_per_width as f64).ceil() as usize;
    needed.max(min_points).max(2).next_power_of_two()
}

/// `q(x) = L^{c2} q~(x L^{c1})` sampled at `x_j = -L + j h`.
#[derive(Debug, Clone)]
pub struct ScaledWell {
    pub half_period: f64,
    pub exponents: ExponentPair,
    pub q: Vec<f64>,
    pub smoothed: Option<SmoothedPotential>,
}

impl ScaledWell {
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_period / self.q.len() as f64
    }

    pub fn grid(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.q.len()).map(|j| -self.half_period + j as f64 * h).collect()
    }

    /// `<q> = (1/2L) ∫ q`.
    pub fn mean(&self) -> f64 {
        self.q.iter().sum::<f64>() / self.q.len() as f64
    }
}

/// Sample the scaled well on the automatically sized grid.
pub fn scale_to_domain(sp: &SmoothedPotential, l: f64, pair: &ExponentPair) -> Result<ScaledWell> {
    let m = grid_size(sp, l, pair, 32, 1 << 15);
    scale_to_domain_on(sp, l, pair, m)
}

/// Sample the scaled well on a grid of `points` samples.
pub fn scale_to_domain_on(
    sp: &SmoothedPotential,
    l: f64,
    pair: &ExponentPair,
    points: usize,
) -> Result<ScaledWell> {
    if !(l >= 1.0) {
        return Err(Error::Parameter(format!("L must be at least 1, got {l}")));
    }
    if points < 2 || points % 2 != 0 {
        return Err(Error::Parameter(format!("grid size must be even and >= 2, got {points}")));
    }
    let (c1, c2) = (pair.c1_f64(), pair.c2_f64());
    let support = sp.half_width() * l.powf(-c1);
    if support > l {
        return Err(Error::DomainTooSmall { support, l });
    }
    let stretch = l.powf(c1);
    let amp = l.powf(c2);
    let h = 2.0 * l / points as f64;
    let q = (0..points)
        .map(|j| {
            let x = -l + j as f64 * h;
            let y = x * stretch;
            if y.abs() >= sp.half_width() {
                0.0
            } else {
                amp * sp.q(y)
            }
        })
        .collect();
    Ok(ScaledWell {
        half_period: l,
        exponents: *pair,
        q,
        smoothed: Some(sp.clone()),
    })
}

/// How a profile was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Construction {
    pub params: PiecewiseParams,
    pub smoothing: SmoothingParams,
    pub exponents: ExponentPair,
    pub integral_qtilde: f64,
}

/// Sampled `phi`, `phi_x`, `phi_xx` on `x_j = -L + j h`, `j = 0..M`.
#[derive(Debug, Clone)]
pub struct PotentialProfile {
    half_period: f64,
    phi: Vec<f64>,
    phi_x: Vec<f64>,
    phi_xx: Vec<f64>,
    mean_q: f64,
    construction: Option<Construction>,
}

/// Turn `q` into `phi_x = q - <q>` and integrate.
pub fn assemble_profile(well: ScaledWell) -> Result<PotentialProfile> {
    let mean_q = well.mean();
    if mean_q > MEAN_CEILING {
        return Err(Error::MeanCondition { mean_q });
    }
    let construction = well.smoothed.as_ref().map(|sp| Construction {
        params: sp.params,
        smoothing: sp.smoothing,
        exponents: well.exponents,
        integral_qtilde: sp.integral_qtilde,
    });
    let l = well.half_period;
    let mut phi_x = well.q;
    for v in phi_x.iter_mut() {
        *v -= mean_q;
    }
    let mut profile = PotentialProfile::from_phi_x(l, phi_x)?;
    profile.mean_q = mean_q;
    profile.construction = construction;
    Ok(profile)
}

/// Default pipeline at half-period `l`.
pub fn build_default_profile(l: f64) -> Result<PotentialProfile> {
    ProfileConfig::default().build(l)
}

fn antiderivative_from_origin(values: &[f64], h: f64) -> Vec<f64> {
    let m = values.len();
    let mid = m / 2;
    let mut out = vec![0.0; m];
    for j in (mid + 1)..m {
        out[j] = out[j - 1] + 0.5 * h * (values[j - 1] + values[j]);
    }
    for j in (0..mid).rev() {
        out[j] = out[j + 1] - 0.5 * h * (values[j] + values[j + 1]);
    }
    out
}

impl PotentialProfile {
    /// Profile from explicit `phi_x` samples; `phi` is integrated from `x = 0`.
    pub fn from_phi_x(half_period: f64, phi_x: Vec<f64>) -> Result<Self> {
        let m = phi_x.len();
        if m < 4 || m % 2 != 0 {
            return Err(Error::Parameter(format!("profile grid must be even and >= 4, got {m}")));
        }
        if !(half_period > 0.0) {
            return Err(Error::Parameter(format!("L must be positive, got {half_period}")));
        }
        let fourier = PeriodicFourier::new(m, half_period);
        let phi = antiderivative_from_origin(&phi_x, fourier.spacing());
        let phi_xx = fourier.derivative(&phi_x, 1);
        Ok(Self {
            half_period,
            phi,
            phi_x,
            phi_xx,
            mean_q: 0.0,
            construction: None,
        })
    }

    /// `phi ≡ 0`.
    pub fn zero(half_period: f64, points: usize) -> Result<Self> {
        Self::from_phi_x(half_period, vec![0.0; points])
    }

    pub fn half_period(&self) -> f64 {
        self.half_period
    }

    pub fn len(&self) -> usize {
        self.phi_x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi_x.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_period / self.len() as f64
    }

    pub fn grid(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.len()).map(|j| -self.half_period + j as f64 * h).collect()
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn phi_x(&self) -> &[f64] {
        &self.phi_x
    }

    pub fn phi_xx(&self) -> &[f64] {
        &self.phi_xx
    }

    pub fn mean_q(&self) -> f64 {
        self.mean_q
    }

    pub fn construction(&self) -> Option<&Construction> {
        self.construction.as_ref()
    }

    pub fn exponents(&self) -> Option<ExponentPair> {
        self.construction.map(|c| c.exponents)
    }

    pub fn norms(&self) -> ProfileNorms {
        norms(self)
    }

    pub fn metadata(&self) -> ProfileMetadata {
        ProfileMetadata {
            half_period: self.half_period,
            points: self.len(),
            mean_q: self.mean_q,
            construction: self.construction,
            norms: self.norms(),
        }
    }

    /// Sidecar path used by [`Self::write_csv`]: same stem, `.json` extension.
    pub fn sidecar_path(csv: &Path) -> PathBuf {
        csv.with_extension("json")
    }

    /// Write `x,phi,phi_x,phi_xx` rows and a JSON metadata sidecar.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "x,phi,phi_x,phi_xx")?;
        let h = self.spacing();
        for j in 0..self.len() {
            let x = -self.half_period + j as f64 * h;
            writeln!(w, "{:e},{:e},{:e},{:e}", x, self.phi[j], self.phi_x[j], self.phi_xx[j])?;
        }
        w.flush()?;
        let meta = serde_json::to_string_pretty(&self.metadata())?;
        std::fs::write(Self::sidecar_path(path), meta)?;
        Ok(())
    }

    /// Read a profile written by [`Self::write_csv`]; the sidecar is required.
    pub fn read_csv(path: &Path) -> Result<Self> {
        let meta: ProfileMetadata = serde_json::from_str(&std::fs::read_to_string(Self::sidecar_path(path))?)?;
        let mut reader = csv::Reader::from_path(path)?;
        let headers = reader.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["x", "phi", "phi_x", "phi_xx"] {
            return Err(Error::Config(format!("unexpected profile columns {headers:?}")));
        }
        let mut phi = Vec::with_capacity(meta.points);
        let mut phi_x = Vec::with_capacity(meta.points);
        let mut phi_xx = Vec::with_capacity(meta.points);
        let parse = |s: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::Config(format!("bad number '{s}': {e}")))
        };
        for rec in reader.records() {
            let rec = rec?;
            phi.push(parse(&rec[1])?);
            phi_x.push(parse(&rec[2])?);
            phi_xx.push(parse(&rec[3])?);
        }
        if phi.len() != meta.points {
            return Err(Error::Config(format!(
                "sidecar declares {} points, csv has {}",
                meta.points,
                phi.len()
            )));
        }
        Ok(Self {
            half_period: meta.half_period,
            phi,
            phi_x,
            phi_xx,
            mean_q: meta.mean_q,
            construction: meta.construction,
        })
    }
}

/// L² norms (not squared) of the profile and its derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileNorms {
    pub phi: f64,
    pub phi_x: f64,
    pub phi_xx: f64,
    /// `sqrt(|phi|² + |phi_x|² + |phi_xx|²)`.
    pub h2: f64,
}

pub fn norms(profile: &PotentialProfile) -> ProfileNorms {
    let h = profile.spacing();
    let sq = |v: &[f64]| periodic_trapezoid(&v.iter().map(|x| x * x).collect::<Vec<_>>(), h);
    let (a, b, c) = (sq(&profile.phi), sq(&profile.phi_x), sq(&profile.phi_xx));
    ProfileNorms {
        phi: a.sqrt(),
        phi_x: b.sqrt(),
        phi_xx: c.sqrt(),
        h2: (a + b + c).sqrt(),
    }
}

/// JSON sidecar of a written profile.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProfileMetadata {
    #[serde(rename = "L")]
    pub half_period: f64,
    pub points: usize,
    pub mean_q: f64,
    pub construction: Option<Construction>,
    pub norms: ProfileNorms,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> ProfileConfig {
        ProfileConfig { min_points: 1 << 12, points_per_width: 16, ..ProfileConfig::default() }
    }

    #[test]
    fn invariants_at_l32() {
        let p = small_config().build(32.0).unwrap();
        let m = p.len();
        assert!(m.is_power_of_two());
        let mean = p.phi_x().iter().sum::<f64>() / m as f64;
        assert!(mean.abs() < 1e-10 * (1.0 + p.mean_q().abs()));
        assert!(p.mean_q() <= MEAN_CEILING);
        assert_eq!(p.phi()[m / 2], 0.0);
        // periodic wrap: phi_x vanishes near both ends up to the constant shift
        assert!((p.phi_x()[0] - p.phi_x()[m - 1]).abs() < 1e-12);
        // phi(L) - phi(-L) = ∫ phi_x = 0
        let drift = p.phi()[m - 1] + 0.5 * p.spacing() * (p.phi_x()[m - 1] + p.phi_x()[0]) - p.phi()[0];
        assert!(drift.abs() < 1e-6 * p.norms().phi);
    }

    #[test]
    fn support_and_peak_scale() {
        let cfg = small_config();
        let sp = smooth(cfg.params, cfg.smoothing).unwrap();
        let l = 64.0;
        let pair = ExponentPair::critical();
        let well = scale_to_domain_on(&sp, l, &pair, 1 << 16).unwrap();
        let x = well.grid();
        let expected = sp.half_width() * l.powf(-1.0 / 3.0);
        let outer = x
            .iter()
            .zip(&well.q)
            .filter(|(_, q)| **q != 0.0)
            .map(|(x, _)| x.abs())
            .fold(0.0, f64::max);
        assert!(outer <= expected && outer > expected - 2.0 * well.spacing());
        assert_eq!(well.q[well.q.len() / 2], 0.0);
    }

    #[test]
    fn domain_too_small() {
        let cfg = ProfileConfig::default();
        let sp = smooth(cfg.params, cfg.smoothing).unwrap();
        let err = scale_to_domain_on(&sp, 1.0, &ExponentPair::critical(), 1024).unwrap_err();
        assert!(matches!(err, Error::DomainTooSmall { .. }));
        assert!(matches!(
            scale_to_domain_on(&sp, 0.5, &ExponentPair::critical(), 1024),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn weak_mean_rejected() {
        let well = ScaledWell {
            half_period: 10.0,
            exponents: ExponentPair::critical(),
            q: vec![-0.5; 64],
            smoothed: None,
        };
        assert!(matches!(assemble_profile(well), Err(Error::MeanCondition { .. })));
    }

    #[test]
    fn sine_profile_norms() {
        let l = std::f64::consts::PI;
        let m = 256;
        let h = 2.0 * l / m as f64;
        let phi_x: Vec<f64> = (0..m).map(|j| (-l + j as f64 * h).sin()).collect();
        let p = PotentialProfile::from_phi_x(l, phi_x).unwrap();
        let n = p.norms();
        // phi = 1 - cos x, phi_xx = cos x
        assert!((n.phi_x.powi(2) - l).abs() < 1e-12);
        assert!((n.phi_xx.powi(2) - l).abs() < 1e-10);
        assert!((n.phi.powi(2) - 3.0 * l).abs() < 1e-3);
    }

    #[test]
    fn csv_round_trip() {
        let p = small_config().build(32.0).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("profile.csv");
        p.write_csv(&path).unwrap();
        let back = PotentialProfile::read_csv(&path).unwrap();
        assert_eq!(back.phi_x(), p.phi_x());
        assert_eq!(back.phi(), p.phi());
        assert_eq!(back.phi_xx(), p.phi_xx());
        assert_eq!(back.mean_q(), p.mean_q());
        assert_eq!(back.half_period(), 32.0);
        std::fs::remove_file(PotentialProfile::sidecar_path(&path)).unwrap();
        assert!(PotentialProfile::read_csv(&path).is_err());
    }
}
