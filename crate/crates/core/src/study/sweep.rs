use std::collections::BTreeMap;
use std::fs::File;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;

use serde::{Deserialize, Serialize};

use crate::attractor::{headline_bound_gamma, LyapunovConstants, LyapunovMonitor};
use crate::coercivity::{certify_with, CertifyOptions};
use crate::error::{Error, Result};
use crate::exponents::OperatorOrder;
use crate::potential::{PotentialProfile, ProfileConfig};
use crate::solver::{default_grid, random_initial, simulate_with, SolveConfig};

/// Smallest half-period accepted by the sweep.
pub const MIN_SWEEP_L: f64 = 8.0;

/// One row of an L-sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    #[serde(rename = "L")]
    pub half_period: f64,
    pub lambda_min: Option<f64>,
    pub delta_margin: Option<f64>,
    pub converged: bool,
    pub certified: bool,
    pub mean_q: Option<f64>,
    pub phi_norm: Option<f64>,
    pub phi_x_norm: Option<f64>,
    pub phi_xx_norm: Option<f64>,
    pub h2_norm: Option<f64>,
    #[serde(rename = "M2")]
    pub m2: Option<f64>,
    pub r_star: Option<f64>,
    pub r_star_star: Option<f64>,
    pub sim_sup_norm: Option<f64>,
    pub violations: Option<usize>,
    pub error: Option<String>,
}

impl SweepRecord {
    fn empty(l: f64) -> Self {
        Self {
            half_period: l,
            lambda_min: None,
            delta_margin: None,
            converged: false,
            certified: false,
            mean_q: None,
            phi_norm: None,
            phi_x_norm: None,
            phi_xx_norm: None,
            h2_norm: None,
            m2: None,
            r_star: None,
            r_star_star: None,
            sim_sup_norm: None,
            violations: None,
            error: None,
        }
    }
}

/// Optional simulation attached to each sweep entry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSimulation {
    pub solve: SolveConfig,
    /// `|u(0)|`.
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub profile: ProfileConfig,
    pub certify: CertifyOptions,
    pub simulation: Option<SweepSimulation>,
    pub workers: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            profile: ProfileConfig::default(),
            certify: CertifyOptions::default(),
            simulation: None,
            workers: 1,
        }
    }
}

/// The default sweep: powers of two from 32 to 512.
pub fn default_l_list() -> Vec<f64> {
    (5..=9).map(|p| f64::from(1u32 << p)).collect()
}

/// Build, certify and bound at one half-period; failures land in `error`.
pub fn sweep_entry(l: f64, options: &SweepOptions) -> SweepRecord {
    let mut rec = SweepRecord::empty(l);
    if let Err(e) = fill_entry(&mut rec, options) {
        rec.error = Some(e.to_string());
    }
    rec
}

fn fill_entry(rec: &mut SweepRecord, options: &SweepOptions) -> Result<()> {
    let l = rec.half_period;
    if !(l >= MIN_SWEEP_L) {
        return Err(Error::Parameter(format!("sweep needs L >= {MIN_SWEEP_L}, got {l}")));
    }
    let profile = options.profile.build(l)?;
    let norms = profile.norms();
    rec.mean_q = Some(profile.mean_q());
    rec.phi_norm = Some(norms.phi);
    rec.phi_x_norm = Some(norms.phi_x);
    rec.phi_xx_norm = Some(norms.phi_xx);
    rec.h2_norm = Some(norms.h2);

    let report = certify_with(&profile, OperatorOrder::Fourth, &options.certify)?;
    rec.lambda_min = Some(report.lambda_min);
    rec.delta_margin = Some(report.delta_margin);
    rec.converged = report.converged;
    rec.certified = report.certified;
    if !report.certified {
        return Ok(());
    }
    let gamma = options.simulation.map_or(0.0, |s| s.solve.gamma);
    let bound = headline_bound_gamma(&profile, report.delta_margin, gamma)?;
    rec.m2 = Some(bound.m2);
    rec.r_star = Some(bound.r_star);
    rec.r_star_star = Some(bound.r_star_star);

    if let Some(sim) = options.simulation {
        let constants = LyapunovConstants::from_margin(report.delta_margin, gamma, &norms)?;
        let (sup, violations) = simulate_checked(&profile, constants, &sim)?;
        rec.sim_sup_norm = Some(sup);
        rec.violations = Some(violations);
    }
    Ok(())
}

/// Run one simulation on the profile's domain and monitor the Lyapunov inequality.
/// Returns the post-transient supremum of `|u|` and the violation count.
pub fn simulate_checked(
    profile: &PotentialProfile,
    constants: LyapunovConstants,
    sim: &SweepSimulation,
) -> Result<(f64, usize)> {
    let l = profile.half_period();
    let n = default_grid(l);
    let initial = random_initial(l, n, sim.solve.seed, sim.amplitude, sim.solve.odd_only)?;
    let monitor = LyapunovMonitor::new(profile, constants, n)?;
    let mut samples = Vec::new();
    let traj = simulate_with(&initial, &sim.solve, |s| samples.push(monitor.sample(s)))?;
    let report = monitor.evaluate(&samples)?;
    Ok((traj.sup_l2, report.violations))
}

/// Appends records in list order as they complete.
struct OrderedSink {
    writer: Option<csv::Writer<File>>,
    next: usize,
    pending: BTreeMap<usize, SweepRecord>,
    done: Vec<SweepRecord>,
}

impl OrderedSink {
    fn push(&mut self, index: usize, rec: SweepRecord) -> Result<()> {
        self.pending.insert(index, rec);
        while let Some(rec) = self.pending.remove(&self.next) {
            if let Some(w) = self.writer.as_mut() {
                w.serialize(&rec)?;
                w.flush()?;
            }
            self.done.push(rec);
            self.next += 1;
        }
        Ok(())
    }
}

/// Run the sweep on up to `options.workers` threads, appending each row to `csv_path`
/// as soon as all earlier rows are written.
pub fn sweep(l_list: &[f64], options: &SweepOptions, csv_path: Option<&Path>) -> Result<Vec<SweepRecord>> {
    let writer = match csv_path {
        Some(p) => Some(csv::WriterBuilder::new().has_headers(true).from_path(p)?),
        None => None,
    };
    let mut sink = OrderedSink { writer, next: 0, pending: BTreeMap::new(), done: Vec::new() };
    if l_list.is_empty() {
        if let Some(w) = sink.writer.as_mut() {
            w.flush()?;
        }
        return Ok(Vec::new());
    }
    let workers = options.workers.clamp(1, l_list.len());
    let cursor = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel::<(usize, SweepRecord)>();
    std::thread::scope(|scope| -> Result<()> {
        for _ in 0..workers {
            let tx = tx.clone();
            let cursor = &cursor;
            scope.spawn(move || loop {
                let i = cursor.fetch_add(1, Ordering::SeqCst);
                if i >= l_list.len() {
                    break;
                }
                if tx.send((i, sweep_entry(l_list[i], options))).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        for (i, rec) in rx {
            sink.push(i, rec)?;
        }
        Ok(())
    })?;
    Ok(sink.done)
}

pub fn write_records(path: &Path, records: &[SweepRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records(path: &Path) -> Result<Vec<SweepRecord>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|rec| rec.map_err(Error::from)).collect()
}

/// `(L, value)` pairs of a column over certified rows.
pub fn column(records: &[SweepRecord], pick: impl Fn(&SweepRecord) -> Option<f64>) -> Vec<(f64, f64)> {
    records
        .iter()
        .filter(|r| r.error.is_none())
        .filter_map(|r| pick(r).map(|v| (r.half_period, v)))
        .collect()
}
