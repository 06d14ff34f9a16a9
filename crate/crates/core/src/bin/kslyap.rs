use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use kslyap::attractor::{headline_bound_gamma, LyapunovConstants, LyapunovMonitor, MonitorSample};
use kslyap::coercivity::{certify_with, CertifyOptions};
use kslyap::exponents::{solve_critical_exponents, OperatorOrder};
use kslyap::potential::{PiecewiseParams, PotentialProfile, ProfileConfig, SmoothingParams};
use kslyap::solver::{default_grid, random_initial, simulate_with, SolveConfig};
use kslyap::study::{
    column, default_l_list, fit_power_law, molinet, parse_list, read_records, sweep, KeyValueConfig, SweepOptions,
    SweepRecord, SweepSimulation,
};
use kslyap::{Error, Result};

#[derive(Parser)]
#[command(name = "kslyap", version, about = "Critical Lyapunov potentials for the Kuramoto-Sivashinsky equation")]
struct Cli {
    /// Flat key = value file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for CSV/JSON artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Machine-readable output on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct PotentialArgs {
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    q0: Option<f64>,
    #[arg(long)]
    q1: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Critical scaling exponents.
    Exponents {
        #[arg(long)]
        order: Option<OperatorOrder>,
    },
    /// Build the profile at half-period L and write it as CSV plus a JSON sidecar.
    BuildPotential {
        #[arg(long = "L")]
        l: Option<f64>,
        #[command(flatten)]
        potential: PotentialArgs,
    },
    /// Certify coercivity; exit code 0 iff certified.
    Verify {
        #[arg(long = "L")]
        l: Option<f64>,
        #[arg(long)]
        order: Option<OperatorOrder>,
        /// Profile CSV written by build-potential.
        #[arg(long)]
        profile: Option<PathBuf>,
        #[command(flatten)]
        potential: PotentialArgs,
    },
    /// Absorbing-ball radius.
    Bound {
        #[arg(long = "L")]
        l: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
        #[command(flatten)]
        potential: PotentialArgs,
    },
    /// Integrate KS and optionally monitor the Lyapunov inequality.
    Simulate {
        #[arg(long = "L")]
        l: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long = "t-end")]
        t_end: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        transient: Option<f64>,
        #[arg(long = "record-every")]
        record_every: Option<usize>,
        #[arg(long)]
        amplitude: Option<f64>,
        #[arg(long)]
        odd: bool,
        #[arg(long = "check-lyapunov")]
        check_lyapunov: bool,
        #[command(flatten)]
        potential: PotentialArgs,
    },
    /// Build, certify and bound over a list of half-periods.
    Sweep {
        /// Comma-separated half-periods (default 32,64,128,256,512).
        #[arg(long = "L")]
        l: Option<String>,
        /// Also simulate each entry.
        #[arg(long)]
        simulate: bool,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long = "t-end")]
        t_end: Option<f64>,
        #[arg(long)]
        odd: bool,
        #[command(flatten)]
        potential: PotentialArgs,
    },
    /// Power-law fit of a sweep column, or of explicit x:y pairs.
    Fit {
        #[arg(long)]
        input: Option<PathBuf>,
        /// One of phi_norm, phi_x_norm, phi_xx_norm, h2_norm, M2, r_star_star, sim_sup_norm.
        #[arg(long)]
        column: Option<String>,
        /// `x:y,x:y,...`
        #[arg(long)]
        pairs: Option<String>,
        /// Fit the squared column.
        #[arg(long)]
        squared: bool,
    },
    /// Thin-domain aspect-ratio calculator.
    Molinet {
        #[arg(long)]
        lx: Option<f64>,
        #[arg(long)]
        ly: Option<f64>,
        #[arg(long)]
        c: Option<f64>,
    },
}

struct Ctx {
    cfg: KeyValueConfig,
    out: PathBuf,
    json: bool,
    workers: usize,
    seed: u64,
}

impl Ctx {
    fn emit<T: Serialize>(&self, value: &T, human: impl FnOnce() -> String) -> Result<()> {
        if self.json {
            println!("{}", serde_json::to_string_pretty(value)?);
        } else {
            println!("{}", human());
        }
        Ok(())
    }

    fn half_period(&self, flag: Option<f64>) -> Result<f64> {
        flag.or(self.cfg.get("L")?)
            .ok_or_else(|| Error::Config("missing --L".into()))
    }

    fn profile_config(&self, p: &PotentialArgs) -> Result<ProfileConfig> {
        let base = ProfileConfig::default();
        let params = PiecewiseParams::new(
            self.cfg.resolve(p.a, "a", base.params.a)?,
            self.cfg.resolve(p.q0, "q0", base.params.q0)?,
            self.cfg.resolve(p.q1, "q1", base.params.q1)?,
        )?;
        let defaults = SmoothingParams::default_for(&params);
        let smoothing = SmoothingParams {
            delta: self.cfg.resolve(p.delta, "delta", defaults.delta)?,
            mu: self.cfg.resolve(p.mu, "mu", defaults.mu)?,
        };
        Ok(ProfileConfig { params, smoothing, ..base })
    }

    fn out_file(&self, name: &str) -> Result<PathBuf> {
        std::fs::create_dir_all(&self.out)?;
        Ok(self.out.join(name))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let cfg = match &cli.config {
        Some(p) => KeyValueConfig::load(p)?,
        None => KeyValueConfig::default(),
    };
    let ctx = Ctx {
        out: cli.out.clone().or(cfg.get::<PathBuf>("out")?).unwrap_or_else(|| PathBuf::from(".")),
        json: cli.json || cfg.get::<bool>("json")?.unwrap_or(false),
        workers: cfg.resolve(cli.workers, "workers", 1)?,
        seed: cfg.resolve(cli.seed, "seed", 0)?,
        cfg,
    };
    match cli.command {
        Command::Exponents { order } => {
            let order = ctx.cfg.resolve(order, "order", OperatorOrder::Fourth)?;
            let sol = solve_critical_exponents(order);
            let value = json!({
                "order": sol.order,
                "c1": sol.pair.c1().to_string(),
                "c2": sol.pair.c2().to_string(),
                "objective": sol.objective.to_string(),
                "c1_decimal": sol.pair.c1_f64(),
                "c2_decimal": sol.pair.c2_f64(),
                "objective_decimal": *sol.objective.numer() as f64 / *sol.objective.denom() as f64,
            });
            ctx.emit(&value, || {
                format!(
                    "c1 = {} ({:.6})\nc2 = {} ({:.6})\nobjective c2 + c1/2 = {} ({:.6})",
                    sol.pair.c1(),
                    sol.pair.c1_f64(),
                    sol.pair.c2(),
                    sol.pair.c2_f64(),
                    sol.objective,
                    value["objective_decimal"].as_f64().unwrap_or(f64::NAN)
                )
            })?;
        }
        Command::BuildPotential { l, potential } => {
            let l = ctx.half_period(l)?;
            let profile = ctx.profile_config(&potential)?.build(l)?;
            let path = ctx.out_file(&format!("profile_L{l}.csv"))?;
            profile.write_csv(&path)?;
            let meta = profile.metadata();
            ctx.emit(&meta, || {
                format!(
                    "wrote {} ({} points)\n<q> = {:.6}\n|phi| = {:.6e}  |phi_x| = {:.6e}  |phi_xx| = {:.6e}  |phi|_H2 = {:.6e}",
                    path.display(),
                    meta.points,
                    meta.mean_q,
                    meta.norms.phi,
                    meta.norms.phi_x,
                    meta.norms.phi_xx,
                    meta.norms.h2
                )
            })?;
        }
        Command::Verify { l, order, profile, potential } => {
            let order = ctx.cfg.resolve(order, "order", OperatorOrder::Fourth)?;
            let profile_path = profile.or(ctx.cfg.get("profile")?);
            let profile = match profile_path {
                Some(p) => PotentialProfile::read_csv(&p)?,
                None => ctx.profile_config(&potential)?.build(ctx.half_period(l)?)?,
            };
            let report = certify_with(&profile, order, &CertifyOptions::default())?;
            // the report is JSON either way
            println!("{}", serde_json::to_string_pretty(&report)?);
            return Ok(if report.certified { ExitCode::SUCCESS } else { ExitCode::FAILURE });
        }
        Command::Bound { l, gamma, potential } => {
            let l = ctx.half_period(l)?;
            let gamma = ctx.cfg.resolve(gamma, "gamma", 0.0)?;
            let profile = ctx.profile_config(&potential)?.build(l)?;
            let report = certify_with(&profile, OperatorOrder::Fourth, &CertifyOptions::default())?;
            let bound = headline_bound_gamma(&profile, report.delta_margin, gamma)?;
            println!("{}", serde_json::to_string_pretty(&bound)?);
        }
        Command::Simulate {
            l,
            gamma,
            t_end,
            dt,
            transient,
            record_every,
            amplitude,
            odd,
            check_lyapunov,
            potential,
        } => {
            let l = ctx.half_period(l)?;
            let base = SolveConfig::default();
            let solve = SolveConfig {
                gamma: ctx.cfg.resolve(gamma, "gamma", base.gamma)?,
                dt: ctx.cfg.resolve(dt, "dt", base.dt)?,
                t_end: ctx.cfg.resolve(t_end, "t-end", base.t_end)?,
                transient: transient.or(ctx.cfg.get("transient")?),
                record_every: ctx.cfg.resolve(record_every, "record-every", base.record_every)?,
                seed: ctx.seed,
                odd_only: odd || ctx.cfg.get::<bool>("odd")?.unwrap_or(false),
                keep_states: false,
            };
            let amplitude = ctx.cfg.resolve(amplitude, "amplitude", 1.0)?;
            let check = check_lyapunov || ctx.cfg.get::<bool>("check-lyapunov")?.unwrap_or(false);
            run_simulation(&ctx, l, &solve, amplitude, check.then_some(&potential))?;
        }
        Command::Sweep { l, simulate, gamma, t_end, odd, potential } => {
            let ls: Vec<f64> = match l.or(ctx.cfg.raw("L").map(str::to_string)) {
                Some(text) => parse_list(&text)?,
                None => default_l_list(),
            };
            let mut options = SweepOptions {
                profile: ctx.profile_config(&potential)?,
                workers: ctx.workers,
                ..SweepOptions::default()
            };
            if simulate || ctx.cfg.get::<bool>("simulate")?.unwrap_or(false) {
                let base = SolveConfig::default();
                options.simulation = Some(SweepSimulation {
                    solve: SolveConfig {
                        gamma: ctx.cfg.resolve(gamma, "gamma", 0.0)?,
                        t_end: ctx.cfg.resolve(t_end, "t-end", base.t_end)?,
                        seed: ctx.seed,
                        odd_only: odd || ctx.cfg.get::<bool>("odd")?.unwrap_or(false),
                        ..base
                    },
                    amplitude: 1.0,
                });
            }
            let path = ctx.out_file("sweep.csv")?;
            let records = sweep(&ls, &options, Some(&path))?;
            ctx.emit(&records, || sweep_table(&records, &path))?;
        }
        Command::Fit { input, column: col, pairs, squared } => {
            let pairs_text = pairs.or(ctx.cfg.raw("pairs").map(str::to_string));
            let mut data: Vec<(f64, f64)> = match pairs_text {
                Some(text) => parse_pairs(&text)?,
                None => {
                    let input = input
                        .or(ctx.cfg.get("input")?)
                        .ok_or_else(|| Error::Config("fit needs --input or --pairs".into()))?;
                    let name = col.or(ctx.cfg.raw("column").map(str::to_string)).unwrap_or_else(|| "r_star_star".into());
                    pick_column(&read_records(&input)?, &name)?
                }
            };
            if squared {
                data.iter_mut().for_each(|p| p.1 *= p.1);
            }
            let fit = fit_power_law(&data)?;
            ctx.emit(&fit, || {
                format!(
                    "slope = {:.6}\nintercept = {:.6}\nr^2 = {:.8}\npoints = {}",
                    fit.slope, fit.intercept, fit.r_squared, fit.n_points
                )
            })?;
        }
        Command::Molinet { lx, ly, c } => {
            let lx = lx.or(ctx.cfg.get("lx")?).ok_or_else(|| Error::Config("missing --lx".into()))?;
            let c = ctx.cfg.resolve(c, "c", 1.0)?;
            let result = molinet(lx, c, ly.or(ctx.cfg.get("ly")?))?;
            ctx.emit(&result, || {
                let mut s = format!("Ly_max = {:.6e}", result.ly_max);
                if let Some(b) = result.norm_bound {
                    s.push_str(&format!("\nlimsup |u|_2 <= {b:.6e}"));
                }
                s
            })?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run_simulation(
    ctx: &Ctx,
    l: f64,
    solve: &SolveConfig,
    amplitude: f64,
    lyapunov: Option<&PotentialArgs>,
) -> Result<()> {
    let n = default_grid(l);
    let initial = random_initial(l, n, solve.seed, amplitude, solve.odd_only)?;
    let monitor = match lyapunov {
        Some(p) => {
            let profile = ctx.profile_config(p)?.build(l)?;
            let report = certify_with(&profile, OperatorOrder::Fourth, &CertifyOptions::default())?;
            let constants = LyapunovConstants::from_margin(report.delta_margin, solve.gamma, &profile.norms())?;
            Some(LyapunovMonitor::new(&profile, constants, n)?)
        }
        None => None,
    };
    let mut samples: Vec<MonitorSample> = Vec::new();
    let traj = simulate_with(&initial, solve, |s| {
        if let Some(m) = &monitor {
            samples.push(m.sample(s));
        }
    })?;
    let report = match &monitor {
        Some(m) => Some(m.evaluate(&samples)?),
        None => None,
    };

    let path = ctx.out_file(&format!("simulate_L{l}_seed{}.csv", solve.seed))?;
    let mut w = std::io::BufWriter::new(std::fs::File::create(&path)?);
    writeln!(w, "t,l2,l2_grad,l2_hess,lyapunov_residual")?;
    for i in 0..traj.times.len() {
        let r = report
            .as_ref()
            .and_then(|rep| i.checked_sub(1).and_then(|j| rep.residuals.get(j)))
            .map(|(_, r)| format!("{r:e}"))
            .unwrap_or_default();
        writeln!(w, "{:e},{:e},{:e},{:e},{}", traj.times[i], traj.l2[i], traj.l2_grad[i], traj.l2_hess[i], r)?;
    }
    w.flush()?;

    let summary = json!({
        "L": l,
        "grid": n,
        "gamma": solve.gamma,
        "seed": solve.seed,
        "t_end": solve.t_end,
        "transient": traj.transient,
        "sup_norm": traj.sup_l2,
        "violation_count": report.as_ref().map(|r| r.violations),
        "max_residual": report.as_ref().map(|r| r.max_residual),
        "lambda": monitor.as_ref().map(|m| m.constants().lambda),
        "M2": monitor.as_ref().map(|m| m.constants().m2),
        "series": path.display().to_string(),
    });
    std::fs::write(path.with_extension("json"), serde_json::to_string_pretty(&summary)?)?;
    ctx.emit(&summary, || {
        let mut s = format!("wrote {}\nsup |u|_2 after t = {} : {:.6}", path.display(), traj.transient, traj.sup_l2);
        if let Some(r) = &report {
            s.push_str(&format!("\nLyapunov violations: {} (max residual {:.3e})", r.violations, r.max_residual));
        }
        s
    })
}

fn sweep_table(records: &[SweepRecord], path: &Path) -> String {
    let f = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| format!("{x:.6e}"));
    let mut s = format!("wrote {}\n{:>8} {:>13} {:>13} {:>13} {:>9}\n", path.display(), "L", "margin", "H2", "R**", "certified");
    for r in records {
        s.push_str(&format!(
            "{:>8} {:>13} {:>13} {:>13} {:>9}",
            r.half_period,
            f(r.delta_margin),
            f(r.h2_norm),
            f(r.r_star_star),
            r.certified
        ));
        if let Some(e) = &r.error {
            s.push_str(&format!("  error: {e}"));
        }
        s.push('\n');
    }
    s
}

fn parse_pairs(text: &str) -> Result<Vec<(f64, f64)>> {
    text.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (x, y) = p
                .split_once(':')
                .ok_or_else(|| Error::Config(format!("pair '{p}' is not x:y")))?;
            let num = |s: &str| s.trim().parse::<f64>().map_err(|e| Error::Config(format!("'{s}': {e}")));
            Ok((num(x)?, num(y)?))
        })
        .collect()
}

fn pick_column(records: &[SweepRecord], name: &str) -> Result<Vec<(f64, f64)>> {
    let pick: fn(&SweepRecord) -> Option<f64> = match name {
        "phi_norm" => |r| r.phi_norm,
        "phi_x_norm" => |r| r.phi_x_norm,
        "phi_xx_norm" => |r| r.phi_xx_norm,
        "h2_norm" => |r| r.h2_norm,
        "M2" | "m2" => |r| r.m2,
        "r_star" => |r| r.r_star,
        "r_star_star" => |r| r.r_star_star,
        "sim_sup_norm" => |r| r.sim_sup_norm,
        "delta_margin" => |r| r.delta_margin,
        other => return Err(Error::Config(format!("unknown column '{other}'"))),
    };
    Ok(column(records, pick))
}
