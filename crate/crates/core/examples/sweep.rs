//! Parallel sweep over half-periods with an incremental CSV and slope fits.

use kslyap::study::{column, default_l_list, fit_power_law, sweep, SweepOptions};

fn main() -> kslyap::Result<()> {
    let path = std::env::temp_dir().join("kslyap_sweep.csv");
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(4);
    let opts = SweepOptions { workers, ..SweepOptions::default() };
    let records = sweep(&default_l_list(), &opts, Some(&path))?;
    println!("wrote {}", path.display());

    let fits = [
        ("|phi|_H2", column(&records, |r| r.h2_norm)),
        ("|phi_x|^2", column(&records, |r| r.phi_x_norm.map(|v| v * v))),
        ("|phi_xx|^2", column(&records, |r| r.phi_xx_norm.map(|v| v * v))),
        ("R**", column(&records, |r| r.r_star_star)),
    ];
    for (name, data) in fits {
        let fit = fit_power_law(&data)?;
        println!("{name:>11}: slope {:.4} (r^2 = {:.6})", fit.slope, fit.r_squared);
    }
    Ok(())
}
