//! Build the critical profile at a few half-periods and certify coercivity.
//!
//! ```text
//! cargo run --release --example certify -- 32 64 128
//! ```

use std::time::Instant;

use kslyap::coercivity::certify;
use kslyap::potential::build_default_profile;

fn main() -> kslyap::Result<()> {
    let mut ls: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    if ls.is_empty() {
        ls = vec![32.0, 64.0, 128.0];
    }
    println!("{:>6} {:>10} {:>14} {:>14} {:>10} {:>8}", "L", "grid", "lambda_min", "margin", "modes", "secs");
    for l in ls {
        let start = Instant::now();
        let profile = build_default_profile(l)?;
        let report = certify(&profile)?;
        println!(
            "{:>6} {:>10} {:>14.6} {:>14.6} {:>10?} {:>8.1}",
            l,
            profile.len(),
            report.lambda_min,
            report.delta_margin,
            report.n_sequence,
            start.elapsed().as_secs_f64()
        );
    }
    Ok(())
}
