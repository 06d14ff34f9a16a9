//! Build the smoothed, rescaled profile at one half-period and write it out.
//!
//! ```text
//! cargo run --release --example build_potential -- 64 /tmp/profile_64.csv
//! ```

use std::path::PathBuf;

use kslyap::potential::{check_admissible, PotentialProfile, ProfileConfig};

fn main() -> kslyap::Result<()> {
    let mut args = std::env::args().skip(1);
    let l: f64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(64.0);
    let path = args.next().map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join(format!("profile_{l}.csv")));

    let cfg = ProfileConfig::default();
    let minors = check_admissible(&cfg.params);
    println!("minors {:?} pass = {}", minors.minors, minors.pass);

    let profile = cfg.build(l)?;
    let n = profile.norms();
    println!("L = {l}, {} points, <q> = {:.6}", profile.len(), profile.mean_q());
    println!("|phi| = {:.4e}  |phi_x| = {:.4e}  |phi_xx| = {:.4e}", n.phi, n.phi_x, n.phi_xx);

    profile.write_csv(&path)?;
    let back = PotentialProfile::read_csv(&path)?;
    println!("wrote {} (+ {}), reread {} points", path.display(), PotentialProfile::sidecar_path(&path).display(), back.len());
    Ok(())
}
