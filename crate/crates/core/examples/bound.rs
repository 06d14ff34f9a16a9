//! Absorbing-ball radius from a certified margin, with and without linear forcing.

use kslyap::attractor::headline_bound_gamma;
use kslyap::coercivity::certify;
use kslyap::potential::build_default_profile;

fn main() -> kslyap::Result<()> {
    println!("{:>6} {:>6} {:>10} {:>12} {:>12} {:>12}", "L", "gamma", "lambda", "M2", "R**", "R**/L^1.5");
    for l in [32.0, 64.0, 128.0] {
        let profile = build_default_profile(l)?;
        let margin = certify(&profile)?.delta_margin;
        for gamma in [0.0, 0.1, 0.5] {
            let b = headline_bound_gamma(&profile, margin, gamma)?;
            println!(
                "{l:>6} {gamma:>6} {:>10.4} {:>12.4e} {:>12.4e} {:>12.4e}",
                b.lambda, b.m2, b.r_star_star, b.scaled
            );
        }
    }
    Ok(())
}
