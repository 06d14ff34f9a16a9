//! Minimize the Burgers-Sivashinsky functional on the mass sphere.

use kslyap::potential::{bs_optimal_potential, BsConfig, BsFunctional};

fn main() -> kslyap::Result<()> {
    for mu in [0.5, 1.0, 2.0] {
        let cfg = BsConfig { mu_lagrange: mu, ..BsConfig::default() };
        let sol = bs_optimal_potential(&cfg)?;
        let f = BsFunctional::new(mu, cfg.half_period, cfg.points);
        let mass = f.inner(&sol.u, &sol.u);
        println!(
            "mu = {mu}: J = {:.10} after {} steps, |grad| = {:.2e}, mass = {mass:.12}",
            sol.value, sol.iterations, sol.grad_norm
        );
    }
    Ok(())
}
