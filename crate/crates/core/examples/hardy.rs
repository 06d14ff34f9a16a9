//! Hardy-type inequality on random odd trigonometric polynomials, and the
//! reduced form it controls.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use kslyap::coercivity::{hardy_check, hardy_reduced_form, SampledFunction};
use kslyap::potential::{smooth, PiecewiseParams, SmoothingParams};

fn main() -> kslyap::Result<()> {
    let params = PiecewiseParams::default();
    let sp = smooth(params, SmoothingParams::default_for(&params))?;
    let a = 1.0;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = f64::INFINITY;
    for trial in 0..20 {
        let b: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let w = |k: usize| (k + 1) as f64 * std::f64::consts::PI / a;
        let f = SampledFunction::from_fn(
            a,
            4001,
            |y| b.iter().enumerate().map(|(k, c)| c * (w(k) * y).sin()).sum(),
            |y| b.iter().enumerate().map(|(k, c)| c * w(k) * (w(k) * y).cos()).sum(),
            |y| b.iter().enumerate().map(|(k, c)| -c * w(k).powi(2) * (w(k) * y).sin()).sum(),
        );
        let h = hardy_check(&f)?;
        worst = worst.min(h.margin);
        if trial < 5 {
            println!("lhs {:>12.4} rhs {:>12.4} margin {:>12.4}", h.lhs, h.rhs, h.margin);
        }
        let _ = hardy_reduced_form(&sp, &f)?;
    }
    println!("smallest margin over 20 draws: {worst:.4e}");
    Ok(())
}
