//! Largest admissible thin-domain height for a few lengths.

use kslyap::study::{molinet, MOLINET_EXPONENT, MOLINET_PREVIOUS_EXPONENT};

fn main() -> kslyap::Result<()> {
    println!("{:>8} {:>14} {:>14}", "Lx", "Ly_max", "previous");
    for lx in [10.0, 100.0, 1000.0, 1e4] {
        let b = molinet(lx, 1.0, None)?;
        println!("{lx:>8} {:>14.6e} {:>14.6e}", b.ly_max, lx.powf(MOLINET_PREVIOUS_EXPONENT));
    }
    println!("exponent {MOLINET_EXPONENT:.6}");
    let ok = molinet(100.0, 1.0, Some(1e-4))?;
    println!("Ly = 1e-4 at Lx = 100: limsup |u| <= {:.4e}", ok.norm_bound.unwrap_or(f64::NAN));
    match molinet(100.0, 1.0, Some(1e-3)) {
        Err(e) => println!("Ly = 1e-3: {e}"),
        Ok(_) => println!("Ly = 1e-3 unexpectedly accepted"),
    }
    Ok(())
}
