//! Solve the exponent program for both operator orders and probe the
//! delocalized and localized test functions against the critical profile.
//!
//! ```text
//! cargo run --example exponents
//! ```

use kslyap::exponents::{
    classify_for, delocalized_test_value, localized_test_value, solve_critical_exponents, OperatorOrder,
};
use kslyap::potential::{smooth, PiecewiseParams, SmoothingParams};

fn main() -> kslyap::Result<()> {
    for order in [OperatorOrder::Fourth, OperatorOrder::Second] {
        let sol = solve_critical_exponents(order);
        println!("{order:?}: (c1, c2) = {} objective {}", sol.pair, sol.objective);
    }

    let params = PiecewiseParams::default();
    let shape = smooth(params, SmoothingParams::default_for(&params))?;
    let pair = solve_critical_exponents(OperatorOrder::Fourth).pair;
    println!("class: {:?}", classify_for(&pair, OperatorOrder::Fourth));

    println!("\n{:>10} {:>16} {:>16}", "L", "sin-mode test", "bump test");
    for l in [1e2, 1e3, 1e4, 1e5] {
        let deloc = delocalized_test_value(&pair, 0.0, l, 1, &shape)?;
        let local = localized_test_value(&pair, 0.0, l, &shape)?;
        println!("{l:>10.0e} {deloc:>16.6e} {:>16.6e}", local.total);
    }
    Ok(())
}
