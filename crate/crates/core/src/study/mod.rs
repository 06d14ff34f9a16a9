//! L-sweeps, power-law fits, the thin-domain calculator and flat config files.

mod config;
mod fit;
mod sweep;

pub use config::{parse_list, KeyValueConfig};
pub use fit::{fit_power_law, molinet, MolinetBound, PowerLawFit, MOLINET_EXPONENT, MOLINET_PREVIOUS_EXPONENT};
pub use sweep::{
    column, default_l_list, read_records, simulate_checked, sweep, sweep_entry, write_records, SweepOptions,
    SweepRecord, SweepSimulation, MIN_SWEEP_L,
};
