//! The competitive-ratio step function as CSV, with the reference bound.

use lsl::experiment::{run_sweep, sweep_to_csv, SweepConfig};
use lsl::numerics::Real;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let p = 256;
    let cfg = SweepConfig::new("alg1", Real::one(p), Real::one(p), Real::from_u64(1_000_000, p), 12);
    let rows = run_sweep(&cfg)?;
    print!("{}", sweep_to_csv(&rows, false));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
