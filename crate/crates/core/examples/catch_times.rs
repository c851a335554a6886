//! Catch times and competitive ratios on the first two plateaus.

use lsl::catalog::algorithm1;
use lsl::engine::{Side, Target, DEFAULT_HORIZON};
use lsl::numerics::Real;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let p = 256;
    let d = Real::one(p);
    let alg = algorithm1(&d)?;
    for u in ["1", "2", "4", "4.001", "100", "179", "200"] {
        let u = Real::parse(u, p)?;
        let mut cells = Vec::new();
        for side in Side::BOTH {
            let c = alg.catch(&Target::new(u.clone(), d.clone(), side)?, DEFAULT_HORIZON)?;
            cells.push(format!("side {side}: round {} at t = {}", c.round, c.time.to_decimal(6)));
        }
        let cr = alg.competitive_ratio(&u, &d, DEFAULT_HORIZON)?;
        println!("u = {u:<6} CR = {:<12} {}", cr.to_decimal(6), cells.join(", "));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
