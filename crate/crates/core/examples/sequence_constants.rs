//! Prints the first guesses of the known-distance schedule and the ledger
//! they produce at `d = 1`.

use lsl::catalog::algorithm1;
use lsl::numerics::Real;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let p = 256;
    let entry = algorithm1(&Real::one(p))?;
    let ledger = entry.ledger(&Real::one(p), 3)?;
    println!("{:>2}  {:>24}  {:>24}  {:>24}", "i", "u_i", "x_i", "s_i");
    for i in 0..ledger.rounds() {
        println!(
            "{i:>2}  {:>24}  {:>24}  {:>24}",
            ledger.u(i).to_decimal(12),
            ledger.x(i).to_decimal(12),
            ledger.s(i as isize).to_decimal(12)
        );
    }
    let u1 = ledger.u(1);
    assert!((u1.to_f64() - 179.18).abs() < 0.01);
    assert!((ledger.s(1).to_f64() - 1608.64).abs() < 0.01);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
