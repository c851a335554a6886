//! Finite witnesses against `CR ≤ a·u^k` for `k < 4`, and the Beck–Newman
//! condition on the schedule's exponents.

use lsl::catalog::{algorithm1, algorithm1_spec};
use lsl::numerics::Real;
use lsl::verify::{beck_newman_check, refute_polynomial_bound, BeckNewmanState};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let p = 256;
    let entry = algorithm1(&Real::one(p))?;
    for a in ["1", "1000", "1000000"] {
        for k in ["1", "2", "3", "3.5", "3.9"] {
            let w = refute_polynomial_bound(&entry, &Real::parse(a, p)?, &Real::parse(k, p)?, 40)?
                .ok_or("no witness")?;
            println!(
                "a = {a:>7}, k = {k:<3}: i = {:>2}, log2 u* = {:>10}, margin = {}",
                w.round_index,
                w.log2_u_star.to_decimal(3),
                w.margin_log2().to_decimal(3)
            );
        }
    }
    let state = BeckNewmanState::from_spec(&algorithm1_spec(), 14, Real::from_ratio(39, 10, p))?;
    let rep = beck_newman_check(&state, 1, 10)?;
    for row in &rep.rows {
        println!("h·z_i − Σ z_n at i = {:>2}: {}", row.i, row.condition_margin.to_decimal(4));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
