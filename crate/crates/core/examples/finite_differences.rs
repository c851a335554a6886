//! Differences of `√x` between shifted derivatives, and `Φ(i)`.

use lsl::numerics::Real;
use lsl::verify::diff::{phi_at_one, phi_binding_lower_bound};
use lsl::verify::{check_diff_bounds, finite_difference, phi, DiffOracle};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let p = 256;
    let f = DiffOracle::sqrt();
    for k in 1..=4usize {
        let x = Real::from_u64(k as u64 + 3, p);
        let rep = check_diff_bounds(&f, k, std::slice::from_ref(&x))?;
        let pt = &rep.points[0];
        println!(
            "k = {k}, x = {x}: {} <= {} <= {}",
            pt.lower.to_decimal(8),
            pt.middle.to_decimal(8),
            pt.upper.to_decimal(8)
        );
    }
    println!("f<2>(4) = {}", finite_difference(&f, 2, &Real::from_u64(4, p))?.to_decimal(6));
    println!("Φ(1) = {} (closed form {})", phi(1, p)?.to_decimal(6), phi_at_one(p).to_decimal(6));
    for i in [2u64, 5, 10, 50, 100] {
        println!("Φ({i}) = {:>10}  estimate {}", phi(i, p)?.to_decimal(6), phi_binding_lower_bound(i, p).to_decimal(6));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
