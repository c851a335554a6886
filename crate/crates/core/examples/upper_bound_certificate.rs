//! Certifies `1 + 2·s_(i+1) ≤ 56.18·u_i^(4 − (log₂ log₂ u_i)^−2)` at the key
//! points, at two precisions.

use lsl::catalog::algorithm1;
use lsl::numerics::Real;
use lsl::verify::{check_upper_bound, BoundSpec};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for p in [256, 512] {
        let entry = algorithm1(&Real::one(p))?;
        let bound = BoundSpec::known_distance(p);
        let report = check_upper_bound(&entry, &bound, 12)?;
        println!("precision {p}: F(4) = {}", bound.f(&Real::from_u64(4, p)).to_decimal(6));
        for k in &report.key_points {
            println!(
                "  i = {:>2}  log2 lhs = {:>14}  log2 F(u_i) = {:>14}  margin = {}",
                k.round,
                k.lhs_log2.to_decimal(4),
                k.rhs_log2.to_decimal(4),
                k.margin_log2.to_decimal(4)
            );
        }
        let c = report.smallest_c().ok_or("no key points")?;
        println!("  smallest c on a 0.01 grid (exploratory): {}", c.to_shortest(12));
        assert!(report.passed());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
