//! The schedule planned for `d = 1` against targets at their true distance.

use lsl::engine::DEFAULT_HORIZON;
use lsl::numerics::Real;
use lsl::verify::check_unknown_d_bound;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let p = 256;
    println!("{:>4} {:>4} {:>14} {:>14} {:>14}", "u", "d", "CR(u,d)", "CR(ud,1)", "bound");
    for (u, d) in [(1, 1), (2, 2), (3, 5), (4, 4), (10, 16), (16, 16)] {
        let rep = check_unknown_d_bound(&Real::from_u64(u, p), &Real::from_u64(d, p), DEFAULT_HORIZON)?;
        println!(
            "{u:>4} {d:>4} {:>14} {:>14} {:>14}",
            rep.cr.to_decimal(4),
            rep.cr_ud.to_decimal(4),
            rep.bound.to_decimal(4)
        );
        assert!(rep.passed());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
