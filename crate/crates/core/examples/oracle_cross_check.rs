//! Intersects the robot path with target world-lines and compares against
//! the closed-form catch time.

use lsl::catalog::algorithm1;
use lsl::engine::{Side, Target, DEFAULT_HORIZON};
use lsl::numerics::Real;
use lsl::oracle::{intersect, verify_strategy_validity};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let p = 256;
    for d in [1u64, 2, 10] {
        let d = Real::from_u64(d, p);
        let alg = algorithm1(&d)?;
        let traj = alg.trajectory(&d, 8)?;
        assert!(verify_strategy_validity(&traj).is_valid());
        let mut worst = Real::zero(p);
        for u in ["1", "3.5", "50", "179.2", "1e4", "9e5", "1e9"] {
            for side in Side::BOTH {
                let target = Target::new(Real::parse(u, p)?, d.clone(), side)?;
                let analytic = alg.catch(&target, DEFAULT_HORIZON)?.time;
                let hit = intersect(&traj, &target)?;
                let oracle = hit.caught().ok_or("not caught")?.time.clone();
                worst = worst.max(&((&analytic - &oracle).abs() / &analytic));
            }
        }
        println!("d = {d}: largest relative discrepancy {}", worst.to_shortest(6));
        assert!(worst <= Real::from_f64(1e-25, p));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
