use lsl::catalog::{algorithm1, algorithm1_spec};
use lsl::engine::{catch_round, catch_time, compute_rounds, competitive_ratio, DEFAULT_HORIZON};
use lsl::numerics::{log_sum, Log2Real};
use lsl::verify::check_unknown_d_bound;
use lsl::{intersect, Real, Side, Target, Trajectory};
use proptest::prelude::*;

const P: usize = 256;

fn rel(a: &Real, b: &Real) -> f64 {
    ((a - b).abs() / b.abs()).to_f64()
}

fn side(s: bool) -> Side {
    if s {
        Side::Negative
    } else {
        Side::Positive
    }
}

/// `2^w` at precision `p`.
fn evasiveness(w: f64, p: usize) -> Real {
    Real::from_f64(w, p).exp2()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn ledger_stable_under_doubled_precision(d in 1u64..1000, rounds in 1usize..9) {
        let spec = algorithm1_spec();
        let lo = compute_rounds(&spec, &Real::from_u64(d, P), rounds).unwrap();
        let hi = compute_rounds(&spec, &Real::from_u64(d, 2 * P), rounds).unwrap();
        let tol = 2f64.powi(-(P as i32) / 2);
        for i in 0..rounds as isize {
            prop_assert!(rel(lo.s(i), &hi.s(i).with_precision(P).unwrap()) <= tol);
        }
    }

    #[test]
    fn catch_time_stable_under_doubled_precision(w in 0.0f64..400.0, d in 1u64..50, s in any::<bool>()) {
        let spec = algorithm1_spec();
        let t = |p| {
            let target = Target::new(evasiveness(w, p), Real::from_u64(d, p), side(s)).unwrap();
            catch_time(&spec, &target, DEFAULT_HORIZON).unwrap()
        };
        let (lo, hi) = (t(P), t(2 * P));
        prop_assert!(rel(&lo, &hi.with_precision(P).unwrap()) <= 2f64.powi(-(P as i32) / 2));
    }

    #[test]
    fn recurrence_holds(d in 1u64..1000, rounds in 1usize..9) {
        let dv = Real::from_u64(d, P);
        let ledger = compute_rounds(&algorithm1_spec(), &dv, rounds).unwrap();
        let two = Real::from_u64(2, P);
        for i in 0..rounds {
            let u = ledger.u(i);
            let prev = ledger.s(i as isize - 1);
            let x = &(u * &dv) + &(&(&(&two * u) - &two) * prev);
            prop_assert!(rel(ledger.x(i), &x) < 1e-60);
            prop_assert!(rel(ledger.s(i as isize), &(prev + ledger.x(i))) < 1e-60);
        }
    }

    #[test]
    fn catch_lies_within_turn(w in 0.0f64..300.0, d in 1u64..50, s in any::<bool>()) {
        let spec = algorithm1_spec();
        let dv = Real::from_u64(d, P);
        let target = Target::new(evasiveness(w, P), dv.clone(), side(s)).unwrap();
        let k = catch_round(&spec, target.u(), target.side(), DEFAULT_HORIZON).unwrap();
        prop_assert!(Side::of_round(k) == target.side());
        let ledger = compute_rounds(&spec, &dv, k + 1).unwrap();
        let t = catch_time(&spec, &target, DEFAULT_HORIZON).unwrap();
        let reach = &t - &ledger.s_before(k).mul_pow2(1);
        prop_assert!(reach <= ledger.x(k).clone() * (Real::one(P) + Real::pow2(-200, P)));
        prop_assert!(t >= target.optimal_time());
    }

    #[test]
    fn cr_monotone_and_stepwise(w1 in 0.0f64..200.0, w2 in 0.0f64..200.0, d in 1u64..20) {
        let spec = algorithm1_spec();
        let dv = Real::from_u64(d, P);
        let (a, b) = if w1 <= w2 { (w1, w2) } else { (w2, w1) };
        let (ua, ub) = (evasiveness(a, P), evasiveness(b, P));
        // equal steps may differ in the last bit
        let slack = Real::one(P) + Real::pow2(-200, P);
        for s in Side::BOTH {
            let ta = Target::new(ua.clone(), dv.clone(), s).unwrap();
            let tb = Target::new(ub.clone(), dv.clone(), s).unwrap();
            let ra = catch_time(&spec, &ta, DEFAULT_HORIZON).unwrap() / ta.optimal_time();
            let rb = catch_time(&spec, &tb, DEFAULT_HORIZON).unwrap() / tb.optimal_time();
            prop_assert!(ra <= &rb * &slack);
            let ka = catch_round(&spec, &ua, s, DEFAULT_HORIZON).unwrap();
            let kb = catch_round(&spec, &ub, s, DEFAULT_HORIZON).unwrap();
            if ka == kb {
                prop_assert!(rel(&ra, &rb) < 1e-60);
            }
        }
        let ca = competitive_ratio(&spec, &ua, &dv, DEFAULT_HORIZON).unwrap();
        let cb = competitive_ratio(&spec, &ub, &dv, DEFAULT_HORIZON).unwrap();
        prop_assert!(ca <= &cb * &slack);
    }

    #[test]
    fn scaling_distance_scales_time(w in 0.0f64..200.0, d in 1u64..50, c in 1u64..50, s in any::<bool>()) {
        let spec = algorithm1_spec();
        let u = evasiveness(w, P);
        let t = |dd: u64| {
            let target = Target::new(u.clone(), Real::from_u64(dd, P), side(s)).unwrap();
            catch_time(&spec, &target, DEFAULT_HORIZON).unwrap()
        };
        let scaled = t(d) * Real::from_u64(c, P);
        prop_assert!(rel(&t(d * c), &scaled) < 1e-60);
        let cr1 = competitive_ratio(&spec, &u, &Real::from_u64(d, P), DEFAULT_HORIZON).unwrap();
        let cr2 = competitive_ratio(&spec, &u, &Real::from_u64(d * c, P), DEFAULT_HORIZON).unwrap();
        prop_assert!(rel(&cr1, &cr2) < 1e-60);
    }

    #[test]
    fn oracle_agrees_with_analytic(w in 0.0f64..400.0, d in 1u64..20, s in any::<bool>()) {
        let dv = Real::from_u64(d, P);
        let entry = algorithm1(&dv).unwrap();
        let target = Target::new(evasiveness(w, P), dv.clone(), side(s)).unwrap();
        let analytic = entry.catch(&target, DEFAULT_HORIZON).unwrap();
        let traj = entry.trajectory(&dv, analytic.round + 1).unwrap();
        let hit = intersect(&traj, &target).unwrap();
        let oracle = hit.caught().expect("caught within the ledger");
        prop_assert!(rel(&oracle.time, &analytic.time) < 1e-25);
        prop_assert!(oracle.time >= target.optimal_time() * (Real::one(P) - Real::pow2(-200, P)));
    }

    #[test]
    fn unknown_distance_dominance(w in 0.0f64..6.0, d in 1.0f64..16.0) {
        let rep = check_unknown_d_bound(&evasiveness(w, P), &Real::from_f64(d, P), DEFAULT_HORIZON).unwrap();
        prop_assert!(rep.passed(), "{:?}", rep.dominance_margins);
    }

    #[test]
    fn log_sum_matches_linear(a in -200.0f64..200.0, b in -200.0f64..200.0) {
        let la = Log2Real::from_log2(Real::from_f64(a, P));
        let lb = Log2Real::from_log2(Real::from_f64(b, P));
        let ab = log_sum(&la, &lb).unwrap();
        let ba = log_sum(&lb, &la).unwrap();
        prop_assert_eq!(ab.log2(), ba.log2());
        let hi = Real::from_f64(a.max(b), P);
        let got = ab.log2().unwrap().clone();
        prop_assert!(got >= hi && got <= &hi + &Real::one(P));
        let linear = &la.to_real().unwrap() + &lb.to_real().unwrap();
        prop_assert!(rel(&ab.to_real().unwrap(), &linear) < 1e-60);
        let z = log_sum(&la, &Log2Real::zero(P)).unwrap();
        prop_assert_eq!(z.log2(), la.log2());
    }

    #[test]
    fn trajectory_csv_round_trip(rounds in 1usize..7, d in 1u64..100) {
        let dv = Real::from_u64(d, P);
        let traj = algorithm1(&dv).unwrap().trajectory(&dv, rounds).unwrap();
        let text = traj.to_csv(60);
        let back = Trajectory::from_csv(&text, P).unwrap();
        prop_assert_eq!(back.vertices().len(), 2 * rounds + 1);
        prop_assert_eq!(back.to_csv(60), text);
    }
}
