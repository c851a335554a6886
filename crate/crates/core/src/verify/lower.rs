//! Lower-bound machinery: witness search against `CR ≤ a·u^k`, the
//! Beck–Newman condition, the `1 + (2/d)·s_(i+1)` family and the product
//! sandwich.

use crate::catalog::CatalogEntry;
use crate::engine::{compute_log_rounds, ZigzagSpec, DEFAULT_HORIZON};
use crate::numerics::{log_sum, Log2Real, Real};
use crate::verify::{certified, log2_margin, precondition, rounding_slack, CheckRecord, VerifyError};

/// Rounds up to which the witness is also confirmed with the linear engine.
const ENGINE_CONFIRM_ROUNDS: usize = 6;

#[derive(Clone, Debug)]
pub struct RefutationWitness {
    pub round_index: usize,
    /// `log₂ u* = log₂ α_i + log₂ u_i`.
    pub log2_u_star: Real,
    /// `log₂(1 + 2·∏_(n≤i+1) u_n)`, a lower bound on `log₂ CR(u*)`.
    pub cr_log2: Real,
    /// `log₂ a + k·log₂ u*`.
    pub bound_log2: Real,
    /// `log₂(1 + (2/d)·s_(i+1))`, the sharper lower bound from the ledger.
    pub exact_cr_log2: Real,
    /// `log₂ CR(u*)` from the engine, when `u*` is small enough.
    pub engine_cr_log2: Option<Real>,
}

impl RefutationWitness {
    pub fn margin_log2(&self) -> Real {
        &self.cr_log2 - &self.bound_log2
    }

    /// The ledger and engine values never undercut the product bound.
    pub fn consistent(&self) -> bool {
        let slack = -rounding_slack(self.cr_log2.precision());
        let exact_ok = &self.exact_cr_log2 - &self.cr_log2 >= slack;
        let engine_ok = self.engine_cr_log2.as_ref().is_none_or(|e| e - &self.exact_cr_log2 >= slack);
        exact_ok && engine_ok
    }
}

/// Scans `i ≤ i_max` for `u* = α_i·u_i` with `1 + 2·∏_(n≤i+1) u_n > a·u*^k`,
/// where `α_i = min(u_(i+2)/u_i, 2^(1/k))`.
pub fn refute_polynomial_bound(
    entry: &CatalogEntry,
    a: &Real,
    k: &Real,
    i_max: usize,
) -> Result<Option<RefutationWitness>, VerifyError> {
    let p = a.precision().max(k.precision());
    if !a.is_positive() {
        return Err(precondition("a must be positive"));
    }
    if !k.is_positive() || *k >= Real::from_u64(4, p) {
        return Err(precondition(format!("k = {k} must lie in (0, 4)")));
    }
    entry.spec.validate_prefix(i_max + 3, p)?;
    let w: Vec<Real> = (0..i_max + 3).map(|i| entry.spec.log2_u(i, p)).collect::<Result<_, _>>()?;
    let d = &entry.reference_d;
    let log_s = compute_log_rounds(&entry.spec, d, i_max + 2)?;
    let log2_a = a.log2();
    let one = Log2Real::from_log2(Real::zero(p));
    let mut log_prod = w[0].clone();
    for i in 0..=i_max {
        log_prod = &log_prod + &w[i + 1];
        let log2_alpha = (&w[i + 2] - &w[i]).min(&k.recip());
        let log2_u_star = &log2_alpha + &w[i];
        let cr_log2 = lift(&one, &(&log_prod + &Real::one(p)))?;
        let bound_log2 = &log2_a + &(k * &log2_u_star);
        if cr_log2 > bound_log2 {
            let exact = lift(&one, &(&(Real::one(p) - &d.log2()) + log_s[i + 1].log2().expect("s > 0")))?;
            let engine_cr_log2 = if i + 2 <= ENGINE_CONFIRM_ROUNDS {
                Some(entry.competitive_ratio(&log2_u_star.exp2(), d, DEFAULT_HORIZON)?.log2())
            } else {
                None
            };
            return Ok(Some(RefutationWitness {
                round_index: i,
                log2_u_star,
                cr_log2,
                bound_log2,
                exact_cr_log2: exact,
                engine_cr_log2,
            }));
        }
    }
    Ok(None)
}

/// `log₂(1 + 2^t)`.
fn lift(one: &Log2Real, t: &Real) -> Result<Real, VerifyError> {
    Ok(log_sum(one, &Log2Real::from_log2(t.clone()))?.log2().expect("positive").clone())
}

/// `z`, `y_i = 2^−i·Σ_(n≤i) z_n`, `h` and `γ = (4 − h)/h`.
#[derive(Clone, Debug)]
pub struct BeckNewmanState {
    pub z: Vec<Real>,
    pub y: Vec<Real>,
    pub h: Real,
    pub gamma: Real,
}

impl BeckNewmanState {
    pub fn new(z: Vec<Real>, h: Real) -> Result<Self, VerifyError> {
        let p = h.precision();
        if !h.is_positive() || h >= Real::from_u64(4, p) {
            return Err(precondition(format!("h = {h} must lie in (0, 4)")));
        }
        if z.len() < 3 {
            return Err(precondition("z needs at least three terms"));
        }
        if z[..2].iter().any(Real::is_negative) {
            return Err(precondition("z_0 and z_1 must be non-negative"));
        }
        if let Some(i) = z.iter().skip(2).position(|v| !v.is_positive()) {
            return Err(precondition(format!("z_{} must be positive", i + 2)));
        }
        let mut sum = Real::zero(p);
        let y = z
            .iter()
            .enumerate()
            .map(|(i, zi)| {
                sum = &sum + zi;
                sum.mul_pow2(-(i as i64))
            })
            .collect();
        let gamma = (Real::from_u64(4, p) - &h) / &h;
        Ok(BeckNewmanState { z, y, h, gamma })
    }

    /// `z_i = log₂ u_i` for `i < len`.
    pub fn from_spec(spec: &ZigzagSpec, len: usize, h: Real) -> Result<Self, VerifyError> {
        let p = h.precision();
        let z = (0..len).map(|i| spec.log2_u(i, p)).collect::<Result<_, _>>()?;
        Self::new(z, h)
    }
}

#[derive(Clone, Debug)]
pub struct BeckNewmanRow {
    pub i: usize,
    /// `h·z_i − Σ_(n≤i+1) z_n`.
    pub condition_margin: Real,
    pub condition_holds: bool,
    /// `−γ·y_(i+2) − (y_(i+2) − 2y_(i+1) + y_i)`.
    pub second_difference_margin: Real,
    pub second_difference_holds: bool,
}

#[derive(Clone, Debug)]
pub struct BeckNewmanReport {
    pub rows: Vec<BeckNewmanRow>,
    pub first_failure: Option<usize>,
}

impl BeckNewmanReport {
    /// The second-difference inequality at `i` agrees with the condition at `i + 1`.
    pub fn equivalence_holds(&self) -> bool {
        self.rows.windows(2).all(|w| w[0].second_difference_holds == w[1].condition_holds)
    }
}

pub fn beck_newman_check(state: &BeckNewmanState, m: usize, i_max: usize) -> Result<BeckNewmanReport, VerifyError> {
    if i_max + 2 >= state.z.len() {
        return Err(precondition(format!("i_max = {i_max} needs {} terms of z", i_max + 3)));
    }
    if m > i_max {
        return Err(precondition("m must not exceed i_max"));
    }
    let mut prefix = Vec::with_capacity(state.z.len());
    let mut acc = Real::zero(state.h.precision());
    for z in &state.z {
        acc = &acc + z;
        prefix.push(acc.clone());
    }
    let rows: Vec<BeckNewmanRow> = (m..=i_max)
        .map(|i| {
            let condition_margin = &(&state.h * &state.z[i]) - &prefix[i + 1];
            let y = &state.y;
            let second = &(&y[i + 2] - &y[i + 1].mul_pow2(1)) + &y[i];
            let second_difference_margin = &(-(&state.gamma * &y[i + 2])) - &second;
            BeckNewmanRow {
                i,
                condition_holds: !condition_margin.is_negative(),
                condition_margin,
                second_difference_holds: !second_difference_margin.is_negative(),
                second_difference_margin,
            }
        })
        .collect();
    let first_failure = rows.iter().find(|r| !r.condition_holds).map(|r| r.i);
    Ok(BeckNewmanReport { rows, first_failure })
}

#[derive(Clone, Debug)]
pub struct FamilyRow {
    pub i: usize,
    pub log2_u: Real,
    pub cr_log2: Real,
    pub bound_log2: Real,
    pub margin_log2: Real,
    /// `u ∈ (u_i, u_(i+1)]`, where the bound is attained.
    pub equality_expected: bool,
}

impl FamilyRow {
    pub fn passed(&self) -> bool {
        let slack = rounding_slack(self.margin_log2.precision());
        certified(&self.margin_log2) && (!self.equality_expected || self.margin_log2 <= slack)
    }
}

#[derive(Clone, Debug)]
pub struct FamilyReport {
    pub strategy: String,
    pub precision_bits: usize,
    pub rows: Vec<FamilyRow>,
}

impl FamilyReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(FamilyRow::passed)
    }

    pub fn records(&self) -> Vec<CheckRecord> {
        self.rows
            .iter()
            .enumerate()
            .map(|(j, r)| {
                CheckRecord::new(format!("lower/family/i={:02}/sample={j:03}", r.i), self.precision_bits)
                    .param("strategy", &self.strategy)
                    .param("log2_u", r.log2_u.to_shortest(20))
                    .param("equality_expected", r.equality_expected)
                    .margin(&r.margin_log2)
                    .passed(r.passed())
            })
            .collect()
    }
}

/// `CR(u) ≥ 1 + (2/d)·s_(i+1)` for `u ∈ (u_i, u_(i+2)]`, with equality on
/// `(u_i, u_(i+1)]`. Samples are spaced evenly in `log₂ u` and include
/// `u_(i+1)` and `u_(i+2)`.
pub fn check_lower_bound_family(entry: &CatalogEntry, i_max: usize, samples: usize) -> Result<FamilyReport, VerifyError> {
    if samples < 1 {
        return Err(precondition("need at least one sample per interval"));
    }
    let d = &entry.reference_d;
    let p = d.precision();
    entry
        .spec
        .validate_strictly_increasing(i_max + 3, p)
        .map_err(|e| precondition(format!("the family check needs a strictly increasing sequence: {e}")))?;
    let ledger = entry.ledger(d, i_max + 2)?;
    let mut rows = Vec::new();
    for i in 0..=i_max {
        let wi = ledger.log2_u(i).clone();
        let w1 = ledger.log2_u(i + 1).clone();
        let w2 = entry.spec.log2_u(i + 2, p)?;
        let bound = &Real::one(p) + &(ledger.s(i as isize + 1).mul_pow2(1) / d);
        let mut points: Vec<Real> = (1..=samples)
            .map(|j| &wi + &((&w2 - &wi) * Real::from_ratio(j as i64, samples as i64, p)))
            .collect();
        points.push(w1.clone());
        points.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        points.dedup();
        for w in points {
            let cr = entry.competitive_ratio(&w.exp2(), d, DEFAULT_HORIZON)?;
            rows.push(FamilyRow {
                i,
                equality_expected: w <= w1,
                margin_log2: log2_margin(&bound, &cr),
                cr_log2: cr.log2(),
                bound_log2: bound.log2(),
                log2_u: w,
            });
        }
    }
    Ok(FamilyReport { strategy: entry.id.clone(), precision_bits: p, rows })
}

#[derive(Clone, Debug)]
pub struct SandwichReport {
    pub precision_bits: usize,
    /// `(i, log₂ s_i − log₂(d∏u_n), log₂(2^(i+1)d∏u_n) − log₂ s_i)`
    pub rows: Vec<(usize, Real, Real)>,
}

impl SandwichReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|(_, lo, hi)| certified(lo) && certified(hi))
    }

    pub fn records(&self) -> Vec<CheckRecord> {
        self.rows
            .iter()
            .flat_map(|(i, lo, hi)| {
                [("lower", lo), ("upper", hi)].map(|(side, m)| {
                    CheckRecord::new(format!("lower/product_sandwich/{side}/i={i:02}"), self.precision_bits)
                        .param("i", i)
                        .margin(m)
                })
            })
            .collect()
    }
}

/// `d·∏_(n≤i) u_n ≤ s_i ≤ 2^(i+1)·d·∏_(n≤i) u_n` for `i ≤ i_max`.
pub fn check_product_sandwich(entry: &CatalogEntry, i_max: usize) -> Result<SandwichReport, VerifyError> {
    let d = &entry.reference_d;
    let ledger = entry.ledger(d, i_max + 1)?;
    let rows = (0..=i_max)
        .map(|i| {
            let (lo, hi) = ledger.product_sandwich_margins(i);
            (i, lo, hi)
        })
        .collect();
    Ok(SandwichReport { precision_bits: d.precision(), rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{algorithm1, algorithm1_spec, custom_sequence};
    use crate::numerics::DEFAULT_PRECISION as P;

    fn alg1() -> CatalogEntry {
        algorithm1(&Real::one(P)).unwrap()
    }

    #[test]
    fn witness_for_cubic_bound() {
        let w = refute_polynomial_bound(&alg1(), &Real::one(P), &Real::from_u64(3, P), 10).unwrap().unwrap();
        assert!(w.round_index <= 2);
        assert!(w.cr_log2 > w.bound_log2);
        assert!(w.consistent());
        assert!(w.engine_cr_log2.is_some());
    }

    #[test]
    fn witness_for_near_quartic_bound() {
        let a = Real::from_u64(1_000_000, P);
        let k = Real::from_ratio(39, 10, P);
        let w = refute_polynomial_bound(&alg1(), &a, &k, 20).unwrap().unwrap();
        assert!(w.round_index <= 20);
        assert!(w.consistent());
    }

    #[test]
    fn quartic_and_bad_parameters_rejected() {
        let e = alg1();
        assert!(refute_polynomial_bound(&e, &Real::one(P), &Real::from_u64(4, P), 10).is_err());
        assert!(refute_polynomial_bound(&e, &Real::zero(P), &Real::one(P), 10).is_err());
        assert!(refute_polynomial_bound(&e, &Real::one(P), &Real::zero(P), 10).is_err());
    }

    #[test]
    fn beck_newman_positivity_preconditions() {
        let z = vec![Real::one(P), Real::zero(P), Real::zero(P), Real::zero(P)];
        assert!(BeckNewmanState::new(z, Real::from_ratio(39, 10, P)).is_err());
        let ones = vec![Real::one(P); 6];
        assert!(BeckNewmanState::new(ones, Real::from_u64(4, P)).is_err());
    }

    #[test]
    fn beck_newman_on_algorithm1() {
        let state = BeckNewmanState::from_spec(&algorithm1_spec(), 16, Real::from_ratio(39, 10, P)).unwrap();
        let rep = beck_newman_check(&state, 1, 12).unwrap();
        assert_eq!(rep.first_failure, Some(1));
        // the condition recovers at i = 2 and 3 before failing for good
        let holds: Vec<usize> = rep.rows.iter().filter(|r| r.condition_holds).map(|r| r.i).collect();
        assert_eq!(holds, vec![2, 3]);
        assert!(rep.equivalence_holds());
    }

    #[test]
    fn beck_newman_on_constant_sequence() {
        let state = BeckNewmanState::new(vec![Real::one(P); 12], Real::from_ratio(39, 10, P)).unwrap();
        let rep = beck_newman_check(&state, 0, 8).unwrap();
        // 3.9 ≥ i + 2 holds only for i ≤ 1
        for r in &rep.rows {
            assert_eq!(r.condition_holds, r.i <= 1, "i={}", r.i);
            assert_eq!(r.second_difference_holds, r.i == 0, "i={}", r.i);
        }
        assert_eq!(rep.first_failure, Some(2));
        assert!(rep.equivalence_holds());
        let y3 = &state.y[3];
        assert_eq!(*y3, Real::from_ratio(4, 8, P));
    }

    #[test]
    fn family_holds_with_equality_on_lower_half() {
        let rep = check_lower_bound_family(&alg1(), 4, 6).unwrap();
        assert!(rep.passed());
        assert!(rep.rows.iter().any(|r| r.equality_expected));
        assert!(rep.rows.iter().any(|r| !r.equality_expected && r.margin_log2.is_positive()));
    }

    #[test]
    fn sandwich_holds() {
        let rep = check_product_sandwich(&alg1(), 20).unwrap();
        assert_eq!(rep.rows.len(), 21);
        assert!(rep.passed());
        let g = custom_sequence("geometric:2,2", P).unwrap();
        assert!(check_product_sandwich(&g, 10).unwrap().passed());
    }
}
