//! Concrete strategies: the known-distance schedule, its unknown-distance
//! variant, and user-described sequences.

use std::fmt;

use thiserror::Error;

use crate::engine::{compute_rounds, Catch, EngineError, RoundLedger, Side, Target, ZigzagSpec};
use crate::numerics::{NumericsError, Real};
use crate::oracle::Trajectory;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CatalogError {
    #[error("distance {0} is below 1")]
    DistanceBelowOne(String),
    #[error("unknown strategy `{0}`")]
    UnknownStrategy(String),
    #[error("bad sequence description `{text}`: {reason}")]
    BadDescription { text: String, reason: String },
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Which distance the strategy's ledger is planned for.
#[derive(Clone, Debug)]
pub enum AssumedDistance {
    /// The searcher plans with the target's true `d`.
    TrueDistance,
    /// The searcher plans with this `d` whatever the target's is.
    Fixed(Real),
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub id: String,
    pub spec: ZigzagSpec,
    pub assumed_d: AssumedDistance,
    /// Distance used when no target is at hand (trajectory export, sweeps).
    pub reference_d: Real,
    pub description: String,
}

/// `log₂ u_i = 3·2^i·√(i+1) − 1`.
pub fn algorithm1_log2_u(i: usize, precision: usize) -> Real {
    let root = Real::from_u64(i as u64 + 1, precision).sqrt();
    let three = Real::from_u64(3, precision);
    (three * root).mul_pow2(i as i64) - Real::one(precision)
}

pub fn algorithm1_spec() -> ZigzagSpec {
    ZigzagSpec::new("alg1", algorithm1_log2_u)
}

/// Known-distance schedule; the ledger follows the target's true `d`.
pub fn algorithm1(d: &Real) -> Result<CatalogEntry, CatalogError> {
    if *d < Real::one(d.precision()) {
        return Err(CatalogError::DistanceBelowOne(d.to_string()));
    }
    Ok(CatalogEntry {
        id: "alg1".into(),
        spec: algorithm1_spec(),
        assumed_d: AssumedDistance::TrueDistance,
        reference_d: d.clone(),
        description: "u_i = 2^(3·2^i·√(i+1) − 1), planned with the known distance".into(),
    })
}

/// Same schedule run as though `d = 1`.
pub fn algorithm2(precision: usize) -> CatalogEntry {
    CatalogEntry {
        id: "alg2".into(),
        spec: algorithm1_spec(),
        assumed_d: AssumedDistance::Fixed(Real::one(precision)),
        reference_d: Real::one(precision),
        description: "known-distance schedule planned for d = 1 regardless of the true distance".into(),
    }
}

/// Parses `geometric:base,ratio`, `log2poly:c0,c1,...` or `table:w0,w1,...`.
///
/// `geometric` gives `u_i = base·ratio^i`; `log2poly` gives
/// `log₂ u_i = Σ c_j·i^j`; `table` lists `log₂ u_i` directly and is only
/// defined for as many rounds as values are listed.
pub fn custom_sequence(description: &str, precision: usize) -> Result<CatalogEntry, CatalogError> {
    let bad = |reason: &str| CatalogError::BadDescription { text: description.to_string(), reason: reason.to_string() };
    let (kind, body) = description.split_once(':').ok_or_else(|| bad("expected `kind:values`"))?;
    let values: Vec<String> = body.split(',').map(|v| v.trim().to_string()).filter(|v| !v.is_empty()).collect();
    for v in &values {
        Real::parse(v, precision).map_err(|_| bad(&format!("`{v}` is not a number")))?;
    }
    let parse = |s: &str, p: usize| Real::parse(s, p).expect("validated above");
    let spec = match kind.trim() {
        "geometric" => {
            let [base, ratio] = <[String; 2]>::try_from(values).map_err(|_| bad("geometric needs base,ratio"))?;
            if parse(&base, precision) < Real::one(precision) {
                return Err(bad("base must be at least 1"));
            }
            if !parse(&ratio, precision).is_positive() {
                return Err(bad("ratio must be positive"));
            }
            ZigzagSpec::new(description, move |i, p| {
                &parse(&base, p).log2() + &(Real::from_u64(i as u64, p) * parse(&ratio, p).log2())
            })
        }
        "log2poly" => {
            if values.is_empty() {
                return Err(bad("log2poly needs at least one coefficient"));
            }
            ZigzagSpec::new(description, move |i, p| {
                let x = Real::from_u64(i as u64, p);
                values.iter().rev().fold(Real::zero(p), |acc, c| &(acc * &x) + &parse(c, p))
            })
        }
        "table" => {
            if values.is_empty() {
                return Err(bad("table needs at least one value"));
            }
            let n = values.len();
            ZigzagSpec::finite(description, n, move |i, p| parse(&values[i], p))
        }
        other => return Err(bad(&format!("unknown kind `{other}`"))),
    };
    if spec.log2_u(0, precision)?.is_negative() {
        return Err(bad("u_0 must be at least 1"));
    }
    Ok(CatalogEntry {
        id: description.to_string(),
        spec,
        assumed_d: AssumedDistance::TrueDistance,
        reference_d: Real::one(precision),
        description: format!("custom sequence {description}"),
    })
}

/// Resolves `alg1`, `alg2` or a custom description.
pub fn lookup(id: &str, d: &Real) -> Result<CatalogEntry, CatalogError> {
    match id {
        "alg1" => algorithm1(d),
        "alg2" => Ok(algorithm2(d.precision())),
        other if other.contains(':') => custom_sequence(other, d.precision()),
        other => Err(CatalogError::UnknownStrategy(other.to_string())),
    }
}

impl CatalogEntry {
    /// Distance the ledger is built with when the target starts at `target_d`.
    pub fn ledger_distance(&self, target_d: &Real) -> Real {
        match &self.assumed_d {
            AssumedDistance::TrueDistance => target_d.clone(),
            AssumedDistance::Fixed(d) => d.clone(),
        }
    }

    pub fn ledger(&self, target_d: &Real, rounds: usize) -> Result<RoundLedger, EngineError> {
        compute_rounds(&self.spec, &self.ledger_distance(target_d), rounds)
    }

    pub fn trajectory(&self, target_d: &Real, rounds: usize) -> Result<Trajectory, EngineError> {
        Ok(self.ledger(target_d, rounds)?.trajectory())
    }

    /// Analytic catch of `target` within rounds `0..=horizon`.
    pub fn catch(&self, target: &Target, horizon: usize) -> Result<Catch, EngineError> {
        let mut rounds = 2.min(horizon + 1);
        loop {
            let ledger = self.ledger(target.d(), rounds)?;
            if let Some(c) = ledger.catch(target) {
                return Ok(c);
            }
            if rounds > horizon {
                return Err(EngineError::HorizonExhausted { horizon });
            }
            rounds = (rounds * 2).min(horizon + 1);
        }
    }

    /// `max_σ T^σ / (u·d)` with the analytic catch.
    pub fn competitive_ratio(&self, u: &Real, d: &Real, horizon: usize) -> Result<Real, EngineError> {
        let mut worst: Option<Real> = None;
        for side in Side::BOTH {
            let target = Target::new(u.clone(), d.clone(), side)?;
            let ratio = self.catch(&target, horizon)?.time / target.optimal_time();
            worst = Some(match worst {
                Some(w) => w.max(&ratio),
                None => ratio,
            });
        }
        Ok(worst.expect("two sides"))
    }
}

impl fmt::Display for CatalogEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.id, self.description)
    }
}

/// `1 + 2/(1 − v)`: optimal ratio when both speed and distance are known.
pub fn reference_known_speed_and_distance(v: &Real) -> Real {
    let one = Real::one(v.precision());
    &one + &(Real::from_u64(2, v.precision()) / (&one - v))
}

/// `1 + 8(1 + v)/(1 − v)²`: optimal ratio for known speed and unknown distance.
pub fn reference_known_speed(v: &Real) -> Real {
    let p = v.precision();
    let one = Real::one(p);
    let gap = &one - v;
    &one + &(Real::from_u64(8, p) * (&one + v) / (&gap * &gap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::DEFAULT_PRECISION as P;

    fn r(x: i64) -> Real {
        Real::from_i64(x, P)
    }

    #[test]
    fn algorithm1_constants() {
        let spec = algorithm1_spec();
        assert_eq!(spec.u(0, P).unwrap(), r(4));
        assert!((spec.u(1, P).unwrap().to_f64() - 179.18).abs() < 0.01);
        assert!((spec.u(2, P).unwrap().to_f64() - 903_152.25).abs() < 0.5);
    }

    #[test]
    fn algorithm1_log2_grows_past_doubling() {
        for i in 1..=30 {
            assert!(algorithm1_log2_u(i, P) >= Real::pow2(i as i64 + 1, P), "i = {i}");
        }
    }

    #[test]
    fn algorithm1_rejects_short_distance() {
        assert!(algorithm1(&Real::from_ratio(1, 2, P)).is_err());
    }

    #[test]
    fn algorithm2_trajectory_ignores_true_distance() {
        let alg2 = algorithm2(P);
        let a = alg2.trajectory(&r(7), 1).unwrap();
        assert_eq!(a.vertices()[1].t, r(4));
        assert_eq!(a.vertices()[1].x, r(4));
        let b = algorithm1(&r(1)).unwrap().trajectory(&r(1), 3).unwrap();
        assert_eq!(alg2.trajectory(&r(13), 3).unwrap(), b);
    }

    #[test]
    fn algorithm2_catches_scaled_target_no_later() {
        let alg2 = algorithm2(P);
        for side in Side::BOTH {
            let near = alg2.catch(&Target::new(r(2), r(2), side).unwrap(), 24).unwrap();
            let far = alg2.catch(&Target::new(r(4), r(1), side).unwrap(), 24).unwrap();
            assert!(near.time <= far.time);
        }
        let t = alg2.catch(&Target::new(r(1), r(1), Side::Positive).unwrap(), 24).unwrap();
        assert_eq!(t.time, r(1));
    }

    #[test]
    fn geometric_description() {
        let e = custom_sequence("geometric:4,2", P).unwrap();
        for i in 0..6 {
            assert_eq!(e.spec.log2_u(i, P).unwrap(), r(i as i64 + 2));
        }
        assert!(e.spec.validate_prefix(10, P).is_ok());
    }

    #[test]
    fn constant_description_fails_at_use() {
        let e = custom_sequence("geometric:5,1", P).unwrap();
        assert!(matches!(
            e.spec.validate_prefix(3, P),
            Err(EngineError::NotIncreasingByTwo { index: 0, .. })
        ));
        assert!(e.ledger(&r(1), 3).is_err());
    }

    #[test]
    fn table_description_is_finite() {
        let table: Vec<String> = (0..=22).map(|i| (1u64 << i).to_string()).collect();
        let e = custom_sequence(&format!("table:{}", table.join(",")), P).unwrap();
        assert!(e.spec.validate_prefix(20, P).is_ok());
        assert_eq!(e.spec.log2_u(22, P).unwrap(), r(1 << 22));
        assert!(matches!(e.spec.log2_u(23, P), Err(EngineError::BeyondDefinedRounds { .. })));
    }

    #[test]
    fn log2poly_description() {
        let e = custom_sequence("log2poly:2,1,0.5", P).unwrap();
        assert_eq!(e.spec.log2_u(2, P).unwrap(), r(6));
    }

    #[test]
    fn bad_descriptions() {
        for d in ["geometric:1", "nope:1,2", "table:", "log2poly:x", "geometric:0.5,2", "plain"] {
            assert!(custom_sequence(d, P).is_err(), "{d}");
        }
        assert!(matches!(lookup("alg3", &r(1)), Err(CatalogError::UnknownStrategy(_))));
    }

    #[test]
    fn reference_curves() {
        let half = Real::from_ratio(1, 2, P);
        assert_eq!(reference_known_speed_and_distance(&half), r(5));
        assert_eq!(reference_known_speed(&half), r(49));
        assert_eq!(reference_known_speed(&r(0)), r(9));
    }
}
