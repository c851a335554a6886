//! Analytic round ledger for zigzag strategies.
//!
//! A zigzag strategy is fixed by a sequence of evasiveness values `u_i`. On
//! round `i` the robot leaves the origin, runs to `(−1)^i x_i` and comes back,
//! where `x_i` is exactly long enough to catch the target of evasiveness `u_i`
//! on that side. With `s_i = x_0 + … + x_i` and `s_{−1} = 0`:
//!
//! ```text
//! x_i = u_i·d + (2u_i − 2)·s_{i−1}
//! s_i = u_i·d + (2u_i − 1)·s_{i−1}
//! T   = u·d + 2u·s_{k−1}        (target caught on round k)
//! ```

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::numerics::{log2_one_minus_pow2, log_sum, Log2Real, NumericsError, Real, EXPONENT_LIMIT};
use crate::oracle::{Trajectory, Vertex};

/// Rounds examined before a catch search gives up.
pub const DEFAULT_HORIZON: usize = 24;

/// Largest precision a trajectory is widened to.
pub const TRAJECTORY_MAX_PRECISION: usize = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("invalid target: {0}")]
    InvalidTarget(String),
    #[error("strategy `{name}` violates u_(i+2) > u_i at index {index}")]
    NotIncreasingByTwo { name: String, index: usize },
    #[error("strategy `{name}` is not strictly increasing at index {index}")]
    NotStrictlyIncreasing { name: String, index: usize },
    #[error("strategy `{name}` has u_{index} < 1")]
    BelowOne { name: String, index: usize },
    #[error("strategy `{name}` is only defined for {defined} rounds, {requested} requested")]
    BeyondDefinedRounds { name: String, requested: usize, defined: usize },
    #[error("no qualifying round within horizon {horizon}")]
    HorizonExhausted { horizon: usize },
    #[error("round {round} exceeds the linear exponent range")]
    Overflow { round: usize },
    #[error("at least one round is required")]
    NoRounds,
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Side of the line holding the target; round `i` visits side `i mod 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Positive,
    Negative,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Positive, Side::Negative];

    pub fn index(self) -> usize {
        match self {
            Side::Positive => 0,
            Side::Negative => 1,
        }
    }

    pub fn from_index(i: usize) -> Side {
        if i.is_multiple_of(2) { Side::Positive } else { Side::Negative }
    }

    /// Side visited on round `round`.
    pub fn of_round(round: usize) -> Side {
        Side::from_index(round)
    }

    pub fn signum(self) -> i64 {
        match self {
            Side::Positive => 1,
            Side::Negative => -1,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// A target with evasiveness `u = 1/(1 − v)`, initial distance `d` and side.
#[derive(Clone, Debug)]
pub struct Target {
    u: Real,
    d: Real,
    side: Side,
}

impl Target {
    /// Requires `u ≥ 1` and `d ≥ 1`.
    pub fn new(u: Real, d: Real, side: Side) -> Result<Self, EngineError> {
        let one = Real::one(d.precision());
        if d < one {
            return Err(EngineError::InvalidTarget(format!("distance {d} is below 1")));
        }
        Self::exploratory(u, d, side)
    }

    /// Any `d > 0`; only the kinematic oracle accepts such targets.
    pub fn exploratory(u: Real, d: Real, side: Side) -> Result<Self, EngineError> {
        if !u.is_finite() || u < Real::one(u.precision()) {
            return Err(EngineError::InvalidTarget(format!("evasiveness {u} is below 1")));
        }
        if !d.is_finite() || !d.is_positive() {
            return Err(EngineError::InvalidTarget(format!("distance {d} is not positive")));
        }
        Ok(Target { u, d, side })
    }

    /// Target described by its speed `0 ≤ v < 1`.
    pub fn from_speed(v: Real, d: Real, side: Side) -> Result<Self, EngineError> {
        let one = Real::one(v.precision());
        if v.is_negative() || v >= one {
            return Err(EngineError::InvalidTarget(format!("speed {v} outside [0, 1)")));
        }
        Self::new((&one - &v).recip(), d, side)
    }

    pub fn u(&self) -> &Real {
        &self.u
    }

    pub fn d(&self) -> &Real {
        &self.d
    }

    pub fn side(&self) -> Side {
        self.side
    }

    /// `v = 1 − 1/u`.
    pub fn speed(&self) -> Real {
        Real::one(self.u.precision()) - self.u.recip()
    }

    /// Offline optimum `u·d`.
    pub fn optimal_time(&self) -> Real {
        &self.u * &self.d
    }

    /// Signed position `±(d + t − t/u)` at time `t`; written without `v` so
    /// that `v` never rounds to 1 for huge `u`.
    pub fn position_at(&self, t: &Real) -> Real {
        let x = &(&self.d + t) - &(t / &self.u);
        match self.side {
            Side::Positive => x,
            Side::Negative => -x,
        }
    }

    pub fn precision(&self) -> usize {
        self.u.precision().max(self.d.precision())
    }
}

type Log2Generator = dyn Fn(usize, usize) -> Real + Send + Sync;

/// Sequence `i ↦ log₂ u_i` defining a zigzag strategy.
#[derive(Clone)]
pub struct ZigzagSpec {
    name: String,
    generator: Arc<Log2Generator>,
    defined_rounds: Option<usize>,
}

impl fmt::Debug for ZigzagSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ZigzagSpec")
            .field("name", &self.name)
            .field("defined_rounds", &self.defined_rounds)
            .finish()
    }
}

impl ZigzagSpec {
    /// `log2_u(i, precision)` must return `log₂ u_i` evaluated at that precision.
    pub fn new(name: impl Into<String>, log2_u: impl Fn(usize, usize) -> Real + Send + Sync + 'static) -> Self {
        ZigzagSpec { name: name.into(), generator: Arc::new(log2_u), defined_rounds: None }
    }

    /// A sequence only defined for `i < rounds`.
    pub fn finite(
        name: impl Into<String>,
        rounds: usize,
        log2_u: impl Fn(usize, usize) -> Real + Send + Sync + 'static,
    ) -> Self {
        ZigzagSpec { name: name.into(), generator: Arc::new(log2_u), defined_rounds: Some(rounds) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn defined_rounds(&self) -> Option<usize> {
        self.defined_rounds
    }

    fn is_defined(&self, i: usize) -> bool {
        self.defined_rounds.is_none_or(|n| i < n)
    }

    pub fn log2_u(&self, i: usize, precision: usize) -> Result<Real, EngineError> {
        match self.defined_rounds {
            Some(n) if i >= n => Err(EngineError::BeyondDefinedRounds {
                name: self.name.clone(),
                requested: i + 1,
                defined: n,
            }),
            _ => Ok((self.generator)(i, precision)),
        }
    }

    pub fn u(&self, i: usize, precision: usize) -> Result<Real, EngineError> {
        Ok(self.log2_u(i, precision)?.exp2())
    }

    /// Checks `u_i ≥ 1` and `u_(i+2) > u_i` for every `i < rounds`, looking ahead
    /// two terms where the sequence is defined.
    pub fn validate_prefix(&self, rounds: usize, precision: usize) -> Result<(), EngineError> {
        let w = self.defined_prefix(rounds + 2, precision)?;
        let zero = Real::zero(precision);
        for (i, wi) in w.iter().enumerate() {
            if *wi < zero {
                return Err(EngineError::BelowOne { name: self.name.clone(), index: i });
            }
        }
        for i in 0..rounds.min(w.len().saturating_sub(2)) {
            if w[i + 2] <= w[i] {
                return Err(EngineError::NotIncreasingByTwo { name: self.name.clone(), index: i });
            }
        }
        Ok(())
    }

    /// Checks `u_0 < u_1 < … < u_(rounds−1)`.
    pub fn validate_strictly_increasing(&self, rounds: usize, precision: usize) -> Result<(), EngineError> {
        let w = self.defined_prefix(rounds, precision)?;
        for i in 1..w.len() {
            if w[i] <= w[i - 1] {
                return Err(EngineError::NotStrictlyIncreasing { name: self.name.clone(), index: i });
            }
        }
        Ok(())
    }

    /// `log₂ u_i` for `i < rounds`, truncated to the defined range.
    fn defined_prefix(&self, rounds: usize, precision: usize) -> Result<Vec<Real>, EngineError> {
        (0..rounds)
            .take_while(|&i| self.is_defined(i))
            .map(|i| self.log2_u(i, precision))
            .collect()
    }
}

/// Outcome of an analytic catch.
#[derive(Clone, Debug)]
pub struct Catch {
    pub round: usize,
    pub time: Real,
}

/// Per-round distances of a zigzag strategy run with a given `d`.
#[derive(Clone, Debug)]
pub struct RoundLedger {
    d: Real,
    log2_u: Vec<Real>,
    u: Vec<Real>,
    x: Vec<Real>,
    /// `s[0] = s_(−1) = 0`, `s[i + 1] = s_i`.
    s: Vec<Real>,
    log2_s: Vec<Log2Real>,
}

impl RoundLedger {
    pub fn rounds(&self) -> usize {
        self.x.len()
    }

    pub fn d(&self) -> &Real {
        &self.d
    }

    pub fn precision(&self) -> usize {
        self.d.precision()
    }

    pub fn u(&self, i: usize) -> &Real {
        &self.u[i]
    }

    pub fn log2_u(&self, i: usize) -> &Real {
        &self.log2_u[i]
    }

    pub fn x(&self, i: usize) -> &Real {
        &self.x[i]
    }

    /// `s_i` for `−1 ≤ i < rounds`.
    pub fn s(&self, i: isize) -> &Real {
        &self.s[(i + 1) as usize]
    }

    /// `s_(k−1)`, the distance already covered when round `k` starts.
    pub fn s_before(&self, k: usize) -> &Real {
        &self.s[k]
    }

    /// Log-domain mirror of `s_i` for `−1 ≤ i < rounds`.
    pub fn log2_s(&self, i: isize) -> &Log2Real {
        &self.log2_s[(i + 1) as usize]
    }

    /// First round whose outbound leg reaches the target, for any target
    /// distance (not only the ledger's own `d`).
    pub fn catch(&self, target: &Target) -> Option<Catch> {
        let u = target.u();
        let two = Real::from_u64(2, self.precision());
        let ud = u * target.d();
        (target.side().index()..self.rounds()).step_by(2).find_map(|k| {
            let s_prev = self.s_before(k);
            // meeting point of the outbound leg with the target's world-line
            let needed = &ud + &((&(&two * u) - &two) * s_prev);
            (self.x[k] >= needed).then(|| Catch { round: k, time: &ud + &(&(&two * u) * s_prev) })
        })
    }

    /// Log₂ margins of `d·∏u_n ≤ s_i ≤ 2^(i+1)·d·∏u_n`, as `(lower, upper)`.
    pub fn product_sandwich_margins(&self, i: usize) -> (Real, Real) {
        let p = self.precision();
        let log_prod = self.log2_u[..=i].iter().fold(self.d.log2(), |acc, w| acc + w);
        let log_s = self.log2_s(i as isize).log2().expect("s_i > 0").clone();
        let lower = &log_s - &log_prod;
        let upper = &(&log_prod + &Real::from_u64(i as u64 + 1, p)) - &log_s;
        (lower, upper)
    }

    /// Robot path through all ledger rounds.
    ///
    /// Vertex times are running sums of the turn distances, carried at a
    /// precision wide enough to hold every sum exactly (up to
    /// [`TRAJECTORY_MAX_PRECISION`] bits), so each leg has slope exactly ±1.
    /// At the ledger's own precision a late vertex would absorb the earlier
    /// sums entirely and the path would drift off unit speed.
    pub fn trajectory(&self) -> Trajectory {
        let q = self.exact_sum_precision();
        let widen = |v: &Real| v.with_precision(q).expect("q ≥ ledger precision");
        let mut vertices = Vec::with_capacity(2 * self.rounds() + 1);
        let mut t = Real::zero(q);
        vertices.push(Vertex::new(t.clone(), Real::zero(q)));
        for k in 0..self.rounds() {
            let x = widen(&self.x[k]);
            t = &t + &x;
            let turn = match Side::of_round(k) {
                Side::Positive => x.clone(),
                Side::Negative => -&x,
            };
            vertices.push(Vertex::new(t.clone(), turn));
            t = &t + &x;
            vertices.push(Vertex::new(t.clone(), Real::zero(q)));
        }
        Trajectory::new(vertices)
    }

    /// Bits needed to add up `2·Σ x_k` without rounding, capped.
    fn exact_sum_precision(&self) -> usize {
        let p = self.precision();
        let top = self.x.iter().filter_map(Real::binary_exponent).max().unwrap_or(0) + 2 + (2 * self.rounds()).ilog2() as i64;
        let low = self.x.iter().filter_map(Real::binary_exponent).min().unwrap_or(0) - p as i64;
        ((top - low + 8).max(p as i64) as usize).min(TRAJECTORY_MAX_PRECISION.max(p))
    }
}

/// Builds the ledger for `rounds` rounds at distance `d` (precision taken from `d`).
pub fn compute_rounds(spec: &ZigzagSpec, d: &Real, rounds: usize) -> Result<RoundLedger, EngineError> {
    if rounds == 0 {
        return Err(EngineError::NoRounds);
    }
    let p = d.precision();
    if *d < Real::one(p) {
        return Err(EngineError::InvalidTarget(format!("distance {d} is below 1")));
    }
    spec.validate_prefix(rounds, p)?;

    let two = Real::from_u64(2, p);
    let one = Real::one(p);
    let log2_d = d.log2();
    let mut ledger = RoundLedger {
        d: d.clone(),
        log2_u: Vec::with_capacity(rounds),
        u: Vec::with_capacity(rounds),
        x: Vec::with_capacity(rounds),
        s: vec![Real::zero(p)],
        log2_s: vec![Log2Real::zero(p)],
    };
    for i in 0..rounds {
        let w = spec.log2_u(i, p)?;
        let u = w.exp2();
        if !u.is_finite() {
            return Err(EngineError::Overflow { round: i });
        }
        let s_prev = ledger.s.last().expect("s_(-1) present").clone();
        let x = &(&u * d) + &((&(&two * &u) - &two) * &s_prev);
        let s = &x + &s_prev;
        if !s.is_finite() || s.binary_exponent().is_some_and(|e| e > EXPONENT_LIMIT - 64) {
            return Err(EngineError::Overflow { round: i });
        }
        let log_s = log_round_step(&w, &log2_d, ledger.log2_s.last().expect("log s_(-1)"))?;
        ledger.log2_u.push(w);
        ledger.u.push(u);
        ledger.x.push(x);
        ledger.s.push(s);
        ledger.log2_s.push(log_s);
    }
    debug_assert!(ledger.x.iter().all(|x| *x >= one));
    Ok(ledger)
}

/// One step of `s_i = u_i·d + (2u_i − 1)·s_(i−1)` in the log₂ domain.
fn log_round_step(w: &Real, log2_d: &Real, log_s_prev: &Log2Real) -> Result<Log2Real, EngineError> {
    let p = w.precision();
    let one = Real::one(p);
    let head = Log2Real::from_log2(w + log2_d);
    // log₂(2u − 1) = w + 1 + log₂(1 − 2^−(w+1))
    let w1 = w + &one;
    let factor = &w1 + &log2_one_minus_pow2(&w1);
    let tail = log_s_prev.scale_log2(&factor);
    Ok(log_sum(&head, &tail)?)
}

/// `log₂ s_i` for `i < rounds`, computed purely in the log domain so it works
/// far past the linear exponent range.
pub fn compute_log_rounds(spec: &ZigzagSpec, d: &Real, rounds: usize) -> Result<Vec<Log2Real>, EngineError> {
    if rounds == 0 {
        return Err(EngineError::NoRounds);
    }
    let p = d.precision();
    if *d < Real::one(p) {
        return Err(EngineError::InvalidTarget(format!("distance {d} is below 1")));
    }
    spec.validate_prefix(rounds, p)?;
    let log2_d = d.log2();
    let mut out: Vec<Log2Real> = Vec::with_capacity(rounds);
    let mut prev = Log2Real::zero(p);
    for i in 0..rounds {
        let w = spec.log2_u(i, p)?;
        let next = log_round_step(&w, &log2_d, &prev)?;
        out.push(next.clone());
        prev = next;
    }
    Ok(out)
}

/// Smallest round `i ≤ horizon` on `side` with `u_i ≥ u`.
pub fn catch_round(spec: &ZigzagSpec, u: &Real, side: Side, horizon: usize) -> Result<usize, EngineError> {
    let p = u.precision();
    if *u < Real::one(p) {
        return Err(EngineError::InvalidTarget(format!("evasiveness {u} is below 1")));
    }
    let bits = u.binary_exponent().unwrap_or(0);
    for i in (side.index()..=horizon).step_by(2) {
        let w = spec.log2_u(i, p)?;
        // 2^w exceeds u as soon as w clears u's binary exponent
        if w > Real::from_i64(bits + 1, p) || w.exp2() >= *u {
            return Ok(i);
        }
    }
    Err(EngineError::HorizonExhausted { horizon })
}

/// `T = u·d + 2u·s_(k−1)` for the round `k` that catches the target.
pub fn catch_time(spec: &ZigzagSpec, target: &Target, horizon: usize) -> Result<Real, EngineError> {
    let k = catch_round(spec, target.u(), target.side(), horizon)?;
    let ud = target.optimal_time();
    if k == 0 {
        return Ok(ud);
    }
    let ledger = compute_rounds(spec, target.d(), k)?;
    Ok(&ud + &(target.u().mul_pow2(1) * ledger.s_before(k)))
}

/// `max_σ (1 + (2/d)·s_(k(σ)−1))`, the competitive ratio with known `d`.
pub fn competitive_ratio(spec: &ZigzagSpec, u: &Real, d: &Real, horizon: usize) -> Result<Real, EngineError> {
    let p = u.precision().max(d.precision());
    if *d < Real::one(p) {
        return Err(EngineError::InvalidTarget(format!("distance {d} is below 1")));
    }
    let rounds: Vec<usize> = Side::BOTH
        .iter()
        .map(|&side| catch_round(spec, u, side, horizon))
        .collect::<Result<_, _>>()?;
    let k_max = *rounds.iter().max().expect("two sides");
    let one = Real::one(p);
    if k_max == 0 {
        return Ok(one);
    }
    let ledger = compute_rounds(spec, d, k_max)?;
    Ok(rounds
        .iter()
        .map(|&k| &one + &(ledger.s_before(k).mul_pow2(1) / d))
        .fold(one.clone(), |a, b| a.max(&b)))
}

/// Robot path for the first `rounds` rounds.
pub fn trajectory(spec: &ZigzagSpec, d: &Real, rounds: usize) -> Result<Trajectory, EngineError> {
    Ok(compute_rounds(spec, d, rounds)?.trajectory())
}
