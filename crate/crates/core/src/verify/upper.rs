//! Key-point certification of `CR(u) ≤ c·u^(4 − h(u))`.
//!
//! For a strictly increasing schedule and an increasing `F`, checking
//! `1 + (2/d)·s_(i+1) ≤ F(u_i)` at every key point `u_i` bounds the ratio on
//! all of `u > u_k`. Everything is evaluated in the log₂ domain.

use std::fmt;
use std::sync::Arc;

use crate::catalog::CatalogEntry;
use crate::engine::compute_log_rounds;
use crate::numerics::{log_sum, Log2Real, Real};
use crate::verify::diff::phi_at_one;
use crate::verify::{certified, precondition, CheckRecord, VerifyError};

type Exponent = dyn Fn(&Real) -> Real + Send + Sync;

/// Bound `F(u) = c·u^(4 − h(u))`; `h` is given as a function of `log₂ u`.
#[derive(Clone)]
pub struct BoundSpec {
    pub name: String,
    pub c: Real,
    h: Arc<Exponent>,
    pub domain_min: Real,
}

impl fmt::Debug for BoundSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundSpec").field("name", &self.name).field("c", &self.c).finish()
    }
}

impl BoundSpec {
    pub fn new(
        name: impl Into<String>,
        c: Real,
        h_of_log2_u: impl Fn(&Real) -> Real + Send + Sync + 'static,
        domain_min: Real,
    ) -> Self {
        BoundSpec { name: name.into(), c, h: Arc::new(h_of_log2_u), domain_min }
    }

    /// `c = 56.18`, `h(u) = (log₂ log₂ u)^−2`, valid for `u > 4`.
    pub fn known_distance(precision: usize) -> Self {
        Self::new(
            "56.18·u^(4-(log2 log2 u)^-2)",
            Real::from_ratio(5618, 100, precision),
            |log2_u| {
                let l = log2_u.log2();
                (&l * &l).recip()
            },
            Real::from_u64(4, precision),
        )
    }

    pub fn with_constant(&self, c: Real) -> Self {
        BoundSpec { c, ..self.clone() }
    }

    pub fn h(&self, log2_u: &Real) -> Real {
        (self.h)(log2_u)
    }

    /// `log₂ F(u) = log₂ c + (4 − h(u))·log₂ u`.
    pub fn log2_f(&self, log2_u: &Real) -> Real {
        let four = Real::from_u64(4, log2_u.precision());
        &self.c.log2() + &((four - self.h(log2_u)) * log2_u)
    }

    pub fn f(&self, u: &Real) -> Real {
        self.log2_f(&u.log2()).exp2()
    }

    /// Samples `log₂ F` on `samples` points with `log₂ u` geometrically spaced
    /// over `(log₂ domain_min, log2_u_max]` and returns the smallest step.
    pub fn min_increment(&self, log2_u_max: &Real, samples: usize) -> Real {
        let p = log2_u_max.precision();
        let lo = self.domain_min.log2();
        let ratio = (log2_u_max / &lo).log2();
        let mut prev = self.log2_f(&lo);
        let mut worst: Option<Real> = None;
        for j in 1..=samples {
            let frac = Real::from_ratio(j as i64, samples as i64, p);
            let w = &lo * &(&ratio * &frac).exp2();
            let cur = self.log2_f(&w);
            let step = &cur - &prev;
            worst = Some(match worst {
                Some(m) => m.min(&step),
                None => step,
            });
            prev = cur;
        }
        worst.unwrap_or_else(|| Real::zero(p))
    }
}

#[derive(Clone, Debug)]
pub struct KeyPointMargin {
    pub round: usize,
    /// `log₂(1 + (2/d)·s_(i+1))`.
    pub lhs_log2: Real,
    /// `log₂ F(u_i)`.
    pub rhs_log2: Real,
    pub margin_log2: Real,
    /// `log₂ c` needed for this key point alone.
    pub required_log2_c: Real,
}

/// Diagnostic trace of `H(i) = 4·log₂ u_i − log₂(1 + (2/d)·s_(i+1))` against
/// the closed-form lower estimate `3·2^i·(i+1)^(−3/2) − 2 − log₂ 9 + Φ(1)`.
#[derive(Clone, Debug)]
pub struct HTrace {
    pub round: usize,
    pub h_value: Real,
    pub estimate: Real,
}

#[derive(Clone, Debug)]
pub struct UpperBoundReport {
    pub strategy: String,
    pub bound: String,
    pub precision_bits: usize,
    pub key_points: Vec<KeyPointMargin>,
    pub increasing_samples: usize,
    pub min_increment_log2: Real,
    pub h_trace: Vec<HTrace>,
}

impl UpperBoundReport {
    pub fn passed(&self) -> bool {
        self.key_points.iter().all(|k| certified(&k.margin_log2)) && self.min_increment_log2.is_positive()
    }

    /// Smallest `c` on a 0.01 grid that clears every key point (exploratory).
    pub fn smallest_c(&self) -> Option<Real> {
        let worst = self.key_points.iter().map(|k| &k.required_log2_c).fold(None::<Real>, |acc, r| match acc {
            Some(a) => Some(a.max(r)),
            None => Some(r.clone()),
        })?;
        let p = worst.precision();
        let hundred = Real::from_u64(100, p);
        let c = worst.exp2();
        let mut grid = (&c * &hundred).floor() / &hundred;
        while grid < c {
            grid = &grid + &hundred.recip();
        }
        Some(grid)
    }

    pub fn records(&self) -> Vec<CheckRecord> {
        let mut out: Vec<CheckRecord> = self
            .key_points
            .iter()
            .map(|k| {
                CheckRecord::new(format!("upper/key_point/i={:02}", k.round), self.precision_bits)
                    .param("strategy", &self.strategy)
                    .param("bound", &self.bound)
                    .margin(&k.margin_log2)
            })
            .collect();
        out.push(
            CheckRecord::new("upper/bound_increasing", self.precision_bits)
                .param("bound", &self.bound)
                .param("samples", self.increasing_samples)
                .margin(&self.min_increment_log2)
                .passed(self.min_increment_log2.is_positive()),
        );
        out
    }
}

/// Certifies `1 + (2/d)·s_(i+1) ≤ F(u_i)` for `1 ≤ i ≤ i_max` and that `F`
/// increases over `(domain_min, u_(i_max+1)]`.
pub fn check_upper_bound(entry: &CatalogEntry, bound: &BoundSpec, i_max: usize) -> Result<UpperBoundReport, VerifyError> {
    if i_max < 1 {
        return Err(precondition("i_max must be at least 1"));
    }
    let d = &entry.reference_d;
    let p = d.precision().max(bound.c.precision());
    entry
        .spec
        .validate_strictly_increasing(i_max + 2, p)
        .map_err(|e| precondition(format!("key-point reduction needs a strictly increasing sequence: {e}")))?;
    let log_s = compute_log_rounds(&entry.spec, d, i_max + 2)?;
    let log2_d = d.log2();
    let one = Log2Real::from_log2(Real::zero(p));
    let four = Real::from_u64(4, p);
    let estimate_const = Real::from_u64(2, p) + Real::from_u64(9, p).log2() - phi_at_one(p);

    let mut key_points = Vec::with_capacity(i_max);
    let mut h_trace = Vec::with_capacity(i_max);
    for i in 1..=i_max {
        let w = entry.spec.log2_u(i, p)?;
        let scaled = log_s[i + 1].scale_log2(&(Real::one(p) - &log2_d));
        let lhs = log_sum(&one, &scaled)?.log2().expect("positive").clone();
        let rhs = bound.log2_f(&w);
        let margin = &rhs - &lhs;
        let required = &lhs - &((&four - &bound.h(&w)) * &w);
        h_trace.push(HTrace {
            round: i,
            h_value: &(&four * &w) - &lhs,
            estimate: &(Real::from_u64(3, p).mul_pow2(i as i64) * Real::from_u64(i as u64 + 1, p).powf(&Real::from_ratio(-3, 2, p)))
                - &estimate_const,
        });
        key_points.push(KeyPointMargin { round: i, lhs_log2: lhs, rhs_log2: rhs, margin_log2: margin, required_log2_c: required });
    }
    let samples = 2000;
    let top = entry.spec.log2_u(i_max + 1, p)?;
    let min_increment_log2 = bound.min_increment(&top, samples);
    Ok(UpperBoundReport {
        strategy: entry.id.clone(),
        bound: bound.name.clone(),
        precision_bits: p,
        key_points,
        increasing_samples: samples,
        min_increment_log2,
        h_trace,
    })
}
