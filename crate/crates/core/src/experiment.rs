//! Sweeps over the evasiveness and analytic/oracle cross-checks.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::catalog::{lookup, CatalogEntry, CatalogError};
use crate::engine::{EngineError, Side, Target, DEFAULT_HORIZON};
use crate::numerics::{NumericsError, Real, DEFAULT_PRECISION};
use crate::oracle::{intersect, Intercept, OracleError};
use crate::verify::BoundSpec;

/// Significant digits used for every rendered number.
pub const RENDER_DIGITS: usize = 50;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("target not caught within {rounds} rounds (trajectory ends at t = {until}); raise --rounds")]
    NotCaught { rounds: usize, until: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scale {
    Log,
    Linear,
}

impl FromStr for Scale {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "log" => Ok(Scale::Log),
            "linear" => Ok(Scale::Linear),
            other => Err(format!("unknown scale `{other}` (expected log or linear)")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub strategy_id: String,
    pub d: Real,
    pub u_min: Real,
    pub u_max: Real,
    pub samples: usize,
    pub scale: Scale,
    pub horizon: usize,
    /// Render linear values instead of log₂ columns.
    pub linear: bool,
}

impl SweepConfig {
    pub fn new(strategy_id: impl Into<String>, d: Real, u_min: Real, u_max: Real, samples: usize) -> Self {
        SweepConfig {
            strategy_id: strategy_id.into(),
            d,
            u_min,
            u_max,
            samples,
            scale: Scale::Log,
            horizon: DEFAULT_HORIZON,
            linear: false,
        }
    }

    pub fn precision(&self) -> usize {
        self.d.precision().max(self.u_min.precision()).max(self.u_max.precision())
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let p = self.precision();
        if self.u_min < Real::one(p) {
            return Err(ExperimentError::Config(format!("u_min = {} must be at least 1", self.u_min)));
        }
        if self.samples < 2 {
            return Err(ExperimentError::Config("samples must be at least 2".into()));
        }
        if self.u_max <= self.u_min {
            return Err(ExperimentError::Config(format!("u_max = {} must exceed u_min = {}", self.u_max, self.u_min)));
        }
        Ok(())
    }

    /// Sample points; the last one is exactly `u_max`.
    pub fn points(&self) -> Vec<Real> {
        let p = self.precision();
        let last = self.samples - 1;
        (0..self.samples)
            .map(|j| {
                if j == last {
                    return self.u_max.clone();
                }
                let frac = Real::from_ratio(j as i64, last as i64, p);
                match self.scale {
                    Scale::Linear => &self.u_min + &((&self.u_max - &self.u_min) * frac),
                    Scale::Log => &self.u_min * &((&self.u_max / &self.u_min).log2() * frac).exp2(),
                }
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct SweepRow {
    pub u: Real,
    pub d: Real,
    /// Side attaining the ratio; `None` when the horizon ran out.
    pub side: Option<Side>,
    pub catch_round: Option<usize>,
    pub catch_time: Option<Real>,
    pub opt_time: Real,
    pub cr: Option<Real>,
    pub bound: Option<Real>,
}

impl SweepRow {
    /// `bound / cr`.
    pub fn slack(&self) -> Option<Real> {
        Some(self.bound.as_ref()? / self.cr.as_ref()?)
    }
}

/// Reference bound for the catalogued strategies: `9` on `[1, 4]` and `F(u)`
/// above for the known-distance schedule, the two-branch bound for the
/// unknown-distance one, nothing for custom sequences.
pub fn reference_bound(entry: &CatalogEntry, u: &Real, d: &Real) -> Option<Real> {
    let p = u.precision();
    let one = Real::one(p);
    let four = Real::from_u64(4, p);
    let f = BoundSpec::known_distance(p);
    match entry.id.as_str() {
        "alg1" => Some(if *u <= four { Real::from_u64(9, p) } else { f.f(u) }),
        "alg2" => {
            let ud = u * d;
            Some(if ud <= four {
                &one + &(Real::from_u64(8, p) / d)
            } else {
                &one + &((f.f(&ud) - &one) / d)
            })
        }
        _ => None,
    }
}

fn sweep_row(entry: &CatalogEntry, u: &Real, d: &Real, horizon: usize) -> Result<SweepRow, ExperimentError> {
    let opt_time = u * d;
    let mut worst: Option<(Side, usize, Real)> = None;
    let mut exhausted = false;
    for side in Side::BOTH {
        match entry.catch(&Target::new(u.clone(), d.clone(), side)?, horizon) {
            Ok(c) => {
                if worst.as_ref().is_none_or(|(_, _, t)| c.time > *t) {
                    worst = Some((side, c.round, c.time));
                }
            }
            Err(EngineError::HorizonExhausted { .. }) => exhausted = true,
            Err(e) => return Err(e.into()),
        }
    }
    let bound = reference_bound(entry, u, d);
    if exhausted {
        return Ok(SweepRow {
            u: u.clone(),
            d: d.clone(),
            side: None,
            catch_round: None,
            catch_time: None,
            opt_time,
            cr: None,
            bound,
        });
    }
    let (side, round, time) = worst.expect("both sides caught");
    Ok(SweepRow {
        u: u.clone(),
        d: d.clone(),
        side: Some(side),
        catch_round: Some(round),
        cr: Some(&time / &opt_time),
        catch_time: Some(time),
        opt_time,
        bound,
    })
}

/// One row per sample, in input order.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>, ExperimentError> {
    config.validate()?;
    let entry = lookup(&config.strategy_id, &config.d)?;
    config.points().par_iter().map(|u| sweep_row(&entry, u, &config.d, config.horizon)).collect()
}

fn render(x: &Real) -> String {
    x.to_shortest(RENDER_DIGITS)
}

fn column(x: Option<&Real>, linear: bool) -> String {
    match x {
        Some(v) if linear => render(v),
        Some(v) => render(&v.log2()),
        None => String::new(),
    }
}

pub fn sweep_header(linear: bool) -> &'static str {
    if linear {
        "u,d,side,catch_round,catch_time,opt_time,cr,bound_F,slack"
    } else {
        "u,d,side,catch_round,catch_time_log2,opt_time_log2,cr_log2,bound_F_log2,slack_log2"
    }
}

pub fn sweep_to_csv(rows: &[SweepRow], linear: bool) -> String {
    let mut out = String::new();
    out.push_str(sweep_header(linear));
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            render(&r.u),
            render(&r.d),
            r.side.map(|s| s.to_string()).unwrap_or_default(),
            r.catch_round.map(|k| k.to_string()).unwrap_or_default(),
            column(r.catch_time.as_ref(), linear),
            column(Some(&r.opt_time), linear),
            column(r.cr.as_ref(), linear),
            column(r.bound.as_ref(), linear),
            column(r.slack().as_ref(), linear),
        );
    }
    out
}

pub fn sweep_to_json(rows: &[SweepRow], linear: bool) -> String {
    let names: Vec<&str> = sweep_header(linear).split(',').collect();
    let csv = sweep_to_csv(rows, linear);
    let objects: Vec<serde_json::Map<String, serde_json::Value>> = csv
        .lines()
        .skip(1)
        .map(|line| {
            names
                .iter()
                .zip(line.split(','))
                .map(|(k, v)| {
                    let value = if v.is_empty() { serde_json::Value::Null } else { serde_json::Value::String(v.into()) };
                    (k.to_string(), value)
                })
                .collect()
        })
        .collect();
    serde_json::to_string_pretty(&objects).expect("rows serialize")
}

/// Analytic catch time next to the oracle's intersection time.
#[derive(Clone, Debug, Serialize)]
pub struct OracleComparison {
    pub strategy: String,
    pub u: String,
    pub d: String,
    pub side: usize,
    pub rounds: usize,
    pub catch_round: usize,
    pub analytic_time: String,
    pub oracle_time: String,
    pub relative_discrepancy: String,
    #[serde(skip)]
    pub analytic: Real,
    #[serde(skip)]
    pub oracle: Real,
    #[serde(skip)]
    pub discrepancy: Real,
}

impl OracleComparison {
    pub fn to_text(&self) -> String {
        format!(
            "strategy: {}\ntarget: u = {}, d = {}, side {}\ncatch round: {}\nanalytic time: {}\noracle time: {}\nrelative discrepancy: {}\n",
            self.strategy,
            self.u,
            self.d,
            self.side,
            self.catch_round,
            self.analytic_time,
            self.oracle_time,
            self.relative_discrepancy
        )
    }
}

/// Compares `u·d + 2u·s_(k−1)` with the oracle on the first `rounds` rounds.
/// Oracle mode accepts any `d > 0`; the analytic side requires `d ≥ 1`.
pub fn compare_with_oracle(
    strategy_id: &str,
    u: &Real,
    d: &Real,
    side: Side,
    rounds: usize,
) -> Result<OracleComparison, ExperimentError> {
    if rounds == 0 {
        return Err(ExperimentError::Config("rounds must be at least 1".into()));
    }
    let p = u.precision().max(d.precision());
    let entry = lookup(strategy_id, &d.max(&Real::one(p)))?;
    let target = Target::new(u.clone(), d.clone(), side)?;
    let traj = entry.trajectory(d, rounds)?;
    let hit = match intersect(&traj, &target)? {
        Intercept::Caught(c) => c,
        Intercept::NotCaught { until } => {
            return Err(ExperimentError::NotCaught { rounds, until: render(&until) });
        }
    };
    let catch = entry.catch(&target, rounds - 1)?;
    let discrepancy = (&catch.time - &hit.time).abs() / &catch.time;
    Ok(OracleComparison {
        strategy: entry.id.clone(),
        u: render(u),
        d: render(d),
        side: side.index(),
        rounds,
        catch_round: catch.round,
        analytic_time: render(&catch.time),
        oracle_time: render(&hit.time),
        relative_discrepancy: discrepancy.to_shortest(6),
        analytic: catch.time,
        oracle: hit.time,
        discrepancy,
    })
}

/// Working precision from `LSL_PRECISION_BITS`, else the default.
pub fn precision_from_env() -> usize {
    std::env::var("LSL_PRECISION_BITS").ok().and_then(|v| v.parse().ok()).unwrap_or(DEFAULT_PRECISION)
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: usize = DEFAULT_PRECISION;

    fn r(n: u64) -> Real {
        Real::from_u64(n, P)
    }

    #[test]
    fn plateau_of_nine() {
        let rows = run_sweep(&SweepConfig::new("alg1", r(1), r(1), r(4), 7)).unwrap();
        let nine = r(9).log2();
        for row in &rows {
            let cr = row.cr.as_ref().unwrap().log2();
            assert!((&cr - &nine).abs() <= Real::pow2(-200, P));
        }
        assert_eq!(rows.last().unwrap().u, r(4));
    }

    #[test]
    fn second_plateau() {
        let rows = run_sweep(&SweepConfig::new("alg1", r(1), Real::from_ratio(4001, 1000, P), r(179), 9)).unwrap();
        let expect = (r(9) * (Real::from_u64(72, P).sqrt()).exp2()) - r(7);
        for row in &rows {
            let cr = row.cr.as_ref().unwrap();
            assert!((cr - &expect).abs() <= &expect * &Real::pow2(-200, P));
            assert!(row.slack().unwrap() > Real::one(P));
        }
    }

    #[test]
    fn degenerate_range_rejected() {
        assert!(run_sweep(&SweepConfig::new("alg1", r(1), r(3), r(3), 2)).is_err());
        assert!(run_sweep(&SweepConfig::new("alg1", r(1), r(1), r(3), 1)).is_err());
        assert!(run_sweep(&SweepConfig::new("alg1", r(1), Real::from_ratio(1, 2, P), r(3), 3)).is_err());
    }

    #[test]
    fn exhausted_horizon_leaves_blank_fields() {
        let mut cfg = SweepConfig::new("alg1", r(1), r(1), r(1000), 2);
        cfg.horizon = 1;
        let rows = run_sweep(&cfg).unwrap();
        assert!(rows[1].cr.is_none());
        let csv = sweep_to_csv(&rows, false);
        let last = csv.lines().last().unwrap();
        assert!(last.starts_with("1000,1,,,,"), "{last}");
    }

    #[test]
    fn csv_and_json_shapes() {
        let rows = run_sweep(&SweepConfig::new("alg1", r(1), r(1), r(4), 2)).unwrap();
        let csv = sweep_to_csv(&rows, false);
        assert_eq!(csv.lines().next().unwrap(), sweep_header(false));
        assert_eq!(csv.lines().count(), 3);
        let json: serde_json::Value = serde_json::from_str(&sweep_to_json(&rows, false)).unwrap();
        assert_eq!(json.as_array().unwrap().len(), 2);
        // at u = 1 the negative side is caught last, at t = 9
        assert_eq!(json[0]["side"], "1");
    }

    #[test]
    fn oracle_comparison_examples() {
        let c = compare_with_oracle("alg1", &r(4), &r(1), Side::Negative, 2).unwrap();
        assert_eq!(c.analytic, r(36));
        assert!(c.discrepancy <= Real::from_f64(1e-25, P));
        let c = compare_with_oracle("alg1", &r(1), &r(1), Side::Positive, 1).unwrap();
        assert_eq!(c.oracle, r(1));
        let far = compare_with_oracle("alg2", &r(2), &r(2), Side::Positive, 4).unwrap();
        let near = compare_with_oracle("alg2", &r(4), &r(1), Side::Positive, 4).unwrap();
        assert!(far.oracle <= near.oracle);
        assert!(matches!(
            compare_with_oracle("alg1", &r(200), &r(1), Side::Negative, 2),
            Err(ExperimentError::NotCaught { .. })
        ));
    }
}
