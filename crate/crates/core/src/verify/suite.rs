//! Runs groups of checks at `p` and `2p` and collects a deterministic report.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::{algorithm1, CatalogEntry};
use crate::engine::DEFAULT_HORIZON;
use crate::numerics::{Real, DEFAULT_PRECISION};
use crate::verify::diff::{g_closed_form, g_sequence, phi_at_one, phi_binding_lower_bound};
use crate::verify::{
    beck_newman_check, certified, check_abel_decomposition, check_diff_bounds, check_diff_positivity,
    check_lower_bound_family, check_product_sandwich, check_unknown_d_bound, check_upper_bound, log2_margin, phi,
    precondition, refute_polynomial_bound, rounding_slack, BeckNewmanState, BoundSpec, CheckRecord, DiffOracle,
    VerifyError,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    All,
    Upper,
    Lower,
    Diff,
    UnknownD,
}

impl Suite {
    fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" => Ok(Suite::All),
            "upper" => Ok(Suite::Upper),
            "lower" => Ok(Suite::Lower),
            "diff" => Ok(Suite::Diff),
            "unknown_d" | "unknown-d" => Ok(Suite::UnknownD),
            other => Err(format!("unknown suite `{other}` (expected all, upper, lower, diff, unknown_d)")),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::All => "all",
            Suite::Upper => "upper",
            Suite::Lower => "lower",
            Suite::Diff => "diff",
            Suite::UnknownD => "unknown_d",
        })
    }
}

#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub precision_bits: usize,
    pub i_max: usize,
    pub horizon: usize,
    /// Refute only this `(a, k)` instead of the default grid.
    pub refute: Option<(String, String)>,
    /// Run the difference bounds for this order only.
    pub diff_k: Option<usize>,
    /// Restrict the difference bounds to this single point.
    pub diff_x: Option<String>,
    /// Report the smallest passing constant on a 0.01 grid (exploratory).
    pub find_c: bool,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            precision_bits: DEFAULT_PRECISION,
            i_max: 12,
            horizon: DEFAULT_HORIZON,
            refute: None,
            diff_k: None,
            diff_x: None,
            find_c: false,
        }
    }
}

pub const REFUTATION_A: [&str; 3] = ["1", "1000", "1000000"];
pub const REFUTATION_K: [&str; 5] = ["1", "2", "3", "3.5", "3.9"];
pub const REFUTATION_I_MAX: usize = 40;

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub pass: bool,
    pub records: Vec<CheckRecord>,
}

impl VerificationReport {
    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| !r.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

type Task = Box<dyn Fn() -> Result<Vec<CheckRecord>, VerifyError> + Send + Sync>;

fn task(f: impl Fn() -> Result<Vec<CheckRecord>, VerifyError> + Send + Sync + 'static) -> Task {
    Box::new(f)
}

/// Runs `suite` at `p` and `2p`; records are ordered by check id, then precision.
pub fn run_suite(suite: Suite, opts: &SuiteOptions) -> Result<VerificationReport, VerifyError> {
    validate(opts)?;
    let p = opts.precision_bits;
    let tasks: Vec<Task> = [p, 2 * p].into_iter().flat_map(|q| tasks_at(suite, opts, q)).collect();
    let mut records: Vec<CheckRecord> = tasks
        .par_iter()
        .map(|t| t())
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .collect();
    records.sort_by(|a, b| (&a.check_id, a.precision_bits).cmp(&(&b.check_id, b.precision_bits)));
    let pass = records.iter().all(|r| r.pass);
    Ok(VerificationReport { suite: suite.to_string(), pass, records })
}

/// Rejects bad options before any work starts.
fn validate(opts: &SuiteOptions) -> Result<(), VerifyError> {
    let p = opts.precision_bits;
    if let Some(k) = opts.diff_k {
        if !(1..=DiffOracle::sqrt().max_order).contains(&k) {
            return Err(precondition(format!("--k {k} is out of range")));
        }
        if let Some(x) = &opts.diff_x {
            if Real::parse(x, p)? <= Real::from_u64(k as u64, p) {
                return Err(precondition(format!("--x {x} must exceed --k {k}")));
            }
        }
    }
    if let Some((a, k)) = &opts.refute {
        let a = Real::parse(a, p)?;
        let k = Real::parse(k, p)?;
        if !a.is_positive() || !k.is_positive() || k >= Real::from_u64(4, p) {
            return Err(precondition("refutation needs a > 0 and 0 < k < 4"));
        }
    }
    if opts.i_max < 1 {
        return Err(precondition("--i-max must be at least 1"));
    }
    Ok(())
}

fn alg1(p: usize) -> Result<CatalogEntry, VerifyError> {
    Ok(algorithm1(&Real::one(p))?)
}

fn tasks_at(suite: Suite, opts: &SuiteOptions, p: usize) -> Vec<Task> {
    let mut out = Vec::new();
    if suite.includes(Suite::Upper) {
        upper_tasks(opts, p, &mut out);
    }
    if suite.includes(Suite::Lower) {
        lower_tasks(opts, p, &mut out);
    }
    if suite.includes(Suite::Diff) {
        diff_tasks(opts, p, &mut out);
    }
    if suite.includes(Suite::UnknownD) {
        unknown_d_tasks(opts, p, &mut out);
    }
    out
}

fn upper_tasks(opts: &SuiteOptions, p: usize, out: &mut Vec<Task>) {
    let i_max = opts.i_max;
    let find_c = opts.find_c;
    let horizon = opts.horizon;
    out.push(task(move || {
        let rep = check_upper_bound(&alg1(p)?, &BoundSpec::known_distance(p), i_max)?;
        let mut recs = rep.records();
        if find_c {
            if let Some(c) = rep.smallest_c() {
                recs.push(
                    CheckRecord::new("upper/find_c", p)
                        .param("smallest_c", c.to_shortest(12))
                        .param("note", "exploratory, not normative")
                        .passed(true),
                );
            }
        }
        Ok(recs)
    }));
    out.push(task(move || {
        // F(4) lies above the second plateau 9·2^(6√2) − 7
        let f4 = BoundSpec::known_distance(p).f(&Real::from_u64(4, p));
        let entry = alg1(p)?;
        let plateau = entry.competitive_ratio(&Real::from_u64(100, p), &Real::one(p), horizon)?;
        let mut recs = vec![CheckRecord::new("upper/f4_above_plateau", p)
            .param("f4", f4.to_decimal(6))
            .margin(&log2_margin(&plateau, &f4))];
        for u in 1..=4u64 {
            let cr = entry.competitive_ratio(&Real::from_u64(u, p), &Real::one(p), horizon)?;
            let nine = Real::from_u64(9, p);
            recs.push(
                CheckRecord::new(format!("upper/plateau_nine/u={u}"), p)
                    .passed((&cr - &nine).abs() <= &nine * &rounding_slack(p)),
            );
        }
        Ok(recs)
    }));
}

fn lower_tasks(opts: &SuiteOptions, p: usize, out: &mut Vec<Task>) {
    out.push(task(move || Ok(check_product_sandwich(&alg1(p)?, 20)?.records())));
    out.push(task(move || Ok(check_lower_bound_family(&alg1(p)?, 10, 8)?.records())));
    out.push(task(move || {
        let state = BeckNewmanState::from_spec(&alg1(p)?.spec, 24, Real::from_ratio(39, 10, p))?;
        let rep = beck_newman_check(&state, 1, 20)?;
        Ok(vec![
            CheckRecord::new("lower/beck_newman/condition_fails", p)
                .param("h", "3.9")
                .param("first_failure", rep.first_failure.map(|i| i.to_string()).unwrap_or_default())
                .passed(rep.first_failure.is_some()),
            CheckRecord::new("lower/beck_newman/second_difference_equivalence", p).passed(rep.equivalence_holds()),
        ])
    }));
    let pairs: Vec<(String, String)> = match &opts.refute {
        Some(pair) => vec![pair.clone()],
        None => REFUTATION_A
            .iter()
            .flat_map(|a| REFUTATION_K.iter().map(move |k| (a.to_string(), k.to_string())))
            .collect(),
    };
    for (a, k) in pairs {
        out.push(task(move || {
            let id = format!("lower/refute/a={a:0>7}/k={k}");
            let w = refute_polynomial_bound(&alg1(p)?, &Real::parse(&a, p)?, &Real::parse(&k, p)?, REFUTATION_I_MAX)?;
            let rec = CheckRecord::new(id, p).param("a", &a).param("k", &k);
            Ok(vec![match w {
                Some(w) => rec
                    .param("round_index", w.round_index)
                    .param("log2_u_star", w.log2_u_star.to_shortest(20))
                    .param("cr_log2", w.cr_log2.to_shortest(20))
                    .param("bound_log2", w.bound_log2.to_shortest(20))
                    .margin(&w.margin_log2())
                    .passed(w.consistent()),
                None => rec.passed(false),
            }])
        }));
    }
}

fn diff_tasks(opts: &SuiteOptions, p: usize, out: &mut Vec<Task>) {
    let oracle = DiffOracle::sqrt();
    if let Some(k) = opts.diff_k {
        let x = opts.diff_x.clone();
        out.push(task(move || {
            let grid = match &x {
                Some(x) => vec![Real::parse(x, p)?],
                None => (1..=50).map(|j| Real::from_u64(k as u64 + j, p)).collect(),
            };
            Ok(check_diff_bounds(&oracle, k, &grid)?.records())
        }));
        return;
    }
    for k in 1..=4usize {
        out.push(task(move || {
            let grid: Vec<Real> = (1..=50).map(|j| Real::from_u64(k as u64 + j, p)).collect();
            Ok(check_diff_bounds(&oracle, k, &grid)?.records())
        }));
        for m in 0..=k {
            out.push(task(move || {
                let grid: Vec<Real> = (1..=50).map(|j| Real::from_u64(m as u64 + j, p)).collect();
                Ok(check_diff_positivity(&oracle, k, m, &grid)?.records())
            }));
        }
    }
    for m in 0..=2usize {
        out.push(task(move || {
            (0..=32)
                .map(|n| {
                    let rep = check_abel_decomposition(
                        |j, q| Real::pow2(j as i64, q),
                        &DiffOracle::sqrt_shifted(),
                        n,
                        m,
                        p,
                    )?;
                    Ok(rep.record())
                })
                .collect()
        }));
    }
    out.push(task(move || {
        let p1 = phi(1, p)?;
        let closed = phi_at_one(p);
        let tol = closed.abs() * Real::pow2(-200, p);
        let mut recs = vec![CheckRecord::new("diff/phi/closed_form_at_1", p).passed((&p1 - &closed).abs() <= tol)];
        for i in 1..=100u64 {
            let v = phi(i, p)?;
            recs.push(
                CheckRecord::new(format!("diff/phi/min_at_1/i={i:03}"), p)
                    .param("phi", v.to_shortest(12))
                    .passed(certified(&(&v - &p1))),
            );
        }
        let b5 = phi_binding_lower_bound(5, p);
        recs.push(CheckRecord::new("diff/phi/binding_at_5", p).passed(certified(&(phi(5, p)? - b5))));
        Ok(recs)
    }));
    out.push(task(move || {
        Ok((1..=3)
            .map(|k| {
                let ok = g_sequence(k, 64).iter().enumerate().all(|(n, v)| g_closed_form(k, n) == Some(*v));
                CheckRecord::new(format!("diff/g_sequence/k={k}"), p).param("n_max", 64).passed(ok)
            })
            .collect())
    }));
}

/// `1 + 15j/9` for `j = 0..9`.
pub fn unknown_d_grid(p: usize) -> Vec<Real> {
    (0..10).map(|j| Real::one(p) + Real::from_ratio(15 * j, 9, p)).collect()
}

fn unknown_d_tasks(opts: &SuiteOptions, p: usize, out: &mut Vec<Task>) {
    let horizon = opts.horizon;
    for (iu, _) in unknown_d_grid(p).iter().enumerate() {
        out.push(task(move || {
            let grid = unknown_d_grid(p);
            let u = &grid[iu];
            let mut recs = Vec::new();
            for d in &grid {
                recs.extend(check_unknown_d_bound(u, d, horizon)?.records());
            }
            Ok(recs)
        }));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in [Suite::All, Suite::Upper, Suite::Lower, Suite::Diff, Suite::UnknownD] {
            assert_eq!(s.to_string().parse::<Suite>().unwrap(), s);
        }
        assert!("everything".parse::<Suite>().is_err());
    }

    #[test]
    fn diff_point_below_order_is_a_precondition_error() {
        let opts = SuiteOptions { diff_k: Some(5), diff_x: Some("3".into()), ..Default::default() };
        assert!(matches!(run_suite(Suite::Diff, &opts), Err(VerifyError::Precondition(_))));
    }

    #[test]
    fn single_refutation_runs_at_both_precisions() {
        let opts = SuiteOptions { refute: Some(("1".into(), "3".into())), ..Default::default() };
        let rep = run_suite(Suite::Lower, &opts).unwrap();
        let refs: Vec<_> = rep.records.iter().filter(|r| r.check_id.starts_with("lower/refute")).collect();
        assert_eq!(refs.len(), 2);
        assert_eq!((refs[0].precision_bits, refs[1].precision_bits), (256, 512));
        assert!(rep.pass);
    }

    #[test]
    fn records_are_sorted() {
        let opts = SuiteOptions { diff_k: Some(2), ..Default::default() };
        let rep = run_suite(Suite::Diff, &opts).unwrap();
        let keys: Vec<_> = rep.records.iter().map(|r| (r.check_id.clone(), r.precision_bits)).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert!(rep.pass);
    }
}
