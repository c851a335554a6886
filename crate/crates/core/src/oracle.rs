//! Strategy-agnostic catch times by exact segment/world-line intersection.
//!
//! A trajectory is a finite polyline of `(t, x)` vertices. The target moving
//! away from the origin traces the line `x = ±(d + v·t)`, so on each segment
//! the gap `g(t) = A(t) ∓ (d + v·t)` is affine and its first zero is found in
//! closed form. Nothing is time-stepped.

use std::fmt::Write as _;
use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::engine::Target;
use crate::numerics::{Real, Sign};

/// Significant digits used by the trajectory CSV writer unless told otherwise.
pub const DEFAULT_CSV_DIGITS: usize = 40;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("trajectory has no vertices")]
    EmptyTrajectory,
    #[error("line {line}: {reason}")]
    Csv { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Vertex {
    pub t: Real,
    pub x: Real,
}

impl Vertex {
    pub fn new(t: Real, x: Real) -> Self {
        Vertex { t, x }
    }
}

/// Piecewise-linear robot path.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    vertices: Vec<Vertex>,
}

impl Trajectory {
    /// Takes the vertices as given; see [`verify_strategy_validity`].
    pub fn new(vertices: Vec<Vertex>) -> Self {
        Trajectory { vertices }
    }

    /// Straight run from the origin at unit speed in direction `sign` for `duration`.
    pub fn straight(duration: Real, sign: i64) -> Self {
        let p = duration.precision();
        let end = if sign < 0 { -&duration } else { duration.clone() };
        Trajectory::new(vec![Vertex::new(Real::zero(p), Real::zero(p)), Vertex::new(duration, end)])
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn segments(&self) -> impl Iterator<Item = (&Vertex, &Vertex)> {
        self.vertices.windows(2).map(|w| (&w[0], &w[1]))
    }

    pub fn end_time(&self) -> Option<&Real> {
        self.vertices.last().map(|v| &v.t)
    }

    /// Writes the `t,x` CSV with at most `digits` significant digits per value.
    pub fn write_csv(&self, mut out: impl Write, digits: usize) -> io::Result<()> {
        writeln!(out, "t,x")?;
        for v in &self.vertices {
            writeln!(out, "{},{}", v.t.to_decimal(digits), v.x.to_decimal(digits))?;
        }
        Ok(())
    }

    pub fn to_csv(&self, digits: usize) -> String {
        let mut s = String::from("t,x\n");
        for v in &self.vertices {
            let _ = writeln!(s, "{},{}", v.t.to_decimal(digits), v.x.to_decimal(digits));
        }
        s
    }

    pub fn read_csv(input: impl BufRead, precision: usize) -> Result<Self, OracleError> {
        let mut vertices = Vec::new();
        let mut saw_header = false;
        for (idx, line) in input.lines().enumerate() {
            let line = line?;
            let line_no = idx + 1;
            let text = line.trim();
            if text.is_empty() {
                continue;
            }
            if !saw_header {
                if text.replace(' ', "") != "t,x" {
                    return Err(OracleError::Csv { line: line_no, reason: "expected header `t,x`".into() });
                }
                saw_header = true;
                continue;
            }
            let (t, x) = text
                .split_once(',')
                .ok_or_else(|| OracleError::Csv { line: line_no, reason: "expected two columns".into() })?;
            let parse = |s: &str| {
                Real::parse(s, precision).map_err(|e| OracleError::Csv { line: line_no, reason: e.to_string() })
            };
            vertices.push(Vertex::new(parse(t)?, parse(x)?));
        }
        if !saw_header {
            return Err(OracleError::Csv { line: 1, reason: "missing header `t,x`".into() });
        }
        Ok(Trajectory::new(vertices))
    }

    pub fn from_csv(text: &str, precision: usize) -> Result<Self, OracleError> {
        Self::read_csv(text.as_bytes(), precision)
    }
}

/// First meeting of a trajectory and a target.
#[derive(Clone, Debug, PartialEq)]
pub struct CatchResult {
    pub time: Real,
    pub segment_index: usize,
    pub position: Real,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Intercept {
    Caught(CatchResult),
    /// The target is still ahead when the trajectory ends at `until`.
    NotCaught { until: Real },
}

impl Intercept {
    pub fn caught(&self) -> Option<&CatchResult> {
        match self {
            Intercept::Caught(c) => Some(c),
            Intercept::NotCaught { .. } => None,
        }
    }
}

/// Earliest `t` with `A(t) = (−1)^σ (d + v·t)`. A touch at a vertex counts; a
/// segment lying on the world-line yields its start time.
pub fn intersect(traj: &Trajectory, target: &Target) -> Result<Intercept, OracleError> {
    let first = traj.vertices.first().ok_or(OracleError::EmptyTrajectory)?;
    let gap = |vx: &Vertex| &vx.x - &target.position_at(&vx.t);
    let caught = |time: Real, segment_index: usize| {
        let position = target.position_at(&time);
        Intercept::Caught(CatchResult { time, segment_index, position })
    };

    let mut g0 = gap(first);
    if g0.is_zero() {
        return Ok(caught(first.t.clone(), 0));
    }
    for (i, (a, b)) in traj.segments().enumerate() {
        let g1 = gap(b);
        if g1.is_zero() {
            return Ok(caught(b.t.clone(), i));
        }
        if g0.sign() != g1.sign() && g0.sign() != Sign::Zero {
            let dt = &b.t - &a.t;
            let t = &a.t + &((&dt * &g0) / (&g0 - &g1));
            return Ok(caught(t, i));
        }
        g0 = g1;
    }
    Ok(Intercept::NotCaught { until: traj.vertices.last().expect("non-empty").t.clone() })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    Empty,
    NotAtOrigin,
    /// `t` does not strictly increase along the segment.
    NonIncreasingTime,
    /// `|Δx| > Δt`.
    SpeedLimit,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub segment_index: usize,
    pub kind: ViolationKind,
}

#[derive(Clone, Debug, Default)]
pub struct ValidityReport {
    pub segments: usize,
    pub violations: Vec<Violation>,
    /// Segments run at unit speed, up to rounding.
    pub unit_speed_segments: usize,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Lists speed-limit and time-ordering violations per segment. Speeds are
/// compared with a relative tolerance of `2^−(p−16)`.
pub fn verify_strategy_validity(traj: &Trajectory) -> ValidityReport {
    let mut report = ValidityReport::default();
    let Some(first) = traj.vertices.first() else {
        report.violations.push(Violation { segment_index: 0, kind: ViolationKind::Empty });
        return report;
    };
    if !first.t.is_zero() || !first.x.is_zero() {
        report.violations.push(Violation { segment_index: 0, kind: ViolationKind::NotAtOrigin });
    }
    for (i, (a, b)) in traj.segments().enumerate() {
        report.segments += 1;
        let dt = &b.t - &a.t;
        let dx = (&b.x - &a.x).abs();
        if !dt.is_positive() {
            report.violations.push(Violation { segment_index: i, kind: ViolationKind::NonIncreasingTime });
            continue;
        }
        let tol = &dt * &Real::pow2(-(dt.precision() as i64 - 16), dt.precision());
        if dx > &dt + &tol {
            report.violations.push(Violation { segment_index: i, kind: ViolationKind::SpeedLimit });
        } else if (&dx - &dt).abs() <= tol {
            report.unit_speed_segments += 1;
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::algorithm1_spec;
    use crate::engine::{trajectory, Side};
    use crate::numerics::DEFAULT_PRECISION as P;

    fn r(x: i64) -> Real {
        Real::from_i64(x, P)
    }

    fn traj(points: &[(i64, i64)]) -> Trajectory {
        Trajectory::new(points.iter().map(|&(t, x)| Vertex::new(r(t), r(x))).collect())
    }

    #[test]
    fn straight_line_catches_static_and_moving_targets() {
        let line = Trajectory::straight(r(100), 1);
        let still = Target::new(r(1), r(1), Side::Positive).unwrap();
        assert_eq!(intersect(&line, &still).unwrap().caught().unwrap().time, r(1));
        let half_speed = Target::new(r(2), r(1), Side::Positive).unwrap();
        let c = intersect(&line, &half_speed).unwrap();
        assert_eq!(c.caught().unwrap().time, r(2));
        assert_eq!(c.caught().unwrap().position, r(2));
    }

    #[test]
    fn wrong_direction_is_not_caught() {
        let line = Trajectory::straight(r(100), 1);
        let t = Target::new(r(1), r(1), Side::Negative).unwrap();
        assert_eq!(intersect(&line, &t).unwrap(), Intercept::NotCaught { until: r(100) });
    }

    #[test]
    fn algorithm1_trajectory_catch_matches_analytic() {
        let tr = trajectory(&algorithm1_spec(), &r(1), 2).unwrap();
        let t = Target::new(r(4), r(1), Side::Negative).unwrap();
        let c = intersect(&tr, &t).unwrap();
        let c = c.caught().unwrap();
        assert_eq!(c.time, r(36));
        assert_eq!(c.segment_index, 2);
    }

    #[test]
    fn touch_at_turning_point_counts() {
        let tr = trajectory(&algorithm1_spec(), &r(1), 1).unwrap();
        let t = Target::new(r(4), r(1), Side::Positive).unwrap();
        assert_eq!(intersect(&tr, &t).unwrap().caught().unwrap().time, r(4));
    }

    #[test]
    fn collinear_segment_reports_its_start() {
        // target u = ∞ is impossible, so use a static target and a robot that stops on it
        let tr = traj(&[(0, 0), (1, 1), (5, 1)]);
        let t = Target::new(r(1), r(1), Side::Positive).unwrap();
        let c = intersect(&tr, &t).unwrap();
        assert_eq!(c.caught().unwrap().time, r(1));
        assert_eq!(c.caught().unwrap().segment_index, 0);
    }

    #[test]
    fn exploratory_distance_below_one() {
        let line = Trajectory::straight(r(10), -1);
        let t = Target::exploratory(r(1), Real::from_ratio(1, 4, P), Side::Negative).unwrap();
        assert_eq!(intersect(&line, &t).unwrap().caught().unwrap().time, Real::from_ratio(1, 4, P));
    }

    #[test]
    fn empty_trajectory_errors() {
        let t = Target::new(r(1), r(1), Side::Positive).unwrap();
        assert!(matches!(intersect(&Trajectory::new(vec![]), &t), Err(OracleError::EmptyTrajectory)));
    }

    #[test]
    fn validity_reports() {
        let tr = trajectory(&algorithm1_spec(), &r(1), 4).unwrap();
        let rep = verify_strategy_validity(&tr);
        assert!(rep.is_valid());
        assert_eq!(rep.unit_speed_segments, rep.segments);

        let fast = verify_strategy_validity(&traj(&[(0, 0), (1, 2)]));
        assert_eq!(fast.violations, vec![Violation { segment_index: 0, kind: ViolationKind::SpeedLimit }]);

        let stalled = verify_strategy_validity(&traj(&[(0, 0), (1, 1), (1, 0)]));
        assert_eq!(stalled.violations, vec![Violation { segment_index: 1, kind: ViolationKind::NonIncreasingTime }]);

        let shifted = verify_strategy_validity(&traj(&[(1, 0), (2, 1)]));
        assert_eq!(shifted.violations[0].kind, ViolationKind::NotAtOrigin);
    }

    #[test]
    fn csv_round_trip_and_errors() {
        let tr = trajectory(&algorithm1_spec(), &r(1), 1).unwrap();
        let text = tr.to_csv(DEFAULT_CSV_DIGITS);
        assert_eq!(text, "t,x\n0,0\n4,4\n8,0\n");
        assert_eq!(Trajectory::from_csv(&text, P).unwrap(), tr);

        let mut buf = Vec::new();
        tr.write_csv(&mut buf, 40).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), text);

        assert!(matches!(Trajectory::from_csv("a,b\n1,2\n", P), Err(OracleError::Csv { line: 1, .. })));
        assert!(matches!(Trajectory::from_csv("t,x\n1;2\n", P), Err(OracleError::Csv { line: 2, .. })));
        assert!(matches!(Trajectory::from_csv("t,x\n1,zz\n", P), Err(OracleError::Csv { line: 2, .. })));
    }
}
